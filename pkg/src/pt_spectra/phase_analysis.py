"""Phase classification, conjugate pairing, parity action and bisection.

A spectrum is *unbroken* when every (converged) eigenvalue is real at the
working tolerance, *broken* when at least one conjugate pair carries an
imaginary part clearly above it.  The two thresholds differ by a factor
of ten on purpose: near an exceptional point the eigensolver loses about
half its digits, and the hysteresis band keeps the bisection indicator
from flickering there.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import eigensolver
from .errors import BracketError, InvalidBasisError
from .operator_algebra import BasisSpec, OperatorMatrix

__all__ = [
    "Spectrum",
    "PhaseKind",
    "PhaseLabel",
    "ParityVariant",
    "ConjugatePairing",
    "parity_matrix",
    "classify",
    "spectral_scale",
    "pair_conjugates",
    "pt_residual",
    "find_critical",
    "FindCriticalResult",
    "convergence_study",
    "ConvergenceStudy",
]

DEFAULT_EPS_REAL = 1e-8
DEFAULT_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with optional convergence flags and level labels."""

    values: np.ndarray
    converged: np.ndarray | None = None
    labels: tuple | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", vals)
        if self.converged is not None:
            conv = np.asarray(self.converged, dtype=bool)
            if conv.shape != vals.shape:
                raise ValueError("converged mask must match values in length")
            object.__setattr__(self, "converged", conv)

    def converged_values(self) -> np.ndarray:
        if self.converged is None:
            return self.values
        return self.values[self.converged]


class PhaseKind(enum.Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"
    CRITICAL = "critical"


@dataclass(frozen=True)
class PhaseLabel:
    """Classification with the evidence that produced it."""

    kind: PhaseKind
    max_abs_im: float
    evidence_count: int
    pt_residual_max: float | None = None


class ParityVariant(enum.Enum):
    """Spatial involutions usable as the P of a PT check."""

    P1 = "p1"  # x -> -x (2 modes)
    P2 = "p2"  # y -> -y (2 modes)
    P3 = "p3"  # x <-> y swap (2 modes, equal dims and scales)
    SPACE_INVERSION_3D = "space-inversion-3d"  # all three coordinates flip


def _number_parity_diag(dim: int) -> np.ndarray:
    d = np.ones(dim)
    d[1::2] = -1.0
    return np.diag(d).astype(np.complex128)


def parity_matrix(variant: ParityVariant, basis: BasisSpec) -> OperatorMatrix:
    """Matrix of the chosen parity in the truncated number basis.

    Coordinate reflection maps the number state |n> to (-1)^n |n>, so P1,
    P2 and full space inversion are diagonal sign matrices; the axis swap
    P3 permutes the two tensor slots and therefore needs identical mode
    truncations and scale frequencies.
    """
    if variant in (ParityVariant.P1, ParityVariant.P2, ParityVariant.P3):
        if basis.n_modes != 2:
            raise InvalidBasisError(f"{variant.value} parity is defined for 2-mode bases")
    if variant is ParityVariant.SPACE_INVERSION_3D and basis.n_modes != 3:
        raise InvalidBasisError("space inversion here applies to 3-mode bases")

    if variant is ParityVariant.P1:
        mat = np.kron(_number_parity_diag(basis.dims[0]), np.eye(basis.dims[1]))
    elif variant is ParityVariant.P2:
        mat = np.kron(np.eye(basis.dims[0]), _number_parity_diag(basis.dims[1]))
    elif variant is ParityVariant.P3:
        dx, dy = basis.dims
        if dx != dy or basis.scale_freqs[0] != basis.scale_freqs[1]:
            raise InvalidBasisError(
                "axis swap needs equal truncations and equal scale frequencies"
            )
        n = dx * dy
        mat = np.zeros((n, n), dtype=np.complex128)
        for i in range(dx):
            for j in range(dy):
                mat[i * dy + j, j * dx + i] = 1.0
    else:
        blocks = [_number_parity_diag(d) for d in basis.dims]
        mat = np.kron(np.kron(blocks[0], blocks[1]), blocks[2])
    return OperatorMatrix(mat, basis)


def spectral_scale(values: np.ndarray) -> float:
    """Representative magnitude of a spectrum block (for tolerances)."""
    vals = np.asarray(values)
    if vals.size == 0:
        return 1.0
    s = float(np.abs(vals).max())
    return s if s > 0.0 else 1.0


def classify(spec: Spectrum | Sequence[complex], scale: float,
             eps_real: float = DEFAULT_EPS_REAL) -> PhaseLabel:
    """Unbroken / Broken / Critical from the converged eigenvalues.

    Unbroken: max |Im| <= eps_real * scale.  Broken: some |Im| exceeds
    10 * eps_real * scale.  The band in between is Critical
    (indeterminate at this truncation).
    """
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    if not isinstance(spec, Spectrum):
        spec = Spectrum(np.asarray(spec, dtype=np.complex128))
    vals = spec.converged_values()
    if vals.size == 0:
        raise ValueError("cannot classify an empty spectrum")
    max_im = float(np.abs(vals.imag).max())
    if max_im <= eps_real * scale:
        kind = PhaseKind.UNBROKEN
    elif max_im > 10.0 * eps_real * scale:
        kind = PhaseKind.BROKEN
    else:
        kind = PhaseKind.CRITICAL
    return PhaseLabel(kind=kind, max_abs_im=max_im, evidence_count=int(vals.size))


@dataclass(frozen=True)
class ConjugatePairing:
    """Partition of a spectrum into conjugate pairs, reals and leftovers."""

    pairs: tuple[tuple[int, int], ...]
    reals: tuple[int, ...]
    unpaired: tuple[int, ...]


def pair_conjugates(spec: Spectrum | Sequence[complex], eps: float) -> ConjugatePairing:
    """Greedy conjugate matching.

    Eigenvalues with |Im| <= eps count as real.  Each remaining value with
    positive imaginary part grabs the unused negative-side value closest
    to its conjugate (lexicographic (Re, Im) order breaks ties); whatever
    cannot be matched lands in ``unpaired``.
    """
    if not isinstance(spec, Spectrum):
        spec = Spectrum(np.asarray(spec, dtype=np.complex128))
    vals = spec.values
    n = vals.size
    reals = [i for i in range(n) if abs(vals[i].imag) <= eps]
    pos = [i for i in range(n) if vals[i].imag > eps]
    neg = {i for i in range(n) if vals[i].imag < -eps}
    pos.sort(key=lambda i: (vals[i].real, vals[i].imag))
    pairs: list[tuple[int, int]] = []
    unpaired: list[int] = []
    for i in pos:
        target = vals[i].conjugate()
        best = None
        best_key = None
        for j in neg:
            key = (abs(vals[j] - target), vals[j].real, vals[j].imag)
            if best_key is None or key < best_key:
                best, best_key = j, key
        if best is None:
            unpaired.append(i)
        else:
            neg.remove(best)
            pairs.append((i, best))
    unpaired.extend(sorted(neg))
    return ConjugatePairing(tuple(pairs), tuple(reals), tuple(unpaired))


def pt_residual(vec: np.ndarray, parity: OperatorMatrix | np.ndarray) -> float:
    """Overlap defect of a state under the antilinear PT action.

    Applies P followed by complex conjugation and returns
    1 - |<PT v, v>| for the normalized vector: zero means v is a PT
    eigenstate up to a global phase, values near one mean maximal
    breaking.  Invariant under v -> exp(i theta) v.
    """
    v = np.asarray(vec, dtype=np.complex128).ravel()
    norm = np.linalg.norm(v)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("pt_residual needs a nonzero finite vector")
    v = v / norm
    p = np.asarray(getattr(parity, "entries", parity))
    w = p @ v.conj()
    return max(0.0, 1.0 - abs(np.vdot(w, v)))


@dataclass(frozen=True)
class FindCriticalResult:
    value: float
    bracket: tuple[float, float]
    evaluations: int


def find_critical(
    family: Callable[[float], Spectrum],
    lo: float,
    hi: float,
    tol: float,
    eps_real: float = DEFAULT_EPS_REAL,
    details: bool = False,
):
    """Bisect a scalar parameter for the unbroken-to-broken transition.

    ``family`` maps the parameter to a Spectrum (converged flags welcome);
    the Broken indicator is a classification strictly above the hysteresis
    band.  Both endpoints are checked first: the low end must classify
    Unbroken and the high end Broken, otherwise the bracket is rejected.
    Returns the midpoint of the final bracket (width <= tol).
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if not hi > lo:
        raise BracketError(f"empty bracket [{lo}, {hi}]")

    def is_broken(x: float) -> bool:
        spec = family(x)
        vals = spec.converged_values()
        label = classify(spec, spectral_scale(vals), eps_real)
        return label.kind is PhaseKind.BROKEN

    evaluations = 2
    if is_broken(lo):
        raise BracketError(f"low endpoint {lo} already classifies Broken")
    if not is_broken(hi):
        raise BracketError(f"high endpoint {hi} does not classify Broken")
    a, b = float(lo), float(hi)
    while b - a > tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:  # float exhaustion
            break
        evaluations += 1
        if is_broken(mid):
            b = mid
        else:
            a = mid
    result = FindCriticalResult(value=0.5 * (a + b), bracket=(a, b), evaluations=evaluations)
    return result if details else result.value


@dataclass
class ConvergenceRow:
    dim: int | tuple
    values: np.ndarray
    drifts: np.ndarray | None
    converged: np.ndarray


@dataclass
class ConvergenceStudy:
    """Truncation study: lowest levels per dim with drifts between dims."""

    rows: list[ConvergenceRow] = field(default_factory=list)

    def last_converged_values(self) -> np.ndarray:
        row = self.rows[-1]
        return row.values[row.converged]


def match_drifts(current: np.ndarray, previous: np.ndarray) -> np.ndarray:
    """Distance from each current level to its nearest previous-dim level."""
    drifts = np.empty(current.size)
    used = np.zeros(previous.size, dtype=bool)
    for i, v in enumerate(current):
        d = np.abs(previous - v)
        d[used] = np.inf
        j = int(np.argmin(d))
        used[j] = True
        drifts[i] = d[j]
    return drifts


def _lowest_levels(values: np.ndarray, levels: int) -> np.ndarray:
    order = np.lexsort((values.imag, values.real))
    return values[order][:levels]


def convergence_study(
    matrix_for_dim: Callable[[int], object],
    dims: Sequence[int],
    levels: int,
    cfg: eigensolver.SolverConfig | None = None,
    drift_tol: float = DEFAULT_DRIFT_TOL,
) -> ConvergenceStudy:
    """Diagonalize at increasing truncations and flag settled levels.

    A level counts as converged when its drift against the previous
    (coarser) truncation stays below ``drift_tol`` times the block scale.
    The first row carries no drift information and is left unconverged.
    """
    if list(dims) != sorted(set(dims)):
        raise ValueError("dims must be strictly increasing")
    study = ConvergenceStudy()
    prev: np.ndarray | None = None
    for dim in dims:
        mat = matrix_for_dim(dim)
        res = eigensolver.eigenvalues(mat, cfg)
        vals = _lowest_levels(res.values[res.converged], levels)
        if prev is None:
            drifts = None
            conv = np.zeros(vals.size, dtype=bool)
        else:
            drifts = match_drifts(vals, prev)
            conv = drifts <= drift_tol * spectral_scale(vals)
        study.rows.append(ConvergenceRow(dim=dim, values=vals, drifts=drifts, converged=conv))
        prev = vals
    return study
