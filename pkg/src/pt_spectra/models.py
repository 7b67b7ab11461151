"""The two exactly solvable oscillator models and their matrix assemblies.

Model 1 is a two-dimensional anisotropic oscillator with the non-Hermitian
coupling ``i*lambda*x*y``; model 2 is a three-dimensional isotropic
oscillator for a charge in an imaginary axial magnetic field.  Both admit
closed-form spectra, which the matrix routes cross-validate.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from functools import reduce
from math import sqrt

import numpy as np

from .errors import InvalidBasisError
from .operator_algebra import (
    BasisSpec,
    OperatorMatrix,
    _momentum_block,
    _position_block,
    build_lz,
    build_momentum,
    build_position,
)

__all__ = [
    "ModelOneParams",
    "ModelTwoParams",
    "Regime",
    "NormalModeData",
    "normal_modes",
    "critical_coupling",
    "spectrum_model1",
    "hamiltonian_model1",
    "cyclotron_frequency",
    "omega1_squared",
    "critical_field",
    "spectrum_model2",
    "hamiltonian_model2_full",
    "hamiltonian_model2_reduced",
    "basis_for_model1",
    "basis_for_model2",
    "parity_sector_indices",
    "model1_sector_matrix",
    "model2_xy_block",
    "model2_axial_levels",
]


@dataclass(frozen=True)
class ModelOneParams:
    """2D anisotropic oscillator with imaginary bilinear coupling.

    The coupling ``lam`` may take any real value (including zero and both
    signs); equal frequencies are allowed on purpose — the isotropic limit
    has its own phase behavior worth probing.
    """

    omega_x: float
    omega_y: float
    lam: float
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.m <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")
        if self.omega_x <= 0 or self.omega_y <= 0:
            raise ValueError("oscillator frequencies must be positive")


@dataclass(frozen=True)
class ModelTwoParams:
    """3D isotropic oscillator of charge q in an imaginary field B z_hat."""

    omega: float
    B: float
    q: float = 1.0
    c: float = 1.0
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if min(self.omega, self.q, self.c, self.m, self.hbar) <= 0:
            raise ValueError("omega, q, c, m, hbar must be positive")
        if self.B < 0:
            raise ValueError("field strength must be non-negative")


class Regime(enum.Enum):
    """Branch of the normal-mode decoupling."""

    REAL = "real"
    COMPLEX = "complex"
    SINGULAR = "singular"  # isotropic with nonzero coupling: k undefined


@dataclass(frozen=True)
class NormalModeData:
    """Decoupling data of the 2D model.

    ``k_inv`` is the computed quantity; ``k`` itself diverges at the
    exceptional point (stored as complex infinity there).  ``alpha`` and
    ``beta`` are the rotation coefficients sqrt((1+k)/2), sqrt((1-k)/2),
    left as None when k is undefined or infinite.
    """

    omega_plus_sq: float
    omega_minus_sq: float
    k: complex
    k_inv: complex
    C1_sq: complex
    C2_sq: complex
    C1: complex
    C2: complex
    alpha: complex | None
    beta: complex | None
    regime: Regime


def critical_coupling(p: ModelOneParams) -> float:
    """Coupling at which the two normal-mode frequencies coalesce.

    Proportional to the anisotropy; identically zero for an isotropic
    oscillator, which therefore has no real-spectrum phase at any nonzero
    coupling.
    """
    return 0.5 * p.m * abs(p.omega_y**2 - p.omega_x**2)


def normal_modes(p: ModelOneParams) -> NormalModeData:
    """Complex normal-mode frequencies of the coupled 2D oscillator.

    Below the critical coupling both squared frequencies are real and
    positive; above it they form a conjugate pair, obtained with the
    branch ``1/k = +i*sqrt(4*lam^2/(m^2*wm^4) - 1)``.  All square roots
    are principal (cut on the negative real axis).
    """
    wp2 = p.omega_x**2 + p.omega_y**2
    wm2 = p.omega_y**2 - p.omega_x**2
    lam_c = critical_coupling(p)

    if p.lam == 0.0:
        c1_sq: complex = complex(p.omega_x**2)
        c2_sq: complex = complex(p.omega_y**2)
        k_inv: complex = 1.0 + 0.0j
        k: complex = 1.0 + 0.0j
        regime = Regime.REAL
    elif wm2 == 0.0:
        # isotropic with coupling: the k-parameterization degenerates but
        # the squared mode frequencies have a finite limit
        c1_sq = 0.5 * (wp2 - 2j * p.lam / p.m)
        c2_sq = 0.5 * (wp2 + 2j * p.lam / p.m)
        k_inv = 0.0 + 0.0j
        k = complex("inf")
        regime = Regime.SINGULAR
    else:
        radicand = 1.0 - 4.0 * p.lam**2 / (p.m**2 * wm2**2)
        if radicand > 0.0:
            k_inv = complex(sqrt(radicand))
        else:
            k_inv = 1j * sqrt(-radicand)
        k = 1.0 / k_inv if k_inv != 0.0 else complex("inf")
        c1_sq = 0.5 * (wp2 - wm2 * k_inv)
        c2_sq = 0.5 * (wp2 + wm2 * k_inv)
        regime = Regime.REAL if abs(p.lam) < lam_c else Regime.COMPLEX

    if regime is Regime.SINGULAR or not cmath.isfinite(k):
        alpha = beta = None
    else:
        alpha = cmath.sqrt((1.0 + k) / 2.0)
        beta = cmath.sqrt((1.0 - k) / 2.0)

    return NormalModeData(
        omega_plus_sq=wp2,
        omega_minus_sq=wm2,
        k=k,
        k_inv=k_inv,
        C1_sq=c1_sq,
        C2_sq=c2_sq,
        C1=cmath.sqrt(c1_sq),
        C2=cmath.sqrt(c2_sq),
        alpha=alpha,
        beta=beta,
        regime=regime,
    )


def spectrum_model1(p: ModelOneParams, n1: int, n2: int) -> complex:
    """Closed-form level (n1 + 1/2) hbar C1 + (n2 + 1/2) hbar C2.

    Real to machine precision below the critical coupling; above it the
    (n1, n2) and (n2, n1) labels give a conjugate pair.
    """
    nm = normal_modes(p)
    return (n1 + 0.5) * p.hbar * nm.C1 + (n2 + 0.5) * p.hbar * nm.C2


def basis_for_model1(p: ModelOneParams, dims: tuple[int, int]) -> BasisSpec:
    """Default basis: per-mode scale frequencies equal the physical ones."""
    return BasisSpec(dims=tuple(dims), scale_freqs=(p.omega_x, p.omega_y), mass=p.m, hbar=p.hbar)


def _mode_ho_block(basis: BasisSpec, mode: int, m: float, omega_sq: float) -> np.ndarray:
    """Single-mode block p^2/2m + (m wsq/2) x^2 in the basis scale."""
    x = _position_block(mode, basis)
    pmat = _momentum_block(mode, basis)
    return pmat @ pmat / (2.0 * m) + (0.5 * m * omega_sq) * (x @ x)


def hamiltonian_model1(p: ModelOneParams, basis: BasisSpec) -> OperatorMatrix:
    """Matrix of the coupled 2D Hamiltonian in the truncated product basis.

    Complex symmetric when the basis scale frequencies are real (they are).
    """
    if basis.n_modes != 2:
        raise InvalidBasisError("the 2D model needs exactly 2 modes")
    hx = _mode_ho_block(basis, 0, p.m, p.omega_x**2)
    hy = _mode_ho_block(basis, 1, p.m, p.omega_y**2)
    x = _position_block(0, basis)
    y = _position_block(1, basis)
    ix = np.eye(basis.dims[0], dtype=np.complex128)
    iy = np.eye(basis.dims[1], dtype=np.complex128)
    h = np.kron(hx, iy) + np.kron(ix, hy) + (1j * p.lam) * np.kron(x, y)
    return OperatorMatrix(h, basis)


# --- model 2 -----------------------------------------------------------------


def cyclotron_frequency(p: ModelTwoParams) -> float:
    return p.q * p.B / (p.m * p.c)


def omega1_squared(p: ModelTwoParams) -> float:
    """Squared transverse frequency after the gauge cross terms cancel."""
    return p.omega**2 - cyclotron_frequency(p) ** 2 / 4.0


def critical_field(p: ModelTwoParams) -> float:
    """Field strength where the transverse frequency hits zero."""
    return 2.0 * p.m * p.omega * p.c / p.q


def spectrum_model2(p: ModelTwoParams, nx: int, ny: int, nz: int, branch: int = +1) -> complex:
    """Closed-form level of the imaginary-field model.

    Below the critical field: (nx+ny+1) hbar w1 + (nz+1/2) hbar w, real.
    Above it the transverse frequency turns imaginary and the level splits
    into a conjugate pair; ``branch`` (+1 or -1) selects the member.
    """
    w1_sq = omega1_squared(p)
    axial = (nz + 0.5) * p.hbar * p.omega
    if w1_sq >= 0.0:
        return (nx + ny + 1) * p.hbar * sqrt(w1_sq) + axial
    wt = sqrt(-w1_sq)
    sign = 1.0 if branch >= 0 else -1.0
    return sign * 1j * (nx + ny + 1) * p.hbar * wt + axial


def basis_for_model2(p: ModelTwoParams, dims: tuple[int, int, int]) -> BasisSpec:
    """Default basis: the physical isotropic frequency on all three modes."""
    return BasisSpec(dims=tuple(dims), scale_freqs=(p.omega,) * 3, mass=p.m, hbar=p.hbar)


def hamiltonian_model2_full(p: ModelTwoParams, basis: BasisSpec) -> OperatorMatrix:
    """Literal symmetric-gauge assembly of the imaginary-field Hamiltonian.

    Uses the orbital magnetic moment q L_z / (2 m c); with that choice the
    angular-momentum cross terms cancel against the gauge expansion, which
    ``hamiltonian_model2_reduced`` exploits and the tests verify.

    Dense in the full 3-mode product space: memory grows as the square of
    the total dimension, so keep dims moderate for direct assembly.
    """
    if basis.n_modes != 3:
        raise InvalidBasisError("the 3D model needs exactly 3 modes")
    px = build_momentum(0, basis).entries
    py = build_momentum(1, basis).entries
    pz = build_momentum(2, basis).entries
    x = build_position(0, basis).entries
    y = build_position(1, basis).entries
    z = build_position(2, basis).entries
    lz = build_lz(basis).entries
    gauge = 1j * p.q * p.B / (2.0 * p.c)
    a1 = px + gauge * y
    a2 = py - gauge * x
    h = (a1 @ a1 + a2 @ a2 + pz @ pz) / (2.0 * p.m)
    h += (0.5 * p.m * p.omega**2) * (x @ x + y @ y + z @ z)
    h += (1j * p.q * p.B / (2.0 * p.m * p.c)) * lz
    return OperatorMatrix(h, basis)


def hamiltonian_model2_reduced(p: ModelTwoParams, basis: BasisSpec) -> OperatorMatrix:
    """Anisotropic-oscillator form left after the cross terms cancel.

    The transverse squared frequency may be negative beyond the critical
    field (inverted oscillator); the matrix stays well-defined — and real
    symmetric, which is exactly why the broken-phase resonances are not
    reachable from this route (see phase_analysis docs).
    """
    if basis.n_modes != 3:
        raise InvalidBasisError("the 3D model needs exactly 3 modes")
    w1_sq = omega1_squared(p)
    bx = _mode_ho_block(basis, 0, p.m, w1_sq)
    by = _mode_ho_block(basis, 1, p.m, w1_sq)
    bz = _mode_ho_block(basis, 2, p.m, p.omega**2)
    dx, dy, dz = basis.dims
    ix = np.eye(dx, dtype=np.complex128)
    iy = np.eye(dy, dtype=np.complex128)
    iz = np.eye(dz, dtype=np.complex128)
    h = np.kron(np.kron(bx, iy), iz)
    h += np.kron(np.kron(ix, by), iz)
    h += np.kron(np.kron(ix, iy), bz)
    return OperatorMatrix(h, basis)


# --- structure helpers for the spectra pipeline ------------------------------
#
# Both models conserve the total number parity of the transverse modes:
# every term changes nx+ny by an even amount, also after truncation, so the
# matrix splits exactly into two parity blocks.  Likewise the axial mode of
# model 2 decouples exactly, making its spectrum the Kronecker sum of the
# transverse block and an axial ladder.  These are similarity reorderings
# of the very same truncated matrices, validated entry-wise in the tests.


def parity_sector_indices(dims: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Indices of even and odd nx+ny states in the flattened 2-mode basis."""
    dx, dy = dims
    idx = np.arange(dx * dy)
    par = (idx // dy + idx % dy) % 2
    return idx[par == 0], idx[par == 1]


def model1_sector_matrix(p: ModelOneParams, basis: BasisSpec, sector: int) -> np.ndarray:
    """One parity block of the 2D Hamiltonian, assembled directly (F-order)."""
    if basis.n_modes != 2:
        raise InvalidBasisError("the 2D model needs exactly 2 modes")
    hx = _mode_ho_block(basis, 0, p.m, p.omega_x**2)
    hy = _mode_ho_block(basis, 1, p.m, p.omega_y**2)
    x = _position_block(0, basis)
    y = _position_block(1, basis)
    sel = parity_sector_indices(basis.dims)[sector]
    i1, i2 = sel // basis.dims[1], sel % basis.dims[1]
    same2 = i2[:, None] == i2[None, :]
    same1 = i1[:, None] == i1[None, :]
    block = (
        hx[np.ix_(i1, i1)] * same2
        + hy[np.ix_(i2, i2)] * same1
        + (1j * p.lam) * (x[np.ix_(i1, i1)] * y[np.ix_(i2, i2)])
    )
    return np.asfortranarray(block)


def model2_xy_block(p: ModelTwoParams, basis_xy: BasisSpec, reduced: bool = False) -> np.ndarray:
    """Transverse block of the 3D Hamiltonian on a 2-mode basis.

    ``reduced=False`` assembles the literal gauge-coupled form; the two
    differ only near the truncation edge, where products of truncated
    factors stop telescoping.
    """
    if basis_xy.n_modes != 2:
        raise InvalidBasisError("transverse block needs a 2-mode basis")
    px = _momentum_block(0, basis_xy)
    py = _momentum_block(1, basis_xy)
    x = _position_block(0, basis_xy)
    y = _position_block(1, basis_xy)
    ix = np.eye(basis_xy.dims[0], dtype=np.complex128)
    iy = np.eye(basis_xy.dims[1], dtype=np.complex128)
    if reduced:
        w1_sq = omega1_squared(p)
        bx = px @ px / (2.0 * p.m) + (0.5 * p.m * w1_sq) * (x @ x)
        by = py @ py / (2.0 * p.m) + (0.5 * p.m * w1_sq) * (y @ y)
        return np.kron(bx, iy) + np.kron(ix, by)
    g = 1j * p.q * p.B / (2.0 * p.c)
    h = np.kron(px @ px, iy) + np.kron(ix, py @ py)
    h += g * 2.0 * np.kron(px, y) - g * 2.0 * np.kron(x, py)
    h += g * g * (np.kron(ix, y @ y) + np.kron(x @ x, iy))
    h /= 2.0 * p.m
    h += (0.5 * p.m * p.omega**2) * (np.kron(x @ x, iy) + np.kron(ix, y @ y))
    h += (1j * p.q * p.B / (2.0 * p.m * p.c)) * (np.kron(x, py) - np.kron(px, y))
    return h


def model2_axial_levels(p: ModelTwoParams, dz: int) -> np.ndarray:
    """Axial-mode block eigenvalue input: the dz x dz oscillator matrix."""
    basis_z = BasisSpec(dims=(dz,), scale_freqs=(p.omega,), mass=p.m, hbar=p.hbar)
    return _mode_ho_block(basis_z, 0, p.m, p.omega**2)


def embed_kron(blocks: list[np.ndarray]) -> np.ndarray:
    """Kronecker chain helper used by tests to cross-check assemblies."""
    return reduce(np.kron, blocks)
