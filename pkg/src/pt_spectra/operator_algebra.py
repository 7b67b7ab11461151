"""Truncated number-state representations of oscillator operators.

Everything here is dense ``complex128``.  Operators for a multi-mode basis
are built per mode and embedded into the product space with Kronecker
products; composition returns new immutable values, so matrices can be
shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import sqrt

import numpy as np

from .errors import InvalidBasisError

__all__ = [
    "BasisSpec",
    "OperatorMatrix",
    "build_ladder",
    "build_position",
    "build_momentum",
    "build_lz",
    "tensor_product",
]


@dataclass(frozen=True)
class BasisSpec:
    """Product basis of per-mode harmonic-oscillator number states.

    ``dims[i]`` is the truncation size of mode ``i`` and ``scale_freqs[i]``
    the frequency used to scale that mode's position/momentum quadratures.
    The scale frequency is a basis choice, not a physical parameter; it
    defaults to the physical oscillator frequency in the model helpers
    because that gives the best-conditioned truncation.
    """

    dims: tuple[int, ...]
    scale_freqs: tuple[float, ...]
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "scale_freqs", tuple(float(w) for w in self.scale_freqs))
        if not 1 <= len(self.dims) <= 3:
            raise InvalidBasisError(f"expected 1..3 modes, got {len(self.dims)}")
        if len(self.scale_freqs) != len(self.dims):
            raise InvalidBasisError("dims and scale_freqs must have equal length")
        if any(d < 2 for d in self.dims):
            raise InvalidBasisError(f"every mode needs dim >= 2, got {self.dims}")
        if any(w <= 0 for w in self.scale_freqs):
            raise InvalidBasisError(f"scale frequencies must be positive, got {self.scale_freqs}")
        if self.mass <= 0 or self.hbar <= 0:
            raise InvalidBasisError("mass and hbar must be positive")

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense square operator in a truncated product basis.

    Entries are immutable; arithmetic (``+``, ``-``, scalar ``*``, ``@``)
    returns new matrices and requires both operands to share a basis.
    """

    entries: np.ndarray
    basis: BasisSpec
    dim: int = field(init=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128, order="C", copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidBasisError(f"operator must be square, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise InvalidBasisError("operator entries must be finite")
        if arr.shape[0] != self.basis.total_dim:
            raise InvalidBasisError(
                f"matrix dim {arr.shape[0]} does not match basis total dim {self.basis.total_dim}"
            )
        object.__setattr__(self, "entries", _freeze(arr))
        object.__setattr__(self, "dim", arr.shape[0])

    def _check_compatible(self, other: "OperatorMatrix"):
        if self.basis != other.basis:
            raise InvalidBasisError("operands were built against different bases")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.entries + other.entries, self.basis)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.entries - other.entries, self.basis)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.entries * complex(scalar), self.basis)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.entries / complex(scalar), self.basis)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(-self.entries, self.basis)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_compatible(other)
        return OperatorMatrix(self.entries @ other.entries, self.basis)

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.basis)

    def conj(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj(), self.basis)

    @classmethod
    def identity(cls, basis: BasisSpec) -> "OperatorMatrix":
        return cls(np.eye(basis.total_dim, dtype=np.complex128), basis)


def _single_mode_basis(dim: int) -> BasisSpec:
    # Neutral basis for standalone ladder operators (dimensionless units).
    return BasisSpec(dims=(dim,), scale_freqs=(1.0,))


def _ladder_block(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim), dtype=np.complex128)
    for n in range(1, dim):
        a[n - 1, n] = sqrt(n)
    return a


def build_ladder(dim: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Lowering and raising operators on a single truncated mode.

    ``lowering[n-1, n] = sqrt(n)``; raising is the transpose.
    """
    if dim < 2:
        raise InvalidBasisError(f"ladder operators need dim >= 2, got {dim}")
    basis = _single_mode_basis(dim)
    a = _ladder_block(dim)
    return OperatorMatrix(a, basis), OperatorMatrix(a.T.copy(), basis)


def _embed(block: np.ndarray, mode: int, basis: BasisSpec) -> np.ndarray:
    """Kronecker-embed a single-mode block, identity on all other modes."""
    factors = [
        block if i == mode else np.eye(d, dtype=np.complex128)
        for i, d in enumerate(basis.dims)
    ]
    return reduce(np.kron, factors)


def _position_block(mode: int, basis: BasisSpec) -> np.ndarray:
    d = basis.dims[mode]
    a = _ladder_block(d)
    coeff = sqrt(basis.hbar / (2.0 * basis.mass * basis.scale_freqs[mode]))
    return coeff * (a + a.T)


def _momentum_block(mode: int, basis: BasisSpec) -> np.ndarray:
    d = basis.dims[mode]
    a = _ladder_block(d)
    coeff = sqrt(basis.mass * basis.hbar * basis.scale_freqs[mode] / 2.0)
    return 1j * coeff * (a.T - a)


def _check_mode(mode: int, basis: BasisSpec):
    if not 0 <= mode < basis.n_modes:
        raise IndexError(f"mode {mode} out of range for {basis.n_modes}-mode basis")


def build_position(mode: int, basis: BasisSpec) -> OperatorMatrix:
    """Position quadrature sqrt(hbar/2mw0)(a + a^dag) on the given mode."""
    _check_mode(mode, basis)
    return OperatorMatrix(_embed(_position_block(mode, basis), mode, basis), basis)


def build_momentum(mode: int, basis: BasisSpec) -> OperatorMatrix:
    """Momentum quadrature i sqrt(m hbar w0/2)(a^dag - a) on the given mode."""
    _check_mode(mode, basis)
    return OperatorMatrix(_embed(_momentum_block(mode, basis), mode, basis), basis)


def build_lz(basis: BasisSpec) -> OperatorMatrix:
    """Axial angular momentum x p_y - y p_x on modes 0 and 1.

    Purely imaginary Hermitian (real antisymmetric structure times i).
    """
    if basis.n_modes < 2:
        raise InvalidBasisError("L_z needs at least two modes")
    x0 = _position_block(0, basis)
    p0 = _momentum_block(0, basis)
    x1 = _position_block(1, basis)
    p1 = _momentum_block(1, basis)
    # kron(A, B) of mode-0/mode-1 blocks == (A on mode 0) @ (B on mode 1)
    lz = np.kron(x0, p1) - np.kron(p0, x1)
    if basis.n_modes == 3:
        lz = np.kron(lz, np.eye(basis.dims[2], dtype=np.complex128))
    return OperatorMatrix(lz, basis)


def tensor_product(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product; the result lives in the concatenated-mode basis."""
    if a.basis.mass != b.basis.mass or a.basis.hbar != b.basis.hbar:
        raise InvalidBasisError("tensor factors disagree on mass or hbar")
    basis = BasisSpec(
        dims=a.basis.dims + b.basis.dims,
        scale_freqs=a.basis.scale_freqs + b.basis.scale_freqs,
        mass=a.basis.mass,
        hbar=a.basis.hbar,
    )
    return OperatorMatrix(np.kron(a.entries, b.entries), basis)
