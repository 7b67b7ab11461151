"""Shared solver types and the O(n^2) pieces that need no compiled kernel."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SolverConfig",
    "EigenResult",
    "BalanceRecord",
    "balance_inplace",
    "hess_lu",
    "hess_lu_solve",
    "dense_lu_inplace",
    "dense_lu_solve",
    "sort_by_re_im",
    "fro_norm",
]

_RADIX = 2.0


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for the QR eigensolver.

    ``max_sweeps`` defaults to ``30 * dim`` when left as ``None``.
    ``shift_strategy`` is ``"wilkinson"`` (trailing 2x2 eigenvalue nearest
    the corner) or ``"rayleigh"`` (corner entry itself).
    """

    max_sweeps: int | None = None
    deflation_eps: float = 1e-13
    shift_strategy: str = "wilkinson"
    tol_resid: float = 1e-9

    def __post_init__(self):
        if not 0 < self.deflation_eps < 1:
            raise ValueError("deflation_eps must lie in (0, 1)")
        if not 0 < self.tol_resid < 1:
            raise ValueError("tol_resid must lie in (0, 1)")
        if self.shift_strategy not in ("wilkinson", "rayleigh"):
            raise ValueError(f"unknown shift strategy {self.shift_strategy!r}")

    def sweeps_budget(self, dim: int) -> int:
        n = 30 * dim if self.max_sweeps is None else self.max_sweeps
        if n < dim:
            raise ValueError("max_sweeps must be at least the matrix dimension")
        return n


@dataclass
class EigenResult:
    """Eigenvalues (and optionally eigenvectors) of one matrix.

    ``values`` is sorted by (Re, Im) ascending, multiplicities included.
    ``vectors[:, k]`` (when requested) is unit-norm and aligned with
    ``values[k]``.  ``converged[k]`` is False for eigenvalues whose QR
    window hit the sweep budget or whose vector missed the residual bound.
    """

    values: np.ndarray
    converged: np.ndarray
    iterations: int
    vectors: np.ndarray | None = None
    residuals: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class BalanceRecord:
    """Diagonal similarity scaling, stored as the per-row factors d.

    The balanced matrix is ``inv(D) A D``; an eigenvector y of it maps back
    to ``D y``.  Factors are exact powers of two, so the scaling commits no
    rounding error.
    """

    scale: np.ndarray

    def restore_vector(self, y: np.ndarray) -> np.ndarray:
        return self.scale * y


def fro_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def sort_by_re_im(values: np.ndarray, *companions: np.ndarray):
    """Deterministic (Re, Im) lexicographic ascending order."""
    order = np.lexsort((values.imag, values.real))
    sorted_vals = values[order]
    if not companions:
        return sorted_vals
    return (sorted_vals, *[c[order] for c in companions])


def balance_inplace(a: np.ndarray, max_passes: int = 100) -> BalanceRecord:
    """Parlett-Reinsch balancing with power-of-two factors.

    Equalizes the 1-norms of matching rows and columns; the diagonal is
    untouched, so the trace is preserved exactly.
    """
    n = a.shape[0]
    d = np.ones(n)
    for _ in range(max_passes):
        changed = False
        for i in range(n):
            c = np.abs(a[:, i]).sum() - abs(a[i, i])
            r = np.abs(a[i, :]).sum() - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / _RADIX:
                c *= _RADIX
                r /= _RADIX
                f *= _RADIX
            while c >= r * _RADIX:
                c /= _RADIX
                r *= _RADIX
                f /= _RADIX
            # only rescale when it reduces the combined norm noticeably
            if (c + r) < 0.95 * s and f != 1.0:
                d[i] *= f
                a[i, :] /= f
                a[:, i] *= f
                changed = True
        if not changed:
            break
    return BalanceRecord(scale=d)


def dense_lu_inplace(a: np.ndarray) -> np.ndarray:
    """Right-looking LU with partial pivoting; returns the pivot rows."""
    n = a.shape[0]
    piv = np.arange(n)
    scale = np.abs(a).max() or 1.0
    tiny = np.finfo(float).tiny / np.finfo(float).eps + scale * 1e-300
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p], :] = a[[p, k], :]
            piv[[k, p]] = piv[[p, k]]
        if a[k, k] == 0.0:
            a[k, k] = tiny  # keep the factorization usable near singularity
        if k + 1 < n:
            a[k + 1 :, k] /= a[k, k]
            a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return piv


def dense_lu_solve(lu: np.ndarray, piv: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    x = b[piv].astype(np.complex128, copy=True)
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1 :] @ x[k + 1 :]) / lu[k, k]
    return x


def hess_lu(h: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """LU of an upper-Hessenberg matrix with adjacent-row pivoting, O(n^2).

    Returns (u, mult, swapped): the upper-triangular factor, the single
    multiplier per column and the pivot flags.
    """
    n = h.shape[0]
    u = np.array(h, dtype=np.complex128, copy=True)
    mult = np.zeros(n - 1 if n > 1 else 0, dtype=np.complex128)
    swapped = np.zeros(n - 1 if n > 1 else 0, dtype=bool)
    scale = np.abs(u).max() or 1.0
    tiny = scale * 1e-300 + np.finfo(float).tiny
    for k in range(n - 1):
        if abs(u[k + 1, k]) > abs(u[k, k]):
            u[[k, k + 1], k:] = u[[k + 1, k], k:]
            swapped[k] = True
        if u[k, k] == 0.0:
            u[k, k] = tiny
        m = u[k + 1, k] / u[k, k]
        mult[k] = m
        u[k + 1, k] = 0.0
        u[k + 1, k + 1 :] -= m * u[k, k + 1 :]
    if n and u[n - 1, n - 1] == 0.0:
        u[n - 1, n - 1] = tiny
    return u, mult, swapped


def hess_lu_solve(
    u: np.ndarray, mult: np.ndarray, swapped: np.ndarray, b: np.ndarray
) -> np.ndarray:
    n = u.shape[0]
    x = b.astype(np.complex128, copy=True)
    for k in range(n - 1):
        if swapped[k]:
            x[k], x[k + 1] = x[k + 1], x[k]
        x[k + 1] -= mult[k] * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - u[k, k + 1 :] @ x[k + 1 :]) / u[k, k]
    return x


def inverse_iteration(
    apply_a,
    solve_shifted,
    lam: complex,
    n: int,
    a_norm: float,
    tol_resid: float,
    max_iter: int = 50,
) -> tuple[np.ndarray, float, bool]:
    """Generic inverse-iteration loop with the deterministic all-ones start.

    ``apply_a(v)`` evaluates the original matrix-vector product (for the
    residual test); ``solve_shifted(b)`` applies the inverse of the shifted
    matrix.  Returns (vector, residual, achieved).
    """
    v = np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128)
    best_v, best_r = v, np.inf
    for _ in range(max_iter):
        w = solve_shifted(v)
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0.0:
            break
        v = w / nw
        r = float(np.linalg.norm(apply_a(v) - lam * v))
        if r < best_r:
            best_v, best_r = v, r
        if r <= tol_resid * a_norm:
            return v, r, True
    warnings.warn(
        f"inverse iteration stalled at residual {best_r:.3e} for shift {lam}; "
        "eigenvalue may belong to a defective or clustered group",
        RuntimeWarning,
        stacklevel=3,
    )
    return best_v, best_r, False
