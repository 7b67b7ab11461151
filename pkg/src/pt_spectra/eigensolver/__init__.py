"""Dense complex non-Hermitian eigensolver (balance + Hessenberg + shifted QR).

The hot kernels (Hessenberg reduction and the QR iteration) exist twice:
a Cython extension (``_kernels``) and a pure-numpy fallback (``_pure``)
with identical interfaces.  The compiled backend is preferred at import;
set ``PT_SPECTRA_BACKEND=pure`` or ``=compiled`` to force one.  See
``benchmarks/bench_backends.py`` for a speed comparison.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from ._common import (
    BalanceRecord,
    EigenResult,
    SolverConfig,
    balance_inplace,
    dense_lu_inplace,
    dense_lu_solve,
    fro_norm,
    hess_lu,
    hess_lu_solve,
    inverse_iteration,
    sort_by_re_im,
)
from . import _pure

__all__ = [
    "SolverConfig",
    "EigenResult",
    "BalanceRecord",
    "backend_name",
    "get_backend",
    "balance",
    "hessenberg",
    "eigenvalues",
    "eigenvector",
]

_requested = os.environ.get("PT_SPECTRA_BACKEND", "").strip().lower()
if _requested not in ("", "pure", "compiled"):
    raise ImportError(f"PT_SPECTRA_BACKEND must be 'pure' or 'compiled', got {_requested!r}")

if _requested == "pure":
    _impl = _pure
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        warnings.warn(
            "pt_spectra compiled kernels unavailable; using the pure-numpy backend",
            RuntimeWarning,
        )
        _impl = _pure


def backend_name() -> str:
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return _impl.BACKEND_NAME


def get_backend(name: str | None = None):
    """Return a kernel module by name (None means the active one)."""
    if name is None:
        return _impl
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _kernels  # raises ImportError when not built

        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def _as_array(a) -> np.ndarray:
    entries = getattr(a, "entries", a)
    arr = np.array(entries, dtype=np.complex128, order="F", copy=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError("matrix entries must be finite")
    return arr


def _wrap_like(template, arr: np.ndarray):
    """Return arr wrapped as an OperatorMatrix when the input was one."""
    basis = getattr(template, "basis", None)
    if basis is None:
        return arr
    from ..operator_algebra import OperatorMatrix

    return OperatorMatrix(arr, basis)


def balance(a):
    """Diagonal power-of-two similarity scaling equalizing row/column norms.

    Returns (balanced matrix, BalanceRecord); eigenvalues are unchanged and
    the record back-transforms eigenvectors via ``restore_vector``.
    """
    arr = _as_array(a)
    record = balance_inplace(arr)
    return _wrap_like(a, arr), record


def hessenberg(a):
    """Unitary reduction A = Q H Q^H with H upper Hessenberg.

    Entries of H below the first subdiagonal are exactly zero.
    """
    arr = _as_array(a)
    tau = _impl.hessenberg_inplace(arr)
    h = _impl.extract_hessenberg(arr)
    q = _impl.form_q(arr, tau)
    return _wrap_like(a, h), _wrap_like(a, q)


def eigenvalues(a, cfg: SolverConfig | None = None, compute_vectors: bool = False) -> EigenResult:
    """All eigenvalues of a dense complex matrix, sorted by (Re, Im).

    Pipeline: balance, Householder Hessenberg reduction, explicitly
    shifted complex QR with deflation.  With ``compute_vectors=True`` each
    eigenvector is obtained by inverse iteration on the Hessenberg form
    and back-transformed, and its residual is checked against
    ``cfg.tol_resid * ||A||_F``.
    """
    cfg = cfg or SolverConfig()
    a0 = np.asarray(getattr(a, "entries", a), dtype=np.complex128)
    arr = _as_array(a)
    n = arr.shape[0]
    if n == 0:
        return EigenResult(np.zeros(0, complex), np.zeros(0, bool), 0)
    if n == 1:
        values = np.array([complex(arr[0, 0])])
        vecs = np.ones((1, 1), complex) if compute_vectors else None
        return EigenResult(values, np.ones(1, bool), 0, vecs, np.zeros(1))

    record = balance_inplace(arr)
    tau = _impl.hessenberg_inplace(arr)
    h = _impl.extract_hessenberg(arr)
    work = np.array(h, order="F", copy=True)
    w, conv, sweeps = _impl.qr_eigvals_hess(
        work, cfg.sweeps_budget(n), cfg.deflation_eps, cfg.shift_strategy
    )
    w, conv = sort_by_re_im(w, conv)

    if not compute_vectors:
        return EigenResult(w, conv, sweeps)

    a_norm = fro_norm(a0)
    h_norm = fro_norm(h)
    vectors = np.zeros((n, n), dtype=np.complex128)
    residuals = np.zeros(n)
    for i, lam in enumerate(w):
        shift = lam + 1e-12 * h_norm
        u, mult, swapped = hess_lu(h - shift * np.eye(n))
        y, _, _ = inverse_iteration(
            lambda v: h @ v,
            lambda b: hess_lu_solve(u, mult, swapped, b),
            lam,
            n,
            h_norm,
            cfg.tol_resid,
        )
        v = _apply_q(arr, tau, y)
        v = record.restore_vector(v)
        v /= np.linalg.norm(v)
        r = float(np.linalg.norm(a0 @ v - lam * v))
        vectors[:, i] = v
        residuals[i] = r
        if r > cfg.tol_resid * a_norm:
            conv[i] = False
    return EigenResult(w, conv, sweeps, vectors, residuals)


def _apply_q(reduced: np.ndarray, tau: np.ndarray, y: np.ndarray) -> np.ndarray:
    """v = Q y using the reflectors stored in the reduced matrix, O(n^2)."""
    v = y.astype(np.complex128, copy=True)
    n = v.shape[0]
    for k in range(len(tau) - 1, -1, -1):
        t = tau[k]
        if t == 0.0:
            continue
        h_v = np.empty(n - k - 1, dtype=np.complex128)
        h_v[0] = 1.0
        h_v[1:] = reduced[k + 2 :, k]
        v[k + 1 :] -= (t * (h_v.conj() @ v[k + 1 :])) * h_v
    return v


def eigenvector(a, lam: complex, cfg: SolverConfig | None = None) -> np.ndarray:
    """Unit-norm eigenvector for a known eigenvalue, by inverse iteration.

    Solves with (A - shift I) where the shift is ``lam`` perturbed by
    ``1e-12 * ||A||_F`` to dodge exact singularity; the start vector is the
    normalized all-ones vector, so results are deterministic.  Emits a
    RuntimeWarning and returns the best-effort vector when the residual
    bound is not met within 50 iterations (defective/clustered case).
    """
    cfg = cfg or SolverConfig()
    a0 = np.asarray(getattr(a, "entries", a), dtype=np.complex128)
    n = a0.shape[0]
    a_norm = fro_norm(a0)
    shifted = a0 - (complex(lam) + 1e-12 * a_norm) * np.eye(n)
    piv = dense_lu_inplace(shifted)
    v, _, _ = inverse_iteration(
        lambda x: a0 @ x,
        lambda b: dense_lu_solve(shifted, piv, b),
        complex(lam),
        n,
        a_norm,
        cfg.tol_resid,
    )
    return v
