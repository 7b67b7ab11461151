"""Pure-numpy backend: reference implementation of the hot kernels.

Same algorithms as the compiled extension (Householder Hessenberg
reduction, explicitly shifted complex QR with deflation), expressed with
vectorized numpy updates.  Selected automatically when the extension is
unavailable, or forced with ``PT_SPECTRA_BACKEND=pure``.
"""

from __future__ import annotations

import cmath

import numpy as np

BACKEND_NAME = "pure"


def _larfg(alpha: complex, x: np.ndarray) -> tuple[complex, complex]:
    """Householder generator: returns (beta, tau) and rescales x to v[1:].

    v = [1, x] and H = I - tau v v^H maps [alpha, x_in] to [beta, 0]; beta
    is real by construction.
    """
    xnorm = np.linalg.norm(x)
    if xnorm == 0.0 and alpha.imag == 0.0:
        return alpha, 0.0
    beta = -np.copysign(np.hypot(np.hypot(alpha.real, alpha.imag), xnorm), alpha.real)
    tau = (beta - alpha) / beta
    x /= alpha - beta
    return beta, tau


def hessenberg_inplace(a: np.ndarray) -> np.ndarray:
    """Reduce to upper Hessenberg form in place (LAPACK zgehd2 layout).

    On return the Hessenberg matrix occupies the upper triangle plus the
    first subdiagonal; the Householder vectors live below it.  Returns tau.
    """
    n = a.shape[0]
    tau = np.zeros(max(n - 2, 0), dtype=np.complex128)
    for k in range(n - 2):
        beta, t = _larfg(a[k + 1, k], a[k + 2 :, k])
        tau[k] = t
        if t == 0.0:
            continue
        v = np.empty(n - k - 1, dtype=np.complex128)
        v[0] = 1.0
        v[1:] = a[k + 2 :, k]
        a[k + 1, k] = beta
        # right update: A[:, k+1:] <- A[:, k+1:] (I - tau v v^H)
        w = a[:, k + 1 :] @ v
        a[:, k + 1 :] -= np.outer(t * w, v.conj())
        # left update: A[k+1:, k+1:] <- (I - conj(tau) v v^H)^H ... (I - tau v v^H)^H A
        w = v.conj() @ a[k + 1 :, k + 1 :]
        a[k + 1 :, k + 1 :] -= np.outer(np.conj(t) * v, w)
    return tau


def form_q(a: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Accumulate Q from the reflectors stored by hessenberg_inplace."""
    n = a.shape[0]
    q = np.eye(n, dtype=np.complex128)
    for k in range(len(tau) - 1, -1, -1):
        t = tau[k]
        if t == 0.0:
            continue
        v = np.empty(n - k - 1, dtype=np.complex128)
        v[0] = 1.0
        v[1:] = a[k + 2 :, k]
        w = v.conj() @ q[k + 1 :, k + 1 :]
        q[k + 1 :, k + 1 :] -= np.outer(t * v, w)
    return q


def extract_hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper-Hessenberg part of the reduced matrix (reflector storage zeroed)."""
    h = np.triu(a, -1)
    return h


def _rot(f: complex, g: complex) -> tuple[float, complex, complex]:
    """Complex Givens rotation: [c s; -conj(s) c] @ [f; g] = [r; 0], c real."""
    if g == 0.0:
        return 1.0, 0.0 + 0.0j, f
    if f == 0.0:
        ag = abs(g)
        return 0.0, g.conjugate() / ag, ag
    af = abs(f)
    d = np.hypot(af, abs(g))
    c = af / d
    fs = f / af
    return c, fs * g.conjugate() / d, fs * d


def _eig2(a: complex, b: complex, c: complex, d: complex) -> tuple[complex, complex]:
    """Eigenvalues of [[a, b], [c, d]], cancellation-safe."""
    t = 0.5 * (a + d)
    p = 0.5 * (a - d)
    q = cmath.sqrt(p * p + b * c)
    r1 = t + q if abs(t + q) >= abs(t - q) else t - q
    if r1 == 0.0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    r2 = (a * d - b * c) / r1
    return r1, r2


def _wilkinson(h: np.ndarray, hi: int) -> complex:
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    r1, r2 = _eig2(a, b, c, d)
    return r1 if abs(r1 - d) <= abs(r2 - d) else r2


def qr_eigvals_hess(
    h: np.ndarray,
    max_sweeps: int,
    deflation_eps: float,
    shift_strategy: str = "wilkinson",
    exceptional_every: int = 10,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Eigenvalues of an upper-Hessenberg matrix by explicitly shifted QR.

    Destroys ``h``.  Returns (values, converged, sweeps) in deflation order
    (callers sort).  A window that exhausts the sweep budget is reported
    with its current diagonal and ``converged=False``.
    """
    n = h.shape[0]
    w = np.zeros(n, dtype=np.complex128)
    conv = np.ones(n, dtype=bool)
    sweeps = 0
    if n == 0:
        return w, conv, sweeps
    hnorm = float(np.abs(h).sum() / max(n, 1)) or 1.0
    rayleigh = shift_strategy == "rayleigh"
    cs = np.zeros(n, dtype=np.float64)
    sn = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    stall = 0
    while hi >= 0:
        if hi == 0:
            w[0] = h[0, 0]
            break
        # find the active window [lo, hi]
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = hnorm
            if abs(h[lo, lo - 1]) <= deflation_eps * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            stall = 0
            continue
        if lo == hi - 1:
            w[lo], w[hi] = _eig2(h[lo, lo], h[lo, hi], h[hi, lo], h[hi, hi])
            hi -= 2
            stall = 0
            continue
        if sweeps >= max_sweeps:
            for i in range(lo, hi + 1):
                w[i] = h[i, i]
                conv[i] = False
            hi = lo - 1
            stall = 0
            continue
        # shift
        if stall and stall % exceptional_every == 0:
            mu = h[hi, hi] + 0.75 * (abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2]))
        elif rayleigh:
            mu = h[hi, hi]
        else:
            mu = _wilkinson(h, hi)
        # explicit single-shift QR sweep on the window
        d = np.arange(lo, hi + 1)
        h[d, d] -= mu
        for i in range(lo + 1, hi + 1):
            c, s, r = _rot(h[i - 1, i - 1], h[i, i - 1])
            cs[i], sn[i] = c, s
            h[i - 1, i - 1] = r
            h[i, i - 1] = 0.0
            r1 = h[i - 1, i : hi + 1]
            r2 = h[i, i : hi + 1]
            t1 = c * r1 + s * r2
            r2 *= c
            r2 -= np.conj(s) * r1
            h[i - 1, i : hi + 1] = t1
        for i in range(lo + 1, hi + 1):
            c, s = cs[i], sn[i]
            c1 = h[lo : i + 1, i - 1]
            c2 = h[lo : i + 1, i]
            t1 = c * c1 + np.conj(s) * c2
            c2 *= c
            c2 -= s * c1
            h[lo : i + 1, i - 1] = t1
        h[d, d] += mu
        sweeps += 1
        stall += 1
        # bottom deflation check
        s = abs(h[hi - 1, hi - 1]) + abs(h[hi, hi])
        if s == 0.0:
            s = hnorm
        if abs(h[hi, hi - 1]) <= deflation_eps * s:
            w[hi] = h[hi, hi]
            hi -= 1
            stall = 0
    return w, conv, sweeps
