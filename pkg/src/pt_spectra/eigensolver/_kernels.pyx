# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend: Hessenberg reduction and shifted-QR kernels.

Mirrors ``_pure`` exactly (same math, same deflation rules) so the two
backends are interchangeable; this one releases the GIL so independent
solves can run in parallel threads.
"""

import numpy as np

cimport cython
from libc.math cimport fabs, sqrt, hypot
from scipy.linalg.cython_blas cimport zgemv, zgerc

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)
    double complex csqrt(double complex)

BACKEND_NAME = "compiled"


# ---------------------------------------------------------------------------
# Hessenberg reduction (Householder, BLAS-2 updates)
# ---------------------------------------------------------------------------

cdef void _hess_core(double complex* a, double complex* tau,
                     double complex* work, int n) noexcept nogil:
    cdef int k, i, m, lda, inc
    cdef double xnorm, beta
    cdef double complex alpha, t, scale, one, zero, neg
    cdef double complex* v
    lda = n
    inc = 1
    one = 1.0
    zero = 0.0
    for k in range(n - 2):
        m = n - k - 1
        alpha = a[(k + 1) + k * n]
        xnorm = 0.0
        for i in range(k + 2, n):
            xnorm = hypot(xnorm, cabs(a[i + k * n]))
        if xnorm == 0.0 and cimag(alpha) == 0.0:
            tau[k] = 0.0
            continue
        beta = hypot(hypot(creal(alpha), cimag(alpha)), xnorm)
        if creal(alpha) > 0.0:
            beta = -beta
        t = (beta - alpha) / beta
        tau[k] = t
        scale = one / (alpha - beta)
        for i in range(k + 2, n):
            a[i + k * n] = a[i + k * n] * scale
        # v lives in column k with an implicit leading 1
        a[(k + 1) + k * n] = 1.0
        v = a + (k + 1) + k * n
        # right update: A[0:n, k+1:n] -= t (A v) v^H
        zgemv("N", &n, &m, &one, a + (k + 1) * n, &lda, v, &inc, &zero, work, &inc)
        neg = -t
        zgerc(&n, &m, &neg, work, &inc, v, &inc, a + (k + 1) * n, &lda)
        # left update: A[k+1:n, k+1:n] -= conj(t) v (v^H A)
        zgemv("C", &m, &m, &one, a + (k + 1) + (k + 1) * n, &lda, v, &inc, &zero, work, &inc)
        neg = -conj(t)
        zgerc(&m, &m, &neg, v, &inc, work, &inc, a + (k + 1) + (k + 1) * n, &lda)
        a[(k + 1) + k * n] = beta


def hessenberg_inplace(double complex[::1, :] a):
    """Reduce to Hessenberg form in place; reflectors stay below the
    subdiagonal and tau is returned (LAPACK zgehd2 storage)."""
    cdef int n = a.shape[0]
    tau_arr = np.zeros(max(n - 2, 0), dtype=np.complex128)
    work_arr = np.zeros(max(n, 1), dtype=np.complex128)
    cdef double complex[::1] tau = tau_arr
    cdef double complex[::1] work = work_arr
    if n > 2:
        with nogil:
            _hess_core(&a[0, 0], &tau[0], &work[0], n)
    return tau_arr


def extract_hessenberg(double complex[::1, :] a):
    """Upper-Hessenberg part of the reduced matrix, F-ordered copy."""
    return np.asfortranarray(np.triu(np.asarray(a), -1))


def form_q(double complex[::1, :] a, double complex[::1] tau):
    """Accumulate the unitary Q of the stored reflectors (zunghr-style)."""
    cdef int n = a.shape[0]
    q_arr = np.eye(n, dtype=np.complex128, order="F")
    work_arr = np.zeros(max(n, 1), dtype=np.complex128)
    cdef double complex[::1, :] q = q_arr
    cdef double complex[::1] work = work_arr
    cdef int k, m, lda, inc, nk
    cdef double complex t, saved, neg, one, zero
    cdef double complex* v
    lda = n
    inc = 1
    one = 1.0
    zero = 0.0
    nk = tau.shape[0]
    if n > 2:
        with nogil:
            for k in range(nk - 1, -1, -1):
                t = tau[k]
                if t == 0.0:
                    continue
                m = n - k - 1
                saved = a[k + 1, k]
                a[k + 1, k] = 1.0
                v = &a[k + 1, k]
                zgemv("C", &m, &m, &one, &q[k + 1, k + 1], &lda, v, &inc, &zero, &work[0], &inc)
                neg = -t
                zgerc(&m, &m, &neg, v, &inc, &work[0], &inc, &q[k + 1, k + 1], &lda)
                a[k + 1, k] = saved
    return q_arr


# ---------------------------------------------------------------------------
# Shifted QR iteration on a Hessenberg matrix (values only)
# ---------------------------------------------------------------------------

cdef inline void _rot(double complex f, double complex g,
                      double* c, double complex* s, double complex* r) noexcept nogil:
    cdef double af, d
    cdef double complex fs
    if g == 0.0:
        c[0] = 1.0
        s[0] = 0.0
        r[0] = f
        return
    if f == 0.0:
        af = cabs(g)
        c[0] = 0.0
        s[0] = conj(g) / af
        r[0] = af
        return
    af = cabs(f)
    d = hypot(af, cabs(g))
    c[0] = af / d
    fs = f / af
    s[0] = fs * conj(g) / d
    r[0] = fs * d


cdef inline void _eig2(double complex a, double complex b,
                       double complex c, double complex d,
                       double complex* r1, double complex* r2) noexcept nogil:
    cdef double complex t = 0.5 * (a + d)
    cdef double complex p = 0.5 * (a - d)
    cdef double complex q = csqrt(p * p + b * c)
    if cabs(t + q) >= cabs(t - q):
        r1[0] = t + q
    else:
        r1[0] = t - q
    if r1[0] == 0.0:
        r2[0] = 0.0
        return
    r2[0] = (a * d - b * c) / r1[0]


DEF STRIPE = 32


cdef inline void _apply_left_rot(double* p, double c, double sr, double si) noexcept nogil:
    # rows (r, r+1) of one column: [c s; -conj(s) c] @ [p0; p1], AoS layout
    cdef double ar = p[0], ai = p[1], br = p[2], bi = p[3]
    p[0] = c * ar + sr * br - si * bi
    p[1] = c * ai + sr * bi + si * br
    p[2] = c * br - (sr * ar + si * ai)
    p[3] = c * bi - (sr * ai - si * ar)


cdef long _qr_core(double complex* h, double complex* w, unsigned char* conv,
                   double* cs, double complex* sn, int n,
                   long max_sweeps, double eps, int rayleigh,
                   int exc_every, double hnorm) noexcept nogil:
    cdef long sweeps = 0
    cdef int hi, lo, i, j, r, stall, j0, jend, jj
    cdef double c, sr, si, ar, ai, br, bi
    cdef double complex s, rr, mu, e1, e2
    cdef double *p1
    cdef double *p2
    cdef double snorm
    hi = n - 1
    stall = 0
    while hi >= 0:
        if hi == 0:
            w[0] = h[0]
            break
        lo = hi
        while lo > 0:
            snorm = cabs(h[(lo - 1) + (lo - 1) * n]) + cabs(h[lo + lo * n])
            if snorm == 0.0:
                snorm = hnorm
            if cabs(h[lo + (lo - 1) * n]) <= eps * snorm:
                h[lo + (lo - 1) * n] = 0.0
                break
            lo -= 1
        if lo == hi:
            w[hi] = h[hi + hi * n]
            hi -= 1
            stall = 0
            continue
        if lo == hi - 1:
            _eig2(h[lo + lo * n], h[lo + hi * n], h[hi + lo * n], h[hi + hi * n],
                  &e1, &e2)
            w[lo] = e1
            w[hi] = e2
            hi -= 2
            stall = 0
            continue
        if sweeps >= max_sweeps:
            for i in range(lo, hi + 1):
                w[i] = h[i + i * n]
                conv[i] = 0
            hi = lo - 1
            stall = 0
            continue
        if stall > 0 and stall % exc_every == 0:
            mu = h[hi + hi * n] + 0.75 * (cabs(h[hi + (hi - 1) * n])
                                          + cabs(h[(hi - 1) + (hi - 2) * n]))
        elif rayleigh:
            mu = h[hi + hi * n]
        else:
            _eig2(h[(hi - 1) + (hi - 1) * n], h[(hi - 1) + hi * n],
                  h[hi + (hi - 1) * n], h[hi + hi * n], &e1, &e2)
            if cabs(e1 - h[hi + hi * n]) <= cabs(e2 - h[hi + hi * n]):
                mu = e1
            else:
                mu = e2
        for i in range(lo, hi + 1):
            h[i + i * n] = h[i + i * n] - mu
        # QR phase: zero the subdiagonal with row rotations.  Columns are
        # processed in stripes of STRIPE so the inner loops run independent
        # updates (instruction-level parallel) over streaming memory.
        _rot(h[lo + lo * n], h[(lo + 1) + lo * n], &cs[lo + 1], &sn[lo + 1], &rr)
        h[lo + lo * n] = rr
        h[(lo + 1) + lo * n] = 0.0
        j0 = lo + 1
        while j0 <= hi:
            jend = j0 + (STRIPE - 1)
            if jend > hi:
                jend = hi
            # bulk: rotations lo+1..j0-1+1 are known; apply each across the stripe
            for i in range(lo + 1, j0 + 1):
                c = cs[i]
                sr = creal(sn[i])
                si = cimag(sn[i])
                p1 = <double*> (h + (i - 1) + j0 * n)
                for jj in range(j0, jend + 1):
                    _apply_left_rot(p1, c, sr, si)
                    p1 += 2 * n
            # boundary: generate and apply the stripe's own rotations
            for i in range(j0 + 1, (jend if jend < hi else hi - 1) + 2):
                _rot(h[(i - 1) + (i - 1) * n], h[i + (i - 1) * n],
                     &cs[i], &sn[i], &rr)
                h[(i - 1) + (i - 1) * n] = rr
                h[i + (i - 1) * n] = 0.0
                c = cs[i]
                sr = creal(sn[i])
                si = cimag(sn[i])
                p1 = <double*> (h + (i - 1) + i * n)
                for jj in range(i, jend + 1):
                    _apply_left_rot(p1, c, sr, si)
                    p1 += 2 * n
            j0 = jend + 1
        # RQ phase: multiply the rotations back on the right (columns stream)
        for i in range(lo + 1, hi + 1):
            c = cs[i]
            sr = creal(sn[i])
            si = cimag(sn[i])
            p1 = <double*> (h + lo + (i - 1) * n)
            p2 = <double*> (h + lo + i * n)
            for r in range(lo, i + 1):
                ar = p1[0]
                ai = p1[1]
                br = p2[0]
                bi = p2[1]
                p1[0] = c * ar + sr * br + si * bi
                p1[1] = c * ai + sr * bi - si * br
                p2[0] = c * br - (sr * ar - si * ai)
                p2[1] = c * bi - (sr * ai + si * ar)
                p1 += 2
                p2 += 2
        for i in range(lo, hi + 1):
            h[i + i * n] = h[i + i * n] + mu
        sweeps += 1
        stall += 1
        # deflate converged 1x1 and 2x2 trailing blocks eagerly
        while hi > lo:
            snorm = cabs(h[(hi - 1) + (hi - 1) * n]) + cabs(h[hi + hi * n])
            if snorm == 0.0:
                snorm = hnorm
            if cabs(h[hi + (hi - 1) * n]) <= eps * snorm:
                w[hi] = h[hi + hi * n]
                hi -= 1
                stall = 0
                continue
            if hi - 1 > lo:
                snorm = cabs(h[(hi - 2) + (hi - 2) * n]) + cabs(h[(hi - 1) + (hi - 1) * n])
                if snorm == 0.0:
                    snorm = hnorm
                if cabs(h[(hi - 1) + (hi - 2) * n]) <= eps * snorm:
                    _eig2(h[(hi - 1) + (hi - 1) * n], h[(hi - 1) + hi * n],
                          h[hi + (hi - 1) * n], h[hi + hi * n], &e1, &e2)
                    w[hi - 1] = e1
                    w[hi] = e2
                    hi -= 2
                    stall = 0
                    continue
            break
    return sweeps


def qr_eigvals_hess(double complex[::1, :] h, long max_sweeps, double deflation_eps,
                    str shift_strategy="wilkinson", int exceptional_every=10):
    """Eigenvalues of an upper-Hessenberg matrix; destroys ``h``.

    Returns (values, converged, sweeps) in deflation order.
    """
    cdef int n = h.shape[0]
    w_arr = np.zeros(n, dtype=np.complex128)
    conv_arr = np.ones(n, dtype=np.uint8)
    cs_arr = np.zeros(max(n, 1), dtype=np.float64)
    sn_arr = np.zeros(max(n, 1), dtype=np.complex128)
    cdef double complex[::1] w = w_arr
    cdef unsigned char[::1] conv = conv_arr
    cdef double[::1] cs = cs_arr
    cdef double complex[::1] sn = sn_arr
    cdef int rayleigh = 1 if shift_strategy == "rayleigh" else 0
    cdef long sweeps = 0
    cdef double hnorm
    if n == 0:
        return w_arr, conv_arr.astype(bool), 0
    hnorm = float(np.abs(np.asarray(h)).sum() / max(n, 1)) or 1.0
    with nogil:
        sweeps = _qr_core(&h[0, 0], &w[0], &conv[0], &cs[0], &sn[0], n,
                          max_sweeps, deflation_eps, rayleigh,
                          exceptional_every, hnorm)
    return w_arr, conv_arr.astype(bool), int(sweeps)
