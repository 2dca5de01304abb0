# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled message-passing core.

Same damped Gaussian-approximation schedule as ``_mp_numpy`` with the
per-edge loops in C; selected automatically at import when built.
"""

import numpy as np

from libc.math cimport exp

cdef double VAR_FLOOR = 1e-30


def mp_posteriors(h, y, double n0, points, mask, int max_iters, double damping):
    """Drop-in twin of ``_mp_numpy.mp_posteriors`` (see its docstring)."""
    cdef const double complex[:, ::1] hv = np.ascontiguousarray(h, dtype=np.complex128)
    cdef const double complex[::1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef const double complex[::1] pts = np.ascontiguousarray(points, dtype=np.complex128)
    cdef const unsigned char[:, ::1] edge = np.ascontiguousarray(mask, dtype=np.uint8)

    cdef Py_ssize_t m_dim = hv.shape[0]
    cdef Py_ssize_t n_dim = hv.shape[1]
    cdef Py_ssize_t q_dim = pts.shape[0]

    post_arr = np.zeros((n_dim, q_dim))
    cdef double[:, ::1] post = post_arr

    cdef double[:, :, ::1] pe = np.zeros((m_dim, n_dim, q_dim))
    cdef double[:, :, ::1] loglik = np.zeros((m_dim, n_dim, q_dim))
    cdef double complex[:, ::1] xbar = np.zeros((m_dim, n_dim), dtype=np.complex128)
    cdef double[:, ::1] var = np.zeros((m_dim, n_dim))
    cdef double complex[::1] mu = np.zeros(m_dim, dtype=np.complex128)
    cdef double[::1] s2 = np.zeros(m_dim)
    cdef double[:, ::1] total = np.zeros((n_dim, q_dim))
    cdef long[::1] dec = np.full(n_dim, -1, dtype=np.int64)
    cdef long[::1] dec_new = np.zeros(n_dim, dtype=np.int64)

    cdef double[::1] pts_abs2 = np.zeros(q_dim)
    cdef double[:, ::1] habs2 = np.zeros((m_dim, n_dim))

    cdef Py_ssize_t m, n, q, it, best
    cdef double complex xb, mu_ext, resid, hmn
    cdef double second, v, s2_ext, p, mx, z, best_val, d
    cdef double uniform = 1.0 / q_dim
    cdef bint converged = 0, stable
    cdef int iters_run = 0

    for q in range(q_dim):
        pts_abs2[q] = pts[q].real * pts[q].real + pts[q].imag * pts[q].imag
    for m in range(m_dim):
        for n in range(n_dim):
            habs2[m, n] = hv[m, n].real * hv[m, n].real + hv[m, n].imag * hv[m, n].imag
            if edge[m, n]:
                for q in range(q_dim):
                    pe[m, n, q] = uniform

    for it in range(max_iters):
        iters_run += 1

        # per-edge symbol moments, then observation totals
        for m in range(m_dim):
            mu[m] = 0
            s2[m] = n0
            for n in range(n_dim):
                if not edge[m, n]:
                    continue
                xb = 0
                second = 0
                for q in range(q_dim):
                    p = pe[m, n, q]
                    xb = xb + p * pts[q]
                    second += p * pts_abs2[q]
                v = second - (xb.real * xb.real + xb.imag * xb.imag)
                xbar[m, n] = xb
                var[m, n] = v
                mu[m] = mu[m] + hv[m, n] * xb
                s2[m] += habs2[m, n] * v

        # leave-one-out Gaussian log-likelihood per edge and point
        for m in range(m_dim):
            for n in range(n_dim):
                if not edge[m, n]:
                    continue
                hmn = hv[m, n]
                mu_ext = mu[m] - hmn * xbar[m, n]
                s2_ext = s2[m] - habs2[m, n] * var[m, n]
                if s2_ext < VAR_FLOOR:
                    s2_ext = VAR_FLOOR
                for q in range(q_dim):
                    resid = yv[m] - mu_ext - hmn * pts[q]
                    loglik[m, n, q] = -(resid.real * resid.real
                                        + resid.imag * resid.imag) / s2_ext

        # symbol totals
        for n in range(n_dim):
            for q in range(q_dim):
                total[n, q] = 0
        for m in range(m_dim):
            for n in range(n_dim):
                if edge[m, n]:
                    for q in range(q_dim):
                        total[n, q] += loglik[m, n, q]

        # extrinsic softmax, damped probability update
        for m in range(m_dim):
            for n in range(n_dim):
                if not edge[m, n]:
                    continue
                mx = total[n, 0] - loglik[m, n, 0]
                for q in range(1, q_dim):
                    d = total[n, q] - loglik[m, n, q]
                    if d > mx:
                        mx = d
                z = 0
                for q in range(q_dim):
                    d = exp(total[n, q] - loglik[m, n, q] - mx)
                    loglik[m, n, q] = d  # this edge's entries are dead; reuse
                    z += d
                for q in range(q_dim):
                    pe[m, n, q] = damping * (loglik[m, n, q] / z) \
                        + (1.0 - damping) * pe[m, n, q]

        # hard decisions from the totals; stop when stable
        stable = 1
        for n in range(n_dim):
            best = 0
            best_val = total[n, 0]
            for q in range(1, q_dim):
                if total[n, q] > best_val:
                    best_val = total[n, q]
                    best = q
            dec_new[n] = best
            if best != dec[n]:
                stable = 0
        for n in range(n_dim):
            dec[n] = dec_new[n]
        if stable:
            converged = 1
            break

    # posteriors from the final symbol totals
    for n in range(n_dim):
        mx = total[n, 0]
        for q in range(1, q_dim):
            if total[n, q] > mx:
                mx = total[n, q]
        z = 0
        for q in range(q_dim):
            d = exp(total[n, q] - mx)
            post[n, q] = d
            z += d
        for q in range(q_dim):
            post[n, q] /= z

    return post_arr, iters_run, bool(converged)
