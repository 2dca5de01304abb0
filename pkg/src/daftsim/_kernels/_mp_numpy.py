"""Vectorized numpy implementation of the message-passing core.

Reference implementation for the compiled twin in ``_core.pyx``; both run
the same damped Gaussian-approximation schedule on the bipartite graph of
observation rows and symbol columns.
"""

import numpy as np

# variance floor: keeps the noiseless limit finite without changing any
# n0 > 0 result
_VAR_FLOOR = 1e-30


def mp_posteriors(h, y, n0, points, mask, max_iters, damping):
    """Run damped Gaussian message passing; return symbol posteriors.

    Parameters
    ----------
    h : (M, N) complex ndarray
        Channel matrix.
    y : (M,) complex ndarray
        Observations.
    n0 : float
        Noise variance (>= 0).
    points : (Q,) complex ndarray
        Constellation points.
    mask : (M, N) bool/uint8 ndarray
        Edge mask; entries outside the mask never exchange messages.
    max_iters : int
        Iteration cap.
    damping : float
        Probability-update damping in (0, 1].

    Returns
    -------
    post : (N, Q) float ndarray
        Per-symbol posterior probabilities.
    iters : int
        Iterations actually run.
    converged : bool
        True when hard decisions were stable across an iteration before
        the cap.
    """
    h = np.ascontiguousarray(h, dtype=np.complex128)
    y = np.ascontiguousarray(y, dtype=np.complex128)
    points = np.ascontiguousarray(points, dtype=np.complex128)
    m_dim, n_dim = h.shape
    q_dim = points.size

    edge = np.ascontiguousarray(mask, dtype=bool)
    habs2 = (h.real * h.real + h.imag * h.imag) * edge
    h_masked = h * edge
    pts_abs2 = points.real * points.real + points.imag * points.imag

    # edge messages symbol->observation, stored [m, n, q]
    pe = np.zeros((m_dim, n_dim, q_dim))
    pe[edge] = 1.0 / q_dim

    dec = np.full(n_dim, -1, dtype=np.int64)
    iters_run = 0
    converged = False

    for _ in range(max_iters):
        iters_run += 1

        # per-edge symbol moments under the incoming message
        xbar = pe @ points  # [m, n]
        second = pe @ pts_abs2
        var = second - (xbar.real * xbar.real + xbar.imag * xbar.imag)

        # observation totals, then leave-one-out per edge
        mu = np.sum(h_masked * xbar, axis=1)  # [m]
        s2 = np.sum(habs2 * var, axis=1) + n0
        mu_ext = mu[:, None] - h_masked * xbar
        s2_ext = np.maximum(s2[:, None] - habs2 * var, _VAR_FLOOR)

        # per-edge log-likelihood of each constellation point
        resid = (y[:, None, None] - mu_ext[:, :, None]
                 - h_masked[:, :, None] * points[None, None, :])
        loglik = -(resid.real * resid.real + resid.imag * resid.imag)
        loglik /= s2_ext[:, :, None]
        loglik *= edge[:, :, None]

        # symbol totals and extrinsic (leave-one-out) messages
        total = np.sum(loglik, axis=0)  # [n, q]
        ext = (total[None, :, :] - loglik) * edge[:, :, None]
        ext -= ext.max(axis=2, keepdims=True)
        pe_new = np.exp(ext)
        pe_new /= np.sum(pe_new, axis=2, keepdims=True)
        pe_new *= edge[:, :, None]

        pe = damping * pe_new + (1.0 - damping) * pe

        dec_new = np.argmax(total, axis=1)
        if np.array_equal(dec_new, dec):
            converged = True
            dec = dec_new
            break
        dec = dec_new

    # posteriors from the final symbol totals
    shifted = total - total.max(axis=1, keepdims=True)
    post = np.exp(shifted)
    post /= np.sum(post, axis=1, keepdims=True)
    return post, iters_run, converged
