"""
Fixed-order dense kernels.

BLAS products round differently depending on buffer alignment and thread
count, so two runs of the same computation need not agree bit for bit.  Every
product that feeds a stored result goes through these loops instead, which
always accumulate in index order.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _matmul_kernel(a, b, out):
    n, k = a.shape
    m = b.shape[1]
    for i in range(n):
        for l in range(k):
            x = a[i, l]
            for j in range(m):
                out[i, j] += x * b[l, j]


def matmul(a, b):
    """
    ``a @ b`` for ``a`` of shape (..., k) and a 2-D ``b``, summed in index order.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if b.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    dt = np.result_type(a, b, float)
    a2 = np.ascontiguousarray(a.reshape(-1, a.shape[-1]), dtype=dt)
    out = np.zeros((a2.shape[0], b.shape[1]), dtype=dt)
    _matmul_kernel(a2, np.ascontiguousarray(b, dtype=dt), out)
    return out.reshape(a.shape[:-1] + (b.shape[1],))


def barycentric_weights(x):
    """Barycentric weights of the nodes ``x`` (scaled to unit maximum)."""
    x = np.asarray(x, dtype=float)
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    w = 1.0 / np.prod(d, axis=1)
    return w / np.abs(w).max()


def lagrange_basis(x, s):
    """
    Values of the Lagrange basis on nodes ``x`` at points ``s``.

    Returns
    -------
    ndarray, shape (s.size, x.size)
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float).ravel()
    w = barycentric_weights(x)
    d = s[:, None] - x[None, :]
    hit = d == 0
    d[hit] = 1.0
    terms = w / d
    out = terms / terms.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    out[rows] = hit[rows]
    return out


def differentiation_matrix(x):
    """Matrix D with (D f)(x_i) = p'(x_i) for the interpolant p of f on ``x``."""
    x = np.asarray(x, dtype=float)
    w = barycentric_weights(x)
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    D = (w[None, :] / w[:, None]) / d
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D
