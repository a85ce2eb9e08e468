"""Shared helpers: random data builders and independent oracles.

The oracles here recompute module outputs by routes the library never
takes (explicit pairwise sums, determinant root-finding), so agreement
is evidence rather than tautology.
"""

import numpy as np

from focus.scatter import SetCollection


def random_collection(rng, max_sets=12, max_n=200, max_d=32, dim=None):
    """Random SetCollection with a shared width and varied scales."""
    m = int(rng.integers(1, max_sets + 1))
    d = dim if dim is not None else int(rng.integers(1, max_d + 1))
    sets = []
    for _ in range(m):
        n = int(rng.integers(1, max_n + 1))
        loc = rng.normal(size=d) * rng.uniform(0, 5)
        spread = rng.uniform(0.1, 3.0)
        sets.append(loc + spread * rng.normal(size=(n, d)))
    return SetCollection.from_arrays(sets)


def pairwise_scatter_fast(points):
    """Vectorized mean of 0.5*(x-y)(x-y)^T over all ordered pairs."""
    x = np.asarray(points, dtype=float)
    n = x.shape[0]
    diffs = x[:, np.newaxis, :] - x[np.newaxis, :, :]
    flat = diffs.reshape(n * n, -1)
    return flat.T @ flat / (2.0 * n * n)


def pencil_roots(c_within, b, window=(-0.5, 1.5)):
    """Roots of det(c_within - t*b) by Chebyshev interpolation.

    The determinant is a degree-d polynomial in t; fitting it at d+1
    Chebyshev nodes recovers it exactly, and its real roots are the
    generalized eigenvalues.  Only usable at small d.
    """
    d = c_within.shape[0]
    lo, hi = window
    base = np.cos(np.pi * (2 * np.arange(d + 1) + 1) / (2 * (d + 1)))
    nodes = lo + (hi - lo) * (base + 1.0) / 2.0
    vals = np.array([np.linalg.det(c_within - t * b) for t in nodes])
    scale = np.max(np.abs(vals))
    if scale == 0.0:
        return np.zeros(d)
    series = np.polynomial.Chebyshev.fit(nodes, vals / scale, deg=d, domain=list(window))
    roots = series.roots()
    real = roots[np.abs(roots.imag) < 1e-8].real
    keep = real[(real > lo + 1e-9) & (real < hi - 1e-9)]
    return np.sort(keep)


def random_psd_pair(rng, d, null_within=0, null_between=0):
    """Symmetric PSD pair (c_w, c_all) with c_all - c_w PSD.

    ``null_within``/``null_between`` force that many zero eigenvalues
    into c_w and into the gap matrix respectively.
    """
    q1 = np.linalg.qr(rng.normal(size=(d, d)))[0]
    q2 = np.linalg.qr(rng.normal(size=(d, d)))[0]
    w_eigs = rng.uniform(0.1, 2.0, size=d)
    if null_within:
        w_eigs[:null_within] = 0.0
    gap_eigs = rng.uniform(0.1, 2.0, size=d)
    if null_between:
        gap_eigs[:null_between] = 0.0
    c_w = q1 @ np.diag(w_eigs) @ q1.T
    c_all = c_w + q2 @ np.diag(gap_eigs) @ q2.T
    return (c_w + c_w.T) / 2.0, (c_all + c_all.T) / 2.0
