"""Small fixed-rule quadrature helpers shared by the Stirling and inversion code."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gauss_legendre(n: int):
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(edges, n: int):
    """Map an n-point rule onto consecutive panels given by ``edges``.

    Returns (nodes, weights) of shape (len(edges) - 1, n).
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    return mid[:, None] + half[:, None] * x, half[:, None] * w


def cumulative_line_integral(fun, targets, h_max: float, n: int = 8):
    """∫_0^t fun(w) dw for every t in ``targets`` (any sign).

    The segment between 0 and each target is cut at the targets themselves and
    at a uniform grid of spacing ``h_max``; each piece gets an n-point
    Gauss-Legendre rule and the pieces are accumulated in order.
    ``fun`` must accept a 2-D array of real abscissae.
    """
    t = np.asarray(targets, dtype=float)
    lo, hi = min(0.0, float(t.min())), max(0.0, float(t.max()))
    grid = np.arange(np.floor(lo / h_max) * h_max, hi + h_max, h_max)
    grid = grid[(grid > lo) & (grid < hi)]
    pts = np.unique(np.concatenate([[0.0, lo, hi], t.ravel(), grid]))
    if pts.size == 1:
        return np.zeros(t.shape, dtype=complex)
    nodes, weights = panel_nodes(pts, n)
    pieces = np.sum(weights * fun(nodes), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    i0 = np.searchsorted(pts, 0.0)
    idx = np.searchsorted(pts, t)
    return (cum[idx] - cum[i0]).reshape(t.shape)


def sawtooth(u):
    """P(u) = {u}(1 - {u})."""
    frac = u - np.floor(u)
    return frac * (1.0 - frac)
