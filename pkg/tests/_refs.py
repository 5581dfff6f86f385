"""Independent reference computations shared by the tests.

Nothing here calls into the package's interval or root code.
"""

import math

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * math.pi


def bisect_roots(p, q, c, n=4096):
    """Roots of ``p cos t + q sin t = c`` on ``[0, 2 pi]`` by sign scan plus brentq."""
    g = lambda t: p * math.cos(t) + q * math.sin(t) - c
    grid = np.linspace(0.0, TWO_PI, n + 1)
    vals = p * np.cos(grid) + q * np.sin(grid) - c
    roots = []
    for i in range(n):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))
    return roots


def grid_classify(P, Q, C, n=4096, chunk=1024):
    """Branch by dense sign scan: 2 where the ellipse crosses, 0 otherwise.

    Also returns a mask of cases the grid cannot resolve: ``c`` within the
    grid's discretization error of ``r`` (grazing from outside) or of ``-r``
    (the two roots closer together than the grid spacing).
    """
    t = np.linspace(0.0, TWO_PI, n, endpoint=False)
    cos_t, sin_t = np.cos(t)[None, :], np.sin(t)[None, :]
    gmax = np.empty(P.shape)
    for s in range(0, P.size, chunk):
        sl = slice(s, s + chunk)
        vals = P[sl, None] * cos_t + Q[sl, None] * sin_t - C[sl, None]
        gmax[sl] = vals.max(axis=1)
    R = np.sqrt(P * P + Q * Q)
    h = TWO_PI / n
    slack = R * h * h / 8.0 + 1e-12
    ambiguous = (np.abs(R - C) <= slack) | (np.abs(R + C) <= slack)
    return np.where(gmax > 0, 2, 0), ambiguous


def sequential_intersection(alphas, betas):
    """Point-set intersection of ``[0, a] U [b, 2 pi]`` by sampling a fine grid.

    Used only as a sanity reference for small cases.
    """
    t = np.linspace(0.0, TWO_PI, 200001)
    keep = np.ones_like(t, dtype=bool)
    for a, b in zip(alphas, betas):
        keep &= (t <= a) | (t >= b)
    return t, keep
