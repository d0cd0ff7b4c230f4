"""H-representations of the polytopes used in examples and tests."""
import math
from fractions import Fraction

import numpy as np

from .polytope import make_hrep


def cube(d=3):
    A, b = [], []
    for i in range(d):
        for s in (1, -1):
            row = [0] * d
            row[i] = s
            A.append(row)
            b.append(1)
    return make_hrep(A, b)


def tetrahedron():
    """Regular tetrahedron with vertices (1,-1,1), (-1,1,1), (1,1,-1), (-1,-1,-1)."""
    A = [[-1, 1, -1], [1, -1, -1], [-1, -1, 1], [1, 1, 1]]
    return make_hrep(A, [1, 1, 1, 1])


def simplex(d):
    A = [[-1 if j == i else 0 for j in range(d)] for i in range(d)]
    A.append([1] * d)
    return make_hrep(A, [0] * d + [1])


def simplex_product(d1=2, d2=2):
    """Product of a standard d1-simplex and a standard d2-simplex."""
    d = d1 + d2
    A, b = [], []
    for lo, k in ((0, d1), (d1, d2)):
        for i in range(k):
            row = [0] * d
            row[lo + i] = -1
            A.append(row)
            b.append(0)
        row = [0] * d
        for i in range(k):
            row[lo + i] = 1
        A.append(row)
        b.append(1)
    return make_hrep(A, b)


def regular_polygon(m, rational=True):
    """Polygon circumscribed about the unit circle with ``m`` equally spaced tangents.

    With ``rational=True`` the normals are rounded to rationals with
    denominator 10**6, which keeps the polygon simple and nearly regular.
    """
    A = []
    for j in range(m):
        t = 2 * math.pi * j / m
        c, s = math.cos(t), math.sin(t)
        if rational:
            c, s = Fraction(round(c * 10**6), 10**6), Fraction(round(s * 10**6), 10**6)
        A.append([c, s])
    return make_hrep(A, [1] * m)


def random_polygon(m, seed=0):
    """Tangent polygon of the unit circle at sorted random angles (all gaps < pi)."""
    rng = np.random.default_rng(seed)
    while True:
        t = np.sort(rng.uniform(0, 2 * math.pi, m))
        gaps = np.diff(np.concatenate([t, [t[0] + 2 * math.pi]]))
        if gaps.max() < 0.9 * math.pi and gaps.min() > 0.05:
            break
    return make_hrep(np.column_stack([np.cos(t), np.sin(t)]).tolist(), [1] * m)


def truncated_cube(cut=Fraction(5, 2)):
    """Cube ``|x_i| <= 1`` with the corner (1,1,1) cut by ``x1+x2+x3 <= cut``."""
    h = cube(3)
    A = [list(s.normal) for s in h.halfspaces] + [[1, 1, 1]]
    b = [s.offset for s in h.halfspaces] + [cut]
    return make_hrep(A, b)


def square_pyramid():
    """Non-simple: the apex lies on four facets."""
    A = [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1], [0, 0, -1]]
    return make_hrep(A, [1, 1, 1, 1, 0])


def rotated(h, R, shift=None):
    """Image of an H-representation under ``x -> R x + shift`` (float data)."""
    A = np.array([[float(a) for a in s.normal] for s in h.halfspaces])
    b = np.array([float(s.offset) for s in h.halfspaces])
    shift = np.zeros(h.dim) if shift is None else np.asarray(shift, dtype=float)
    A2 = A @ R.T
    return make_hrep(A2.tolist(), (b + A2 @ shift).tolist())
