"""Zero-set point clouds of ``min_{j in J} p_j`` for plotting."""
import numpy as np

from . import errors


def _refine(g, P0, P1, g0, iters=60):
    """Bisect each segment ``[P0, P1]`` on which ``g`` changes sign."""
    a, b = P0.copy(), P1.copy()
    sa = np.sign(g0)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        sm = np.sign(g(mid))
        left = sm == sa
        a[left] = mid[left]
        b[~left] = mid[~left]
    return 0.5 * (a + b)


def zero_set(rep, J, grid=64, inflate=0.5):
    """Points on the zero set of ``min_{j in J} p_j`` near the polytope.

    Grid edges with a sign change are refined by bisection, which gives the
    vertex set of marching squares (2D) or marching cubes (3D).
    Returns ``(points, cell_size)``.
    """
    p = rep.polytope
    d = p.dim
    if d not in (2, 3):
        raise errors.DimensionError(f"surface sampling supports d in (2, 3), got {d}")
    J = sorted(set(J))
    if not J or min(J) < 0 or max(J) >= d:
        raise ValueError(f"face set J must be a nonempty subset of 0..{d - 1}")

    def g(X):
        return rep.evaluate(X)[:, J].min(axis=1)

    lo = p.vertices.min(axis=0) - inflate * p.diameter
    hi = p.vertices.max(axis=0) + inflate * p.diameter
    axes = [np.linspace(lo[i], hi[i], grid + 1) for i in range(d)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = g(mesh.reshape(-1, d)).reshape(mesh.shape[:-1])
    cell = float(np.max((hi - lo) / grid))
    points = []
    for ax in range(d):
        s0 = [slice(None)] * d
        s1 = [slice(None)] * d
        s0[ax] = slice(0, -1)
        s1[ax] = slice(1, None)
        v0, v1 = vals[tuple(s0)], vals[tuple(s1)]
        cross = (v0 < 0) != (v1 < 0)
        if not cross.any():
            continue
        P0 = mesh[tuple(s0)][cross]
        P1 = mesh[tuple(s1)][cross]
        points.append(_refine(g, P0, P1, v0[cross]))
    pts = np.vstack(points) if points else np.zeros((0, d))
    return pts, cell


def write_csv(points, fh):
    for x, y in points:
        fh.write(f"{x:.12g},{y:.12g}\n")


def write_obj(points, fh):
    for x, y, z in points:
        fh.write(f"v {x:.12g} {y:.12g} {z:.12g}\n")
