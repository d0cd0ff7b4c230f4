"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py --points 100000 --repeat 5
"""
import argparse
import timeit

import numpy as np

from polyrep import kernels, shapes
from polyrep.interpolant import make_params
from polyrep.polytope import enumerate_vertices, facet_forms

SHAPES = {
    "cube": lambda: shapes.cube(3),
    "octagon": lambda: shapes.regular_polygon(8),
    "triangle_product": lambda: shapes.simplex_product(2, 2),
    "truncated_cube": shapes.truncated_cube,
}


def setup(name, N, k, seed=0):
    p = enumerate_vertices(SHAPES[name]())
    f = facet_forms(p, "normalized")
    params = make_params(p, f, k)
    rng = np.random.default_rng(seed)
    X = p.vertices.mean(axis=0) + rng.uniform(-0.6, 0.6, (N, p.dim)) * p.diameter
    Q = np.ascontiguousarray(f.values(X))
    inc, deg = p.incidence_table()
    return p, Q, inc, deg, params.y, float(2 * k), np.ascontiguousarray(f.gradients)


def cases(p, Q, inc, deg, y, two_k, G):
    return {
        "esf_rows": lambda fn: fn(Q, p.m),
        "fk_rows": lambda fn: fn(Q, inc, deg, y, two_k),
        "fk_grad_rows": lambda fn: fn(Q, inc, deg, y, two_k, G),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--k", type=int, default=10)
    args = ap.parse_args()

    print(f"{'shape':<18}{'kernel':<14}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    for name in SHAPES:
        data = setup(name, args.points, args.k)
        for kname, call in cases(*data).items():
            f_np = getattr(kernels, f"{kname}_np")
            f_nb = getattr(kernels, f"{kname}_nb")
            a, b = call(f_np), call(f_nb)  # also compiles the numba version
            assert np.allclose(a, b, rtol=1e-10), f"{name}/{kname}: backends disagree"
            t_np = min(timeit.repeat(lambda: call(f_np), number=1, repeat=args.repeat)) * 1e3
            t_nb = min(timeit.repeat(lambda: call(f_nb), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:<18}{kname:<14}{t_np:>12.1f}{t_nb:>12.1f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
