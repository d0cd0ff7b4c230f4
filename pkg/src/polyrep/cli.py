"""Command-line interface: ``polyrep {build,verify,params,surface}``.

Exit codes: 0 ok, 1 verification failure, 2 polytope not simple, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import errors
from .interpolant import (
    InterpolantParams,
    epsilon_params,
    find_k,
    k_bounds,
    make_params,
)
from .polytope import check_simple, enumerate_vertices, facet_forms, metric_params, parse_hrep
from .representation import build_representation, verify_all, verify_membership
from .surface import write_csv, write_obj, zero_set

EXIT_OK, EXIT_VERIFY, EXIT_NOT_SIMPLE, EXIT_INPUT = 0, 1, 2, 3


def _load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise errors.InputError(f"cannot read {path}: {exc}") from exc
    p = enumerate_vertices(parse_hrep(text))
    if not check_simple(p):
        raise errors.NotSimple("polytope is not simple")
    return p


class Context:
    """Everything derived from one input file and one set of flags."""

    def __init__(self, args):
        self.args = args
        self.p = _load(args.input)
        self.nforms = facet_forms(self.p, "normalized")
        self.forms = facet_forms(self.p, args.mode)
        self.mp = metric_params(self.p, self.nforms)
        self.eps = epsilon_params(self.mp, self.p.m, self.p.dim)
        eps = args.eps if args.eps is not None else self.eps.eps3
        self.bounds = k_bounds(self.mp, self.p.n, eps)

    def verifier(self, params):
        rep = build_representation(self.p, self.forms, params, expand=False)
        return verify_membership(rep, self.p, N=self.args.samples, seed=self.args.seed)

    def params(self):
        a = self.args
        if getattr(a, "params", None):
            try:
                return InterpolantParams.from_doc(json.loads(Path(a.params).read_text()))
            except (OSError, ValueError, KeyError) as exc:
                raise errors.InputError(f"cannot use params file {a.params}: {exc}") from exc
        if a.k is not None or a.k_policy == "fixed":
            if a.k is None:
                raise errors.InputError("--k-policy fixed needs --k")
            return make_params(self.p, self.nforms, a.k)
        if a.k_policy == "direct":
            return find_k(self.p, self.nforms, self.verifier, 0, mode="direct", k_direct=self.bounds.k)
        k_max = a.k_max if a.k_max is not None else 2 * self.bounds.k
        return find_k(self.p, self.nforms, self.verifier, k_max)

    def stem(self, suffix):
        out = Path(self.args.out) if self.args.out else Path(".")
        out.mkdir(parents=True, exist_ok=True)
        return out / f"{Path(self.args.input).stem}.{suffix}"


def _params_doc(ctx, params):
    doc = params.to_doc()
    doc.update(
        {
            "mode": ctx.args.mode,
            "gamma": ctx.mp.gamma,
            "alpha": ctx.mp.alpha,
            "phi": ctx.mp.phi,
            "degP": ctx.mp.degP,
            "eps1": ctx.eps.eps1,
            "eps2": ctx.eps.eps2,
            "eps3": ctx.eps.eps3,
            "delta": ctx.eps.delta,
            "kBounds": ctx.bounds.as_dict(),
            "polytope": json.loads(ctx.p.to_json()),
        }
    )
    return doc


def cmd_build(args):
    ctx = Context(args)
    params = ctx.params()
    rep = build_representation(ctx.p, ctx.forms, params)
    polys = ctx.stem("polys.json")
    polys.write_text(json.dumps(rep.polys_doc(), indent=2) + "\n")
    prm = ctx.stem("params.json")
    prm.write_text(json.dumps(_params_doc(ctx, params), indent=2) + "\n")
    print(f"k = {params.k}; wrote {polys} and {prm}")
    return EXIT_OK


def cmd_verify(args):
    ctx = Context(args)
    path = ctx.stem("report.json")
    try:
        params = ctx.params()
    except (errors.NotAccepted, errors.SingularMatrix, errors.ExhaustedKMax) as exc:
        path.write_text(json.dumps({"accepted": False, "error": str(exc)}, indent=2) + "\n")
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    rep = build_representation(ctx.p, ctx.forms, params, expand=False)
    report = verify_all(rep, ctx.p, N=args.samples, seed=args.seed)
    path.write_text(report.to_json() + "\n")
    status = "accepted" if report.accepted else f"{report.n_violations} violations"
    print(f"k = {params.k}: {status}; wrote {path}")
    return EXIT_OK if report.accepted else EXIT_VERIFY


def cmd_params(args):
    ctx = Context(args)
    mp, e, b = ctx.mp, ctx.eps, ctx.bounds
    rows = [
        ("gamma", mp.gamma), ("alpha", mp.alpha), ("phi", mp.phi), ("deg(P)", mp.degP),
        ("eps1", e.eps1), ("eps2", e.eps2), ("eps3", e.eps3), ("delta", e.delta),
    ]
    for name, val in rows:
        print(f"{name:<10} {val:.10g}")
    binding = b.binding
    for name, val in b.as_dict().items():
        mark = "  <- binding" if name == binding else ""
        print(f"k_{name:<8} {val:.10g}{mark}")
    print(f"{'k':<10} {b.k}")
    return EXIT_OK


def cmd_surface(args):
    ctx = Context(args)
    if ctx.p.dim not in (2, 3):
        raise errors.DimensionError(f"surface sampling supports d in (2, 3), got {ctx.p.dim}")
    try:
        J = sorted({int(t) for t in args.faces.split(",") if t.strip()})
    except ValueError as exc:
        raise errors.InputError(f"bad --faces {args.faces!r}") from exc
    if not J or J[0] < 0 or J[-1] >= ctx.p.dim:
        raise errors.InputError(f"--faces must be a nonempty subset of 0..{ctx.p.dim - 1}")
    needs_cap = 0 in J
    params = ctx.params() if needs_cap else make_params(ctx.p, ctx.nforms, ctx.bounds.k_for("gamma", "vertices"))
    rep = build_representation(ctx.p, ctx.forms, params, expand=False)
    pts, _ = zero_set(rep, J, grid=args.grid)
    ext = "csv" if ctx.p.dim == 2 else "obj"
    path = ctx.stem(f"surface.{ext}")
    with open(path, "w") as fh:
        (write_csv if ext == "csv" else write_obj)(pts, fh)
    print(f"{len(pts)} points; wrote {path}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="polyrep", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("build", cmd_build, "write the polynomials and parameters"),
        ("verify", cmd_verify, "build and verify by sampling"),
        ("params", cmd_params, "print metric parameters and bounds on k"),
        ("surface", cmd_surface, "sample the zero set of min_{j in J} p_j"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.set_defaults(func=fn)
        sp.add_argument("input", help="H-representation JSON file")
        sp.add_argument("--mode", choices=("normalized", "raw"), default="normalized")
        sp.add_argument("--k", type=int, default=None, help="fixed k (implies --k-policy fixed)")
        sp.add_argument("--k-policy", choices=("search", "direct", "fixed"), default="search")
        sp.add_argument("--k-max", type=int, default=None, help="search limit (default 2*k_quant)")
        sp.add_argument("--samples", type=int, default=100_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--eps", type=float, default=None, help="epsilon for the k bound (default eps3)")
        sp.add_argument("--grid", type=int, default=64)
        sp.add_argument("--faces", default="0", help="comma-separated subset J of 0..d-1")
        sp.add_argument("--params", default=None, help="reuse a params.json from build")
        sp.add_argument("--out", default=None, help="output directory")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.samples < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    if args.k is not None and args.k < 1:
        print("error: --k must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except errors.NotSimple as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_SIMPLE
    except errors.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except errors.ExhaustedKMax as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
