"""The d-polynomial representation and its sampling verification.

``p_0 = 1 - f_k`` and ``p_i = sigma_{m-d+i+1}(q_1, ..., q_m)`` for
``1 <= i <= d-1``.  Set equality with the polytope is checked by sampling:
deterministic seeds, a boundary band excluded from the comparison, and
extra structured points near vertices where failures concentrate.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import errors, kernels
from .interpolant import VertexInterpolant, epsilon_params
from .poly import EXPANSION_CAP, expand_sigma_all
from .polytope import (
    alpha_per_vertex,
    check_simple,
    edges,
    enumerate_vertices,
    facet_forms,
    faces,
    make_hrep,
    metric_params,
)

MAX_RECORDED = 200


@dataclass
class PolyRepresentation:
    polytope: object
    forms: object                 # forms used by p_1 .. p_{d-1}
    interpolant: VertexInterpolant
    sigma_polys: list             # expanded p_1 .. p_{d-1}, or None where not expanded
    mode: str
    provenance: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.polytope.dim

    @property
    def sigma_orders(self):
        m, d = self.polytope.m, self.dim
        return [m - d + i + 1 for i in range(1, d)]

    def __len__(self):
        return self.dim

    def evaluate(self, X):
        """Values of ``p_0, ..., p_{d-1}`` at the rows of ``X``, shape ``(N, d)``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        m = self.polytope.m
        out = np.empty((len(X), self.dim))
        out[:, 0] = self.interpolant.cap(X)
        Q = np.ascontiguousarray(self.forms.values(X))
        S = kernels.esf_rows(Q, m)
        out[:, 1:] = S[:, self.sigma_orders]
        return out

    def polys_doc(self):
        entries = []
        for i, (l, poly) in enumerate(zip(self.sigma_orders, self.sigma_polys), start=1):
            entry = {"index": i, "sigma_order": l}
            if poly is not None:
                entry.update(poly.to_doc())
            else:
                entry.update({"dim": self.dim, "terms": None})
            entries.append(entry)
        return {
            "dim": self.dim,
            "mode": self.mode,
            "facet_forms": [
                {"linear": [_num(a) for a in f.linear], "constant": _num(f.constant)}
                for f in self.forms.forms
            ],
            "polynomials": entries,
        }


def _num(x):
    from fractions import Fraction

    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def build_representation(p, forms, params, expand=True, cap=EXPANSION_CAP):
    """Assemble ``p_0, ..., p_{d-1}`` for a simple polytope.

    ``forms`` (raw or normalised) define ``p_1 .. p_{d-1}``; ``p_0`` always
    uses the normalised forms.  Expansion falls back to evaluation only when
    the projected size exceeds ``cap``.
    """
    if not check_simple(p):
        raise errors.NotSimple("polytope is not simple")
    nforms = forms if forms.normalized else facet_forms(p, "normalized")
    interp = VertexInterpolant(p, nforms, params)
    d, m = p.dim, p.m
    sigma_polys = [None] * (d - 1)
    if expand:
        try:
            allsig = expand_sigma_all(forms.forms, m, cap=cap)
            sigma_polys = [allsig[m - d + i + 1] for i in range(1, d)]
        except errors.ExpansionTooLarge:
            pass
    mp = metric_params(p, nforms)
    eps = epsilon_params(mp, m, d)
    provenance = {
        "polytope": p.hrep.digest(),
        "k": int(params.k),
        "eps1": eps.eps1,
        "eps2": eps.eps2,
        "eps3": eps.eps3,
        "delta": eps.delta,
    }
    return PolyRepresentation(
        p, forms, interp, sigma_polys, "normalized" if forms.normalized else "raw", provenance
    )


# sampling helpers ---------------------------------------------------------------

def sample_hull(p, N, rng):
    """Random convex combinations of the vertices (points of P)."""
    W = rng.dirichlet(np.ones(p.n), size=N)
    return W @ p.vertices


def sample_box(p, N, rng, inflate):
    lo = p.vertices.min(axis=0) - inflate
    hi = p.vertices.max(axis=0) + inflate
    return lo + (hi - lo) * rng.random((N, p.dim))


def sample_cone(p, v, N, rng, r_max):
    """Points of ``C_v`` at radii in ``(0, r_max]`` from vertex ``v``.

    Directions are rejection-sampled in the coordinates ``w = U_v z`` where
    the cone condition reads ``sum(w) >= (2/3)|w|``.
    """
    U = p.normals[list(p.incidence[v])]
    Uinv = np.linalg.inv(U)
    d = p.dim
    out = []
    while sum(len(o) for o in out) < N:
        w = rng.standard_normal((4 * N + 16, d))
        keep = w.sum(axis=1) >= (2.0 / 3.0) * np.linalg.norm(w, axis=1)
        out.append(w[keep])
    w = np.concatenate(out)[:N]
    z = w @ Uinv.T
    z /= np.linalg.norm(z, axis=1)[:, None]
    r = r_max * (1.0 - rng.random(N))
    return p.vertices[v] + r[:, None] * z


def in_cone(p, forms, v, X):
    """Membership in ``C_v``: ``-sigma_1(q_v(x)) >= (2/3)|q_v(x)|``."""
    qv = forms.values(X)[:, list(p.incidence[v])]
    return -qv.sum(axis=1) >= (2.0 / 3.0) * np.linalg.norm(qv, axis=1) - 1e-15


def _facet_centroids(p):
    return np.array([p.vertices[p.facet_vertices(j)].mean(axis=0) for j in range(p.m)])


def _outward(p, X):
    """Unit outward direction at boundary points: mean of active normals."""
    slack = p.hrep.offsets[None, :] - X @ p.normals.T
    act = np.abs(slack) <= 1e-9 * max(1.0, p.diameter)
    o = act.astype(float) @ p.normals
    norm = np.linalg.norm(o, axis=1)
    return o / np.where(norm > 0, norm, 1.0)[:, None]


def structured_points(p, forms, rng, per_vertex=64):
    """Vertices, facet centroids, edge midpoints, their offsets, and cone rays."""
    diam = p.diameter
    E = edges(p)
    mids = np.array([(p.vertices[a] + p.vertices[b]) / 2 for a, b in E]).reshape(-1, p.dim)
    B = np.vstack([p.vertices, _facet_centroids(p), mids])
    out = [B]
    o = _outward(p, B)
    c = p.vertices.mean(axis=0)
    inward = c - B
    inward /= np.maximum(np.linalg.norm(inward, axis=1), 1e-300)[:, None]
    for t in (1e-5, 1e-4, 1e-3, 1e-2, 1e-1):
        out.append(B + t * diam * o)
        out.append(B + t * diam * inward)
    for v in range(p.n):
        out.append(sample_cone(p, v, per_vertex, rng, 0.25 * diam))
        dirs = rng.standard_normal((per_vertex, p.dim))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        radii = diam * 10.0 ** rng.uniform(-5, math.log10(0.25), per_vertex)
        out.append(p.vertices[v] + radii[:, None] * dirs)
    return np.vstack(out)


# reports ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    samples_inside: int = 0
    samples_outside: int = 0
    samples_skipped: int = 0
    n_violations: int = 0
    violations: list = field(default_factory=list)
    face_vanish_max: dict = field(default_factory=dict)
    sandwich_ok: bool = None
    cone_ok: bool = None
    boundary_band: float = 0.0
    seed: int = 0
    params: dict = field(default_factory=dict)

    @property
    def accepted(self):
        # sandwich and cone results are diagnostics; acceptance is membership only
        return self.n_violations == 0

    def to_doc(self):
        return {
            "accepted": self.accepted,
            "samplesInside": self.samples_inside,
            "samplesOutside": self.samples_outside,
            "samplesSkipped": self.samples_skipped,
            "violationCount": self.n_violations,
            "violations": self.violations,
            "faceVanishMax": {str(k): v for k, v in self.face_vanish_max.items()},
            "sandwichOk": self.sandwich_ok,
            "coneOk": self.cone_ok,
            "boundaryBand": self.boundary_band,
            "seed": self.seed,
            "params": self.params,
        }

    def to_json(self):
        return json.dumps(self.to_doc(), indent=2)


def classify(rep, X):
    """(H-rep membership, polynomial membership, margins, polynomial values)."""
    p = rep.polytope
    margins = p.margins(X)
    vals = rep.evaluate(X)
    return margins >= 0, (vals >= 0).all(axis=1), margins, vals


def verify_membership(rep, p, forms=None, N=100_000, band=None, seed=0, wide=0.5):
    """Compare polynomial membership with H-rep membership on samples.

    Half the uniform samples come from the bounding box inflated by
    ``2 eps_3 diam``, half from the box inflated by ``wide * diam``.
    Points within ``band`` of the boundary are skipped.
    """
    rng = np.random.default_rng(seed)
    diam = p.diameter
    band = 1e-6 * diam if band is None else band
    eps3 = rep.provenance.get("eps3", 0.0)
    n_near = N // 2
    X = np.vstack(
        [
            sample_box(p, n_near, rng, 2 * eps3 * diam),
            sample_box(p, N - n_near, rng, wide * diam),
            structured_points(p, forms or rep.forms, rng),
        ]
    )
    report = VerificationReport(boundary_band=band, seed=seed, params=dict(rep.provenance))
    for s in range(0, len(X), 50_000):
        _merge(report, rep, X[s : s + 50_000], band)
    return report


def _merge(report, rep, X, band):
    h_in, p_in, margins, vals = classify(rep, X)
    keep = np.abs(margins) > band
    report.samples_skipped += int((~keep).sum())
    report.samples_inside += int((keep & h_in).sum())
    report.samples_outside += int((keep & ~h_in).sum())
    bad = np.flatnonzero(keep & (h_in != p_in))
    report.n_violations += len(bad)
    for i in bad[: max(0, MAX_RECORDED - len(report.violations))]:
        idx = int(vals[i].argmin())
        report.violations.append(
            {
                "point": X[i].tolist(),
                "index": idx if h_in[i] else -1,
                "margin": float(margins[i]),
                "value": float(vals[i, idx]),
            }
        )


def verify_face_vanishing(rep, p, per_face=50, seed=0):
    """Max ``|p_i|`` over sampled points of the ``i``-faces, for every ``i``."""
    rng = np.random.default_rng(seed)
    out = {0: float(np.abs(rep.evaluate(p.vertices)[:, 0]).max())}
    for i in range(1, p.dim):
        worst = 0.0
        for face in faces(p, i):
            W = rng.dirichlet(np.ones(len(face)), size=per_face)
            X = W @ p.vertices[list(face)]
            worst = max(worst, float(np.abs(rep.evaluate(X)[:, i]).max()))
        out[i] = worst
    return out


def verify_sandwich(rep, p, forms=None, eps_params=None, N=100_000, seed=0, eps=None, tol=1e-9):
    """Sample ``P subset S_k subset P_eps`` with ``eps = eps_3`` by default."""
    rng = np.random.default_rng(seed)
    nforms = rep.interpolant.forms
    if eps is None:
        eps = eps_params.eps3 if eps_params is not None else rep.provenance["eps3"]
    f = rep.interpolant
    inside = np.vstack([p.vertices, sample_hull(p, N // 2, rng)])
    f_in = f(inside)
    diam = p.diameter
    box = np.vstack(
        [
            sample_box(p, N // 4, rng, 4 * eps * diam),
            sample_box(p, N - N // 2 - N // 4, rng, 0.5 * diam),
        ]
    )
    f_box = f(box)
    qmin = nforms.values(box).min(axis=1)
    in_S = f_box <= 1.0
    worst_q = float(qmin[in_S].min()) if in_S.any() else math.inf
    ok = bool(f_in.max() <= 1 + tol and worst_q >= -eps - tol)
    return {
        "ok": ok,
        "eps": eps,
        "max_f_in_P": float(f_in.max()),
        "min_q_in_S": worst_q,
        "n_in_S": int(in_S.sum()),
    }


def verify_cone_separation(rep, p, forms=None, N=1000, seed=0, tol=1e-9):
    """``f_k > 1`` on sampled ``C_v minus {v}`` plus the vertex gradient inequality."""
    rng = np.random.default_rng(seed)
    nforms = rep.interpolant.forms
    f = rep.interpolant
    degP = int(p.degrees().max())
    f_margin, g_margin = math.inf, math.inf
    members = True
    for v in range(p.n):
        X = sample_cone(p, v, N, rng, 0.25 * p.diameter)
        members &= bool(in_cone(p, nforms, v, X).all())
        f_margin = min(f_margin, float((f(X) - 1.0).min()))
        g = f.grad_scaled(p.vertices[v : v + 1])[0]
        qv = nforms.values(X)[:, list(p.incidence[v])]
        lhs = (X - p.vertices[v]) @ g
        rhs = np.linalg.norm(qv, axis=1) / (3.0 * degP)
        g_margin = min(g_margin, float((lhs - rhs).min()))
    ok = members and f_margin > 0 and g_margin >= -tol
    return {"ok": bool(ok), "min_f_minus_1": f_margin, "min_grad_margin": g_margin, "in_cone": members}


def verify_all(rep, p, N=100_000, seed=0, band=None, cone_samples=1000):
    """Membership plus face vanishing and cone separation, merged in one report."""
    report = verify_membership(rep, p, N=N, band=band, seed=seed)
    report.face_vanish_max = verify_face_vanishing(rep, p, seed=seed)
    cone = verify_cone_separation(rep, p, N=cone_samples, seed=seed)
    report.cone_ok = cone["ok"]
    report.params["cone"] = cone
    return report


# inclusion probes ----------------------------------------------------------------

def inflated_vertices(p, eps):
    """``v_eps = v + eps diam U_v^{-1} 1``: the solution of ``q_F = -eps`` on incident facets."""
    out = []
    for v, s in enumerate(p.incidence):
        U = p.normals[list(s)]
        out.append(p.vertices[v] + eps * p.diameter * np.linalg.solve(U, np.ones(p.dim)))
    return np.array(out)


def sample_inflated(p, eps, N, rng):
    W = rng.dirichlet(np.ones(p.n), size=N)
    return W @ inflated_vertices(p, eps)


def probe_inflated_vertices(p, forms, eps, mp):
    """Vertices of ``P_eps`` versus ``v_eps``, and ``min q_F(v_eps)`` against ``-eps sqrt(d) alpha``."""
    Ve = inflated_vertices(p, eps)
    A = p.normals
    b = p.hrep.offsets + eps * p.diameter
    Pe = enumerate_vertices(make_hrep(A.tolist(), b.tolist()))
    from scipy.spatial.distance import cdist

    match = cdist(Pe.vertices, Ve).min(axis=1).max() if len(Pe.vertices) == len(Ve) else math.inf
    qmin = float(forms.values(Ve).min())
    return {
        "same_vertices": bool(match <= 1e-9 * max(1.0, p.diameter)),
        "min_q": qmin,
        "lower_bound": -eps * math.sqrt(p.dim) * mp.alpha,
    }


def probe_sigma_positive(p, forms, eps1, N=20_000, seed=0):
    """Minimum of ``sigma_i(q(x))``, ``1 <= i <= m-d``, over sampled ``x`` in ``P_eps1``."""
    rng = np.random.default_rng(seed)
    X = np.vstack([sample_inflated(p, eps1, N, rng), inflated_vertices(p, eps1)])
    S = kernels.esf_rows(np.ascontiguousarray(forms.values(X)), p.m)
    return float(S[:, 1 : p.m - p.dim + 1].min())


def probe_sigma_lower_bound(p, forms, eps_params, N=20_000, seed=0):
    """Check the lower bound on ``sigma_i`` over ``P^v_{eps1,delta}``.

    Returns the minimum slack for the bound as displayed,
    ``C(m-d,i)(delta^i - 2^{i-1} eps) + C(m,i) 2^{i-1} eps``, and for the
    bound that the term count supports,
    ``C(m-d,i) delta^i - (C(m,i) - C(m-d,i)) 2^{i-1} eps``.
    """
    rng = np.random.default_rng(seed)
    e1, delta = eps_params.eps1, eps_params.delta
    m, d = p.m, p.dim
    X = sample_inflated(p, e1, N, rng)
    Q = forms.values(X)
    S = kernels.esf_rows(np.ascontiguousarray(Q), m)
    mask = p.incidence_mask()
    displayed, counted = math.inf, math.inf
    n_used = 0
    for v in range(p.n):
        inc = mask[v]
        sel = (Q[:, inc] >= -e1).all(axis=1) & (Q[:, ~inc] >= delta).all(axis=1)
        if not sel.any():
            continue
        n_used += int(sel.sum())
        for i in range(1, m - d + 1):
            disp = comb(m - d, i) * (delta ** i - 2 ** (i - 1) * e1) + comb(m, i) * 2 ** (i - 1) * e1
            cnt = comb(m - d, i) * delta ** i - (comb(m, i) - comb(m - d, i)) * 2 ** (i - 1) * e1
            displayed = min(displayed, float((S[sel, i] - disp).min()))
            counted = min(counted, float((S[sel, i] - cnt).min()))
    return {"displayed": displayed, "counted": counted, "samples": n_used}


def probe_alpha_bounds(p, mp):
    """Slack in ``alpha <= sqrt(d)/sin(phi)`` and ``alpha <= sqrt(d)/(1-gamma)``."""
    d = p.dim
    return {
        "phi": math.sqrt(d) / math.sin(mp.phi) - mp.alpha,
        "gamma": math.sqrt(d) / (1 - mp.gamma) - mp.alpha,
        "alpha_per_vertex": alpha_per_vertex(p).tolist(),
    }
