import json
from dataclasses import replace

import numpy as np
import pytest

from conftest import SIMPLE_SHAPES, load
from polyrep import errors, shapes
from polyrep.interpolant import epsilon_params, k_bounds, make_params
from polyrep.polytope import enumerate_vertices, facet_forms, metric_params
from polyrep.representation import (
    build_representation,
    in_cone,
    inflated_vertices,
    probe_inflated_vertices,
    probe_sigma_lower_bound,
    probe_sigma_positive,
    sample_cone,
    sample_hull,
    structured_points,
    verify_all,
    verify_cone_separation,
    verify_face_vanishing,
    verify_membership,
    verify_sandwich,
)


def _eps(p, f):
    mp = metric_params(p, f)
    e = epsilon_params(mp, p.m, p.dim)
    return mp, e, k_bounds(mp, p.n, e.eps3)


def _rep(name, k=None, mode="normalized"):
    p, f = load(name)
    mp, e, b = _eps(p, f)
    params = make_params(p, f, k or b.k_for("gamma", "vertices"))
    return p, f, build_representation(p, facet_forms(p, mode), params, expand=False)


def test_sigma_orders_and_values_shape():
    p, f, rep = _rep("cube")
    assert rep.sigma_orders == [5, 6]
    vals = rep.evaluate(p.vertices)
    assert vals.shape == (8, 3)
    assert np.allclose(vals, 0, atol=1e-12)


def test_polynomial_document_shape():
    p, f = load("tetrahedron")
    rep = build_representation(p, facet_forms(p, "raw"), make_params(p, f, 2))
    doc = rep.polys_doc()
    assert doc["mode"] == "raw" and len(doc["polynomials"]) == 2
    assert doc["polynomials"][0]["sigma_order"] == 3
    assert doc["facet_forms"][0] == {"linear": ["1", "-1", "1"], "constant": "1"}
    json.dumps(doc)


def test_expansion_falls_back_to_evaluation():
    p, f = load("octagon")
    rep = build_representation(p, f, make_params(p, f, 2), cap=5)
    assert rep.sigma_polys == [None]
    assert rep.polys_doc()["polynomials"][0]["terms"] is None


def test_expanded_polys_agree_with_kernel():
    p, f = load("truncated_cube")
    rep = build_representation(p, f, make_params(p, f, 2))
    X = np.random.default_rng(0).uniform(-1.5, 1.5, (200, 3))
    vals = rep.evaluate(X)
    for i, poly in enumerate(rep.sigma_polys, start=1):
        assert np.allclose(poly.eval_many(X), vals[:, i], rtol=1e-9, atol=1e-12)


def test_non_simple_rejected():
    p = enumerate_vertices(shapes.square_pyramid())
    with pytest.raises(errors.NotSimple):
        build_representation(p, facet_forms(p), None)


@pytest.mark.parametrize("name", sorted(SIMPLE_SHAPES))
def test_membership_at_moderate_k(name):
    p, f, rep = _rep(name)
    report = verify_membership(rep, p, N=20_000, seed=3)
    assert report.n_violations == 0 and report.accepted


def test_shrunken_weights_are_caught():
    p, f = load("cube")
    params = make_params(p, f, 2)
    bad = replace(params, y=params.y * 0.3)
    rep = build_representation(p, f, bad, expand=False)
    report = verify_membership(rep, p, N=20_000, seed=0)
    assert report.n_violations > 0 and not report.accepted
    v = report.violations[0]
    assert set(v) == {"point", "index", "margin", "value"}


def test_report_is_deterministic():
    p, f, rep = _rep("pentagon")
    a = verify_all(rep, p, N=5000, seed=8).to_json()
    b = verify_all(rep, p, N=5000, seed=8).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["violationCount"] == 0 and doc["accepted"] is True
    assert doc["params"]["k"] == rep.interpolant.k


@pytest.mark.parametrize("name", ["cube", "tetrahedron", "pentagon", "triangle_product"])
def test_sandwich_at_quantitative_k(name):
    # only meaningful where eps3 is well above double rounding
    p, f = load(name)
    mp, e, b = _eps(p, f)
    rep = build_representation(p, f, make_params(p, f, b.k), expand=False)
    res = verify_sandwich(rep, p, eps_params=e, N=40_000, seed=2)
    assert res["ok"], res


@pytest.mark.parametrize("name", sorted(SIMPLE_SHAPES))
def test_cone_separation_at_quantitative_k(name):
    p, f = load(name)
    mp, e, b = _eps(p, f)
    rep = build_representation(p, f, make_params(p, f, b.k), expand=False)
    assert verify_cone_separation(rep, p, N=300, seed=1)["ok"]


def test_face_vanishing_raw_mode():
    p, f, rep = _rep("tetrahedron", mode="raw")
    worst = verify_face_vanishing(rep, p, per_face=20)
    assert max(worst.values()) <= 1e-12


@pytest.mark.parametrize("name", ["cube", "triangle_product", "heptagon"])
def test_cone_sampler_stays_in_cone(name):
    p, f = load(name)
    rng = np.random.default_rng(0)
    for v in range(p.n):
        X = sample_cone(p, v, 200, rng, 0.1 * p.diameter)
        assert in_cone(p, f, v, X).all()
        assert np.linalg.norm(X - p.vertices[v], axis=1).max() <= 0.1 * p.diameter * (1 + 1e-12)


def test_hull_and_structured_samplers():
    p, f = load("truncated_cube")
    rng = np.random.default_rng(0)
    assert (p.margins(sample_hull(p, 500, rng)) >= -1e-12).all()
    S = structured_points(p, f, rng, per_vertex=8)
    assert len(S) > 10 * p.n and np.isfinite(S).all()


@pytest.mark.parametrize("name", sorted(SIMPLE_SHAPES))
def test_inflated_vertices_probe(name):
    p, f = load(name)
    mp, e, _ = _eps(p, f)
    res = probe_inflated_vertices(p, f, e.eps1, mp)
    assert res["same_vertices"]
    assert res["min_q"] >= res["lower_bound"] - 1e-12
    Ve = inflated_vertices(p, e.eps1)
    assert np.allclose(f.values(Ve)[p.incidence_mask()], -e.eps1, atol=1e-12)


@pytest.mark.parametrize("name", sorted(SIMPLE_SHAPES))
def test_low_order_sigmas_positive_near_polytope(name):
    p, f = load(name)
    _, e, _ = _eps(p, f)
    assert probe_sigma_positive(p, f, e.eps1, N=5000) > 0


@pytest.mark.parametrize("name", sorted(SIMPLE_SHAPES))
def test_sigma_lower_bound_both_readings(name):
    p, f = load(name)
    _, e, _ = _eps(p, f)
    res = probe_sigma_lower_bound(p, f, e, N=5000)
    assert res["samples"] > 0
    assert res["displayed"] >= 0 and res["counted"] >= 0
