import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from scipy.stats import special_ortho_group

from conftest import SIMPLE_SHAPES, load
from oracles import vertices_brute
from polyrep import errors, shapes
from polyrep.polytope import (
    check_simple,
    edges,
    enumerate_vertices,
    facet_forms,
    faces,
    from_hrep,
    make_hrep,
    metric_params,
    parse_hrep,
    support_value,
    to_hrep_json,
    vertex_form_values,
)
from polyrep.representation import probe_alpha_bounds

CUBE_GAMMA = 1 - math.sqrt(3) / 3
TETRA_GAMMA = 1 - math.sqrt(6) / 3


@pytest.mark.parametrize("name", ["cube", "tetrahedron", "square", "triangle_product", "truncated_cube", "simplex4"])
def test_vertices_match_brute_force(name):
    h = SIMPLE_SHAPES[name]()
    p = enumerate_vertices(h)
    want = vertices_brute([s.normal for s in h.halfspaces], [s.offset for s in h.halfspaces])
    assert sorted(tuple(v) for v in p.exact_vertices) == want


def test_cube_structure():
    p, _ = load("cube")
    assert (p.n, p.m, p.dim) == (8, 6, 3)
    assert check_simple(p)
    assert math.isclose(p.diameter, 2 * math.sqrt(3))
    assert len(edges(p)) == 12
    assert len(faces(p, 0)) == 8 and len(faces(p, 1)) == 12 and len(faces(p, 2)) == 6


def test_face_counts_satisfy_euler():
    for name in ("cube", "tetrahedron", "truncated_cube"):
        p, _ = load(name)
        f0, f1, f2 = (len(faces(p, i)) for i in range(3))
        assert f0 - f1 + f2 == 2


def test_vertex_to_hrep_roundtrip():
    # scipy's hull of the computed vertices recovers the same facet normals
    for name in ("cube", "tetrahedron", "truncated_cube", "triangle_product"):
        p, _ = load(name)
        hull = ConvexHull(p.vertices)
        normals = np.unique(np.round(hull.equations[:, :-1], 9), axis=0)
        assert len(normals) == p.m
        for u in p.normals:
            assert np.abs(normals - u).max(axis=1).min() < 1e-8


def test_non_simple_detected():
    p = enumerate_vertices(shapes.square_pyramid())
    assert not check_simple(p)
    assert max(len(s) for s in p.incidence) == 4


def test_parse_decimals_and_rationals():
    text = '{"dim": 2, "inequalities": [{"a": [1, 0], "b": "1/3"}, {"a": [-1, 0], "b": 0.5},' \
           ' {"a": [0, 1], "b": 1}, {"a": [0, -1], "b": 1}]}'
    h = parse_hrep(text)
    assert h.halfspaces[0].offset == Fraction(1, 3)
    assert h.halfspaces[1].offset == Fraction(1, 2)
    assert parse_hrep(to_hrep_json(h)).halfspaces == h.halfspaces


@pytest.mark.parametrize(
    "text,exc",
    [
        ("not json", errors.InputError),
        ('{"dim": 1, "inequalities": []}', errors.DimensionError),
        ('{"dim": 2, "inequalities": [{"a": [1], "b": 1}]}', errors.InputError),
        ('{"dim": 2, "inequalities": [{"a": [0, 0], "b": 1}]}', errors.ZeroNormal),
        ('{"dim": 2, "inequalities": [{"a": [1, "x"], "b": 1}]}', errors.InputError),
        ('{"inequalities": []}', errors.InputError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_hrep(text)


def test_unbounded_rejected():
    with pytest.raises(errors.Unbounded):
        from_hrep([[1, 0], [0, 1]], [1, 1])
    with pytest.raises(errors.Unbounded):
        from_hrep([[1, 0], [0, 1], [-1, 0]], [1, 1, 1])


def test_empty_rejected():
    with pytest.raises(errors.EmptyPolytope):
        from_hrep([[1, 0], [-1, 0], [0, 1], [0, -1]], [-1, -1, 1, 1])


def test_flat_rejected():
    with pytest.raises(errors.NotFullDimensional):
        from_hrep([[1, 0], [-1, 0], [0, 1], [0, -1]], [0, 0, 1, 1])


def test_redundant_rejected():
    with pytest.raises(errors.RedundantInequality):
        from_hrep([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1]], [1, 1, 1, 1, 5])
    with pytest.raises(errors.RedundantInequality):
        from_hrep([[1, 0], [-1, 0], [0, 1], [0, -1], [2, 0]], [1, 1, 1, 1, 2])


def test_metric_params_cube_and_tetrahedron():
    p, f = load("cube")
    mp = metric_params(p, f)
    assert math.isclose(mp.gamma, CUBE_GAMMA, rel_tol=1e-12)
    assert math.isclose(mp.alpha, 1.0, rel_tol=1e-12)
    assert math.isclose(mp.phi, math.pi / 2, rel_tol=1e-12)
    assert mp.degP == 3
    p, f = load("tetrahedron")
    assert math.isclose(metric_params(p, f).gamma, TETRA_GAMMA, rel_tol=1e-12)


def test_metric_params_need_normalized_forms():
    p, _ = load("cube")
    with pytest.raises(ValueError):
        metric_params(p, facet_forms(p, "raw"))


@pytest.mark.parametrize("name", sorted(SIMPLE_SHAPES))
def test_alpha_bounded_by_phi_and_gamma(name):
    p, f = load(name)
    slack = probe_alpha_bounds(p, metric_params(p, f))
    assert slack["phi"] >= -1e-9 and slack["gamma"] >= -1e-9


@pytest.mark.parametrize("name", sorted(SIMPLE_SHAPES))
def test_normalized_forms_range(name):
    p, f = load(name)
    Q = vertex_form_values(p, f)
    assert Q.min() >= 0 and Q.max() <= 1 + 1e-12
    assert (Q[p.incidence_mask()] == 0).all()
    assert np.allclose(f.values(p.vertices)[p.incidence_mask()], 0, atol=1e-12)


def test_lambdas_rescale_raw_forms():
    p, f = load("truncated_cube")
    raw = facet_forms(p, "raw")
    X = np.random.default_rng(0).uniform(-1, 1, (20, 3))
    assert np.allclose(raw.values(X) * raw.lambdas, f.values(X), atol=1e-12)


def test_support_value():
    p, _ = load("cube")
    assert support_value(p, [1, 1, 0]) == 2.0
    with pytest.raises(ValueError):
        support_value(p, [0, 0, 0])


@given(st.integers(0, 10**6))
def test_diameter_and_gamma_rotation_invariant(seed):
    R = special_ortho_group.rvs(3, random_state=seed)
    shift = np.random.default_rng(seed).uniform(-3, 3, 3)
    p, f = load("truncated_cube")
    q = enumerate_vertices(shapes.rotated(shapes.truncated_cube(), R, shift))
    assert math.isclose(q.diameter, p.diameter, rel_tol=1e-9)
    assert math.isclose(
        metric_params(q, facet_forms(q)).gamma, metric_params(p, f).gamma, rel_tol=1e-8
    )


def test_polytope_json_document():
    p, _ = load("square")
    doc = json.loads(p.to_json())
    assert set(doc) == {"vertices", "incidence", "diameter"}
    assert len(doc["vertices"]) == 4


def test_make_hrep_validation():
    with pytest.raises(errors.DimensionError):
        make_hrep([[1]], [1])
    with pytest.raises(errors.InputError):
        make_hrep([[1, 0]], [1, 2])
