import os

import pytest
from hypothesis import HealthCheck, settings

from polyrep import shapes
from polyrep.polytope import enumerate_vertices, facet_forms

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = []

SIMPLE_SHAPES = {
    "cube": lambda: shapes.cube(3),
    "tetrahedron": shapes.tetrahedron,
    "square": lambda: shapes.cube(2),
    "pentagon": lambda: shapes.regular_polygon(5),
    "hexagon": lambda: shapes.regular_polygon(6),
    "heptagon": lambda: shapes.regular_polygon(7),
    "octagon": lambda: shapes.regular_polygon(8),
    "triangle_product": lambda: shapes.simplex_product(2, 2),
    "truncated_cube": shapes.truncated_cube,
    "simplex4": lambda: shapes.simplex(4),
}


def load(name):
    p = enumerate_vertices(SIMPLE_SHAPES[name]())
    return p, facet_forms(p, "normalized")


@pytest.fixture
def acceptance_log():
    """Append ``(criterion, ok, detail)``; lines are printed in the terminal summary."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    grouped = {}
    for n, ok, detail in _ACCEPTANCE:
        grouped.setdefault(n, []).append((ok, detail))
    for n in sorted(grouped):
        ok = all(o for o, _ in grouped[n])
        detail = "; ".join(d for _, d in grouped[n])
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
