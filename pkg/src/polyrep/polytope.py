"""H-representations, vertex enumeration and the metric parameters of a
simple polytope.

Inequalities are stored twice: the exact rational input ``a.x <= b`` and a
float copy rescaled to unit normals.  Vertices are found in floating point
and then polished by an exact rational solve of their defining system, so
integral or rational polytopes get exactly representable vertices.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from . import errors
from .poly import AffineForm

FEAS_TOL = 1e-9
DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class HalfSpace:
    """The half-space ``normal . x <= offset``."""

    normal: tuple
    offset: Fraction

    def __post_init__(self):
        if all(a == 0 for a in self.normal):
            raise errors.ZeroNormal("inequality with zero normal vector")


@dataclass
class HRep:
    dim: int
    halfspaces: list
    normals: np.ndarray = field(repr=False)   # (m, d) unit outward normals
    offsets: np.ndarray = field(repr=False)   # (m,)

    @property
    def m(self):
        return len(self.halfspaces)

    def digest(self):
        doc = to_hrep_json(self)
        return hashlib.sha256(doc.encode()).hexdigest()[:16]


@dataclass
class Polytope:
    hrep: HRep
    vertices: np.ndarray          # (n, d), lexicographically sorted
    incidence: list               # per vertex: sorted tuple of facet indices
    diameter: float
    exact_vertices: list = field(default=None, repr=False)

    @property
    def dim(self):
        return self.hrep.dim

    @property
    def m(self):
        return self.hrep.m

    @property
    def n(self):
        return len(self.vertices)

    @property
    def normals(self):
        return self.hrep.normals

    def degrees(self):
        return np.array([len(s) for s in self.incidence], dtype=np.int64)

    def incidence_table(self):
        """Padded ``(n, deg_max)`` int array plus the degree vector."""
        deg = self.degrees()
        tab = np.zeros((self.n, int(deg.max())), dtype=np.int64)
        for v, s in enumerate(self.incidence):
            tab[v, : len(s)] = s
        return tab, deg

    def incidence_mask(self):
        mask = np.zeros((self.n, self.m), dtype=bool)
        for v, s in enumerate(self.incidence):
            mask[v, list(s)] = True
        return mask

    def facet_vertices(self, j):
        return [v for v, s in enumerate(self.incidence) if j in s]

    def margins(self, X):
        """Signed distance-like slack ``min_F (b_F - u_F . x)``; negative outside."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return (self.hrep.offsets[None, :] - X @ self.hrep.normals.T).min(axis=1)

    def to_json(self):
        return json.dumps(
            {
                "vertices": self.vertices.tolist(),
                "incidence": [list(s) for s in self.incidence],
                "diameter": self.diameter,
            },
            indent=2,
        )


# parsing ------------------------------------------------------------------------

def _to_fraction(value):
    if isinstance(value, bool):
        raise errors.InputError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise errors.InputError(f"non-finite number: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise errors.InputError(f"bad number {value!r}") from exc
    raise errors.InputError(f"not a number: {value!r}")


def make_hrep(A, b):
    """Build an :class:`HRep` from rows ``A`` and right-hand sides ``b``."""
    A = [[_to_fraction(a) for a in row] for row in A]
    b = [_to_fraction(x) for x in b]
    if len(A) != len(b):
        raise errors.InputError("A and b have different lengths")
    if not A:
        raise errors.InputError("no inequalities")
    d = len(A[0])
    if d < 2:
        raise errors.DimensionError(f"dimension must be at least 2, got {d}")
    if any(len(row) != d for row in A):
        raise errors.InputError("inequalities of mixed dimension")
    halfspaces = [HalfSpace(tuple(row), rhs) for row, rhs in zip(A, b)]
    raw = np.array([[float(a) for a in row] for row in A])
    norms = np.linalg.norm(raw, axis=1)
    normals = raw / norms[:, None]
    offsets = np.array([float(x) for x in b]) / norms
    return HRep(d, halfspaces, normals, offsets)


def parse_hrep(text):
    """Parse an H-representation JSON document.

    Format: ``{"dim": d, "inequalities": [{"a": [...], "b": b}, ...]}``,
    meaning ``a.x <= b``.  Numbers may be JSON numbers or strings ``"p/q"``.
    """
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise errors.InputError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "inequalities" not in doc or "dim" not in doc:
        raise errors.InputError('expected an object with "dim" and "inequalities"')
    d = doc["dim"]
    if not isinstance(d, int) or isinstance(d, bool):
        raise errors.InputError('"dim" must be an integer')
    if d < 2:
        raise errors.DimensionError(f"dimension must be at least 2, got {d}")
    A, b = [], []
    for k, ineq in enumerate(doc["inequalities"]):
        if not isinstance(ineq, dict) or "a" not in ineq or "b" not in ineq:
            raise errors.InputError(f"inequality {k}: expected keys 'a' and 'b'")
        if not isinstance(ineq["a"], list) or len(ineq["a"]) != d:
            raise errors.InputError(f"inequality {k}: 'a' must have length {d}")
        A.append(ineq["a"])
        b.append(ineq["b"])
    return make_hrep(A, b)


def _frac_str(x):
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_hrep_json(hrep):
    return json.dumps(
        {
            "dim": hrep.dim,
            "inequalities": [
                {"a": [_frac_str(a) for a in h.normal], "b": _frac_str(h.offset)}
                for h in hrep.halfspaces
            ],
        }
    )


# vertex enumeration --------------------------------------------------------------

def _solve_exact(M, rhs):
    """Gauss-Jordan elimination over the rationals; None if singular."""
    n = len(M)
    aug = [list(row) + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [a / p for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * c for a, c in zip(aug[r], aug[col])]
    return [row[n] for row in aug]


def _is_bounded(normals):
    m, d = normals.shape
    if np.linalg.matrix_rank(normals) < d:
        return False
    # bounded iff some strictly positive combination of the normals vanishes
    res = linprog(
        np.zeros(m), A_eq=normals.T, b_eq=np.zeros(d),
        bounds=[(1.0, None)] * m, method="highs",
    )
    return res.status == 0


def _affine_rank(points):
    if len(points) <= 1:
        return 0
    diffs = points[1:] - points[0]
    return np.linalg.matrix_rank(diffs, tol=1e-9 * max(1.0, np.abs(diffs).max()))


def enumerate_vertices(hrep):
    """Convert an H-representation into a :class:`Polytope`.

    Solves every d-subset of facet equations, keeps feasible solutions,
    merges duplicates and builds the vertex-facet incidence.
    """
    A, b = hrep.normals, hrep.offsets
    m, d = A.shape
    if not _is_bounded(A):
        raise errors.Unbounded("polyhedron is unbounded")
    if m < d + 1:
        raise errors.Unbounded("fewer than d+1 inequalities")

    combos = np.array(list(combinations(range(m), d)), dtype=np.int64)
    sub = A[combos]
    smin = np.linalg.svd(sub, compute_uv=False).min(axis=1)
    ok = smin > 1e-10
    combos, sub = combos[ok], sub[ok]
    X = np.linalg.solve(sub, b[combos][..., None])[..., 0]
    feas = (X @ A.T - b[None, :] <= FEAS_TOL).all(axis=1)
    X, combos = X[feas], combos[feas]
    if len(X) == 0:
        raise errors.EmptyPolytope("no feasible vertex")

    reps, members = [], []
    for i, x in enumerate(X):
        if reps:
            dist = np.linalg.norm(X[reps] - x, axis=1)
            j = int(dist.argmin())
            if dist[j] <= DEDUP_TOL:
                if dist[j] > 1e-11 * (1.0 + np.abs(x).max()):
                    raise errors.Degenerate(
                        f"distinct vertex candidates {dist[j]:.2e} apart were merged"
                    )
                members[j].append(i)
                continue
        reps.append(i)
        members.append([i])

    exact, approx = [], []
    for r in reps:
        rows = [hrep.halfspaces[j] for j in combos[r]]
        sol = _solve_exact([h.normal for h in rows], [h.offset for h in rows])
        if sol is None:  # pragma: no cover - float-nonsingular but exactly singular
            sol = [Fraction(float(t)) for t in X[r]]
        exact.append(sol)
        approx.append([float(t) for t in sol])
    V = np.array(approx)
    order = np.lexsort(V.T[::-1])
    V = V[order]
    exact = [exact[i] for i in order]

    slack = b[None, :] - V @ A.T
    if (slack < -FEAS_TOL).any():  # pragma: no cover
        raise errors.Degenerate("polished vertex violates an inequality")
    incidence = [tuple(int(j) for j in np.flatnonzero(np.abs(row) <= FEAS_TOL)) for row in slack]

    if _affine_rank(V) < d:
        raise errors.NotFullDimensional("polytope is not full-dimensional")
    seen = {}
    for j in range(m):
        on = [v for v, s in enumerate(incidence) if j in s]
        if len(on) < d or _affine_rank(V[on]) < d - 1:
            raise errors.RedundantInequality(f"inequality {j} does not define a facet")
        key = tuple(on)
        if key in seen:
            raise errors.RedundantInequality(f"inequalities {seen[key]} and {j} define the same facet")
        seen[key] = j

    diffs = V[:, None, :] - V[None, :, :]
    diam = float(np.sqrt((diffs ** 2).sum(axis=2)).max())
    return Polytope(hrep, V, incidence, diam, exact)


def from_hrep(A, b):
    return enumerate_vertices(make_hrep(A, b))


# combinatorics ---------------------------------------------------------------------

def check_simple(p):
    """True iff every vertex lies on exactly ``d`` facets."""
    return all(len(s) == p.dim for s in p.incidence)


def edges(p):
    """Vertex pairs spanning an edge of ``p``."""
    d = p.dim
    sets = [set(s) for s in p.incidence]
    out = []
    for v, w in combinations(range(p.n), 2):
        common = sets[v] & sets[w]
        if len(common) < d - 1:
            continue
        if np.linalg.matrix_rank(p.normals[sorted(common)], tol=1e-9) != d - 1:
            continue
        if all(not common <= sets[u] for u in range(p.n) if u not in (v, w)):
            out.append((v, w))
    return out


def faces(p, i):
    """All ``i``-faces of a simple polytope as sorted vertex-index tuples."""
    d = p.dim
    if not 0 <= i <= d - 1:
        raise ValueError(f"face dimension must be in [0, {d - 1}]")
    sets = [set(s) for s in p.incidence]
    found = set()
    for s in p.incidence:
        for S in combinations(s, d - i):
            S = set(S)
            found.add(tuple(w for w in range(p.n) if S <= sets[w]))
    return sorted(found)


# geometry ---------------------------------------------------------------------

def support_value(p, u):
    """Support function ``h(P, u) = max_v <u, v>``."""
    u = np.asarray(u, dtype=np.float64)
    if not np.any(u):
        raise ValueError("direction must be nonzero")
    return float((p.vertices @ u).max())


@dataclass
class FacetForms:
    """Affine forms ``q_F``, one per facet, nonnegative on the polytope.

    ``linear`` and ``constant`` are float copies used by the vectorised
    evaluators: ``q(X) = X @ linear.T + constant``.
    """

    forms: list
    normalized: bool
    linear: np.ndarray = field(repr=False)
    constant: np.ndarray = field(repr=False)
    lambdas: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.forms)

    def values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return X @ self.linear.T + self.constant[None, :]

    @property
    def gradients(self):
        """Gradient of ``1 - q_F``, one row per facet."""
        return -self.linear


def facet_forms(p, mode="normalized"):
    """Facet forms in ``"normalized"`` or ``"raw"`` mode.

    Normalised forms are ``(h(P,u_F) - <u_F,x>)/diam(P)``; raw forms are the
    input slacks ``b - a.x`` with exact rational coefficients.  In both
    modes ``lambdas[j]`` rescales raw form ``j`` to its normalised form.
    """
    hs = p.hrep.halfspaces
    raw_norm = np.array([math.sqrt(sum(float(a) ** 2 for a in h.normal)) for h in hs])
    lambdas = 1.0 / (raw_norm * p.diameter)
    if mode == "raw":
        forms = [AffineForm(tuple(-a for a in h.normal), h.offset) for h in hs]
        linear = np.array([[float(-a) for a in h.normal] for h in hs])
        constant = np.array([float(h.offset) for h in hs])
        return FacetForms(forms, False, linear, constant, lambdas)
    if mode != "normalized":
        raise ValueError(f"unknown mode {mode!r}")
    U = p.normals
    h = (p.vertices @ U.T).max(axis=0)
    linear = -U / p.diameter
    constant = h / p.diameter
    forms = [AffineForm(tuple(lin), c) for lin, c in zip(linear.tolist(), constant.tolist())]
    return FacetForms(forms, True, linear, constant, lambdas)


def vertex_form_values(p, forms):
    """``(n, m)`` facet-form values at the vertices, exact zero on incident pairs."""
    Q = forms.values(p.vertices)
    Q[p.incidence_mask()] = 0.0
    return Q


@dataclass
class MetricParams:
    gamma: float
    alpha: float
    phi: float
    degP: int


def alpha_per_vertex(p):
    out = []
    for v, s in enumerate(p.incidence):
        sv = np.linalg.svd(p.normals[list(s)], compute_uv=False)
        if len(s) != p.dim or sv.min() < 1e-12:
            raise errors.SingularNormalMatrix(f"normal matrix of vertex {v} is singular")
        out.append(1.0 / sv.min())
    return np.array(out)


def metric_params(p, forms):
    """gamma, alpha, phi and deg(P) of a simple polytope (normalised forms)."""
    if not forms.normalized:
        raise ValueError("metric parameters need normalized facet forms")
    Q = forms.values(p.vertices)
    mask = p.incidence_mask()
    gamma = float((1.0 - Q[~mask]).max())
    alpha = float(alpha_per_vertex(p).max())
    sets = [set(s) for s in p.incidence]
    smin = 1.0
    for v, w in edges(p):
        e = p.vertices[w] - p.vertices[v]
        e = e / np.linalg.norm(e)
        for F in sets[v] ^ sets[w]:
            smin = min(smin, abs(float(p.normals[F] @ e)))
    phi = math.asin(min(1.0, smin))
    return MetricParams(gamma, alpha, phi, int(p.degrees().max()))
