"""The vertex-interpolating convex polynomial ``f_k`` and its parameters.

``f_k(x) = sum_v y_v (mean_{F ~ v} (1 - q_F(x))^{2k})^{2k}`` with weights
chosen so that ``f_k = 1`` at every vertex.  The cap polynomial of the
representation is ``p_0 = 1 - f_k``.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import errors, kernels
from .polytope import vertex_form_values

log = logging.getLogger(__name__)

CHUNK = 50_000


@dataclass
class InterpolantParams:
    k: int
    y: np.ndarray
    a_deviation: float
    lambdas: np.ndarray = None
    report: object = field(default=None, repr=False, compare=False)

    def to_doc(self):
        return {
            "k": int(self.k),
            "y": {str(v): float(t) for v, t in enumerate(self.y)},
            "aDeviation": float(self.a_deviation),
            "lambdas": [] if self.lambdas is None else [float(t) for t in self.lambdas],
        }

    def to_json(self):
        return json.dumps(self.to_doc(), indent=2)

    @classmethod
    def from_doc(cls, doc):
        y = np.array([doc["y"][str(v)] for v in range(len(doc["y"]))], dtype=np.float64)
        lam = np.array(doc.get("lambdas") or [], dtype=np.float64)
        return cls(int(doc["k"]), y, float(doc["aDeviation"]), lam if lam.size else None)


@dataclass
class EpsilonParams:
    eps1: float
    eps2: float
    eps3: float
    delta: float


@dataclass
class KBounds:
    """The four lower bounds on ``k`` (binary logarithms throughout)."""

    gamma: float
    vertices: float
    eps: float
    cone: float

    def as_dict(self):
        return {"gamma": self.gamma, "vertices": self.vertices, "eps": self.eps, "cone": self.cone}

    @property
    def binding(self):
        d = self.as_dict()
        return max(d, key=d.get)

    @property
    def k(self):
        return max(1, math.ceil(max(self.as_dict().values())))

    def k_for(self, *names):
        """Smallest integer ``k >= 1`` meeting the named bounds only."""
        d = self.as_dict()
        return max(1, math.ceil(max(d[n] for n in names)))


# matrix and weights -----------------------------------------------------------

def _two_k(k):
    if k < 1:
        raise ValueError("k must be a positive integer")
    return float(2 * k)


def assemble_A(p, forms, k):
    """``A_k[w, v] = (mean_{F ~ v} (1 - q_F(w))^{2k})^{2k}``.

    Incident form values are snapped to zero, so the diagonal is exactly 1.
    """
    inc, deg = p.incidence_table()
    Qv = vertex_form_values(p, forms)
    return kernels.vertex_terms(Qv, inc, deg, _two_k(k))


def a_deviation(A):
    """``|A - E|_inf``, the maximum absolute row sum."""
    return float(np.abs(A - np.eye(len(A))).sum(axis=1).max())


def solve_weights(A):
    """Solve ``A y = 1`` by LU with partial pivoting."""
    A = np.asarray(A, dtype=np.float64)
    if not np.isfinite(A).all():
        raise errors.SingularMatrix("matrix has non-finite entries")
    try:
        y = np.linalg.solve(A, np.ones(len(A)))
    except np.linalg.LinAlgError as exc:
        raise errors.SingularMatrix(str(exc)) from exc
    if not np.isfinite(y).all() or np.linalg.cond(A) > 1e14:
        raise errors.SingularMatrix("matrix is numerically singular")
    if (y <= 0).any():
        raise errors.NotAccepted(f"{int((y <= 0).sum())} nonpositive weights", y=y)
    return y


def make_params(p, forms, k):
    """Assemble and solve for a given ``k``; raises if not accepted."""
    A = assemble_A(p, forms, k)
    y = solve_weights(A)
    return InterpolantParams(k, y, a_deviation(A), forms.lambdas)


# evaluation -------------------------------------------------------------------

class VertexInterpolant:
    """Vectorised evaluator for ``f_k`` and its gradient."""

    def __init__(self, p, forms, params):
        if not forms.normalized:
            raise ValueError("the interpolant is defined on normalized facet forms")
        self.polytope = p
        self.forms = forms
        self.params = params
        self.inc, self.deg = p.incidence_table()
        self.two_k = _two_k(params.k)
        self.y = np.asarray(params.y, dtype=np.float64)
        self.G = np.ascontiguousarray(forms.gradients)

    @property
    def k(self):
        return self.params.k

    def _chunks(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        for s in range(0, len(X), CHUNK):
            yield np.ascontiguousarray(self.forms.values(X[s : s + CHUNK]))

    def __call__(self, X):
        parts = [kernels.fk_rows(Q, self.inc, self.deg, self.y, self.two_k) for Q in self._chunks(X)]
        return np.concatenate(parts) if parts else np.zeros(0)

    def cap(self, X):
        """``p_0 = 1 - f_k``."""
        return 1.0 - self(X)

    def grad_scaled(self, X):
        """``grad f_k / (4 k^2)``; finite even when ``4k^2`` overflows."""
        parts = [
            kernels.fk_grad_rows(Q, self.inc, self.deg, self.y, self.two_k, self.G)
            for Q in self._chunks(X)
        ]
        return np.concatenate(parts) if parts else np.zeros((0, self.polytope.dim))

    def grad(self, X):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.grad_scaled(X) * (float(self.k) ** 2 * 4.0)


def eval_f_k(p, forms, params, x):
    x = np.asarray(x, dtype=np.float64)
    out = VertexInterpolant(p, forms, params)(x)
    return float(out[0]) if x.ndim == 1 else out


def grad_f_k(p, forms, params, x):
    x = np.asarray(x, dtype=np.float64)
    out = VertexInterpolant(p, forms, params).grad(x)
    return out[0] if x.ndim == 1 else out


# quantitative parameters ---------------------------------------------------------

def epsilon_params(mp, m, d):
    """epsilon_1, epsilon_2, epsilon_3 and delta from the metric parameters."""
    if m <= d:
        raise ValueError("a d-polytope has more than d facets")
    g, a = mp.gamma, mp.alpha
    r = m - d
    b1 = ((1 - g) / (4 * (1 + d))) ** r
    b2 = (1 - g) / (2 * (1 + d) * math.sqrt(d) * a)
    b3 = 5 * (1 - g) ** r / (18 * math.comb(d, d // 2) * 2 ** r * (3 ** r - 2 ** r))
    eps1 = min(b1, b2)
    delta = (1 - g) / (1 + d) - eps1 * math.sqrt(d) * a
    if delta <= 0:
        raise errors.NonpositiveDelta(f"delta = {delta:g}")
    eps2 = min(b1, b2, b3)
    eps3 = eps2 / (d - 1 + (math.comb(m, d - 1) - d) * (2 * (1 + d) / (1 - g)) ** r)
    return EpsilonParams(eps1, eps2, eps3, delta)


def k_bounds(mp, n, eps, d=None):
    d = mp.degP if d is None else d
    if eps <= 0:
        raise ValueError("eps must be positive")
    if mp.gamma > 0:
        kg = 1.0 / (2.0 * math.log2(1.0 / mp.gamma))
    else:
        log.warning("gamma = 0: the gamma bound on k is vacuous and skipped")
        kg = 0.0
    kn = 2.0 * math.log2(4 * n)
    ke = math.log2(2 * mp.degP) / (2.0 * math.log1p(eps) / math.log(2.0))
    kc = 3.0 * math.log2(12 * n * math.sqrt(d) * mp.alpha * mp.degP)
    return KBounds(kg, kn, ke, kc)


def quantitative_k(mp, n, eps, d=None):
    """Smallest integer ``k`` meeting all four explicit lower bounds."""
    return k_bounds(mp, n, eps, d).k


# k search ----------------------------------------------------------------------

def find_k(p, forms, verifier, k_max, mode="search", k_direct=None):
    """Find an accepted ``k``.

    ``search`` tries ``k = 1, 2, ...``: assemble ``A_k``, solve for the
    weights, and hand positive weights to ``verifier``.  ``direct`` tries
    only ``k_direct``.  ``verifier(params)`` returns a report with an
    ``accepted`` attribute, or a bool.
    """
    if mode == "direct":
        if k_direct is None:
            raise ValueError("direct mode needs k_direct")
        candidates = [k_direct]
    elif mode == "search":
        candidates = range(1, k_max + 1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for k in candidates:
        try:
            params = make_params(p, forms, k)
        except (errors.SingularMatrix, errors.NotAccepted) as exc:
            log.info("k=%d rejected: %s", k, exc)
            continue
        report = verifier(params)
        ok = report if isinstance(report, bool) else report.accepted
        log.info("k=%d verifier %s", k, "accepted" if ok else "rejected")
        if ok:
            if not isinstance(report, bool):
                params.report = report
            return params
    raise errors.ExhaustedKMax(f"no accepted k up to {k_max if mode == 'search' else k_direct}")
