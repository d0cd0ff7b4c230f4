"""Sparse multivariate polynomials with exact or float coefficients."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from math import comb

import numpy as np

from . import errors

EXPANSION_CAP = 10 ** 6


def _grlex_key(exp):
    # total degree ascending, then lexicographically descending exponents
    return (sum(exp), tuple(-e for e in exp))


class SparsePoly:
    """Polynomial in ``dim`` variables stored as ``{exponents: coefficient}``.

    Coefficients may be ints, :class:`~fractions.Fraction` or floats; exact
    inputs stay exact through ``+``, ``-`` and ``*``.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        self.dim = dim
        self.terms = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp} for dim {dim}")
            if c != 0:
                self.terms[exp] = self.terms.get(exp, 0) + c
        self.terms = {e: c for e, c in self.terms.items() if c != 0}

    @classmethod
    def constant(cls, dim, c):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim, i):
        exp = [0] * dim
        exp[i] = 1
        return cls(dim, {tuple(exp): 1})

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def _coerce(self, other):
        if isinstance(other, SparsePoly):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            return other
        return SparsePoly.constant(self.dim, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return SparsePoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return SparsePoly(self.dim, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return SparsePoly(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = SparsePoly.constant(self.dim, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __call__(self, x):
        return poly_eval(self, x)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exp) if e
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

    def eval_many(self, X):
        """Float evaluation at the rows of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if not self.terms:
            return np.zeros(len(X))
        E = np.array(list(self.terms), dtype=np.int64)
        c = np.array([float(v) for v in self.terms.values()])
        return np.prod(X[:, None, :] ** E[None, :, :], axis=2) @ c

    def to_doc(self):
        terms = []
        for exp, c in self.sorted_terms():
            if isinstance(c, (int, Fraction)):
                c = Fraction(c)
                coef = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            else:
                coef = float(c)
            terms.append({"exp": list(exp), "coef": coef})
        return {"dim": self.dim, "terms": terms}

    def to_json(self):
        return json.dumps(self.to_doc())

    @classmethod
    def from_doc(cls, doc):
        terms = {}
        for t in doc["terms"]:
            c = t["coef"]
            c = Fraction(c) if isinstance(c, (str, int)) else float(c)
            terms[tuple(t["exp"])] = terms.get(tuple(t["exp"]), 0) + c
        return cls(doc["dim"], terms)

    @classmethod
    def from_json(cls, text):
        return cls.from_doc(json.loads(text))


class AffineForm:
    """``constant + linear . x``."""

    __slots__ = ("linear", "constant")

    def __init__(self, linear, constant):
        self.linear = tuple(linear)
        self.constant = constant

    @property
    def dim(self):
        return len(self.linear)

    def __call__(self, x):
        return self.constant + sum(a * t for a, t in zip(self.linear, x))

    def to_poly(self):
        d = self.dim
        terms = {(0,) * d: self.constant}
        for i, a in enumerate(self.linear):
            e = [0] * d
            e[i] = 1
            terms[tuple(e)] = a
        return SparsePoly(d, terms)

    def __repr__(self):
        return f"AffineForm({self.linear}, {self.constant})"


def expand_sigma_all(forms, top, cap=EXPANSION_CAP):
    """Expanded ``sigma_0 .. sigma_top`` of the forms, in one recurrence pass."""
    forms = list(forms)
    if not forms:
        raise ValueError("need at least one form")
    d = forms[0].dim
    if top < 0 or top > len(forms):
        raise ValueError(f"order must lie in [0, {len(forms)}]")
    projected = comb(top + d, d)
    if projected > cap:
        raise errors.ExpansionTooLarge(
            f"sigma_{top} in {d} variables may have {projected} terms (cap {cap})"
        )
    e = [SparsePoly.constant(d, 1)] + [SparsePoly(d)] * top
    for j, f in enumerate(forms):
        q = f.to_poly()
        for t in range(min(j + 1, top), 0, -1):
            e[t] = e[t] + q * e[t - 1]
    return e


def expand_sigma_composition(forms, l, cap=EXPANSION_CAP):
    """Fully expanded ``sigma_l(q_1(x), ..., q_m(x))``."""
    if not 1 <= l <= len(forms):
        raise ValueError(f"order must lie in [1, {len(forms)}]")
    return expand_sigma_all(forms, l, cap)[l]


def poly_eval(p, x):
    """Evaluate term by term.

    Exact when every coefficient and coordinate is rational; otherwise a
    float result summed with :func:`math.fsum`.
    """
    x = list(x)
    if len(x) != p.dim:
        raise ValueError("dimension mismatch")
    exact = all(isinstance(t, (int, Fraction)) for t in x) and all(
        isinstance(c, (int, Fraction)) for c in p.terms.values()
    )
    vals = []
    for exp, c in p.terms.items():
        v = c if exact else float(c)
        for t, e in zip(x, exp):
            if e:
                v = v * (t if exact else float(t)) ** e
        vals.append(v)
    return sum(vals, Fraction(0)) if exact else math.fsum(vals)


def poly_equal(p, q, tol=0):
    """Coefficient-wise comparison; ``tol=0`` demands exact equality."""
    if p.dim != q.dim:
        raise ValueError("dimension mismatch")
    for e in set(p.terms) | set(q.terms):
        diff = p.terms.get(e, 0) - q.terms.get(e, 0)
        if tol == 0:
            if diff != 0:
                return False
        elif abs(diff) > tol:
            return False
    return True
