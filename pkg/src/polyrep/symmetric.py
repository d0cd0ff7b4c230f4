"""Elementary symmetric values and the orthant sign test."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class SymSpectrum:
    """``(sigma_0, ..., sigma_m)`` of an ``m``-vector."""

    values: tuple

    @property
    def m(self):
        return len(self.values) - 1

    def __getitem__(self, l):
        # sigma_l = 0 outside [0, m]
        if l < 0 or l > self.m:
            return 0
        return self.values[l]

    def __len__(self):
        return len(self.values)


def elem_sym_all(values, exact=False):
    """All elementary symmetric values via the prepend recurrence.

    With ``exact=True`` the inputs are converted to :class:`Fraction`
    (floats convert to their exact binary value).  Otherwise the arithmetic
    type of the inputs is kept, so ints and Fractions stay exact anyway.
    """
    vals = [Fraction(v) for v in values] if exact else list(values)
    if not vals:
        raise ValueError("need at least one value")
    e = [Fraction(1) if exact else 1] + [0] * len(vals)
    for j, y in enumerate(vals):
        for l in range(j + 1, 0, -1):
            e[l] = e[l] + y * e[l - 1]
    return SymSpectrum(tuple(e))


def orthant_member_by_signs(values):
    """True iff ``sigma_l(values) >= 0`` for every ``1 <= l <= d``.

    Equivalent to all coordinates being nonnegative.
    """
    if len(values) < 2:
        raise ValueError("need d >= 2")
    s = elem_sym_all(values)
    return all(v >= 0 for v in s.values[1:])


def convolution_split(x, y, i, exact=False):
    """``sum_j sigma_{i-j}(x) sigma_j(y)``, i.e. sigma_i of the concatenation."""
    n1, n2 = len(x), len(y)
    if not 1 <= i <= n1 + n2:
        raise ValueError(f"index must lie in [1, {n1 + n2}]")
    sx = elem_sym_all(x, exact) if n1 else SymSpectrum((1,))
    sy = elem_sym_all(y, exact) if n2 else SymSpectrum((1,))
    lo, hi = max(0, i - n1), min(n2, i)
    return sum(sx[i - j] * sy[j] for j in range(lo, hi + 1))
