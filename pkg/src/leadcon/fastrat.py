"""Rational arithmetic kernel selection.

Hot loops (simplex pivoting, DP value folding) run noticeably faster on
gmpy2's mpq than on fractions.Fraction.  Everything public still speaks
Fraction; these helpers convert at module boundaries.  The Fraction fallback
keeps the package fully functional without gmpy2 (exercised in tests by
monkeypatching RQ).
"""

from __future__ import annotations

from fractions import Fraction

try:  # pragma: no cover - which branch runs depends on the environment
    from gmpy2 import mpq as RQ

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover
    RQ = Fraction
    HAVE_GMPY2 = False

RQ_ZERO = RQ(0)
RQ_ONE = RQ(1)


def to_fraction(q) -> Fraction:
    """Normalize any exact rational (mpq, Fraction, int) to Fraction."""
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    return Fraction(int(q.numerator), int(q.denominator))
