"""Exact rational arithmetic helpers.

The package-wide rational type is ``fractions.Fraction`` (arbitrary
precision, always canonical: positive denominator, gcd-reduced). This
module adds parsing/formatting for the text formats and the square-root
approximant used by standardization.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ValidationError

Rational = Fraction

# Significant decimal digits kept when approximating an irrational square
# root by a rational. 60 digits leaves the moment residual near 1e-59,
# far below the documented 1e-40 contract.
SQRT_DIGITS = 60


def parse_rational(text: str) -> Fraction:
    """Parse a rational literal: an integer ``p`` or a fraction ``p/q``."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            d = int(den)
            if d <= 0:
                raise ValidationError(f"denominator must be positive in {text!r}")
            return Fraction(int(num), d)
        return Fraction(int(s))
    except ValueError as exc:
        raise ValidationError(f"not a rational literal: {text!r}") from exc


def rational_str(x: Fraction) -> str:
    """Format as ``p`` or ``p/q``; round-trips through parse_rational."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    """Greatest common divisor of two rationals (gcd(0, x) = |x|)."""
    return Fraction(
        math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
        a.denominator * b.denominator,
    )


def sqrt_rational(x: Fraction, digits: int = SQRT_DIGITS) -> Fraction:
    """Square root of a nonnegative rational, as a rational.

    Exact when x is a perfect square of a rational; otherwise a truncated
    integer-square-root approximant with at least ``digits`` significant
    digits (relative error below 10**-digits).
    """
    if x < 0:
        raise ValidationError(f"sqrt of negative rational {x}")
    if x == 0:
        return Fraction(0)
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    # sqrt(n/d) = sqrt(n*d)/d; scale so the isqrt keeps `digits` digits.
    scale = 10**digits
    root = math.isqrt(n * d * scale * scale)
    return Fraction(root, d * scale)
