"""Standard normal CDF from first principles, plus exact binomial machinery.

``phi`` evaluates the standard normal CDF to 1e-12 absolute error without
any special-function dependency: a divided power series for moderate
arguments and the Laplace continued fraction for the tail, split at
|x| = 5. ``phi_oracle`` integrates the density by adaptive quadrature and
serves as the independent referee in tests.

The binomial side is exact big-integer arithmetic throughout, so the
Kolmogorov distance between a standardized binomial CDF and phi is
computed at every jump point with both one-sided gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import KOutOfRange, ValidationError
from .quadrature import adaptive_simpson

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Below this |x| the CDF uses the power series; above, the continued
# fraction for the Mills ratio (fast convergence needs moderate-size x).
_SERIES_SPLIT = 5.0

# Quadrature lower truncation: the mass of the normal law below -12 is
# under 2e-33, invisible at the 1e-15 tolerance floor.
_ORACLE_CUTOFF = 12.0


@dataclass(frozen=True)
class ConvergenceRow:
    """One (n, statistic) record of a convergence table."""

    n: int
    statistic: float
    label: str

    def __post_init__(self):
        if not math.isfinite(self.statistic):
            raise ValidationError(f"statistic for n={self.n} is not finite")


def _pdf(t: float) -> float:
    return math.exp(-0.5 * t * t) / SQRT_TWO_PI

def _series_sum(t: float) -> float:
    # S(t) = sum_k t^(2k+1) / (1*3*5*...*(2k+1)); Phi(t) = 1/2 + pdf(t)*S(t)
    term = t
    total = t
    k = 0
    while True:
        k += 1
        term *= t * t / (2 * k + 1)
        total += term
        if term <= 1e-17 * total:  # equality matters at t = 0
            return total


def _mills_cf(t: float) -> float:
    # Laplace continued fraction t + 1/(t + 2/(t + 3/(...))) via Lentz.
    tiny = 1e-300
    f = t if t != 0 else tiny
    c = f
    d = 0.0
    for k in range(1, 500):
        d = t + k * d
        if d == 0.0:
            d = tiny
        c = t + k / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return f


def _upper_tail(t: float) -> float:
    # P(Z > t) for t >= 0
    if t < _SERIES_SPLIT:
        return 0.5 - _pdf(t) * _series_sum(t)
    return _pdf(t) / _mills_cf(t)


def phi(x: float) -> float:
    """Standard normal CDF, absolute error below 1e-12.

    Series for |x| < 5, Laplace continued fraction beyond; negative x is
    evaluated as the mirrored upper tail, so phi(x) + phi(-x) = 1 holds to
    a couple of ulps by construction.
    """
    if not math.isfinite(x):
        raise ValidationError(f"phi requires finite x, got {x}")
    if x >= 0.0:
        return 1.0 - _upper_tail(x)
    return _upper_tail(-x)


def phi_oracle(x: float, tol: float) -> float:
    """Normal CDF by adaptive quadrature of the density over [-12, x].

    Refinement-guaranteed error <= tol (plus the 2e-33 truncation). Meant
    for tests; raises NonConvergence if the refinement budget runs out.
    """
    if tol < 1e-15:
        raise ValidationError(f"tol must be >= 1e-15, got {tol}")
    if not math.isfinite(x):
        raise ValidationError(f"phi_oracle requires finite x, got {x}")
    lo = -_ORACLE_CUTOFF
    hi = min(x, _ORACLE_CUTOFF)
    if hi <= lo:
        return 0.0
    return adaptive_simpson(_pdf, lo, hi, tol)


@dataclass(frozen=True)
class BinomialSpec:
    """Binomial(n, p) with exact rational p in (0, 1)."""

    n: int
    p: Fraction

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "p", Fraction(self.p))
        if not 0 < self.p < 1:
            raise ValidationError(f"p must lie strictly in (0,1), got {self.p}")

    def mean(self) -> Fraction:
        return self.n * self.p

    def std(self) -> float:
        return math.sqrt(float(self.n * self.p * (1 - self.p)))


def binom_pmf(spec: BinomialSpec, k: int) -> Fraction:
    """Exact C(n,k) p^k (1-p)^(n-k)."""
    if not 0 <= k <= spec.n:
        raise KOutOfRange(f"k={k} outside 0..{spec.n}")
    p = spec.p
    return math.comb(spec.n, k) * p**k * (1 - p) ** (spec.n - k)


def binom_cdf(spec: BinomialSpec, k: int) -> Fraction:
    """Exact P(X <= k), the prefix sum of the pmf."""
    if not 0 <= k <= spec.n:
        raise KOutOfRange(f"k={k} outside 0..{spec.n}")
    num, den = _pmf_numerators(spec, upto=k)
    return Fraction(sum(num), den)


def _pmf_numerators(spec: BinomialSpec, upto: int | None = None):
    """Integer pmf numerators over the common denominator pden^n.

    Iterative update keeps every step exact: the binomial coefficient by
    the usual ratio recurrence and the power product by dividing out one
    factor of qn before multiplying by pn.
    """
    n = spec.n
    pn, pden = spec.p.numerator, spec.p.denominator
    qn = pden - pn
    last = n if upto is None else upto
    c = 1  # C(n, k)
    t = qn**n  # pn^k * qn^(n-k)
    nums = []
    for k in range(last + 1):
        nums.append(c * t)
        if k < n:
            c = c * (n - k) // (k + 1)
            t = t // qn * pn
    return nums, pden**n


def stirling_ratio(n: int) -> float:
    """n! divided by sqrt(2 pi n) (n/e)^n, computed in log space.

    log n! comes from the exact big integer (math.log accepts arbitrary
    precision ints), so nothing overflows and the quotient keeps full
    float accuracy even at n where n! dwarfs the float range.
    """
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    log_fact = math.log(math.factorial(n))
    log_approx = 0.5 * math.log(2.0 * math.pi * n) + n * (math.log(n) - 1.0)
    return math.exp(log_fact - log_approx)


def dml_kolmogorov(spec: BinomialSpec) -> float:
    """Kolmogorov distance between the standardized binomial CDF and phi.

    The sup of |step CDF - continuous CDF| is attained at a jump point,
    approaching from one side or the other, so it suffices to compare phi
    at every standardized jump (k - np)/sqrt(np(1-p)) against both the
    pre-jump and post-jump binomial CDF values. Binomial CDF values are
    exact integer prefix sums converted to float at the end.
    """
    n = spec.n
    mu = float(spec.mean())
    sd = spec.std()
    nums, den = _pmf_numerators(spec)
    worst = 0.0
    prefix = 0
    cdf_prev = 0.0
    for k in range(n + 1):
        prefix += nums[k]
        cdf_here = prefix / den
        target = phi((k - mu) / sd)
        gap = max(abs(cdf_prev - target), abs(cdf_here - target))
        if gap > worst:
            worst = gap
        cdf_prev = cdf_here
    return worst


def dml_table(p: Fraction, n_list) -> list[ConvergenceRow]:
    """Kolmogorov-distance rows for Binomial(n, p) across the given n."""
    return [
        ConvergenceRow(n=n, statistic=dml_kolmogorov(BinomialSpec(n, p)), label="d_k")
        for n in n_list
    ]
