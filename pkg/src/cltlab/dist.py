"""Exact finite-support distribution algebra.

A ``FiniteDist`` stores atoms as exact rationals (values and probabilities)
and supports exact moments, standardization, convolution, and n-fold
convolution powers. Large powers switch to ``LatticeDist``: values stay
exact lattice points while probabilities become float64.

All values are immutable after construction and every operation is pure,
so instances can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DuplicateValue,
    ExactBudgetExceeded,
    NonPositiveProb,
    SumNotOne,
    ValidationError,
    ZeroVariance,
)
from .rationals import fraction_gcd, parse_rational, rational_str, sqrt_rational

# Exact mode refuses convolution powers whose projected atom count exceeds
# this; callers are told to use lattice-float mode instead.
EXACT_ATOM_BUDGET = 2_000_000

# Tolerance on total mass in float (lattice) mode.
LATTICE_MASS_TOL = 1e-9

Atom = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class FiniteDist:
    """Finite-support distribution: atoms sorted strictly by value.

    Invariants: probabilities positive and summing to one exactly, values
    pairwise distinct. Use :func:`make_dist` to build from unsorted input.
    """

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        total = Fraction(0)
        prev = None
        for v, p in self.atoms:
            if p <= 0:
                raise NonPositiveProb(f"atom ({v}, {p}) has non-positive probability")
            if prev is not None and v <= prev:
                if v == prev:
                    raise DuplicateValue(f"value {v} appears more than once")
                raise ValidationError("atoms must be sorted strictly by value")
            prev = v
            total += p
        if total != 1:
            raise SumNotOne(f"probabilities sum to {total}, expected 1")

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for v, _ in self.atoms)

    @property
    def probs(self) -> tuple[Fraction, ...]:
        return tuple(p for _, p in self.atoms)

    def prob(self, value) -> Fraction:
        """Exact probability of a single value (0 if not an atom)."""
        value = Fraction(value)
        for v, p in self.atoms:
            if v == value:
                return p
        return Fraction(0)

    def mean(self) -> Fraction:
        return sum((v * p for v, p in self.atoms), Fraction(0))

    def variance(self) -> Fraction:
        mu = self.mean()
        return sum((v * v * p for v, p in self.atoms), Fraction(0)) - mu * mu

    def cdf(self, x) -> Fraction:
        """Exact P(X <= x) for a rational threshold."""
        x = Fraction(x)
        return sum((p for v, p in self.atoms if v <= x), Fraction(0))


@dataclass(frozen=True, eq=False)
class LatticeDist:
    """Distribution on the lattice ``offset + k*step`` with float64 masses.

    ``offset`` and ``step`` are exact rationals; only the probabilities are
    approximate. Total mass must stay within LATTICE_MASS_TOL of one.
    """

    offset: Fraction
    step: Fraction
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.step <= 0:
            raise ValidationError("lattice step must be positive")
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValidationError("lattice probs must be a non-empty 1-D array")
        if np.any(probs < 0):
            raise ValidationError("lattice probs must be nonnegative")
        mass = float(np.sum(probs))
        if abs(mass - 1.0) > LATTICE_MASS_TOL:
            raise ValidationError(f"lattice mass {mass} outside 1 +/- {LATTICE_MASS_TOL}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def total_mass(self) -> float:
        return float(math.fsum(self.probs))

    def value(self, k: int) -> Fraction:
        return self.offset + k * self.step


def make_dist(atoms) -> FiniteDist:
    """Build a canonical FiniteDist from (value, prob) pairs in any order.

    Raises SumNotOne / NonPositiveProb / DuplicateValue naming the
    offending atom. Values and probabilities may be ints, Fractions, or
    anything Fraction accepts exactly (not floats unless intended).
    """
    norm = [(Fraction(v), Fraction(p)) for v, p in atoms]
    norm.sort(key=lambda a: a[0])
    return FiniteDist(tuple(norm))


def delta(value=0) -> FiniteDist:
    """Point mass at ``value``."""
    return make_dist([(Fraction(value), Fraction(1))])


def rademacher() -> FiniteDist:
    """Fair +/-1 coin: mean 0, variance 1."""
    return make_dist([(-1, Fraction(1, 2)), (1, Fraction(1, 2))])


def bernoulli(p) -> FiniteDist:
    """{0, 1} with P(1) = p."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValidationError(f"bernoulli p must be in (0,1), got {p}")
    return make_dist([(0, 1 - p), (1, p)])


def uniform_atoms(values) -> FiniteDist:
    """Equal mass on each given value."""
    vals = [Fraction(v) for v in values]
    w = Fraction(1, len(vals))
    return make_dist([(v, w) for v in vals])


def standardize(d: FiniteDist) -> FiniteDist:
    """Affine image with mean 0 and variance 1.

    The shift by the mean is exact. The scale 1/sigma is exact when the
    variance is a perfect rational square, otherwise a 60-digit rational
    approximant of sigma is used, leaving |variance - 1| below 1e-40.
    """
    var = d.variance()
    if var == 0:
        raise ZeroVariance("cannot standardize a distribution with zero variance")
    mu = d.mean()
    sigma = sqrt_rational(var)
    return FiniteDist(tuple(((v - mu) / sigma, p) for v, p in d.atoms))


def _lattice_view(values):
    """Coarsest lattice holding all values: (origin, step, integer indices).

    ``step`` is the gcd of the differences from the smallest value; a
    single-atom distribution gets the sentinel step 0 (any lattice fits).
    """
    origin = values[0]
    step = Fraction(0)
    for v in values[1:]:
        step = fraction_gcd(step, v - origin)
    if step == 0:
        return origin, step, [0] * len(values)
    idx = [int((v - origin) / step) for v in values]
    return origin, step, idx


def _int_weights(probs):
    """Probabilities as integer numerators over their common denominator."""
    den = math.lcm(*(p.denominator for p in probs))
    return [p.numerator * (den // p.denominator) for p in probs], den


def convolve(d1: FiniteDist, d2: FiniteDist) -> FiniteDist:
    """Exact law of the sum of independent draws from d1 and d2.

    Works in integer index space on the coarsest common lattice, so the
    inner loop is pure integer arithmetic; rationals are rebuilt once per
    output atom.
    """
    o1, s1, i1 = _lattice_view(d1.values)
    o2, s2, i2 = _lattice_view(d2.values)
    g = fraction_gcd(s1, s2)
    if g == 0:  # both single atoms
        return make_dist([(o1 + o2, Fraction(1))])
    r1 = [int(s1 / g) * k for k in i1]
    r2 = [int(s2 / g) * k for k in i2]
    n1, den1 = _int_weights(d1.probs)
    n2, den2 = _int_weights(d2.probs)
    if len(r1) < len(r2):  # keep the outer loop short
        r1, r2, n1, n2 = r2, r1, n2, n1

    top = r1[-1] + r2[-1]
    if top + 1 <= 4 * len(r1) * len(r2) + 64:
        acc = [0] * (top + 1)
        for a, na in zip(r1, n1):
            for b, nb in zip(r2, n2):
                acc[a + b] += na * nb
        pairs = [(k, num) for k, num in enumerate(acc) if num]
    else:
        sparse: dict[int, int] = {}
        for a, na in zip(r1, n1):
            for b, nb in zip(r2, n2):
                k = a + b
                sparse[k] = sparse.get(k, 0) + na * nb
        pairs = sorted(sparse.items())

    offset = o1 + o2
    den = den1 * den2
    return FiniteDist(tuple((offset + k * g, Fraction(num, den)) for k, num in pairs))


def _kahan_convolve(acc: np.ndarray, shifts, weights) -> np.ndarray:
    """One dense lattice convolution step with Kahan-compensated sums."""
    out = np.zeros(len(acc) + shifts[-1])
    comp = np.zeros_like(out)
    n = len(acc)
    for k, w in zip(shifts, weights):
        seg = slice(k, k + n)
        y = w * acc - comp[seg]
        t = out[seg] + y
        comp[seg] = (t - out[seg]) - y
        out[seg] = t
    return out


def projected_power_atoms(d: FiniteDist, n: int) -> int:
    """Upper bound on the atom count of the n-fold convolution power."""
    _, _, idx = _lattice_view(d.values)
    return n * idx[-1] + 1


def convolve_power(d: FiniteDist, n: int, mode: str = "exact"):
    """Law of the sum of n independent draws from d.

    ``exact`` returns a FiniteDist and refuses when the projected atom
    count exceeds EXACT_ATOM_BUDGET (raising ExactBudgetExceeded; switch to
    ``lattice-float``). ``lattice-float`` embeds the atoms on their
    coarsest common lattice and iterates dense float64 convolution with
    compensated summation; values remain exact lattice points.
    """
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    if mode == "exact":
        if projected_power_atoms(d, n) > EXACT_ATOM_BUDGET:
            raise ExactBudgetExceeded(
                f"projected atom count {projected_power_atoms(d, n)} exceeds "
                f"{EXACT_ATOM_BUDGET}; use lattice-float mode"
            )
        acc = d
        for _ in range(n - 1):
            acc = convolve(acc, d)
        return acc
    if mode == "lattice-float":
        origin, step, idx = _lattice_view(d.values)
        if step == 0:
            step = Fraction(1)
        base = np.zeros(idx[-1] + 1)
        for k, p in zip(idx, d.probs):
            base[k] = float(p)
        shifts = [k for k in idx]
        weights = [float(p) for p in d.probs]
        acc = base.copy()
        for _ in range(n - 1):
            acc = _kahan_convolve(acc, shifts, weights)
        return LatticeDist(offset=n * origin, step=step, probs=acc)
    raise ValidationError(f"unknown mode {mode!r} (expected 'exact' or 'lattice-float')")


def cdf_scaled(dist_n, n: int, x: float) -> float:
    """CDF at x of the scaled sum S_n = (sum of n draws)/sqrt(n).

    ``dist_n`` is the law of the *unscaled* n-fold sum; the comparison
    threshold x*sqrt(n) is rounded outward by one ulp so boundary atoms are
    included deterministically. Infinite x returns the exact limits 0 / 1.
    """
    if math.isnan(x):
        raise ValidationError("x must not be NaN")
    t = x * math.sqrt(n)
    if math.isinf(t):  # covers infinite x and overflowing products alike
        return 1.0 if t > 0 else 0.0
    thr = Fraction(math.nextafter(t, math.inf))
    if isinstance(dist_n, FiniteDist):
        return math.fsum(float(p) for v, p in dist_n.atoms if v <= thr)
    if isinstance(dist_n, LatticeDist):
        # largest k with offset + k*step <= thr
        k = (thr - dist_n.offset) / dist_n.step
        kmax = math.floor(k)
        if kmax < 0:
            return 0.0
        if kmax >= len(dist_n.probs):
            kmax = len(dist_n.probs) - 1
        return float(math.fsum(dist_n.probs[: kmax + 1]))
    raise ValidationError(f"unsupported distribution type {type(dist_n).__name__}")


# ---------------------------------------------------------------------------
# Text and JSON formats
#
# Text: comma-separated value:prob pairs, rationals as p/q or integers,
#   e.g. "-1:1/3,0:1/3,1:1/3".
# JSON: {"atoms": [{"v": "-1", "p": "1/3"}, ...]} with rationals as strings.
# ---------------------------------------------------------------------------


def dist_from_text(text: str) -> FiniteDist:
    """Parse the value:prob text format."""
    pairs = []
    for chunk in text.split(","):
        if ":" not in chunk:
            raise ValidationError(f"expected value:prob, got {chunk!r}")
        v, p = chunk.split(":", 1)
        pairs.append((parse_rational(v), parse_rational(p)))
    return make_dist(pairs)


def dist_to_text(d: FiniteDist) -> str:
    return ",".join(f"{rational_str(v)}:{rational_str(p)}" for v, p in d.atoms)


def dist_to_json_dict(d: FiniteDist) -> dict:
    return {"atoms": [{"v": rational_str(v), "p": rational_str(p)} for v, p in d.atoms]}


def dist_from_json_dict(obj: dict) -> FiniteDist:
    try:
        atoms = [(parse_rational(a["v"]), parse_rational(a["p"])) for a in obj["atoms"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed distribution JSON: {exc}") from exc
    return make_dist(atoms)


def dist_to_json(d: FiniteDist) -> str:
    return json.dumps(dist_to_json_dict(d))


def dist_from_json(text: str) -> FiniteDist:
    return dist_from_json_dict(json.loads(text))
