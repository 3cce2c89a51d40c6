"""End-to-end numerical checks of the central limit theorem for simple laws.

Four instruments:

* ``run_clt_table`` - sup-over-grid distance between the CDF of the scaled
  n-fold sum (exact or lattice convolution) and the normal CDF.
* ``verify_variance_accounting`` - the exact identity sum_i w_i E[Y_i^2] =
  variance of the recomposed law, the coefficient that collapses to 1 for
  standardized inputs.
* ``verify_theta_lln`` - empirical selector frequencies against the
  mixture weights.
* ``run_mixture_path_cdf`` - the conditional CDF of the scaled sum given
  one sampled selector path; its average over paths equals the
  unconditional CDF, and the conditional law is computed exactly by
  grouping the path into per-component binomial-type sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dist import (
    EXACT_ATOM_BUDGET,
    FiniteDist,
    cdf_scaled,
    convolve_power,
    delta,
    make_dist,
)
from .errors import ExactBudgetExceeded, ValidationError
from .mixture import Mixture, TwoValued
from .normal import ConvergenceRow, phi
from .rationals import fraction_gcd
from .rng import make_rng

# Standardization stores sigma as a >= 50-digit rational approximant, so a
# "variance one" distribution is exact only to this residual.
STANDARDIZED_VAR_TOL = Fraction(1, 10**40)


def default_grid(lo: float = -4.0, hi: float = 4.0, step: float = 0.05) -> list[float]:
    """Evaluation grid for CLT tables; the default is 161 points on [-4, 4]."""
    if step <= 0:
        raise ValidationError(f"grid step must be positive, got {step}")
    count = int(round((hi - lo) / step))
    return [lo + k * step for k in range(count + 1)]


@dataclass(frozen=True)
class CltExperiment:
    """A standardized base law, the n values to tabulate, and the x grid."""

    dist: FiniteDist
    n_list: tuple[int, ...]
    x_grid: tuple[float, ...]
    mode: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(self.n_list))
        object.__setattr__(self, "x_grid", tuple(self.x_grid))
        if self.dist.mean() != 0:
            raise ValidationError(f"experiment needs mean 0, got {self.dist.mean()}")
        if abs(self.dist.variance() - 1) > STANDARDIZED_VAR_TOL:
            raise ValidationError("experiment needs variance 1 (standardize first)")
        if not self.n_list:
            raise ValidationError("n_list must be nonempty")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValidationError("n_list must be strictly increasing")
        if self.n_list[0] < 1:
            raise ValidationError("n values must be positive")


def run_clt_table(e: CltExperiment) -> list[ConvergenceRow]:
    """sup over the grid of |CDF of S_n - phi| for each n in the experiment."""
    phis = [phi(x) for x in e.x_grid]
    rows = []
    for n in e.n_list:
        law_n = convolve_power(e.dist, n, e.mode)
        worst = max(
            abs(cdf_scaled(law_n, n, x) - target) for x, target in zip(e.x_grid, phis)
        )
        rows.append(ConvergenceRow(n=n, statistic=worst, label="sup_abs_err"))
    return rows


def verify_variance_accounting(m: Mixture) -> Fraction:
    """Exact sum of weight * second moment over the components.

    Always equals the variance of recompose(m) exactly; for a mixture
    decomposed from a standardized law it sits within 1e-40 of 1.
    """
    return sum((w * c.second_moment() for w, c in m.components), Fraction(0))


@dataclass(frozen=True)
class ThetaFrequencyReport:
    """Empirical selector frequencies for one seeded run of n draws."""

    m: int
    counts: tuple[int, ...]
    max_abs_freq_err: float

    def __post_init__(self):
        if len(self.counts) != self.m:
            raise ValidationError("counts length must equal component count")


def _theta_counts(m: Mixture, n: int, rng) -> np.ndarray:
    cum = np.cumsum([float(w) for w in m.weights])
    cum[-1] = 1.0  # guard against float shortfall in the last bin
    draws = np.searchsorted(cum, rng.random(n), side="right")
    return np.bincount(draws, minlength=len(m.components))


def verify_theta_lln(m: Mixture, n: int, seed: int) -> ThetaFrequencyReport:
    """Draw n selectors i.i.d. by the weights; report frequency deviations."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    counts = _theta_counts(m, n, make_rng(seed))
    err = max(
        abs(c / n - float(w)) for c, w in zip(counts.tolist(), m.weights)
    )
    return ThetaFrequencyReport(
        m=len(m.components), counts=tuple(int(c) for c in counts), max_abs_freq_err=err
    )


def two_valued_sum_law(c: TwoValued, k: int) -> FiniteDist:
    """Exact law of the sum of k independent draws from a two-valued law.

    Support is j*pos - (k-j)*neg for j = 0..k with binomial weights; the
    values are strictly increasing in j so no merging is needed.
    """
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    if k == 0 or c.degenerate:
        return delta(0)
    p = c.prob_pos
    q = 1 - p
    atoms = []
    weight = q**k  # C(k, j) p^j q^(k-j), updated iteratively
    coeff = 1
    for j in range(k + 1):
        atoms.append((j * c.pos - (k - j) * c.neg, Fraction(coeff) * weight))
        if j < k:
            coeff = coeff * (k - j) // (j + 1)
            weight = weight / q * p
    return make_dist(atoms)


def _binomial_numerators(c: TwoValued, k: int) -> tuple[list[int], int]:
    """Integer numerators of C(k,j) p^j q^(k-j) over denominator cden^k."""
    pn, cden = c.prob_pos.numerator, c.prob_pos.denominator
    qn = cden - pn
    t = qn**k
    coeff = 1
    nums = []
    for j in range(k + 1):
        nums.append(coeff * t)
        if j < k:
            coeff = coeff * (k - j) // (j + 1)
            t = t // qn * pn
    return nums, cden**k


def run_mixture_path_cdf(m: Mixture, n: int, x: float, seed: int) -> float:
    """Conditional CDF of S_n at x given one seeded selector path.

    Draws theta_1..theta_n by the weights and groups the path by
    component; each group's sum has a closed-form binomial-type law, and
    the exact law of the whole path-sum is their convolution. The
    convolution runs on the components' common value lattice with integer
    probability numerators over one shared denominator, so the returned
    P(sum <= x*sqrt(n)) is the exact rational CDF rounded once to float.
    One sample of the inner conditional probability whose expectation over
    paths is the unconditional CDF.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if math.isnan(x):
        raise ValidationError("x must not be NaN")
    counts = _theta_counts(m, n, make_rng(seed))
    comps = [
        (comp, int(k))
        for (w, comp), k in zip(m.components, counts)
        if k > 0 and not comp.degenerate
    ]
    t = x * math.sqrt(n)
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    thr = Fraction(math.nextafter(t, math.inf))

    if not comps:  # every drawn component degenerate: the sum is exactly 0
        return 1.0 if thr >= 0 else 0.0

    # common lattice: component j contributes -k*neg + j*(pos+neg)
    spans = [c.pos + c.neg for c, _ in comps]
    g = spans[0]
    for s in spans[1:]:
        g = fraction_gcd(g, s)
    strides = [int(s / g) for s in spans]
    offset = sum((-k * c.neg for c, k in comps), Fraction(0))
    length = sum(k * r for (_, k), r in zip(comps, strides)) + 1
    if length > EXACT_ATOM_BUDGET:
        raise ExactBudgetExceeded(
            f"grouped path law for n={n} needs {length} lattice points, "
            f"budget {EXACT_ATOM_BUDGET}"
        )

    # shortest groups first keeps the running array small early on
    order = sorted(range(len(comps)), key=lambda i: comps[i][1] * strides[i])
    acc = [1]
    den = 1
    for i in order:
        comp, k = comps[i]
        r = strides[i]
        nums, d = _binomial_numerators(comp, k)
        new = [0] * (len(acc) + k * r)
        for j, nj in enumerate(nums):
            base = j * r
            for idx, a in enumerate(acc):
                if a:
                    new[base + idx] += a * nj
        acc = new
        den *= d

    kmax = math.floor((thr - offset) / g)
    if kmax < 0:
        return 0.0
    if kmax >= len(acc):
        return 1.0
    return float(Fraction(sum(acc[: kmax + 1]), den))
