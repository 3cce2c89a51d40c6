"""Decompose a mean-zero finite distribution into two-valued components.

Any simple mean-zero distribution is distributionally a finite mixture of
mean-zero two-valued distributions. The construction below is exact: pick
the smallest positive atom value a and smallest-magnitude negative value
-b, pair as much mass as balances exactly, peel that off as one component,
and repeat on the residual. A zero atom, when present, is peeled first as
a degenerate component.

Everything here is exact rational arithmetic; there is no float path.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .dist import FiniteDist, make_dist
from .errors import NonZeroMean, ValidationError
from .rationals import parse_rational, rational_str


@dataclass(frozen=True)
class TwoValued:
    """Mean-zero distribution on {pos, -neg}, mass prob_pos at +pos.

    The degenerate case pos = neg = 0 is the point mass at 0 (prob_pos is
    stored as 1). Non-degenerate components satisfy the exact balance
    pos * prob_pos = neg * (1 - prob_pos).
    """

    pos: Fraction
    neg: Fraction
    prob_pos: Fraction

    def __post_init__(self):
        if self.pos < 0 or self.neg < 0:
            raise ValidationError("pos and neg must be nonnegative magnitudes")
        if self.degenerate:
            if self.prob_pos != 1:
                raise ValidationError("degenerate component must carry prob_pos = 1")
            return
        if not (self.pos > 0 and self.neg > 0 and 0 < self.prob_pos < 1):
            raise ValidationError(
                f"two-valued component needs pos, neg > 0 and prob_pos in (0,1): "
                f"({self.pos}, {self.neg}, {self.prob_pos})"
            )
        if self.pos * self.prob_pos != self.neg * (1 - self.prob_pos):
            raise ValidationError(
                f"component ({self.pos}, -{self.neg}, {self.prob_pos}) is not mean-zero"
            )

    @property
    def degenerate(self) -> bool:
        return self.pos == 0 and self.neg == 0

    @classmethod
    def zero(cls) -> "TwoValued":
        return cls(Fraction(0), Fraction(0), Fraction(1))

    @classmethod
    def balanced(cls, pos, neg) -> "TwoValued":
        """The unique mean-zero law on {pos, -neg}: prob_pos = neg/(pos+neg)."""
        pos, neg = Fraction(pos), Fraction(neg)
        return cls(pos, neg, neg / (pos + neg))

    def second_moment(self) -> Fraction:
        if self.degenerate:
            return Fraction(0)
        return self.pos**2 * self.prob_pos + self.neg**2 * (1 - self.prob_pos)

    def law(self) -> FiniteDist:
        if self.degenerate:
            return make_dist([(0, Fraction(1))])
        return make_dist([(self.pos, self.prob_pos), (-self.neg, 1 - self.prob_pos)])


@dataclass(frozen=True)
class Mixture:
    """Weighted two-valued components; weights positive, summing to one."""

    components: tuple[tuple[Fraction, TwoValued], ...]

    def __post_init__(self):
        total = Fraction(0)
        for w, _ in self.components:
            if w <= 0:
                raise ValidationError(f"component weight {w} must be positive")
            total += w
        if total != 1:
            raise ValidationError(f"component weights sum to {total}, expected 1")

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(w for w, _ in self.components)

    def __len__(self) -> int:
        return len(self.components)


def decompose(d: FiniteDist) -> Mixture:
    """Write d exactly as a mixture of mean-zero two-valued components.

    Precondition: mean(d) = 0 exactly (NonZeroMean otherwise). The result
    has at most as many components as d has atoms, and recomposes to d
    with exact equality.
    """
    mu = d.mean()
    if mu != 0:
        raise NonZeroMean(f"mean is {mu}, expected exactly 0")

    # Residual kept as an unnormalized sub-measure of the original; each
    # emitted weight is mass on the original scale, so no renormalization
    # error can accumulate.
    mass = {v: p for v, p in d.atoms}
    comps: list[tuple[Fraction, TwoValued]] = []

    if Fraction(0) in mass:
        comps.append((mass.pop(Fraction(0)), TwoValued.zero()))

    while mass:
        a = min(v for v in mass if v > 0)
        b = -max(v for v in mass if v < 0)
        ma, mb = mass[a], mass[-b]
        if a * ma <= b * mb:
            # component absorbs all of atom a plus the balancing slice of -b
            q = a * ma / b
            w = ma + q
            comps.append((w, TwoValued(a, b, ma / w)))
            del mass[a]
            if mb == q:
                del mass[-b]
            else:
                mass[-b] = mb - q
        else:
            q = b * mb / a
            w = mb + q
            comps.append((w, TwoValued(a, b, q / w)))
            del mass[-b]
            mass[a] = ma - q
    return Mixture(tuple(comps))


def recompose(m: Mixture) -> FiniteDist:
    """Exact law of the mixture: merge the weighted component atoms."""
    acc: dict[Fraction, Fraction] = {}
    for w, c in m.components:
        for v, p in c.law().atoms:
            acc[v] = acc.get(v, Fraction(0)) + w * p
    return make_dist(acc.items())


def sample_mixture(m: Mixture, rng) -> Fraction:
    """One draw: pick a component by weight, then a value from it.

    ``rng`` needs a ``random()`` method returning floats in [0, 1); the
    distribution of the draw equals recompose(m) (up to float rounding of
    the weights, far below any test band).
    """
    cum = []
    total = 0.0
    for w in m.weights:
        total += float(w)
        cum.append(total)
    i = bisect_right(cum, rng.random())
    if i >= len(m.components):
        i = len(m.components) - 1
    comp = m.components[i][1]
    if comp.degenerate:
        return Fraction(0)
    if rng.random() < float(comp.prob_pos):
        return comp.pos
    return -comp.neg


# ---------------------------------------------------------------------------
# JSON form: {"components": [{"w": "2/3", "a": "1", "b": "1", "p_pos": "1/2"},
# {"w": "1/3", "zero": true}]} with rationals as strings.
# ---------------------------------------------------------------------------


def mixture_to_json_dict(m: Mixture) -> dict:
    comps = []
    for w, c in m.components:
        if c.degenerate:
            comps.append({"w": rational_str(w), "zero": True})
        else:
            comps.append(
                {
                    "w": rational_str(w),
                    "a": rational_str(c.pos),
                    "b": rational_str(c.neg),
                    "p_pos": rational_str(c.prob_pos),
                }
            )
    return {"components": comps}


def mixture_from_json_dict(obj: dict) -> Mixture:
    comps = []
    try:
        for entry in obj["components"]:
            w = parse_rational(entry["w"])
            if entry.get("zero"):
                comps.append((w, TwoValued.zero()))
            else:
                comps.append(
                    (
                        w,
                        TwoValued(
                            parse_rational(entry["a"]),
                            parse_rational(entry["b"]),
                            parse_rational(entry["p_pos"]),
                        ),
                    )
                )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed mixture JSON: {exc}") from exc
    return Mixture(tuple(comps))


def mixture_to_json(m: Mixture) -> str:
    return json.dumps(mixture_to_json_dict(m))


def mixture_from_json(text: str) -> Mixture:
    return mixture_from_json_dict(json.loads(text))
