"""Exception hierarchy shared across the package.

Two families matter to callers: ``ValidationError`` (bad inputs or broken
preconditions, CLI exit code 1) and ``BudgetError`` (a computation refused
because it would exceed a configured resource budget, CLI exit code 2).
"""


class CltLabError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(CltLabError, ValueError):
    """Input violates a documented precondition or invariant."""


class BudgetError(CltLabError):
    """Refusing a computation that would exceed a resource budget."""


class SumNotOne(ValidationError):
    """Probabilities of a finite distribution do not sum to one exactly."""


class NonPositiveProb(ValidationError):
    """An atom carries zero or negative probability."""


class DuplicateValue(ValidationError):
    """Two atoms share the same value."""


class ZeroVariance(ValidationError):
    """Standardization requested for a distribution with no spread."""


class NonZeroMean(ValidationError):
    """Mixture decomposition requires an exactly mean-zero distribution."""


class KOutOfRange(ValidationError):
    """Binomial index k outside 0..n."""


class NonConvergence(CltLabError):
    """Adaptive quadrature exhausted its refinement budget."""


class ExactBudgetExceeded(BudgetError):
    """Exact convolution would exceed the atom-count budget; use lattice-float mode."""


class EtaTooSmallForBudget(BudgetError):
    """Quantizer would need more cells than the configured cap."""
