"""cltlab: exact finite-distribution algebra and central-limit checks.

The package turns classical limit statements into executable, exactly
verifiable computations: decompose any mean-zero simple law into
two-valued components, convolve exactly (or on a float lattice at scale),
tabulate Kolmogorov distances to a from-scratch normal CDF, and transfer
the limit to arbitrary finite-variance sources through an L2 quantizer
with a Chebyshev coupling bound.
"""

from .dist import (
    EXACT_ATOM_BUDGET,
    FiniteDist,
    LatticeDist,
    bernoulli,
    cdf_scaled,
    convolve,
    convolve_power,
    delta,
    dist_from_json,
    dist_from_text,
    dist_to_json,
    dist_to_text,
    make_dist,
    rademacher,
    standardize,
    uniform_atoms,
)
from .errors import (
    BudgetError,
    CltLabError,
    DuplicateValue,
    EtaTooSmallForBudget,
    ExactBudgetExceeded,
    KOutOfRange,
    NonConvergence,
    NonPositiveProb,
    NonZeroMean,
    SumNotOne,
    ValidationError,
    ZeroVariance,
)
from .mixture import (
    Mixture,
    TwoValued,
    decompose,
    mixture_from_json,
    mixture_to_json,
    recompose,
    sample_mixture,
)
from .normal import (
    BinomialSpec,
    ConvergenceRow,
    binom_cdf,
    binom_pmf,
    dml_kolmogorov,
    dml_table,
    phi,
    phi_oracle,
    stirling_ratio,
)
from .pipeline import (
    CltExperiment,
    ThetaFrequencyReport,
    default_grid,
    run_clt_table,
    run_mixture_path_cdf,
    two_valued_sum_law,
    verify_theta_lln,
    verify_variance_accounting,
)
from .quantize import (
    ChebyshevCheckConfig,
    ChebyshevReport,
    ContinuousSource,
    QuantizerResult,
    chebyshev_check,
    coupled_sample,
    get_source,
    quantize,
)
from .rationals import Rational, parse_rational, rational_str, sqrt_rational
from .rng import child_seed, make_rng, mix64

__version__ = "0.1.0"

__all__ = [
    "BinomialSpec",
    "BudgetError",
    "ChebyshevCheckConfig",
    "ChebyshevReport",
    "CltExperiment",
    "CltLabError",
    "ContinuousSource",
    "ConvergenceRow",
    "DuplicateValue",
    "EXACT_ATOM_BUDGET",
    "EtaTooSmallForBudget",
    "ExactBudgetExceeded",
    "FiniteDist",
    "KOutOfRange",
    "LatticeDist",
    "Mixture",
    "NonConvergence",
    "NonPositiveProb",
    "NonZeroMean",
    "QuantizerResult",
    "Rational",
    "SumNotOne",
    "ThetaFrequencyReport",
    "TwoValued",
    "ValidationError",
    "ZeroVariance",
    "bernoulli",
    "binom_cdf",
    "binom_pmf",
    "cdf_scaled",
    "chebyshev_check",
    "child_seed",
    "convolve",
    "convolve_power",
    "coupled_sample",
    "decompose",
    "default_grid",
    "delta",
    "dist_from_json",
    "dist_from_text",
    "dist_to_json",
    "dist_to_text",
    "dml_kolmogorov",
    "dml_table",
    "get_source",
    "make_dist",
    "make_rng",
    "mix64",
    "mixture_from_json",
    "mixture_to_json",
    "parse_rational",
    "phi",
    "phi_oracle",
    "quantize",
    "rademacher",
    "rational_str",
    "recompose",
    "run_clt_table",
    "run_mixture_path_cdf",
    "sample_mixture",
    "standardize",
    "stirling_ratio",
    "two_valued_sum_law",
    "uniform_atoms",
    "verify_theta_lln",
    "verify_variance_accounting",
]
