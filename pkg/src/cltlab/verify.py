"""Self-check battery behind the ``verify`` CLI subcommand.

Each check is a named property of the library, exercised on seeded random
cases at a scale that keeps the whole battery interactive. The test suite
runs the same properties harder; this battery exists so an installed
package can certify itself without the test tree.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .dist import (
    FiniteDist,
    cdf_scaled,
    convolve,
    convolve_power,
    dist_from_json,
    dist_from_text,
    dist_to_json,
    dist_to_text,
    make_dist,
    standardize,
    uniform_atoms,
)
from .mixture import decompose, recompose
from .normal import BinomialSpec, binom_pmf, dml_kolmogorov, phi, phi_oracle, stirling_ratio
from .pipeline import (
    CltExperiment,
    run_clt_table,
    run_mixture_path_cdf,
    two_valued_sum_law,
    verify_theta_lln,
    verify_variance_accounting,
)
from .quantize import ChebyshevCheckConfig, chebyshev_check, get_source, quantize
from .rng import child_seed, make_rng


def random_mean_zero_dist(rng, n_atoms: int, max_den: int = 6, max_num: int = 12):
    """Random simple distribution with exactly zero mean.

    Values are random rationals, probabilities random positive rationals
    normalized exactly; the whole support is then shifted by the exact
    mean, which preserves distinctness and forces mean zero.
    """
    values: set[Fraction] = set()
    while len(values) < n_atoms:
        num = int(rng.integers(-max_num, max_num + 1))
        den = int(rng.integers(1, max_den + 1))
        values.add(Fraction(num, den))
    weights = [int(rng.integers(1, 10)) for _ in range(n_atoms)]
    total = sum(weights)
    atoms = [(v, Fraction(w, total)) for v, w in zip(sorted(values), weights)]
    d = make_dist(atoms)
    mu = d.mean()
    return make_dist([(v - mu, p) for v, p in d.atoms])


def random_standardized_dist(rng, n_atoms: int):
    d = random_mean_zero_dist(rng, n_atoms)
    while d.variance() == 0:
        d = random_mean_zero_dist(rng, n_atoms)
    return standardize(d)


def _check_serialization_roundtrip():
    rng = make_rng(101)
    for _ in range(50):
        d = random_mean_zero_dist(rng, int(rng.integers(2, 7)))
        assert dist_from_text(dist_to_text(d)) == d
        assert dist_from_json(dist_to_json(d)) == d
    return "50 random distributions round-trip bit-exactly (text and JSON)"


def _check_convolve_algebra():
    rng = make_rng(102)
    for _ in range(15):
        a = random_mean_zero_dist(rng, int(rng.integers(2, 5)))
        b = random_mean_zero_dist(rng, int(rng.integers(2, 5)))
        c = random_mean_zero_dist(rng, int(rng.integers(2, 4)))
        assert convolve(a, b) == convolve(b, a)
        assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))
    return "convolution commutative and associative (exact, 15 random triples)"


def _check_moment_additivity():
    rng = make_rng(103)
    for _ in range(20):
        a = random_mean_zero_dist(rng, int(rng.integers(2, 6)))
        b = random_mean_zero_dist(rng, int(rng.integers(2, 6)))
        s = convolve(a, b)
        assert s.mean() == a.mean() + b.mean()
        assert s.variance() == a.variance() + b.variance()
    return "means and variances add exactly under convolution (20 cases)"


def _check_power_matches_repeated():
    rng = make_rng(104)
    for _ in range(10):
        d = random_mean_zero_dist(rng, int(rng.integers(2, 5)))
        n = int(rng.integers(2, 9))
        acc = d
        for _ in range(n - 1):
            acc = convolve(acc, d)
        assert convolve_power(d, n, "exact") == acc
    return "convolve_power(exact) equals repeated convolution (n <= 8)"


def _check_lattice_vs_exact():
    rng = make_rng(105)
    for _ in range(8):
        d = random_mean_zero_dist(rng, int(rng.integers(2, 5)), max_den=4, max_num=6)
        n = int(rng.integers(2, 65))
        exact = convolve_power(d, n, "exact")
        lat = convolve_power(d, n, "lattice-float")
        worst = 0.0
        for v, p in exact.atoms:
            k = int((v - lat.offset) / lat.step)
            worst = max(worst, abs(float(p) - lat.probs[k]))
        assert worst <= 1e-12, f"lattice drift {worst}"
    return "lattice-float matches exact probabilities to 1e-12 (n <= 64)"


def _check_cdf_monotone_limits():
    rng = make_rng(106)
    for _ in range(5):
        d = random_mean_zero_dist(rng, int(rng.integers(2, 5)))
        law = convolve_power(d, 4, "exact")
        grid = [x * 0.25 for x in range(-40, 41)]
        vals = [cdf_scaled(law, 4, x) for x in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert cdf_scaled(law, 4, float("-inf")) == 0.0
        assert cdf_scaled(law, 4, float("inf")) == 1.0
    return "scaled CDF nondecreasing with limits 0 and 1"


def _check_decompose_roundtrip():
    rng = make_rng(107)
    for _ in range(200):
        d = random_mean_zero_dist(rng, int(rng.integers(3, 9)))
        m = decompose(d)
        assert recompose(m) == d
        assert len(m) <= len(d.atoms)
        for _, comp in m.components:
            if not comp.degenerate:
                assert comp.pos * comp.prob_pos == comp.neg * (1 - comp.prob_pos)
        assert verify_variance_accounting(m) == d.variance()
    return "decompose/recompose exact on 200 random mean-zero laws"


def _check_phi_against_oracle():
    for x10 in range(-60, 61, 5):
        x = x10 / 10.0
        assert abs(phi(x) - phi_oracle(x, 1e-14)) <= 1e-12
        assert abs(phi(x) + phi(-x) - 1.0) <= 2e-12
    return "phi within 1e-12 of the quadrature oracle; symmetric to 2e-12"


def _check_binomial_exact():
    for n, p in [(10, Fraction(3, 10)), (25, Fraction(1, 10))]:
        spec = BinomialSpec(n, p)
        assert sum(binom_pmf(spec, k) for k in range(n + 1)) == 1
    return "binomial pmf sums to 1 exactly"


def _check_dml_decreasing():
    vals = [dml_kolmogorov(BinomialSpec(n, Fraction(1, 2))) for n in (16, 64, 256)]
    assert vals[0] > vals[1] > vals[2]
    return f"d_K decreasing along n=16,64,256: {vals[0]:.4f} > {vals[1]:.4f} > {vals[2]:.4f}"


def _check_stirling():
    ratios = [stirling_ratio(2**k) for k in range(11)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert abs(ratios[-1] - 1.0) < 1e-4
    return "Stirling ratio strictly decreasing toward 1 over n=1..1024"


def _check_clt_table():
    dist = standardize(uniform_atoms([-1, 0, 1]))
    grid = tuple(x * 0.1 for x in range(-40, 41))
    rows = run_clt_table(
        CltExperiment(dist=dist, n_list=(4, 16, 64), x_grid=grid, mode="lattice-float")
    )
    stats = [r.statistic for r in rows]
    assert stats[0] > stats[1] > stats[2]
    return f"CLT sup error decreasing: {stats[0]:.4f} > {stats[1]:.4f} > {stats[2]:.4f}"


def _check_theta_lln():
    m = decompose(uniform_atoms([-1, 0, 1]))
    band = 3.0 * math.sqrt(float(Fraction(2, 9)) / 1e5)
    for i in range(5):
        rep = verify_theta_lln(m, 100_000, child_seed(108, i))
        assert rep.max_abs_freq_err <= band, f"seed {i}: {rep.max_abs_freq_err}"
    return f"selector frequencies within the 3-sigma band {band:.4f} (5 seeds)"


def _check_path_sum_law():
    rng = make_rng(109)
    for _ in range(5):
        d = random_mean_zero_dist(rng, 3, max_den=3, max_num=4)
        if d.variance() == 0:
            continue
        m = decompose(d)
        comp = next(c for _, c in m.components if not c.degenerate)
        for k in range(1, 9):
            assert two_valued_sum_law(comp, k) == convolve_power(comp.law(), k, "exact")
    return "grouped two-valued sums match exact convolution powers (k <= 8)"


def _check_conditioning_identity():
    rng = make_rng(110)
    for case in range(5):
        d = random_mean_zero_dist(rng, 3, max_den=3, max_num=4)
        if d.variance() == 0:
            continue
        m = decompose(d)
        n = int(rng.integers(8, 33))
        x = float(rng.uniform(-1.5, 1.5))
        vals = [
            run_mixture_path_cdf(m, n, x, child_seed(1000 + case, i))
            for i in range(100)
        ]
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1)) / math.sqrt(len(vals))
        target = cdf_scaled(convolve_power(d, n, "exact"), n, x)
        assert abs(mean - target) <= 3.0 * se + 1e-12, (
            f"case {case}: |{mean} - {target}| > 3*{se}"
        )
    return "path-averaged conditional CDF matches unconditional (3-sigma, 5 cases)"


def _check_variance_accounting_standardized():
    rng = make_rng(111)
    bound = Fraction(1, 10**40)
    for _ in range(100):
        d = random_standardized_dist(rng, int(rng.integers(3, 7)))
        total = verify_variance_accounting(decompose(d))
        assert total == d.variance()
        assert abs(total - 1) <= bound
    return "variance accounting exact; within 1e-40 of 1 after standardize"


def _check_quantizer():
    q = quantize(get_source("uniform"), 0.01)
    assert q.cell_count == 16
    assert q.eta_achieved <= 0.01
    mses = [mse for _, mse in q.schedule]
    assert all(a >= b for a, b in zip(mses, mses[1:]))
    assert q.simple.mean() == 0
    assert abs(float(q.simple.variance() - 1)) <= 1e-12
    return f"uniform quantizer: K=16, gap {q.eta_achieved:.5f} <= 0.01, exact moments"


def _check_chebyshev():
    src = get_source("uniform")
    for i in range(3):
        cfg = ChebyshevCheckConfig(
            delta=0.5, epsilon=0.04, n=100, samples=2000, seed=child_seed(112, i)
        )
        rep = chebyshev_check(src, cfg)
        assert rep.passed, f"seed {i}: empirical {rep.empirical} > bound + band"
    return "coupling bound holds with MC slack (uniform source, 3 seeds)"


CHECKS = [
    ("dist-serialization-roundtrip", _check_serialization_roundtrip),
    ("convolve-commutative-associative", _check_convolve_algebra),
    ("moment-additivity", _check_moment_additivity),
    ("convolve-power-matches-repeated", _check_power_matches_repeated),
    ("lattice-vs-exact-1e-12", _check_lattice_vs_exact),
    ("cdf-scaled-monotone-limits", _check_cdf_monotone_limits),
    ("decompose-recompose-exact", _check_decompose_roundtrip),
    ("phi-vs-oracle-and-symmetry", _check_phi_against_oracle),
    ("binomial-normalization-exact", _check_binomial_exact),
    ("dml-kolmogorov-decreasing", _check_dml_decreasing),
    ("stirling-decreasing-to-one", _check_stirling),
    ("clt-table-decreasing", _check_clt_table),
    ("theta-lln-band", _check_theta_lln),
    ("grouped-sum-law-vs-convolution", _check_path_sum_law),
    ("conditioning-identity-3sigma", _check_conditioning_identity),
    ("variance-accounting-standardized", _check_variance_accounting_standardized),
    ("quantizer-uniform-eta", _check_quantizer),
    ("chebyshev-coupling-bound", _check_chebyshev),
]


def run_battery(out=print) -> bool:
    """Run every named property; print one PASS/FAIL line each."""
    all_ok = True
    for name, fn in CHECKS:
        try:
            detail = fn()
            out(f"PASS {name}: {detail}")
        except AssertionError as exc:
            all_ok = False
            out(f"FAIL {name}: {exc}")
    return all_ok
