import math

import numpy as np
import pytest
from scipy import stats as sps

from unicellular import stats


def test_tv_distance():
    assert stats.tv_distance([0.2, 0.8], [0.2, 0.8]) == 0.0
    assert stats.tv_distance([1, 0], [0, 1]) == 1.0


def test_compare_pmf():
    p = {"1": 0.5, "2": 0.5}
    assert stats.compare_pmf(p, p) == {"max_abs_dev": 0.0, "tv_distance": 0.0}
    out = stats.compare_pmf({"1": 1.0}, {"2": 1.0})
    assert out["tv_distance"] == 1.0 and out["max_abs_dev"] == 1.0


def test_constant_samples_flagged():
    fit = stats.compare_to_poisson([4] * 50, 4.0)
    assert "degenerate" in fit.flags
    assert fit.variance == 0.0 and fit.z_score == 0.0


@pytest.mark.parametrize("lam", [0.7, 3.5, 19.0, 114.0])
def test_poisson_self_consistency(lam):
    x = np.random.default_rng(int(lam * 10)).poisson(lam, 20_000)
    fit = stats.compare_to_poisson(x, lam)
    assert fit.chi2_pvalue > 1e-3
    assert abs(fit.z_score) < 4
    assert 0.9 < fit.dispersion < 1.1
    assert fit.flags == ()
    assert fit.tv_distance < 0.05


def test_overdispersion_flagged():
    rng = np.random.default_rng(0)
    x = rng.negative_binomial(2, 2 / (2 + 10.0), 5000)
    fit = stats.compare_to_poisson(x, 10.0)
    assert "overdispersed" in fit.flags
    assert fit.chi2_pvalue < 1e-6


def test_poisson_tv_includes_tail():
    # all samples far out: empirical mass sits where Poisson has ~none
    fit = stats.compare_to_poisson([40] * 10, 1.0)
    assert fit.tv_distance == pytest.approx(1.0, abs=1e-12)


def test_chi_square_merges_small_bins():
    stat, dof, p = stats.chi_square([1, 1, 1, 97], [1, 1, 1, 97])
    assert stat == 0.0 and p == 1.0
    assert dof == 0 or dof >= 1
    ref = sps.chisquare([30, 70], [50, 50])
    s, d, pv = stats.chi_square([30, 70], [50, 50])
    assert math.isclose(s, ref.statistic) and d == 1 and math.isclose(pv, ref.pvalue)


def test_input_errors():
    with pytest.raises(ValueError):
        stats.compare_to_poisson([], 1.0)
    with pytest.raises(ValueError):
        stats.compare_to_poisson([1, -1], 1.0)
    with pytest.raises(ValueError):
        stats.compare_to_poisson([1], 0.0)


def test_pearson():
    assert stats.pearson_r([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert stats.pearson_r([1, 1, 1], [1, 2, 3]) == 0.0
