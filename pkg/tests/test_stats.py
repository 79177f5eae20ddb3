import math

import numpy as np
import pytest

from dpplab import stats


class TestKsTwoSample:
    def test_hand_case(self):
        # F1 jumps at 1,2; F2 jumps at 2,3; max gap 1/2 just left of 2
        d = stats.ks_two_sample([1.0, 2.0], [2.0, 3.0])
        assert d == pytest.approx(0.5)

    def test_identical_samples(self):
        x = np.array([1.0, 2.0, 2.0, 5.0])
        assert stats.ks_two_sample(x, x) == pytest.approx(0.0)

    def test_ties_handled_exactly(self):
        d = stats.ks_two_sample([1.0, 1.0], [1.0, 2.0])
        # F1(1)=1, F2(1)=1/2; F1(2)=1, F2(2)=1
        assert d == pytest.approx(0.5)

    def test_matches_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(0)
        for _ in range(10):
            a = rng.normal(size=60)
            b = rng.normal(0.3, 1.1, size=45)
            ours = stats.ks_two_sample(a, b)
            ref = scipy_stats.ks_2samp(a, b, method="asymp").statistic
            assert ours == pytest.approx(ref, abs=1e-12)

    def test_critical_value(self):
        c = stats.ks_two_sample_critical(100, 100, 0.05)
        expect = math.sqrt(-math.log(0.025) / 2) * math.sqrt(200 / (100 * 100))
        assert c == pytest.approx(expect)


class TestKsOneSample:
    def test_uniform_exact(self):
        x = np.array([0.1, 0.5, 0.9])
        d = stats.ks_one_sample(x, lambda t: np.clip(t, 0, 1))
        # steps at 1/3, 2/3, 1; D+ = max(i/n - F(x_i)) = 1/3 - 0.1
        assert d == pytest.approx(1 / 3 - 0.1)

    def test_matches_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(1)
        x = rng.exponential(size=200)
        cdf = lambda t: 1 - np.exp(-np.asarray(t, dtype=float))
        ours = stats.ks_one_sample(x, cdf)
        ref = scipy_stats.kstest(x, cdf).statistic
        assert ours == pytest.approx(ref, abs=1e-12)


class TestDkw:
    def test_formula(self):
        eps = stats.dkw_epsilon(1000, 0.05)
        assert eps == pytest.approx(math.sqrt(math.log(2 / 0.05) / 2000))

    def test_coverage_is_conservative(self):
        rng = np.random.default_rng(2)
        n, delta = 400, 0.1
        eps = stats.dkw_epsilon(n, delta)
        misses = 0
        for _ in range(200):
            x = np.sort(rng.uniform(size=n))
            dev = max(
                np.max(np.arange(1, n + 1) / n - x),
                np.max(x - np.arange(n) / n),
            )
            misses += dev > eps
        assert misses / 200 <= delta + 0.05


class TestTotalVariation:
    def test_dicts(self):
        tv = stats.total_variation({"a": 0.5, "b": 0.5}, {"a": 0.25, "c": 0.75})
        assert tv == pytest.approx(0.75)

    def test_arrays(self):
        tv = stats.total_variation([0.5, 0.5], [1.0, 0.0])
        assert tv == pytest.approx(0.5)

    def test_identical(self):
        assert stats.total_variation({"x": 1.0}, {"x": 1.0}) == 0.0


class TestChiSquare:
    def test_basic(self):
        v = stats.chi_square_statistic([12, 8], [10, 10])
        assert v == pytest.approx(0.4 + 0.4)

    def test_zero_when_equal(self):
        assert stats.chi_square_statistic([5, 5], [5.0, 5.0]) == pytest.approx(0.0)
