import itertools
import math

import numpy as np
import pytest

from dpplab import derive_substream, dpp, ensembles
from dpplab.errors import ArgumentError, DimensionError, SupportError


class TestSpecValidation:
    def test_wishart_requires_ordered_positive(self):
        with pytest.raises(ArgumentError):
            ensembles.Wishart(0, 3)
        with pytest.raises(ArgumentError):
            ensembles.Wishart(4, 3)
        with pytest.raises(ArgumentError):
            ensembles.Wishart(2.0, 3)

    def test_jacobi_requires_enough_columns(self):
        with pytest.raises(ArgumentError):
            ensembles.Jacobi(2, 4, 3)
        with pytest.raises(ArgumentError):
            ensembles.Jacobi(3, 3, 0)

    def test_meixner_requires_q_in_unit_interval(self):
        with pytest.raises(ArgumentError):
            ensembles.Meixner(2, 3, 1.0)
        with pytest.raises(ArgumentError):
            ensembles.Meixner(2, 3, 0.0)
        with pytest.raises(ArgumentError):
            ensembles.Meixner(3, 2, 0.5)

    def test_sizes(self):
        assert ensembles.Wishart(2, 5).size == 2
        assert ensembles.Jacobi(4, 4, 3).size == 3
        assert ensembles.Meixner(2, 4, 0.3).size == 2


class TestEigenSample:
    def test_validates_length_and_order(self):
        spec = ensembles.Wishart(2, 2)
        with pytest.raises(DimensionError):
            ensembles.EigenSample(spec, [1.0])
        with pytest.raises(ArgumentError):
            ensembles.EigenSample(spec, [2.0, 1.0])
        with pytest.raises(SupportError):
            ensembles.EigenSample(spec, [-1.0, 2.0])

    def test_jacobi_support(self):
        spec = ensembles.Jacobi(2, 2, 2)
        with pytest.raises(SupportError):
            ensembles.EigenSample(spec, [0.5, 1.5])

    def test_meixner_support(self):
        spec = ensembles.Meixner(2, 2, 0.5)
        with pytest.raises(SupportError):
            ensembles.EigenSample(spec, [0.5, 2.0])
        with pytest.raises(SupportError):
            ensembles.EigenSample(spec, [2.0, 2.0])
        sample = ensembles.EigenSample(spec, [0.0, 3.0])
        assert sample.values.tolist() == [0.0, 3.0]


class TestLogNormalizer:
    def test_wishart_closed_forms(self):
        assert ensembles.log_normalizer(ensembles.Wishart(1, 3)) == pytest.approx(
            math.log(2.0)
        )
        assert ensembles.log_normalizer(ensembles.Wishart(2, 2)) == pytest.approx(
            math.log(2.0)
        )
        assert ensembles.log_normalizer(ensembles.Wishart(2, 4)) == pytest.approx(
            math.log(24.0)
        )

    def test_jacobi_closed_forms(self):
        assert ensembles.log_normalizer(ensembles.Jacobi(2, 2, 2)) == pytest.approx(
            math.log(1.0 / 6.0)
        )
        assert ensembles.log_normalizer(ensembles.Jacobi(3, 2, 2)) == pytest.approx(
            math.log(1.0 / 36.0)
        )

    def test_wishart_against_quadrature(self):
        # integrate the unnormalized two-particle density over the orthant
        spec = ensembles.Wishart(2, 4)
        nodes, weights = np.polynomial.laguerre.laggauss(40)
        total = 0.0
        for i, x in enumerate(nodes):
            for j, y in enumerate(nodes):
                total += weights[i] * weights[j] * (x - y) ** 2 * x**2 * y**2
        assert math.log(total) == pytest.approx(
            ensembles.log_normalizer(spec), abs=1e-8
        )

    def test_jacobi_against_quadrature(self):
        spec = ensembles.Jacobi(3, 2, 2)
        nodes, weights = np.polynomial.legendre.leggauss(40)
        x = (nodes + 1.0) / 2.0
        w = weights / 2.0
        total = 0.0
        for i in range(40):
            for j in range(40):
                total += w[i] * w[j] * (x[i] - x[j]) ** 2 * x[i] * x[j]
        assert math.log(total) == pytest.approx(
            ensembles.log_normalizer(spec), abs=1e-10
        )

    def test_meixner_rank_one_normalizer(self):
        # single particle: sum of C(h+n-1, h) q^h is (1-q)^(-n)
        spec = ensembles.Meixner(1, 3, 0.5)
        assert ensembles.log_normalizer(spec) == pytest.approx(-3 * math.log(0.5))
        assert ensembles.log_normalizer(ensembles.Meixner(2, 3, 0.5)) is None


class TestLogDensity:
    def test_wishart_formula(self):
        spec = ensembles.Wishart(2, 4)
        vals = [0.7, 2.1]
        logp, logz = ensembles.log_density(spec, vals)
        expect = (
            2 * math.log(abs(2.1 - 0.7))
            + 2 * math.log(0.7)
            + 2 * math.log(2.1)
            - 0.7
            - 2.1
        )
        assert logp == pytest.approx(expect, abs=1e-12)
        assert logz == pytest.approx(math.log(24.0))

    def test_symmetric_in_entries(self):
        spec = ensembles.Jacobi(4, 4, 3)
        vals = [0.2, 0.9, 0.5]
        a, _ = ensembles.log_density(spec, vals)
        b, _ = ensembles.log_density(spec, list(reversed(vals)))
        assert a == pytest.approx(b, abs=1e-12)

    def test_jacobi_formula(self):
        spec = ensembles.Jacobi(3, 4, 2)
        vals = [0.3, 0.6]
        logp, _ = ensembles.log_density(spec, vals)
        expect = 2 * math.log(0.3) + sum(
            (3 - 2) * math.log(v) + (4 - 2) * math.log(1 - v) for v in vals
        )
        assert logp == pytest.approx(expect, abs=1e-12)

    def test_meixner_formula(self):
        spec = ensembles.Meixner(2, 3, 0.4)
        logp, logz = ensembles.log_density(spec, [1, 4])
        expect = (
            2 * math.log(3.0)
            + math.log(math.comb(1 + 1, 1))
            + math.log(math.comb(4 + 1, 4))
            + 5 * math.log(0.4)
        )
        assert logp == pytest.approx(expect, abs=1e-12)
        assert logz is None

    def test_coincident_continuous_values(self):
        logp, _ = ensembles.log_density(ensembles.Wishart(2, 2), [1.0, 1.0])
        assert logp == -math.inf

    def test_meixner_coincident_rejected(self):
        with pytest.raises(SupportError):
            ensembles.log_density(ensembles.Meixner(2, 2, 0.5), [1, 1])

    def test_off_support(self):
        with pytest.raises(SupportError):
            ensembles.log_density(ensembles.Wishart(2, 2), [-0.5, 1.0])
        with pytest.raises(SupportError):
            ensembles.log_density(ensembles.Jacobi(2, 2, 2), [0.5, 1.2])
        with pytest.raises(SupportError):
            ensembles.log_density(ensembles.Meixner(2, 2, 0.5), [0.5, 1.0])

    def test_wrong_length(self):
        with pytest.raises(DimensionError):
            ensembles.log_density(ensembles.Wishart(2, 2), [1.0])


class TestTruncation:
    def test_frozen_cutoffs(self):
        assert ensembles.meixner_truncate(ensembles.Meixner(2, 2, 0.5), 1e-10) == 42
        assert ensembles.meixner_truncate(ensembles.Meixner(2, 3, 0.4), 1e-10) == 34
        assert ensembles.meixner_truncate(ensembles.Meixner(1, 3, 0.5), 1e-10) == 41

    def test_defining_tail_criterion(self):
        spec = ensembles.Meixner(2, 2, 0.5)
        tol = 1e-10
        cut = ensembles.meixner_truncate(spec, tol)

        def h(x):
            return (
                x ** (2 * (spec.m - 1))
                * math.comb(x + spec.n - spec.m, x)
                * spec.q**x
            )

        grid = list(range(0, cut + 400))
        total = sum(h(x) for x in grid)
        tail_at = sum(h(x) for x in grid if x > cut)
        tail_before = sum(h(x) for x in grid if x > cut - 1)
        assert tail_at <= tol * total
        assert tail_before > tol * (total - h(cut))

    def test_tol_monotone(self):
        spec = ensembles.Meixner(2, 4, 0.6)
        assert ensembles.meixner_truncate(spec, 1e-12) >= ensembles.meixner_truncate(
            spec, 1e-6
        )


class TestFrames:
    def test_wishart_zero_gap_matches_laguerre(self):
        from dpplab.dominance import laguerre_values

        frame = ensembles.projection_frame(ensembles.Wishart(4, 4))
        pts = np.asarray(frame.space.points)
        classical = laguerre_values(4, pts)
        for k in range(4):
            sign = (-1.0) ** k
            assert np.allclose(frame.rows[k], sign * classical[k], atol=1e-8)

    def test_methods_agree(self):
        for spec in (ensembles.Wishart(3, 5), ensembles.Meixner(3, 4, 0.4)):
            a = ensembles.projection_frame(spec, method="recurrence")
            b = ensembles.projection_frame(spec, method="monomials")
            assert np.allclose(a.kernel().matrix, b.kernel().matrix, atol=1e-8)

    def test_frame_is_orthonormal(self):
        frame = ensembles.projection_frame(ensembles.Meixner(2, 3, 0.4))
        scaled = frame.scaled_rows()
        gram = scaled @ scaled.conj().T
        assert np.allclose(gram, np.eye(2), atol=1e-10)

    def test_odd_gap_rejected(self):
        with pytest.raises(ArgumentError):
            ensembles.projection_frame(ensembles.Wishart(2, 3))

    def test_jacobi_frame_rejected(self):
        with pytest.raises(ArgumentError):
            ensembles.projection_frame(ensembles.Jacobi(2, 2, 2))

    def test_unknown_method_rejected(self):
        with pytest.raises(ArgumentError):
            ensembles.projection_frame(ensembles.Wishart(2, 2), method="qr")

    def test_meixner_law_matches_pmf(self):
        """The frame's exact law reproduces the ensemble pmf pointwise."""
        spec = ensembles.Meixner(2, 3, 0.4)
        frame = ensembles.projection_frame(spec)
        law = dpp.projection_exact_law(frame, cap=2000)
        cut = int(np.max(frame.space.points))
        masses = {}
        for pair in itertools.combinations(range(cut + 1), 2):
            logp, _ = ensembles.log_density(spec, list(pair))
            masses[pair] = math.exp(logp)
        z = sum(masses.values())
        worst = 0.0
        for pair, mass in masses.items():
            key = (float(pair[0]), float(pair[1]))
            worst = max(worst, abs(mass / z - law.probability(key)))
        assert worst < 1e-8

    def test_custom_support_space(self):
        space = ensembles.meixner_space(ensembles.Meixner(2, 2, 0.5), cutoff=60)
        frame = ensembles.projection_frame(ensembles.Meixner(2, 2, 0.5), support=space)
        assert frame.space.size == 61


class TestSampling:
    def test_wishart_1_1_is_standard_exponential(self):
        spec = ensembles.Wishart(1, 1)
        draws = ensembles.sample_eigs_batch(spec, 4000, derive_substream(11, 0))
        assert draws.shape == (4000, 1)
        assert abs(draws.mean() - 1.0) < 0.06
        assert np.all(draws >= 0)

    def test_wishart_trace_mean(self):
        # E tr(A A*) equals m n for standard complex entries
        spec = ensembles.Wishart(2, 3)
        draws = ensembles.sample_eigs_batch(spec, 4000, derive_substream(12, 0))
        assert abs(draws.sum(axis=1).mean() - 6.0) < 0.15

    def test_wishart_rows_ascending(self):
        draws = ensembles.sample_eigs_batch(
            ensembles.Wishart(3, 4), 200, derive_substream(13, 0)
        )
        assert np.all(np.diff(draws, axis=1) >= 0)

    def test_jacobi_single_particle_beta_mean(self):
        # Jacobi with n = 1 is Beta(n1, n2); its mean is n1/(n1+n2)
        spec = ensembles.Jacobi(2, 3, 1)
        draws = ensembles.sample_eigs_batch(spec, 4000, derive_substream(14, 0))
        assert np.all(draws >= 0) and np.all(draws <= 1)
        assert abs(draws.mean() - 0.4) < 0.02

    def test_jacobi_complementary_symmetry(self):
        # swapping n1 and n2 mirrors the spectrum around 1/2
        a = ensembles.sample_eigs_batch(
            ensembles.Jacobi(4, 2, 2), 4000, derive_substream(15, 0)
        )
        b = ensembles.sample_eigs_batch(
            ensembles.Jacobi(2, 4, 2), 4000, derive_substream(15, 1)
        )
        assert abs(a.mean() - (1.0 - b.mean())) < 0.02

    def test_meixner_single_particle_negative_binomial_mean(self):
        spec = ensembles.Meixner(1, 3, 0.5)
        draws = ensembles.sample_eigs_batch(spec, 4000, derive_substream(16, 0))
        assert abs(draws.mean() - 3.0) < 0.15
        assert np.all(draws == np.rint(draws))

    def test_meixner_particles_distinct(self):
        draws = ensembles.sample_eigs_batch(
            ensembles.Meixner(2, 2, 0.5), 500, derive_substream(17, 0)
        )
        assert np.all(np.diff(draws, axis=1) >= 1)

    def test_meixner_law_agreement(self):
        """Sampled pair frequencies track the exact projection law."""
        spec = ensembles.Meixner(2, 2, 0.5)
        frame = ensembles.projection_frame(spec)
        law = dpp.projection_exact_law(frame, cap=2000)
        draws = ensembles.sample_eigs_batch(spec, 8000, derive_substream(18, 0))
        counts = {}
        for row in draws:
            key = (float(row[0]), float(row[1]))
            counts[key] = counts.get(key, 0) + 1
        tv = 0.5 * sum(
            abs(counts.get(k, 0) / 8000.0 - law.probability(k))
            for k in set(counts) | set(law.probs)
        )
        assert tv < 0.04

    def test_single_draw_wrapper(self):
        sample = ensembles.sample_eigs(ensembles.Wishart(2, 2), derive_substream(19, 0))
        assert isinstance(sample, ensembles.EigenSample)
        assert sample.values.shape == (2,)

    def test_seeded_reproducible(self):
        a = ensembles.sample_eigs_batch(
            ensembles.Jacobi(3, 3, 2), 5, derive_substream(20, 0)
        )
        b = ensembles.sample_eigs_batch(
            ensembles.Jacobi(3, 3, 2), 5, derive_substream(20, 0)
        )
        assert np.array_equal(a, b)

    def test_num_must_be_positive(self):
        with pytest.raises(ArgumentError):
            ensembles.sample_eigs_batch(ensembles.Wishart(1, 1), 0, derive_substream(0, 0))
