"""AR fitting and order selection, distribution fits, Markov chain fits."""

import numpy as np
import pytest

from tsboot.errors import (
    InsufficientDataError,
    MalformedConfigError,
    SingularDesignError,
)
from tsboot.models import (
    MarkovChainModel,
    ar_is_stationary,
    ar_order_scores,
    assign_states,
    default_max_ar_order,
    default_n_states,
    draw_categorical,
    fit_ar,
    fit_ar_with_fallback,
    fit_distribution,
    fit_markov,
    mean_model,
    quantile_bin_edges,
    sample_distribution,
    sample_markov_path,
    select_ar_order,
)
from tsboot.types import Distribution

from conftest import FakeRng, sim_ar

GEOMETRIC = np.array([1.0, 0.5, 0.25, 0.125])


class TestArFit:
    def test_exact_first_order_relation(self):
        model = fit_ar(GEOMETRIC, 1)
        assert abs(model.intercept) < 1e-12
        assert abs(model.coefficients[0] - 0.5) < 1e-12
        assert np.all(np.abs(model.residuals) < 1e-12)

    def test_constant_series_is_singular(self):
        with pytest.raises(SingularDesignError):
            fit_ar(np.full(5, 2.0), 1)

    def test_too_short_series_rejected(self):
        with pytest.raises(InsufficientDataError):
            fit_ar(np.array([1.0, 2.0, 3.0]), 2)

    def test_second_order_recovery(self):
        x = sim_ar([0.5, -0.3], 2000, seed=1)
        model = fit_ar(x, 2)
        assert abs(model.coefficients[0] - 0.5) < 0.1
        assert abs(model.coefficients[1] + 0.3) < 0.1
        assert model.sigma2 == pytest.approx(1.0, rel=0.2)

    def test_fit_reconstructs_observations(self):
        x = sim_ar([0.6], 200, seed=4)
        model = fit_ar(x, 2)
        for t in range(2, len(x)):
            fitted = model.intercept + model.coefficients @ x[t - 2 : t][::-1]
            assert x[t] == pytest.approx(fitted + model.residuals[t - 2], abs=1e-10)

    def test_mean_model_centers(self):
        model = mean_model(np.array([1.0, 3.0]))
        assert model.order == 0
        assert model.intercept == 2.0
        assert model.residuals.tolist() == [-1.0, 1.0]

    def test_fallback_degrades_to_mean(self):
        model = fit_ar_with_fallback(np.full(6, 7.0), 1)
        assert model.order == 0
        assert model.intercept == 7.0


class TestOrderSelection:
    def test_exact_fit_prefers_smallest_order(self):
        x = np.array([1.0 * 0.5**k for k in range(12)])
        assert select_ar_order(x, 3) == 1

    def test_true_second_order_found(self):
        hits = sum(
            select_ar_order(sim_ar([0.5, -0.3], 2000, seed=s), 8) == 2
            for s in range(10)
        )
        assert hits >= 8

    def test_white_noise_stays_low_order(self):
        picks = [
            select_ar_order(np.random.default_rng(s).standard_normal(2000), 5)
            for s in range(50)
        ]
        assert sum(p == 1 for p in picks) >= 45

    def test_flat_penalty_inflates_only_by_chance(self):
        picks = []
        for s in range(50):
            w = np.random.default_rng(s).standard_normal(2000)
            scores = ar_order_scores(w, 5, criterion="aic")
            picks.append(int(np.argmin(scores)) + 1)
        share = np.mean(np.array(picks) == 1)
        assert 0.4 <= share <= 0.95

    def test_flat_penalty_scores_stay_close_on_noise(self):
        for s in range(50):
            w = np.random.default_rng(s).standard_normal(2000)
            scores = ar_order_scores(w, 5, criterion="aic")
            for i in range(5):
                for j in range(i + 1, 5):
                    assert abs(scores[j] - scores[i]) <= 2 * (j - i) + 8

    def test_unknown_criterion_rejected(self):
        with pytest.raises(ValueError):
            ar_order_scores(np.arange(30.0), 2, criterion="hqc")

    def test_default_order_bound(self):
        assert default_max_ar_order(2) == 1
        assert default_max_ar_order(8) == 2
        assert default_max_ar_order(40) == 10
        assert default_max_ar_order(400) == 10


class TestStationarityCheck:
    def test_stable_coefficient(self):
        assert ar_is_stationary(fit_ar(sim_ar([0.5], 500, seed=0), 1))

    def test_explosive_root_flagged(self):
        x = 1.05 ** np.arange(40)
        assert not ar_is_stationary(fit_ar(x, 1))

    def test_mean_model_always_stable(self):
        assert ar_is_stationary(mean_model(np.arange(5.0)))


class TestDistributionFit:
    def test_gaussian_moments(self):
        dist = fit_distribution(np.array([1.0, 2.0, 3.0, 4.0]), Distribution.GAUSSIAN)
        assert dist.mu == pytest.approx(2.5)
        assert dist.sigma == pytest.approx(np.sqrt(1.25))

    def test_gaussian_on_ramp(self):
        dist = fit_distribution(np.arange(10.0), Distribution.GAUSSIAN)
        assert dist.mu == pytest.approx(4.5)
        assert dist.sigma == pytest.approx(np.sqrt(8.25))

    def test_gaussian_degenerate(self):
        dist = fit_distribution(np.zeros(4), Distribution.GAUSSIAN)
        assert dist.mu == 0.0
        assert dist.sigma == 0.0

    def test_empirical_stores_sorted(self):
        dist = fit_distribution(np.array([3.0, 1.0, 2.0]), Distribution.EMPIRICAL)
        assert dist.sorted_values.tolist() == [1.0, 2.0, 3.0]
        assert dist.source_order.tolist() == [1, 2, 0]


class TestDistributionSampling:
    def test_zero_sigma_repeats_mean(self):
        dist = fit_distribution(np.full(4, 5.0), Distribution.GAUSSIAN)
        values, indices = sample_distribution(dist, 4, np.random.default_rng(0))
        assert values.tolist() == [5.0, 5.0, 5.0, 5.0]
        assert indices.tolist() == [-1, -1, -1, -1]

    def test_singleton_empirical(self):
        dist = fit_distribution(np.array([7.0]), Distribution.EMPIRICAL)
        values, indices = sample_distribution(dist, 3, np.random.default_rng(0))
        assert values.tolist() == [7.0, 7.0, 7.0]
        assert indices.tolist() == [0, 0, 0]

    def test_standard_gaussian_mean_is_central(self):
        dist = fit_distribution(np.random.default_rng(1).standard_normal(10**5), Distribution.GAUSSIAN)
        values, _ = sample_distribution(dist, 10**5, np.random.default_rng(2))
        assert abs(values.mean() - dist.mu) < 4 / np.sqrt(10**5)

    def test_empirical_frequencies(self):
        source = np.array([1.0, 2.0, 3.0, 4.0])
        dist = fit_distribution(source, Distribution.EMPIRICAL)
        values, indices = sample_distribution(dist, 40000, np.random.default_rng(3))
        for v in source:
            assert abs(np.mean(values == v) - 0.25) < 0.02
        assert np.array_equal(values, source[indices])

    def test_gaussian_sample_moments_round_trip(self):
        dist = fit_distribution(np.random.default_rng(4).normal(3.0, 2.0, 5000), Distribution.GAUSSIAN)
        values, _ = sample_distribution(dist, 10**5, np.random.default_rng(5))
        assert values.mean() == pytest.approx(dist.mu, abs=0.05)
        assert values.std() == pytest.approx(dist.sigma, abs=0.05)


class TestMarkovFit:
    def test_hand_counted_two_state_example(self):
        model = fit_markov(np.array([0.0, 1.0, 0.0, 1.0]), n_states=2)
        assert model.n_states == 2
        assert np.allclose(model.transition[0], [1 / 6, 5 / 6])
        assert np.allclose(model.transition[1], [3 / 4, 1 / 4])

    def test_constant_series_single_state(self):
        model = fit_markov(np.full(3, 4.0), n_states=1)
        assert model.transition.tolist() == [[1.0]]

    def test_rows_always_normalized(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            x = rng.normal(size=rng.integers(5, 80))
            model = fit_markov(x)
            assert np.allclose(model.transition.sum(axis=1), 1.0, atol=1e-12)
            assert model.initial.sum() == pytest.approx(1.0, abs=1e-12)

    def test_duplicate_heavy_input_leaves_no_empty_state(self):
        model = fit_markov(np.array([1.0, 1.0, 2.0, 2.0]), n_states=4)
        for s in range(model.n_states):
            assert len(model.state_values[s]) > 0

    def test_default_state_count(self):
        assert default_n_states(4) == 2
        assert default_n_states(100) == 10
        assert default_n_states(1000) == 10

    def test_more_states_than_points_rejected(self):
        with pytest.raises(MalformedConfigError):
            fit_markov(np.arange(3.0), n_states=5)

    def test_two_points_minimum(self):
        with pytest.raises(InsufficientDataError):
            fit_markov(np.array([1.0]))

    def test_bin_edges_split_quartets(self):
        edges = quantile_bin_edges(np.array([0.0, 1.0, 2.0, 3.0]), 2)
        assert edges.tolist() == [1.0]
        states = assign_states(np.array([0.0, 1.0, 2.0, 3.0]), edges)
        assert states.tolist() == [0, 0, 1, 1]


class TestMarkovSampling:
    def _two_state_model(self, transition, initial):
        return MarkovChainModel(
            n_states=2,
            bin_edges=np.array([15.0]),
            transition=np.array(transition, dtype=float),
            initial=np.array(initial, dtype=float),
            state_values=(np.array([10.0, 11.0]), np.array([20.0])),
            state_indices=(np.array([0, 1]), np.array([2])),
        )

    def test_absorbing_chain_stays_put(self):
        model = self._two_state_model([[1.0, 0.0], [0.0, 1.0]], [1.0, 0.0])
        values, indices = sample_markov_path(model, 50, np.random.default_rng(0))
        assert set(values) <= {10.0, 11.0}
        assert set(indices.tolist()) <= {0, 1}

    def test_single_state_constant_emission(self):
        model = fit_markov(np.array([4.0, 4.0, 4.0]), n_states=1)
        values, _ = sample_markov_path(model, 7, np.random.default_rng(1))
        assert values.tolist() == [4.0] * 7

    def test_emissions_come_from_observed_values(self):
        x = np.random.default_rng(2).normal(size=60)
        model = fit_markov(x)
        values, indices = sample_markov_path(model, 200, np.random.default_rng(3))
        assert set(values) <= set(x)
        assert np.array_equal(values, x[indices])

    def test_zero_count_draws_nothing(self):
        model = self._two_state_model([[0.5, 0.5], [0.5, 0.5]], [0.5, 0.5])
        rng = FakeRng([])
        values, indices = sample_markov_path(model, 0, rng)
        assert values.size == 0 and indices.size == 0

    def test_scripted_walk_draw_order(self):
        model = self._two_state_model([[0.0, 1.0], [1.0, 0.0]], [1.0, 0.0])
        # init, emit, transition, emit: exactly four draws for two steps
        rng = FakeRng([0.0, 1, 0.99, 0])
        values, indices = sample_markov_path(model, 2, rng)
        assert values.tolist() == [11.0, 20.0]
        assert indices.tolist() == [1, 2]
        assert rng.script == []

    def test_categorical_boundaries(self):
        probs = np.array([0.2, 0.3, 0.5])
        assert draw_categorical(FakeRng([0.1]), probs) == 0
        assert draw_categorical(FakeRng([0.2]), probs) == 1
        assert draw_categorical(FakeRng([0.999]), probs) == 2
        assert draw_categorical(FakeRng([1.0]), probs) == 2
