"""Error budget: analytic bound arithmetic and jitter perturbation sweeps."""

import numpy as np
import pytest

from uqcm.errormodel import ErrorBudget, PerturbationResult, fidelity_error_bound, perturbation_sweep


class TestAnalyticBound:
    def test_bench_budget(self):
        # Sum dC = 0.002 and dtheta = 0.0018 rad give 0.0047 (quoted as ~0.005).
        budget = ErrorBudget(delta_c=(0.0005,) * 4, delta_theta=0.0018)
        assert fidelity_error_bound(budget) == pytest.approx(0.0047, abs=1e-12)

    def test_zero_budget(self):
        assert fidelity_error_bound(ErrorBudget((0, 0, 0, 0), 0.0)) == 0.0

    def test_orientation_only(self):
        assert fidelity_error_bound(ErrorBudget((0, 0, 0, 0), 0.002)) == pytest.approx(0.003)

    def test_linear_and_monotone(self):
        base = ErrorBudget((0.001, 0.002, 0.0, 0.0005), 0.001)
        b0 = fidelity_error_bound(base)
        assert fidelity_error_bound(
            ErrorBudget((0.002, 0.004, 0.0, 0.001), 0.002)
        ) == pytest.approx(2 * b0)
        bumped = ErrorBudget((0.001, 0.002, 0.0001, 0.0005), 0.001)
        assert fidelity_error_bound(bumped) > b0

    def test_negative_entries_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            ErrorBudget((-0.001, 0, 0, 0), 0.0)
        with pytest.raises(ValueError, match="nonnegative"):
            ErrorBudget((0, 0, 0, 0), -0.1)
        with pytest.raises(ValueError, match="4 entries"):
            ErrorBudget((0.1, 0.1), 0.0)


class TestPerturbationSweep:
    def test_zero_jitter_gives_zero_deviation(self):
        res = perturbation_sweep(jitter=0.0, n_samples=5, seed=2)
        assert res.max_deviation < 1e-9

    def test_deterministic_given_seed(self):
        a = perturbation_sweep(jitter=0.0018, n_samples=10, seed=5, delta_c_total=0.002)
        b = perturbation_sweep(jitter=0.0018, n_samples=10, seed=5, delta_c_total=0.002)
        assert np.array_equal(a.deviations, b.deviations)

    def test_mean_deviation_monotone_in_jitter(self):
        means = [
            perturbation_sweep(jitter=j, n_samples=60, seed=9).mean_deviation
            for j in (0.0009, 0.0018, 0.0036)
        ]
        assert means[0] <= means[1] <= means[2]

    def test_bench_budget_stays_under_analytic_bound(self):
        res = perturbation_sweep(
            jitter=0.0018, n_samples=100, seed=13, delta_c_total=0.002, bound=0.005
        )
        assert res.mean_deviation <= 0.005
        assert res.n_exceeding_bound == 0

    def test_exceeding_samples_are_flagged_not_fatal(self):
        res = perturbation_sweep(jitter=0.1, n_samples=20, seed=3, bound=1e-6)
        assert res.n_exceeding_bound > 0
        assert isinstance(res, PerturbationResult)

    def test_stats_fields(self):
        res = perturbation_sweep(jitter=0.001, n_samples=8, seed=1)
        assert res.min_deviation <= res.mean_deviation <= res.max_deviation
        assert res.n_samples == 8
        assert res.n_exceeding_bound is None
        assert len(res.fidelities1) == len(res.fidelities2) == 8

    def test_validation(self):
        with pytest.raises(ValueError, match="jitter"):
            perturbation_sweep(jitter=-0.1, n_samples=5, seed=0)
        with pytest.raises(ValueError, match="n_samples"):
            perturbation_sweep(jitter=0.1, n_samples=0, seed=0)
        with pytest.raises(ValueError, match="delta_c_total"):
            perturbation_sweep(jitter=0.1, n_samples=5, seed=0, delta_c_total=-1.0)
