import tracemalloc

import numpy as np
import pytest

from problms import (
    FullGaussianState,
    IsoGaussianState,
    RegressionSample,
    SsmParams,
    exact_step,
    lms_map_estimate,
    predictive_band,
    prior_iso,
    problms_step,
    problms_step_ou,
)


class TestProblmsStep:
    def test_hand_example_m2(self):
        # var 1, noise 1, no drift; x=(1,0), y=1 from zero mean
        params = SsmParams(dim=2, obs_noise_var=1.0, drift_var=0.0, prior_var=1.0)
        state, detail = problms_step(
            IsoGaussianState(np.zeros(2), 1.0),
            RegressionSample(np.array([1.0, 0.0]), 1.0),
            params,
        )
        assert detail.gain == pytest.approx(0.5)
        np.testing.assert_allclose(state.mean, [0.5, 0.0])
        assert state.var == pytest.approx(0.75)

    def test_zero_regressor_is_noop_without_drift(self):
        params = SsmParams(dim=2, obs_noise_var=0.25, drift_var=0.0, prior_var=1.0)
        start = IsoGaussianState(np.array([1.0, -2.0]), 0.5)
        state, detail = problms_step(
            start, RegressionSample(np.zeros(2), 3.0), params
        )
        np.testing.assert_array_equal(state.mean, start.mean)
        assert state.var == pytest.approx(0.5)
        assert detail.gain == pytest.approx(0.5 / 0.25)

    def test_rejects_forgetting_below_one(self):
        params = SsmParams(dim=2, obs_noise_var=1.0, forgetting=0.9)
        with pytest.raises(ValueError, match="forgetting"):
            problms_step(
                prior_iso(params), RegressionSample(np.ones(2), 0.0), params
            )

    def test_m1_equals_exact_filter(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            params = SsmParams(
                dim=1,
                obs_noise_var=float(10.0 ** rng.uniform(-3, 0)),
                drift_var=float(rng.choice([0.0, 1e-4])),
                prior_var=float(10.0 ** rng.uniform(-1, 1)),
            )
            iso = prior_iso(params)
            full = FullGaussianState(iso.mean.copy(), np.array([[iso.var]]))
            for _ in range(1000):
                sample = RegressionSample(
                    rng.standard_normal(1), float(rng.standard_normal())
                )
                iso, iso_detail = problms_step(iso, sample, params)
                full, full_detail = exact_step(full, sample, params)
                np.testing.assert_allclose(
                    iso.mean, full.mean, rtol=1e-12, atol=1e-14
                )
                assert iso.var == pytest.approx(full.cov[0, 0], rel=1e-12)
                assert iso_detail.innovation == pytest.approx(
                    full_detail.innovation, rel=1e-12, abs=1e-14
                )

    def test_step_size_and_variance_bounds(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            m = int(rng.integers(1, 9))
            params = SsmParams(
                dim=m,
                obs_noise_var=float(10.0 ** rng.uniform(-4, 1)),
                drift_var=float(rng.choice([0.0, 10.0 ** rng.uniform(-6, -2)])),
                prior_var=float(10.0 ** rng.uniform(-2, 1)),
            )
            state = prior_iso(params)
            for _ in range(50):
                x = rng.standard_normal(m)
                state_prev = state
                state, detail = problms_step(
                    state, RegressionSample(x, float(rng.standard_normal())), params
                )
                eta_x = detail.gain * float(x @ x)
                assert 0.0 < eta_x < 1.0
                assert state.var <= state_prev.var + params.drift_var
                assert state.var < state_prev.var + params.drift_var or not np.any(x)

    def test_stationary_variance_and_step_decay(self):
        rng = np.random.default_rng(42)
        params = SsmParams(dim=50, obs_noise_var=0.01, drift_var=0.0, prior_var=0.02)
        state = prior_iso(params)
        prev_var = state.var
        etas = []
        for _ in range(2000):
            sample = RegressionSample(
                rng.standard_normal(50), float(rng.standard_normal())
            )
            state, detail = problms_step(state, sample, params)
            assert state.var < prev_var
            prev_var = state.var
            etas.append(detail.gain)
        assert etas[-1] < 0.05 * etas[0]

    def test_linear_memory_footprint(self):
        # an M x M intermediate would need ~80 GB here; a linear step stays small
        m = 100_000
        params = SsmParams(dim=m, obs_noise_var=0.1, drift_var=0.0, prior_var=1.0)
        state = IsoGaussianState(np.zeros(m), 1.0)
        sample = RegressionSample(np.ones(m), 1.0)
        tracemalloc.start()
        problms_step(state, sample, params)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        assert peak < 50 * m  # bytes; a few length-m float64 temporaries

    def test_dimension_and_finiteness_errors(self):
        params = SsmParams(dim=2, obs_noise_var=1.0)
        with pytest.raises(ValueError, match="dim"):
            problms_step(prior_iso(params), RegressionSample(np.ones(3), 0.0), params)
        with pytest.raises(ValueError, match="finite"):
            problms_step(
                prior_iso(params),
                RegressionSample(np.array([np.inf, 0.0]), 0.0),
                params,
            )


class TestProblmsStepOu:
    def test_reduces_to_problms_step_at_lambda_one(self):
        rng = np.random.default_rng(11)
        params = SsmParams(dim=3, obs_noise_var=0.5, drift_var=1e-3, prior_var=1.0)
        a = prior_iso(params)
        b = prior_iso(params)
        for _ in range(200):
            sample = RegressionSample(
                rng.standard_normal(3), float(rng.standard_normal())
            )
            a, da = problms_step(a, sample, params)
            b, db = problms_step_ou(b, sample, params)
            np.testing.assert_array_equal(a.mean, b.mean)
            assert a.var == b.var
            assert da == db

    def test_hand_example_decay_only(self):
        params = SsmParams(
            dim=2, obs_noise_var=1.0, drift_var=0.0, prior_var=1.0, forgetting=0.9
        )
        state, _ = problms_step_ou(
            IsoGaussianState(np.array([1.0, 1.0]), 1.0),
            RegressionSample(np.zeros(2), 0.0),
            params,
        )
        np.testing.assert_allclose(state.mean, [0.9, 0.9])
        assert state.var == pytest.approx(0.81)

    def test_m1_equals_exact_filter_with_forgetting(self):
        rng = np.random.default_rng(12)
        params = SsmParams(
            dim=1, obs_noise_var=0.1, drift_var=1e-3, prior_var=1.0, forgetting=0.9
        )
        iso = prior_iso(params)
        full = FullGaussianState(iso.mean.copy(), np.array([[iso.var]]))
        for _ in range(1000):
            sample = RegressionSample(
                rng.standard_normal(1), float(rng.standard_normal())
            )
            iso, _ = problms_step_ou(iso, sample, params)
            full, _ = exact_step(full, sample, params)
            np.testing.assert_allclose(iso.mean, full.mean, rtol=1e-12, atol=1e-14)
            assert iso.var == pytest.approx(full.cov[0, 0], rel=1e-12)


def test_lms_map_estimate_returns_mean():
    state = IsoGaussianState(np.array([0.5, 0.0]), 0.75)
    np.testing.assert_array_equal(lms_map_estimate(state), [0.5, 0.0])
    params = SsmParams(dim=4, obs_noise_var=1.0)
    assert np.all(lms_map_estimate(prior_iso(params)) == 0.0)


class TestPredictiveBand:
    def test_two_sd_band(self):
        lower, upper = predictive_band(IsoGaussianState(np.zeros(1), 4.0), width=2.0)
        assert lower[0] == pytest.approx(-4.0)
        assert upper[0] == pytest.approx(4.0)

    def test_default_width_is_two(self):
        state = IsoGaussianState(np.array([1.0]), 1.0)
        lower, upper = predictive_band(state)
        assert lower[0] == pytest.approx(-1.0)
        assert upper[0] == pytest.approx(3.0)

    def test_collapses_with_variance(self):
        state = IsoGaussianState(np.array([2.0, -3.0]), 1e-300)
        lower, upper = predictive_band(state)
        np.testing.assert_allclose(lower, state.mean)
        np.testing.assert_allclose(upper, state.mean)

    def test_unit_width(self):
        lower, upper = predictive_band(
            IsoGaussianState(np.array([1.0, -1.0]), 0.25), width=1.0
        )
        np.testing.assert_allclose(lower, [0.5, -1.5])
        np.testing.assert_allclose(upper, [1.5, -0.5])

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError, match="width"):
            predictive_band(IsoGaussianState(np.zeros(1), 1.0), width=0.0)
