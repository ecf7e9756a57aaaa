"""Band estimator: least-squares oracle, max-margin fit, physical
cleaning, and the combined fit pipeline."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clocksync import (BandDataset, ClockEstimate, FitConfig, clean_band,
                       fit, fit_band_margin, fit_midpoint_ls)
from clocksync.errors import DegenerateDesign, EmptyResult

from conftest import inject_upper_outliers, make_band

CFG = FitConfig()

TRUTH = dict(theta=1e-4, beta=1e-6, alpha=1e-8, d=1e-6)


def test_midpoint_ls_constant_band():
    data = make_band(theta=3e-6, beta=0.0, alpha=0.0, d=2e-6, n=200, span=10.0)
    est = fit_midpoint_ls(data, 2)
    assert est.theta_hat == pytest.approx(3e-6, abs=1e-12)
    assert abs(est.beta_hat) <= 1e-12
    assert abs(est.alpha_hat) <= 1e-12
    assert est.d_hat == pytest.approx(2e-6, rel=1e-9)


def test_midpoint_ls_recovers_quadratic():
    data = make_band(**TRUTH)
    est = fit_midpoint_ls(data, 2)
    assert est.theta_hat == pytest.approx(TRUTH["theta"], rel=1e-9)
    assert est.beta_hat == pytest.approx(TRUTH["beta"], rel=1e-6)
    assert est.alpha_hat == pytest.approx(TRUTH["alpha"], rel=1e-6)


def test_degenerate_design_raises():
    data = BandDataset(t=np.array([0.0, 1.0]), upper=np.array([1.0, 1.0]),
                       lower=np.array([0.0, 0.0]), window_start=0.0, window_end=1.0)
    with pytest.raises(DegenerateDesign):
        fit_midpoint_ls(data, 2)
    with pytest.raises(DegenerateDesign):
        fit_band_margin(data, CFG)


@settings(max_examples=20, deadline=None)
@given(theta=st.floats(-1e-3, 1e-3), beta=st.floats(-1e-4, 1e-4),
       alpha=st.floats(-1e-7, 1e-7))
def test_midpoint_ls_exact_on_synthetic_polynomials(theta, beta, alpha):
    tau = np.linspace(0.0, 50.0, 200)
    mid = theta + beta * tau + 0.5 * alpha * tau * tau
    data = BandDataset(t=tau, upper=mid + 1e-6, lower=mid - 1e-6,
                       window_start=0.0, window_end=50.0)
    est = fit_midpoint_ls(data, 2)
    scale = max(1e-6, abs(theta), 50 * abs(beta), 1250 * abs(alpha))
    assert np.max(np.abs(est.predict(tau) - mid)) <= 1e-9 * scale


def test_margin_fit_exact_recovery_and_oracle_agreement():
    data = make_band(**TRUTH)
    est = fit_band_margin(data, CFG)
    ls = fit_midpoint_ls(data, 2)
    assert est.theta_hat == pytest.approx(TRUTH["theta"], rel=1e-6)
    assert est.beta_hat == pytest.approx(TRUTH["beta"], rel=1e-6)
    assert est.alpha_hat == pytest.approx(TRUTH["alpha"], rel=1e-6)
    assert est.d_hat == pytest.approx(TRUTH["d"], abs=1e-9)
    assert abs(est.theta_hat - ls.theta_hat) <= 1e-9
    assert abs(est.beta_hat - ls.beta_hat) <= 1e-9
    assert abs(est.alpha_hat - ls.alpha_hat) <= 1e-9


def test_margin_fit_constant_band_is_midline():
    data = make_band(theta=3e-6, beta=0.0, alpha=0.0, d=2e-6, n=100, span=10.0)
    est = fit_band_margin(data, CFG)
    assert est.theta_hat == pytest.approx(3e-6, abs=1e-11)
    assert abs(est.beta_hat) <= 1e-11
    assert est.d_hat == pytest.approx(2e-6, abs=1e-11)


def test_margin_fit_lies_inside_band():
    data = make_band(jitter=1e-8, seed=11)
    est = fit_band_margin(data, CFG)
    q = est.predict(data.t - data.window_start)
    tol = 1e-9
    assert np.all(data.upper - q >= -tol)
    assert np.all(q - data.lower >= -tol)


def test_time_origin_covariance():
    data = make_band(**TRUTH)
    est = fit_band_margin(data, CFG)
    shift = 7.0
    shifted = BandDataset(t=data.t, upper=data.upper, lower=data.lower,
                          window_start=data.window_start - shift,
                          window_end=data.window_end)
    est2 = fit_band_margin(shifted, CFG)
    # the new origin sits `shift` seconds before the old one
    assert est2.theta_hat == pytest.approx(est.predict(-shift), abs=1e-9)
    assert est2.beta_hat == pytest.approx(float(est.slope(-shift)), abs=1e-9)
    assert est2.alpha_hat == pytest.approx(est.alpha_hat, abs=1e-9)
    tau = np.linspace(0.0, 100.0, 11)
    assert np.allclose(est2.predict(tau + shift), est.predict(tau), atol=1e-9)


def test_noisy_theta_error_within_monte_carlo_bound():
    # empirical bound: 3 sigma / sqrt(n) with a small-sample factor of 5
    bound = 3.0 * 1e-8 / np.sqrt(2000.0) * 5.0
    errs = []
    for seed in range(30):
        data = make_band(jitter=1e-8, seed=seed)
        est = fit_band_margin(data, CFG)
        errs.append(abs(est.theta_hat - 1e-4))
    assert max(errs) <= bound


def test_noise_immunity_improves_with_window_length():
    def beta_spread(span):
        vals = []
        for seed in range(30):
            data = make_band(jitter=1e-8, span=span, seed=100 + seed)
            vals.append(fit_band_margin(data, CFG).beta_hat)
        return np.std(vals)

    assert beta_spread(10.0) >= 3.0 * beta_spread(100.0)


def test_d_hat_consistent_with_per_point_distance():
    data = make_band(jitter=1e-8, seed=21)
    est = fit_band_margin(data, CFG)
    assert abs(est.d_hat - float(np.mean(data.half_width))) \
        <= CFG.clean_k_sigma * max(est.residual_rms, 1e-9)


def test_clean_band_noop_on_clean_data():
    data = make_band(**TRUTH)
    est = fit_band_margin(data, CFG)
    assert clean_band(data, est, CFG) is data


def test_clean_band_removes_single_impossible_point():
    data = make_band(**TRUTH)
    upper = data.upper.copy()
    upper[500] = data.lower[500] - 1e-6  # below the lower envelope
    dirty = BandDataset(t=data.t, upper=upper, lower=data.lower,
                        window_start=data.window_start, window_end=data.window_end)
    est = fit_midpoint_ls(dirty, 2)
    cleaned = clean_band(dirty, est, CFG)
    assert cleaned.n == data.n - 1
    assert data.t[500] not in cleaned.t


def test_clean_band_empty_result():
    data = make_band(n=50, span=10.0)
    absurd = ClockEstimate(alpha_hat=0.0, beta_hat=0.0, theta_hat=1.0,
                           d_hat=0.0, n_used=50, n_filtered=0, residual_rms=0.0)
    with pytest.raises(EmptyResult):
        clean_band(data, absurd, CFG)


def test_fit_idempotent_on_clean_data():
    data = make_band(jitter=1e-8, seed=31)
    direct = fit_band_margin(data, CFG)
    piped = fit(data, CFG)
    assert piped.theta_hat == direct.theta_hat
    assert piped.beta_hat == direct.beta_hat
    assert piped.alpha_hat == direct.alpha_hat
    assert piped.n_filtered == 0


def test_fit_with_outliers_close_to_clean_fit():
    clean_err, dirty_err = [], []
    for seed in range(15):
        data = make_band(jitter=1e-8, seed=200 + seed)
        dirty, _ = inject_upper_outliers(data, 0.05, seed=300 + seed)
        clean_err.append(abs(fit(data, CFG).theta_hat - 1e-4))
        est = fit(dirty, CFG)
        dirty_err.append(abs(est.theta_hat - 1e-4))
        assert est.n_filtered >= 1
    assert np.mean(dirty_err) <= 2.0 * np.mean(clean_err)


def test_linear_model_underfits_drifting_clock():
    data = make_band(jitter=1e-8, seed=41)  # alpha = 1e-8 over 100 s
    lin = fit(data, FitConfig(model_order=1))
    quad = fit(data, FitConfig(model_order=2))
    assert lin.residual_rms > quad.residual_rms


def test_post_clean_estimate_ignores_far_side_points():
    data = make_band(jitter=1e-8, seed=51)
    est = fit_band_margin(data, CFG)
    q = est.predict(data.t - data.window_start)
    slack = data.upper - (q + est.d_hat)
    loose = slack > np.quantile(slack, 0.9)
    upper = data.upper.copy()
    upper[loose] += 1e-6  # push non-support points further from the surface
    moved = BandDataset(t=data.t, upper=upper, lower=data.lower,
                        window_start=data.window_start, window_end=data.window_end)
    est2 = fit_band_margin(moved, CFG)
    assert abs(est2.theta_hat - est.theta_hat) <= 1e-12
    assert abs(est2.beta_hat - est.beta_hat) <= 1e-12
    assert abs(est2.alpha_hat - est.alpha_hat) <= 1e-12


def test_fit_config_validation():
    with pytest.raises(ValueError):
        FitConfig(model_order=3)
    with pytest.raises(ValueError):
        FitConfig(margin_penalty=0.0)
