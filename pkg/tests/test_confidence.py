import numpy as np
import pytest

from dsm_lab import (
    ConfidenceRegion,
    ConfidenceSpec,
    InfeasibleRegionError,
    coverage_ratio,
    lambda_squared,
    region,
    solve_threshold,
)

GHZ4_SPEC = ConfidenceSpec(epsilon=0.005, sigma=0.005, f0=0.9, n_copies=10**4, dim=16)


def test_spec_validation():
    with pytest.raises(ValueError):
        ConfidenceSpec(epsilon=0.0, sigma=0.005, f0=0.9, n_copies=100, dim=4)
    with pytest.raises(ValueError):
        ConfidenceSpec(epsilon=0.005, sigma=-1.0, f0=0.9, n_copies=100, dim=4)
    with pytest.raises(ValueError):
        ConfidenceSpec(epsilon=0.005, sigma=0.005, f0=0.9, n_copies=0, dim=4)


def test_lambda_squared_frozen_value():
    assert lambda_squared(GHZ4_SPEC) == pytest.approx(0.056461, abs=1e-6)


def test_lambda_squared_finite_at_large_budget():
    spec = ConfidenceSpec(epsilon=0.005, sigma=0.005, f0=0.9, n_copies=10**6, dim=16)
    val = lambda_squared(spec)
    assert np.isfinite(val)
    assert 0 < val < lambda_squared(GHZ4_SPEC)


def test_region_with_pinned_threshold():
    reg = region(GHZ4_SPEC, f_bar=0.858128)
    assert reg.lower == pytest.approx(0.801667, abs=1e-6)
    assert reg.upper == pytest.approx(0.998333, abs=1e-6)
    assert reg.f_bar == 0.858128
    assert reg.lambda_sq == pytest.approx(0.056461, abs=1e-6)


def test_region_caps_upper_at_one():
    spec = ConfidenceSpec(epsilon=0.005, sigma=0.0005, f0=0.99, n_copies=10**4, dim=4)
    reg = region(spec)
    assert reg.upper == 1.0
    assert reg.lower < reg.f_bar < spec.f0


def test_median_quantile_limit():
    """With the missing-mass allowance at 1/2, the threshold sits at the
    0.25-tail quantile, 0.6745 sigma below center."""
    spec = ConfidenceSpec(
        epsilon=1 - 1e-9, sigma=0.01, f0=0.5, n_copies=50, dim=1
    )
    f_bar = solve_threshold(spec)
    assert f_bar == pytest.approx(0.5 - 0.6744898 * 0.01, abs=1e-5)


def test_threshold_approaches_center_as_width_vanishes():
    f_bars = [
        solve_threshold(
            ConfidenceSpec(epsilon=0.005, sigma=s, f0=0.9, n_copies=10**4, dim=4)
        )
        for s in (0.008, 0.004, 1e-4)
    ]
    assert f_bars[0] < f_bars[1] < f_bars[2] <= 0.9
    assert f_bars[2] == pytest.approx(0.9, abs=1e-2)


def test_threshold_monotone_in_width_and_dimension():
    base = dict(epsilon=0.005, f0=0.9, n_copies=10**4)
    narrow = solve_threshold(ConfidenceSpec(sigma=0.004, dim=4, **base))
    wide = solve_threshold(ConfidenceSpec(sigma=0.008, dim=4, **base))
    assert wide <= narrow
    small_d = solve_threshold(ConfidenceSpec(sigma=0.005, dim=4, **base))
    large_d = solve_threshold(ConfidenceSpec(sigma=0.005, dim=16, **base))
    assert large_d <= small_d


def test_solved_threshold_satisfies_mass_equation():
    """The bisection root makes the interval mass hit 1 - eps/(2c)."""
    from scipy.special import log_ndtr

    spec = ConfidenceSpec(epsilon=0.005, sigma=0.005, f0=0.9, n_copies=10**4, dim=4)
    f_bar = solve_threshold(spec)
    upper = min(2 * spec.f0 - f_bar, 1.0)
    log_missing = np.logaddexp(
        log_ndtr((f_bar - spec.f0) / spec.sigma),
        log_ndtr((spec.f0 - upper) / spec.sigma),
    )
    log_allowed = np.log(spec.epsilon / 2) - spec.log_c()
    assert log_missing == pytest.approx(log_allowed, abs=1e-3)


def test_infeasible_spec_raises():
    # nearly all mass must fit between f_bar and the cap at 1, but the
    # estimator model is far wider than the room available
    spec = ConfidenceSpec(epsilon=0.005, sigma=0.1, f0=0.999, n_copies=10**4, dim=16)
    with pytest.raises(InfeasibleRegionError):
        solve_threshold(spec)


def test_coverage_ratio_frozen_example():
    reg = ConfidenceRegion(f_bar=0.858128, lambda_sq=0.056461,
                           lower=0.801667, upper=0.998333)
    assert coverage_ratio([0.80, 0.85, 0.999], reg) == pytest.approx(100 / 3, abs=1e-9)
    assert coverage_ratio([0.9, 0.95], reg) == 100.0
    assert coverage_ratio([0.5], reg) == 0.0
