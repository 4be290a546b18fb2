import numpy as np
import pytest

from mfscaling.core import (QGrid, ScaleGrid, ScalingError, SpectrumCurve,
                            TimeSeries, legendre_transform_tau_to_f)
from mfscaling.mfdfa import (DfaConfig, dfa_hurst, fluctuation_function,
                             generalized_mean, h_spectrum, local_fluctuation,
                             mfdfa, profile, rescaled_range, rolling_hurst,
                             tau_from_h)
from mfscaling.synth import GeneratorSpec, fgn_ensemble, generate

SCALES = ScaleGrid.log_spaced(16, 1024, 7)


def white(n, seed):
    return generate(GeneratorSpec("gaussian_white", n, seed)).series


# -------------------------------------------------------------- profile

def test_profile_examples():
    assert list(profile(TimeSeries([1.0, 1, 1, 1])).values) == [0, 0, 0, 0]
    assert list(profile(TimeSeries([1.0, -1, 1, -1])).values) == [1, 0, 1, 0]


def test_profile_variance_grows_linearly(white_noise):
    lags = np.array([4, 16, 64, 256])
    var = np.zeros(lags.size)
    for s in white_noise:
        y = profile(s).values
        var += [np.var(y[k:] - y[:-k]) for k in lags]
    var /= len(white_noise)
    slope = np.polyfit(np.log(lags), np.log(var), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.05)
    np.testing.assert_allclose(var / lags, 1.0, rtol=0.05)


# -------------------------------------------------------------- local fluctuation

def test_linear_segment_has_zero_fluctuation():
    assert local_fluctuation(3.0 + 0.25 * np.arange(32.0), (0, 32), 1) == 0.0


def test_constant_fit_arithmetic():
    assert local_fluctuation([0.0, 1, 0, -1], (0, 4), 0) == pytest.approx(np.sqrt(0.5), abs=1e-15)


def test_parabola_plus_noise_against_polyfit():
    rng = np.random.default_rng(11)
    t = np.arange(64.0)
    noise = rng.standard_normal(64)
    resid = noise - np.polyval(np.polyfit(t, noise, 2), t)
    floor = np.sqrt(np.mean(resid ** 2))
    for eps in (1e-1, 1e-3, 1e-5):
        y = 2.0 - 0.3 * t + 0.01 * t ** 2 + eps * noise
        oracle = np.sqrt(np.mean((y - np.polyval(np.polyfit(t, y, 2), t)) ** 2))
        f = local_fluctuation(y, (0, 64), 2)
        assert f == pytest.approx(oracle, rel=1e-6)
        assert f / eps == pytest.approx(floor, rel=1e-4)


def test_local_fluctuation_preconditions():
    with pytest.raises(ValueError):
        local_fluctuation(np.arange(10.0), (0, 3), 2)
    with pytest.raises(ValueError):
        local_fluctuation(np.arange(10.0), (8, 4), 1)


def test_polynomial_added_to_segment_leaves_f_unchanged():
    rng = np.random.default_rng(5)
    y = rng.standard_normal(100).cumsum()
    t = np.arange(100.0)
    for m in (0, 1, 2, 3):
        base = local_fluctuation(y, (10, 50), m)
        trend = np.polyval(rng.standard_normal(m + 1), (t - 35) / 25)
        assert local_fluctuation(y + trend, (10, 50), m) == pytest.approx(base, rel=1e-10)


# -------------------------------------------------------------- surface

def test_generalized_mean_limits():
    f = np.array([1.0, 2.0, 4.0])
    assert generalized_mean(f, 0) == pytest.approx(2.0)
    assert generalized_mean(f, 1) == pytest.approx(7 / 3)
    assert generalized_mean(f, 2) == pytest.approx(np.sqrt(7))
    assert generalized_mean(f, -1) == pytest.approx(3 / 1.75)
    assert np.isnan(generalized_mean(np.array([0.0, 1.0]), -1))
    assert generalized_mean(np.array([0.0, 1.0]), 2) == pytest.approx(np.sqrt(0.5))
    # large orders stay finite
    assert generalized_mean(np.array([1e-200, 1e200]), 50) == pytest.approx(1e200 * 2 ** -0.02)


def test_constant_increments_give_degenerate_surface():
    s = TimeSeries(np.full(4096, 0.7))
    cfg = DfaConfig(QGrid([-2.0, 0.0, 2.0]), SCALES, poly_order=1)
    surf = fluctuation_function(s, cfg)
    assert surf.degenerate
    assert any("degenerate" in w for w in surf.warnings)
    with pytest.raises(ScalingError, match="q unusable"):
        h_spectrum(surf)


def test_zero_segments_flag_negative_q_cells_only():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(4096)
    x[:1024] = 1.0  # linear profile stretch: zero local fluctuation at small s
    surf = fluctuation_function(TimeSeries(x), DfaConfig(QGrid([-2.0, 0.0, 2.0]), SCALES))
    assert surf.usable[2].all()
    assert not surf.usable[0].all() and not surf.usable[1].all()
    assert any("unusable" in w for w in surf.warnings)
    h = h_spectrum(surf)
    assert 2.0 in h.abscissa


def test_q_zero_is_continuous(white_noise):
    cfg = DfaConfig(QGrid([-0.01, 0.0, 0.01]), SCALES)
    surf = fluctuation_function(white_noise[0], cfg)
    lo, mid, hi = surf.fluct
    assert np.all(np.abs(lo / mid - 1) <= 1e-3)
    assert np.all(np.abs(hi / mid - 1) <= 1e-3)


def test_white_noise_f2_slope(white_noise):
    slopes = [dfa_hurst(s, SCALES).slope for s in white_noise]
    assert abs(np.mean(slopes) - 0.5) <= 0.05


def test_surface_monotone_in_q(cascade16, white_noise):
    q = QGrid.arange(-5, 5, 0.25)
    for s in (cascade16.series, white_noise[1]):
        surf = fluctuation_function(s, DfaConfig(q, SCALES))
        d = np.diff(surf.fluct, axis=0)
        assert np.all(d >= -1e-12 * surf.fluct[1:])


def test_scale_invariance(white_noise):
    s = white_noise[2]
    q = [-3.0, 0.0, 2.0, 4.0]
    surf, h, tau = mfdfa(s, q, SCALES)
    surf2, h2, tau2 = mfdfa(s.replace(3.5 * s.values), q, SCALES)
    np.testing.assert_allclose(surf2.fluct, 3.5 * surf.fluct, rtol=1e-12)
    np.testing.assert_allclose(h2.ordinate, h.ordinate, atol=1e-12)
    np.testing.assert_allclose(tau2.ordinate, tau.ordinate, atol=1e-12)


def test_cells_independent_of_grid_composition(white_noise):
    s = white_noise[3]
    full = fluctuation_function(s, DfaConfig(QGrid([-2.0, 0.0, 1.5, 3.0]), SCALES))
    one = fluctuation_function(s, DfaConfig(QGrid([1.5]), ScaleGrid([64, 256])))
    j = [list(SCALES.values).index(v) for v in (64, 256)]
    assert np.array_equal(one.fluct[0], full.fluct[2, j])


def test_one_sided_segmentation_counts():
    s = TimeSeries(np.random.default_rng(0).standard_normal(4096 + 10))
    two = fluctuation_function(s, DfaConfig(QGrid([2.0]), SCALES))
    one = fluctuation_function(s, DfaConfig(QGrid([2.0]), SCALES, two_sided_segmentation=False))
    assert list(two.segment_counts) == [2 * ((4096 + 10) // v) for v in SCALES.values]
    assert list(one.segment_counts) == [(4096 + 10) // v for v in SCALES.values]


def test_config_validation():
    with pytest.raises(ValueError, match="poly_order \\+ 2 <= min scale"):
        DfaConfig(QGrid([2.0]), ScaleGrid([4, 8, 16]), poly_order=3)
    with pytest.raises(ValueError):
        DfaConfig(QGrid([2.0]), SCALES, poly_order=-1)
    with pytest.raises(ValueError):
        fluctuation_function(white(1024, 0), DfaConfig(QGrid([2.0]), SCALES))


# -------------------------------------------------------------- h and tau

def test_fgn_h2(fgn07):
    for s in fgn07[:3]:
        _, h, _ = mfdfa(s, [2.0])
        assert 0.65 <= h.ordinate[0] <= 0.75


def test_white_noise_flat_h(white_noise):
    q = QGrid.arange(-3, 3, 0.5)
    hs = np.mean([mfdfa(s, q)[1].ordinate for s in white_noise], axis=0)
    assert np.max(np.abs(hs - 0.5)) <= 0.05


def test_white_noise_spectrum_is_narrow(white_noise):
    q = QGrid.arange(-5, 5, 0.5)
    widths = []
    for s in white_noise:
        f = legendre_transform_tau_to_f(mfdfa(s, q)[2])
        widths.append(f.abscissa[-1] - f.abscissa[0])
    assert np.mean(widths) <= 0.15


def test_cascade_h_decreasing_and_tau2(cascade16):
    _, h, tau = mfdfa(cascade16.series, QGrid.arange(1, 4, 0.5))
    assert np.all(np.diff(h.ordinate) < 0)
    assert tau.at(2.0) == pytest.approx(-np.log2(0.52), abs=0.1)


def test_tau_from_h():
    q = np.linspace(-2, 3, 11)
    tau = tau_from_h(SpectrumCurve("h_of_q", q, np.full(q.size, 0.5)))
    np.testing.assert_allclose(tau.ordinate, 0.5 * q - 1, atol=1e-15)
    assert tau.at(2.0) == 0.0
    h = SpectrumCurve("h_of_q", [-1.0, 0.0, 1.0], [0.9, 1e300, 0.3])
    t = tau_from_h(h)
    assert t.at(0.0) == -1.0
    assert t.at(1.0) == pytest.approx(0.3 - 1)
    with pytest.raises(ValueError):
        tau_from_h(SpectrumCurve("tau_of_q", [0.0], [1.0]))


# -------------------------------------------------------------- R/S

def test_rs_white_noise(white_noise):
    slopes = [rescaled_range(s).slope for s in white_noise]
    assert np.mean(slopes) == pytest.approx(0.5, abs=0.07)


@pytest.mark.slow
def test_rs_fgn08():
    for s in fgn_ensemble(0.8, 2 ** 16, range(3)):
        assert 0.72 <= rescaled_range(s).slope <= 0.88


def test_rs_constant_and_preconditions():
    with pytest.raises(ScalingError, match="no usable windows"):
        rescaled_range(TimeSeries(np.full(1024, 3.0)))
    with pytest.raises(ValueError):
        rescaled_range(white(1024, 0), ScaleGrid([4, 8, 16]))


def test_rs_counts_skipped_windows():
    x = white(4096, 4).values.copy()
    x[:256] = 1.0
    fit = rescaled_range(TimeSeries(x), ScaleGrid([16, 32, 64, 128]))
    assert any("skipped" in f for f in fit.flags)


# -------------------------------------------------------------- rolling

def test_rolling_white_noise_stays_near_half():
    trace = rolling_hurst(white(8192, 0), 1024, 1024)
    est = np.array([e for _, e in trace])
    assert len(trace) == 8
    assert np.all((est >= 0.4) & (est <= 0.6))


def test_rolling_full_window_equals_whole_series():
    s = white(2048, 9)
    trace = rolling_hurst(s, 2048, 17)
    assert len(trace) == 1
    assert trace[0][0] == 2047
    from mfscaling.mfdfa import default_scales
    assert trace[0][1] == dfa_hurst(s, default_scales(2048)).slope
    rs = rolling_hurst(s, 2048, 1, "rs")
    assert rs[0][1] == rescaled_range(s, default_scales(2048)).slope


def test_rolling_constant_window_is_missing_not_dropped():
    x = white(2048, 1).values.copy()
    x[:512] = 2.0
    trace = rolling_hurst(TimeSeries(x), 512, 256, "rs")
    assert len(trace) == 7
    assert np.isnan(trace[0][1])
    assert np.isfinite(trace[-1][1])


def test_rolling_splice_crosses_half():
    a = fgn_ensemble(0.3, 4096, [5])[0].values
    b = fgn_ensemble(0.8, 4096, [6])[0].values
    trace = rolling_hurst(TimeSeries(np.concatenate((a, b))), 1024, 256)
    est = np.array([e for _, e in trace])
    assert est[0] < 0.5 < est[-1]


def test_rolling_preconditions():
    s = white(1024, 0)
    with pytest.raises(ValueError):
        rolling_hurst(s, 128, 1)
    with pytest.raises(ValueError):
        rolling_hurst(s, 2048, 1)
    with pytest.raises(ValueError):
        rolling_hurst(s, 512, 0)
    with pytest.raises(ValueError):
        rolling_hurst(s, 512, 1, "wavelet")
