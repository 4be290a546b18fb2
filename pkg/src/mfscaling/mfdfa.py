"""Detrended fluctuation analysis, its multifractal extension and R/S.

The local fluctuation of a segment is the RMS of the residuals after a
least-squares polynomial fit to the profile; the global fluctuation F(q, s)
is the order-q generalized mean of the local values (logarithmic mean at
q = 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .core import (QGrid, ScaleGrid, ScalingError, SpectrumCurve, TimeSeries,
                   fit_loglog)

# local fluctuations below this fraction of the profile amplitude are zero
_ZERO_RTOL = 1e-10


@dataclass(frozen=True)
class DfaConfig:
    q_grid: QGrid
    scale_grid: ScaleGrid
    poly_order: int = 1
    two_sided_segmentation: bool = True

    def __post_init__(self):
        if self.poly_order < 0:
            raise ValueError("poly_order must be >= 0")
        if self.poly_order + 2 > self.scale_grid.values[0]:
            raise ValueError(
                "scale grid violates poly_order + 2 <= min scale "
                "(poly_order=%d, min scale=%d)"
                % (self.poly_order, self.scale_grid.values[0]))

    def validate(self, n: int):
        self.scale_grid.check_length(n)


def default_scales(n: int, smin: int = 16, count: int = 20) -> ScaleGrid:
    """Log-spaced scales from ``smin`` to N/4."""
    return ScaleGrid.log_spaced(smin, n // 4, count)


@dataclass
class FluctuationSurface:
    """F(q, s) on the (q, s) grid plus the pooled local fluctuations.

    ``fluct[i, j]`` is F(q_i, s_j), NaN where the cell is unusable (zero
    local fluctuations entering a q <= 0 mean, or all-zero segments).
    """

    q: np.ndarray
    scales: np.ndarray
    fluct: np.ndarray
    segment_counts: np.ndarray
    local: dict
    warnings: list = field(default_factory=list)

    @property
    def usable(self) -> np.ndarray:
        return np.isfinite(self.fluct)

    @property
    def degenerate(self) -> bool:
        return not self.usable.any()


def profile(series: TimeSeries) -> TimeSeries:
    """Cumulative sum of the mean-subtracted series."""
    x = series.values
    return series.replace(np.cumsum(x - x.mean()), label=series.label + ":profile")


@lru_cache(maxsize=256)
def _design(s: int, m: int) -> np.ndarray:
    # orthonormal basis of degree-<=m polynomials sampled on s points
    t = np.linspace(-1.0, 1.0, s)
    v = np.vander(t, m + 1, increasing=True)
    q, _ = np.linalg.qr(v)
    q.setflags(write=False)
    return q


def _detrended_rms(segments: np.ndarray, m: int) -> np.ndarray:
    s = segments.shape[1]
    basis = _design(s, m)
    resid = segments - (segments @ basis) @ basis.T
    return np.sqrt(np.mean(resid * resid, axis=1))


def local_fluctuation(prof, segment, poly_order: int = 1) -> float:
    """RMS residual of a degree-``poly_order`` fit to one profile segment.

    ``segment`` is ``(start, s)``; the segment covers ``prof[start:start+s]``.
    """
    y = prof.values if isinstance(prof, TimeSeries) else np.asarray(prof, float)
    start, s = int(segment[0]), int(segment[1])
    if s <= poly_order + 1:
        raise ValueError("segment of length %d cannot overdetermine a degree-%d fit"
                         % (s, poly_order))
    if start < 0 or start + s > y.size:
        raise ValueError("segment out of bounds")
    seg = y[start:start + s]
    f = float(_detrended_rms(seg[None, :], poly_order)[0])
    amp = float(np.max(np.abs(seg)))
    return 0.0 if f <= _ZERO_RTOL * amp else f


def segment_fluctuations(prof: np.ndarray, s: int, poly_order: int,
                         two_sided: bool = True) -> np.ndarray:
    """Local fluctuations of all disjoint segments of length ``s``.

    Segments are cut from the start and, when ``two_sided``, also from the
    end, so trailing samples are not discarded.
    """
    n = prof.size
    ns = n // s
    segs = prof[:ns * s].reshape(ns, s)
    if two_sided:
        segs = np.vstack((segs, prof[n - ns * s:].reshape(ns, s)))
    f = _detrended_rms(segs, poly_order)
    amp = float(np.max(np.abs(prof))) if n else 0.0
    f[f <= _ZERO_RTOL * amp] = 0.0
    return f


def generalized_mean(f: np.ndarray, q: float) -> float:
    """Order-q mean of positive values; geometric mean at q = 0.

    Evaluated in log space so large |q| neither overflows nor underflows.
    Returns NaN when a zero value makes the mean undefined or zero.
    """
    f = np.asarray(f, dtype=float)
    if f.size == 0:
        return np.nan
    zero = f <= 0
    if zero.all() or (q <= 0 and zero.any()):
        return np.nan
    with np.errstate(divide="ignore"):
        logf = np.log(f)
    if q == 0:
        return float(np.exp(logf.mean()))
    return float(np.exp((logsumexp(q * logf) - np.log(f.size)) / q))


def fluctuation_function(series: TimeSeries, cfg: DfaConfig) -> FluctuationSurface:
    """F(q, s) of the series' profile over the configured grids."""
    cfg.validate(len(series))
    prof = profile(series).values
    q = cfg.q_grid.values
    scales = cfg.scale_grid.values
    fluct = np.full((q.size, scales.size), np.nan)
    counts = np.zeros(scales.size, dtype=np.int64)
    local = {}
    warnings = []
    for j, s in enumerate(scales):
        f = segment_fluctuations(prof, int(s), cfg.poly_order,
                                 cfg.two_sided_segmentation)
        local[int(s)] = f
        counts[j] = f.size
        for i, qi in enumerate(q):
            fluct[i, j] = generalized_mean(f, float(qi))
        nzero = int(np.count_nonzero(f == 0))
        if nzero:
            warnings.append("s=%d: %d of %d local fluctuations are zero"
                            % (s, nzero, f.size))
    for i, qi in enumerate(q):
        bad = ~np.isfinite(fluct[i])
        if bad.all():
            warnings.append("q=%g unusable: no usable scales" % qi)
        elif bad.any():
            warnings.append("q=%g: %d scale cells unusable (excluded from fit)"
                            % (qi, int(bad.sum())))
    if not np.isfinite(fluct).any():
        warnings.append("degenerate surface: all local fluctuations vanish")
    return FluctuationSurface(q.copy(), scales.copy(), fluct, counts, local, warnings)


def h_spectrum(surface: FluctuationSurface, fit_range=None) -> SpectrumCurve:
    """Generalized Hurst exponents h(q) as per-q log-log slopes of F(q, s).

    q values without three usable scales are omitted and listed in the
    curve's flags; if none survive, :class:`ScalingError` is raised.
    """
    qs, hs, diags, flags = [], [], [], []
    for i, q in enumerate(surface.q):
        ok = np.isfinite(surface.fluct[i])
        pts = list(zip(surface.scales[ok].tolist(), surface.fluct[i, ok].tolist()))
        try:
            fit = fit_loglog(pts, fit_range)
        except ScalingError as exc:
            flags.append("q=%g omitted: %s" % (q, exc))
            continue
        qs.append(q)
        hs.append(fit.slope)
        diags.append(fit)
    if not qs:
        raise ScalingError("q unusable: no q value has enough usable scales")
    return SpectrumCurve("h_of_q", qs, hs, diags, flags)


def tau_from_h(h: SpectrumCurve) -> SpectrumCurve:
    """Mass exponents tau(q) = q h(q) - 1 (so tau(0) = -1 exactly)."""
    if h.kind not in ("h_of_q", "delta_of_q"):
        raise ValueError("expected an h_of_q curve, got %s" % h.kind)
    q = h.abscissa
    tau = q * h.ordinate - 1.0
    tau[q == 0] = -1.0
    return SpectrumCurve("tau_of_q", q, tau, list(h.diagnostics), list(h.flags))


def mfdfa(series: TimeSeries, q=None, scales: Optional[ScaleGrid] = None,
          poly_order: int = 1, fit_range=None):
    """Convenience pipeline: returns ``(surface, h_curve, tau_curve)``."""
    if q is None:
        q = QGrid.arange(-5, 5, 0.5)
    elif not isinstance(q, QGrid):
        q = QGrid(q)
    if scales is None:
        scales = default_scales(len(series))
    cfg = DfaConfig(q, scales, poly_order)
    surface = fluctuation_function(series, cfg)
    h = h_spectrum(surface, fit_range)
    return surface, h, tau_from_h(h)


def dfa_hurst(series: TimeSeries, scales: Optional[ScaleGrid] = None,
              poly_order: int = 1, fit_range=None):
    """Second-order DFA fit; the slope is the Hurst exponent estimate."""
    if scales is None:
        scales = default_scales(len(series))
    cfg = DfaConfig(QGrid([2.0]), scales, poly_order)
    surface = fluctuation_function(series, cfg)
    ok = np.isfinite(surface.fluct[0])
    pts = zip(surface.scales[ok].tolist(), surface.fluct[0, ok].tolist())
    return fit_loglog(pts, fit_range)


def rescaled_range(series: TimeSeries, scale_grid: Optional[ScaleGrid] = None):
    """Classical R/S analysis over disjoint windows.

    For each window the demeaned cumulative sum's range is divided by the
    window's (population) standard deviation; window ratios are averaged per
    scale and the Hurst exponent is the log-log slope of the mean ratio
    against scale.  Zero-variance windows are skipped and counted in the
    fit's flags.
    """
    x = series.values
    if scale_grid is None:
        scale_grid = default_scales(x.size)
    if scale_grid.values[0] < 8:
        raise ValueError("rescaled range needs scales >= 8")
    scale_grid.check_length(x.size)
    pts, skipped = [], 0
    for s in scale_grid.values:
        s = int(s)
        ns = x.size // s
        w = x[:ns * s].reshape(ns, s)
        dev = w - w.mean(axis=1, keepdims=True)
        z = np.cumsum(dev, axis=1)
        r = z.max(axis=1) - z.min(axis=1)
        sd = np.sqrt(np.mean(dev * dev, axis=1))
        amp = np.max(np.abs(w), axis=1)
        good = sd > _ZERO_RTOL * np.maximum(amp, np.finfo(float).tiny)
        skipped += int(ns - good.sum())
        if good.any():
            pts.append((s, float(np.mean(r[good] / sd[good]))))
    if not pts:
        raise ScalingError("no usable windows")
    fit = fit_loglog(pts)
    if skipped:
        fit = replace(fit, flags=fit.flags + ("skipped %d zero-variance windows" % skipped,))
    return fit


def rolling_hurst(series: TimeSeries, window: int, step: int,
                  estimator: str = "dfa_h2", poly_order: int = 1):
    """Hurst estimates over sliding windows.

    Returns a list of ``(end_index, estimate)`` where ``end_index`` is the
    index of the window's last sample; windows whose estimate cannot be
    formed yield NaN rather than being dropped.
    """
    n = len(series)
    if window < 256:
        raise ValueError("window must be >= 256")
    if step < 1:
        raise ValueError("step must be >= 1")
    if window > n:
        raise ValueError("window %d exceeds series length %d" % (window, n))
    if estimator not in ("dfa_h2", "rs"):
        raise ValueError("unknown estimator %r" % estimator)
    scales = default_scales(window)
    out = []
    for start in range(0, n - window + 1, step):
        sub = series.replace(series.values[start:start + window])
        try:
            if estimator == "dfa_h2":
                est = dfa_hurst(sub, scales, poly_order).slope
            else:
                est = rescaled_range(sub, scales).slope
        except ScalingError:
            est = np.nan
        out.append((start + window - 1, est))
    return out
