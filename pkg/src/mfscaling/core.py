"""Shared domain types and the regression / Legendre machinery.

Every scaling exponent in the package is the slope of an ordinary least
squares fit, either in log-log coordinates (fluctuation functions, partition
sums, R/S) or in semi-log coordinates (entropy against ln t).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

SPECTRUM_KINDS = ("h_of_q", "tau_of_q", "D_of_q", "delta_of_q", "f_of_alpha")

# relative tolerance used when collapsing numerically coincident alpha values
_ALPHA_COLLAPSE_RTOL = 1e-9


class ScalingError(ValueError):
    """A scaling statistic could not be estimated from the data."""


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled series with its tick lag.

    ``tick_lag`` is the sampling interval expressed in ``tick_unit``; it only
    labels the data and never enters an exponent.
    """

    values: np.ndarray
    tick_lag: float = 1.0
    tick_unit: str = "tick"
    label: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("series values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("series values must be finite")
        if not (np.isfinite(self.tick_lag) and self.tick_lag > 0):
            raise ValueError("tick_lag must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def replace(self, values, label=None) -> "TimeSeries":
        return TimeSeries(values, self.tick_lag, self.tick_unit,
                          self.label if label is None else label)


def _strictly_increasing(x: np.ndarray) -> bool:
    return bool(np.all(np.diff(x) > 0))


@dataclass(frozen=True)
class QGrid:
    """Strictly increasing moment orders q (q = 0 and q = 1 allowed)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise ValueError("q grid must be non-empty and finite")
        if not _strictly_increasing(v):
            raise ValueError("q grid must be strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def arange(cls, qmin: float, qmax: float, step: float) -> "QGrid":
        """Inclusive grid ``qmin, qmin+step, ..., qmax``.

        Values are rounded to 12 decimals so that e.g. ``q = 0`` and ``q = 1``
        land exactly on the grid.
        """
        if step <= 0:
            raise ValueError("q step must be positive")
        n = int(np.floor((qmax - qmin) / step + 1e-9)) + 1
        if n < 1:
            raise ValueError("empty q range")
        return cls(np.round(qmin + step * np.arange(n), 12))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class ScaleGrid:
    """Strictly increasing integer window sizes, all at least 4 ticks."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values))
        if v.size == 0:
            raise ValueError("scale grid is empty")
        if not np.all(v == np.round(v)):
            raise ValueError("scales must be integers")
        v = v.astype(np.int64)
        if not _strictly_increasing(v):
            raise ValueError("scale grid must be strictly increasing")
        if v[0] < 4:
            raise ValueError("scale grid minimum must be >= 4, got %d" % v[0])
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def log_spaced(cls, smin: int, smax: int, count: int) -> "ScaleGrid":
        """``count`` log-spaced scales between ``smin`` and ``smax``.

        Rounding collisions are merged, so fewer than ``count`` scales may be
        returned for narrow ranges.
        """
        if smax < smin:
            raise ValueError("scale range is empty")
        s = np.unique(np.round(np.geomspace(smin, smax, max(int(count), 1))))
        return cls(s.astype(np.int64))

    def check_length(self, n: int, min_segments: int = 4):
        if self.values[-1] * min_segments > n:
            raise ValueError(
                "largest scale %d exceeds N/%d for series of length %d"
                % (self.values[-1], min_segments, n))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class LogLogFit:
    """Result of a straight-line fit of one scaling relation.

    ``points`` holds the transformed coordinates actually regressed: for a
    power law these are ``(ln scale, ln value)``; for the semi-log entropy
    fits they are ``(ln t, S)``.
    """

    slope: float
    intercept: float
    r_squared: float
    stderr_slope: float
    points: tuple
    fit_range: tuple
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "stderr_slope": self.stderr_slope,
            "fit_range": list(self.fit_range),
            "points": [list(p) for p in self.points],
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogLogFit":
        return cls(d["slope"], d["intercept"], d["r_squared"],
                   d["stderr_slope"], tuple(tuple(p) for p in d["points"]),
                   tuple(d["fit_range"]), tuple(d.get("flags", ())))


@dataclass
class SpectrumCurve:
    """A sampled exponent curve: h(q), tau(q), D(q), delta(q) or f(alpha)."""

    kind: str
    abscissa: np.ndarray
    ordinate: np.ndarray
    diagnostics: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in SPECTRUM_KINDS:
            raise ValueError("unknown spectrum kind %r" % self.kind)
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.ordinate = np.asarray(self.ordinate, dtype=float)
        if self.abscissa.shape != self.ordinate.shape or self.abscissa.ndim != 1:
            raise ValueError("abscissa and ordinate must be 1-d and equal length")
        if not _strictly_increasing(self.abscissa):
            raise ValueError("abscissa must be strictly increasing")
        if not self.diagnostics:
            self.diagnostics = [None] * self.abscissa.size
        elif len(self.diagnostics) != self.abscissa.size:
            raise ValueError("one diagnostic entry per point is required")

    def __len__(self):
        return self.abscissa.size

    def at(self, x: float) -> float:
        """Ordinate at an abscissa value that lies on the grid."""
        idx = np.flatnonzero(np.isclose(self.abscissa, x, rtol=0, atol=1e-12))
        if idx.size == 0:
            raise KeyError(x)
        return float(self.ordinate[idx[0]])

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "abscissa": self.abscissa.tolist(),
            "ordinate": self.ordinate.tolist(),
            "diagnostics": [None if d is None else d.to_dict()
                            for d in self.diagnostics],
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumCurve":
        diags = [None if x is None else LogLogFit.from_dict(x)
                 for x in d.get("diagnostics") or []]
        return cls(d["kind"], d["abscissa"], d["ordinate"], diags,
                   list(d.get("flags", [])))


def _ols(x: np.ndarray, y: np.ndarray):
    n = x.size
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0:
        raise ScalingError("insufficient scales: all abscissae coincide")
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    resid = dy - slope * dx
    sse = float(resid @ resid)
    syy = float(dy @ dy)
    # residuals at the round-off floor count as an exact fit
    floor = n * (16 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(y))))) ** 2
    if sse <= floor or syy <= 0:
        r2 = 1.0
    else:
        r2 = min(max(1.0 - sse / syy, 0.0), 1.0)
    stderr = float(np.sqrt(sse / (n - 2) / sxx)) if n > 2 else 0.0
    return slope, intercept, r2, stderr


def _select(points, fit_range):
    pts = np.asarray(list(points), dtype=float)
    if pts.size == 0:
        pts = pts.reshape(0, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (scale, value) pairs")
    if fit_range is not None:
        lo, hi = fit_range
        keep = (pts[:, 0] >= lo) & (pts[:, 0] <= hi)
        pts = pts[keep]
    return pts


def fit_loglog(points: Iterable[Sequence[float]], fit_range=None) -> LogLogFit:
    """Fit ``value ∝ scale**slope`` by OLS on (ln scale, ln value).

    Parameters
    ----------
    points : iterable of (scale, value)
    fit_range : (min scale, max scale), optional
        Inclusive scale interval; the default uses every point.

    Raises
    ------
    ScalingError
        If a value inside the range is non-positive or fewer than three
        points remain.
    """
    pts = _select(points, fit_range)
    if pts.shape[0] and np.any(pts[:, 0] <= 0):
        raise ScalingError("non-positive scale")
    if pts.shape[0] and np.any(~(pts[:, 1] > 0)):
        raise ScalingError("non-positive scaling quantity")
    if pts.shape[0] < 3:
        raise ScalingError("insufficient scales: %d usable points" % pts.shape[0])
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept, r2, se = _ols(lx, ly)
    if not np.isfinite(slope):
        raise ScalingError("non-finite slope")
    return LogLogFit(slope, intercept, r2, se,
                     tuple(zip(lx.tolist(), ly.tolist())),
                     (float(pts[0, 0]), float(pts[-1, 0])))


def fit_semilog(points: Iterable[Sequence[float]], fit_range=None) -> LogLogFit:
    """Fit ``value = intercept + slope * ln(scale)``; values may be any sign."""
    pts = _select(points, fit_range)
    if pts.shape[0] and np.any(pts[:, 0] <= 0):
        raise ScalingError("non-positive scale")
    if pts.shape[0] and not np.all(np.isfinite(pts[:, 1])):
        raise ScalingError("non-finite scaling quantity")
    if pts.shape[0] < 3:
        raise ScalingError("insufficient scales: %d usable points" % pts.shape[0])
    lx = np.log(pts[:, 0])
    slope, intercept, r2, se = _ols(lx, pts[:, 1])
    return LogLogFit(slope, intercept, r2, se,
                     tuple(zip(lx.tolist(), pts[:, 1].tolist())),
                     (float(pts[0, 0]), float(pts[-1, 0])))


def second_differences(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Changes of successive chord slopes; <= 0 everywhere for concave data."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        return np.zeros(0)
    slopes = np.diff(y) / np.diff(x)
    return np.diff(slopes)


def is_concave(x, y, tol: float = 1e-6) -> bool:
    d2 = second_differences(x, y)
    scale = max(1.0, float(np.max(np.abs(y)))) if len(y) else 1.0
    return bool(np.all(d2 <= tol * scale))


def legendre_transform_tau_to_f(tau: SpectrumCurve, tol: float = 1e-6) -> SpectrumCurve:
    """Singularity spectrum f(alpha) from a sampled mass exponent tau(q).

    alpha(q) is the numerical derivative of tau (central differences,
    one-sided at the ends) and f = q*alpha - tau.  Output is sorted by alpha;
    alpha values equal to within round-off are merged keeping the largest f.

    A tau curve that is not concave is transformed anyway and the result is
    flagged, since such kinks usually come from the estimation itself.
    """
    if tau.kind != "tau_of_q":
        raise ValueError("expected a tau_of_q curve, got %s" % tau.kind)
    q, t = tau.abscissa, tau.ordinate
    if q.size < 5:
        raise ValueError("tau must be sampled on at least 5 q values")
    flags = list(tau.flags)
    if not is_concave(q, t, tol):
        flags.append("non-concave spectrum - estimation artifact")

    alpha = np.gradient(t, q, edge_order=1)
    f = q * alpha - t

    order = np.argsort(alpha, kind="stable")
    alpha, f = alpha[order], f[order]
    a_out, f_out = [alpha[0]], [f[0]]
    span = max(float(np.ptp(alpha)), float(np.max(np.abs(alpha))), 1.0)
    for a, v in zip(alpha[1:], f[1:]):
        if a - a_out[-1] <= _ALPHA_COLLAPSE_RTOL * span:
            f_out[-1] = max(f_out[-1], v)
        else:
            a_out.append(a)
            f_out.append(v)
    return SpectrumCurve("f_of_alpha", np.array(a_out), np.array(f_out),
                         flags=flags)


def legendre_transform_f_to_tau(f: SpectrumCurve, q) -> SpectrumCurve:
    """Mass exponent tau(q) = min over sampled alpha of [q*alpha - f(alpha)].

    The minimum is the extremum that inverts :func:`legendre_transform_tau_to_f`
    for concave spectra (tau(q) = q*alpha - f at the tangent point).
    """
    if f.kind != "f_of_alpha":
        raise ValueError("expected an f_of_alpha curve, got %s" % f.kind)
    if f.abscissa.size == 0:
        raise ValueError("empty spectrum")
    qv = np.asarray(q.values if isinstance(q, QGrid) else q, dtype=float)
    vals = np.min(qv[:, None] * f.abscissa[None, :] - f.ordinate[None, :], axis=1)
    return SpectrumCurve("tau_of_q", qv, vals, flags=list(f.flags))
