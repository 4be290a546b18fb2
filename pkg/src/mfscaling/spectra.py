"""Partition-function analysis of dyadic box measures and spectrum comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import QGrid, SpectrumCurve, TimeSeries, fit_loglog


@dataclass(frozen=True)
class BoxMeasure:
    """Probabilities of the 2**level dyadic boxes at box size 2**-level."""

    level: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.level < 0 or w.size != 2 ** self.level:
            raise ValueError("level %d needs %d weights, got %d"
                             % (self.level, 2 ** self.level, w.size))
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 (sum=%r)" % w.sum())
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def box_size(self) -> float:
        return 2.0 ** -self.level


def measure_from_series(series: TimeSeries, level: int) -> BoxMeasure:
    """Split the index range into 2**level equal boxes and normalize box sums.

    The series must already be non-negative (e.g. absolute increments).
    When N is not a multiple of 2**level, box j covers indices
    floor(j N / 2**level) up to floor((j+1) N / 2**level).
    """
    x = series.values
    nbox = 2 ** level
    if level < 1 or x.size < nbox:
        raise ValueError("need N >= 2**level and level >= 1")
    if np.any(x < 0):
        raise ValueError("measure needs non-negative values; convert first")
    bounds = (np.arange(nbox + 1) * x.size) // nbox
    sums = np.add.reduceat(x, bounds[:-1])
    total = sums.sum()
    if not total > 0:
        raise ValueError("null measure")
    return BoxMeasure(level, sums / total)


def _partition_sum(w: np.ndarray, q: float) -> float:
    pos = w[w > 0]
    logw = np.log(pos)
    a = q * logw
    amax = a.max()
    return float(np.exp(amax) * np.exp(a - amax).sum())


def partition_function(measures, q_grid) -> SpectrumCurve:
    """tau(q) as the slope of ln Z(q, s) against ln s over the given levels.

    Z(q, s) sums p_j**q over the non-empty boxes.  Empty boxes are excluded
    for every q (for q <= 0 this is a convention and is flagged).
    """
    measures = sorted(measures, key=lambda m: m.level)
    if len(measures) < 3:
        raise ValueError("need at least 3 levels")
    q = q_grid.values if isinstance(q_grid, QGrid) else QGrid(q_grid).values
    flags = []
    has_empty = any(np.any(m.weights == 0) for m in measures)
    if has_empty and np.any(q <= 0):
        flags.append("empty boxes excluded from partition sums for q <= 0")
    taus, diags = [], []
    for qi in q:
        pts = [(m.box_size, _partition_sum(m.weights, float(qi))) for m in measures]
        fit = fit_loglog(pts)
        tau = 0.0 if qi == 1 else fit.slope
        taus.append(tau)
        diags.append(fit)
    return SpectrumCurve("tau_of_q", q, taus, diags, flags)


def generalized_dimensions(tau: SpectrumCurve) -> SpectrumCurve:
    """D(q) = tau(q) / (q - 1); at q = 1 the central difference of tau."""
    if tau.kind != "tau_of_q":
        raise ValueError("expected a tau_of_q curve, got %s" % tau.kind)
    q, t = tau.abscissa, tau.ordinate
    d = np.empty_like(t)
    flags = list(tau.flags)
    keep = np.ones(q.size, dtype=bool)
    for i, qi in enumerate(q):
        if qi != 1:
            d[i] = t[i] / (qi - 1.0)
        elif 0 < i < q.size - 1:
            d[i] = (t[i + 1] - t[i - 1]) / (q[i + 1] - q[i - 1])
        else:
            keep[i] = False
            flags.append("D(1) omitted: q = 1 lies on the grid boundary")
    return SpectrumCurve("D_of_q", q[keep], d[keep],
                         [x for x, k in zip(tau.diagnostics, keep) if k], flags)


def _as_tau(curve: SpectrumCurve) -> SpectrumCurve:
    if curve.kind in ("h_of_q", "delta_of_q"):
        q = curve.abscissa
        t = q * curve.ordinate - 1.0
        return SpectrumCurve("tau_of_q", q, t, list(curve.diagnostics), list(curve.flags))
    return curve


def discontinuities(curve: SpectrumCurve, factor: float = 5.0) -> list:
    """Indices i where |y[i+1] - y[i]| exceeds ``factor`` x the median jump."""
    jumps = np.abs(np.diff(curve.ordinate))
    if jumps.size < 2:
        return []
    med = float(np.median(jumps))
    return np.flatnonzero(jumps > factor * med).tolist()


@dataclass
class SpectrumComparison:
    kind: str
    abscissa: np.ndarray
    a: np.ndarray
    b: np.ndarray
    max_abs_deviation: float
    support_width_a: float
    support_width_b: float
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "max_abs_deviation": self.max_abs_deviation,
            "support_width_a": self.support_width_a,
            "support_width_b": self.support_width_b,
            "overlap": [float(self.abscissa[0]), float(self.abscissa[-1])],
            "flags": list(self.flags),
        }


def compare_spectra(a: SpectrumCurve, b: SpectrumCurve, window=None) -> SpectrumComparison:
    """Pointwise comparison of two spectra on their common abscissa range.

    h(q) and delta(q) are mapped to tau(q) = q x - 1 first, so any pair of
    q-indexed curves can be compared; f(alpha) only compares with f(alpha).
    Both curves are linearly interpolated onto the union of their abscissae
    inside the overlap (optionally narrowed to ``window``).
    """
    # jumps are judged on the curves as supplied, before any mapping to tau
    flags = []
    for name, c in (("a", a), ("b", b)):
        idx = discontinuities(c)
        if idx:
            flags.append("discontinuity in %s near %s=%g" % (
                name, "alpha" if c.kind == "f_of_alpha" else "q", c.abscissa[idx[0]]))
    a, b = _as_tau(a), _as_tau(b)
    if a.kind != b.kind:
        raise ValueError("incompatible spectrum kinds: %s vs %s" % (a.kind, b.kind))
    lo = max(a.abscissa[0], b.abscissa[0])
    hi = min(a.abscissa[-1], b.abscissa[-1])
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    if lo > hi:
        raise ValueError("no overlap")
    x = np.union1d(a.abscissa, b.abscissa)
    x = x[(x >= lo) & (x <= hi)]
    ya = np.interp(x, a.abscissa, a.ordinate)
    yb = np.interp(x, b.abscissa, b.ordinate)
    dev = float(np.max(np.abs(ya - yb))) if x.size else 0.0
    return SpectrumComparison(a.kind, x, ya, yb, dev,
                              float(np.ptp(a.abscissa)), float(np.ptp(b.abscissa)),
                              flags)


def cascade_measures(box_masses: dict, levels) -> list:
    """BoxMeasure objects for selected levels of a generator's exact masses."""
    out = []
    for n in levels:
        out.append(BoxMeasure(n, np.asarray(box_masses[n], dtype=float)))
    return out


def partition_spectrum(measures, q_grid):
    """Convenience: ``(tau, D)`` curves from a sequence of box measures."""
    tau = partition_function(measures, q_grid)
    return tau, generalized_dimensions(tau)

