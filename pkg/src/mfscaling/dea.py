"""Diffusion entropy analysis with Rényi entropies.

Displacements X_j(t) are sums of t consecutive increments over every window
position.  Their histogram at each t gives a Rényi entropy S_q(t); for a
self-similar diffusion S_q(t) = B_q + delta(q) ln t, so delta(q) is the
slope against ln t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .core import (LogLogFit, QGrid, ScaleGrid, ScalingError, SpectrumCurve,
                   TimeSeries, fit_semilog)

# Scott's constant for a Gaussian reference density, 2 * 3**(1/3) * pi**(1/6)
SCOTT_CONSTANT = 3.4908
# refuse to allocate absurd dense histograms
MAX_BINS = 20_000_000
# |q - 1| below this is evaluated as the Shannon limit
_SHANNON_QTOL = 1e-9


class DegenerateSample(ScalingError):
    """All probability mass sits on a single point."""


@dataclass(frozen=True)
class BinRule:
    """Histogram rule: ``sturges``, ``scott``, ``freedman_diaconis``,
    ``fixed_width`` (with ``value`` = width) or ``fixed_count`` (``value`` =
    number of bins)."""

    name: str = "freedman_diaconis"
    value: Optional[float] = None

    def __post_init__(self):
        names = ("sturges", "scott", "freedman_diaconis", "fixed_width", "fixed_count")
        if self.name not in names:
            raise ValueError("unknown bin rule %r" % self.name)
        if self.name in ("fixed_width", "fixed_count"):
            if self.value is None or not self.value > 0:
                raise ValueError("%s needs a positive value" % self.name)
            if self.name == "fixed_count" and (int(self.value) != self.value
                                               or self.value < 2):
                raise ValueError("fixed_count needs an integer >= 2")

    @property
    def gives_count(self) -> bool:
        return self.name in ("sturges", "fixed_count")

    @classmethod
    def parse(cls, text: str) -> "BinRule":
        """Parse ``sturges``, ``scott``, ``fd``, ``count=k`` or ``width=w``."""
        text = text.strip().lower()
        if text in ("fd", "freedman_diaconis", "freedman-diaconis"):
            return cls("freedman_diaconis")
        if text in ("sturges", "scott"):
            return cls(text)
        key, _, val = text.partition("=")
        if key == "count" and val:
            return cls("fixed_count", float(int(val)))
        if key == "width" and val:
            return cls("fixed_width", float(val))
        raise ValueError("unrecognised bin rule %r" % text)


@dataclass(frozen=True)
class DataSummary:
    n: int
    stdev: float
    iqr: float
    data_range: float

    @classmethod
    def of(cls, samples) -> "DataSummary":
        x = np.asarray(samples, dtype=float)
        q25, q75 = np.percentile(x, [25, 75])
        return cls(x.size, float(np.std(x, ddof=1)) if x.size > 1 else 0.0,
                   float(q75 - q25), float(np.ptp(x)))


def bin_count(rule: Union[BinRule, str], summary: DataSummary) -> float:
    """Bin count (Sturges, fixed count) or bin width (the other rules)."""
    if isinstance(rule, str):
        rule = BinRule.parse(rule)
    n = summary.n
    if n < 2:
        raise ValueError("need at least 2 samples")
    if rule.name == "sturges":
        return float(math.ceil(1 + math.log2(n)))
    if rule.name == "scott":
        if not summary.stdev > 0:
            raise DegenerateSample("degenerate sample: zero standard deviation")
        return SCOTT_CONSTANT * summary.stdev * n ** (-1.0 / 3.0)
    if rule.name == "freedman_diaconis":
        if not summary.iqr > 0:
            raise DegenerateSample("degenerate sample: zero interquartile range")
        return 2.0 * summary.iqr * n ** (-1.0 / 3.0)
    return float(rule.value)


@dataclass
class HistogramSpec:
    """Uniform-width histogram of one sample.

    Bins are right-open except the last, which is closed.  ``width`` is the
    common bin width; ``edges`` are ``origin + k * width``.
    """

    rule: BinRule
    origin: float
    width: float
    counts: np.ndarray

    @property
    def n_bins(self) -> int:
        return self.counts.size

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.width * np.arange(self.n_bins + 1)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def histogram(samples, rule: Union[BinRule, str] = "fd") -> HistogramSpec:
    """Histogram over [min, max] with bins sized by ``rule``.

    Count rules split the range evenly; width rules use
    ``ceil(range / width)`` bins (at least 2) of the given width starting at
    the minimum.
    """
    if isinstance(rule, str):
        rule = BinRule.parse(rule)
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    lo, hi = float(x.min()), float(x.max())
    rng = hi - lo
    if not rng > 0:
        raise DegenerateSample("degenerate sample: all values identical")
    size = bin_count(rule, DataSummary.of(x))
    if rule.gives_count:
        nb = int(size)
        width = rng / nb
    else:
        width = size
        nb = max(2, math.ceil(rng / width))
    if nb > MAX_BINS:
        raise ScalingError("bin rule asks for %d bins; data too heavy-tailed "
                           "for a dense histogram" % nb)
    idx = np.floor((x - lo) / width).astype(np.int64)
    np.clip(idx, 0, nb - 1, out=idx)
    counts = np.bincount(idx, minlength=nb)
    return HistogramSpec(rule, lo, width, counts)


def renyi_entropy(hist: HistogramSpec, q: float, differential: bool = True) -> float:
    """Rényi entropy of order q in nats.

    The discrete part is ``ln(sum p**q) / (1 - q)`` over occupied bins
    (Shannon at q = 1).  With ``differential`` the bin width correction
    ``ln(width)`` is added so the value estimates the entropy of the
    underlying density.
    """
    counts = hist.counts[hist.counts > 0]
    total = counts.sum()
    if total == 0:
        raise ValueError("empty histogram")
    corr = math.log(hist.width) if differential else 0.0
    if counts.min() == counts.max():
        # equiprobable occupied bins: every order equals ln k
        return math.log(counts.size) + corr
    p = counts / total
    logp = np.log(p)
    if abs(q - 1.0) < _SHANNON_QTOL:
        s = -float(p @ logp)
    elif q == 0:
        s = math.log(counts.size)
    else:
        # ln sum p^q via log-sum-exp for stability at large q
        a = q * logp
        amax = a.max()
        s = (amax + math.log(np.exp(a - amax).sum())) / (1.0 - q)
    return s + corr


@dataclass
class DiffusionEnsemble:
    """Overlapping-window displacements for each window length t."""

    scales: np.ndarray
    displacements: dict

    def counts(self) -> dict:
        return {t: x.size for t, x in self.displacements.items()}


def collect_fluctuations(increments: TimeSeries, scale_grid: ScaleGrid) -> DiffusionEnsemble:
    """X_j(t) = sum of increments j..j+t-1 for every start j in [0, N - t]."""
    x = increments.values
    scale_grid.check_length(x.size)
    # integer-valued increments stay exact through the cumulative sum
    c = np.concatenate(([0.0], np.cumsum(x)))
    disp = {}
    for t in scale_grid.values:
        t = int(t)
        disp[t] = c[t:] - c[:-t]
    return DiffusionEnsemble(scale_grid.values.copy(), disp)


@dataclass
class EntropyScaling:
    q: float
    entropy_points: list
    fit: LogLogFit

    @property
    def delta(self) -> float:
        return self.fit.slope

    @property
    def intercept(self) -> float:
        return self.fit.intercept


@dataclass
class DeltaResult:
    curve: SpectrumCurve
    scalings: list
    warnings: list = field(default_factory=list)
    histograms: dict = field(default_factory=dict)


def default_dea_scales(n: int, count: int = 14) -> ScaleGrid:
    """Log-spaced window lengths from 4 to N/64.

    Longer windows leave too few independent displacements for a stable
    histogram even with overlapping windows.
    """
    return ScaleGrid.log_spaced(4, max(n // 64, 16), count)


def delta_spectrum(ensemble: DiffusionEnsemble, q_grid, rule: Union[BinRule, str] = "fd",
                   allow_negative_q: bool = False, fit_range=None) -> DeltaResult:
    """delta(q) as the slope of S_q(t) against ln t, one fit per q.

    Window lengths whose histogram is degenerate are dropped with a warning;
    q values left with fewer than three finite entropies are omitted and
    reported.
    """
    if isinstance(rule, str):
        rule = BinRule.parse(rule)
    q = q_grid.values if isinstance(q_grid, QGrid) else QGrid(q_grid).values
    if not allow_negative_q and np.any(q < 0):
        raise ValueError("negative q is excluded from DEA unless allow_negative_q is set")
    warnings = []
    hists = {}
    for t in ensemble.scales:
        t = int(t)
        try:
            hists[t] = histogram(ensemble.displacements[t], rule)
        except ScalingError as exc:
            warnings.append("t=%d dropped: %s" % (t, exc))
    if not hists:
        raise DegenerateSample("degenerate sample at every window length")
    qs, deltas, diags, scalings, flags = [], [], [], [], []
    for qi in q:
        pts = []
        for t, h in hists.items():
            s = renyi_entropy(h, float(qi))
            if np.isfinite(s):
                pts.append((t, s))
        try:
            fit = fit_semilog(pts, fit_range)
        except ScalingError as exc:
            msg = "q=%g omitted: %s" % (qi, exc)
            warnings.append(msg)
            flags.append(msg)
            continue
        qs.append(float(qi))
        deltas.append(fit.slope)
        diags.append(fit)
        scalings.append(EntropyScaling(float(qi), pts, fit))
    if not qs:
        raise ScalingError("no q value has three finite entropy points")
    curve = SpectrumCurve("delta_of_q", qs, deltas, diags, flags)
    return DeltaResult(curve, scalings, warnings, hists)


def dea(increments: TimeSeries, q=None, scales: Optional[ScaleGrid] = None,
        rule: Union[BinRule, str] = "fd", **kw) -> DeltaResult:
    """Convenience pipeline: fluctuation collection then delta(q)."""
    if q is None:
        q = QGrid.arange(0.5, 3, 0.25)
    if scales is None:
        scales = default_dea_scales(len(increments))
    return delta_spectrum(collect_fluctuations(increments, scales), q, rule, **kw)
