"""Seeded synthetic series with analytically known scaling.

Random stream
-------------
All generators draw from a single Philox4x64-10 counter-based stream keyed by
the 64-bit seed (``numpy.random.Philox(key=seed)``, counter starting at 0),
consumed as raw 64-bit words in order.  Words are mapped to numbers with
fixed, language-neutral formulas so the series can be reproduced bit for bit
elsewhere:

* uniform on (0, 1):  ``((w >> 11) + 0.5) * 2**-53``
* standard normal:    Box-Muller on consecutive uniform pairs (u1, u2),
  ``r = sqrt(-2 ln u1)``, emitting ``r cos(2 pi u2)`` then ``r sin(2 pi u2)``;
  an odd final pair keeps only the cosine branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import QGrid, SpectrumCurve, TimeSeries

MODELS = ("gaussian_white", "brownian", "fgn", "binomial_cascade", "levy")

_TWO_PI = 2.0 * np.pi


class RandomStream:
    """Sequential reader over the Philox word stream for one seed."""

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self._bitgen = np.random.Philox(key=seed)

    def words(self, n: int) -> np.ndarray:
        return self._bitgen.random_raw(int(n))

    def uniform(self, n: int) -> np.ndarray:
        w = self.words(n)
        return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, n: int) -> np.ndarray:
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log(u[:, 0]))
        theta = _TWO_PI * u[:, 1]
        z = np.column_stack((r * np.cos(theta), r * np.sin(theta))).ravel()
        return z[:n]


@dataclass(frozen=True)
class GeneratorSpec:
    model: str
    length: int = 2 ** 16
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError("unknown model %r; choose from %s" % (self.model, MODELS))
        p = dict(self.params)
        if self.model == "binomial_cascade":
            depth = int(p.get("depth", 0) or int(np.log2(self.length)))
            p["depth"] = depth
            object.__setattr__(self, "length", 2 ** depth)
            a = float(p.get("a", 0.6))
            if not 0.5 < a < 1:
                raise ValueError("cascade weight a must lie in (0.5, 1)")
            p["a"] = a
        elif self.model == "fgn":
            h = float(p.get("H", 0.5))
            if not 0 < h < 1:
                raise ValueError("fGn Hurst exponent H must lie in (0, 1)")
            p["H"] = h
        elif self.model == "levy":
            mu = float(p.get("mu", 1.5))
            if not 0 < mu <= 2:
                raise ValueError("stability index mu must lie in (0, 2]")
            p["mu"] = mu
        n = int(self.length)
        if n < 2 ** 10 or n & (n - 1):
            raise ValueError("length must be a power of two >= 1024, got %d" % n)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "params", p)


@dataclass
class Generated:
    series: TimeSeries
    # level -> exact box masses, only for the cascade model
    box_masses: dict = None


def fgn_autocovariance(hurst: float, k) -> np.ndarray:
    k = np.abs(np.asarray(k, dtype=float))
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k ** h2 + np.abs(k - 1) ** h2)


def hosking_fgn(hurst: float, noise: np.ndarray) -> np.ndarray:
    """Exact fGn by sequential Gaussian conditioning (Durbin-Levinson).

    ``noise`` is an ``(m, n)`` array of independent standard normals; each
    row becomes one unit-variance fGn path.  Sample k is drawn from its exact
    conditional law given samples 0..k-1, so the cost is O(n**2) but the
    covariance is exact for every n.
    """
    noise = np.atleast_2d(np.asarray(noise, dtype=float))
    m, n = noise.shape
    gamma = fgn_autocovariance(hurst, np.arange(n))
    # time-reversed storage keeps every inner product on contiguous memory
    gamma_rev = gamma[::-1].copy()
    xr = np.empty((m, n))
    phi = np.zeros(n)
    prev = np.zeros(n)
    v = gamma[0]
    xr[:, n - 1] = np.sqrt(v) * noise[:, 0]
    for k in range(1, n):
        num = gamma[k] - prev[:k - 1] @ gamma_rev[n - k:n - 1]
        pkk = num / v
        if k > 1:
            np.multiply(prev[k - 2::-1], -pkk, out=phi[:k - 1])
            phi[:k - 1] += prev[:k - 1]
        phi[k - 1] = pkk
        v = v * (1.0 - pkk * pkk)
        mean = xr[:, n - k:] @ phi[:k]
        xr[:, n - 1 - k] = mean + np.sqrt(v) * noise[:, k]
        prev, phi = phi, prev
    return xr[:, ::-1].copy()


def binomial_cascade(a: float, depth: int, stream: RandomStream):
    """Leaf masses of a randomized dyadic binomial cascade.

    At every split the left child receives weight ``a`` or ``1 - a`` with
    probability 1/2 each, using one uniform per split, level by level from
    left to right.  Each box mass is evaluated as ``a**i * (1-a)**(k-i)`` from
    the number ``i`` of ``a`` factors on its path, so every level's masses are
    exact members of that set.

    Returns the leaf masses and a ``{level: masses}`` dict for levels
    0..depth.
    """
    b = 1.0 - a
    counts = np.zeros(1, dtype=np.int64)
    levels = {0: np.ones(1)}
    for k in range(1, depth + 1):
        left_a = stream.uniform(counts.size) < 0.5
        children = np.empty(2 * counts.size, dtype=np.int64)
        children[0::2] = counts + left_a
        children[1::2] = counts + ~left_a
        counts = children
        levels[k] = a ** counts.astype(float) * b ** (k - counts).astype(float)
    return levels[depth].copy(), levels


def chambers_mallows_stuck(mu: float, stream: RandomStream, n: int) -> np.ndarray:
    """Symmetric mu-stable variates (unit scale) from uniforms.

    Draws n uniforms for the angle, then n for the exponential variable.
    """
    v = np.pi * (stream.uniform(n) - 0.5)
    w = -np.log(stream.uniform(n))
    if mu == 1.0:
        return np.tan(v)
    return (np.sin(mu * v) / np.cos(v) ** (1.0 / mu)
            * (np.cos((1.0 - mu) * v) / w) ** ((1.0 - mu) / mu))


def generate(spec: GeneratorSpec) -> Generated:
    """Deterministic realization of ``spec``."""
    stream = RandomStream(spec.seed)
    n = spec.length
    p = spec.params
    label = spec.model
    masses = None
    if spec.model == "gaussian_white":
        values = stream.normal(n)
    elif spec.model == "brownian":
        values = np.cumsum(stream.normal(n))
    elif spec.model == "fgn":
        values = hosking_fgn(p["H"], stream.normal(n)[None, :])[0]
        label = "fgn(H=%g)" % p["H"]
    elif spec.model == "binomial_cascade":
        values, masses = binomial_cascade(p["a"], p["depth"], stream)
        label = "binomial_cascade(a=%g)" % p["a"]
    else:
        values = chambers_mallows_stuck(p["mu"], stream, n)
        label = "levy(mu=%g)" % p["mu"]
    return Generated(TimeSeries(values, label=label), masses)


def fgn_ensemble(hurst: float, length: int, seeds) -> list:
    """Several fGn paths sharing one Durbin-Levinson recursion.

    Equivalent in law and, up to BLAS summation order, in value to calling
    :func:`generate` per seed; much cheaper for many seeds.
    """
    noise = np.vstack([RandomStream(s).normal(length) for s in seeds])
    paths = hosking_fgn(hurst, noise)
    return [TimeSeries(row, label="fgn(H=%g)" % hurst) for row in paths]


def analytic_tau_cascade(a: float, q) -> SpectrumCurve:
    """Closed-form mass exponent of the binomial cascade, -log2(a^q + (1-a)^q)."""
    if not 0.5 < a < 1:
        raise ValueError("cascade weight a must lie in (0.5, 1)")
    qv = np.asarray(q.values if isinstance(q, QGrid) else q, dtype=float)
    tau = -np.log2(a ** qv + (1.0 - a) ** qv)
    return SpectrumCurve("tau_of_q", qv, tau)
