import math

import numpy as np
import pytest

from mfscaling.core import QGrid
from mfscaling.spectra import cascade_measures, partition_function
from mfscaling.synth import (GeneratorSpec, RandomStream, analytic_tau_cascade,
                             fgn_autocovariance, fgn_ensemble, generate,
                             hosking_fgn)


def raw_words(seed, n):
    return np.random.Philox(key=seed).random_raw(n)


# -------------------------------------------------------------- random stream

def test_uniform_formula_from_raw_words():
    w = raw_words(123, 10)
    expect = [((int(v) >> 11) + 0.5) / 2 ** 53 for v in w]
    assert RandomStream(123).uniform(10).tolist() == expect


def test_normal_is_box_muller_on_uniform_pairs():
    w = raw_words(5, 6)
    u = [((int(v) >> 11) + 0.5) / 2 ** 53 for v in w]
    expect = []
    for u1, u2 in zip(u[0::2], u[1::2]):
        r = math.sqrt(-2 * math.log(u1))
        expect += [r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)]
    np.testing.assert_allclose(RandomStream(5).normal(6), expect, rtol=1e-15, atol=1e-15)
    # odd length keeps the cosine branch of the final pair
    np.testing.assert_array_equal(RandomStream(5).normal(5), RandomStream(5).normal(6)[:5])


def test_levy_first_sample_from_formula():
    u = [((int(v) >> 11) + 0.5) / 2 ** 53 for v in raw_words(9, 2048)]
    mu, v, w = 1.5, math.pi * (u[0] - 0.5), -math.log(u[1024])
    x0 = (math.sin(mu * v) / math.cos(v) ** (1 / mu)
          * (math.cos((1 - mu) * v) / w) ** ((1 - mu) / mu))
    got = generate(GeneratorSpec("levy", 1024, 9, {"mu": 1.5})).series.values[0]
    assert got == pytest.approx(x0, rel=1e-13)


def test_cascade_split_order_from_formula():
    u = [((int(v) >> 11) + 0.5) / 2 ** 53 for v in raw_words(2, 3)]
    g = generate(GeneratorSpec("binomial_cascade", seed=2, params={"a": 0.7, "depth": 10}))
    first = 0.7 if u[0] < 0.5 else 0.3
    assert g.box_masses[1][0] == pytest.approx(first)
    second = 0.7 if u[1] < 0.5 else 0.3
    assert g.box_masses[2][0] == pytest.approx(first * second)


def test_seed_range():
    RandomStream(2 ** 64 - 1).uniform(1)
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        GeneratorSpec("gaussian_white", 1024, 2 ** 64)


# -------------------------------------------------------------- GeneratorSpec validation

@pytest.mark.parametrize("kw", [
    dict(model="pink"),
    dict(model="gaussian_white", length=1000),
    dict(model="gaussian_white", length=512),
    dict(model="fgn", params={"H": 1.0}),
    dict(model="levy", params={"mu": 2.5}),
    dict(model="binomial_cascade", params={"a": 0.5, "depth": 10}),
    dict(model="binomial_cascade", params={"a": 0.6, "depth": 9}),
])
def test_invalid_specs(kw):
    with pytest.raises(ValueError):
        GeneratorSpec(**kw)


def test_cascade_length_follows_depth():
    assert GeneratorSpec("binomial_cascade", params={"a": 0.6, "depth": 11}).length == 2048
    assert GeneratorSpec("binomial_cascade", 4096).params["depth"] == 12


# -------------------------------------------------------------- generators

def test_white_noise_moments():
    x = generate(GeneratorSpec("gaussian_white", 2 ** 16, 42)).series.values
    assert abs(x.mean()) <= 4 / math.sqrt(x.size)
    assert x.var() == pytest.approx(1.0, rel=0.05)


def test_brownian_is_cumsum_of_white():
    w = generate(GeneratorSpec("gaussian_white", 1024, 8)).series.values
    b = generate(GeneratorSpec("brownian", 1024, 8)).series.values
    np.testing.assert_array_equal(b, np.cumsum(w))


def test_cascade_masses_exact():
    a = 0.6
    g = generate(GeneratorSpec("binomial_cascade", seed=4, params={"a": a, "depth": 10}))
    assert len(g.series) == 1024
    assert np.array_equal(g.series.values, g.box_masses[10])
    for k in range(11):
        allowed = np.array([a ** i * (1 - a) ** (k - i) for i in range(k + 1)])
        # nearest admissible mass per box; pow rounding differs by an ulp at most
        rel = np.abs(g.box_masses[k][:, None] / allowed[None, :] - 1)
        assert np.all(rel.min(axis=1) <= 1e-14)
        assert abs(math.fsum(g.box_masses[k]) - 1.0) <= 1e-12
        # multiset is seed independent: i factors of a occur C(k, i) times
        hits = np.bincount(rel.argmin(axis=1), minlength=k + 1)
        assert hits.tolist() == [math.comb(k, i) for i in range(k + 1)]


def test_cascade_parent_child_consistency():
    g = generate(GeneratorSpec("binomial_cascade", seed=6, params={"a": 0.8, "depth": 10}))
    for k in range(1, 11):
        pairs = g.box_masses[k].reshape(-1, 2).sum(axis=1)
        np.testing.assert_allclose(pairs, g.box_masses[k - 1], rtol=1e-14)


def test_fgn_half_is_white():
    x = generate(GeneratorSpec("fgn", 2 ** 16, 3, {"H": 0.5})).series.values
    r1 = np.corrcoef(x[:-1], x[1:])[0, 1]
    assert abs(r1) <= 0.02


def test_hosking_matches_cholesky():
    n, h = 64, 0.73
    z = np.random.default_rng(0).standard_normal((3, n))
    k = np.arange(n)
    cov = fgn_autocovariance(h, k[:, None] - k[None, :])
    chol = np.linalg.cholesky(cov)
    np.testing.assert_allclose(hosking_fgn(h, z), z @ chol.T, atol=1e-12)


def test_ensemble_matches_generate():
    e = fgn_ensemble(0.6, 1024, [1, 2])
    for s, path in zip([1, 2], e):
        single = generate(GeneratorSpec("fgn", 1024, s, {"H": 0.6})).series.values
        np.testing.assert_allclose(path.values, single, atol=1e-12)


def test_determinism():
    for spec in (GeneratorSpec("gaussian_white", 1024, 1),
                 GeneratorSpec("fgn", 1024, 1, {"H": 0.3}),
                 GeneratorSpec("levy", 1024, 1, {"mu": 1.2}),
                 GeneratorSpec("binomial_cascade", seed=1, params={"a": 0.6, "depth": 10})):
        a, b = generate(spec).series.values, generate(spec).series.values
        assert a.tobytes() == b.tobytes()
    assert not np.array_equal(generate(GeneratorSpec("gaussian_white", 1024, 1)).series.values,
                              generate(GeneratorSpec("gaussian_white", 1024, 2)).series.values)


@pytest.mark.slow
@pytest.mark.parametrize("hurst", [0.3, 0.7])
def test_fgn_autocovariance_within_three_standard_errors(hurst):
    n = 2 ** 17
    x = generate(GeneratorSpec("fgn", n, 11, {"H": hurst})).series.values
    gam = fgn_autocovariance(hurst, np.arange(n + 9))
    j = np.arange(-(n - 1), n)
    g = fgn_autocovariance(hurst, j)
    for lag in range(1, 9):
        est = float(x[:-lag] @ x[lag:]) / n
        # Bartlett's large-sample variance of a known-mean autocovariance
        var = float(np.sum(g ** 2 + fgn_autocovariance(hurst, j + lag)
                           * fgn_autocovariance(hurst, j - lag))) / n
        assert abs(est - gam[lag]) <= 3 * math.sqrt(var), lag


def test_levy_tail_slope():
    n = 2 ** 18
    for seed in range(3):
        x = np.abs(generate(GeneratorSpec("levy", n, seed, {"mu": 1.5})).series.values)
        xs = np.sort(x)[::-1]
        ranks = np.arange(n // 1000, n // 100)
        surv = (ranks + 1) / n
        slope = np.polyfit(np.log(xs[ranks]), np.log(surv), 1)[0]
        assert slope == pytest.approx(-1.5, abs=0.2)


# -------------------------------------------------------------- closed form

def test_analytic_tau():
    t = analytic_tau_cascade(0.6, [0.0, 1.0, 2.0])
    assert t.ordinate[0] == -1.0 and t.ordinate[1] == 0.0
    assert t.ordinate[2] == pytest.approx(0.9434, abs=1e-4)
    for a in (0.55, 0.7, 0.9):
        assert analytic_tau_cascade(a, [1.0]).ordinate[0] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        analytic_tau_cascade(0.4, [1.0])


def test_cascade_self_consistency():
    g = generate(GeneratorSpec("binomial_cascade", seed=0, params={"a": 0.6, "depth": 12}))
    q = QGrid.arange(-4, 4, 0.1)
    tau = partition_function(cascade_measures(g.box_masses, range(1, 13)), q)
    assert np.max(np.abs(tau.ordinate - analytic_tau_cascade(0.6, q).ordinate)) <= 1e-3
