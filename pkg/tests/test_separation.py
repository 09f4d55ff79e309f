import math

import numpy as np
import pytest

import oracles
from macfb import bounds, capacity, separation, uncoded
from macfb.model import ChannelParams, DistortionPair
from macfb.ratedist import oohama_contains, rd_joint


def test_trivial_pair_zero_rates():
    rep = separation.separation_achievable(1, 0.5, DistortionPair(1, 1), ChannelParams(1, 1, 1))
    assert rep.achievable
    rates, rb = rep.witness
    assert (rates.r1, rates.r2) == (0.0, 0.0)


def test_threshold_uncoded_point_not_separable():
    ch = ChannelParams.symmetric(2 / 3)
    assert not separation.separation_achievable(1, 0.5, DistortionPair(0.5, 0.5), ch).achievable
    assert not oracles.separation_grid(1, 0.5, 0.5, 0.5, 2 / 3, 2 / 3, 1, slack=1e-3)


def test_beyond_full_cooperation_not_separable():
    ch = ChannelParams(1, 2, 1)
    full = 0.5 * math.log2(1 + (3 + 2 * math.sqrt(2)))
    rng = np.random.default_rng(0)
    hits = 0
    for _ in range(200):
        rho = rng.uniform(0, 0.99)
        d = rng.uniform(0.01, 0.5, 2)
        if rd_joint(1, rho, d) > full:
            hits += 1
            assert not separation.separation_achievable(1, rho, d, ch).achievable
    assert hits > 10


def test_witness_passes_both_regions():
    rng = np.random.default_rng(1)
    found = 0
    for _ in range(300):
        rho = rng.uniform(0, 0.99)
        ch = ChannelParams(*rng.uniform(0.1, 5, 2), 1.0)
        d = rng.uniform(0.05, 1, 2)
        rep = separation.separation_achievable(1, rho, d, ch)
        if rep.achievable:
            found += 1
            rates, rb = rep.witness
            assert oohama_contains(rates, d, rho, tol=1e-9)
            assert min(capacity.pentagon_slacks(rates, ch, rb)) >= -1e-9
        else:
            assert rep.witness is None
    assert found > 50


def test_sandwich_with_necessary_condition():
    rng = np.random.default_rng(2)
    for _ in range(300):
        rho = rng.uniform(0, 0.99)
        ch = ChannelParams(*10 ** rng.uniform(-1, 1, 2), 1.0)
        d = rng.uniform(0.05, 1, 2)
        if separation.separation_achievable(1, rho, d, ch).achievable:
            assert bounds.necessary_condition(1, rho, d, ch).feasible


def test_symmetric_uncorrelated_formula():
    for snr in (0.1, 1.0, 10.0):
        rate, _, _ = oracles.symmetric_rate_grid(snr, 1.0, points=100_001)
        d = separation.symmetric_separation_distortion(1, 0.0, snr, 1)
        assert d <= 2 ** (-2 * rate) + 1e-12
        assert d == pytest.approx(2 ** (-2 * rate), rel=1e-5)
        # cooperation helps the sum constraint, so rho_bar = 0 alone is not optimal
        r0 = min(0.5 * math.log2(1 + snr), 0.25 * math.log2(1 + 2 * snr))
        assert d < 2 ** (-2 * r0)


def test_symmetric_matches_grid_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        rho, snr = rng.uniform(0, 0.99), 10 ** rng.uniform(-2, 4)
        rate, _, rates = oracles.symmetric_rate_grid(snr, 1.0)
        d_grid = separation.symmetric_distortion_at_rate(1, rho, rate)
        d = separation.symmetric_separation_distortion(1, rho, snr, 1)
        # golden section is never worse than the grid and at most one grid cell better
        dist = np.array([separation.symmetric_distortion_at_rate(1, rho, r) for r in rates])
        cell = np.max(np.abs(np.diff(dist)))
        assert d <= d_grid + 1e-12
        assert d_grid - d <= cell


def test_symmetric_matches_achievability_test():
    rng = np.random.default_rng(4)
    for _ in range(20):
        rho, snr = rng.uniform(0, 0.95), 10 ** rng.uniform(-1, 2)
        ch = ChannelParams.symmetric(snr)
        d = separation.symmetric_separation_distortion(1, rho, snr, 1)
        assert separation.separation_achievable(1, rho, (d * (1 + 1e-6),) * 2, ch).achievable
        assert not separation.separation_achievable(1, rho, (d * (1 - 1e-6),) * 2, ch).achievable


def test_symmetric_above_lower_bound():
    for rho in (0.0, 0.3, 0.6, 0.9):
        for snr in np.geomspace(1e-3, 1e6, 40):
            d = separation.symmetric_separation_distortion(1, rho, snr, 1)
            lb, _ = bounds.symmetric_lower_bound(1, rho, snr, 1)
            assert d >= lb - 1e-12
            if rho > 0 and snr <= uncoded.symmetric_threshold_snr(rho):
                assert d > lb + 1e-9


def test_per_user_floor_alone_undercuts_converse():
    # sigma2 (2^{-2R}(1 - rho^2) + rho^2 2^{-4R}) ignores the sum-rate
    # constraint; at high SNR it drops below the converse
    rho, snr = 0.5, 1e6
    _, _, rate = separation.symmetric_separation_point(1, rho, snr, 1)
    x = 2 ** (-2 * rate)
    floor_only = x * (1 - rho**2) + rho**2 * x * x
    lb, _ = bounds.symmetric_lower_bound(1, rho, snr, 1)
    assert floor_only < lb
    assert separation.symmetric_separation_distortion(1, rho, snr, 1) >= lb


def test_zero_power_limit():
    assert separation.symmetric_separation_distortion(1, 0.5, 1e-12, 1) == pytest.approx(1.0, abs=1e-9)


def test_dense_fallback(monkeypatch):
    monkeypatch.setattr(separation, "_is_unimodal", lambda values: False)
    d_dense, _, _ = separation.symmetric_separation_point(1, 0.4, 3.0, 1)
    monkeypatch.undo()
    assert d_dense == pytest.approx(separation.symmetric_separation_distortion(1, 0.4, 3.0, 1), rel=1e-5)


def test_high_snr_product_examples():
    rows = separation.high_snr_product_limit(1, 0.5, [ChannelParams(1, 1, 1e-6)])
    assert rows[0][-1] == pytest.approx(0.75, rel=0.02)
    rows = separation.high_snr_product_limit(1, 1.0, [ChannelParams(1, 1, n) for n in (1e-2, 1e-4, 1e-6)])
    assert rows[-1][-1] < rows[0][-1] and rows[-1][-1] < 1e-3
    # symmetric case: scaled product = (2 sqrt(P/N) D)^2
    for p in (10.0, 1e3):
        d = separation.symmetric_separation_distortion(1, 0.3, p, 1)
        row = separation.high_snr_product_limit(1, 0.3, [ChannelParams(p, p, 1)])[0]
        assert row[-1] == pytest.approx(4 * p * d * d, rel=1e-9)


def test_high_snr_product_asymmetric_tail():
    chans = [ChannelParams(1, 4, n) for n in (1e-4, 1e-6, 1e-8)]
    rows = separation.high_snr_product_limit(1, 0.6, chans, ratio=2.0)
    tail = [r[-1] for r in rows]
    assert abs(tail[-1] - 0.64) < abs(tail[0] - 0.64) + 1e-12
    assert tail[-1] == pytest.approx(0.64, rel=1e-3)


def test_optimal_pair_on_boundary():
    rng = np.random.default_rng(5)
    for _ in range(20):
        rho = rng.uniform(0, 0.95)
        ch = ChannelParams(*10 ** rng.uniform(-1, 1, 2), 1.0)
        ratio = 10 ** rng.uniform(-0.5, 0.5)
        pair, rates, rb = separation.separation_optimal_pair(1, rho, ch, ratio)
        if max(pair) >= 1:
            continue
        up = (pair.d1 * (1 + 1e-6), pair.d2 * (1 + 1e-6))
        down = (pair.d1 * (1 - 1e-6), pair.d2 * (1 - 1e-6))
        assert separation.separation_achievable(1, rho, up, ch).achievable
        assert not separation.separation_achievable(1, rho, down, ch).achievable


def test_frontier_above_necessary():
    ch = ChannelParams(0.8, 1.5, 1.0)
    d1s = [0.2, 0.4, 0.6, 0.8, 1.0]
    sep = separation.separation_frontier(1, 0.6, ch, d1s)
    nec = bounds.necessary_frontier(1, 0.6, ch, d1s)
    for a, b in zip(nec, sep):
        if b is not None:
            assert a is not None and b >= a * (1 - 1e-9)


def test_general_variance_scales():
    ch = ChannelParams(1, 2, 1)
    a = separation.separation_achievable(1, 0.4, (0.3, 0.5), ch)
    b = separation.separation_achievable(4, 0.4, (1.2, 2.0), ch)
    assert a.achievable == b.achievable and a.margin == pytest.approx(b.margin, abs=1e-12)
    assert separation.symmetric_separation_distortion(4, 0.4, 2, 1) == pytest.approx(
        4 * separation.symmetric_separation_distortion(1, 0.4, 2, 1))
