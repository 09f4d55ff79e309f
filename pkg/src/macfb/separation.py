"""Source-channel separation: two-terminal source code over the feedback MAC.

A pair is achievable by separation iff some rate pair lies both in the
two-terminal rate region of the pair and in one of the capacity pentagons.
The two-terminal constraints only get easier as rates grow, so it is
enough to search the Pareto face of each pentagon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import capacity
from .model import DistortionPair, RatePair, check_correlation, check_variance
from .ratedist import oohama_sum_requirement, sum_rate_distortion_product

GRID_POINTS = 201
GOLDEN_TOL = 1e-10
MARGIN_TOL = 1e-12
PRESCAN_POINTS = 33
DENSE_POINTS = 100_000

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SeparationReport:
    achievable: bool
    witness: tuple | None  # (RatePair, rho_bar)
    margin: float


def golden_max(f, a, b, tol=GOLDEN_TOL):
    """Golden-section search for the maximizer of a unimodal f on [a, b]."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _need(rho, d, other_rate):
    # rate user i needs given the other user's rate, unit variances
    q = rho * rho
    arg = (1.0 - q * (1.0 - np.exp2(-2.0 * other_rate))) / d
    return np.maximum(0.0, 0.5 * np.log2(arg))


def _face_margin(rho, d1, d2, req_sum, c1, c2, cs, iters=100):
    """Best worst-case two-terminal slack on the Pareto face of each pentagon.

    c1, c2, cs are arrays of pentagon bounds. Returns (margin, r1, r2).
    """
    c1, c2, cs = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (c1, c2, cs)))
    total = np.minimum(cs, c1 + c2)
    lo = np.maximum(0.0, total - c2)
    hi = np.minimum(c1, total)

    def g1(r):
        return r - _need(rho, d1, total - r)

    def g2(r):
        return (total - r) - _need(rho, d2, r)

    # g1 rises and g2 falls along the face; the best point balances them
    f_lo = g1(lo) - g2(lo)
    f_hi = g1(hi) - g2(hi)
    a, b = lo.copy(), hi.copy()
    for _ in range(iters):
        m = 0.5 * (a + b)
        up = g1(m) - g2(m) > 0.0
        b = np.where(up, m, b)
        a = np.where(up, a, m)
    r1 = np.where(f_hi <= 0.0, hi, np.where(f_lo >= 0.0, lo, 0.5 * (a + b)))
    margin = np.minimum(np.minimum(g1(r1), g2(r1)), total - req_sum)
    return margin, r1, total - r1


def _need_scalar(q, d, other_rate):
    return max(0.0, 0.5 * math.log2((1.0 - q * (1.0 - 2.0 ** (-2.0 * other_rate))) / d))


def _face_margin_scalar(rho, d1, d2, req_sum, c1, c2, cs):
    # scalar twin of _face_margin, solving the balance with Brent's method
    q = rho * rho
    total = min(cs, c1 + c2)
    lo, hi = max(0.0, total - c2), min(c1, total)

    def gap(r):
        return (r - _need_scalar(q, d1, total - r)) - ((total - r) - _need_scalar(q, d2, r))

    if gap(hi) <= 0.0:
        r1 = hi
    elif gap(lo) >= 0.0:
        r1 = lo
    else:
        r1 = optimize.brentq(gap, lo, hi, xtol=1e-15, rtol=1e-15)
    r2 = total - r1
    margin = min(r1 - _need_scalar(q, d1, r2), r2 - _need_scalar(q, d2, r1), total - req_sum)
    return margin, r1, r2


def separation_achievable(sigma2, rho, d, channel):
    """Decide whether separation reaches (d1, d2) on this channel.

    Searches rho_bar on a 201-point grid, then refines the best cell by
    golden section. The witness is a rate pair and rho_bar whose pentagon
    contains it.
    """
    check_variance(sigma2)
    check_correlation(rho)
    d1, d2 = (min(x / sigma2, 1.0) for x in d)
    if d1 >= 1.0 and d2 >= 1.0:
        return SeparationReport(True, (RatePair(0.0, 0.0), 0.0), 0.0)
    req_sum = oohama_sum_requirement(rho, d1, d2)

    def margin_at(rb):
        c1, c2, cs = capacity.pentagon_bounds_array(channel, rb)
        return _face_margin(rho, d1, d2, req_sum, c1, c2, cs)

    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    m, r1, r2 = margin_at(grid)
    k = int(np.argmax(m))
    best = (float(m[k]), float(grid[k]), float(r1[k]), float(r2[k]))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, GRID_POINTS - 1)]

    def margin_scalar(t):
        return _face_margin_scalar(rho, d1, d2, req_sum, *capacity.pentagon_bounds(channel, t))

    rb, _ = golden_max(lambda t: margin_scalar(t)[0], float(a), float(b))
    mr, rr1, rr2 = margin_scalar(rb)
    if float(mr) > best[0]:
        best = (float(mr), rb, float(rr1), float(rr2))
    margin, rb, x1, x2 = best
    if margin >= -MARGIN_TOL:
        return SeparationReport(True, (RatePair(max(x1, 0.0), max(x2, 0.0)), rb), margin)
    return SeparationReport(False, None, margin)


def symmetric_distortion_at_rate(sigma2, rho, rate):
    """Smallest common distortion the two-terminal code reaches with both rates equal."""
    x = 2.0 ** (-2.0 * rate)
    # the sum-rate constraint D^2 >= product dominates the per-user floor
    return sigma2 * x * math.sqrt(1.0 - rho * rho + rho * rho * x * x)


def symmetric_rate(p, n, rho_bar):
    """Largest common rate inside the symmetric pentagon at cooperation rho_bar."""
    return min(0.5 * math.log2(1.0 + p * (1.0 - rho_bar * rho_bar) / n),
               0.25 * math.log2(1.0 + 2.0 * p * (1.0 + rho_bar) / n))


def _is_unimodal(values):
    # one descent followed by one ascent, ignoring flat steps
    diffs = np.sign(np.diff(values))
    diffs = diffs[diffs != 0]
    return np.count_nonzero(np.diff(diffs) > 0) <= 1 and np.count_nonzero(np.diff(diffs) < 0) == 0


def symmetric_separation_point(sigma2, rho, p, n):
    """(distortion, rho_bar, rate) of the best symmetric separation scheme."""
    check_variance(sigma2)
    check_correlation(rho)

    def rate(t):
        return symmetric_rate(p, n, t)

    pre = np.linspace(0.0, 1.0, PRESCAN_POINTS)
    pre_rates = np.array([rate(t) for t in pre])
    if _is_unimodal(-pre_rates):
        k = int(np.argmax(pre_rates))
        a, b = pre[max(k - 1, 0)], pre[min(k + 1, PRESCAN_POINTS - 1)]
        t, r = golden_max(rate, float(a), float(b))
        if pre_rates[k] > r:
            t, r = float(pre[k]), float(pre_rates[k])
    else:
        dense = np.linspace(0.0, 1.0, DENSE_POINTS)
        vals = np.minimum(0.5 * np.log2(1.0 + p * (1.0 - dense ** 2) / n),
                          0.25 * np.log2(1.0 + 2.0 * p * (1.0 + dense) / n))
        k = int(np.argmax(vals))
        t, r = float(dense[k]), float(vals[k])
    return symmetric_distortion_at_rate(sigma2, rho, r), t, r


def symmetric_separation_distortion(sigma2, rho, p, n):
    return symmetric_separation_point(sigma2, rho, p, n)[0]


def _ray_distortion(sigma2, rho, ratio, c1, c2, cs):
    # smallest d1 with (d1, ratio * d1) reachable from the Pareto face
    q = rho * rho
    total = min(cs, c1 + c2)
    lo, hi = max(0.0, total - c2), min(c1, total)
    t = 2.0 ** (-2.0 * total)

    def floors(r1):
        return (sigma2 * (2.0 ** (-2.0 * r1) * (1.0 - q) + q * t),
                sigma2 * (2.0 ** (-2.0 * (total - r1)) * (1.0 - q) + q * t))

    def gap(r1):
        f1, f2 = floors(r1)
        return f1 - f2 / ratio

    # f1 falls and f2 rises with r1: balance them, or take the end of the face
    if gap(hi) >= 0.0:
        r1 = hi
    elif gap(lo) <= 0.0:
        r1 = lo
    else:
        r1 = optimize.brentq(gap, lo, hi, xtol=1e-15, rtol=1e-15)
    f1, f2 = floors(r1)
    prod = sum_rate_distortion_product(sigma2, rho, total)
    return max(f1, f2 / ratio, math.sqrt(prod / ratio)), (r1, total - r1)


def separation_optimal_pair(sigma2, rho, channel, ratio=1.0):
    """Best separation pair along the ray d2 = ratio * d1.

    Returns (DistortionPair, RatePair, rho_bar). The pair is exact while
    both coordinates stay below sigma2; past that the ray leaves the
    region where the two-terminal formulas apply.
    """
    check_variance(sigma2)
    check_correlation(rho)

    def d1_at(rb):
        return _ray_distortion(sigma2, rho, ratio, *capacity.pentagon_bounds(channel, rb))[0]

    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    vals = np.array([d1_at(float(t)) for t in grid])
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, GRID_POINTS - 1)]
    rb, neg = golden_max(lambda t: -d1_at(t), float(a), float(b))
    if -neg > vals[k]:
        rb = float(grid[k])
    d1, rates = _ray_distortion(sigma2, rho, ratio, *capacity.pentagon_bounds(channel, rb))
    return DistortionPair(d1, ratio * d1), RatePair(*rates), rb


def high_snr_product_limit(sigma2, rho, channels, ratio=1.0):
    """Rows (p1, p2, noise, d1, d2, scaled_product) along a channel sequence.

    scaled_product = (P1 + P2 + 2 sqrt(P1 P2)) / N * d1 * d2 tends to
    sigma2^2 (1 - rho^2) as the SNR grows.
    """
    rows = []
    for ch in channels:
        pair, _, _ = separation_optimal_pair(sigma2, rho, ch, ratio)
        full = (ch.p1 + ch.p2 + 2.0 * math.sqrt(ch.p1 * ch.p2)) / ch.noise
        rows.append((ch.p1, ch.p2, ch.noise, pair.d1, pair.d2, full * pair.d1 * pair.d2))
    return rows


def separation_frontier(sigma2, rho, channel, d1_values, rtol=1e-9):
    """For each d1, the smallest d2 <= sigma2 reachable by separation (None if none)."""
    out = []
    for d1 in d1_values:
        def ok(d2, d1=d1):
            return separation_achievable(sigma2, rho, DistortionPair(d1, d2), channel).achievable
        lo, hi = sigma2 * 1e-15, sigma2
        if not ok(hi):
            out.append(None)
            continue
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if ok(mid):
                hi = mid
            else:
                lo = mid
            if hi - lo <= rtol * hi:
                break
        out.append(hi)
    return out
