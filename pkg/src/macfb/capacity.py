"""Feedback capacity region of the two-user Gaussian MAC.

For a cooperation parameter rho_bar in [0, 1] the achievable rates form a
pentagon; the region is the union of these pentagons. The same three
expressions bound the per-letter mutual informations of any scheme whose
inputs have normalized cross-correlation rho_bar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ParameterError


@dataclass(frozen=True)
class CapacityQuery:
    rates: tuple
    channel: object
    rho_bar: float | None = None

    def __post_init__(self):
        if self.rho_bar is not None and not 0.0 <= self.rho_bar <= 1.0:
            raise ParameterError(f"rho_bar must lie in [0, 1], got {self.rho_bar}")


def _check_rho_bar(rho_bar):
    if not 0.0 <= rho_bar <= 1.0:
        raise ParameterError(f"rho_bar must lie in [0, 1], got {rho_bar}")


def individual_cap(p, noise, rho_bar):
    return 0.5 * math.log2(1.0 + p * (1.0 - rho_bar * rho_bar) / noise)


def sum_cap(channel, rho_bar):
    c = channel
    return 0.5 * math.log2(1.0 + (c.p1 + c.p2 + 2.0 * rho_bar * math.sqrt(c.p1 * c.p2)) / c.noise)


def pentagon_bounds(channel, rho_bar):
    """(r1_max, r2_max, rsum_max) of the pentagon at cooperation rho_bar."""
    _check_rho_bar(rho_bar)
    return (
        individual_cap(channel.p1, channel.noise, rho_bar),
        individual_cap(channel.p2, channel.noise, rho_bar),
        sum_cap(channel, rho_bar),
    )


def pentagon_bounds_array(channel, rho_bar):
    """Vectorized `pentagon_bounds` over an array of rho_bar values."""
    rb = np.asarray(rho_bar, dtype=float)
    c = channel
    r1 = 0.5 * np.log2(1.0 + c.p1 * (1.0 - rb * rb) / c.noise)
    r2 = 0.5 * np.log2(1.0 + c.p2 * (1.0 - rb * rb) / c.noise)
    rs = 0.5 * np.log2(1.0 + (c.p1 + c.p2 + 2.0 * rb * math.sqrt(c.p1 * c.p2)) / c.noise)
    return r1, r2, rs


def pentagon_slacks(rates, channel, rho_bar):
    r1, r2 = rates
    c1, c2, cs = pentagon_bounds(channel, rho_bar)
    return c1 - r1, c2 - r2, cs - r1 - r2


def individual_rho_limit(rate, p, noise):
    """Largest rho_bar in [0, 1] keeping ``rate`` below the individual cap.

    Returns None when even rho_bar = 0 is not enough.
    """
    need = math.expm1(2.0 * math.log(2.0) * rate) * noise / p
    if need > 1.0:
        return None
    return math.sqrt(1.0 - need)


def sum_rho_floor(rsum, channel):
    """Smallest rho_bar >= 0 whose sum cap reaches ``rsum`` (may exceed 1)."""
    c = channel
    need = c.noise * math.expm1(2.0 * math.log(2.0) * rsum) - c.p1 - c.p2
    return max(0.0, need / (2.0 * math.sqrt(c.p1 * c.p2)))


def capacity_contains(rates, channel, tol=1e-12):
    """Is the rate pair inside the feedback capacity region?

    The individual caps shrink and the sum cap grows with rho_bar, so the
    feasible cooperation levels form an interval [lo, hi]. The returned
    witness is the rho_bar in that interval with the largest worst-case
    slack, or None when the pair is outside.
    """
    r1, r2 = rates
    if r1 < 0 or r2 < 0:
        raise ParameterError(f"rates must be nonnegative, got {r1}, {r2}")
    lim1 = individual_rho_limit(r1, channel.p1, channel.noise)
    lim2 = individual_rho_limit(r2, channel.p2, channel.noise)
    if lim1 is None or lim2 is None:
        hi = 0.0
    else:
        hi = min(lim1, lim2, 1.0)
    lo = min(sum_rho_floor(r1 + r2, channel), 1.0)
    if min(pentagon_slacks(rates, channel, hi)) < -tol:
        return False, None
    if lo >= hi:
        return True, hi

    def balance(rb):
        s1, s2, ss = pentagon_slacks(rates, channel, rb)
        return min(s1, s2) - ss

    # balance is decreasing in rho_bar: positive at lo, negative at hi
    a, b = lo, hi
    if balance(a) <= 0.0:
        return True, a
    if balance(b) >= 0.0:
        return True, b
    for _ in range(200):
        m = 0.5 * (a + b)
        if balance(m) > 0.0:
            a = m
        else:
            b = m
        if b - a < 1e-15:
            break
    return True, 0.5 * (a + b)


def boundary_trace(channel, points=101):
    """Rows (rho_bar, r1_max, r2_max, rsum_max, corner_a, corner_b) for plotting.

    corner_a = (r1_max, rsum_max - r1_max) and corner_b = (rsum_max - r2_max,
    r2_max) are clipped to the pentagon when the sum cap is not binding.
    """
    rows = []
    for rb in np.linspace(0.0, 1.0, points):
        c1, c2, cs = pentagon_bounds(channel, float(rb))
        a = (min(c1, cs), min(c2, max(cs - c1, 0.0)))
        b = (min(c1, max(cs - c2, 0.0)), min(c2, cs))
        rows.append((float(rb), c1, c2, cs, a, b))
    return rows
