"""Converse side: necessary conditions on achievable distortion pairs.

A pair (d1, d2) can only be achievable if some input correlation
rho_hat in [0, 1] lets the MAC carry the joint rate-distortion function on
the sum rate and each conditional rate-distortion function on the
corresponding individual rate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from scipy import optimize

from . import capacity
from .model import DistortionPair, check_correlation, check_variance
from .ratedist import rd_conditional, rd_joint

log = logging.getLogger(__name__)

SLACK_TOL = 1e-12
BISECT_TOL = 1e-12
BISECT_MAXITER = 200


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the necessary-condition test.

    ``slacks`` are (sum, rate1, rate2) margins in bits evaluated at the
    witness, or at the closest attempt when infeasible.
    """

    feasible: bool
    witness_rho_hat: float | None
    slacks: tuple
    rho_hat_min: float
    rho_hat_max: float | None


def condition_slacks(sigma2, rho, d, channel, rho_hat):
    d1, d2 = d
    c1, c2, cs = capacity.pentagon_bounds(channel, rho_hat)
    return (
        cs - rd_joint(sigma2, rho, (d1, d2)),
        c1 - rd_conditional(sigma2, rho, d1),
        c2 - rd_conditional(sigma2, rho, d2),
    )


def necessary_condition(sigma2, rho, d, channel, tol=SLACK_TOL):
    """Test whether some rho_hat in [0, 1] satisfies all three rate conditions.

    The sum condition gives a lower limit on rho_hat and the two individual
    conditions an upper limit, both in closed form. The witness is the
    smallest admissible rho_hat.
    """
    check_variance(sigma2)
    check_correlation(rho)
    d1, d2 = d
    r_sum = rd_joint(sigma2, rho, (d1, d2))
    lo = capacity.sum_rho_floor(r_sum, channel)
    lim1 = capacity.individual_rho_limit(rd_conditional(sigma2, rho, d1), channel.p1, channel.noise)
    lim2 = capacity.individual_rho_limit(rd_conditional(sigma2, rho, d2), channel.p2, channel.noise)
    hi = None if lim1 is None or lim2 is None else min(lim1, lim2, 1.0)

    w = 0.0 if hi is None else min(lo, hi)
    slacks = condition_slacks(sigma2, rho, (d1, d2), channel, w)
    feasible = min(slacks) >= -tol
    return FeasibilityReport(feasible, w if feasible else None, slacks, lo, hi)


def xi(sigma2, rho, p, n, rho_hat):
    """Distortion floor from the sum-rate condition for a symmetric pair (D, D)."""
    if rho >= 1.0 or p / n <= rho / (1.0 - rho * rho):
        return 0.5 * (n * sigma2 * (1.0 + rho) / (n + 2.0 * p * (1.0 + rho_hat)) + sigma2 * (1.0 - rho))
    return sigma2 * math.sqrt(n * (1.0 - rho * rho) / (n + 2.0 * p * (1.0 + rho_hat)))


def psi(sigma2, rho, p, n, rho_hat):
    """Distortion floor from either individual-rate condition for (D, D)."""
    return sigma2 * n * (1.0 - rho * rho) / (n + p * (1.0 - rho_hat * rho_hat))


def full_cooperation_snr(rho):
    """Below this SNR the symmetric bound is minimized at rho_hat = 1."""
    if rho >= 1.0:
        return math.inf
    return rho * rho / (2.0 * (1.0 - rho) * (1.0 + 2.0 * rho))


def _crossing(sigma2, rho, p, n):
    def gap(t):
        return xi(sigma2, rho, p, n, t) - psi(sigma2, rho, p, n, t)

    # xi falls and psi rises with rho_hat
    if gap(1.0) >= 0.0:
        return 1.0
    if gap(0.0) <= 0.0:
        return 0.0
    return optimize.bisect(gap, 0.0, 1.0, xtol=BISECT_TOL, maxiter=BISECT_MAXITER)


def symmetric_lower_bound(sigma2, rho, p, n):
    """min over rho_hat of max(xi, psi): a floor on the optimal symmetric distortion.

    Returns (d_lower, rho_hat_star).
    """
    check_variance(sigma2)
    check_correlation(rho)
    t = _crossing(sigma2, rho, p, n)
    d = max(xi(sigma2, rho, p, n, t), psi(sigma2, rho, p, n, t))
    if p / n <= full_cooperation_snr(rho):
        closed = xi(sigma2, rho, p, n, 1.0)
        if abs(closed - d) > 1e-9:
            log.warning("full-cooperation branch gives %r but bisection gives %r at P/N=%r, rho=%r",
                        closed, d, p / n, rho)
        else:
            return closed, 1.0
    return d, t


def high_snr_lower_coefficient(sigma2, rho):
    """Limit of sqrt(P/N) times the optimal symmetric distortion as P/N grows."""
    return sigma2 * math.sqrt((1.0 - rho * rho) / 4.0)


def _frontier_bisect(feasible, lo, hi, rtol=1e-12, maxiter=200):
    # smallest x in [lo, hi] with feasible(x), given monotone feasibility
    if not feasible(hi):
        return None
    for _ in range(maxiter):
        mid = math.sqrt(lo * hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * hi:
            break
    return hi


def necessary_frontier(sigma2, rho, channel, d1_values, rtol=1e-12):
    """For each d1, the smallest d2 <= sigma2 passing `necessary_condition`.

    Entries are None where no d2 in (0, sigma2] passes.
    """
    out = []
    for d1 in d1_values:
        out.append(_frontier_bisect(
            lambda d2: necessary_condition(sigma2, rho, DistortionPair(d1, d2), channel).feasible,
            sigma2 * 1e-15, sigma2, rtol=rtol))
    return out
