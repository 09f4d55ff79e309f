"""Source-coding side: rate-distortion functions of the bivariate Gaussian source.

Rates are in bits per source symbol. Unless stated otherwise both source
components have variance ``sigma2`` and correlation ``rho`` in [0, 1].
"""

from __future__ import annotations

import enum
import math

from .model import DistortionPair, ParameterError, check_correlation, check_variance

TIE_TOL = 1e-12
_TINY = 1e-300


class RegionLabel(str, enum.Enum):
    R1_DOMINANT = "R1_DOMINANT"
    PRODUCT = "PRODUCT"
    INTERMEDIATE = "INTERMEDIATE"
    ZERO_RATE = "ZERO_RATE"


def half_log2_plus(num, den):
    """max(0, 0.5 * log2(num / den)); raises instead of returning +inf."""
    if den < _TINY:
        raise ParameterError(f"log argument denominator {den!r} is below {_TINY}")
    if num <= den:
        return 0.0
    return 0.5 * math.log2(num / den)


def _check(sigma2, rho, d):
    check_variance(sigma2)
    check_correlation(rho)
    if isinstance(d, DistortionPair):
        return d.d1, d.d2
    d1, d2 = d
    if not (d1 > 0 and d2 > 0):
        raise ParameterError(f"distortions must be positive, got {d1}, {d2}")
    return float(d1), float(d2)


def rd_conditional(sigma2, rho, d):
    """Rate needed for one component when the other is known at both ends."""
    check_variance(sigma2)
    check_correlation(rho)
    if not d > 0:
        raise ParameterError(f"distortion must be positive, got {d}")
    return half_log2_plus(sigma2 * (1.0 - rho * rho), d)


def _in_product(s, rho, d1, d2, tol=TIE_TOL):
    # (s - d1)(s - d2) >= s^2 rho^2 is the symmetric form of
    # d2 <= (s(1 - rho^2) - d1) s / (s - d1) together with d1 <= s(1 - rho^2)
    return d1 < s and d2 < s and (s - d1) * (s - d2) >= s * s * rho * rho - tol


def _in_dominant(s, rho, d1, d2, tol=TIE_TOL):
    a = s * (1.0 - rho * rho)
    return d2 >= a + rho * rho * d1 - tol or d1 >= a + rho * rho * d2 - tol


def _in_intermediate(s, rho, d1, d2, tol=TIE_TOL):
    a = s * (1.0 - rho * rho)
    return (
        rho < 1.0
        and d1 < s
        and d2 < s
        and (s - d1) * (s - d2) <= s * s * rho * rho + tol
        and d2 <= a + rho * rho * d1 + tol
        and d1 <= a + rho * rho * d2 + tol
    )


def region_predicates(sigma2, rho, d, tol=TIE_TOL):
    """Raw membership of (d1, d2) in the three closed pieces, as a dict."""
    d1, d2 = _check(sigma2, rho, d)
    return {
        RegionLabel.PRODUCT: _in_product(sigma2, rho, d1, d2, tol),
        RegionLabel.INTERMEDIATE: _in_intermediate(sigma2, rho, d1, d2, tol),
        RegionLabel.R1_DOMINANT: _in_dominant(sigma2, rho, d1, d2, tol),
    }


def classify_region(sigma2, rho, d):
    """Label the piece of the joint rate-distortion formula that applies at d.

    The dominant piece is the union of the two half-strips where one
    distortion is so loose that only the other one costs rate; the
    intermediate piece is the strip between them. Ties on shared
    boundaries go PRODUCT, then INTERMEDIATE, then R1_DOMINANT.
    """
    d1, d2 = _check(sigma2, rho, d)
    if min(d1, d2) >= sigma2:
        return RegionLabel.ZERO_RATE
    if _in_product(sigma2, rho, d1, d2):
        return RegionLabel.PRODUCT
    if _in_intermediate(sigma2, rho, d1, d2):
        return RegionLabel.INTERMEDIATE
    if _in_dominant(sigma2, rho, d1, d2):
        return RegionLabel.R1_DOMINANT
    raise ParameterError(f"no region contains {(d1, d2)} for sigma2={sigma2}, rho={rho}")


def rd_branch(label, sigma2, rho, d1, d2):
    """Evaluate one branch of the joint RD formula regardless of membership."""
    s = sigma2
    if label is RegionLabel.ZERO_RATE:
        return 0.0
    if label is RegionLabel.R1_DOMINANT:
        return half_log2_plus(s, min(d1, d2))
    if label is RegionLabel.PRODUCT:
        return half_log2_plus(s * s * (1.0 - rho * rho), d1 * d2)
    gap = rho * s - math.sqrt(max(s - d1, 0.0) * max(s - d2, 0.0))
    return half_log2_plus(s * s * (1.0 - rho * rho), d1 * d2 - gap * gap)


def rd_joint(sigma2, rho, d):
    """Joint rate-distortion function R(D1, D2) of the pair (S1, S2)."""
    d1, d2 = _check(sigma2, rho, d)
    return rd_branch(classify_region(sigma2, rho, (d1, d2)), sigma2, rho, d1, d2)


def oohama_beta(rho, d1, d2):
    return 1.0 + math.sqrt(1.0 + 4.0 * rho * rho * d1 * d2 / (1.0 - rho * rho) ** 2)


def oohama_sum_requirement(rho, d1, d2):
    """Minimum sum rate of the two-terminal source code at unit variances."""
    if rho >= 1.0:
        # both encoders see the same source: a point-to-point problem
        return half_log2_plus(1.0, min(d1, d2))
    return half_log2_plus((1.0 - rho * rho) * oohama_beta(rho, d1, d2), 2.0 * d1 * d2)


def oohama_slacks(rates, d, rho):
    """Margins (bits) of the three two-terminal constraints at unit variances.

    Returns (slack_r1, slack_r2, slack_sum); the query lies in the region
    iff all three are nonnegative.
    """
    r1, r2 = rates
    d1, d2 = _check(1.0, rho, d)
    if d1 > 1.0 or d2 > 1.0:
        raise ParameterError(f"unit-variance distortions must lie in (0, 1], got {d1}, {d2}")
    q = rho * rho
    s1 = r1 - half_log2_plus(1.0 - q * (1.0 - 2.0 ** (-2.0 * r2)), d1)
    s2 = r2 - half_log2_plus(1.0 - q * (1.0 - 2.0 ** (-2.0 * r1)), d2)
    ss = r1 + r2 - oohama_sum_requirement(rho, d1, d2)
    return s1, s2, ss


def oohama_contains(rates, d, rho, tol=TIE_TOL):
    """Is (d1, d2) achievable by the two-terminal code at rates (r1, r2)?"""
    return min(oohama_slacks(rates, d, rho)) >= -tol


def separation_distortions_from_rates(sigma2, rho, rates):
    """Per-user distortion floors of the two-terminal code at given rates.

    Component i is floored at sigma2 2^{-2 r_i} (1 - rho^2) + sigma2 rho^2 2^{-2(r1 + r2)}.
    The sum-rate constraint adds ``sum_rate_distortion_product``; the floors
    meet it only when rho is 0 or 1 or one rate is 0, see
    ``separation_frontier_pair`` for an achievable pair.
    """
    check_variance(sigma2)
    check_correlation(rho)
    r1, r2 = rates
    if r1 < 0 or r2 < 0:
        raise ParameterError(f"rates must be nonnegative, got {r1}, {r2}")
    x, y = 2.0 ** (-2.0 * r1), 2.0 ** (-2.0 * r2)
    q = rho * rho
    return DistortionPair(sigma2 * (x * (1.0 - q) + q * x * y), sigma2 * (y * (1.0 - q) + q * x * y))


def sum_rate_distortion_product(sigma2, rho, rsum):
    """Smallest D1 * D2 the two-terminal code reaches at total rate ``rsum``."""
    t = 2.0 ** (-2.0 * rsum)
    q = rho * rho
    return sigma2 * sigma2 * (t * (1.0 - q) + q * t * t)


def separation_frontier_pair(sigma2, rho, rates, ratio=1.0):
    """Smallest achievable pair along the ray d2 = ratio * d1 at the given rates."""
    floors = separation_distortions_from_rates(sigma2, rho, rates)
    prod = sum_rate_distortion_product(sigma2, rho, rates[0] + rates[1])
    d1 = max(floors.d1, floors.d2 / ratio, math.sqrt(prod / ratio))
    return DistortionPair(d1, ratio * d1)
