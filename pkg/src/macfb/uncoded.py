"""Uncoded (analog) transmission and its optimality threshold.

Each encoder sends its source sample scaled to full power, ignoring the
feedback, and the receiver forms the per-letter MMSE estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import DistortionPair, ParameterError, check_correlation, check_variance
from .ratedist import RegionLabel, classify_region

EQUALITY_BAND = 1e-12


@dataclass(frozen=True)
class UncodedResult:
    d: DistortionPair
    optimal: bool
    threshold_margin: float


@dataclass(frozen=True)
class DwDiagnostics:
    alpha: float
    beta: float
    dw_upper: float
    dw_lower: float


def threshold_margin(rho, channel):
    """RHS minus LHS of the optimality condition; >= 0 means uncoded is optimal.

    Values within 1e-12 * N^2 of zero are snapped to exactly 0.
    """
    p1, p2, n = channel.p1, channel.p2, channel.noise
    q = 1.0 - rho * rho
    lhs = p2 * q * q * (p1 + 2.0 * rho * math.sqrt(p1 * p2))
    rhs = n * rho * rho * (2.0 * p2 * q + n)
    margin = rhs - lhs
    if abs(margin) < EQUALITY_BAND * n * n:
        return 0.0
    return margin


def uncoded_distortions(sigma2, rho, channel):
    check_variance(sigma2)
    check_correlation(rho)
    p1, p2, n = channel.p1, channel.p2, channel.noise
    q = 1.0 - rho * rho
    total = p1 + p2 + 2.0 * rho * math.sqrt(p1 * p2) + n
    d = DistortionPair(sigma2 * (q * p2 + n) / total, sigma2 * (q * p1 + n) / total)
    margin = threshold_margin(rho, channel)
    return UncodedResult(d, margin >= 0.0, margin)


def symmetric_threshold_snr(rho):
    """Largest P/N at which uncoded transmission is optimal with P1 = P2."""
    if rho >= 1.0:
        return math.inf
    return rho / (1.0 - rho * rho)


def symmetric_uncoded_distortion(sigma2, rho, p, n):
    return sigma2 * (p * (1.0 - rho * rho) + n) / (2.0 * p * (1.0 + rho) + n)


def symmetric_optimal_distortion(sigma2, rho, p, n):
    """Optimal common distortion when P/N is at or below the threshold, else None."""
    check_variance(sigma2)
    check_correlation(rho)
    if p / n > symmetric_threshold_snr(rho) * (1.0 + EQUALITY_BAND):
        return None
    return symmetric_uncoded_distortion(sigma2, rho, p, n)


def single_user_variants(sigma2, rho, channel):
    """Distortions when only user 1 (U1) or only user 2 (U2) transmits uncoded."""
    check_variance(sigma2)
    check_correlation(rho)
    p1, p2, n = channel.p1, channel.p2, channel.noise
    q = 1.0 - rho * rho
    u1 = DistortionPair(sigma2 * n / (p1 + n), sigma2 * (q * p1 + n) / (p1 + n))
    u2 = DistortionPair(sigma2 * (q * p2 + n) / (p2 + n), sigma2 * n / (p2 + n))
    return u1, u2


def _intermediate_violation(sigma2, rho, d1, d2):
    s, a, q = sigma2, sigma2 * (1.0 - rho * rho), rho * rho
    if not (d1 < s and d2 < s):
        return "d1 < sigma2 and d2 < sigma2"
    if (s - d1) * (s - d2) > s * s * q:
        return "(sigma2 - d1)(sigma2 - d2) <= sigma2^2 rho^2"
    if d2 > a + q * d1:
        return "d2 < sigma2 (1 - rho^2) + rho^2 d1"
    if d1 > a + q * d2:
        return "d1 < sigma2 (1 - rho^2) + rho^2 d2"
    return "intermediate strip (boundary tie)"


def dw_upper(sigma2, rho, d1, d2):
    """Error of the linear estimate of S1 - rho S2 built from S2 and the S1 estimate."""
    s = sigma2
    return s * (2.0 * rho * math.sqrt((s - d1) * (s - d2)) + d1 + d2 - s * (1.0 + rho * rho)) / d2


def dw_diagnostics(sigma2, rho, d_star, channel):
    """Estimator coefficients and the two competing bounds on the error for S1 - rho S2.

    Only defined on the intermediate strip of the joint RD function.
    """
    check_variance(sigma2)
    check_correlation(rho)
    d1, d2 = d_star
    if classify_region(sigma2, rho, (d1, d2)) is not RegionLabel.INTERMEDIATE:
        raise ParameterError(
            f"{(d1, d2)} is outside the intermediate strip: violates "
            + _intermediate_violation(sigma2, rho, d1, d2))
    s = sigma2
    e1, e2 = math.sqrt(s - d1), math.sqrt(s - d2)
    alpha = s * (e1 - rho * e2) / (d2 * e1)
    beta = (e1 * e2 - rho * (s - d2)) / d2
    q = 1.0 - rho * rho
    lower = s * q * channel.noise / (channel.noise + channel.p1 * q)
    return DwDiagnostics(alpha, beta, dw_upper(s, rho, d1, d2), lower)
