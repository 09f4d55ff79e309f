"""Domain types, source normalization and time sharing.

All distortions are expected squared errors in source units squared,
powers and noise are in channel units squared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ParameterError(ValueError):
    """A parameter lies outside the domain of the requested operation."""


class IncompatibleInstancesError(ValueError):
    """Two operating points cannot be combined."""


class NumericFailure(ArithmeticError):
    """Non-finite value produced during a numeric computation."""

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


def _require(cond, message):
    if not cond:
        raise ParameterError(message)


@dataclass(frozen=True)
class SourceParams:
    var1: float
    var2: float
    rho: float

    def __post_init__(self):
        _require(self.var1 > 0 and self.var2 > 0, f"variances must be positive, got {self.var1}, {self.var2}")
        _require(-1.0 <= self.rho <= 1.0, f"rho must lie in [-1, 1], got {self.rho}")


@dataclass(frozen=True)
class NormalizedSource:
    var: float
    rho: float

    def __post_init__(self):
        _require(self.var > 0, f"variance must be positive, got {self.var}")
        _require(0.0 <= self.rho <= 1.0, f"normalized rho must lie in [0, 1], got {self.rho}")


@dataclass(frozen=True)
class ChannelParams:
    p1: float
    p2: float
    noise: float

    def __post_init__(self):
        _require(self.p1 > 0 and self.p2 > 0, f"powers must be positive, got {self.p1}, {self.p2}")
        _require(self.noise > 0, f"noise variance must be positive, got {self.noise}")

    @classmethod
    def symmetric(cls, p, noise=1.0):
        return cls(p, p, noise)


@dataclass(frozen=True)
class DistortionPair:
    d1: float
    d2: float

    def __post_init__(self):
        _require(self.d1 > 0 and self.d2 > 0, f"distortions must be positive, got {self.d1}, {self.d2}")

    def __iter__(self):
        yield self.d1
        yield self.d2


@dataclass(frozen=True)
class RatePair:
    r1: float
    r2: float

    def __post_init__(self):
        _require(self.r1 >= 0 and self.r2 >= 0, f"rates must be nonnegative, got {self.r1}, {self.r2}")

    def __iter__(self):
        yield self.r1
        yield self.r2


@dataclass(frozen=True)
class ProblemInstance:
    source: SourceParams
    channel: ChannelParams


@dataclass(frozen=True)
class ScaleRecord:
    """What `normalize` removed: the two variances and the sign of rho."""

    var1: float
    var2: float
    sign: int = 1


def normalize(inst, target):
    """Map an instance onto unit variances and nonnegative correlation.

    Distortion i is divided by the variance of component i. A negative
    correlation is absorbed by flipping the sign of component 1 at both
    encoder and decoder, which leaves every distortion unchanged.

    Returns:
        (NormalizedSource, ChannelParams, DistortionPair, ScaleRecord)
    """
    src = inst.source
    sign = -1 if src.rho < 0 else 1
    record = ScaleRecord(src.var1, src.var2, sign)
    d = DistortionPair(target.d1 / src.var1, target.d2 / src.var2)
    return NormalizedSource(1.0, abs(src.rho)), inst.channel, d, record


def denormalize(result, record):
    return DistortionPair(result.d1 * record.var1, result.d2 * record.var2)


def time_share(a, b, lam):
    """Convex combination of two (DistortionPair, ChannelParams) operating points.

    The combined point is achievable whenever both inputs are, by running
    scheme `a` a fraction `lam` of the time and scheme `b` otherwise.
    """
    _require(0.0 <= lam <= 1.0, f"lambda must lie in [0, 1], got {lam}")
    (da, ca), (db, cb) = a, b
    if ca.noise != cb.noise:
        raise IncompatibleInstancesError(f"noise variances differ: {ca.noise} vs {cb.noise}")
    if lam == 1.0:
        return da, ca
    if lam == 0.0:
        return db, cb
    mu = 1.0 - lam
    d = DistortionPair(lam * da.d1 + mu * db.d1, lam * da.d2 + mu * db.d2)
    c = ChannelParams(lam * ca.p1 + mu * cb.p1, lam * ca.p2 + mu * cb.p2, ca.noise)
    return d, c


def check_correlation(rho):
    _require(0.0 <= rho <= 1.0, f"rho must lie in [0, 1] after normalization, got {rho}")


def check_variance(sigma2):
    _require(sigma2 > 0 and math.isfinite(sigma2), f"sigma2 must be positive and finite, got {sigma2}")
