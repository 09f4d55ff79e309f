"""Lossy transmission of a bivariate Gaussian source over a two-user
Gaussian multiple-access channel with perfect feedback."""

from .model import (
    ChannelParams,
    DistortionPair,
    IncompatibleInstancesError,
    NormalizedSource,
    NumericFailure,
    ParameterError,
    ProblemInstance,
    RatePair,
    SourceParams,
)

__all__ = [
    "ChannelParams",
    "DistortionPair",
    "IncompatibleInstancesError",
    "NormalizedSource",
    "NumericFailure",
    "ParameterError",
    "ProblemInstance",
    "RatePair",
    "SourceParams",
]
