"""Monte Carlo simulation of uncoded transmission over the Gaussian MAC.

Every letter is handled independently: the uncoded schemes ignore the
feedback, so no feedback path is simulated.

Samples are split into blocks. Block b draws from a Philox stream keyed by
(seed, b), so the report depends only on (seed, samples, blocks) and not on
how blocks are scheduled across threads.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import DistortionPair, NumericFailure, ParameterError, ProblemInstance, SourceParams
from .uncoded import single_user_variants, uncoded_distortions

THREADS_ENV = "MACFB_THREADS"


class Scheme(str, enum.Enum):
    UNCODED = "UNCODED"
    U1 = "U1"
    U2 = "U2"


@dataclass(frozen=True)
class SimConfig:
    instance: ProblemInstance
    scheme: Scheme = Scheme.UNCODED
    samples: int = 1_000_000
    seed: int = 0
    blocks: int = 32

    def __post_init__(self):
        if self.samples < 1:
            raise ParameterError(f"samples must be >= 1, got {self.samples}")
        if self.blocks < 1:
            raise ParameterError(f"blocks must be >= 1, got {self.blocks}")
        if self.blocks > self.samples:
            raise ParameterError(f"blocks ({self.blocks}) cannot exceed samples ({self.samples})")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass(frozen=True)
class SimReport:
    empirical_d: DistortionPair
    empirical_power: tuple
    empirical_rho_hat: float
    stderr_d: tuple
    stderr_power: tuple
    stderr_rho_hat: float
    samples: int
    seed: int
    blocks: int


def _gains(scheme, var1, var2, channel, rho=0.0):
    # a negative correlation is undone by flipping the sign of encoder 1,
    # as in the normalization, so the inputs are never anti-correlated
    g1 = math.copysign(math.sqrt(channel.p1 / var1), 1.0 if rho >= 0 else -1.0)
    g2 = math.sqrt(channel.p2 / var2)
    if scheme is Scheme.U1:
        g2 = 0.0
    elif scheme is Scheme.U2:
        g1 = 0.0
    return g1, g2


def linear_mmse(source, channel, scheme=Scheme.UNCODED):
    """Coefficients c_i of the estimates c_i * Y and their analytic distortions.

    Works for arbitrary variances and correlation sign; returns
    ((c1, c2), (d1, d2)).
    """
    scheme = Scheme(scheme)
    v1, v2 = source.var1, source.var2
    cov12 = source.rho * math.sqrt(v1 * v2)
    g1, g2 = _gains(scheme, v1, v2, channel, source.rho)
    var_y = g1 * g1 * v1 + g2 * g2 * v2 + 2.0 * g1 * g2 * cov12 + channel.noise
    cov1 = g1 * v1 + g2 * cov12
    cov2 = g1 * cov12 + g2 * v2
    c1, c2 = cov1 / var_y, cov2 / var_y
    return (c1, c2), (v1 - c1 * cov1, v2 - c2 * cov2)


def mmse_coefficients(sigma2, rho, channel, scheme=Scheme.UNCODED):
    """Per-letter MMSE coefficients (c1, c2) for a normalized instance.

    The induced distortions are checked against the closed forms.
    """
    scheme = Scheme(scheme)
    (c1, c2), (d1, d2) = linear_mmse(SourceParams(sigma2, sigma2, rho), channel, scheme)
    if scheme is Scheme.UNCODED:
        ref = uncoded_distortions(sigma2, rho, channel).d
    else:
        u1, u2 = single_user_variants(sigma2, rho, channel)
        ref = u1 if scheme is Scheme.U1 else u2
    for got, want in ((d1, ref.d1), (d2, ref.d2)):
        if abs(got - want) > 1e-12 * abs(want):
            raise NumericFailure(f"MMSE distortion {got!r} disagrees with closed form {want!r}")
    return c1, c2


def _block_sizes(samples, blocks):
    base, extra = divmod(samples, blocks)
    return [base + (1 if b < extra else 0) for b in range(blocks)]


def _run_block(config, b, size, coeffs):
    src, ch = config.instance.source, config.instance.channel
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(config.seed, spawn_key=(b,))))
    g = rng.standard_normal((3, size))
    with np.errstate(over="ignore", invalid="ignore"):
        s1 = math.sqrt(src.var1) * g[0]
        s2 = math.sqrt(src.var2) * (src.rho * g[0] + math.sqrt(max(1.0 - src.rho * src.rho, 0.0)) * g[1])
        g1, g2 = _gains(config.scheme, src.var1, src.var2, ch, src.rho)
        x1, x2 = g1 * s1, g2 * s2
        y = x1 + x2 + math.sqrt(ch.noise) * g[2]
        e1 = s1 - coeffs[0] * y
        e2 = s2 - coeffs[1] * y
        terms = (e1 * e1, e2 * e2, x1 * x1, x2 * x2)
        # first moments, then second moments of the per-sample terms
        sums = np.array([t.sum() for t in terms] + [np.dot(x1, x2)] + [np.dot(t, t) for t in terms])
    if not np.all(np.isfinite(sums)):
        raise NumericFailure(f"non-finite accumulator in block {b}", block=b)
    return sums


def _threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _rho_hat(m12, m1, m2):
    den = math.sqrt(m1 * m2)
    return abs(m12) / den if den > 0 else 0.0


def _stderr(block_means, weights):
    # between-block standard error of the weighted mean
    k = len(block_means)
    if k < 2:
        return math.nan
    w = np.asarray(weights, dtype=float) / np.sum(weights)
    mean = float(np.dot(w, block_means))
    var = float(np.sum(w * (np.asarray(block_means) - mean) ** 2)) * k / (k - 1)
    return math.sqrt(var / k)


def run(config):
    """Simulate `config` and return empirical distortions, powers and input correlation.

    Standard errors come from the spread of the per-block means. With a
    single block the distortion and power errors fall back to the
    per-sample variance and the correlation error is NaN.
    """
    src, ch = config.instance.source, config.instance.channel
    coeffs, _ = linear_mmse(src, ch, config.scheme)
    sizes = _block_sizes(config.samples, config.blocks)
    jobs = list(enumerate(sizes))
    threads = _threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partial = list(pool.map(lambda job: _run_block(config, job[0], job[1], coeffs), jobs))
    else:
        partial = [_run_block(config, b, n, coeffs) for b, n in jobs]
    partial = np.array(partial)
    # exactly rounded sums make the totals independent of block order
    totals = [math.fsum(partial[:, j]) / config.samples for j in range(partial.shape[1])]
    if not all(math.isfinite(t) for t in totals):
        raise NumericFailure("non-finite totals")
    means = partial / np.asarray(sizes, dtype=float)[:, None]
    if config.blocks >= 2:
        stderr = [_stderr(means[:, j], sizes) for j in range(4)]
    else:
        # a single block has no between-block spread; use the per-sample variance
        n = config.samples
        stderr = [math.sqrt(max(totals[5 + j] - totals[j] ** 2, 0.0) / max(n - 1, 1)) for j in range(4)]
    block_rho = [_rho_hat(m[4], m[2], m[3]) for m in means]
    if config.blocks >= 2:
        rho_se = _stderr(block_rho, sizes)
    else:
        rho_se = math.nan
    return SimReport(
        empirical_d=DistortionPair(totals[0], totals[1]),
        empirical_power=(totals[2], totals[3]),
        empirical_rho_hat=_rho_hat(totals[4], totals[2], totals[3]),
        stderr_d=(stderr[0], stderr[1]),
        stderr_power=(stderr[2], stderr[3]),
        stderr_rho_hat=rho_se,
        samples=config.samples,
        seed=config.seed,
        blocks=config.blocks,
    )
