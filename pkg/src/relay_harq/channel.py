"""Rayleigh block-fading channel statistics for relay-assisted IR-HARQ.

A link with squared gain g and linear SNR delivers log2(1 + SNR*g) bits of
mutual information per symbol and per attempt; a packet of spectral
efficiency ``rate`` decodes once the accumulated MI reaches ``rate``.  Gains
are exponential with mean ``avg_gain`` (Rayleigh amplitude), which gives the
required-attempt distribution in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Marker for "the link needs more than max_attempts transmissions".
# math.inf so it orders and adds naturally next to integer attempt counts.
INFEASIBLE = math.inf


@dataclass(frozen=True)
class FadingParams:
    """Scenario tuple shared by every statistic in this package."""

    avg_gain: float  # mean of |h|^2, dimensionless
    snr: float  # linear P/sigma^2
    rate: float  # spectral efficiency, bits/symbol
    max_attempts: int  # cap M on transmissions per link

    def __post_init__(self):
        if not self.avg_gain > 0:
            raise ValueError(f"avg_gain must be > 0, got {self.avg_gain}")
        if not self.snr > 0:
            raise ValueError(f"snr must be > 0, got {self.snr}")
        if not self.rate > 0:
            raise ValueError(f"rate must be > 0, got {self.rate}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")


@dataclass(frozen=True)
class ChannelGain:
    """Squared channel gain |h|^2 of one link, constant over a HARQ round."""

    gain_sq: float

    def __post_init__(self):
        if self.gain_sq < 0:
            raise ValueError(f"gain_sq must be >= 0, got {self.gain_sq}")


@dataclass(frozen=True)
class AttemptPmf:
    """Distribution of the required attempt count N for a single link.

    ``probs[k]`` is P{N = k+1} for k = 0..M-1; ``tail`` is the infeasible
    mass P{N > M}.
    """

    probs: np.ndarray
    tail: float

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < 0) or np.any(p > 1) or not 0 <= self.tail <= 1:
            raise ValueError("pmf entries must lie in [0, 1]")
        total = float(p.sum()) + self.tail
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"pmf must sum to 1, got {total}")
        object.__setattr__(self, "probs", p)

    @property
    def feasible_mass(self) -> float:
        """P{N <= M}, the probability the link is usable at all."""
        return float(self.probs.sum())


def gain_sq_from_uniform(params: FadingParams, u):
    """Map uniform(0,1) draws to exponential |h|^2 draws (inverse CDF).

    One uniform per gain, so consumption is fixed and counter-based RNG
    substreams stay aligned regardless of how draws are batched.
    """
    return -params.avg_gain * np.log1p(-u)


def sample_gain_sq(params: FadingParams, rng: np.random.Generator) -> ChannelGain:
    """Draw one squared gain; consumes exactly one uniform from ``rng``."""
    return ChannelGain(float(gain_sq_from_uniform(params, rng.random())))


def mutual_info_per_symbol(params: FadingParams, g: ChannelGain) -> float:
    """MI per resource symbol: log2(1 + snr * |h|^2), bits/symbol."""
    return float(np.log2(1.0 + params.snr * g.gain_sq))


def required_attempts(params: FadingParams, g: ChannelGain):
    """Minimum attempts ceil(rate / MI), or INFEASIBLE past the cap.

    Exact equality rate == n * MI counts as decodable at attempt n; zero MI
    maps to INFEASIBLE rather than raising.
    """
    mi = mutual_info_per_symbol(params, g)
    if mi <= 0.0:
        return INFEASIBLE
    n = math.ceil(params.rate / mi)
    return n if n <= params.max_attempts else INFEASIBLE


def required_attempts_array(params: FadingParams, gain_sq: np.ndarray) -> np.ndarray:
    """Vectorized required_attempts; np.inf marks infeasible entries."""
    gain_sq = np.asarray(gain_sq, dtype=float)
    with np.errstate(divide="ignore"):
        mi = np.log2(1.0 + params.snr * gain_sq)
        n = np.ceil(params.rate / mi)
    return np.where(n <= params.max_attempts, n, np.inf)


def _decodable_by(params: FadingParams, k: int) -> float:
    """P{N <= k} = exp(-(2^(rate/k) - 1) / (avg_gain * snr))."""
    return math.exp(-(2.0 ** (params.rate / k) - 1.0) / (params.avg_gain * params.snr))


def attempt_pmf(params: FadingParams) -> AttemptPmf:
    """Exact single-link PMF of the required attempt count.

    P{N = i} = P{N <= i} - P{N <= i-1}, with P{N <= 0} = 0 (the i = 1 term
    is the closed-form boundary case, not an evaluated division by zero).
    """
    cdf = np.array([_decodable_by(params, k) for k in range(1, params.max_attempts + 1)])
    probs = np.diff(cdf, prepend=0.0)
    # exp() is monotone here; clip only guards against sub-ulp dust
    probs = np.maximum(probs, 0.0)
    tail = max(1.0 - float(probs.sum()), 0.0)
    return AttemptPmf(probs, tail)


def joint_pmf(params: FadingParams) -> np.ndarray:
    """M x M matrix P_{i,j} = P{N_src = i} * P{N_dst = j}.

    Links fade independently with identical average gain, so the joint law
    is the product of two copies of the single-link PMF.
    """
    p = attempt_pmf(params).probs
    return np.outer(p, p)
