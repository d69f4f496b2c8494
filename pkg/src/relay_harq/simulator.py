"""Round-based Monte Carlo simulation of the relay HARQ contention.

Each round draws fresh gains for every relay's two links, derives the
attempt pair (i, j), and resolves the takeover contention under one of
three schemes: the timer policy (class alpha[i][j] + beta), first decode
first relay (fires at i + beta), and genie-aided optimal selection
(argmin i + j).

Randomness is counter-based so results are reproducible regardless of how
trials are batched: a Philox stream is keyed from the config seed, trial t
owns the counter blocks [t * B, (t+1) * B) with B = ceil(3N/4), and each
trial consumes exactly 3N uniforms from its slice (N source gains, N
destination gains, N beta offsets, in that order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from enum import Enum
from math import sqrt

import numpy as np

from .channel import (
    INFEASIBLE,
    FadingParams,
    gain_sq_from_uniform,
    required_attempts_array,
)
from .policy import AlphaMatrix

_CHUNK = 1 << 15  # trials per vectorized batch; result-invariant


class Scheme(Enum):
    PROPOSED = "proposed"
    FDFR = "fdfr"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class RelayNode:
    """One relay's sampled state for a single HARQ round."""

    id: int
    src_attempts: float  # i, or INFEASIBLE when the source link needs > M
    dst_attempts: float  # j, likewise
    beta: float  # sub-slot contention offset, < 1 slot

    @property
    def eligible(self) -> bool:
        """Both links usable within the attempt cap."""
        return self.src_attempts != INFEASIBLE and self.dst_attempts != INFEASIBLE


@dataclass(frozen=True)
class RoundOutcome:
    scheme: Scheme
    feasible: bool
    winner_id: int | None = None
    takeover_slot: int | None = None  # class n for the timer scheme, i otherwise
    winner_src_attempts: int | None = None
    winner_dst_attempts: int | None = None
    delay_slots: int | None = None  # takeover_slot + winner_dst_attempts
    attempt_total: int | None = None  # winner's i + j

    def to_json(self) -> str:
        d = asdict(self)
        d["scheme"] = self.scheme.value
        return json.dumps(d)


@dataclass(frozen=True)
class SimConfig:
    params: FadingParams
    num_relays: int
    trials: int
    seed: int
    alpha: AlphaMatrix | None = None  # required for the Proposed scheme only
    beta_max: float = 0.01

    def __post_init__(self):
        if self.num_relays < 1:
            raise ValueError(f"num_relays must be >= 1, got {self.num_relays}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0.0 < self.beta_max < 1.0:
            raise ValueError(f"beta_max must be in (0, 1), got {self.beta_max}")
        if self.alpha is not None and self.alpha.max_attempts != self.params.max_attempts:
            raise ValueError("alpha size must match params.max_attempts")


@dataclass(frozen=True)
class TrialAggregate:
    """Deterministic summary of run_trials; means condition on feasibility."""

    scheme: Scheme
    trials: int
    num_feasible: int
    feasibility_rate: float
    mean_delay: float
    delay_stderr: float
    mean_attempts: float
    attempts_stderr: float
    throughput: float  # feasibility_rate * rate / mean_attempts
    throughput_stderr: float
    throughput_literal: float  # feasibility_rate / (mean_attempts * rate)
    warning: str | None = None


# --- RNG substreams ---------------------------------------------------------


def philox_key(seed: int, spawn_key: tuple = ()) -> np.ndarray:
    """Derive a 128-bit Philox key from a seed and an optional spawn path."""
    return np.random.SeedSequence(seed, spawn_key=spawn_key).generate_state(2, dtype=np.uint64)


def trial_uniforms(key: np.ndarray, start: int, count: int, per_trial: int) -> np.ndarray:
    """Uniform draws for trials [start, start+count), (count, per_trial).

    Trials are laid out on Philox counter-block boundaries, so any batching
    of [0, trials) into contiguous runs reproduces identical values.
    """
    blocks = (per_trial + 3) // 4  # Philox emits 4 u64 words per counter step
    gen = np.random.Generator(np.random.Philox(key=key))
    if start:
        gen.bit_generator.advance(start * blocks)
    return gen.random((count, 4 * blocks))[:, :per_trial]


# --- single-round mechanics -------------------------------------------------


def sample_round_relays(
    params: FadingParams, num_relays: int, beta_max: float, rng: np.random.Generator
) -> list[RelayNode]:
    """Draw one round's relay population (same draw order as run_trials)."""
    u = rng.random(3 * num_relays)
    src = required_attempts_array(params, gain_sq_from_uniform(params, u[:num_relays]))
    dst = required_attempts_array(params, gain_sq_from_uniform(params, u[num_relays : 2 * num_relays]))
    beta = beta_max * u[2 * num_relays :]
    return [
        RelayNode(id=k, src_attempts=float(src[k]), dst_attempts=float(dst[k]), beta=float(beta[k]))
        for k in range(num_relays)
    ]


def _resolve(relays, firing_key, scheme, takeover_of) -> RoundOutcome:
    contenders = [(firing_key(r), r) for r in relays if r.eligible]
    if not contenders:
        return RoundOutcome(scheme=scheme, feasible=False)
    _, winner = min(contenders, key=lambda t: t[0])  # first minimum on exact ties
    i, j = int(winner.src_attempts), int(winner.dst_attempts)
    takeover = takeover_of(winner)
    return RoundOutcome(
        scheme=scheme,
        feasible=True,
        winner_id=winner.id,
        takeover_slot=takeover,
        winner_src_attempts=i,
        winner_dst_attempts=j,
        delay_slots=takeover + j,
        attempt_total=i + j,
    )


def run_round_proposed(relays: list[RelayNode], alpha: AlphaMatrix) -> RoundOutcome:
    """Timer contention: eligible relays fire at alpha[i][j] + beta.

    beta < 1 keeps class order ahead of the offsets, so the lowest class
    always wins and beta only resolves intra-class contention.
    """
    cls = lambda r: alpha.class_of(int(r.src_attempts), int(r.dst_attempts))
    return _resolve(relays, lambda r: cls(r) + r.beta, Scheme.PROPOSED, cls)


def run_round_fdfr(relays: list[RelayNode], exclude_dst_at: int | None = None) -> RoundOutcome:
    """First decode, first relay: eligible relays fire at i + beta.

    Equivalent to run_round_proposed under alpha[i][j] = i.  Eligibility is
    inclusive (j <= M) like the other schemes; pass exclude_dst_at = M for
    the strict j < M reading.
    """
    relays_in = relays
    if exclude_dst_at is not None:
        relays_in = [r for r in relays if r.dst_attempts != exclude_dst_at]
    take_i = lambda r: int(r.src_attempts)
    return _resolve(relays_in, lambda r: r.src_attempts + r.beta, Scheme.FDFR, take_i)


def run_round_optimal(relays: list[RelayNode]) -> RoundOutcome:
    """Genie baseline: pick argmin (i + j), beta breaking ties.

    The source transmits only until the winner decodes, so the takeover
    slot is the winner's i.
    """
    take_i = lambda r: int(r.src_attempts)
    return _resolve(
        relays, lambda r: r.src_attempts + r.dst_attempts + r.beta, Scheme.OPTIMAL, take_i
    )


# --- batched trials ---------------------------------------------------------


def _simulate_chunk(config: SimConfig, scheme: Scheme, start: int, count: int):
    """Vectorized rounds for trials [start, start+count).

    Returns (feasible mask, winner column, takeover, i, j) arrays; the
    last four are only meaningful where feasible.
    """
    p, n = config.params, config.num_relays
    u = trial_uniforms(philox_key(config.seed), start, count, 3 * n)
    src = required_attempts_array(p, gain_sq_from_uniform(p, u[:, :n]))
    dst = required_attempts_array(p, gain_sq_from_uniform(p, u[:, n : 2 * n]))
    beta = config.beta_max * u[:, 2 * n :]

    eligible = np.isfinite(src) & np.isfinite(dst)
    feasible = eligible.any(axis=1)
    i_idx = np.where(eligible, src, 1).astype(np.int64)
    j_idx = np.where(eligible, dst, 1).astype(np.int64)

    if scheme is Scheme.PROPOSED:
        if config.alpha is None:
            raise ValueError("the proposed scheme requires an alpha matrix")
        base = config.alpha.entries[i_idx - 1, j_idx - 1].astype(float)
    elif scheme is Scheme.FDFR:
        base = i_idx.astype(float)
    else:
        base = (i_idx + j_idx).astype(float)
    firing = np.where(eligible, base + beta, np.inf)

    winner = np.argmin(firing, axis=1)  # lowest id on exact float ties
    rows = np.arange(count)
    i_w = i_idx[rows, winner]
    j_w = j_idx[rows, winner]
    if scheme is Scheme.PROPOSED:
        takeover = config.alpha.entries[i_w - 1, j_w - 1]
    else:
        takeover = i_w
    return feasible, winner, takeover, i_w, j_w


def iter_outcomes(config: SimConfig, scheme: Scheme):
    """Yield one RoundOutcome per trial (debug/trace path)."""
    for start in range(0, config.trials, _CHUNK):
        count = min(_CHUNK, config.trials - start)
        feasible, winner, takeover, i_w, j_w = _simulate_chunk(config, scheme, start, count)
        for t in range(count):
            if not feasible[t]:
                yield RoundOutcome(scheme=scheme, feasible=False)
            else:
                i, j, n = int(i_w[t]), int(j_w[t]), int(takeover[t])
                yield RoundOutcome(
                    scheme=scheme,
                    feasible=True,
                    winner_id=int(winner[t]),
                    takeover_slot=n,
                    winner_src_attempts=i,
                    winner_dst_attempts=j,
                    delay_slots=n + j,
                    attempt_total=i + j,
                )


def write_round_trace(path, config: SimConfig, scheme: Scheme) -> None:
    """Dump per-round outcomes as JSON lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for outcome in iter_outcomes(config, scheme):
            fh.write(outcome.to_json() + "\n")


def run_trials(config: SimConfig, scheme: Scheme) -> TrialAggregate:
    """Aggregate `trials` independent rounds of one scheme.

    Accumulation is integer sums (delay and attempt totals are exact
    int64), so the result is independent of chunking and identical on
    every rerun with the same seed.
    """
    count_f = 0
    s_delay = s_delay2 = s_att = s_att2 = 0
    for start in range(0, config.trials, _CHUNK):
        count = min(_CHUNK, config.trials - start)
        feasible, _, takeover, i_w, j_w = _simulate_chunk(config, scheme, start, count)
        delay = (takeover + j_w)[feasible]
        att = (i_w + j_w)[feasible]
        count_f += int(feasible.sum())
        s_delay += int(delay.sum())
        s_delay2 += int((delay * delay).sum())
        s_att += int(att.sum())
        s_att2 += int((att * att).sum())

    rate = config.params.rate
    fr = count_f / config.trials
    if count_f == 0:
        nan = float("nan")
        return TrialAggregate(
            scheme=scheme,
            trials=config.trials,
            num_feasible=0,
            feasibility_rate=0.0,
            mean_delay=nan,
            delay_stderr=nan,
            mean_attempts=nan,
            attempts_stderr=nan,
            throughput=nan,
            throughput_stderr=nan,
            throughput_literal=nan,
            warning="no feasible rounds",
        )

    mean_delay = s_delay / count_f
    mean_att = s_att / count_f
    var_delay = max(s_delay2 - count_f * mean_delay**2, 0.0) / max(count_f - 1, 1)
    var_att = max(s_att2 - count_f * mean_att**2, 0.0) / max(count_f - 1, 1)
    se_delay = sqrt(var_delay / count_f)
    se_att = sqrt(var_att / count_f)

    thr = fr * rate / mean_att
    # delta method over the two independent factors (feasible count, mean)
    var_fr = fr * (1.0 - fr) / config.trials
    rel_var = var_fr / fr**2 + (se_att / mean_att) ** 2
    se_thr = thr * sqrt(rel_var)
    return TrialAggregate(
        scheme=scheme,
        trials=config.trials,
        num_feasible=count_f,
        feasibility_rate=fr,
        mean_delay=mean_delay,
        delay_stderr=se_delay,
        mean_attempts=mean_att,
        attempts_stderr=se_att,
        throughput=thr,
        throughput_stderr=se_thr,
        throughput_literal=fr / (mean_att * rate),
    )
