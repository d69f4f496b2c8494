"""Timer-class policy: the alpha matrix, its induced partition, and the
closed-form delay/throughput objectives it is optimized against.

A relay whose links need (i, j) attempts arms its takeover timer for class
alpha[i][j]; lower classes fire first.  Grouping the M x M feasible pairs
into classes S_1..S_M turns the contention winner's statistics into sums
over class members, which is what the analytic objectives evaluate and what
the coordinate-descent optimizer sweeps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import FadingParams, joint_pmf


class NoFeasibleConfigError(ValueError):
    """Raised when no (i, j) pair has positive probability within the cap."""

    def __init__(self, msg: str = "no feasible relay configuration"):
        super().__init__(msg)


class Objective(Enum):
    MIN_DELAY = "min-delay"
    MAX_THROUGHPUT = "max-throughput"


@dataclass(frozen=True)
class AlphaMatrix:
    """Integer timer-class assignment, rows = source attempts i, cols = j.

    Valid entries satisfy i <= alpha[i][j] <= M: a relay cannot fire before
    it has decoded, and every class index stays within the attempt cap.
    """

    entries: np.ndarray
    max_attempts: int

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)  # copy: frozen below
        m = self.max_attempts
        if arr.shape != (m, m):
            raise ValueError(f"alpha must be {m}x{m}, got {arr.shape}")
        if arr.min() < 1 or arr.max() > m:
            raise ValueError("alpha entries must lie in [1, max_attempts]")
        rows = np.arange(1, m + 1)[:, None]
        if np.any(arr < rows):
            raise ValueError("alpha[i][j] must be >= i (cannot fire before decoding)")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def initial(cls, max_attempts: int) -> "AlphaMatrix":
        """The fire-on-decode assignment alpha[i][j] = i."""
        rows = np.repeat(np.arange(1, max_attempts + 1)[:, None], max_attempts, axis=1)
        return cls(rows, max_attempts)

    def class_of(self, i: int, j: int) -> int:
        return int(self.entries[i - 1, j - 1])

    def to_json(self) -> str:
        return json.dumps({"max_attempts": self.max_attempts, "entries": self.entries.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "AlphaMatrix":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"malformed alpha JSON: {e}") from e
        if not isinstance(obj, dict) or "max_attempts" not in obj or "entries" not in obj:
            raise ValueError("alpha JSON must contain 'max_attempts' and 'entries'")
        return cls(np.asarray(obj["entries"]), int(obj["max_attempts"]))


@dataclass(frozen=True)
class ClassPartition:
    """The sets S_n = {(i, j): alpha[i][j] = n} and their joint-PMF mass."""

    alpha: AlphaMatrix
    classes: tuple  # classes[n-1] = tuple of (i, j) pairs in S_n
    class_mass: np.ndarray  # q_n = sum of P_{i,j} over S_n

    def __post_init__(self):
        q = np.array(self.class_mass, dtype=float)  # copy: frozen below
        if len(q) != self.alpha.max_attempts or np.any(q < 0):
            raise ValueError("class_mass must be M non-negative reals")
        q.setflags(write=False)
        object.__setattr__(self, "class_mass", q)


@dataclass(frozen=True)
class PolicyEvaluation:
    """Analytic round metrics for one (params, alpha, N) configuration."""

    expected_delay: float  # slots, conditional on some relay being eligible
    throughput: float  # bits/symbol, rate in the numerator
    throughput_literal: float  # printed-form variant, rate in the denominator
    mean_attempts: float  # E[i + j of the winner | non-outage]
    non_outage_prob: float
    per_class_select_prob: np.ndarray


def partition_classes(alpha: AlphaMatrix, joint: np.ndarray) -> ClassPartition:
    """Group the feasible (i, j) pairs by timer class and weigh them."""
    m = alpha.max_attempts
    classes = [[] for _ in range(m)]
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            classes[alpha.class_of(i, j) - 1].append((i, j))
    q = np.bincount(alpha.entries.ravel(), weights=np.asarray(joint).ravel(), minlength=m + 1)[1:]
    return ClassPartition(alpha, tuple(tuple(c) for c in classes), q)


def class_select_probs(partition: ClassPartition, num_relays: int):
    """P{selection happens in class n} for n = 1..M, plus the non-outage mass.

    With N i.i.d. relays, class n is selected iff at least one relay's pair
    lies in S_n and none lies in an earlier class:
    (1 - Q_{n-1})^N - (1 - Q_n)^N with Q_n the cumulative class mass.
    Evaluated in the factored form q_n * sum_k a^k b^(N-1-k) with
    a = 1 - Q_{n-1}, b = 1 - Q_n, which avoids cancellation between powers
    of numbers near 1 when the class masses are small.
    """
    if num_relays < 1:
        raise ValueError(f"num_relays must be >= 1, got {num_relays}")
    q = partition.class_mass
    miss = 1.0 - np.concatenate(([0.0], np.cumsum(q)))  # P{one relay misses classes 1..n}
    ks = np.arange(num_relays)
    select = np.empty(len(q))
    for n in range(len(q)):
        select[n] = q[n] * float((miss[n] ** ks * miss[n + 1] ** ks[::-1]).sum())
    non_outage = float(q.sum() * (miss[-1] ** ks).sum())
    return select, non_outage


def _class_conditional_means(partition: ClassPartition, joint: np.ndarray):
    """Per-class means of (n + j) and (i + j) over the winner's pair.

    Empty classes (q_n = 0) contribute 0; their selection probability is
    also 0, so the 0/0 limit is well defined.
    """
    m = partition.alpha.max_attempts
    joint = np.asarray(joint, dtype=float)
    i_grid, j_grid = np.meshgrid(np.arange(1, m + 1), np.arange(1, m + 1), indexing="ij")
    flat = partition.alpha.entries.ravel()
    q = partition.class_mass
    wj = np.bincount(flat, weights=(j_grid * joint).ravel(), minlength=m + 1)[1:]
    wij = np.bincount(flat, weights=((i_grid + j_grid) * joint).ravel(), minlength=m + 1)[1:]
    mean_delay = np.zeros(m)
    mean_att = np.zeros(m)
    nz = q > 0
    ns = np.arange(1, m + 1, dtype=float)
    mean_delay[nz] = ns[nz] + wj[nz] / q[nz]
    mean_att[nz] = wij[nz] / q[nz]
    return mean_delay, mean_att


def expected_delay(partition: ClassPartition, num_relays: int, joint: np.ndarray) -> float:
    """Expected slots per round, conditional on non-outage.

    The winner of class n costs n + j slots (takeover at the class timer,
    then the relay's own attempts); the class-conditional mean of that is
    weighted by the selection probabilities and normalized by the
    non-outage mass.
    """
    select, non_outage = class_select_probs(partition, num_relays)
    if non_outage <= 0.0:
        raise NoFeasibleConfigError()
    mean_delay, _ = _class_conditional_means(partition, joint)
    return float((mean_delay * select).sum() / non_outage)


def mean_total_attempts(partition: ClassPartition, num_relays: int, joint: np.ndarray) -> float:
    """E[i + j of the winning relay | non-outage]."""
    select, non_outage = class_select_probs(partition, num_relays)
    if non_outage <= 0.0:
        raise NoFeasibleConfigError()
    _, mean_att = _class_conditional_means(partition, joint)
    return float((mean_att * select).sum() / non_outage)


def throughput(
    partition: ClassPartition,
    num_relays: int,
    joint: np.ndarray,
    rate: float,
    eq12_literal: bool = False,
) -> float:
    """Bits per symbol delivered per round.

    Default places the rate in the numerator (bits delivered per attempted
    symbol): non_outage * rate / E[attempts].  The literal variant keeps the
    printed placement with the rate dividing instead.  At rate = 1 the two
    coincide.
    """
    select, non_outage = class_select_probs(partition, num_relays)
    if non_outage <= 0.0:
        raise NoFeasibleConfigError()
    _, mean_att = _class_conditional_means(partition, joint)
    e_attempts = float((mean_att * select).sum() / non_outage)
    if eq12_literal:
        return non_outage / (e_attempts * rate)
    return non_outage * rate / e_attempts


def evaluate_policy(params: FadingParams, num_relays: int, alpha: AlphaMatrix) -> PolicyEvaluation:
    """All analytic metrics for one alpha at one scenario."""
    joint = joint_pmf(params)
    partition = partition_classes(alpha, joint)
    select, non_outage = class_select_probs(partition, num_relays)
    if non_outage <= 0.0:
        raise NoFeasibleConfigError()
    mean_delay_c, mean_att_c = _class_conditional_means(partition, joint)
    delay = float((mean_delay_c * select).sum() / non_outage)
    e_attempts = float((mean_att_c * select).sum() / non_outage)
    return PolicyEvaluation(
        expected_delay=delay,
        throughput=non_outage * params.rate / e_attempts,
        throughput_literal=non_outage / (e_attempts * params.rate),
        mean_attempts=e_attempts,
        non_outage_prob=non_outage,
        per_class_select_prob=select,
    )


def _objective_value(alpha_arr, max_attempts, joint, num_relays, rate, objective):
    partition = partition_classes(AlphaMatrix(alpha_arr, max_attempts), joint)
    if objective is Objective.MIN_DELAY:
        return expected_delay(partition, num_relays, joint)
    return throughput(partition, num_relays, joint, rate)


def coordinate_descent(params: FadingParams, num_relays: int, objective: Objective):
    """Entry-at-a-time sweep over alpha; returns (alpha, objective trace).

    Starts from alpha[i][j] = i and repeatedly replaces one entry with the
    best class in [i, M] while the rest stay fixed, smallest class winning
    ties; stops when a full sweep changes nothing.  Each update picks the
    best of a finite candidate set that includes the incumbent, so the
    trace is monotone and the sweep terminates.
    """
    if num_relays < 1:
        raise ValueError(f"num_relays must be >= 1, got {num_relays}")
    joint = joint_pmf(params)
    if float(joint.sum()) <= 0.0:
        raise NoFeasibleConfigError()
    m = params.max_attempts
    minimize = objective is Objective.MIN_DELAY
    arr = AlphaMatrix.initial(m).entries.copy()
    trace = [_objective_value(arr, m, joint, num_relays, params.rate, objective)]

    changed = True
    while changed:
        changed = False
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                old = arr[i - 1, j - 1]
                best_k, best_val = None, None
                for k in range(i, m + 1):  # classes below i cost infinity
                    arr[i - 1, j - 1] = k
                    val = _objective_value(arr, m, joint, num_relays, params.rate, objective)
                    if best_val is None or (val < best_val if minimize else val > best_val):
                        best_k, best_val = k, val
                arr[i - 1, j - 1] = best_k
                trace.append(best_val)
                if best_k != old:
                    changed = True
    return AlphaMatrix(arr, m), trace


def optimize_alpha(params: FadingParams, num_relays: int, objective: Objective) -> AlphaMatrix:
    """Alpha determination by coordinate descent (see coordinate_descent)."""
    alpha, _ = coordinate_descent(params, num_relays, objective)
    return alpha
