import dataclasses
import json
import math

import numpy as np
import pytest

import relay_harq.simulator as simulator
from relay_harq.channel import FadingParams, attempt_pmf
from relay_harq.policy import AlphaMatrix, Objective, evaluate_policy, optimize_alpha
from relay_harq.simulator import (
    RelayNode,
    Scheme,
    SimConfig,
    iter_outcomes,
    philox_key,
    run_round_fdfr,
    run_round_optimal,
    run_round_proposed,
    run_trials,
    sample_round_relays,
    trial_uniforms,
    write_round_trace,
)

P_DEFAULT = FadingParams(1.0, 1.0, 1.0, 4)


def node(nid, i, j, beta=0.001):
    return RelayNode(id=nid, src_attempts=float(i), dst_attempts=float(j), beta=beta)


def relay_stream(config):
    """Per-trial relay lists drawn from the same substream layout run_trials uses."""
    key = philox_key(config.seed)
    blocks = (3 * config.num_relays + 3) // 4
    for t in range(config.trials):
        gen = np.random.Generator(np.random.Philox(key=key))
        if t:
            gen.bit_generator.advance(t * blocks)
        yield sample_round_relays(config.params, config.num_relays, config.beta_max, gen)


# --- single rounds ----------------------------------------------------------


def test_round_no_eligible_relays():
    relays = [node(0, math.inf, 1), node(1, 2, math.inf)]
    for out in (
        run_round_proposed(relays, AlphaMatrix.initial(4)),
        run_round_fdfr(relays),
        run_round_optimal(relays),
    ):
        assert not out.feasible
        assert out.winner_id is None
        assert out.delay_slots is None


def test_round_single_contender():
    alpha = AlphaMatrix.initial(4)
    relays = [node(0, 2, 1), node(1, math.inf, 3)]
    out = run_round_proposed(relays, alpha)
    assert out.winner_id == 0
    assert out.takeover_slot == 2
    assert out.delay_slots == 3
    assert out.attempt_total == 3


def test_round_class_order_beats_beta():
    # class 1 with the largest beta still beats class 2
    entries = np.array([[1, 1, 1, 1], [2, 2, 2, 2], [3, 3, 3, 3], [4, 4, 4, 4]])
    alpha = AlphaMatrix(entries, 4)
    relays = [node(0, 2, 2, beta=0.0001), node(1, 1, 4, beta=0.9)]
    out = run_round_proposed(relays, alpha)
    assert out.winner_id == 1
    assert out.takeover_slot == 1


def test_fdfr_earliest_decoder_wins():
    out = run_round_fdfr([node(0, 3, 1), node(1, 2, 4)])
    assert out.winner_id == 1
    assert out.delay_slots == 6


def test_fdfr_beta_breaks_equal_decode_times():
    out = run_round_fdfr([node(0, 2, 3, beta=0.005), node(1, 2, 1, beta=0.002)])
    assert out.winner_id == 1


def test_fdfr_exclusive_destination_cap():
    relays = [node(0, 1, 4), node(1, 3, 2)]
    assert run_round_fdfr(relays).winner_id == 0
    out = run_round_fdfr(relays, exclude_dst_at=4)
    assert out.winner_id == 1


def test_optimal_picks_min_total():
    out = run_round_optimal([node(0, 1, 3), node(1, 2, 1)])
    assert out.winner_id == 1
    assert out.delay_slots == 3
    assert out.takeover_slot == 2


def test_optimal_tie_broken_by_beta():
    out = run_round_optimal([node(0, 1, 2, beta=0.008), node(1, 2, 1, beta=0.003)])
    assert out.winner_id == 1
    assert out.delay_slots == 3
    out2 = run_round_optimal([node(0, 1, 2, beta=0.001), node(1, 2, 1, beta=0.003)])
    assert out2.winner_id == 0
    assert out2.delay_slots == 3  # delay invariant under the tie


def test_proposed_requires_alpha_in_trials():
    cfg = SimConfig(params=P_DEFAULT, num_relays=2, trials=10, seed=0)
    with pytest.raises(ValueError):
        run_trials(cfg, Scheme.PROPOSED)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(params=P_DEFAULT, num_relays=0, trials=10, seed=0)
    with pytest.raises(ValueError):
        SimConfig(params=P_DEFAULT, num_relays=1, trials=0, seed=0)
    with pytest.raises(ValueError):
        SimConfig(params=P_DEFAULT, num_relays=1, trials=10, seed=0, beta_max=1.0)
    with pytest.raises(ValueError):
        SimConfig(
            params=P_DEFAULT, num_relays=1, trials=10, seed=0, alpha=AlphaMatrix.initial(3)
        )


# --- equivalences and dominance ---------------------------------------------


def fields_except_scheme(outcome):
    d = dataclasses.asdict(outcome)
    d.pop("scheme")
    return d


def test_proposed_with_identity_alpha_reproduces_fdfr():
    # shared randomness, 1e4 rounds, every outcome field equal
    cfg = SimConfig(params=P_DEFAULT, num_relays=5, trials=10_000, seed=314)
    alpha = AlphaMatrix.initial(4)
    for relays in relay_stream(cfg):
        a = run_round_proposed(relays, alpha)
        b = run_round_fdfr(relays)
        assert fields_except_scheme(a) == fields_except_scheme(b)


def test_optimal_dominates_per_round():
    cfg = SimConfig(params=P_DEFAULT, num_relays=4, trials=4_000, seed=11)
    alpha = optimize_alpha(P_DEFAULT, 4, Objective.MIN_DELAY)
    for relays in relay_stream(cfg):
        opt = run_round_optimal(relays)
        if not opt.feasible:
            continue
        for other in (run_round_fdfr(relays), run_round_proposed(relays, alpha)):
            assert opt.attempt_total <= other.attempt_total
            assert opt.delay_slots <= other.delay_slots


def test_beta_only_resolves_intra_class_ties():
    # rescaling all betas never changes the winning class
    cfg = SimConfig(params=P_DEFAULT, num_relays=5, trials=2_000, seed=21)
    alpha = optimize_alpha(P_DEFAULT, 5, Objective.MIN_DELAY)
    for relays in relay_stream(cfg):
        out = run_round_proposed(relays, alpha)
        shrunk = [dataclasses.replace(r, beta=r.beta * 1e-3) for r in relays]
        out2 = run_round_proposed(shrunk, alpha)
        assert out.feasible == out2.feasible
        if out.feasible:
            assert out.takeover_slot == out2.takeover_slot


# --- vectorized trials ------------------------------------------------------


def test_scalar_rounds_match_vectorized():
    alpha = optimize_alpha(P_DEFAULT, 3, Objective.MIN_DELAY)
    cfg = SimConfig(params=P_DEFAULT, num_relays=3, trials=700, seed=5, alpha=alpha)
    for scheme, runner in (
        (Scheme.PROPOSED, lambda r: run_round_proposed(r, alpha)),
        (Scheme.FDFR, run_round_fdfr),
        (Scheme.OPTIMAL, run_round_optimal),
    ):
        scalar = [runner(relays) for relays in relay_stream(cfg)]
        vector = list(iter_outcomes(cfg, scheme))
        assert len(scalar) == len(vector)
        for a, b in zip(scalar, vector):
            assert fields_except_scheme(a) == fields_except_scheme(b)


def test_run_trials_deterministic():
    cfg = SimConfig(params=P_DEFAULT, num_relays=5, trials=50_000, seed=777)
    a = run_trials(cfg, Scheme.FDFR)
    b = run_trials(cfg, Scheme.FDFR)
    assert a == b


def test_run_trials_chunk_invariant(monkeypatch):
    cfg = SimConfig(params=P_DEFAULT, num_relays=5, trials=20_001, seed=3)
    ref = run_trials(cfg, Scheme.OPTIMAL)
    monkeypatch.setattr(simulator, "_CHUNK", 997)
    odd = run_trials(cfg, Scheme.OPTIMAL)
    assert ref == odd


def test_trial_uniforms_slice_equals_whole():
    key = philox_key(99, spawn_key=(1, 2))
    whole = trial_uniforms(key, 0, 500, 13)
    parts = np.vstack(
        [trial_uniforms(key, 0, 200, 13), trial_uniforms(key, 200, 300, 13)]
    )
    assert np.array_equal(whole, parts)


def test_feasibility_rate_matches_closed_form():
    cfg = SimConfig(params=P_DEFAULT, num_relays=5, trials=100_000, seed=8)
    agg = run_trials(cfg, Scheme.OPTIMAL)
    q_total = attempt_pmf(P_DEFAULT).feasible_mass ** 2
    expect = 1.0 - (1.0 - q_total) ** 5
    se = math.sqrt(expect * (1 - expect) / cfg.trials)
    assert abs(agg.feasibility_rate - expect) <= 3 * se


def test_single_relay_schemes_share_attempts():
    alpha = optimize_alpha(P_DEFAULT, 1, Objective.MIN_DELAY)
    cfg = SimConfig(params=P_DEFAULT, num_relays=1, trials=30_000, seed=44, alpha=alpha)
    aggs = {s: run_trials(cfg, s) for s in Scheme}
    assert aggs[Scheme.FDFR].mean_attempts == aggs[Scheme.OPTIMAL].mean_attempts
    assert aggs[Scheme.PROPOSED].mean_attempts == aggs[Scheme.FDFR].mean_attempts
    assert aggs[Scheme.FDFR].mean_delay == aggs[Scheme.OPTIMAL].mean_delay
    assert aggs[Scheme.PROPOSED].feasibility_rate == aggs[Scheme.FDFR].feasibility_rate
    # the timer scheme may take over later than the decode slot
    assert aggs[Scheme.PROPOSED].mean_delay >= aggs[Scheme.FDFR].mean_delay


def test_analytic_agreement_single_point():
    alpha = optimize_alpha(FadingParams(1.0, 10.0, 1.0, 4), 5, Objective.MIN_DELAY)
    params = FadingParams(1.0, 10.0, 1.0, 4)
    cfg = SimConfig(params=params, num_relays=5, trials=100_000, seed=60, alpha=alpha)
    agg = run_trials(cfg, Scheme.PROPOSED)
    ev = evaluate_policy(params, 5, alpha)
    assert abs(agg.mean_delay - ev.expected_delay) <= 3 * agg.delay_stderr
    assert abs(agg.throughput - ev.throughput) <= 3 * agg.throughput_stderr


def test_zero_feasible_rounds_warning():
    # snr so low that the feasible mass underflows to zero
    params = FadingParams(1.0, 1e-9, 40.0, 2)
    cfg = SimConfig(params=params, num_relays=3, trials=200, seed=1)
    agg = run_trials(cfg, Scheme.FDFR)
    assert agg.warning == "no feasible rounds"
    assert agg.num_feasible == 0
    assert math.isnan(agg.mean_delay)


def test_relay_permutation_leaves_metrics_unchanged():
    rng = np.random.default_rng(17)
    gen = np.random.default_rng(23)
    alpha = optimize_alpha(P_DEFAULT, 6, Objective.MIN_DELAY)
    for _ in range(200):
        relays = sample_round_relays(P_DEFAULT, 6, 0.01, gen)
        perm = [relays[k] for k in rng.permutation(6)]
        a = run_round_proposed(relays, alpha)
        b = run_round_proposed(perm, alpha)
        assert a.feasible == b.feasible
        if a.feasible:
            assert (a.delay_slots, a.attempt_total, a.takeover_slot) == (
                b.delay_slots,
                b.attempt_total,
                b.takeover_slot,
            )


def test_round_trace_jsonl(tmp_path):
    alpha = AlphaMatrix.initial(4)
    cfg = SimConfig(params=P_DEFAULT, num_relays=2, trials=50, seed=9, alpha=alpha)
    path = tmp_path / "trace.jsonl"
    write_round_trace(path, cfg, Scheme.PROPOSED)
    lines = path.read_text().splitlines()
    assert len(lines) == 50
    rec = json.loads(lines[0])
    assert set(rec) == {
        "scheme",
        "feasible",
        "winner_id",
        "takeover_slot",
        "winner_src_attempts",
        "winner_dst_attempts",
        "delay_slots",
        "attempt_total",
    }
    for line in lines:
        rec = json.loads(line)
        if rec["feasible"]:
            assert rec["delay_slots"] == rec["takeover_slot"] + rec["winner_dst_attempts"]
        else:
            assert rec["winner_id"] is None
