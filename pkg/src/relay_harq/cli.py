"""Command-line front end: SNR/relay-count sweeps, alpha optimization, and
direct analytic evaluation, with CSV or JSON output.

All randomness flows from the single --seed: each sweep cell derives its
own substream from (snr index, relay-count index, scheme code), with fixed
per-scheme codes so adding a scheme to the request never perturbs the
other cells.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from io import StringIO

import numpy as np

from .channel import FadingParams, attempt_pmf
from .policy import (
    AlphaMatrix,
    NoFeasibleConfigError,
    Objective,
    evaluate_policy,
    optimize_alpha,
)
from .simulator import Scheme, SimConfig, run_trials

CSV_COLUMNS = [
    "snr_db",
    "num_relays",
    "scheme",
    "trials",
    "seed",
    "mean_delay",
    "delay_stderr",
    "throughput",
    "throughput_stderr",
    "feasibility_rate",
    "analytic_delay",
    "analytic_throughput",
]

# substream codes are per-scheme constants, not positions in the request
_SCHEME_CODE = {Scheme.PROPOSED: 0, Scheme.FDFR: 1, Scheme.OPTIMAL: 2}
_PROPOSED_THROUGHPUT_CODE = 3  # second proposed run under --dual-objective


@dataclass
class SweepSpec:
    snr_db_min: float
    snr_db_max: float
    snr_db_step: float
    num_relays_list: list
    schemes: list
    trials: int
    seed: int
    rate: float = 1.0
    max_attempts: int = 4
    avg_gain: float = 1.0
    beta_max: float = 0.01
    analytic: bool = False
    dual_objective: bool = False
    objective: Objective = Objective.MIN_DELAY
    eq12_literal: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.snr_db_step <= 0:
            raise ValueError(f"snr step must be > 0, got {self.snr_db_step}")
        if self.snr_db_min > self.snr_db_max:
            raise ValueError("snr range must have min <= max")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if not self.num_relays_list:
            raise ValueError("at least one relay count is required")

    def snr_db_values(self) -> list:
        values = []
        v = self.snr_db_min
        while v <= self.snr_db_max + 1e-9:
            values.append(v)
            v = self.snr_db_min + (len(values)) * self.snr_db_step
        return values


def snr_db_to_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def _cell_seed(master: int, snr_idx: int, n_idx: int, code: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(snr_idx, n_idx, code))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _sim_cell(spec, params, num_relays, alpha, seed, scheme):
    cfg = SimConfig(
        params=params,
        num_relays=num_relays,
        trials=spec.trials,
        seed=seed,
        alpha=alpha,
        beta_max=spec.beta_max,
    )
    return run_trials(cfg, scheme)


def _sweep_row(spec, snr_idx, snr_db, n_idx, num_relays, scheme, alphas):
    params = FadingParams(spec.avg_gain, snr_db_to_linear(snr_db), spec.rate, spec.max_attempts)
    row = {
        "snr_db": snr_db,
        "num_relays": num_relays,
        "scheme": scheme.value,
        "trials": spec.trials,
        "seed": spec.seed,
        "analytic_delay": None,
        "analytic_throughput": None,
    }

    def pick_throughput(thing):
        return thing.throughput_literal if spec.eq12_literal else thing.throughput

    if scheme is Scheme.PROPOSED:
        alpha_delay = alphas[(snr_idx, n_idx, Objective.MIN_DELAY if spec.dual_objective else spec.objective)]
        agg = _sim_cell(spec, params, num_relays, alpha_delay,
                        _cell_seed(spec.seed, snr_idx, n_idx, _SCHEME_CODE[scheme]), scheme)
        row.update(
            mean_delay=agg.mean_delay,
            delay_stderr=agg.delay_stderr,
            feasibility_rate=agg.feasibility_rate,
            throughput=pick_throughput(agg),
            throughput_stderr=agg.throughput_stderr,
        )
        if spec.dual_objective:
            # throughput columns come from a separate run under the
            # throughput-optimized alpha, on its own substream
            alpha_thr = alphas[(snr_idx, n_idx, Objective.MAX_THROUGHPUT)]
            agg_thr = _sim_cell(spec, params, num_relays, alpha_thr,
                                _cell_seed(spec.seed, snr_idx, n_idx, _PROPOSED_THROUGHPUT_CODE),
                                scheme)
            row.update(throughput=pick_throughput(agg_thr), throughput_stderr=agg_thr.throughput_stderr)
        if spec.analytic:
            ev_delay = evaluate_policy(params, num_relays, alpha_delay)
            row["analytic_delay"] = ev_delay.expected_delay
            ev_thr = ev_delay
            if spec.dual_objective:
                ev_thr = evaluate_policy(params, num_relays, alphas[(snr_idx, n_idx, Objective.MAX_THROUGHPUT)])
            row["analytic_throughput"] = pick_throughput(ev_thr)
    else:
        agg = _sim_cell(spec, params, num_relays, None,
                        _cell_seed(spec.seed, snr_idx, n_idx, _SCHEME_CODE[scheme]), scheme)
        row.update(
            mean_delay=agg.mean_delay,
            delay_stderr=agg.delay_stderr,
            feasibility_rate=agg.feasibility_rate,
            throughput=pick_throughput(agg),
            throughput_stderr=agg.throughput_stderr,
        )
    return row


def run_sweep(spec: SweepSpec) -> list:
    """Evaluate the full grid and return rows in deterministic grid order."""
    snr_values = spec.snr_db_values()

    # one alpha optimization per (snr, N) grid point and objective,
    # reused across all that point's trials
    alphas = {}
    if Scheme.PROPOSED in spec.schemes:
        objectives = (
            [Objective.MIN_DELAY, Objective.MAX_THROUGHPUT] if spec.dual_objective else [spec.objective]
        )
        for snr_idx, snr_db in enumerate(snr_values):
            params_m = FadingParams(
                spec.avg_gain, snr_db_to_linear(snr_db), spec.rate, spec.max_attempts
            )
            for n_idx, num_relays in enumerate(spec.num_relays_list):
                for obj in objectives:
                    alphas[(snr_idx, n_idx, obj)] = optimize_alpha(params_m, num_relays, obj)

    cells = [
        (snr_idx, snr_db, n_idx, num_relays, scheme)
        for snr_idx, snr_db in enumerate(snr_values)
        for n_idx, num_relays in enumerate(spec.num_relays_list)
        for scheme in spec.schemes
    ]
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            futures = [pool.submit(_sweep_row, spec, *cell, alphas) for cell in cells]
            return [f.result() for f in futures]  # grid order regardless of completion
    return [_sweep_row(spec, *cell, alphas) for cell in cells]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list) -> str:
    out = StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        out.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")
    return out.getvalue()


def rows_to_json(rows: list) -> str:
    return json.dumps({"columns": CSV_COLUMNS, "rows": rows}, indent=2) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_snr_range(text: str):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return v, v, 1.0
        if len(parts) == 3:
            return float(parts[0]), float(parts[1]), float(parts[2])
    except ValueError:
        pass
    raise ValueError(f"--snr-db expects MIN:MAX:STEP or a single value, got {text!r}")


def _parse_schemes(text: str):
    schemes = []
    for name in text.split(","):
        name = name.strip()
        try:
            schemes.append(Scheme(name))
        except ValueError:
            raise ValueError(
                f"unknown scheme {name!r}; valid: " + ",".join(s.value for s in Scheme)
            ) from None
    return schemes


def _add_param_args(sub, snr_help):
    sub.add_argument("--snr-db", required=True, help=snr_help)
    sub.add_argument("--relays", required=True, help="relay count N (comma list for sweep)")
    sub.add_argument("--rate", type=float, default=1.0, help="spectral efficiency, bits/symbol")
    sub.add_argument("--max-attempts", type=int, default=4, help="per-link attempt cap M")
    sub.add_argument("--avg-gain", type=float, default=1.0, help="mean squared channel gain")
    sub.add_argument("--output", default=None, help="write to file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relay-harq",
        description="Timer-based relay selection for IR-HARQ: sweeps, alpha optimization, analytics.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("sweep", help="simulate a grid of (SNR, N, scheme) cells")
    _add_param_args(sweep, "SNR grid as MIN:MAX:STEP in dB (or a single value)")
    sweep.add_argument("--schemes", default="proposed,fdfr,optimal")
    sweep.add_argument("--trials", type=int, default=100_000)
    sweep.add_argument("--seed", type=int, default=12345)
    sweep.add_argument("--beta-max", type=float, default=0.01)
    sweep.add_argument("--analytic", action="store_true",
                       help="append analytic delay/throughput columns for the proposed scheme")
    sweep.add_argument("--objective", choices=[o.value for o in Objective],
                       default=Objective.MIN_DELAY.value)
    sweep.add_argument("--dual-objective", action="store_true",
                       help="delay columns use the min-delay alpha, throughput columns the max-throughput alpha")
    sweep.add_argument("--eq12-literal", action="store_true",
                       help="report throughput with the rate dividing instead of multiplying")
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    sweep.add_argument("--workers", type=int, default=1)

    opt = subs.add_parser("optimize-alpha", help="optimize the timer-class matrix")
    _add_param_args(opt, "operating SNR in dB")
    opt.add_argument("--objective", choices=[o.value for o in Objective],
                     default=Objective.MIN_DELAY.value)

    ana = subs.add_parser("analytic", help="closed-form evaluation for a given alpha")
    _add_param_args(ana, "operating SNR in dB")
    ana.add_argument("--alpha-file", default=None,
                     help="alpha JSON; defaults to the fire-on-decode matrix alpha[i][j]=i")
    return parser


def _single_params(args) -> tuple:
    snr_db = float(args.snr_db)
    params = FadingParams(args.avg_gain, snr_db_to_linear(snr_db), args.rate, args.max_attempts)
    num_relays = int(args.relays)
    return params, num_relays


def cmd_sweep(args) -> int:
    snr_min, snr_max, snr_step = _parse_snr_range(args.snr_db)
    spec = SweepSpec(
        snr_db_min=snr_min,
        snr_db_max=snr_max,
        snr_db_step=snr_step,
        num_relays_list=[int(x) for x in args.relays.split(",")],
        schemes=_parse_schemes(args.schemes),
        trials=args.trials,
        seed=args.seed,
        rate=args.rate,
        max_attempts=args.max_attempts,
        avg_gain=args.avg_gain,
        beta_max=args.beta_max,
        analytic=args.analytic,
        dual_objective=args.dual_objective,
        objective=Objective(args.objective),
        eq12_literal=args.eq12_literal,
        workers=args.workers,
    )
    rows = run_sweep(spec)
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows)
    _emit(text, args.output)
    return 0


def cmd_optimize_alpha(args) -> int:
    params, num_relays = _single_params(args)
    objective = Objective(args.objective)
    alpha = optimize_alpha(params, num_relays, objective)
    ev = evaluate_policy(params, num_relays, alpha)
    value = ev.expected_delay if objective is Objective.MIN_DELAY else ev.throughput
    out = {
        "max_attempts": alpha.max_attempts,
        "entries": alpha.entries.tolist(),
        "objective": objective.value,
        "objective_value": value,
    }
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return 0


def cmd_analytic(args) -> int:
    params, num_relays = _single_params(args)
    if args.alpha_file:
        with open(args.alpha_file, "r", encoding="utf-8") as fh:
            alpha = AlphaMatrix.from_json(fh.read())
        if alpha.max_attempts != params.max_attempts:
            raise ValueError(
                f"alpha file is {alpha.max_attempts}x{alpha.max_attempts} "
                f"but --max-attempts is {params.max_attempts}"
            )
    else:
        alpha = AlphaMatrix.initial(params.max_attempts)
    pmf = attempt_pmf(params)
    ev = evaluate_policy(params, num_relays, alpha)
    out = {
        "snr_db": float(args.snr_db),
        "num_relays": num_relays,
        "rate": params.rate,
        "max_attempts": params.max_attempts,
        "avg_gain": params.avg_gain,
        "alpha": alpha.entries.tolist(),
        "attempt_pmf": pmf.probs.tolist(),
        "attempt_tail": pmf.tail,
        "feasible_mass": pmf.feasible_mass,
        "joint_feasible_mass": pmf.feasible_mass**2,
        "per_class_select_prob": ev.per_class_select_prob.tolist(),
        "non_outage_prob": ev.non_outage_prob,
        "expected_delay": ev.expected_delay,
        "mean_attempts": ev.mean_attempts,
        "throughput": ev.throughput,
        "throughput_eq12_literal": ev.throughput_literal,
    }
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sweep": cmd_sweep,
        "optimize-alpha": cmd_optimize_alpha,
        "analytic": cmd_analytic,
    }
    try:
        return handlers[args.command](args)
    except NoFeasibleConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
