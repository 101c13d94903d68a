"""Command-line front end: scenario loading, subcommand dispatch, and
CSV/JSON/SVG emission.

Exit codes: 0 on success, 1 on usage or validation problems, 2 when the
verification suite finds a hard-check failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .conditions import azc_audit, is_cascade_belief, is_mlrp, is_pairwise_informative, scan_cascades
from .engine import detect_cascade, solve_quotes
from .errors import MarketLearnError
from .plots import emit_plots
from .scenario import load_scenario, save_scenario, scenario_to_dict
from .simulate import compare_modes, run_episodes, summarize_episodes
from .verify import check_limit_support_3state, run_martingale_suite

__all__ = ["main", "entrypoint", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="market-learn",
        description="Sequential-trade market simulator and learning-condition checker",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scenario_required=True):
        p.add_argument("--scenario", required=scenario_required, help="scenario JSON file")
        p.add_argument("--output", default=".", help="directory for emitted files")
        p.add_argument("--episodes", type=int, help="override episode count")
        p.add_argument("--horizon", type=int, help="override horizon")
        p.add_argument("--seed", type=int, help="override seed")
        p.add_argument("--eta", type=float, help="override noise rate")
        p.add_argument("--mode", choices=("private", "public"), help="override market mode")
        p.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")

    p_check = sub.add_parser("check", help="run the signal-structure condition checkers")
    add_common(p_check)
    p_check.add_argument("--tol", type=float, default=1e-9, help="equality tolerance for the checkers")
    p_check.add_argument("--azc-delta", type=float, default=None,
                         help="also run the movement audit with this mispricing delta")

    p_quotes = sub.add_parser("quotes", help="solve quotes and the signal partition at the prior")
    add_common(p_quotes)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo batch and emit CSV + summary JSON")
    add_common(p_sim)
    p_sim.add_argument("--plots", action="store_true", help="emit SVG charts")
    p_sim.add_argument("--thin", type=int, default=10, help="plot every k-th period")

    p_cmp = sub.add_parser("compare", help="run both market modes on shared draws")
    add_common(p_cmp)
    p_cmp.add_argument("--slack", type=float, default=0.05,
                       help="statistical slack for the learning containment check")

    p_scan = sub.add_parser("cascade-scan", help="locate cascade beliefs across target expectations")
    add_common(p_scan)
    p_scan.add_argument("--c-points", type=int, default=201, help="grid points across the value hull")
    p_scan.add_argument("--c", type=float, default=None, help="probe a single target expectation")
    p_scan.add_argument("--tol", type=float, default=1e-9, help="cascade residual tolerance")

    p_verify = sub.add_parser("verify", help="run the one-step identity suite (exit 2 on failure)")
    add_common(p_verify, scenario_required=False)
    p_verify.add_argument("--trials", type=int, default=1000, help="randomized states per check")

    return parser


def _fail(message: str, json_errors: bool) -> int:
    if json_errors:
        print(json.dumps({"error": message}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)
    return 1


def _apply_overrides(config, args):
    overrides = {}
    for key in ("episodes", "horizon", "seed", "eta", "mode"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return config.with_overrides(**overrides) if overrides else config


def _emit_json(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _write_episode_csv(results, config, path: Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["episode", "true_state", "final_price", "final_belief_on_truth", "cascade_time", "learned"]
        )
        for r in results:
            writer.writerow([
                r.episode,
                r.true_value,
                r.final_price,
                r.final_belief_on_truth,
                "" if r.cascade_time is None else r.cascade_time,
                int(r.learned(config.convergence_tol)),
            ])


def _cmd_check(args) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    structure = config.structure
    report = {
        "pairwise_informative": is_pairwise_informative(structure, tol=args.tol).as_dict(),
        "mlrp_weak": is_mlrp(structure, strict=False).as_dict(),
        "mlrp_strict": is_mlrp(structure, strict=True).as_dict(),
        "cascade_at_prior": is_cascade_belief(structure, config.prior, tol=args.tol).as_dict(),
    }
    if args.azc_delta is not None:
        report["movement_audit"] = azc_audit(structure, delta=args.azc_delta,
                                             movement_tol=args.tol).as_dict()
    _emit_json(report)
    return 0


def _cmd_quotes(args) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    quotes, partition = solve_quotes(config.prior, config.structure, config.eta)
    _emit_json({
        "bid": quotes.bid,
        "ask": quotes.ask,
        "partition": partition.assignment(config.structure.signals),
        "cascade": detect_cascade(partition),
    })
    return 0


def _cmd_simulate(args) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    results = run_episodes(config)
    summary = summarize_episodes(results, config)

    _write_episode_csv(results, config, out_dir / "episodes.csv")
    (out_dir / "summary.json").write_text(
        json.dumps({"scenario": scenario_to_dict(config), "summary": summary.as_dict()},
                   indent=2, sort_keys=True) + "\n"
    )
    save_scenario(config, out_dir / "scenario_used.json")
    if args.plots:
        emit_plots(results, out_dir, convergence_tol=config.convergence_tol, thin=args.thin)

    print(f"{config.episodes} episodes ({config.mode}): learned_fraction={summary.learned_fraction:.4f} "
          f"cascade_fraction={summary.cascade_fraction:.4f} -> {out_dir}")
    return 0


def _cmd_compare(args) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    comparison = compare_modes(config, slack=args.slack)
    for mode in ("private", "public"):
        mode_config = config.with_overrides(mode=mode)
        _write_episode_csv(run_episodes(mode_config), mode_config, out_dir / f"episodes_{mode}.csv")
    (out_dir / "comparison.json").write_text(
        json.dumps({"scenario": scenario_to_dict(config), "comparison": comparison.as_dict()},
                   indent=2, sort_keys=True) + "\n"
    )

    print(f"private learned_fraction={comparison.private.learned_fraction:.4f} "
          f"public learned_fraction={comparison.public.learned_fraction:.4f} "
          f"nesting_ok={comparison.nesting_ok}")
    return 0


def _cmd_cascade_scan(args) -> int:
    config = _apply_overrides(load_scenario(args.scenario), args)
    if args.c is not None:
        from .conditions import find_cascade_beliefs
        found = [find_cascade_beliefs(config.structure, args.c, tol=args.tol)]
    else:
        found = scan_cascades(config.structure, c_points=args.c_points, tol=args.tol)
    _emit_json({
        "candidates": [entry.as_dict() for entry in found],
        "full_support_cascades": sum(1 for entry in found if entry.beliefs),
    })
    return 0


def _cmd_verify(args) -> int:
    structure = None
    eta = None
    if args.scenario:
        config = _apply_overrides(load_scenario(args.scenario), args)
        structure, eta = config.structure, config.eta
    seed = args.seed if args.seed is not None else 0

    reports = run_martingale_suite(trials=args.trials, seed=seed, structure=structure, eta=eta)
    hard_failure = any(not r.passed for r in reports)

    statistical = None
    if structure is not None and structure.n_states <= 3:
        if is_pairwise_informative(structure).holds:
            statistical = check_limit_support_3state(
                structure, eta, trials=50,
                horizon=args.horizon if args.horizon else 3000, seed=seed,
            )

    doc = {
        "hard_checks": [r.as_dict() for r in reports],
        "statistical_checks": [] if statistical is None else [statistical.as_dict()],
        "passed": not hard_failure,
    }
    _emit_json(doc)
    return 2 if hard_failure else 0


_COMMANDS = {
    "check": _cmd_check,
    "quotes": _cmd_quotes,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "cascade-scan": _cmd_cascade_scan,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; report those as validation errors
        return 0 if exc.code == 0 else 1

    json_errors = getattr(args, "json_errors", False)
    try:
        return _COMMANDS[args.command](args)
    except MarketLearnError as exc:
        return _fail(str(exc), json_errors)
    except ValueError as exc:
        return _fail(str(exc), json_errors)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
