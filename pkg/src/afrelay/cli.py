"""Command-line entry point: ``afrelay <subcommand> [options]``.

Exit codes: 0 success, 1 configuration error, 2 every sweep point
infeasible, 3 oracle-suite failure (validate only).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness, oracles
from .energy import Q_MODELS
from .harness import ConfigError, ExperimentConfig
from .montecarlo import simulate_two_hop
from .energy import AllocationFactors
from .optimizer import WeightVector

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_ORACLE = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment configuration")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--q-model", choices=Q_MODELS, dest="q_model")
    common.add_argument("--samples", type=int, help="Monte Carlo samples per point")
    common.add_argument("--threads", type=int, help="Monte Carlo worker threads")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="afrelay", description="Two-way AF UAV relay energy/delay toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("optimize", parents=[common], help="optimise a single operating point")
    o.add_argument("--d", type=float, help="half separation in metres (default: geometry.d_ref)")
    o.add_argument("--power", type=float, help="total power budget in watts (default: power.p_max)")
    o.add_argument("--weight", type=float, nargs=3, metavar=("W_A", "W_B", "W_R"))

    sub.add_parser("sweep", parents=[common], help="distance, power and altitude sweeps plus figure datasets")
    sub.add_parser("tradeoff", parents=[common], help="energy/delay trade-off over the weight grid")
    sub.add_parser("ber", parents=[common], help="analytic and Monte Carlo BER over the power sweep")

    v = sub.add_parser("validate", parents=[common], help="run the oracle suite")
    v.add_argument("--full", action="store_true", help="full-size suite instead of the quick one")
    v.add_argument("--inject", choices=oracles.INJECTIONS, help="perturb one formula to test the suite")

    sub.add_parser("mc", parents=[common], help="Monte Carlo only, equal split over the distance sweep")
    return p


def _config(args) -> ExperimentConfig:
    cfg = harness.load_config(args.config)
    mc = {}
    if args.seed is not None:
        mc["seed"] = args.seed
    if args.samples is not None:
        mc["samples"] = args.samples
    if args.threads is not None:
        mc["threads"] = args.threads
    over = {}
    if mc:
        over["mc"] = mc
    if args.q_model:
        over["q_model"] = args.q_model
    if args.out:
        over["output"] = args.out
    if over:
        try:
            cfg = harness.config_replace(cfg, **over)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return cfg


def _cmd_optimize(cfg, args) -> int:
    d = args.d if args.d is not None else cfg.geometry.d_ref
    P = args.power if args.power is not None else cfg.power.p_max
    try:
        w = WeightVector(*args.weight) if args.weight else WeightVector(1 / 3, 1 / 3, 1 / 3)
        geos = harness.forwarding_geometries(cfg, d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [harness.evaluate_point(s, cfg, geos, P, w, "d", d, 0, cfg.mc.per_row) for s in cfg.schemes]
    text = harness.rows_to_csv(rows)
    harness.write_outputs(cfg.output, {"optimize": text})
    sys.stdout.write(text)
    return EXIT_INFEASIBLE if harness.all_infeasible(rows) else EXIT_OK


def _cmd_sweep(cfg, args) -> int:
    rows = []
    for sweep in ("d", "power_dbm", "altitude"):
        for s in cfg.schemes:
            rows += harness.run_scheme(cfg, s, sweep)
    rows = harness.sort_rows(rows)
    trade = harness.tradeoff_rows(cfg) if "PA" in cfg.schemes else None
    files = harness.figure_datasets(rows, trade)
    files["results"] = harness.rows_to_csv(rows)
    for p in harness.write_outputs(cfg.output, files):
        print(p)
    return EXIT_INFEASIBLE if harness.all_infeasible(rows) else EXIT_OK


def _cmd_tradeoff(cfg, args) -> int:
    trade = harness.tradeoff_rows(cfg)
    files = harness.figure_datasets([], trade)
    for p in harness.write_outputs(cfg.output, {"fig2_tradeoff": files["fig2_tradeoff"]}):
        print(p)
    return EXIT_INFEASIBLE if all(r["root_branch"].startswith("error:") for r in trade) else EXIT_OK


def _cmd_ber(cfg, args) -> int:
    rows = []
    for s in cfg.schemes:
        rows += harness.run_scheme(cfg, s, "power_dbm", with_mc=True)
    rows = harness.sort_rows(rows)
    files = harness.figure_datasets(rows)
    keep = {k: v for k, v in files.items() if k in ("fig10_ber_vs_allocation", "fig11_rate_vs_ber")}
    keep["ber"] = harness.rows_to_csv(rows)
    for p in harness.write_outputs(cfg.output, keep):
        print(p)
    return EXIT_INFEASIBLE if harness.all_infeasible(rows) else EXIT_OK


def _cmd_validate(cfg, args) -> int:
    checks = oracles.run_suite(cfg.mc.seed, quick=not args.full, inject=args.inject, samples=cfg.mc.samples)
    report = oracles.format_report(checks)
    harness.write_outputs(cfg.output, {"validate.txt": report})
    sys.stdout.write(report)
    return EXIT_OK if oracles.suite_passed(checks) else EXIT_ORACLE


def _cmd_mc(cfg, args) -> int:
    alloc = AllocationFactors.equal_split()
    out = []
    for i, d in enumerate(cfg.geometry.d_values()):
        try:
            geos = harness.forwarding_geometries(cfg, d)
        except ValueError:
            continue
        for k, geo in enumerate(geos):
            tc = harness.TrialConfig(cfg.mc.samples, harness._point_seed(cfg.mc.seed, i * 64 + k), cfg.mc.mode)
            r = simulate_two_hop(tc, alloc, geo, cfg.channel_params(cfg.power.p_max), threads=cfg.mc.threads)
            out.append(dict(d=d, slot=k + 2, d_a=geo.d_a, d_b=geo.d_b, ber_a=r.ber_a, ber_b=r.ber_b,
                            mean_snr_a=r.mean_snr_a, mean_snr_b=r.mean_snr_b, ci_halfwidth=r.ci_halfwidth,
                            errors_a=r.errors_a, errors_b=r.errors_b, samples=r.samples))
    if not out:
        return EXIT_INFEASIBLE
    cols = list(out[0])
    for p in harness.write_outputs(cfg.output, {"mc": harness.rows_to_csv(out, cols)}):
        print(p)
    return EXIT_OK


_COMMANDS = {
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "tradeoff": _cmd_tradeoff,
    "ber": _cmd_ber,
    "validate": _cmd_validate,
    "mc": _cmd_mc,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
