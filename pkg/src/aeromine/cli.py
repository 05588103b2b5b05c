"""Command-line entry point.

    aeromine run        --config F [--oracle synthetic|manual] [--seed S] [--budget B]
    aeromine baseline   --config F [--seed S] [--budget B]
    aeromine serve      --bind ADDR --data DIR
    aeromine bruteforce --config F --resolution R
    aeromine export     --journal J --out CSVPATH
    aeromine compare    --a J1 --b J2 [--target T]

Exit codes: 0 success, 2 bad flags, 3 config validation failure, 1 anything
else (one machine-parseable "error: ..." line on stderr).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import engine as eng
from . import journal as jr
from .config import ConfigError, load_config_file
from .oracle import ManualOracle, SyntheticOracle, brute_force_optimum


def _data_dir(explicit: str | None) -> Path:
    return Path(explicit or os.environ.get("AEROMINE_DATA_DIR", "."))


def _load_config(args):
    try:
        cfg = load_config_file(args.config)
    except ConfigError as e:
        for v in e.violations:
            print(f"error: config: {v}", file=sys.stderr)
        sys.exit(3)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        sys.exit(3)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "budget", None) is not None:
        overrides["budget"] = args.budget
    if getattr(args, "oracle", None) is not None:
        overrides["oracle_kind"] = args.oracle
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
        bad = cfg.validate()
        if bad:
            for v in bad:
                print(f"error: config: {v}", file=sys.stderr)
            sys.exit(3)
    return cfg


def _journal_path(cfg, args, suffix: str) -> Path:
    if args.journal:
        return Path(args.journal)
    d = _data_dir(args.data)
    d.mkdir(parents=True, exist_ok=True)
    stem = Path(args.config).stem
    return d / f"{stem}-seed{cfg.seed}{suffix}.journal"


def _print_summary(result: eng.RunResult, cfg):
    print(f"status: {result.state.status}")
    print(f"oracle calls: {result.state.oracle_calls} / {cfg.budget}")
    print(f"rounds: {result.state.round_index}")
    print(f"best fitness: {result.best_fitness:.6f} W")
    best = result.best_configuration
    for i, genome in enumerate(best.genomes):
        parts = ", ".join(f"{p.name}={v}" for p, v in zip(cfg.space.parameters, genome.values))
        print(f"  position {i + 1}: {parts}")
    print(f"  spacing: {best.spacing} rotor diameters")
    if result.journal_path:
        print(f"journal: {result.journal_path}")


def _run_command(args, baseline: bool) -> int:
    cfg = _load_config(args)
    path = _journal_path(cfg, args, "-baseline" if baseline else "")
    if cfg.oracle_kind == "manual":
        print("manual oracle selected: use `aeromine serve` and the operator "
              "console to enter measurements", file=sys.stderr)
        oracle = ManualOracle()
    else:
        oracle = SyntheticOracle(cfg.space, cfg.constants)
    with jr.JournalWriter(path, cfg) as writer:
        runner = eng.baseline_run if baseline else eng.run
        result = runner(cfg, oracle, writer)
    _print_summary(result, cfg)
    return 0


def _bruteforce_command(args) -> int:
    cfg = _load_config(args)
    config, fitness = brute_force_optimum(
        cfg.space, cfg.layout_bounds, cfg.constants, args.resolution,
        n_positions=cfg.positions, wind_speeds=cfg.wind_speeds)
    print(f"optimum fitness: {fitness:.6f} W (resolution {args.resolution})")
    for i, genome in enumerate(config.genomes):
        parts = ", ".join(f"{p.name}={v}" for p, v in zip(cfg.space.parameters, genome.values))
        print(f"  position {i + 1}: {parts}")
    if cfg.positions > 1:
        print(f"  spacing: {config.spacing} rotor diameters")
    return 0


def _export_command(args) -> int:
    rows = jr.export_csv(args.journal, args.out)
    print(f"exported {rows} records to {args.out}")
    return 0


def calls_to_target(records, target: float) -> int | None:
    best = float("-inf")
    for r in records:
        best = max(best, r.fitness)
        if best >= target:
            return r.record_id
    return None


def _compare_command(args) -> int:
    ja = jr.load(args.a)
    jb = jr.load(args.b)
    if args.target is not None:
        target = args.target
    else:
        cfg = ja.config
        _, opt = brute_force_optimum(
            cfg.space, cfg.layout_bounds, cfg.constants, 21,
            n_positions=cfg.positions, wind_speeds=cfg.wind_speeds)
        target = 0.95 * opt
        print(f"target: 0.95 x brute-force optimum (res 21) = {target:.6f} W")
    ca = calls_to_target(ja.records, target)
    cb = calls_to_target(jb.records, target)
    print(f"a: {args.a}: {'not reached' if ca is None else f'{ca} evaluations'}")
    print(f"b: {args.b}: {'not reached' if cb is None else f'{cb} evaluations'}")
    if ca is not None and cb is not None:
        print(f"ratio a/b: {ca / cb:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aeromine")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--journal", help="journal output path (default derived)")
        p.add_argument("--data", help="data directory (default $AEROMINE_DATA_DIR or .)")

    p = sub.add_parser("run", help="surrogate-assisted mining run")
    add_run_flags(p)
    p.add_argument("--oracle", choices=["synthetic", "manual"])

    p = sub.add_parser("baseline", help="no-surrogate comparison run")
    add_run_flags(p)

    p = sub.add_parser("serve", help="start the operator service")
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.add_argument("--data", help="data directory (default $AEROMINE_DATA_DIR or .)")

    p = sub.add_parser("bruteforce", help="exhaustive grid reference optimum")
    p.add_argument("--config", required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)

    p = sub.add_parser("export", help="flatten a journal to CSV")
    p.add_argument("--journal", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="evaluations-to-target report for two journals")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--target", type=float)

    return parser


def dispatch(argv) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run_command(args, baseline=False)
        if args.command == "baseline":
            return _run_command(args, baseline=True)
        if args.command == "serve":
            from .service import serve
            serve(args.bind, _data_dir(args.data))
            return 0
        if args.command == "bruteforce":
            return _bruteforce_command(args)
        if args.command == "export":
            return _export_command(args)
        if args.command == "compare":
            return _compare_command(args)
    except (jr.JournalError, eng.EngineError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 2


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
