"""Command-line entry points.

    orqc run --config exp.toml        execute an experiment
    orqc validate --config exp.toml   schema-check only
    orqc sanity                       run the oracle/property smoke suite
    orqc table1 --out dir             run the saturation grid (log-neg + SRE)

Exit codes: 0 success, 2 config error, 3 memory budget exceeded,
4 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .circuits import CIRCUIT_KINDS, CircuitSpec
from .config import (
    ExecutionOptions,
    ExperimentConfig,
    ObservableOptions,
    OutputOptions,
    load_config,
)
from .errors import BudgetError, ConfigError, InvariantError
from .oracles import run_all_oracles
from .runner import emit, run_experiment, saturation_value

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

TABLE1_DEFAULT_REALIZATIONS = {4: 500, 6: 200, 8: 100}


def _cmd_run(args) -> int:
    config = load_config(args.config)
    records, manifest = run_experiment(config)
    out_dir = args.out or config.output.dir
    paths = emit(records, manifest, out_dir, config.output.format)
    for name, value in manifest.saturation.items():
        print(f"{name}: saturation {value:.6g} over final {manifest.tail_fraction:.0%} of steps")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    load_config(args.config)
    print(f"{args.config}: OK")
    return EXIT_OK


def _cmd_sanity(_args) -> int:
    reports = run_all_oracles()
    for report in reports:
        print(report.line())
    failures = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failures)}/{len(reports)} oracles passed")
    return EXIT_OK if not failures else EXIT_INVARIANT


def _cmd_table1(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    for n in sizes:
        if n < 4 or n % 2:
            raise ConfigError(f"invalid system size {n}")
    out = Path(args.out)
    rows = []
    for n in sizes:
        realizations = args.realizations or TABLE1_DEFAULT_REALIZATIONS.get(n, 100)
        for observable in ("logneg", "sre"):
            for kind in CIRCUIT_KINDS:
                spec = CircuitSpec(kind, n)
                config = ExperimentConfig(
                    circuit=spec,
                    observable=observable,
                    steps=args.steps,
                    realizations=realizations,
                    master_seed=args.seed,
                    options=ObservableOptions(),
                    output=OutputOptions(dir=str(out)),
                    execution=ExecutionOptions(parallel=args.parallel),
                )
                records, manifest = run_experiment(config)
                emit(records, manifest, out / f"n{n}_{kind}_{observable}")
                name = "logneg" if observable == "logneg" else "sre"
                sat = saturation_value(records[name])
                rows.append((n, kind, observable, realizations, sat))
                print(f"n={n} {kind:6s} {observable:7s} saturation {sat:.4f}")
    summary = out / "table1_summary.csv"
    lines = ["n_system,circuit,observable,realizations,saturation"]
    lines += [f"{n},{kind},{obs},{real},{repr(sat)}" for n, kind, obs, real, sat in rows]
    summary.parent.mkdir(parents=True, exist_ok=True)
    summary.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {summary}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orqc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="override the output directory")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config file without running")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=_cmd_validate)

    p_san = sub.add_parser("sanity", help="run the oracle smoke suite")
    p_san.set_defaults(func=_cmd_sanity)

    p_tab = sub.add_parser("table1", help="run the log-neg/SRE saturation grid")
    p_tab.add_argument("--out", required=True)
    p_tab.add_argument("--sizes", default="4,6,8", help="comma-separated system sizes")
    p_tab.add_argument("--steps", type=int, default=30)
    p_tab.add_argument("--realizations", type=int, default=None,
                       help="override the per-size defaults (500/200/100)")
    p_tab.add_argument("--seed", type=int, default=2024)
    p_tab.add_argument("--parallel", type=int, default=1)
    p_tab.set_defaults(func=_cmd_table1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
