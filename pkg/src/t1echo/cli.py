"""Command-line front end: ``t1echo {derive,trajectory,decay,pulse-loss,tomography}``."""
from __future__ import annotations

import argparse
import json
import sys

from .experiments import KINDS, PRESETS, ConfigError, load_config_file, render, resolve_config, run, write_atomic


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="t1echo", description="T1-echo sequence simulator")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--config", help="JSON/YAML config, or an artifact written earlier")
        p.add_argument("--v-perp", type=float)
        p.add_argument("--delta-omega", type=_floats, help="one value or a comma-separated list")
        p.add_argument("--epsilon", type=float)
        p.add_argument("--gamma1-q", type=float)
        p.add_argument("--gamma1-m", type=float)
        p.add_argument("--gammaphi-q", type=float)
        p.add_argument("--gammaphi-m", type=float)
        p.add_argument("--model", choices=["lindblad", "secular"])
        p.add_argument("--pulses", choices=["ideal", "hamiltonian", "none"])
        p.add_argument("--ideal-z", action="store_true", default=None,
                       help="use an exact instantaneous gate for resonant Hamiltonian pulses")
        p.add_argument("--t-max", type=float)
        p.add_argument("--points", type=int)
        p.add_argument("--free-time", type=float)
        p.add_argument("--clamp-factor", type=float)
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=["csv", "json"])
        if kind == "derive":
            p.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def _print_derive(table) -> None:
    width = max(len(c) for c in table.columns)
    for row in table.rows:
        for name, value in zip(table.columns, row):
            print(f"{name:<{width}}  {value}")
        print()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "json")}
    try:
        file_values = load_config_file(args.config) if args.config else {}
        file_values.pop("kind", None)
        if getattr(args, "json", False):
            overrides["format"] = "json"
        cfg = resolve_config(overrides=overrides, file_values=file_values)
        table = run(cfg)
    except ConfigError as exc:
        print(f"t1echo: invalid config key {exc.key!r}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"t1echo: cannot read config: {exc}", file=sys.stderr)
        return 2

    if cfg.kind == "derive" and cfg.format == "csv" and not cfg.output:
        _print_derive(table)
        return 0
    text = render(table, cfg)
    if not cfg.output:
        sys.stdout.write(text)
        return 0
    try:
        write_atomic(cfg.output, text)
    except OSError as exc:
        print(f"t1echo: cannot write {cfg.output}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
