"""Command-line entry point.

    rangesim cpdr   --config cfg.json [--out DIR] [--workers N] [--seed U64]
    rangesim aprr   --config cfg.json ...
    rangesim oned   --config cfg.json ...          (models oned_p1/oned_thinned)
    rangesim bounds --config cfg.json [--out DIR]

Exit codes: 0 success, 2 invalid config, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .bounds import standard_reports
from .cpdr import InvalidConfigError
from .distributions import from_spec
from .harness import ExperimentConfig, run_experiment, write_bounds_json, write_outputs

_SUBCOMMAND_MODELS = {
    "cpdr": ("cpdr",),
    "aprr": ("aprr",),
    "oned": ("oned_p1", "oned_thinned"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rangesim",
        description="Monte Carlo experiments for range-driven percolation and contact processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "cpdr": "contact process with dynamically resampled ranges",
        "aprr": "oriented anisotropic percolation with random ranges",
        "oned": "one-dimensional front recursions",
        "bounds": "closed-form bound calculators",
    }
    for name, help_text in descriptions.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="experiment JSON file")
        sp.add_argument("--out", default=None, help="output directory (default: config or cwd)")
        if name != "bounds":
            sp.add_argument("--workers", type=int, default=1, help="parallel runs")
            sp.add_argument("--seed", type=int, default=None, help="override master_seed")
    return parser


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    allowed = _SUBCOMMAND_MODELS[args.command]
    if config.model not in allowed:
        raise InvalidConfigError(
            f"subcommand {args.command!r} runs models {allowed}, config says {config.model!r}"
        )
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    result = run_experiment(config, workers=args.workers)
    out_dir = args.out or config.output or "."
    written = write_outputs(result, out_dir)

    print(f"model={config.model} runs={config.runs} master_seed={config.master_seed}")
    for summary in result.summaries:
        tag = "" if summary.sweep_value is None else f"{config.sweep_param}={summary.sweep_value} "
        print(
            f"  {tag}successes={summary.successes}/{summary.runs} "
            f"fraction={summary.fraction:.4f} "
            f"wilson99=[{summary.wilson_lo:.4f}, {summary.wilson_hi:.4f}]"
        )
    print(f"wall time {result.total_wall_s:.2f}s; wrote " + ", ".join(str(p) for p in written))
    return 0


def _cmd_bounds(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise InvalidConfigError("bounds config must be a JSON object")
    try:
        dist = from_spec(raw["dist"])
        d = int(raw["d"])
        lam = float(raw["lambda"])
    except KeyError as exc:
        raise InvalidConfigError(f"bounds config missing field {exc}") from None
    L_values = tuple(int(L) for L in raw.get("L_values", (1, 2, 5, 10)))
    reports = standard_reports(dist, d, lam, L_values)
    out_dir = args.out or raw.get("output") or "."
    path = write_bounds_json(reports, out_dir)

    name_width = max(len(rep.name) for rep in reports)
    for rep in reports:
        value = f"{rep.value:.9g}" if rep.finite else "inf"
        inputs = json.dumps(rep.inputs, separators=(",", ":"), sort_keys=True)
        print(f"{rep.name:<{name_width}}  {value:>15}  {inputs}")
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "bounds":
            return _cmd_bounds(args)
        return _cmd_experiment(args)
    except (InvalidConfigError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
