"""Experiment orchestration: config parsing, seed derivation, parallel runs,
interval statistics, and CSV/JSON emission.

One JSON file describes one experiment:

    {
      "model": "cpdr" | "aprr" | "oned_p1" | "oned_thinned",
      "params": { ... model parameters, including "dist": {"kind": ...} ... },
      "runs": 1000,
      "master_seed": 42,
      "sweep": {"param": "dist.beta", "values": [0.5, 2.0]},   # optional
      "output": "out_dir"                                       # optional
    }

Sweeps address a parameter by dotted path inside params ("lambda", "q",
"dist.beta") or replace an object wholesale ("dist").  Run seeds depend only
on the run index, so sweep values are coupled through shared randomness.

Emitted files are a pure function of the config: records merge in run-index
order whatever the worker count, and the per-run wall-clock column is
pinned to 0 in runs.csv (real timings stay on the in-memory records and in
the printed summary) so that byte-identical reproducibility holds.
"""

from __future__ import annotations

import copy
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import aprr as aprr_mod
from . import cpdr as cpdr_mod
from . import oned as oned_mod
from .cpdr import InvalidConfigError
from .distributions import from_spec
from .rng import Rng, derive_run_seed
from .stats import wilson_interval

MODELS = ("cpdr", "aprr", "oned_p1", "oned_thinned")

RUNS_HEADER = [
    "model",
    "sweep_param",
    "sweep_value",
    "run_index",
    "seed",
    "verdict",
    "value1",
    "value2",
    "wall_ms",
]
SUMMARY_HEADER = ["sweep_value", "runs", "successes", "fraction", "wilson_lo", "wilson_hi"]

DEFAULT_Z = 2.576  # 99% intervals everywhere


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    params: dict
    runs: int
    master_seed: int
    sweep_param: str | None = None
    sweep_values: tuple = ()
    output: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.runs < 1:
            raise InvalidConfigError(f"runs must be >= 1, got {self.runs}")
        if self.sweep_param is not None and len(self.sweep_values) == 0:
            raise InvalidConfigError("sweep present but its value list is empty")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise InvalidConfigError("experiment config must be a JSON object")
        try:
            model = str(raw["model"])
            params = dict(raw["params"])
            runs = int(raw["runs"])
            master_seed = int(raw["master_seed"])
        except KeyError as exc:
            raise InvalidConfigError(f"experiment config missing field {exc}") from None
        sweep = raw.get("sweep")
        sweep_param, sweep_values = None, ()
        if sweep is not None:
            try:
                sweep_param = str(sweep["param"])
                sweep_values = tuple(sweep["values"])
            except KeyError as exc:
                raise InvalidConfigError(f"sweep missing field {exc}") from None
        return cls(
            model=model,
            params=params,
            runs=runs,
            master_seed=master_seed,
            sweep_param=sweep_param,
            sweep_values=sweep_values,
            output=raw.get("output"),
        )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(raw)


@dataclass(frozen=True)
class RunRecord:
    run_index: int
    seed: int
    verdict: str
    value1: float
    value2: float
    success: bool
    wall_ms: float  # measured; not part of the deterministic file output


@dataclass(frozen=True)
class SweepSummary:
    sweep_value: object
    runs: int
    successes: int
    fraction: float
    wilson_lo: float
    wilson_hi: float


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ExperimentConfig
    records: tuple  # tuple of tuples of RunRecord, one inner tuple per sweep value
    summaries: tuple
    w_samples: np.ndarray | None
    total_wall_s: float


def _set_by_path(params: dict, path: str, value) -> dict:
    updated = copy.deepcopy(params)
    keys = path.split(".")
    node = updated
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            raise InvalidConfigError(f"sweep path {path!r} does not address params")
        node = node[key]
    if keys[-1] not in node:
        raise InvalidConfigError(f"sweep path {path!r} does not address params")
    node[keys[-1]] = value
    return updated


def _run_single(model: str, params: dict, seed: int):
    """Execute one run; returns (verdict, value1, value2, success, extras)."""
    if model == "cpdr":
        out = cpdr_mod.run_cpdr(cpdr_mod.CpdrConfig.from_params(params), seed)
        return out.verdict, out.final_time, float(out.max_infected), out.survived, None
    if model == "aprr":
        out = aprr_mod.explore_cluster(aprr_mod.AprrConfig.from_params(params), seed)
        return out.verdict, float(out.size), float(out.max_coord1), out.percolates, None
    if model == "oned_p1":
        try:
            dist = from_spec(params["dist"])
        except KeyError as exc:
            raise InvalidConfigError(f"oned_p1 params missing field {exc}") from None
        out = oned_mod.run_front(
            dist,
            Rng(seed),
            step_cap=int(params.get("step_cap", 10**12)),
            rightmost_target=params.get("rightmost_target"),
            collect_w=bool(params.get("collect_w", False)),
            w_min_m=int(params.get("w_min_m", 10_000)),
        )
        return (
            out.verdict,
            float(out.steps),
            float(out.rightmost),
            not out.died,
            out.w_samples,
        )
    if model == "oned_thinned":
        try:
            dist = from_spec(params["dist"])
            p = float(params["p"])
        except KeyError as exc:
            raise InvalidConfigError(f"oned_thinned params missing field {exc}") from None
        out = oned_mod.run_front_thinned(
            p,
            dist,
            Rng(seed),
            step_cap=int(params.get("step_cap", 10**12)),
            rightmost_target=params.get("rightmost_target"),
        )
        return out.verdict, float(out.steps), float(out.rightmost), not out.died, None
    raise InvalidConfigError(f"unknown model {model!r}")


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Execute every (sweep value, run index) pair and aggregate.

    Results merge in run-index order, so the outcome is a pure function of
    the config regardless of worker count.
    """
    if workers < 1:
        raise InvalidConfigError(f"workers must be >= 1, got {workers}")
    t_start = time.perf_counter()
    if config.sweep_param is None:
        tasks = [(None, config.params)]
    else:
        tasks = [
            (value, _set_by_path(config.params, config.sweep_param, value))
            for value in config.sweep_values
        ]
    # validate eagerly so config errors surface before any worker starts
    for _, params in tasks:
        _validate_params(config.model, params)

    def one(args):
        sweep_idx, run_idx = args
        seed = derive_run_seed(config.master_seed, run_idx)
        t0 = time.perf_counter()
        verdict, v1, v2, success, extras = _run_single(config.model, tasks[sweep_idx][1], seed)
        wall = (time.perf_counter() - t0) * 1e3
        record = RunRecord(
            run_index=run_idx,
            seed=seed,
            verdict=verdict,
            value1=v1,
            value2=v2,
            success=success,
            wall_ms=wall,
        )
        return sweep_idx, run_idx, record, extras

    jobs = [(si, ri) for si in range(len(tasks)) for ri in range(config.runs)]
    results: list = [[None] * config.runs for _ in tasks]
    extras_grid: list = [[None] * config.runs for _ in tasks]
    if workers == 1:
        for job in jobs:
            si, ri, rec, extras = one(job)
            results[si][ri] = rec
            extras_grid[si][ri] = extras
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for si, ri, rec, extras in pool.map(one, jobs):
                results[si][ri] = rec
                extras_grid[si][ri] = extras

    summaries = []
    for si, (value, _) in enumerate(tasks):
        successes = sum(rec.success for rec in results[si])
        lo, hi = wilson_interval(successes, config.runs, DEFAULT_Z)
        summaries.append(
            SweepSummary(
                sweep_value=value,
                runs=config.runs,
                successes=successes,
                fraction=successes / config.runs,
                wilson_lo=lo,
                wilson_hi=hi,
            )
        )

    w_blocks = [
        block
        for row in extras_grid
        for block in row
        if isinstance(block, np.ndarray) and len(block)
    ]
    w_samples = np.vstack(w_blocks) if w_blocks else None

    return ExperimentResult(
        config=config,
        records=tuple(tuple(row) for row in results),
        summaries=tuple(summaries),
        w_samples=w_samples,
        total_wall_s=time.perf_counter() - t_start,
    )


def _validate_params(model: str, params: dict) -> None:
    if model == "cpdr":
        cpdr_mod.CpdrConfig.from_params(params)
    elif model == "aprr":
        aprr_mod.AprrConfig.from_params(params)
    elif model in ("oned_p1", "oned_thinned"):
        if "dist" not in params:
            raise InvalidConfigError(f"{model} params need a 'dist'")
        from_spec(params["dist"])
        if model == "oned_thinned":
            p = float(params.get("p", -1.0))
            if not 0.0 < p <= 1.0:
                raise InvalidConfigError(f"oned_thinned needs p in (0,1], got {p}")
        if int(params.get("step_cap", 10**12)) < 1:
            raise InvalidConfigError("step_cap must be >= 1")


# --------------------------------------------------------------------------
# emission


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"), sort_keys=True)
    if value is None:
        return ""
    return str(value)


def _csv_quote(field: str) -> str:
    if any(ch in field for ch in (",", '"', "\n")):
        return '"' + field.replace('"', '""') + '"'
    return field


def _write_csv(path: Path, header: list, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_quote(_fmt(cell)) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_outputs(result: ExperimentResult, out_dir) -> list:
    """Write runs.csv, summary.csv and optional sample files; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = result.config
    written = []

    rows = []
    for si, records in enumerate(result.records):
        value = config.sweep_values[si] if config.sweep_param is not None else None
        for rec in records:
            rows.append(
                [
                    config.model,
                    config.sweep_param,
                    value,
                    rec.run_index,
                    rec.seed,
                    rec.verdict,
                    rec.value1,
                    rec.value2,
                    0,  # wall_ms pinned for byte-identical outputs
                ]
            )
    runs_path = out / "runs.csv"
    _write_csv(runs_path, RUNS_HEADER, rows)
    written.append(runs_path)

    summary_rows = [
        [s.sweep_value, s.runs, s.successes, s.fraction, s.wilson_lo, s.wilson_hi]
        for s in result.summaries
    ]
    summary_path = out / "summary.csv"
    _write_csv(summary_path, SUMMARY_HEADER, summary_rows)
    written.append(summary_path)

    if result.w_samples is not None:
        w_path = out / "w_samples.csv"
        _write_csv(
            w_path,
            ["step", "m", "w"],
            [[int(r[0]), int(r[1]), float(r[2])] for r in result.w_samples],
        )
        written.append(w_path)

    table = _cutting_table_request(config)
    if table is not None:
        beta, i_max = table
        cut_path = out / "cutting_probs.csv"
        _write_csv(
            cut_path,
            ["i", "probability"],
            [[i, oned_mod.cutting_point_prob(beta, i)] for i in range(1, i_max + 1)],
        )
        written.append(cut_path)

    return written


def _cutting_table_request(config: ExperimentConfig):
    req = config.params.get("emit_cutting_table")
    if req is None:
        return None
    try:
        return float(req["beta"]), int(req["i_max"])
    except (KeyError, TypeError) as exc:
        raise InvalidConfigError(f"emit_cutting_table needs beta and i_max: {exc}") from None


def write_bounds_json(reports, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "bounds.json"
    payload = [rep.to_json() for rep in reports]
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_csv(path) -> tuple[list, list]:
    """Parse an emitted CSV back into (header, rows of strings)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    rows = [_split_csv_line(line) for line in lines]
    return rows[0], rows[1:]


def _split_csv_line(line: str) -> list:
    fields = []
    cur = []
    in_quotes = False
    i = 0
    while i < len(line):
        ch = line[i]
        if in_quotes:
            if ch == '"':
                if i + 1 < len(line) and line[i + 1] == '"':
                    cur.append('"')
                    i += 1
                else:
                    in_quotes = False
            else:
                cur.append(ch)
        elif ch == '"':
            in_quotes = True
        elif ch == ",":
            fields.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
        i += 1
    fields.append("".join(cur))
    return fields
