"""Config-driven experiment orchestration.

A run maps realization indices to independent workers, each of which derives
its own random streams, evolves one trajectory and evaluates the configured
observable per step.  Per-step means and fluctuations are folded in
realization order, so the output is a pure function of the configuration
regardless of parallel width.
"""

from __future__ import annotations

import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .circuits import CircuitRun, FullState, reduced_system_state
from .config import ExperimentConfig, config_to_dict
from .entanglement import MomentAccumulator, log_negativity, mutual_information, negativity
from .errors import BudgetError
from .kdesign import build_projected_ensemble, design_distance, haar_moment, kth_moment
from .krylov import krylov_run
from .linalg import partial_trace, trace_norm
from .magic import sre2
from .sampling import STREAM_LABELS, RealizationStreams
from .runner_probe import PROBE_SERIES, probe_cuts  # re-exported helpers

SeriesDict = dict[str, tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class TimeSeriesRecord:
    t: int
    mean: float
    variance: float
    n_realizations: int


@dataclass
class RunManifest:
    config: dict
    master_seed: int
    realizations: int
    derived_seeds: list
    artifact_version: str
    wall_clock_seconds: float
    tail_fraction: float
    saturation: dict[str, float] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return dataclasses.asdict(self)


def _initial_recipe(observable: str) -> str:
    return "magic_free" if observable == "sre" else "pair_product"


def _build_evaluator(config: ExperimentConfig) -> Callable[[FullState], dict[str, float]]:
    opts = config.options
    base = opts.log_base
    part_a = config.default_part_a()

    if config.observable == "logneg":

        def evaluate(state: FullState) -> dict[str, float]:
            rho = reduced_system_state(state)
            nval = negativity(rho, part_a)
            out = {"logneg": float(np.log(nval + 1.0) / np.log(base))}
            if opts.include_standard_convention:
                out["logneg_standard"] = float(np.log(2 * nval + 1.0) / np.log(base))
            return out

    elif config.observable == "mutual_info":

        def evaluate(state: FullState) -> dict[str, float]:
            rho = reduced_system_state(state)
            return {"mutual_info": mutual_information(rho, part_a, log_base=base)}

    elif config.observable == "sre":

        def evaluate(state: FullState) -> dict[str, float]:
            rho = state.rho if opts.sre_on_joint else reduced_system_state(state)
            return {"sre": sre2(rho, log_base=base).magic}

    elif config.observable == "kdesign":
        ks = tuple(range(1, opts.k_max + 1))

        def evaluate(state: FullState) -> dict[str, float]:
            rho = reduced_system_state(state)
            ens = build_projected_ensemble(rho, opts.subsystem_a)
            return {f"delta_k{k}": design_distance(ens, k) for k in ks}

    else:
        raise ValueError(f"no step evaluator for {config.observable!r}")
    return evaluate


def _realize_moments(config: ExperimentConfig, r: int) -> SeriesDict:
    """kdesign variant: per-step ensemble moments, pooled across realizations."""
    opts = config.options
    streams = RealizationStreams.derive(config.master_seed, r)
    run = CircuitRun(config.circuit, streams)
    state = run.initial_state("pair_product")
    ks = tuple(range(1, opts.k_max + 1))
    moments = {k: [] for k in ks}

    def record(state):
        ens = build_projected_ensemble(reduced_system_state(state), opts.subsystem_a)
        for k in ks:
            moments[k].append(kth_moment(ens, k))

    record(state)
    for t in range(1, config.steps + 1):
        state = run.step(state, t)
        record(state)
    ts = np.arange(config.steps + 1)
    return {f"_moment_k{k}": (ts, np.stack(moments[k])) for k in ks}


def _realize_probe(config: ExperimentConfig, r: int) -> SeriesDict:
    """Appendix-style probe: log-neg across all cuts of (qubit 0, qubit 1, a).

    For mforc, "a" is the persistent auxiliary attached to the first pair and
    the probe runs after every step, including t = 0.  For mlorc, "a" is the
    fresh auxiliary of the current step, captured after the gate on (0, 1)
    and before the discard, which exists at odd steps only.
    """
    spec = config.circuit
    base = config.options.log_base
    streams = RealizationStreams.derive(config.master_seed, r)
    run = CircuitRun(spec, streams)
    state = run.initial_state("pair_product")
    ts: list[int] = []
    rows: list[tuple[float, ...]] = []

    if spec.kind == "mforc":
        keep = (0, 1, state.aux_index(0))
        ts.append(0)
        rows.append(probe_cuts(partial_trace(state.rho, keep), base))
        for t in range(1, config.steps + 1):
            state = run.step(state, t)
            ts.append(t)
            rows.append(probe_cuts(partial_trace(state.rho, keep), base))
    else:
        n_sys = spec.n_system
        for t in range(1, config.steps + 1):
            captured: list[np.ndarray] = []

            def grab(slot_index: int, rho_with_aux: np.ndarray) -> None:
                if t % 2 == 1 and slot_index == 0:
                    captured.append(partial_trace(rho_with_aux, (0, 1, n_sys)))

            state = run.step(state, t, probe=grab)
            if captured:
                ts.append(t)
                rows.append(probe_cuts(captured[0], base))

    ts_arr = np.asarray(ts)
    values = np.asarray(rows)
    return {name: (ts_arr, values[:, i]) for i, name in enumerate(PROBE_SERIES)}


def realize(config: ExperimentConfig, r: int) -> tuple[SeriesDict, dict]:
    """Evaluate one realization; pure function of (config, realization index)."""
    if config.observable == "krylov":
        opts = config.options
        streams = RealizationStreams.derive(config.master_seed, r)
        result = krylov_run(
            config.circuit,
            streams,
            max_steps=config.steps,
            tol=opts.krylov_tol,
            stall_window=opts.krylov_stall_window,
            fixed_steps=opts.krylov_fixed_steps,
        )
        ts = np.arange(result.steps + 1)
        return {"c_k": (ts, result.complexity)}, {"krylov_dimension": result.dimension}
    if config.observable == "bipartition_probe":
        return _realize_probe(config, r), {}
    if config.observable == "kdesign" and config.options.pooled_moment:
        return _realize_moments(config, r), {}

    streams = RealizationStreams.derive(config.master_seed, r)
    run = CircuitRun(config.circuit, streams)
    state = run.initial_state(
        _initial_recipe(config.observable), magic_weights=config.options.magic_weights
    )
    evaluate = _build_evaluator(config)
    series: dict[str, list[float]] = {}
    for name, value in evaluate(state).items():
        series[name] = [value]
    for t in range(1, config.steps + 1):
        state = run.step(state, t)
        for name, value in evaluate(state).items():
            series[name].append(value)
    ts = np.arange(config.steps + 1)
    return {name: (ts, np.asarray(vals)) for name, vals in series.items()}, {}


def _worker(payload: tuple[ExperimentConfig, int]):
    return realize(*payload)


def estimate_realization_bytes(config: ExperimentConfig) -> int:
    """Rough peak memory of one realization worker."""
    spec = config.circuit
    n_reg = spec.n_system + spec.n_aux
    if spec.kind == "mlorc" and spec.effective_exposure > 0:
        n_reg = spec.n_system + 1
    state_bytes = 16 * 4**n_reg
    total = 6 * state_bytes
    if config.observable == "krylov":
        m = 4**spec.n_system
        rows = min(m - 1, config.steps + 1)
        total += 16 * m * rows + 3 * 16 * m
    return total


def run_experiment(
    config: ExperimentConfig,
) -> tuple[dict[str, list[TimeSeriesRecord]], RunManifest]:
    """Run all realizations and aggregate per-step mean and fluctuation."""
    started = time.perf_counter()
    per_real = estimate_realization_bytes(config)
    budget = config.execution.memory_budget_mb * 2**20
    if per_real > budget:
        raise BudgetError(
            f"one realization needs ~{per_real / 2**20:.0f} MiB, over the "
            f"{config.execution.memory_budget_mb} MiB budget"
        )
    width = min(
        config.execution.effective_parallel(),
        max(1, budget // per_real),
        config.realizations,
    )

    payloads = [(config, r) for r in range(config.realizations)]
    if width > 1:
        with ProcessPoolExecutor(max_workers=width) as pool:
            outputs = list(pool.map(_worker, payloads))
    else:
        outputs = [_worker(p) for p in payloads]

    records = _aggregate(config, outputs)
    manifest = _build_manifest(config, outputs, records, started)
    return records, manifest


def _aggregate(config, outputs) -> dict[str, list[TimeSeriesRecord]]:
    records: dict[str, list[TimeSeriesRecord]] = {}
    first_series = outputs[0][0]
    for name in first_series:
        ts = first_series[name][0]
        if name.startswith("_moment_k"):
            k = int(name.removeprefix("_moment_k"))
            pooled = np.mean([series[name][1] for series, _ in outputs], axis=0)
            d = int(round(pooled.shape[-1] ** (1.0 / k)))
            target = haar_moment(d, k)
            out_name = f"delta_k{k}"
            records[out_name] = [
                TimeSeriesRecord(
                    t=int(t),
                    mean=0.5 * trace_norm(pooled[i] - target),
                    variance=0.0,
                    n_realizations=len(outputs),
                )
                for i, t in enumerate(ts)
            ]
            continue
        accs = [MomentAccumulator() for _ in ts]
        for series, _ in outputs:
            values = series[name][1]
            for acc, v in zip(accs, values):
                acc.add(float(v))
        records[name] = [
            TimeSeriesRecord(
                t=int(t), mean=a.mean, variance=a.variance, n_realizations=a.count
            )
            for t, a in zip(ts, accs)
        ]
    return records


def _build_manifest(config, outputs, records, started) -> RunManifest:
    label_indices = {label: i for i, label in enumerate(STREAM_LABELS)}
    derived = [
        {
            "realization": r,
            "spawn_keys": {label: [r, i] for label, i in label_indices.items()},
        }
        for r in range(config.realizations)
    ]
    manifest = RunManifest(
        config=config_to_dict(config),
        master_seed=config.master_seed,
        realizations=config.realizations,
        derived_seeds=derived,
        artifact_version=__version__,
        wall_clock_seconds=time.perf_counter() - started,
        tail_fraction=config.execution.tail_fraction,
    )
    for name, recs in records.items():
        manifest.saturation[name] = saturation_value(
            recs, config.execution.tail_fraction
        )
    scalars = [extras for _, extras in outputs if extras]
    if scalars:
        keys = scalars[0].keys()
        manifest.extras = {key: [s[key] for s in scalars] for key in keys}
    return manifest


def saturation_value(
    series: list[TimeSeriesRecord], tail_fraction: float = 0.25
) -> float:
    """Mean of the per-step means over the final fraction of the series."""
    if not series:
        raise ValueError("empty series")
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must lie in (0, 1]")
    k = max(1, int(round(tail_fraction * len(series))))
    return float(np.mean([rec.mean for rec in series[-k:]]))


def _format_float(x: float) -> str:
    return repr(float(x))


def emit(
    records: dict[str, list[TimeSeriesRecord]],
    manifest: RunManifest,
    out_dir: str | Path,
    fmt: Optional[str] = None,
) -> list[Path]:
    """Write the aggregated series and manifest; returns the created paths.

    CSV files carry exactly the columns t,mean,variance,n_realizations with
    LF line endings and shortest round-trip float formatting.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = fmt or manifest.config["output"]["format"]
    written: list[Path] = []
    if fmt == "csv":
        for name, recs in records.items():
            path = out / f"{name}.csv"
            lines = ["t,mean,variance,n_realizations"]
            lines += [
                f"{rec.t},{_format_float(rec.mean)},{_format_float(rec.variance)},{rec.n_realizations}"
                for rec in recs
            ]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
            written.append(path)
        manifest_path = out / "manifest.json"
        manifest_path.write_text(
            json.dumps(manifest.to_json_dict(), indent=2) + "\n", encoding="utf-8"
        )
        written.append(manifest_path)
    elif fmt == "json":
        payload = {
            "records": {
                name: [dataclasses.asdict(rec) for rec in recs]
                for name, recs in records.items()
            },
            "manifest": manifest.to_json_dict(),
        }
        path = out / "results.json"
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    return written


def read_records_csv(path: str | Path) -> list[TimeSeriesRecord]:
    """Parse a file produced by :func:`emit` back into records."""
    lines = Path(path).read_text(encoding="utf-8").strip().split("\n")
    if lines[0] != "t,mean,variance,n_realizations":
        raise ValueError(f"unexpected header in {path}: {lines[0]!r}")
    out = []
    for line in lines[1:]:
        t, mean, var, n = line.split(",")
        out.append(TimeSeriesRecord(int(t), float(mean), float(var), int(n)))
    return out
