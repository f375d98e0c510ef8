"""Experiment configuration: dataclasses plus strict TOML loading.

The config file maps one-to-one onto :class:`ExperimentConfig`; unknown keys
anywhere are errors so that typos cannot silently change an experiment.
"""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .circuits import CircuitSpec
from .errors import ConfigError

OBSERVABLES = ("logneg", "mutual_info", "sre", "krylov", "kdesign", "bipartition_probe")
PARALLEL_ENV_VAR = "ORQC_PARALLEL"


@dataclass(frozen=True)
class ObservableOptions:
    """Per-observable knobs; only the relevant ones are consulted."""

    part_a: Optional[tuple[int, ...]] = None          # logneg / mutual_info cut
    subsystem_a: tuple[int, ...] = (0, 1)             # kdesign subsystem A
    k_max: int = 3                                    # kdesign moment orders
    include_standard_convention: bool = False         # extra log2(2N+1) series
    sre_on_joint: bool = False                        # SRE on system+aux register
    log_base: float = 2.0
    magic_weights: str = "basis"                      # zero-magic recipe variant
    krylov_tol: float = 1e-10
    krylov_stall_window: int = 64
    krylov_fixed_steps: bool = True
    pooled_moment: bool = False                       # kdesign: distance of mean moment

    def __post_init__(self):
        if self.k_max < 1:
            raise ConfigError("k_max must be at least 1")
        if self.log_base <= 1.0:
            raise ConfigError("log_base must exceed 1")


@dataclass(frozen=True)
class ExecutionOptions:
    parallel: int = 1
    memory_budget_mb: int = 4096
    tail_fraction: float = 0.25

    def __post_init__(self):
        if self.parallel < 1:
            raise ConfigError("parallel width must be at least 1")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise ConfigError("tail_fraction must lie in (0, 1]")
        if self.memory_budget_mb < 1:
            raise ConfigError("memory budget must be positive")

    def effective_parallel(self) -> int:
        override = os.environ.get(PARALLEL_ENV_VAR)
        if override is not None:
            try:
                width = int(override)
            except ValueError as exc:
                raise ConfigError(f"{PARALLEL_ENV_VAR} must be an integer") from exc
            if width < 1:
                raise ConfigError(f"{PARALLEL_ENV_VAR} must be at least 1")
            return width
        return self.parallel


@dataclass(frozen=True)
class OutputOptions:
    dir: str = "out"
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    circuit: CircuitSpec
    observable: str
    steps: int
    realizations: int
    master_seed: int
    options: ObservableOptions = field(default_factory=ObservableOptions)
    output: OutputOptions = field(default_factory=OutputOptions)
    execution: ExecutionOptions = field(default_factory=ExecutionOptions)

    def __post_init__(self):
        if self.observable not in OBSERVABLES:
            raise ConfigError(f"unknown observable {self.observable!r}")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        if self.realizations < 1:
            raise ConfigError("realizations must be at least 1")
        if self.observable == "bipartition_probe":
            if self.circuit.kind == "ruc":
                raise ConfigError("bipartition_probe needs an auxiliary; ruc has none")
            if self.circuit.kind == "mlorc" and self.circuit.effective_exposure < 1:
                raise ConfigError("bipartition_probe needs exposure >= 1 for mlorc")
        if self.options.part_a is not None:
            self._check_subset(self.options.part_a, "part_a", proper=True)
        if self.observable == "kdesign":
            self._check_subset(self.options.subsystem_a, "subsystem_a", proper=True)

    def _check_subset(self, subset, name, proper=False):
        n = self.circuit.n_system
        if len(set(subset)) != len(subset) or any(not 0 <= q < n for q in subset):
            raise ConfigError(f"{name} must be distinct qubit indices in [0, {n})")
        if proper and not 0 < len(subset) < n:
            raise ConfigError(f"{name} must be a proper non-empty subset")

    def default_part_a(self) -> tuple[int, ...]:
        """Cut used when none is configured: the largest pair-aligned prefix
        no bigger than half the system (2:2, 2:4, 4:4 for n = 4, 6, 8)."""
        if self.options.part_a is not None:
            return tuple(self.options.part_a)
        return tuple(range(2 * (self.circuit.n_system // 4)))


def _take_section(data: dict, key: str) -> dict:
    section = data.pop(key, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[{key}] must be a table")
    return section


def _build(cls, section: dict, context: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(section) - names
    if unknown:
        raise ConfigError(f"unknown keys in [{context}]: {sorted(unknown)}")
    coerced = {
        k: tuple(v) if isinstance(v, list) else v for k, v in section.items()
    }
    try:
        return cls(**coerced)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid [{context}]: {exc}") from exc


def config_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    data = dict(data)
    circuit = _build(CircuitSpec, _take_section(data, "circuit"), "circuit")
    options = _build(ObservableOptions, _take_section(data, "observable_options"), "observable_options")
    output = _build(OutputOptions, _take_section(data, "output"), "output")
    execution = _build(ExecutionOptions, _take_section(data, "execution"), "execution")

    required = {"observable", "steps", "realizations", "master_seed"}
    missing = required - set(data)
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    unknown = set(data) - required
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    try:
        return ExperimentConfig(
            circuit=circuit,
            observable=data["observable"],
            steps=int(data["steps"]),
            realizations=int(data["realizations"]),
            master_seed=int(data["master_seed"]),
            options=options,
            output=output,
            execution=execution,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    """JSON-ready echo of the configuration (used in run manifests)."""
    raw = dataclasses.asdict(config)
    return {
        "observable": raw["observable"],
        "steps": raw["steps"],
        "realizations": raw["realizations"],
        "master_seed": raw["master_seed"],
        "circuit": raw["circuit"],
        "observable_options": {
            k: (list(v) if isinstance(v, tuple) else v)
            for k, v in raw["options"].items()
        },
        "output": raw["output"],
        "execution": raw["execution"],
    }
