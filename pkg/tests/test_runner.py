import json
from pathlib import Path

import numpy as np
import pytest

from orqc.circuits import CircuitSpec
from orqc.config import ExecutionOptions, ExperimentConfig, ObservableOptions, OutputOptions
from orqc.errors import BudgetError
from orqc.runner import (
    TimeSeriesRecord,
    emit,
    read_records_csv,
    realize,
    run_experiment,
    saturation_value,
)

DATA_DIR = Path(__file__).parent / "data"


def small_config(**overrides):
    base = dict(
        circuit=CircuitSpec("ruc", 4),
        observable="logneg",
        steps=6,
        realizations=4,
        master_seed=11,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_runner_is_deterministic():
    config = small_config()
    records_a, manifest_a = run_experiment(config)
    records_b, manifest_b = run_experiment(config)
    assert records_a == records_b
    assert manifest_a.saturation == manifest_b.saturation


def test_parallel_width_does_not_change_results():
    serial = run_experiment(small_config())[0]
    wide = run_experiment(
        small_config(execution=ExecutionOptions(parallel=3))
    )[0]
    assert serial == wide


def test_exposure_zero_mlorc_reproduces_ruc_series():
    ruc = run_experiment(small_config())[0]
    mlorc = run_experiment(
        small_config(circuit=CircuitSpec("mlorc", 4, exposure=0))
    )[0]
    assert ruc["logneg"] == mlorc["logneg"]


def test_standard_convention_column_is_optional():
    records, _ = run_experiment(
        small_config(options=ObservableOptions(include_standard_convention=True))
    )
    assert set(records) == {"logneg", "logneg_standard"}
    for a, b in zip(records["logneg"], records["logneg_standard"]):
        assert b.mean >= a.mean - 1e-12


def test_sre_runs_start_magic_free():
    records, _ = run_experiment(
        small_config(observable="sre", circuit=CircuitSpec("mforc", 2), realizations=6)
    )
    first = records["sre"][0]
    assert abs(first.mean) <= 1e-8
    assert first.variance <= 1e-16


def test_mutual_info_observable_runs():
    records, _ = run_experiment(small_config(observable="mutual_info", steps=4))
    assert [r.t for r in records["mutual_info"]] == [0, 1, 2, 3, 4]


def test_krylov_observable_reports_dimensions():
    records, manifest = run_experiment(
        small_config(
            observable="krylov",
            circuit=CircuitSpec("ruc", 2),
            steps=40,
            realizations=3,
        )
    )
    assert manifest.extras["krylov_dimension"] == [15, 15, 15]
    assert records["c_k"][0].mean == 0.0


def test_kdesign_observable_and_pooled_variant():
    config = small_config(
        observable="kdesign",
        steps=4,
        realizations=3,
        options=ObservableOptions(subsystem_a=(0, 1), k_max=2),
    )
    records, _ = run_experiment(config)
    assert set(records) == {"delta_k1", "delta_k2"}
    pooled_cfg = small_config(
        observable="kdesign",
        steps=4,
        realizations=3,
        options=ObservableOptions(subsystem_a=(0, 1), k_max=2, pooled_moment=True),
    )
    pooled, _ = run_experiment(pooled_cfg)
    assert set(pooled) == {"delta_k1", "delta_k2"}
    # pooled moments are closer to (or as close to) Haar than the mean distance
    for name in pooled:
        assert pooled[name][-1].mean <= records[name][-1].mean + 1e-9


def test_probe_series_layout():
    mforc, _ = run_experiment(
        small_config(observable="bipartition_probe", circuit=CircuitSpec("mforc", 4), steps=5)
    )
    assert [r.t for r in mforc["cut_1_2a"]] == [0, 1, 2, 3, 4, 5]
    mlorc, _ = run_experiment(
        small_config(observable="bipartition_probe", circuit=CircuitSpec("mlorc", 4), steps=5)
    )
    assert [r.t for r in mlorc["cut_1_2a"]] == [1, 3, 5]
    assert set(mlorc) == {
        "cut_1_2a",
        "cut_2_1a",
        "cut_a_12",
        "pair_1_2",
        "pair_1_a",
        "pair_2_a",
    }


def test_probe_product_initial_state_starts_unentangled():
    records, _ = run_experiment(
        small_config(observable="bipartition_probe", circuit=CircuitSpec("mforc", 4), steps=2)
    )
    for name, recs in records.items():
        assert recs[0].t == 0
        # auxiliaries start uncorrelated with the system
        if name in ("pair_1_a", "pair_2_a", "cut_a_12"):
            assert recs[0].mean <= 1e-10


def test_memory_budget_enforced():
    with pytest.raises(BudgetError):
        run_experiment(
            small_config(
                observable="krylov",
                circuit=CircuitSpec("ruc", 6),
                steps=5000,
                realizations=1,
                execution=ExecutionOptions(memory_budget_mb=10),
            )
        )


def test_saturation_value_windows():
    recs = [TimeSeriesRecord(t, 2.0, 0.0, 3) for t in range(10)]
    assert saturation_value(recs) == 2.0
    ramp = [TimeSeriesRecord(t, float(t), 0.0, 3) for t in range(8)]
    assert saturation_value(ramp, 0.25) == pytest.approx(6.5)
    with pytest.raises(ValueError):
        saturation_value([], 0.25)
    with pytest.raises(ValueError):
        saturation_value(ramp, 0.0)


def test_emit_csv_round_trip(tmp_path):
    config = small_config(realizations=3)
    records, manifest = run_experiment(config)
    paths = emit(records, manifest, tmp_path)
    csv_path = tmp_path / "logneg.csv"
    assert csv_path in paths
    text = csv_path.read_bytes().decode("utf-8")
    assert text.startswith("t,mean,variance,n_realizations\n")
    assert "\r" not in text
    parsed = read_records_csv(csv_path)
    assert parsed == records["logneg"]
    manifest_data = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest_data["derived_seeds"]) == config.realizations
    assert manifest_data["config"]["master_seed"] == 11


def test_emit_json_format(tmp_path):
    config = small_config(realizations=2, output=OutputOptions(format="json"))
    records, manifest = run_experiment(config)
    (path,) = emit(records, manifest, tmp_path, "json")
    payload = json.loads(path.read_text())
    assert payload["manifest"]["realizations"] == 2
    assert payload["records"]["logneg"][0]["t"] == 0


def test_golden_smoke_snapshot(tmp_path):
    """Frozen-seed end-to-end snapshot; regenerate only for intentional
    behavior changes (see tests/data/README)."""
    config = small_config(steps=4, realizations=2, master_seed=2024)
    records, manifest = run_experiment(config)
    emit(records, manifest, tmp_path)
    produced = (tmp_path / "logneg.csv").read_text()
    golden = (DATA_DIR / "golden_smoke_logneg.csv").read_text()
    assert produced == golden


def test_realize_is_pure_function():
    config = small_config()
    a = realize(config, 2)
    b = realize(config, 2)
    np.testing.assert_array_equal(a[0]["logneg"][1], b[0]["logneg"][1])
