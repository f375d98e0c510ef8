import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orqc.entanglement import (
    MomentAccumulator,
    fluctuation,
    log_negativity,
    mutual_information,
    negativity,
)
from orqc.linalg import apply_gate, vn_entropy, partial_trace
from orqc.sampling import haar_pure_state, haar_unitary, hs_random_density

from conftest import bell_state, ghz_state, rng_for


def test_product_state_has_zero_negativity(rng):
    rho = np.kron(hs_random_density(1, rng), hs_random_density(2, rng))
    assert log_negativity(rho, [0]) == pytest.approx(0.0, abs=1e-12)


def test_bell_state_negativity_conventions():
    assert negativity(bell_state(), [0]) == pytest.approx(0.5, abs=1e-12)
    assert log_negativity(bell_state(), [0]) == pytest.approx(np.log2(1.5), abs=1e-12)
    assert log_negativity(bell_state(), [0], standard=True) == pytest.approx(1.0, abs=1e-12)


def test_log_negativity_symmetric_in_parts(rng):
    rho = hs_random_density(4, rng)
    a = log_negativity(rho, [0, 1])
    b = log_negativity(rho, [2, 3])
    assert a == pytest.approx(b, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_local_unitaries_leave_negativity_invariant(seed):
    rng = rng_for(seed)
    rho = hs_random_density(3, rng)
    base = log_negativity(rho, [0])
    rotated = apply_gate(rho, haar_unitary(2, rng), (0,))
    rotated = apply_gate(rotated, haar_unitary(4, rng), (1, 2))
    assert log_negativity(rotated, [0]) == pytest.approx(base, abs=1e-9)


def test_mutual_information_anchors():
    rho = np.kron(hs_random_density(1, rng_for(3)), hs_random_density(1, rng_for(4)))
    assert mutual_information(rho, [0]) == pytest.approx(0.0, abs=1e-9)
    assert mutual_information(bell_state(), [0]) == pytest.approx(2.0, abs=1e-10)
    # pure tripartite GHZ across 1:2 -> S_A + S_B - 0 = 2 (analytic marginals)
    assert mutual_information(ghz_state(3), [0]) == pytest.approx(2.0, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_mutual_information_bounds(seed):
    rho = hs_random_density(3, rng_for(seed, label="initial_state"))
    mi = mutual_information(rho, [0])
    assert -1e-9 <= mi <= 2.0 + 1e-9


def test_pure_state_mutual_information_doubles_entropy(rng):
    rho = haar_pure_state(4, rng)
    s_a = vn_entropy(partial_trace(rho, [0, 1]))
    assert mutual_information(rho, [0, 1]) == pytest.approx(2 * s_a, abs=1e-8)


def test_fluctuation_basics():
    mean, var = fluctuation([2.5, 2.5, 2.5])
    assert (mean, var) == (2.5, 0.0)
    mean, var = fluctuation([0.0, 1.0])
    assert mean == pytest.approx(0.5)
    assert var == pytest.approx(0.25)
    with pytest.raises(ValueError):
        fluctuation([])


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=80
    ),
    st.integers(min_value=1, max_value=7),
)
def test_sharded_accumulators_match_single_pass(values, shards):
    whole = MomentAccumulator()
    for v in values:
        whole.add(v)
    parts = [MomentAccumulator() for _ in range(shards)]
    for i, v in enumerate(values):
        parts[i % shards].add(v)
    merged = MomentAccumulator()
    for part in parts:
        merged.merge(part)
    assert merged.count == whole.count
    assert merged.mean == pytest.approx(whole.mean, rel=1e-12, abs=1e-12)
    scale = max(1.0, abs(whole.variance))
    assert merged.variance == pytest.approx(whole.variance, rel=1e-9, abs=1e-9 * scale)


def test_variance_never_negative():
    acc = MomentAccumulator()
    for v in (1.0, 1.0, 1.0):
        acc.add(v)
    assert acc.variance == 0.0
    with pytest.raises(ValueError):
        MomentAccumulator().variance
