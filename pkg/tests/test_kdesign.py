from math import comb

import numpy as np
import pytest

from orqc.kdesign import (
    ProjectedEnsemble,
    build_projected_ensemble,
    design_distance,
    haar_moment,
    kth_moment,
    symmetric_projector,
)
from orqc.linalg import partial_trace
from orqc.sampling import haar_unitary, hs_random_density

from conftest import bell_state


def test_product_state_conditionals_are_the_marginal(rng):
    a, b = hs_random_density(1, rng), hs_random_density(2, rng)
    ens = build_projected_ensemble(np.kron(a, b), [0])
    assert ens.dim_a == 2
    for sigma in ens.states:
        np.testing.assert_allclose(sigma, a, atol=1e-10)


def test_bell_state_conditioning():
    ens = build_projected_ensemble(bell_state(), [0])
    assert len(ens) == 2
    np.testing.assert_allclose(ens.probs, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(ens.states[0], np.diag([1.0, 0.0]), atol=1e-12)
    np.testing.assert_allclose(ens.states[1], np.diag([0.0, 1.0]), atol=1e-12)


def test_probabilities_sum_to_one(rng):
    rho = hs_random_density(4, rng)
    ens = build_projected_ensemble(rho, [0, 1])
    assert ens.probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_whole_register_subsystem_rejected(rng):
    with pytest.raises(ValueError):
        build_projected_ensemble(hs_random_density(2, rng), [0, 1])


def test_first_moment_equals_marginal(rng):
    rho = hs_random_density(3, rng)
    ens = build_projected_ensemble(rho, [1])
    np.testing.assert_allclose(kth_moment(ens, 1), partial_trace(rho, [1]), atol=1e-9)


def test_single_member_moment_is_tensor_power(rng):
    sigma = hs_random_density(1, rng)
    ens = ProjectedEnsemble(2, np.array([1.0]), np.array([sigma]))
    np.testing.assert_allclose(kth_moment(ens, 3), np.kron(np.kron(sigma, sigma), sigma), atol=1e-12)


def test_two_member_second_moment_hand_assembled(rng):
    a, b = hs_random_density(1, rng), hs_random_density(1, rng)
    ens = ProjectedEnsemble(2, np.array([0.25, 0.75]), np.array([a, b]))
    expected = 0.25 * np.kron(a, a) + 0.75 * np.kron(b, b)
    np.testing.assert_allclose(kth_moment(ens, 2), expected, atol=1e-12)


def test_moment_validation(rng):
    sigma = hs_random_density(1, rng)
    ens = ProjectedEnsemble(2, np.array([1.0]), np.array([sigma]))
    with pytest.raises(ValueError):
        kth_moment(ens, 0)
    with pytest.raises(ValueError):
        kth_moment(ens, 13)  # 2^13 over the default cap


def test_moment_is_valid_state_for_mixed_members(rng):
    rho = hs_random_density(3, rng)
    ens = build_projected_ensemble(rho, [0])
    m = kth_moment(ens, 2)
    assert np.abs(m - m.conj().T).max() <= 1e-12
    assert np.trace(m).real == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.eigvalsh(m)[0] >= -1e-12


def test_haar_moment_first_order_is_maximally_mixed():
    np.testing.assert_allclose(haar_moment(4, 1), np.eye(4) / 4, atol=1e-12)


def test_symmetric_projector_rank_and_trace():
    pi2 = symmetric_projector(2, 2)
    assert np.linalg.matrix_rank(pi2) == 3
    for k, expected in ((1, 4), (2, 10), (3, 20)):
        assert np.trace(symmetric_projector(4, k)).real == pytest.approx(expected)
        assert expected == comb(4 + k - 1, k)


def test_haar_moment_commutes_with_tensor_unitaries(rng):
    u = haar_unitary(2, rng)
    uu = np.kron(u, u)
    m = haar_moment(2, 2)
    assert np.abs(m @ uu - uu @ m).max() <= 1e-9


def test_design_distance_of_haar_ensemble_is_zero():
    # single-member ensemble whose state reproduces the k = 1 Haar moment
    ens = ProjectedEnsemble(2, np.array([1.0]), np.array([np.eye(2, dtype=complex) / 2]))
    assert design_distance(ens, 1) == pytest.approx(0.0, abs=1e-12)


def test_design_distance_of_pure_ground_state():
    ens = ProjectedEnsemble(2, np.array([1.0]), np.array([np.diag([1.0, 0.0]).astype(complex)]))
    assert design_distance(ens, 1) == pytest.approx(0.5, abs=1e-12)


def test_design_distance_bounds_and_relabel_invariance(rng):
    rho = hs_random_density(4, rng)
    ens = build_projected_ensemble(rho, [0, 1])
    for k in (1, 2, 3):
        d = design_distance(ens, k)
        assert -1e-12 <= d <= 1.0 + 1e-12
    shuffled = ProjectedEnsemble(
        ens.dim_a, ens.probs[::-1].copy(), ens.states[::-1].copy()
    )
    assert design_distance(shuffled, 2) == pytest.approx(design_distance(ens, 2), abs=1e-12)
