import numpy as np
import pytest

from orqc import sampling
from orqc.linalg import check_density_matrix, purity, vn_entropy
from orqc.magic import sre2
from orqc.oracles import (
    bloch_symmetry_oracle,
    coin_fairness_oracle,
    haar_first_moment_oracle,
    haar_invariance_oracle,
    haar_second_moment_oracle,
    hs_purity_oracle,
)

from conftest import rng_for


def test_same_key_reproduces_stream():
    a = sampling.StreamKey(7, 3, "gates").rng().standard_normal(16)
    b = sampling.StreamKey(7, 3, "gates").rng().standard_normal(16)
    np.testing.assert_array_equal(a, b)


def test_distinct_realizations_and_labels_differ():
    base = sampling.StreamKey(7, 0, "gates").rng().standard_normal(16)
    other_real = sampling.StreamKey(7, 1, "gates").rng().standard_normal(16)
    other_label = sampling.StreamKey(7, 0, "coin").rng().standard_normal(16)
    assert not np.allclose(base, other_real)
    assert not np.allclose(base, other_label)


def test_stream_key_validation():
    with pytest.raises(ValueError):
        sampling.StreamKey(1, 0, "nope")
    with pytest.raises(ValueError):
        sampling.StreamKey(1, -1, "gates")


def test_haar_unitary_is_unitary(rng):
    for dim in (2, 4, 8):
        u = sampling.haar_unitary(dim, rng)
        assert np.abs(u @ u.conj().T - np.eye(dim)).max() <= 1e-10


def test_haar_unitary_rejects_zero_dim(rng):
    with pytest.raises(ValueError):
        sampling.haar_unitary(0, rng)


def test_haar_moment_monte_carlo_checks():
    assert haar_first_moment_oracle().passed
    assert haar_second_moment_oracle().passed
    assert haar_invariance_oracle().passed


def test_haar_pure_state_is_pure_projector(rng):
    rho = sampling.haar_pure_state(2, rng)
    check_density_matrix(rho)
    assert purity(rho) == pytest.approx(1.0, abs=1e-10)
    assert vn_entropy(rho) <= 1e-9


def test_bloch_vector_symmetry():
    assert bloch_symmetry_oracle().passed


def test_hs_random_density_is_valid(rng):
    rho = sampling.hs_random_density(2, rng)
    check_density_matrix(rho)


def test_hs_purity_average():
    assert hs_purity_oracle().passed


def test_hs_draws_differ_between_realizations():
    a = sampling.hs_random_density(2, rng_for(5, 0, "initial_state"))
    b = sampling.hs_random_density(2, rng_for(5, 1, "initial_state"))
    assert not np.allclose(a, b)


def test_clifford_draw_validation():
    with pytest.raises(ValueError):
        sampling.CliffordDraw("hadamard")  # missing target
    with pytest.raises(ValueError):
        sampling.CliffordDraw("cnot", target=0)
    with pytest.raises(ValueError):
        sampling.CliffordDraw("t_gate", target=0)


def test_phase_rotation_commutes_with_diagonal_mixture():
    base = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)
    out = sampling.apply_clifford_draw(base, sampling.CliffordDraw("phase_pi4", 0))
    np.testing.assert_allclose(out, base, atol=1e-12)
    out = sampling.apply_clifford_draw(base, sampling.CliffordDraw("phase_pi4", 1))
    np.testing.assert_allclose(out, base, atol=1e-12)


def test_cnot_draw_permutes_projectors():
    base = np.zeros((4, 4), dtype=complex)
    base[2, 2] = 1.0  # |10>
    out = sampling.apply_clifford_draw(base, sampling.CliffordDraw("cnot"))
    expected = np.zeros((4, 4), dtype=complex)
    expected[3, 3] = 1.0  # |11>
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_magic_free_pair_state_has_zero_magic_every_draw():
    worst = 0.0
    for r in range(200):
        rho = sampling.magic_free_pair_state(rng_for(31, r, "initial_state"))
        check_density_matrix(rho)
        worst = max(worst, abs(sre2(rho).magic))
    assert worst <= 1e-9


def test_magic_free_identity_draw_is_diagonal():
    # scan draws until the identity rotation appears
    for r in range(100):
        rng = rng_for(8, r, "initial_state")
        idx = rng.integers(4)
        draw = sampling.sample_clifford_draw(rng)
        if draw.gate == "identity":
            rng = rng_for(8, r, "initial_state")
            rho = sampling.magic_free_pair_state(rng)
            assert np.abs(rho - np.diag(np.diagonal(rho))).max() <= 1e-12
            assert abs(sre2(rho).magic) <= 1e-9
            return
    pytest.fail("no identity draw in 100 tries")


def test_simplex_weight_variant_is_valid_density(rng):
    rho = sampling.magic_free_pair_state(rng, weights="simplex")
    check_density_matrix(rho)


def test_coin_toss_fair_and_reproducible():
    assert coin_fairness_oracle().passed
    seq_a = [sampling.coin_toss(r) for r in [rng_for(2, 5, "coin")] for _ in range(20)]
    seq_b = [sampling.coin_toss(r) for r in [rng_for(2, 5, "coin")] for _ in range(20)]
    assert seq_a == seq_b
    seq_c = [sampling.coin_toss(r) for r in [rng_for(2, 6, "coin")] for _ in range(20)]
    assert seq_a != seq_c


def test_ball_random_qubit_statistics():
    purities = []
    for r in range(800):
        rho = sampling.ball_random_qubit(rng_for(17, r, "auxiliaries"))
        check_density_matrix(rho)
        purities.append(purity(rho))
    assert np.mean(purities) == pytest.approx(2 / 3, abs=0.01)


def test_fresh_auxiliary_state_ensembles(rng):
    for ensemble in sampling.AUX_ENSEMBLES:
        check_density_matrix(sampling.fresh_auxiliary_state(rng, ensemble))
    with pytest.raises(ValueError):
        sampling.fresh_auxiliary_state(rng, "thermal")


def test_pair_product_state_shapes(rng):
    rho = sampling.pair_product_state(6, rng)
    assert rho.shape == (64, 64)
    check_density_matrix(rho)
    with pytest.raises(ValueError):
        sampling.pair_product_state(5, rng)
