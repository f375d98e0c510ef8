"""Randomness for the circuit ensembles.

Every random object is drawn from a named stream.  A stream is identified by
(master_seed, realization, label) and yields a reproducible, statistically
independent `numpy` generator, so realizations can run on parallel workers
without sharing generator state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import apply_gate, basis_projector, kron_all

STREAM_LABELS = ("gates", "initial_state", "auxiliaries", "coin", "measurement")

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_PHASE_PI4 = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

PAIR_GATE_SET = ("identity", "hadamard", "phase_pi4", "cnot")


@dataclass(frozen=True)
class StreamKey:
    """Address of one reproducible random stream."""

    master_seed: int
    realization: int
    label: str

    def __post_init__(self):
        if self.label not in STREAM_LABELS:
            raise ValueError(f"unknown stream label {self.label!r}")
        if self.realization < 0:
            raise ValueError("realization index must be non-negative")

    def rng(self) -> np.random.Generator:
        """Fresh generator; the same key always yields the identical stream."""
        seq = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.realization, STREAM_LABELS.index(self.label)),
        )
        return np.random.Generator(np.random.PCG64(seq))


@dataclass
class RealizationStreams:
    """The per-realization bundle of independent generators."""

    gates: np.random.Generator
    initial_state: np.random.Generator
    auxiliaries: np.random.Generator
    coin: np.random.Generator
    measurement: np.random.Generator

    @classmethod
    def derive(cls, master_seed: int, realization: int) -> "RealizationStreams":
        return cls(
            **{
                label: StreamKey(master_seed, realization, label).rng()
                for label in STREAM_LABELS
            }
        )


def ginibre(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Square matrix of i.i.d. standard complex normals."""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    q, r = np.linalg.qr(ginibre(dim, rng))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_pure_state(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Rank-1 projector |psi><psi| with |psi> uniform on the unit sphere."""
    d = 2**n_qubits
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def hs_random_density(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Hilbert-Schmidt random density matrix, rho = G G^dag / Tr(G G^dag)."""
    g = ginibre(2**n_qubits, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class CliffordDraw:
    """One draw from the pair rotation set {I, H, phase(pi/4), CNOT}.

    ``target`` selects the first or second qubit of the pair and is present
    only for the single-qubit gates.
    """

    gate: str
    target: int | None = None

    def __post_init__(self):
        if self.gate not in PAIR_GATE_SET:
            raise ValueError(f"unknown gate {self.gate!r}")
        single = self.gate in ("hadamard", "phase_pi4")
        if single != (self.target is not None):
            raise ValueError("target must be given exactly for single-qubit gates")


def sample_clifford_draw(rng: np.random.Generator) -> CliffordDraw:
    gate = PAIR_GATE_SET[rng.integers(4)]
    if gate in ("hadamard", "phase_pi4"):
        return CliffordDraw(gate, int(rng.integers(2)))
    return CliffordDraw(gate)


def apply_clifford_draw(rho: np.ndarray, draw: CliffordDraw) -> np.ndarray:
    if draw.gate == "identity":
        return rho
    if draw.gate == "cnot":
        return apply_gate(rho, _CNOT, (0, 1))
    gate = _HADAMARD if draw.gate == "hadamard" else _PHASE_PI4
    return apply_gate(rho, gate, (draw.target,))


def magic_free_pair_state(
    rng: np.random.Generator, *, weights: str = "basis"
) -> np.ndarray:
    """Two-qubit zero-magic initial state: a rotated computational projector.

    A computational-basis projector is picked uniformly and conjugated by a
    single draw from the pair gate set.  The result has exactly zero
    stabilizer Renyi-2 entropy.  ``weights="simplex"`` instead mixes the four
    projectors with a uniform probability 4-vector; those mixtures are NOT
    zero-magic under the fourth-moment measure and exist only for
    sensitivity checks.
    """
    if weights == "basis":
        base = basis_projector(int(rng.integers(4)), 2)
    elif weights == "simplex":
        a = rng.dirichlet(np.ones(4))
        base = np.diag(a).astype(complex)
    else:
        raise ValueError(f"unknown weights mode {weights!r}")
    return apply_clifford_draw(base, sample_clifford_draw(rng))


def ball_random_qubit(rng: np.random.Generator) -> np.ndarray:
    """Mixed qubit with uniform Bloch radius and Haar-random direction.

    Eigenvalues (1+r)/2, (1-r)/2 with r uniform on [0, 1] in a Haar-random
    basis; mean purity 2/3.  This is the fresh-auxiliary ensemble that
    reproduces the memoryless circuits' entanglement lifetimes and magic
    saturations; Haar-random pure auxiliaries decohere too weakly to kill
    entanglement at all.
    """
    r = rng.uniform(0.0, 1.0)
    u = haar_unitary(2, rng)
    return u @ np.diag([(1 + r) / 2, (1 - r) / 2]).astype(complex) @ u.conj().T


AUX_ENSEMBLES = ("ball", "pure", "hs")


def fresh_auxiliary_state(rng: np.random.Generator, ensemble: str = "ball") -> np.ndarray:
    """One fresh single-qubit auxiliary from the named ensemble."""
    if ensemble == "ball":
        return ball_random_qubit(rng)
    if ensemble == "pure":
        return haar_pure_state(1, rng)
    if ensemble == "hs":
        return hs_random_density(1, rng)
    raise ValueError(f"unknown auxiliary ensemble {ensemble!r}")


def coin_toss(rng: np.random.Generator) -> bool:
    """Fair coin; True means heads."""
    return bool(rng.integers(2) == 0)


def pair_product_state(n_system: int, rng: np.random.Generator) -> np.ndarray:
    """Product of independent HS-random two-qubit states on pairs (0,1),(2,3),..."""
    if n_system % 2:
        raise ValueError("system size must be even")
    return kron_all(hs_random_density(2, rng) for _ in range(n_system // 2))


def magic_free_product_state(
    n_system: int, rng: np.random.Generator, *, weights: str = "basis"
) -> np.ndarray:
    """Product of independent zero-magic two-qubit states on pairs (0,1),(2,3),..."""
    if n_system % 2:
        raise ValueError("system size must be even")
    return kron_all(
        magic_free_pair_state(rng, weights=weights) for _ in range(n_system // 2)
    )
