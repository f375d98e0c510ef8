"""Projected ensembles and quantum state k-design diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import Sequence

import numpy as np

from .linalg import check_qubit_subset, num_qubits, trace_norm

PROBABILITY_FLOOR = 1e-12
DEFAULT_MOMENT_DIM_CAP = 4096


@dataclass
class ProjectedEnsemble:
    """Outcome-indexed conditional states of subsystem A.

    ``states[i]`` is the normalized post-measurement state of A given the
    computational-basis outcome on B retained at index i; outcomes with
    probability below 1e-12 are dropped.
    """

    dim_a: int
    probs: np.ndarray           # (n_retained,)
    states: np.ndarray          # (n_retained, dim_a, dim_a)

    def __len__(self) -> int:
        return len(self.probs)


def build_projected_ensemble(rho: np.ndarray, part_a: Sequence[int]) -> ProjectedEnsemble:
    """Measure the complement of A in the computational basis.

    For each outcome b: p_b = Tr[(I_A x |b><b|) rho] and the conditional
    state is the A-block of rho at column/row b, renormalized.
    """
    n = num_qubits(rho)
    part_a = check_qubit_subset(part_a, n)
    if len(part_a) >= n:
        raise ValueError("subsystem A must leave at least one qubit to measure")
    part_b = [q for q in range(n) if q not in part_a]
    da, db = 2 ** len(part_a), 2 ** len(part_b)

    t = rho.reshape([2] * (2 * n))
    perm = part_a + part_b + [n + q for q in part_a] + [n + q for q in part_b]
    t = t.transpose(perm).reshape(da, db, da, db)
    blocks = np.einsum("abcb->bac", t)  # (db, da, da), unnormalized conditionals
    probs = np.einsum("baa->b", blocks).real

    keep = probs > PROBABILITY_FLOOR
    states = blocks[keep] / probs[keep][:, None, None]
    return ProjectedEnsemble(dim_a=da, probs=probs[keep].copy(), states=states)


def kth_moment(
    ens: ProjectedEnsemble, k: int, *, dim_cap: int = DEFAULT_MOMENT_DIM_CAP
) -> np.ndarray:
    """sum_b p_b (rho_A^(b))^{x k} on the k-fold tensor space."""
    if k < 1:
        raise ValueError("moment order must be at least 1")
    if ens.dim_a**k > dim_cap:
        raise ValueError(
            f"moment dimension {ens.dim_a ** k} exceeds the cap {dim_cap}"
        )
    out = np.zeros((ens.dim_a**k, ens.dim_a**k), dtype=complex)
    for p, sigma in zip(ens.probs, ens.states):
        power = sigma
        for _ in range(k - 1):
            power = np.kron(power, sigma)
        out += p * power
    return out


def symmetric_projector(d: int, k: int) -> np.ndarray:
    """Projector onto the symmetric subspace of (C^d)^{x k}."""
    dk = d**k
    digits = np.stack(
        [(np.arange(dk) // d ** (k - 1 - i)) % d for i in range(k)], axis=1
    )
    proj = np.zeros((dk, dk))
    weights = d ** np.arange(k - 1, -1, -1)
    from itertools import permutations

    for sigma in permutations(range(k)):
        targets = digits[:, sigma] @ weights
        proj[targets, np.arange(dk)] += 1.0
    return proj.astype(complex) / factorial(k)


def haar_moment(d: int, k: int, *, dim_cap: int = DEFAULT_MOMENT_DIM_CAP) -> np.ndarray:
    """k-th moment of the Haar ensemble: Pi_k / binom(d+k-1, k)."""
    if d**k > dim_cap:
        raise ValueError(f"moment dimension {d ** k} exceeds the cap {dim_cap}")
    return symmetric_projector(d, k) / comb(d + k - 1, k)


def design_distance(
    ens: ProjectedEnsemble, k: int, *, dim_cap: int = DEFAULT_MOMENT_DIM_CAP
) -> float:
    """Trace distance between the ensemble's k-th moment and the Haar moment."""
    diff = kth_moment(ens, k, dim_cap=dim_cap) - haar_moment(ens.dim_a, k, dim_cap=dim_cap)
    return 0.5 * trace_norm(diff)
