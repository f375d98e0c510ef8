"""Non-stabilizerness diagnostics: Pauli spectra and stabilizer Renyi-2 entropy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import num_qubits

# Row p of this matrix holds sigma_p[c, r] indexed by rc = 2r + c, so that a
# per-qubit contraction of the density matrix's (row, col) index pair turns
# rho into the table of Pauli expectations Tr(P rho).
_PAULI_TRANSFORM = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1j, -1j, 0],
        [1, 0, 0, -1],
    ],
    dtype=complex,
)

DEFAULT_QUBIT_CAP = 12
_IMAG_RESIDUE_ATOL = 1e-10


def pauli_spectrum(rho: np.ndarray, *, qubit_cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """All 4**n Pauli expectations Tr(P_p rho) as a real array.

    Entry ``p`` corresponds to the Pauli string whose base-4 digits select
    {I, X, Y, Z} per qubit, with qubit 0 the most significant digit.  The
    whole table is produced by one 4-point transform per qubit, O(d^2 log d)
    total, rather than 4**n individual traces.
    """
    n = num_qubits(rho)
    if n > qubit_cap:
        raise ValueError(f"{n} qubits exceeds the configured cap of {qubit_cap}")
    t = rho.reshape([2] * (2 * n))
    order = [ax for k in range(n) for ax in (k, n + k)]
    t = np.ascontiguousarray(t.transpose(order)).reshape([4] * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(_PAULI_TRANSFORM, t, axes=([1], [axis])), 0, axis)
    x = t.reshape(4**n)
    residue = np.abs(x.imag).max()
    if residue > _IMAG_RESIDUE_ATOL:
        raise ValueError(f"Pauli expectations not real (residue {residue:.3e}); input not Hermitian?")
    return np.ascontiguousarray(x.real)


@dataclass(frozen=True)
class SreValue:
    """Stabilizer Renyi-2 entropy split into its two logarithmic parts."""

    m_tilde: float  # -log( sum_p x_p^4 / d )
    s2: float       # -log Tr(rho^2)

    @property
    def magic(self) -> float:
        return self.m_tilde - self.s2


def sre2(
    rho: np.ndarray,
    *,
    log_base: float = 2.0,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> SreValue:
    """Mixed-state stabilizer Renyi-2 entropy of a density matrix.

    With x_p = Tr(P_p rho) and d the Hilbert-space dimension:
    m_tilde = -log(sum_p x_p^4 / d), s2 = -log Tr(rho^2), magic = m_tilde - s2.
    Zero (to numerical precision) for pure stabilizer states and for uniform
    mixtures over stabilizer cosets, e.g. the maximally mixed state.
    """
    n = num_qubits(rho)
    x = pauli_spectrum(rho, qubit_cap=qubit_cap)
    d = float(2**n)
    ln = np.log(log_base)
    m_tilde = float(-np.log(np.sum(x**4) / d) / ln)
    s2 = float(-np.log(np.vdot(rho, rho).real) / ln)
    return SreValue(m_tilde=m_tilde, s2=s2)


def parseval_gap(rho: np.ndarray, x: np.ndarray) -> float:
    """|sum_p x_p^2 - d Tr(rho^2)|, the Pauli-basis Parseval defect."""
    d = float(rho.shape[0])
    return float(abs(np.sum(x**2) - d * np.vdot(rho, rho).real))
