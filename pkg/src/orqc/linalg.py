"""Dense complex linear algebra for small multi-qubit density matrices.

States are plain ``numpy`` arrays of shape ``(2**n, 2**n)`` and dtype
complex128.  Qubit 0 is the most significant bit of the row/column index,
i.e. ``np.kron(a, b)`` places ``a`` on qubit 0.  Everything here is a pure
function of its inputs; nothing is mutated in place.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

# Tolerances shared across the package.
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_FLOOR = -1e-9
ENTROPY_EIG_CLIP = 1e-12


def num_qubits(rho: np.ndarray) -> int:
    """Number of qubits of a square operator, validating the 2**n shape."""
    dim = rho.shape[0]
    if rho.ndim != 2 or rho.shape[1] != dim:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    n = int(dim).bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def check_qubit_subset(targets: Sequence[int], n: int) -> list[int]:
    """Validate an ordered list of distinct qubit indices in [0, n)."""
    targets = [int(q) for q in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate qubit indices in {targets}")
    for q in targets:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} outside register of {n} qubits")
    return targets


def check_density_matrix(rho: np.ndarray, *, psd: bool = True) -> None:
    """Raise if ``rho`` is not Hermitian, unit-trace and (optionally) PSD.

    The PSD check costs a full eigendecomposition; skip it on hot paths.
    """
    herm_dev = np.abs(rho - rho.conj().T).max()
    if herm_dev > HERMITICITY_ATOL:
        raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm_dev:.3e}")
    tr_dev = abs(np.trace(rho) - 1.0)
    if tr_dev > TRACE_ATOL:
        raise ValueError(f"trace differs from 1 by {tr_dev:.3e}")
    if psd:
        lo = np.linalg.eigvalsh(rho)[0]
        if lo < PSD_FLOOR:
            raise ValueError(f"negative eigenvalue {lo:.3e} below PSD floor")
    if not np.all(np.isfinite(rho)):
        raise ValueError("non-finite entries in density matrix")


def apply_gate(rho: np.ndarray, gate: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Conjugate ``rho`` by a k-qubit unitary embedded on ``targets``.

    The gate is applied by index arithmetic on the row and column sides
    separately (U on rows, U* on columns); the full 2**n unitary is never
    built.
    """
    n = num_qubits(rho)
    targets = check_qubit_subset(targets, n)
    k = len(targets)
    if gate.shape != (2**k, 2**k):
        raise ValueError(f"gate shape {gate.shape} does not match {k} targets")
    dev = np.abs(gate @ gate.conj().T - np.eye(2**k)).max()
    if dev > HERMITICITY_ATOL:
        raise ValueError(f"gate is not unitary: max |U U^dag - I| = {dev:.3e}")

    t = rho.reshape([2] * (2 * n))
    u = gate.reshape([2] * (2 * k))
    in_axes = list(range(k, 2 * k))

    # Rows: (U rho)_{i.} = sum_a U_{ia} rho_{a.}
    t = np.tensordot(u, t, axes=(in_axes, targets))
    t = np.moveaxis(t, range(k), targets)
    # Columns: (rho U^dag)_{.j} = sum_b rho_{.b} conj(U_{jb})
    col_axes = [n + q for q in targets]
    t = np.tensordot(u.conj(), t, axes=(in_axes, col_axes))
    t = np.moveaxis(t, range(k), col_axes)
    return np.ascontiguousarray(t.reshape(2**n, 2**n))


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Trace out every qubit not in ``keep``.

    The result's qubit order follows the order given in ``keep``.
    """
    n = num_qubits(rho)
    keep = check_qubit_subset(keep, n)
    if not keep:
        raise ValueError("keep set is empty; a scalar trace is not a state")
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    perm = keep + drop + [n + q for q in keep] + [n + q for q in drop]
    t = t.transpose(perm)
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.ascontiguousarray(np.einsum("aibi->ab", t))


def partial_transpose(rho: np.ndarray, transposed: Sequence[int]) -> np.ndarray:
    """Transpose the row/column indices of the given qubits only."""
    n = num_qubits(rho)
    transposed = check_qubit_subset(transposed, n)
    t = rho.reshape([2] * (2 * n))
    perm = list(range(2 * n))
    for q in transposed:
        perm[q], perm[n + q] = perm[n + q], perm[q]
    return np.ascontiguousarray(t.transpose(perm).reshape(2**n, 2**n))


def hermitian_eigenvalues(h: np.ndarray, *, atol: float = 1e-8) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    dev = np.abs(h - h.conj().T).max()
    if dev > atol:
        raise ValueError(f"not Hermitian within {atol}: deviation {dev:.3e}")
    return np.linalg.eigvalsh(h)


def trace_norm(h: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix: sum of |eigenvalues|."""
    return float(np.abs(hermitian_eigenvalues(h)).sum())


def vn_entropy(rho: np.ndarray, *, log_base: float = 2.0) -> float:
    """Von Neumann entropy; eigenvalues below 1e-12 are clamped to zero."""
    w = np.linalg.eigvalsh(rho)
    w = w[w > ENTROPY_EIG_CLIP]
    return float(-(w * np.log(w)).sum() / np.log(log_base))


def renyi2_entropy(rho: np.ndarray, *, log_base: float = 2.0) -> float:
    """Renyi-2 entropy -log Tr(rho^2)."""
    purity = float(np.vdot(rho, rho).real)
    return float(-np.log(purity) / np.log(log_base))


def purity(rho: np.ndarray) -> float:
    return float(np.vdot(rho, rho).real)


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of the factors in order (first factor on qubit 0)."""
    out = None
    for f in factors:
        out = f if out is None else np.kron(out, f)
    if out is None:
        raise ValueError("no factors given")
    return out


def basis_projector(index: int, n_qubits: int) -> np.ndarray:
    """|b><b| for the computational basis state with the given integer label."""
    d = 2**n_qubits
    if not 0 <= index < d:
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
    rho = np.zeros((d, d), dtype=complex)
    rho[index, index] = 1.0
    return rho
