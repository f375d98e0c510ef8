"""Circuit-adapted Krylov complexity.

The evolving density matrix (reduced to the system register for the open
classes) is flattened into operator space with the normalized
Hilbert-Schmidt inner product (A|B) = Tr(A^dag B)/D, made traceless and
unit-norm each step, and orthogonalized against the basis built from its own
trajectory.  The mean basis index occupied by the state is the complexity
C_K(t); the basis count at termination is the Krylov dimension K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuits import CircuitRun, CircuitSpec, FullState, reduced_system_state
from .linalg import kron_all, num_qubits
from .sampling import RealizationStreams, haar_pure_state

DEGENERATE_NORM = 1e-12


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """(A|B) = Tr(A^dag B) / D on D-dimensional operators."""
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError("operands must be square matrices of equal dimension")
    return complex(np.vdot(a, b) / a.shape[0])


def hs_norm(a: np.ndarray) -> float:
    return float(np.sqrt(hs_inner(a, a).real))


def prepare_initial(rho: np.ndarray) -> np.ndarray:
    """Traceless, unit-HS-norm operator vector for the trajectory start.

    Subtracts (Tr rho / D) I and rescales; inputs proportional to the
    identity have no traceless part and are rejected as degenerate.
    """
    d = rho.shape[0]
    v = rho - (np.trace(rho) / d) * np.eye(d)
    norm = hs_norm(v)
    if norm < DEGENERATE_NORM:
        raise ValueError("degenerate initial state: no traceless component")
    return v / norm


@dataclass
class KrylovResult:
    dimension: int
    complexity: np.ndarray      # C_K(t), t = 0..steps
    coeff_mass: np.ndarray      # sum_n |phi_n(t)|^2 per step
    prenorm: np.ndarray         # HS norm of the traceless part before renormalization
    tol: float
    steps: int
    basis: Optional[np.ndarray] = None  # (K, D^2), scaled flats; only on request


def complexity_series(result: KrylovResult) -> list[tuple[int, float]]:
    """Plot-ready (t, C_K) pairs."""
    return [(t, float(c)) for t, c in enumerate(result.complexity)]


def _scaled_flat(mat: np.ndarray) -> np.ndarray:
    # vec(A)/sqrt(D): the plain complex dot of two such flats is the
    # normalized HS inner product of the matrices.
    return mat.reshape(-1) / np.sqrt(mat.shape[0])


def _traceless_flat(mat: np.ndarray, identity_flat: np.ndarray) -> np.ndarray:
    d = mat.shape[0]
    return _scaled_flat(mat) - (np.trace(mat) / d) * identity_flat


def krylov_run(
    spec: CircuitSpec,
    streams: RealizationStreams,
    *,
    max_steps: int,
    tol: float = 1e-10,
    stall_window: int = 64,
    fixed_steps: bool = False,
    initial_system: Optional[np.ndarray] = None,
    initial_recipe: str = "pair_product",
    trace_removal: str = "before_norm",
    return_basis: bool = False,
) -> KrylovResult:
    """Evolve one realization and build its Krylov basis from the trajectory.

    The initial state's traceless part is normalized once; for ruc and mlorc
    the circuit layers (linear maps) are then applied to that operator
    vector directly, renormalizing after every layer.  Unitary layers leave
    the norm at 1, so there the renormalization is a recorded no-op; the
    memoryless dilations contract it.  For mforc the full register evolves
    physically and the vector is re-extracted from the system marginal each
    step.  Each new vector is orthogonalized against the existing basis
    (block classical Gram-Schmidt with one full re-orthogonalization pass);
    a residual above ``tol`` appends a basis vector.  Without
    ``fixed_steps`` the run stops once no vector has been appended for
    ``stall_window`` steps.

    ``trace_removal="after_norm"`` renormalizes before subtracting the trace
    part instead; for the operator trajectory the trace stays pinned at zero
    so the orders only differ for mforc.
    """
    if not 0 < tol <= 1e-6:
        raise ValueError("tol must lie in (0, 1e-6]")
    if trace_removal not in ("before_norm", "after_norm"):
        raise ValueError(f"unknown trace_removal mode {trace_removal!r}")
    run = CircuitRun(spec, streams)
    if initial_system is None:
        state = run.initial_state(initial_recipe)
        system0 = reduced_system_state(state)
    else:
        if num_qubits(initial_system) != spec.n_system:
            raise ValueError("initial state size does not match the circuit")
        system0 = initial_system
        if spec.n_aux:
            auxes = kron_all(
                haar_pure_state(1, streams.auxiliaries) for _ in range(spec.n_aux)
            )
            state = FullState(np.kron(initial_system, auxes), spec.n_system, spec.n_aux)
        else:
            state = FullState(initial_system, spec.n_system)

    d = 2**spec.n_system
    m = d * d
    identity_flat = _scaled_flat(np.eye(d, dtype=complex))

    # ruc/mlorc evolve the normalized traceless operator itself through the
    # (linear) circuit layers; mforc reduced dynamics is not a map of the
    # system state alone, so there the physical register evolves and the
    # operator vector is re-extracted from the system marginal each step.
    evolve_vector = spec.kind != "mforc"
    if evolve_vector:
        op = prepare_initial(system0)

    rows_cap = min(m - 1, max_steps + 1)
    basis = np.zeros((rows_cap, m), dtype=complex)
    v0 = _traceless_flat(system0, identity_flat)
    norm0 = np.linalg.norm(v0)
    if norm0 < DEGENERATE_NORM:
        raise ValueError("degenerate initial state: no traceless component")
    basis[0] = v0 / norm0
    k = 1

    complexity = np.zeros(max_steps + 1)
    coeff_mass = np.ones(max_steps + 1)
    prenorm = np.ones(max_steps + 1)
    last_growth = 0
    steps_done = 0

    for t in range(1, max_steps + 1):
        if evolve_vector:
            op = run.step(FullState(op, spec.n_system), t).rho
            evolved = op
        else:
            state = run.step(state, t)
            evolved = reduced_system_state(state)
        if trace_removal == "before_norm":
            w = _traceless_flat(evolved, identity_flat)
            norm = np.linalg.norm(w)
            prenorm[t] = norm
            if norm < DEGENERATE_NORM:
                raise ValueError(f"state lost its traceless part at step {t}")
            u = w / norm
        else:
            flat = _scaled_flat(evolved)
            norm = np.linalg.norm(flat)
            prenorm[t] = norm
            u = flat / norm
            u = u - (u @ identity_flat.conj()) * identity_flat
            u /= np.linalg.norm(u)
        if evolve_vector:
            op = u.reshape(d, d) * np.sqrt(d)

        b = basis[:k]
        c = np.conj(b @ u.conj())
        r = u - c @ b
        c2 = np.conj(b @ r.conj())
        r -= c2 @ b
        c += c2
        res = np.linalg.norm(r)

        if res > tol and k < rows_cap:
            basis[k] = r / res
            phi2 = np.concatenate((np.abs(c) ** 2, [res**2]))
            k += 1
            last_growth = t
        else:
            phi2 = np.abs(c) ** 2
        mass = float(phi2.sum())
        coeff_mass[t] = mass
        complexity[t] = float(np.arange(len(phi2)) @ phi2) / mass
        steps_done = t
        if not fixed_steps and t - last_growth >= stall_window:
            break

    return KrylovResult(
        dimension=k,
        complexity=complexity[: steps_done + 1],
        coeff_mass=coeff_mass[: steps_done + 1],
        prenorm=prenorm[: steps_done + 1],
        tol=tol,
        steps=steps_done,
        basis=basis[:k].copy() if return_basis else None,
    )
