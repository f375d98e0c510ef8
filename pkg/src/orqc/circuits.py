"""The three brickwork circuit classes and their stepping rules.

All circuits run on a ring of ``n_system`` qubits with period-2 brickwork
scheduling: odd steps gate the pairs (0,1), (2,3), ...; even steps gate the
shifted pairs (1,2), (3,4), ..., (n-1,0), the last slot realizing the
periodic boundary.

* ruc    -- closed: an independent Haar U(4) per slot.
* mlorc  -- memoryless open: the first E slots of each layer couple their
  pair to a fresh random auxiliary qubit (mixed, uniform Bloch radius by
  default) through a Haar U(8) and the auxiliary is traced out immediately;
  the remaining slots get U(4) gates.  Auxiliaries are processed one at a
  time, capping the register at n_system + 1 qubits.
* mforc  -- memoryful open: n_system/2 auxiliaries are sampled once and kept.
  Odd steps gate (2i, 2i+1, aux_i); even steps pick the auxiliary of the
  left or right odd pair by coin toss.  Nothing is ever traced out during
  evolution.

Register layout: system qubit i at index i, persistent auxiliary j at index
n_system + j.  Steps return fresh states; different realizations share
nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .linalg import apply_gate, kron_all, partial_trace
from .sampling import (
    AUX_ENSEMBLES,
    RealizationStreams,
    coin_toss,
    fresh_auxiliary_state,
    haar_pure_state,
    haar_unitary,
    magic_free_product_state,
    pair_product_state,
)

CIRCUIT_KINDS = ("ruc", "mlorc", "mforc")


@dataclass(frozen=True)
class CircuitSpec:
    """Declarative description of one circuit instance.

    ``exposure`` (MLORC only) is the number of pairs coupled to fresh
    auxiliaries per step; it defaults to all pairs.  ``same_layer_mode``
    freezes the layer sampled at t = 1 and reapplies it verbatim at every
    step, which pins the Krylov dimension below D^2 - D + 1.
    ``randomize_exposed`` draws the exposed-pair subset anew each step
    instead of using the first ``exposure`` slots.
    """

    kind: str
    n_system: int
    exposure: Optional[int] = None
    same_layer_mode: bool = False
    randomize_exposed: bool = False
    aux_ensemble: str = "ball"

    def __post_init__(self):
        if self.kind not in CIRCUIT_KINDS:
            raise ValueError(f"unknown circuit kind {self.kind!r}")
        if self.n_system < 2 or self.n_system % 2:
            raise ValueError("n_system must be a positive even integer")
        if self.kind != "mlorc":
            if self.exposure is not None:
                raise ValueError("exposure is only meaningful for mlorc")
        elif self.exposure is not None and not 0 <= self.exposure <= self.n_system // 2:
            raise ValueError("exposure must lie in [0, n_system/2]")
        if self.aux_ensemble not in AUX_ENSEMBLES:
            raise ValueError(f"unknown auxiliary ensemble {self.aux_ensemble!r}")

    @property
    def n_aux(self) -> int:
        return self.n_system // 2 if self.kind == "mforc" else 0

    @property
    def effective_exposure(self) -> int:
        if self.kind != "mlorc":
            return 0
        return self.n_system // 2 if self.exposure is None else self.exposure


@dataclass(frozen=True)
class GateSlot:
    pair: tuple[int, int]
    # "none": plain U(4); "fresh": dilate with a fresh auxiliary;
    # "persistent": U(8) with one of aux_candidates (coin-resolved if two).
    aux: str = "none"
    aux_candidates: tuple[int, ...] = ()


@dataclass(frozen=True)
class LayerPlan:
    step: int
    slots: tuple[GateSlot, ...]

    @property
    def parity(self) -> str:
        return "odd" if self.step % 2 else "even"


def layer_plan(
    spec: CircuitSpec, t: int, rng: Optional[np.random.Generator] = None
) -> LayerPlan:
    """Gate slots for step ``t`` (t >= 1); the schedule has period 2."""
    if t < 1:
        raise ValueError("steps are counted from 1")
    n = spec.n_system
    half = n // 2
    odd = t % 2 == 1
    if odd:
        pairs = [(2 * i, 2 * i + 1) for i in range(half)]
    else:
        pairs = [(2 * i + 1, (2 * i + 2) % n) for i in range(half)]

    if spec.kind == "mlorc":
        e = spec.effective_exposure
        if spec.randomize_exposed and e > 0:
            if rng is None:
                raise ValueError("randomize_exposed requires an auxiliary stream")
            exposed = set(rng.choice(half, size=e, replace=False).tolist())
        else:
            exposed = set(range(e))
        slots = tuple(
            GateSlot(pair, "fresh" if i in exposed else "none")
            for i, pair in enumerate(pairs)
        )
    elif spec.kind == "mforc":
        if odd:
            slots = tuple(
                GateSlot(pair, "persistent", (i,)) for i, pair in enumerate(pairs)
            )
        else:
            # even slot i sits between odd pairs i (left) and i+1 (right)
            slots = tuple(
                GateSlot(pair, "persistent", (i, (i + 1) % half))
                for i, pair in enumerate(pairs)
            )
    else:
        slots = tuple(GateSlot(pair) for pair in pairs)
    return LayerPlan(step=t, slots=slots)


@dataclass
class FullState:
    """Density matrix of the full register plus its layout bookkeeping."""

    rho: np.ndarray
    n_system: int
    n_aux: int = 0

    @property
    def n_register(self) -> int:
        return self.n_system + self.n_aux

    def aux_index(self, j: int) -> int:
        if not 0 <= j < self.n_aux:
            raise ValueError(f"no persistent auxiliary {j}")
        return self.n_system + j


def initial_full_state(
    spec: CircuitSpec,
    streams: RealizationStreams,
    recipe: str = "pair_product",
    *,
    magic_weights: str = "basis",
) -> FullState:
    """Sample the t = 0 state for one realization.

    ``pair_product`` draws the Hilbert-Schmidt-random two-qubit product used
    for entanglement, Krylov and design runs; ``magic_free`` draws the
    zero-magic rotated-projector product used for SRE runs.  MFORC appends
    its persistent auxiliaries as independent Haar-random pure qubits.
    """
    if recipe == "pair_product":
        system = pair_product_state(spec.n_system, streams.initial_state)
    elif recipe == "magic_free":
        system = magic_free_product_state(
            spec.n_system, streams.initial_state, weights=magic_weights
        )
    else:
        raise ValueError(f"unknown initial-state recipe {recipe!r}")
    if spec.kind != "mforc":
        return FullState(system, spec.n_system)
    auxes = kron_all(
        haar_pure_state(1, streams.auxiliaries) for _ in range(spec.n_aux)
    )
    return FullState(np.kron(system, auxes), spec.n_system, spec.n_aux)


# One slot's worth of sampled work: ("u4", pair, U) | ("dilate", pair, U, aux_rho)
# | ("aux", pair, aux_index, U).
LayerActions = list[tuple]

ProbeCallback = Callable[[int, np.ndarray], None]


def sample_layer_actions(
    spec: CircuitSpec, plan: LayerPlan, streams: RealizationStreams
) -> LayerActions:
    """Draw the random content of one layer, in slot order.

    With exposure 0, mlorc consumes the gate stream exactly like ruc, so the
    two produce identical trajectories realization by realization.
    """
    actions: LayerActions = []
    for slot in plan.slots:
        if slot.aux == "none":
            actions.append(("u4", slot.pair, haar_unitary(4, streams.gates)))
        elif slot.aux == "fresh":
            gate = haar_unitary(8, streams.gates)
            aux = fresh_auxiliary_state(streams.auxiliaries, spec.aux_ensemble)
            actions.append(("dilate", slot.pair, gate, aux))
        else:
            if len(slot.aux_candidates) == 1:
                aux_j = slot.aux_candidates[0]
            else:
                heads = coin_toss(streams.coin)
                aux_j = slot.aux_candidates[0 if heads else 1]
            actions.append(("aux", slot.pair, aux_j, haar_unitary(8, streams.gates)))
    return actions


def apply_layer_actions(
    state: FullState, actions: LayerActions, probe: Optional[ProbeCallback] = None
) -> FullState:
    """Apply one sampled layer.  ``probe`` sees each dilated register after
    the gate and before the auxiliary is discarded (slot index, matrix with
    the fresh auxiliary at the last register position)."""
    rho = state.rho
    for i, action in enumerate(actions):
        tag = action[0]
        if tag == "u4":
            _, pair, gate = action
            rho = apply_gate(rho, gate, pair)
        elif tag == "dilate":
            _, pair, gate, aux = action
            rho = np.kron(rho, aux)
            rho = apply_gate(rho, gate, (*pair, state.n_system + state.n_aux))
            if probe is not None:
                probe(i, rho)
            rho = partial_trace(rho, range(state.n_system + state.n_aux))
        elif tag == "aux":
            _, pair, aux_j, gate = action
            rho = apply_gate(rho, gate, (*pair, state.aux_index(aux_j)))
        else:
            raise ValueError(f"unknown action {tag!r}")
    return FullState(rho, state.n_system, state.n_aux)


def step(
    state: FullState,
    spec: CircuitSpec,
    t: int,
    streams: RealizationStreams,
    probe: Optional[ProbeCallback] = None,
) -> FullState:
    """One circuit layer at step ``t`` with freshly sampled randomness."""
    plan = layer_plan(spec, t, streams.auxiliaries if spec.randomize_exposed else None)
    return apply_layer_actions(state, sample_layer_actions(spec, plan, streams), probe)


def reduced_system_state(state: FullState) -> np.ndarray:
    """Marginal on the system register, in system order 0..n_system-1."""
    if state.n_aux == 0:
        return state.rho
    return partial_trace(state.rho, range(state.n_system))


@dataclass
class CircuitRun:
    """Per-realization driver: owns the streams and, in same-layer mode,
    the frozen layer sampled at t = 1."""

    spec: CircuitSpec
    streams: RealizationStreams
    _fixed_actions: Optional[LayerActions] = field(default=None, repr=False)

    def initial_state(self, recipe: str = "pair_product", **kw) -> FullState:
        return initial_full_state(self.spec, self.streams, recipe, **kw)

    def step(self, state: FullState, t: int, probe: Optional[ProbeCallback] = None) -> FullState:
        if self.spec.same_layer_mode:
            if self._fixed_actions is None:
                plan = layer_plan(self.spec, 1)
                self._fixed_actions = sample_layer_actions(self.spec, plan, self.streams)
            return apply_layer_actions(state, self._fixed_actions, probe)
        return step(state, self.spec, t, self.streams, probe)
