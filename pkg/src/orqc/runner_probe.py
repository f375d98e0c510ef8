"""Cut definitions for the three-qubit (qubit 0, qubit 1, auxiliary) probe."""

from __future__ import annotations

import numpy as np

from .entanglement import log_negativity
from .linalg import partial_trace

# Names follow the 1-based labels of the probed registers: system qubits
# "1", "2" and the auxiliary "a".
PROBE_SERIES = ("cut_1_2a", "cut_2_1a", "cut_a_12", "pair_1_2", "pair_1_a", "pair_2_a")


def probe_cuts(sigma: np.ndarray, log_base: float = 2.0) -> tuple[float, ...]:
    """Log-negativity of all three bipartitions and all pairwise cuts of a
    three-qubit state ordered (qubit 1, qubit 2, a)."""
    if sigma.shape != (8, 8):
        raise ValueError("probe expects a three-qubit state")
    return (
        log_negativity(sigma, [0], log_base=log_base),
        log_negativity(sigma, [1], log_base=log_base),
        log_negativity(sigma, [2], log_base=log_base),
        log_negativity(partial_trace(sigma, [0, 1]), [0], log_base=log_base),
        log_negativity(partial_trace(sigma, [0, 2]), [0], log_base=log_base),
        log_negativity(partial_trace(sigma, [1, 2]), [0], log_base=log_base),
    )
