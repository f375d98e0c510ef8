import numpy as np
import pytest

from orqc.sampling import StreamKey


@pytest.fixture
def rng():
    return StreamKey(1234, 0, "gates").rng()


def rng_for(seed: int, realization: int = 0, label: str = "gates") -> np.random.Generator:
    return StreamKey(seed, realization, label).rng()


def bell_state() -> np.ndarray:
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    return np.outer(psi, psi.conj())


def ghz_state(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return np.outer(psi, psi.conj())
