import numpy as np


def rho_random(rng: np.random.Generator, n: int) -> np.ndarray:
    """Ginibre-induced random density matrix."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def spectrum_random(rng: np.random.Generator, n: int, min_gap: float = 1e-3):
    """Sorted uniform energies with a floor on adjacent gaps."""
    while True:
        e = np.sort(rng.uniform(0.0, 1.0, n))
        if np.diff(e).min() >= min_gap:
            return e
