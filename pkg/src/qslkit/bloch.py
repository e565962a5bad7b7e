"""Bloch vectors for N-level systems and the su(N) generator basis.

The generator ordering is fixed once and used everywhere: for each pair
of levels j > k the symmetric generator sits at index j^2 + 2k - 1 and
the antisymmetric one at j^2 + 2k (0-based), and the diagonal generator
built from the first l levels sits at l^2 - 2. For N = 2 this reduces to
(sigma_x, sigma_y, sigma_z); for N = 3 it is the Gell-Mann basis in its
usual order. All generators are traceless and normalized to
Tr(g_i g_j) = 2 delta_ij.

A state maps to its Bloch vector through

    rho = (1/N) (I + sqrt(N(N-1)/2) r . g),    r_i = sqrt(N/(2(N-1))) Tr(rho g_i)

so pure states have |r| = 1 for every N.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidDimensionError, UndefinedAngleError, ValidationError

__all__ = [
    "BlochState",
    "su_generators",
    "sym_index",
    "antisym_index",
    "diag_index",
    "density_from_bloch",
    "bloch_from_density",
    "physicality_check",
    "target_angle",
    "two_level_state",
]


def sym_index(j: int, k: int) -> int:
    """Index of the symmetric generator for the level pair j > k."""
    if not 0 <= k < j:
        raise ValidationError(f"need j > k >= 0, got ({j}, {k})")
    return j * j + 2 * k - 1


def antisym_index(j: int, k: int) -> int:
    """Index of the antisymmetric generator for the level pair j > k."""
    if not 0 <= k < j:
        raise ValidationError(f"need j > k >= 0, got ({j}, {k})")
    return j * j + 2 * k


def diag_index(l: int) -> int:
    """Index of the diagonal generator acting on the first l levels, l >= 2."""
    if l < 2:
        raise ValidationError(f"diagonal generators start at l = 2, got {l}")
    return l * l - 2


@lru_cache(maxsize=16)
def _generators(n: int) -> np.ndarray:
    g = np.zeros((n * n - 1, n, n), dtype=complex)
    for j in range(1, n):
        for k in range(j):
            g[sym_index(j, k), k, j] = 1.0
            g[sym_index(j, k), j, k] = 1.0
            g[antisym_index(j, k), k, j] = -1.0j
            g[antisym_index(j, k), j, k] = 1.0j
    for l in range(2, n + 1):
        d = np.zeros(n)
        d[: l - 1] = 1.0
        d[l - 1] = 1.0 - l
        g[diag_index(l)] = np.sqrt(2.0 / (l * (l - 1))) * np.diag(d)
    g.setflags(write=False)
    return g


def su_generators(n: int) -> np.ndarray:
    """Return the n^2 - 1 generators as a read-only (n^2-1, n, n) array."""
    if n < 2:
        raise InvalidDimensionError(f"need dimension >= 2, got {n}")
    return _generators(int(n))


def _bloch_scale(n: int) -> float:
    # sqrt(N/(2(N-1))), the factor turning Tr(rho g_i) into r_i
    return np.sqrt(n / (2.0 * (n - 1.0)))


@dataclass(frozen=True)
class BlochState:
    """An N-level state in Bloch coordinates.

    Attributes
    ----------
    dim : int
        Hilbert space dimension N, at least 2.
    r : numpy.ndarray
        Real Bloch vector of length N^2 - 1 in the package ordering.
    """

    dim: int
    r: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise InvalidDimensionError(f"need dimension >= 2, got {self.dim}")
        r = np.asarray(self.r, dtype=float)
        if r.shape != (self.dim * self.dim - 1,):
            raise ValidationError(
                f"Bloch vector for dim {self.dim} must have length "
                f"{self.dim * self.dim - 1}, got shape {r.shape}"
            )
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.r))

    @property
    def purity(self) -> float:
        n = self.dim
        return 1.0 / n + (n - 1.0) * float(self.r @ self.r) / n


def _as_bloch(state: BlochState | np.ndarray) -> BlochState:
    if isinstance(state, BlochState):
        return state
    r = np.asarray(state, dtype=float)
    if r.ndim != 1:
        raise ValidationError("expected a BlochState or a 1-d Bloch vector")
    n = int(round(np.sqrt(r.size + 1)))
    if n * n - 1 != r.size or n < 2:
        raise InvalidDimensionError(
            f"length {r.size} is not of the form N^2 - 1 for N >= 2"
        )
    return BlochState(n, r)


def density_from_bloch(state: BlochState | np.ndarray) -> np.ndarray:
    """Build the density matrix for a Bloch vector.

    Accepts a BlochState or a plain length N^2 - 1 array. No positivity
    check is performed here; use physicality_check for that.
    """
    st = _as_bloch(state)
    n = st.dim
    g = su_generators(n)
    rho = np.tensordot(st.r, g, axes=(0, 0))
    rho *= np.sqrt(n * (n - 1.0) / 2.0)
    rho += np.eye(n)
    rho /= n
    return rho


def bloch_from_density(rho: np.ndarray, *, tol: float = 1e-8) -> BlochState:
    """Invert density_from_bloch.

    The input must be Hermitian with unit trace (checked to tol).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    n = rho.shape[0]
    if n < 2:
        raise InvalidDimensionError(f"need dimension >= 2, got {n}")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValidationError(f"trace is {np.trace(rho)}, expected 1")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValidationError("density matrix is not Hermitian")
    g = su_generators(n)
    r = _bloch_scale(n) * np.einsum("ijk,kj->i", g, rho).real
    return BlochState(n, r)


def physicality_check(state: BlochState | np.ndarray, tol: float = 1e-10) -> bool:
    """True when the state is positive semidefinite within tol.

    Accepts a BlochState, a Bloch vector, or a density matrix (2-d array).
    """
    arr = state.r if isinstance(state, BlochState) else np.asarray(state)
    if arr.ndim == 2:
        rho = np.asarray(state, dtype=complex)
        if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
            return False
    else:
        rho = density_from_bloch(state)
    w = np.linalg.eigvalsh(rho)
    return bool(w[0] >= -tol)


def target_angle(a: BlochState | np.ndarray, b: BlochState | np.ndarray) -> float:
    """Angle between two Bloch vectors, clamped into [0, pi].

    Raises UndefinedAngleError when either vector has zero length (the
    maximally mixed state has no direction).
    """
    ra = a.r if isinstance(a, BlochState) else np.asarray(a, dtype=float)
    rb = b.r if isinstance(b, BlochState) else np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(ra), np.linalg.norm(rb)
    if na == 0.0 or nb == 0.0:
        raise UndefinedAngleError("target angle undefined for |r| = 0")
    c = float(ra @ rb) / (na * nb)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def two_level_state(eta: float, alpha: float, phi: float = 0.0) -> BlochState:
    """Qubit state of length eta at polar angle alpha from the upper level.

    alpha is measured from the excited eigenstate |E_1>, the convention
    used when quoting two-level hit times and bounds. The generator basis
    puts |E_0> on the +z axis, so the mapping is r_z = -eta cos(alpha).
    phi is the azimuth around the energy axis; nothing downstream depends
    on it.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"eta must lie in [0, 1], got {eta}")
    if not 0.0 <= alpha <= np.pi:
        raise ValidationError(f"alpha must lie in [0, pi], got {alpha}")
    r = np.array(
        [
            eta * np.sin(alpha) * np.cos(phi),
            eta * np.sin(alpha) * np.sin(phi),
            -eta * np.cos(alpha),
        ]
    )
    return BlochState(2, r)
