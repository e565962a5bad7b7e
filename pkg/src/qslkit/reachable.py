"""Which states can actually reach a target Bloch angle.

Unitary evolution never changes the Bloch length, so whether theta is
attainable depends only on the initial coherences and the spectrum's gap
arithmetic. The workhorse identity is the residual

    (1/|r|^2) sum_{j>k} (1 - cos g_jk t) (r_sym^2 + r_anti^2) - (1 - cos theta)

which vanishes exactly when the angle theta is met at time t. At
theta = pi every gap carrying weight must hit an odd multiple of pi
simultaneously, which is why the analysis below reduces to odd/odd
rationality of gap ratios and to the single-pair family S0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import (
    BlochState,
    _as_bloch,
    antisym_index,
    bloch_from_density,
    physicality_check,
    sym_index,
)
from .errors import DomainError, UndefinedAngleError, ValidationError
from .spectrum import Spectrum, classify_structure, odd_odd_ratio

__all__ = [
    "S0Descriptor",
    "PiReachReport",
    "s_residual",
    "sample_s0",
    "random_s0",
    "pi_reach_report",
    "two_level_hit_time",
]


def _as_bloch_vector(state: BlochState | np.ndarray) -> tuple[int, np.ndarray]:
    if isinstance(state, BlochState):
        return state.dim, state.r
    arr = np.asarray(state)
    if arr.ndim == 2:
        bs = bloch_from_density(np.asarray(state, dtype=complex))
        return bs.dim, bs.r
    bs = _as_bloch(arr)
    return bs.dim, bs.r


def s_residual(
    state: BlochState | np.ndarray, sp: Spectrum, theta: float, t: float
) -> float:
    """Membership residual for the reachable set at (theta, t).

    Zero means the evolved Bloch angle equals theta at time t; the sign
    tells which side the trajectory is on (negative: angle still short
    of theta).
    """
    dim, r = _as_bloch_vector(state)
    if dim != sp.dim:
        raise ValidationError("state and spectrum dimensions differ")
    norm2 = float(r @ r)
    if norm2 == 0.0:
        raise UndefinedAngleError("residual undefined for a zero Bloch vector")
    e = sp.energies
    acc = 0.0
    for j in range(1, dim):
        for k in range(j):
            w = r[sym_index(j, k)] ** 2 + r[antisym_index(j, k)] ** 2
            acc += (1.0 - math.cos((e[j] - e[k]) * t)) * w
    return acc / norm2 - (1.0 - math.cos(theta))


@dataclass(frozen=True)
class S0Descriptor:
    """One member of the single-coherence family: uniform diagonals 1/N
    plus a lone off-diagonal pair (j, k) of magnitude m and given phase."""

    dim: int
    j: int
    k: int
    m: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValidationError(f"dim must be >= 2, got {self.dim}")
        if not (1 <= self.j <= self.dim - 1 and 0 <= self.k < self.j):
            raise ValidationError(
                f"pair ({self.j}, {self.k}) invalid for dim {self.dim}"
            )
        if not 0.0 < self.m <= 1.0 / self.dim:
            raise ValidationError(
                f"magnitude must lie in (0, 1/{self.dim}], got {self.m}"
            )
        object.__setattr__(self, "phase", float(self.phase) % (2.0 * math.pi))

    def density(self) -> np.ndarray:
        rho = np.eye(self.dim, dtype=complex) / self.dim
        z = self.m * np.exp(-1j * self.phase)
        rho[self.k, self.j] = z
        rho[self.j, self.k] = np.conj(z)
        return rho


def sample_s0(desc: S0Descriptor) -> BlochState:
    """Bloch vector of the descriptor's state. Exactly two components are
    nonzero, the symmetric/antisymmetric pair of (j, k)."""
    n = desc.dim
    r = np.zeros(n * n - 1)
    amp = 2.0 * math.sqrt(n / (2.0 * (n - 1.0))) * desc.m
    r[sym_index(desc.j, desc.k)] = amp * math.cos(desc.phase)
    r[antisym_index(desc.j, desc.k)] = amp * math.sin(desc.phase)
    state = BlochState(n, r)
    if not physicality_check(state):
        raise ValidationError("constructed state failed the positivity check")
    return state


def random_s0(rng: np.random.Generator, dim: int) -> S0Descriptor:
    """Draw a descriptor: pair uniform over the N(N-1)/2 choices, magnitude
    uniform on (0, 1/N], phase uniform on [0, 2pi)."""
    pairs = [(j, k) for j in range(1, dim) for k in range(j)]
    j, k = pairs[int(rng.integers(len(pairs)))]
    m = (1.0 - float(rng.uniform())) / dim
    phase = float(rng.uniform(0.0, 2.0 * math.pi))
    return S0Descriptor(dim, j, k, m, phase)


@dataclass(frozen=True)
class PiReachReport:
    """Structure of the set reachable at theta = pi for one spectrum."""

    s_equals_s0: bool
    compatible_gap_groups: list[list[tuple[int, int]]]
    min_reach_time: float
    symmetric: bool = False
    mirrored_families: list[tuple[tuple[int, int], tuple[int, int]]] = field(
        default_factory=list
    )


def _maximal_cliques(vertices: list[int], adj: dict[int, set[int]]):
    out: list[set[int]] = []

    def extend(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(r)
            return
        for v in sorted(p):
            extend(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    extend(set(), set(vertices), set())
    return out


def pi_reach_report(
    sp: Spectrum, max_den: int = 999, tol: float = 1e-9
) -> PiReachReport:
    """Analyze which level pairs can jointly meet the theta = pi condition.

    A set of gaps is jointly solvable when some t puts every one of them
    at an odd multiple of pi, i.e. when all pairwise ratios are ratios
    of odd integers. The maximal such sets (size two or more) come out
    of a clique enumeration over the pairwise odd/odd relation; when no
    two distinct gaps are related at all, the reachable set collapses to
    the single-coherence family and s_equals_s0 is true.
    """
    structure = classify_structure(sp, max_den=max_den, tol=tol)
    n = sp.dim
    e = sp.energies
    pairs = []
    gaps = []
    for j in range(1, n):
        for k in range(j):
            g = e[j] - e[k]
            if g > tol * sp.width:
                pairs.append((j, k))
                gaps.append(g)
    adj: dict[int, set[int]] = {i: set() for i in range(len(pairs))}
    for a in range(len(pairs)):
        for b in range(a + 1, len(pairs)):
            if odd_odd_ratio(gaps[a], gaps[b], max_den=max_den, tol=tol):
                adj[a].add(b)
                adj[b].add(a)
    groups = [
        sorted(pairs[i] for i in clique)
        for clique in _maximal_cliques(list(range(len(pairs))), adj)
        if len(clique) >= 2
    ]
    groups.sort()
    mirrored: list[tuple[tuple[int, int], tuple[int, int]]] = []
    if structure.symmetric:
        seen = set()
        for j, k in pairs:
            partner = (n - 1 - k, n - 1 - j)
            if partner == (j, k) or (j, k) in seen:
                continue
            seen.add(partner)
            mirrored.append(((j, k), partner))
    return PiReachReport(
        s_equals_s0=structure.odd_ratio_condition,
        compatible_gap_groups=groups,
        min_reach_time=math.pi / sp.width,
        symmetric=structure.symmetric,
        mirrored_families=mirrored,
    )


def two_level_hit_time(
    alpha: float, eta: float, theta: float, e0: float, e1: float
) -> float | None:
    """Closed-form qubit hit time.

    The polar angle alpha of the Bloch vector (measured from the excited
    axis) fixes reachability: targets theta are met only for alpha in
    [theta/2, pi - theta/2], and then at

        t = (2 / (e1 - e0)) * arcsin(sin(theta/2) / sin(alpha)),

    independent of the length eta. Outside that window returns None.
    """
    if not 0.0 < eta <= 1.0:
        raise ValidationError(f"eta must lie in (0, 1], got {eta}")
    if not 0.0 <= alpha <= math.pi:
        raise ValidationError(f"alpha must lie in [0, pi], got {alpha}")
    if not 0.0 < theta <= math.pi + 1e-12:
        raise DomainError(f"target angle must lie in (0, pi], got {theta}")
    if e1 <= e0:
        raise ValidationError("need e1 > e0 for a two-level spectrum")
    half = 0.5 * theta
    if alpha < half - 1e-12 or alpha > math.pi - half + 1e-12:
        return None
    ratio = min(1.0, math.sin(half) / math.sin(alpha))
    return 2.0 * math.asin(ratio) / (e1 - e0)
