"""Closed forms for equally spaced three-level systems.

With gap D the evolved-angle condition collapses onto two scalars built
from the coherences: x (the weight on the double-gap pair) and y (the
combined weight on the two single-gap pairs). Everything here is
geometry in the (x, y) triangle: reachability blocks, the quadratic f+-
hit-time solution, the worst-case Bhatia-Davis time over the diagonal
circle r2^2 + r7^2 = |r|^2 - x - y, and the h functions whose minima
certify the bound on the validity blocks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from .bloch import BlochState, antisym_index, diag_index, physicality_check, sym_index
from .errors import DomainError, ValidationError

__all__ = [
    "XYPoint",
    "RegimeVerdict",
    "xy_of_state",
    "regime_membership",
    "hit_time_els3",
    "tau_circle_max",
    "bd_validity",
    "h_pair",
    "HMinResult",
    "h_min",
    "extremal_diag_xy",
    "sample_state_xy",
]

_EDGE = 1e-12

_IX = sym_index(2, 0)       # 3
_IX_A = antisym_index(2, 0)  # 4
_IY = (sym_index(1, 0), antisym_index(1, 0), sym_index(2, 1), antisym_index(2, 1))
_IR2 = diag_index(2)        # 2
_IR7 = diag_index(3)        # 7


@dataclass(frozen=True)
class XYPoint:
    """Coherence weights of a three-level state: x on the (2,0) pair,
    y on the (1,0) and (2,1) pairs, norm2 the squared Bloch length."""

    x: float
    y: float
    norm2: float

    def __post_init__(self) -> None:
        if self.x < -_EDGE or self.y < -_EDGE:
            raise ValidationError("x and y must be nonnegative")
        if self.norm2 <= 0.0:
            raise ValidationError("norm2 must be positive")
        object.__setattr__(self, "x", max(0.0, float(self.x)))
        object.__setattr__(self, "y", max(0.0, float(self.y)))
        if self.x + self.y > self.norm2 + 1e-9:
            raise ValidationError(
                f"x + y = {self.x + self.y} exceeds norm2 = {self.norm2}"
            )

    @property
    def residual2(self) -> float:
        """Diagonal budget |r|^2 - x - y left for (r2, r7)."""
        return max(0.0, self.norm2 - self.x - self.y)


@dataclass(frozen=True)
class RegimeVerdict:
    in_S: bool
    region: Literal["A", "B", "none"]
    bd_valid: bool


def xy_of_state(state: BlochState) -> XYPoint:
    if state.dim != 3:
        raise ValidationError("xy coordinates are defined for dim 3 only")
    r = state.r
    x = float(r[_IX] ** 2 + r[_IX_A] ** 2)
    y = float(sum(r[i] ** 2 for i in _IY))
    return XYPoint(x, y, float(r @ r))


def _check_theta(theta: float) -> None:
    if not 0.0 < theta <= math.pi + 1e-12:
        raise DomainError(f"target angle must lie in (0, pi], got {theta}")


def _blocks(p: XYPoint, theta: float) -> tuple[bool, bool]:
    x, y, n2 = p.x, p.y, p.norm2
    s_half = math.sin(0.5 * theta)
    lower = 4.0 * math.sqrt(n2) * s_half * math.sqrt(x) - 4.0 * x
    cap = n2 - x
    in_a = (y >= lower - _EDGE) and (y <= 4.0 * x + _EDGE) and (y <= cap + _EDGE)
    in_b = (
        (y >= lower - _EDGE)
        and (y >= 4.0 * x - _EDGE)
        and (y >= n2 * s_half**2 - _EDGE)
        and (y <= cap + _EDGE)
    )
    return in_a, in_b


def regime_membership(p: XYPoint, theta: float) -> RegimeVerdict:
    """Locate the point among the two reachability blocks.

    Region A is the x-dominant block (y <= 4x), B the y-dominant one;
    the origin carries no oscillating weight and is never in S. The
    bd_valid field anticipates the validity test, which only sharpens A
    with the borderline inequality (the comparison is gap-free).
    """
    _check_theta(theta)
    if p.x <= _EDGE and p.y <= _EDGE:
        return RegimeVerdict(in_S=False, region="none", bd_valid=False)
    in_a, in_b = _blocks(p, theta)
    if not (in_a or in_b):
        return RegimeVerdict(in_S=False, region="none", bd_valid=False)
    region: Literal["A", "B"] = "A" if in_a else "B"
    return RegimeVerdict(in_S=True, region=region, bd_valid=bd_validity(p, theta, 1.0))


def hit_time_els3(p: XYPoint, theta: float, gap: float) -> float | None:
    """First time the Bloch angle reaches theta, from the quadratic in
    cos(gap * t). None when the point is outside the reachable set."""
    _check_theta(theta)
    if gap <= 0.0:
        raise ValidationError(f"gap must be positive, got {gap}")
    x, y = p.x, p.y
    target = p.norm2 * math.sin(0.5 * theta) ** 2
    if x <= _EDGE:
        if y <= _EDGE:
            return None
        u = 1.0 - 2.0 * target / y
        if u < -1.0 - 1e-9:
            return None
        return math.acos(max(-1.0, min(1.0, u))) / gap
    disc = (4.0 * x + y) ** 2 - 16.0 * x * target
    if disc < 0.0:
        if disc < -1e-12 * max(1.0, (4.0 * x + y) ** 2):
            return None
        disc = 0.0
    root = math.sqrt(disc)
    for f in ((-y + root) / (4.0 * x), (-y - root) / (4.0 * x)):
        if -1.0 - 1e-9 <= f <= 1.0 + 1e-9:
            return math.acos(max(-1.0, min(1.0, f))) / gap
    return None


def extremal_diag_xy(p: XYPoint) -> tuple[float, float]:
    """(r2, r7) maximizing r2/sqrt(3) + r7 on the circle of the leftover
    diagonal budget, honoring the r7 <= 1/2 positivity corner."""
    c = p.residual2
    if c <= 1.0 / 3.0:
        rc = math.sqrt(c)
        return 0.5 * rc, 0.5 * math.sqrt(3.0) * rc
    return math.sqrt(max(0.0, c - 0.25)), 0.5


def tau_circle_max(p: XYPoint, theta: float, gap: float) -> float:
    """Largest Bhatia-Davis time over all diagonal completions of the
    point: tangent contact while the optimum keeps r7 < 1/2, the corner
    value afterwards. Infinite when the circle touches the unit bound."""
    _check_theta(theta)
    if gap <= 0.0:
        raise ValidationError(f"gap must be positive, got {gap}")
    if p.norm2 > 1.0 + 1e-12:
        raise ValidationError(f"norm2 must not exceed 1, got {p.norm2}")
    c = p.residual2
    if c <= 1.0 / 3.0:
        arg = 1.0 - 4.0 * c / 3.0
    else:
        inner = (c - 0.25) / 3.0
        if inner < -1e-12:
            raise DomainError("inner square root argument is negative")
        s = 0.5 + math.sqrt(max(0.0, inner))
        arg = 1.0 - s * s
    if arg <= 1e-15:
        return math.inf
    return theta / (2.0 * gap * math.sqrt(arg))


def bd_validity(p: XYPoint, theta: float, gap: float) -> bool:
    """Whether the point sits in one of the two certified-validity blocks.

    The y-dominant block is unconditional; the x-dominant one must also
    keep the oscillation budget at the worst-case time below the target,
    x sin^2(D tau_m) + y sin^2(D tau_m / 2) <= |r|^2 sin^2(theta/2).
    """
    _check_theta(theta)
    in_a, in_b = _blocks(p, theta)
    if in_b:
        return True
    if not in_a:
        return False
    tau_m = tau_circle_max(p, theta, gap)
    if not math.isfinite(tau_m):
        return False
    phase = gap * tau_m
    load = p.x * math.sin(phase) ** 2 + p.y * math.sin(0.5 * phase) ** 2
    return load <= p.norm2 * math.sin(0.5 * theta) ** 2 + _EDGE


def h_pair(c: float, theta: float) -> tuple[float, float]:
    """The two branch functions whose positivity certifies the borderline
    check; nan outside each branch's domain ([0, 3/4) and [1/3, 3/4))."""
    _check_theta(theta)
    gain = (1.0 - math.cos(theta)) / (1.0 - c) if c < 1.0 else math.nan
    if -1e-15 <= c < 0.75:
        h1 = math.cos(0.5 * theta / math.sqrt(1.0 - 4.0 * c / 3.0)) + gain
    else:
        h1 = math.nan
    if 1.0 / 3.0 - 1e-15 <= c < 0.75:
        q = 0.5 + math.sqrt(max(0.0, (c - 0.25) / 3.0))
        h2 = math.cos(0.5 * theta / math.sqrt(1.0 - q * q)) + gain
    else:
        h2 = math.nan
    return h1, h2


@dataclass(frozen=True)
class HMinResult:
    theta: float
    h1_min: float
    h1_argmin: float
    h2_min: float
    h2_argmin: float
    min_value: float


def _min_on(fun, lo: float, hi: float) -> tuple[float, float]:
    grid = np.linspace(lo, hi, 2001)
    vals = np.array([fun(c) for c in grid])
    i = int(np.argmin(vals))
    a = grid[max(0, i - 1)]
    b = grid[min(grid.size - 1, i + 1)]
    if a == b:
        return float(grid[i]), float(vals[i])
    res = minimize_scalar(fun, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12})
    if res.fun <= vals[i]:
        return float(res.x), float(res.fun)
    return float(grid[i]), float(vals[i])


def h_min(theta: float) -> HMinResult:
    """Minimize each branch over the range where it is the operative
    worst-case formula: the tangent branch on [0, 1/3], the corner
    branch on [1/3, 3/4)."""
    _check_theta(theta)
    c1, v1 = _min_on(lambda c: h_pair(c, theta)[0], 0.0, 1.0 / 3.0)
    c2, v2 = _min_on(lambda c: h_pair(c, theta)[1], 1.0 / 3.0, 0.75 - 1e-9)
    return HMinResult(
        theta=theta,
        h1_min=v1,
        h1_argmin=c1,
        h2_min=v2,
        h2_argmin=c2,
        min_value=min(v1, v2),
    )


def sample_state_xy(
    rng: np.random.Generator,
    p: XYPoint,
    on_circle: bool = False,
    max_tries: int = 2000,
) -> BlochState:
    """Random physical state with the given coherence weights.

    The (2,0) pair sits on a circle of radius sqrt(x), the four
    single-gap components on a 3-sphere of radius sqrt(y), and (r2, r7)
    uniformly inside (or, with on_circle, exactly on) the leftover disk.
    Rejection keeps only positive semidefinite results.
    """
    budget = math.sqrt(p.residual2)
    for _ in range(max_tries):
        r = np.zeros(8)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        r[_IX] = math.sqrt(p.x) * math.cos(phi)
        r[_IX_A] = math.sqrt(p.x) * math.sin(phi)
        g = rng.normal(size=4)
        norm = np.linalg.norm(g)
        if norm > 0.0:
            g *= math.sqrt(p.y) / norm
        for idx, val in zip(_IY, g):
            r[idx] = val
        psi = rng.uniform(0.0, 2.0 * math.pi)
        rad = budget if on_circle else budget * math.sqrt(rng.uniform())
        r[_IR2] = rad * math.cos(psi)
        r[_IR7] = rad * math.sin(psi)
        state = BlochState(3, r)
        if physicality_check(state):
            return state
    raise ValidationError(
        f"no physical state found at (x={p.x}, y={p.y}, norm2={p.norm2})"
    )
