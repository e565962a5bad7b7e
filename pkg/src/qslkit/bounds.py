"""Speed limit bounds built from energy statistics.

The central object is the variance-free bound

    tau_bd = Theta / (2 sqrt((E_max - <H>)(<H> - E_min)))

which dominates the operational limit Theta/(E_max - E_min) for every
physical state and collapses to it exactly when the mean energy sits at
the midpoint of the spectrum. For qubits the full menagerie of
state-dependent bounds has closed forms and is collected by
two_level_bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import BlochState, bloch_from_density, density_from_bloch, two_level_state
from .errors import DomainError, InconsistentStatsError, ValidationError
from .spectrum import Spectrum, oqsl

__all__ = [
    "EnergyStats",
    "energy_stats",
    "tau_bd",
    "tau_bd_from_scalars",
    "bures_angle",
    "BoundReport",
    "bound_report",
    "two_level_bounds",
]

_EQUALITY_TOL = 1e-9


@dataclass(frozen=True)
class EnergyStats:
    """Mean and standard deviation of H in a state, plus the extremes."""

    mean: float
    std: float
    e_min: float
    e_max: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.e_min + self.e_max)

    @property
    def width(self) -> float:
        return self.e_max - self.e_min


def energy_stats(state: BlochState | np.ndarray, sp: Spectrum) -> EnergyStats:
    """Energy statistics of a state under a diagonal Hamiltonian.

    Only the populations enter, so the state may be a BlochState, a
    Bloch vector, or a density matrix in the energy eigenbasis.
    """
    arr = np.asarray(state.r if isinstance(state, BlochState) else state)
    if arr.ndim == 2:
        p = np.diag(np.asarray(state, dtype=complex)).real
    else:
        p = np.diag(density_from_bloch(state)).real
    if p.size != sp.dim:
        raise ValidationError(
            f"state dimension {p.size} does not match spectrum dimension {sp.dim}"
        )
    e = sp.energies
    mean = float(p @ e)
    var = float(p @ (e * e)) - mean * mean
    return EnergyStats(
        mean=mean,
        std=math.sqrt(max(var, 0.0)),
        e_min=sp.e_min,
        e_max=sp.e_max,
    )


def tau_bd(stats: EnergyStats, theta: float, tol: float = 1e-9) -> float:
    """The bound above. Returns math.inf when the mean sits at an extreme.

    A mean outside [E_min, E_max] by more than tol * width is rejected:
    no state produces it, so the statistics are inconsistent.
    """
    if not 0.0 < theta <= np.pi + 1e-12:
        raise DomainError(f"target angle must lie in (0, pi], got {theta}")
    slack = tol * stats.width
    if stats.mean < stats.e_min - slack or stats.mean > stats.e_max + slack:
        raise InconsistentStatsError(
            f"mean {stats.mean} outside [{stats.e_min}, {stats.e_max}]"
        )
    mean = min(max(stats.mean, stats.e_min), stats.e_max)
    prod = (stats.e_max - mean) * (mean - stats.e_min)
    if prod <= 0.0:
        return math.inf
    return float(theta) / (2.0 * math.sqrt(prod))


def tau_bd_from_scalars(
    mean: float, e_min: float, e_max: float, theta: float, tol: float = 1e-9
) -> float:
    """Same bound from the mean alone, for callers that never build stats."""
    return tau_bd(EnergyStats(mean=mean, std=0.0, e_min=e_min, e_max=e_max),
                  theta, tol)


def bures_angle(eta: float, theta: float) -> float:
    """Bures angle a qubit of purity parameter eta traverses for a Bloch
    angle theta.

    Equals theta/2 for pure states and shrinks with eta; this is the
    target that the fidelity-based bounds below measure progress against.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"eta must lie in [0, 1], got {eta}")
    arg = 1.0 - 0.5 * eta * eta * (1.0 - math.cos(theta))
    return math.acos(math.sqrt(max(arg, 0.0)))


@dataclass(frozen=True)
class BoundReport:
    """Every bound the package can evaluate for one (state, spectrum, theta).

    Fields that need qubit closed forms (tau_f, tau_c, tau_m) are None
    for dimensions above 2. mt and ml are the orthogonalization-time
    bounds pi/(2 dH) and pi/(2 <H>); ml is None unless <H> > 0.
    """

    theta: float
    tau_oqsl: float
    tau_bd: float
    equality_attained: bool
    mean: float
    std: float
    mt: float
    ml: float | None
    tau_f: float | None = None
    tau_c: float | None = None
    tau_m: float | None = None


def _ml_terms(a: float, mean: float) -> float | None:
    # Margolus-Levitin-type term, defined only above the zero of energy
    if mean <= 0.0:
        return None
    return 2.0 * a * a / (math.pi * mean)


def bound_report(
    state: BlochState | np.ndarray, sp: Spectrum, theta: float
) -> BoundReport:
    """Evaluate the bound suite for an arbitrary state.

    For qubits the state is converted to (eta, alpha) and the full
    closed-form family is included.
    """
    stats = energy_stats(state, sp)
    if sp.dim == 2:
        if isinstance(state, BlochState):
            r = state.r
        elif np.asarray(state).ndim == 2:
            r = bloch_from_density(np.asarray(state, dtype=complex)).r
        else:
            r = np.asarray(state, dtype=float)
        eta = float(np.linalg.norm(r))
        if eta == 0.0:
            alpha = math.pi / 2.0
        else:
            alpha = math.acos(np.clip(-r[2] / eta, -1.0, 1.0))
        return two_level_bounds(sp.e_min, sp.e_max, eta, alpha, theta)
    t_bd = tau_bd(stats, theta)
    return BoundReport(
        theta=float(theta),
        tau_oqsl=oqsl(sp, theta),
        tau_bd=t_bd,
        equality_attained=abs(stats.mean - stats.midpoint)
        <= _EQUALITY_TOL * stats.width,
        mean=stats.mean,
        std=stats.std,
        mt=math.inf if stats.std == 0.0 else math.pi / (2.0 * stats.std),
        ml=None if stats.mean <= 0.0 else math.pi / (2.0 * stats.mean),
    )


def two_level_bounds(
    e0: float, e1: float, eta: float, alpha: float, theta: float
) -> BoundReport:
    """Closed-form bound suite for a qubit.

    The state has Bloch length eta at angle alpha from the excited
    state |E_1>; see two_level_state for the axis convention. tau_f is
    the fidelity-rate bound 2A/((E_1 - E_0) eta sin(alpha)), infinite at
    the poles where the state never moves. tau_c combines the
    Bures-angle analogues of the orthogonalization bounds, and tau_m is
    the tightest combination available at this dimension.
    """
    if e1 <= e0:
        raise ValidationError("need e1 > e0")
    if not 0.0 < theta <= np.pi + 1e-12:
        raise DomainError(f"target angle must lie in (0, pi], got {theta}")
    gap = e1 - e0
    sp = Spectrum(np.array([e0, e1], dtype=float))
    stats = energy_stats(two_level_state(eta, alpha), sp)
    t_bd = tau_bd(stats, theta)
    a = bures_angle(eta, theta)
    sin_a = math.sin(alpha)
    if eta * sin_a == 0.0:
        t_f: float = math.inf
    else:
        t_f = 2.0 * a / (gap * eta * sin_a)
    t_mt_a = math.inf if stats.std == 0.0 else a / stats.std
    ml_a = _ml_terms(a, stats.mean)
    t_c = t_mt_a if ml_a is None else max(t_mt_a, ml_a)
    t_m = max(t_bd, t_f) if ml_a is None else max(t_bd, t_f, ml_a)
    return BoundReport(
        theta=float(theta),
        tau_oqsl=oqsl(sp, theta),
        tau_bd=t_bd,
        equality_attained=abs(stats.mean - stats.midpoint)
        <= _EQUALITY_TOL * stats.width,
        mean=stats.mean,
        std=stats.std,
        mt=math.inf if stats.std == 0.0 else math.pi / (2.0 * stats.std),
        ml=None if stats.mean <= 0.0 else math.pi / (2.0 * stats.mean),
        tau_f=t_f,
        tau_c=t_c,
        tau_m=t_m,
    )
