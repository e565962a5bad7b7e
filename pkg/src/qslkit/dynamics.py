"""Time evolution in the energy eigenbasis.

Unitary dynamics is a pure phase rotation of the off-diagonal entries,
so hit times against a target Bloch angle reduce to scanning a smooth
almost-periodic scalar. Damped dynamics follows the bosonic-ladder
master equation

    d rho/dt = -i[H, rho] + g0 (nbar+1) D[a] rho + g0 nbar D[a+] rho

with a|k> = sqrt(k)|k-1> on the truncated ladder. lindblad_evolve
integrates it with fixed-step RK4; LadderPropagator solves it exactly by
splitting the Liouvillian into coherence-offset sectors and
diagonalizing each small block once, which is what makes the Monte
Carlo reach scans affordable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .bloch import BlochState, bloch_from_density, density_from_bloch, su_generators
from .errors import (
    DomainError,
    IntegrationError,
    UndefinedAngleError,
    ValidationError,
)
from .spectrum import Spectrum

__all__ = [
    "NoiseParams",
    "nbar_planck",
    "Trajectory",
    "unitary_evolve",
    "first_hit_time",
    "lindblad_evolve",
    "LadderPropagator",
    "noisy_reach",
]

_TRACE_GUARD = 1e-6
# Hits are certified in cos space, where double precision carries ~1e-13
# of slack after summing the oscillating terms. Away from theta = pi the
# induced angular error is slack/sin(theta), far below the default tol;
# exactly at pi (a tangent contact) it widens to sqrt(2*slack) ~ 1e-6.5,
# which is the fundamental resolution of cosines near -1.
_COS_SLACK = 1e-13


@dataclass(frozen=True)
class NoiseParams:
    """Damping rate and thermal occupation for the ladder channel."""

    gamma0: float
    nbar: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma0 < 0.0:
            raise ValidationError(f"gamma0 must be >= 0, got {self.gamma0}")
        if self.nbar < 0.0:
            raise ValidationError(f"nbar must be >= 0, got {self.nbar}")


def nbar_planck(omega0: float, kbt: float) -> float:
    """Thermal occupation 1/(exp(omega0/kbt) - 1), with hbar = 1.

    kbt = 0 returns 0 exactly.
    """
    if omega0 <= 0.0:
        raise ValidationError(f"omega0 must be positive, got {omega0}")
    if kbt < 0.0:
        raise ValidationError(f"kbt must be >= 0, got {kbt}")
    if kbt == 0.0:
        return 0.0
    return 1.0 / math.expm1(omega0 / kbt)


@dataclass(frozen=True)
class Trajectory:
    """Sampled evolution: times, Bloch angle from the initial state, and
    optionally the density matrices themselves."""

    times: np.ndarray
    angles: np.ndarray
    states: np.ndarray | None = None


def _as_density(state: BlochState | np.ndarray) -> np.ndarray:
    arr = np.asarray(state.r if isinstance(state, BlochState) else state)
    if arr.ndim == 2:
        rho = np.array(state, dtype=complex)
        if abs(np.trace(rho) - 1.0) > 1e-8:
            raise ValidationError("density matrix must have unit trace")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
            raise ValidationError("density matrix must be Hermitian")
        return rho
    return density_from_bloch(state)


def _check_times(times: np.ndarray) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValidationError("times must be a non-empty 1-d array")
    if t[0] != 0.0:
        raise ValidationError("trajectories start at t = 0")
    if np.any(np.diff(t) < 0.0):
        raise ValidationError("times must be non-decreasing")
    return t


def _bloch_raw(rho: np.ndarray, gens: np.ndarray, scale: float) -> np.ndarray:
    return scale * np.einsum("ijk,kj->i", gens, rho).real


def _angles_about(r0: np.ndarray, rs: np.ndarray) -> np.ndarray:
    # rs has shape (T, n^2-1); angle is nan wherever the vector vanishes
    n0 = np.linalg.norm(r0)
    if n0 == 0.0:
        raise UndefinedAngleError("initial state has zero Bloch vector")
    norms = np.linalg.norm(rs, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = (rs @ r0) / (norms * n0)
    out = np.arccos(np.clip(c, -1.0, 1.0))
    out[norms == 0.0] = np.nan
    return out


def unitary_evolve(
    state: BlochState | np.ndarray,
    sp: Spectrum,
    times: np.ndarray,
    keep_states: bool = True,
) -> Trajectory:
    """Rotate the coherences: rho_jk(t) = rho_jk(0) exp(-i (E_j - E_k) t)."""
    rho0 = _as_density(state)
    t = _check_times(times)
    if rho0.shape[0] != sp.dim:
        raise ValidationError("state and spectrum dimensions differ")
    omega = np.subtract.outer(sp.energies, sp.energies)
    phases = np.exp(-1j * t[:, None, None] * omega[None, :, :])
    states = rho0[None, :, :] * phases
    gens = su_generators(sp.dim)
    scale = math.sqrt(sp.dim / (2.0 * (sp.dim - 1.0)))
    r0 = _bloch_raw(rho0, gens, scale)
    rs = scale * np.einsum("ijk,tkj->ti", gens, states).real
    angles = _angles_about(r0, rs)
    return Trajectory(t, angles, states if keep_states else None)


def _default_scan(sp: Spectrum) -> tuple[float, float]:
    gaps = np.diff(np.sort(sp.energies))
    pos = gaps[gaps > 0]
    all_gaps = sp.e_max - sp.e_min
    step = (2.0 * math.pi / all_gaps) / 400.0
    horizon = 50.0 * 2.0 * math.pi / float(pos.min())
    return step, horizon


class _CosineTrack:
    """cos(theta(t)) for unitary evolution of one state, evaluated from
    the phase-rotated density matrix (no closed-form shortcuts)."""

    def __init__(self, rho0: np.ndarray, sp: Spectrum):
        n = rho0.shape[0]
        gens = su_generators(n)
        scale = math.sqrt(n / (2.0 * (n - 1.0)))
        r0 = _bloch_raw(rho0, gens, scale)
        norm2 = float(r0 @ r0)
        if norm2 == 0.0:
            raise UndefinedAngleError("initial state has zero Bloch vector")
        overlap = np.tensordot(r0, gens, axes=(0, 0))  # sum_i r0_i g_i
        w = (rho0 * overlap.T).ravel() * (scale / norm2)
        omega = np.subtract.outer(sp.energies, sp.energies).ravel()
        keep = np.abs(w) > 0.0
        self._w = w[keep]
        self._omega = omega[keep]
        osc = np.abs(self._omega) > 0.0
        # exact bounds: the oscillating weights are real and nonnegative
        self._floor = float(
            np.sum(self._w[~osc]).real - np.sum(np.abs(self._w[osc]))
        )
        self._curvature = float(
            np.sum(np.abs(self._w[osc]) * self._omega[osc] ** 2)
        )

    def floor(self) -> float:
        return self._floor

    def curvature(self) -> float:
        return self._curvature

    def __call__(self, t):
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        vals = (np.exp(-1j * np.outer(ts, self._omega)) @ self._w).real
        return float(vals[0]) if np.isscalar(t) else vals

    def deriv(self, t: float) -> float:
        val = np.sum(-1j * self._omega * self._w * np.exp(-1j * self._omega * t))
        return float(val.real)


def first_hit_time(
    state: BlochState | np.ndarray,
    sp: Spectrum,
    theta: float,
    horizon: float | None = None,
    tol: float = 1e-9,
    scan_step: float | None = None,
) -> float | None:
    """Earliest t in (0, horizon] where the Bloch angle reaches theta - tol.

    Scans cos(theta(t)) on a grid fine enough to bound the between-sample
    sag, refines transversal crossings with brentq, and chases
    near-tangent local minima with a bounded minimizer so grazing hits
    (the theta = pi solutions live exactly on tangencies) are not lost.
    Returns None when the angle never gets there.
    """
    if not 0.0 < theta <= np.pi + 1e-12:
        raise DomainError(f"target angle must lie in (0, pi], got {theta}")
    if not 0.0 < tol < theta:
        raise DomainError("tol must satisfy 0 < tol < theta")
    rho0 = _as_density(state)
    if rho0.shape[0] != sp.dim:
        raise ValidationError("state and spectrum dimensions differ")
    track = _CosineTrack(rho0, sp)
    step0, hor0 = _default_scan(sp)
    step = step0 if scan_step is None else float(scan_step)
    hor = hor0 if horizon is None else float(horizon)
    if step <= 0.0 or hor <= 0.0:
        raise ValidationError("scan step and horizon must be positive")
    c_target = math.cos(theta - tol)
    if track.floor() > c_target + _COS_SLACK:
        return None  # angle provably never reaches the target
    margin = 0.5 * track.curvature() * (0.5 * step) ** 2

    def f(t: float) -> float:
        return track(t) - c_target

    def refine_min(lo: float, hi: float) -> float | None:
        res = minimize_scalar(
            track, bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        t_star = float(res.x)
        if res.fun <= c_target:
            if f(lo) <= 0.0:
                return lo
            if f(t_star) >= 0.0:
                return t_star
            return float(brentq(f, lo, t_star, xtol=1e-12))
        if res.fun <= c_target + _COS_SLACK:
            # grazing contact: polish the tangency on the derivative,
            # whose zero is far better conditioned than the flat minimum
            a = max(lo, t_star - step)
            b = min(hi, t_star + step)
            if track.deriv(a) < 0.0 < track.deriv(b):
                return float(brentq(track.deriv, a, b, xtol=1e-12))
            return t_star
        return None

    chunk = 8192
    n_total = int(math.ceil(hor / step)) + 1
    prev_t: float | None = None
    prev_c: float | None = None
    prev2_t: float | None = None
    prev2_c: float | None = None
    start = 0
    while start < n_total:
        idx = np.arange(start, min(start + chunk, n_total))
        ts = idx * step
        ts[-1] = min(ts[-1], hor)
        cs = track(ts)
        carry = 0
        if prev_t is not None:
            if prev2_t is not None:
                ts = np.concatenate(([prev2_t, prev_t], ts))
                cs = np.concatenate(([prev2_c, prev_c], cs))
                carry = 2
            else:
                ts = np.concatenate(([prev_t], ts))
                cs = np.concatenate(([prev_c], cs))
                carry = 1
        below = np.flatnonzero(cs[carry:] <= c_target) + carry
        i_cross = int(below[0]) if below.size else None
        interior = np.flatnonzero(
            (cs[1:-1] <= c_target + margin)
            & (cs[1:-1] < cs[:-2])
            & (cs[1:-1] <= cs[2:])
        ) + 1
        for i in interior:
            if i_cross is not None and i >= i_cross:
                break
            hit = refine_min(ts[i - 1], ts[i + 1])
            if hit is not None and hit > 0.0:
                return hit
        if i_cross is not None:
            lo = ts[i_cross - 1] if i_cross > 0 else 0.0
            hi = ts[i_cross]
            if f(hi) >= 0.0:
                return float(hi)
            return float(brentq(f, lo, hi, xtol=1e-12))
        prev2_t, prev2_c = float(ts[-2]), float(cs[-2])
        prev_t, prev_c = float(ts[-1]), float(cs[-1])
        start = int(idx[-1]) + 1
    return None


def _lowering(n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=complex)
    for k in range(1, n):
        a[k - 1, k] = math.sqrt(k)
    return a


def _make_rhs(sp: Spectrum, noise: NoiseParams):
    h = sp.energies.astype(float)
    a = _lowering(sp.dim)
    adag = a.conj().T
    down = noise.gamma0 * (noise.nbar + 1.0)
    up = noise.gamma0 * noise.nbar
    ada = adag @ a
    aad = a @ adag

    def rhs(rho: np.ndarray) -> np.ndarray:
        out = -1j * (h[:, None] - h[None, :]) * rho
        if down != 0.0:
            out += down * (a @ rho @ adag - 0.5 * (ada @ rho + rho @ ada))
        if up != 0.0:
            out += up * (adag @ rho @ a - 0.5 * (aad @ rho + rho @ aad))
        return out

    return rhs


def lindblad_evolve(
    state: BlochState | np.ndarray,
    sp: Spectrum,
    noise: NoiseParams,
    times: np.ndarray,
    step: float = 1e-3,
    keep_states: bool = True,
) -> Trajectory:
    """Fixed-step RK4 integration of the ladder master equation.

    Each step re-symmetrizes rho; the trace is never renormalized, and a
    drift beyond 1e-6 raises IntegrationError.
    """
    rho = _as_density(state)
    t = _check_times(times)
    if rho.shape[0] != sp.dim:
        raise ValidationError("state and spectrum dimensions differ")
    if step <= 0.0:
        raise ValidationError(f"step must be positive, got {step}")
    rhs = _make_rhs(sp, noise)
    gens = su_generators(sp.dim)
    scale = math.sqrt(sp.dim / (2.0 * (sp.dim - 1.0)))
    r0 = _bloch_raw(rho, gens, scale)
    out = np.empty((t.size, sp.dim, sp.dim), dtype=complex)
    out[0] = rho
    for i in range(1, t.size):
        span = t[i] - t[i - 1]
        nsub = max(1, int(math.ceil(span / step - 1e-12)))
        h = span / nsub
        for _ in range(nsub):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * h * k1)
            k3 = rhs(rho + 0.5 * h * k2)
            k4 = rhs(rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - 1.0)
        if drift > _TRACE_GUARD:
            raise IntegrationError(
                f"trace drifted by {drift:.3e} at t = {t[i]:.6g}"
            )
        out[i] = rho
    rs = scale * np.einsum("ijk,tkj->ti", gens, out).real
    angles = _angles_about(r0, rs)
    return Trajectory(t, angles, out if keep_states else None)


class LadderPropagator:
    """Exact propagator for the ladder master equation.

    The Liouvillian maps rho_jk only onto entries with the same offset
    j - k, so it splits into one (N-m) x (N-m) block per offset m. Each
    block comes from applying the same right-hand side used by
    lindblad_evolve to the matrix units of its sector and is
    diagonalized once; states are then evaluated on arbitrary time grids
    by broadcasting. Exponentials per (sector, chunk) and the diagonal
    trajectory per initial population vector are cached so that scans of
    many states over one grid stay cheap.
    """

    def __init__(self, sp: Spectrum, noise: NoiseParams):
        self.sp = sp
        self.noise = noise
        n = sp.dim
        rhs = _make_rhs(sp, noise)
        self._blocks: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        for m in range(n):
            dim = n - m
            block = np.zeros((dim, dim), dtype=complex)
            for k in range(dim):
                unit = np.zeros((n, n), dtype=complex)
                unit[k + m, k] = 1.0
                image = rhs(unit)
                block[:, k] = image[np.arange(dim) + m, np.arange(dim)]
            vals, vecs = np.linalg.eig(block)
            vinv = np.linalg.inv(vecs)
            if not np.allclose(vecs @ np.diag(vals) @ vinv, block,
                               atol=1e-10 * max(1.0, np.abs(block).max())):
                raise IntegrationError(
                    f"sector {m} Liouvillian is too ill-conditioned to "
                    "diagonalize"
                )
            self._blocks.append((vals, vecs, vinv))
        gens = su_generators(n)
        self._scale = math.sqrt(n / (2.0 * (n - 1.0)))
        diag_rows = [gens[l * l - 2].diagonal().real for l in range(2, n + 1)]
        self._diag_map = np.array(diag_rows)  # (n-1, n)
        self._grid: np.ndarray | None = None
        self._chunks: list[np.ndarray] = []
        self._exp_cache: dict[tuple[int, int], np.ndarray] = {}
        self._pop_cache: dict[tuple[bytes, int], tuple[np.ndarray, np.ndarray]] = {}

    # -- grid management ------------------------------------------------

    def bind_grid(self, times: np.ndarray, chunk: int = 8192) -> None:
        """Fix the scan grid so exponentials can be cached across states."""
        t = np.asarray(times, dtype=float)
        self._grid = t
        self._chunks = [t[i: i + chunk] for i in range(0, t.size, chunk)]
        self._exp_cache = {}
        self._pop_cache = {}

    def _exps(self, m: int, ci: int) -> np.ndarray:
        key = (m, ci)
        cached = self._exp_cache.get(key)
        if cached is None:
            vals = self._blocks[m][0]
            cached = np.exp(np.outer(vals, self._chunks[ci]))
            self._exp_cache[key] = cached
        return cached

    def _sector_traj(self, m: int, z0: np.ndarray, ci: int) -> np.ndarray:
        vals, vecs, vinv = self._blocks[m]
        coeff = vinv @ z0
        return vecs @ (coeff[:, None] * self._exps(m, ci))

    def _diag_traj(self, pops: np.ndarray, ci: int) -> tuple[np.ndarray, np.ndarray]:
        key = (np.round(pops, 14).tobytes(), ci)
        cached = self._pop_cache.get(key)
        if cached is None:
            p = self._sector_traj(0, pops.astype(complex), ci).real
            r_diag = self._scale * (self._diag_map @ p)  # (n-1, T)
            cached = (r_diag, np.sum(r_diag * r_diag, axis=0))
            self._pop_cache[key] = cached
        return cached

    # -- public evaluation ----------------------------------------------

    def states(self, state: BlochState | np.ndarray, times: np.ndarray) -> np.ndarray:
        """Density matrices on an arbitrary grid, shape (T, N, N)."""
        rho0 = _as_density(state)
        n = self.sp.dim
        t = np.asarray(times, dtype=float)
        out = np.zeros((t.size, n, n), dtype=complex)
        saved = (self._grid, self._chunks, self._exp_cache, self._pop_cache)
        try:
            self.bind_grid(t, chunk=t.size or 1)
            for m in range(n):
                z0 = np.array([rho0[k + m, k] for k in range(n - m)])
                if m > 0 and not np.any(z0):
                    continue
                traj = self._sector_traj(m, z0, 0)
                for k in range(n - m):
                    out[:, k + m, k] = traj[k]
                    if m > 0:
                        out[:, k, k + m] = np.conj(traj[k])
        finally:
            self._grid, self._chunks, self._exp_cache, self._pop_cache = saved
        return out

    def angle_chunks(self, state: BlochState | np.ndarray):
        """Yield (times, cos_theta) per chunk of the bound grid."""
        if self._grid is None:
            raise ValidationError("bind_grid must be called first")
        rho0 = _as_density(state)
        n = self.sp.dim
        gens = su_generators(n)
        r0 = _bloch_raw(rho0, gens, self._scale)
        norm0 = float(np.linalg.norm(r0))
        if norm0 == 0.0:
            raise UndefinedAngleError("initial state has zero Bloch vector")
        r0_diag = self._scale * (self._diag_map @ np.diag(rho0).real)
        pops = np.diag(rho0).real
        occupied = [
            (m, np.array([rho0[k + m, k] for k in range(n - m)]))
            for m in range(1, n)
        ]
        occupied = [(m, z0) for m, z0 in occupied if np.any(z0)]
        four_s2 = 4.0 * self._scale**2
        for ci, ts in enumerate(self._chunks):
            r_diag, diag_norm2 = self._diag_traj(pops, ci)
            num = r0_diag @ r_diag
            norm2 = diag_norm2.copy()
            for m, z0 in occupied:
                traj = self._sector_traj(m, z0, ci)
                num += four_s2 * np.real(z0.conj() @ traj)
                norm2 += four_s2 * np.sum(np.abs(traj) ** 2, axis=0)
            with np.errstate(invalid="ignore", divide="ignore"):
                cos_t = num / (norm0 * np.sqrt(norm2))
            yield ts, cos_t


def noisy_reach(
    state: BlochState | np.ndarray,
    sp: Spectrum,
    noise: NoiseParams,
    theta: float,
    tol: float = 0.02,
    horizon: float | None = None,
    scan_step: float | None = None,
    propagator: LadderPropagator | None = None,
) -> bool:
    """True when the damped trajectory's Bloch angle reaches theta - tol
    anywhere on the scan grid.

    This is a plain grid scan (no root polishing): the tolerance absorbs
    the sag between samples. Pass a propagator with a bound grid to
    amortize the spectral work across many states.
    """
    if not 0.0 < theta <= np.pi + 1e-12:
        raise DomainError(f"target angle must lie in (0, pi], got {theta}")
    if tol <= 0.0:
        raise DomainError("tol must be positive for a grid-only scan")
    prop = propagator
    if prop is None:
        prop = LadderPropagator(sp, noise)
    if prop._grid is None:
        step0, hor0 = _default_scan(sp)
        step = step0 if scan_step is None else float(scan_step)
        hor = hor0 if horizon is None else float(horizon)
        grid = np.arange(0.0, hor + 0.5 * step, step)
        prop.bind_grid(grid)
    c_target = math.cos(theta - tol)
    for _, cos_t in prop.angle_chunks(state):
        finite = cos_t[np.isfinite(cos_t)]
        if finite.size and np.min(finite) <= c_target:
            return True
    return False
