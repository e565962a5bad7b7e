"""Grid and Monte Carlo experiments.

Every runner takes a frozen config and returns an ExperimentResult:
named summary scalars plus the tables behind them. Randomized runs
derive an independent RNG per sample from (seed, sample index), so the
output is byte-identical no matter how many workers share the loop, and
rerunning a config reproduces the files exactly.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .bounds import tau_bd_from_scalars
from .dynamics import LadderPropagator, NoiseParams, _default_scan, noisy_reach
from .errors import ValidationError
from .oat import OatParams, oat_profiles, oat_tau
from .output import Table
from .reachable import random_s0, sample_s0
from .spectrum import Spectrum
from .threelevel import (
    XYPoint,
    hit_time_els3,
    h_min,
    regime_membership,
    tau_circle_max,
)

__all__ = [
    "SummaryStats",
    "ExperimentResult",
    "OatGridConfig",
    "run_oat_grid",
    "NoiseScanConfig",
    "run_noise_scan",
    "BdTestConfig",
    "run_bd_test",
    "XYScanConfig",
    "run_xy_scan",
    "HMinConfig",
    "run_h_min_table",
]


@dataclass(frozen=True)
class SummaryStats:
    """Named scalar results; keys ending in 'fraction' must be in [0, 1]."""

    values: dict[str, float]

    def __post_init__(self) -> None:
        for key, val in self.values.items():
            if key.endswith("fraction") and not math.isnan(val):
                if not 0.0 <= val <= 1.0:
                    raise ValidationError(
                        f"summary value {key} = {val} is not a fraction"
                    )

    def __getitem__(self, key: str) -> float:
        return self.values[key]


@dataclass(frozen=True)
class ExperimentResult:
    stats: SummaryStats
    tables: dict[str, Table]


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    size = (n + parts - 1) // parts
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


# -- one-axis twisting grid ----------------------------------------------


@dataclass(frozen=True)
class OatGridConfig:
    n: int = 10
    chi: float = 1.0
    theta: float = math.pi / 2
    delta_over_chi_max: float = 20.0
    fraction_grid: int = 801
    table_grid: int = 201
    curve_delta_max: float = 25.0
    curve_points: int = 501
    profile_deltas: tuple[float, ...] = (0.0, 1.0, 5.0, 10.0)
    phi_points: int = 181


def _round_half_away_vec(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0.0, np.floor(x + 0.5), np.ceil(x - 0.5))


def _oat_grid_arrays(
    n: int, chi: float, theta: float, phis: np.ndarray, deltas: np.ndarray
):
    cos_p = np.cos(phis)[:, None]
    sin2_p = np.sin(phis)[:, None] ** 2
    d = deltas[None, :]
    mean = 0.25 * (2.0 * d * n * cos_p + chi * n * n * cos_p**2 + chi * n * sin2_p)
    e_max = 0.25 * (chi * n * n + 2.0 * np.abs(d) * n)
    r = _round_half_away_vec(d / (2.0 * chi))
    inner = np.abs(d) / chi <= n
    e_min = np.where(
        inner, chi * r * r - d * r, 0.25 * (chi * n * n - 2.0 * np.abs(d) * n)
    )
    width = e_max - e_min
    prod = (e_max - mean) * (mean - e_min)
    with np.errstate(divide="ignore", invalid="ignore"):
        tau_bd = np.where(prod > 0.0, theta / (2.0 * np.sqrt(np.abs(prod))), np.inf)
    tau = theta / width
    with np.errstate(invalid="ignore"):
        ratio = (tau_bd - tau) / tau
    return tau_bd, np.broadcast_to(tau, tau_bd.shape), ratio


def run_oat_grid(cfg: OatGridConfig) -> ExperimentResult:
    """Speedup curve, mean-energy profiles, and the validity-gap grid
    with its area fractions for the twisting spectrum."""
    p0 = OatParams(cfg.n, cfg.chi, 0.0)
    curve_rows = []
    for delta in np.linspace(0.0, cfg.curve_delta_max, cfg.curve_points):
        tau = oat_tau(OatParams(cfg.n, cfg.chi, float(delta)), cfg.theta)
        curve_rows.append((float(delta), tau))
    curve = Table("oqsl_curve", ("delta", "tau"), curve_rows)

    phis_profile = np.linspace(0.0, math.pi, cfg.phi_points)
    profile_rows = []
    for delta in cfg.profile_deltas:
        block = oat_profiles(OatParams(cfg.n, cfg.chi, delta), cfg.theta, phis_profile)
        for phi, tau_bd, tau, ratio in block:
            profile_rows.append((delta, float(phi), float(tau_bd), float(tau), float(ratio)))
    profiles = Table(
        "profiles", ("delta", "phi", "tau_bd", "tau", "ratio"), profile_rows
    )

    dmax = cfg.delta_over_chi_max * cfg.chi
    phis_f = np.linspace(0.0, math.pi, cfg.fraction_grid)
    deltas_f = np.linspace(-dmax, dmax, cfg.fraction_grid)
    _, _, ratio_f = _oat_grid_arrays(cfg.n, cfg.chi, cfg.theta, phis_f, deltas_f)
    lt1 = float(np.mean(ratio_f < 0.01))
    band = float(np.mean((ratio_f >= 0.01) & (ratio_f < 0.10)))
    lt10 = float(np.mean(ratio_f < 0.10))

    phis_t = np.linspace(0.0, math.pi, cfg.table_grid)
    deltas_t = np.linspace(-dmax, dmax, cfg.table_grid)
    tau_bd_t, tau_t, ratio_t = _oat_grid_arrays(
        cfg.n, cfg.chi, cfg.theta, phis_t, deltas_t
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        log_gap = np.log10(tau_bd_t - tau_t)
    grid_rows = []
    for i, phi in enumerate(phis_t):
        for j, delta in enumerate(deltas_t):
            grid_rows.append(
                (
                    float(phi),
                    float(delta),
                    float(tau_bd_t[i, j]),
                    float(ratio_t[i, j]),
                    float(log_gap[i, j]),
                )
            )
    grid = Table(
        "ratio_grid", ("phi", "delta", "tau_bd", "ratio", "log10_gap"), grid_rows
    )

    finite = ratio_f[np.isfinite(ratio_f)]
    stats = SummaryStats(
        {
            "r_lt_1pct_fraction": lt1,
            "r_band_1_to_10pct_fraction": band,
            "r_lt_10pct_fraction": lt10,
            "min_ratio": float(finite.min()),
            "tau_delta0": oat_tau(p0, cfg.theta),
        }
    )
    return ExperimentResult(
        stats, {"oqsl_curve": curve, "profiles": profiles, "ratio_grid": grid}
    )


# -- damped reach counts --------------------------------------------------


@dataclass(frozen=True)
class NoiseScanConfig:
    spectrum: tuple[float, ...] = (1.0, 2.1, 4.5, 8.3, 11.0)
    nbar: float = 1.0
    # spaced to resolve the decay knee; 0 and 0.1 anchor the endpoints
    gamma_grid: tuple[float, ...] = (
        0.0, 0.001, 0.002, 0.004, 0.007, 0.012, 0.02, 0.1,
    )
    n_states: int = 300
    theta: float = math.pi
    tol_theta: float = 0.02
    seed: int = 7
    horizon: float | None = None
    scan_step: float | None = None
    workers: int = 1


def _noise_states(cfg: NoiseScanConfig, dim: int):
    out = []
    for i in range(cfg.n_states):
        rng = np.random.default_rng([cfg.seed, i])
        out.append(sample_s0(random_s0(rng, dim)))
    return out


def _noise_count(args: tuple[NoiseScanConfig, float]) -> tuple[float, int]:
    cfg, gamma = args
    sp = Spectrum(cfg.spectrum)
    noise = NoiseParams(gamma0=gamma, nbar=cfg.nbar)
    prop = LadderPropagator(sp, noise)
    step0, hor0 = _default_scan(sp)
    step = step0 if cfg.scan_step is None else cfg.scan_step
    hor = hor0 if cfg.horizon is None else cfg.horizon
    prop.bind_grid(np.arange(0.0, hor + 0.5 * step, step))
    count = 0
    for state in _noise_states(cfg, sp.dim):
        if noisy_reach(
            state, sp, noise, cfg.theta, tol=cfg.tol_theta, propagator=prop
        ):
            count += 1
    return gamma, count


def run_noise_scan(cfg: NoiseScanConfig) -> ExperimentResult:
    """Count how many random single-coherence states still reach the
    target under damping, per damping rate."""
    jobs = [(cfg, float(g)) for g in cfg.gamma_grid]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            done = dict(ex.map(_noise_count, jobs))
    else:
        done = dict(map(_noise_count, jobs))
    rows = []
    counts = []
    for g in cfg.gamma_grid:
        c = done[float(g)]
        counts.append(c)
        rows.append((float(g), c, cfg.n_states, c / cfg.n_states))
    table = Table("reach_counts", ("gamma0", "reached", "total", "fraction"), rows)
    rho = spearmanr(np.asarray(cfg.gamma_grid), np.asarray(counts)).statistic
    stats = SummaryStats(
        {
            "spearman_rho": float(rho),
            "zero_gamma_fraction": counts[0] / cfg.n_states,
            "max_gamma_fraction": counts[-1] / cfg.n_states,
        }
    )
    return ExperimentResult(stats, {"reach_counts": table})


# -- hit time vs bound over random spectra --------------------------------


@dataclass(frozen=True)
class BdTestConfig:
    n_pairs: int = 20000
    dim: int = 5
    theta: float = math.pi
    seed: int = 11
    min_gap: float = 1e-3
    mode: str = "uniform"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("uniform", "symmetric"):
            raise ValidationError(f"unknown spectrum mode {self.mode!r}")
        if self.dim < 2:
            raise ValidationError("dim must be >= 2")


def _draw_energies(rng: np.random.Generator, cfg: BdTestConfig) -> np.ndarray:
    while True:
        e = np.sort(rng.uniform(0.0, 1.0, cfg.dim))
        if cfg.mode == "symmetric":
            e = 0.5 * (e + (e[0] + e[-1]) - e[::-1])
        if np.diff(e).min() >= cfg.min_gap:
            return e


def _bd_rows(args: tuple[BdTestConfig, int, int]) -> list[tuple]:
    cfg, lo, hi = args
    rows = []
    for i in range(lo, hi):
        rng = np.random.default_rng([cfg.seed, i])
        e = _draw_energies(rng, cfg)
        desc = random_s0(rng, cfg.dim)
        gap = float(e[desc.j] - e[desc.k])
        reached = gap > 0.0
        t_hit = cfg.theta / gap if reached else math.nan
        mean = float(e.mean())
        bound = tau_bd_from_scalars(mean, float(e[0]), float(e[-1]), cfg.theta)
        rows.append(
            (i, *map(float, e), desc.j, desc.k, desc.m, desc.phase,
             reached, t_hit, bound, t_hit - bound)
        )
    return rows


def run_bd_test(cfg: BdTestConfig) -> ExperimentResult:
    """Sample (spectrum, single-coherence state) pairs and compare the
    closed-form hit time against the Bhatia-Davis bound."""
    chunks = [(cfg, lo, hi) for lo, hi in _split(cfg.n_pairs, cfg.workers * 4)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            parts = list(ex.map(_bd_rows, chunks))
    else:
        parts = [_bd_rows(c) for c in chunks]
    rows = [row for part in parts for row in part]
    header = (
        "index",
        *(f"e{i}" for i in range(cfg.dim)),
        "j", "k", "m", "phase", "reached", "t_hit", "tau_bd", "diff",
    )
    table = Table("bd_test", header, rows)
    diffs = table.column("diff")
    stats = SummaryStats(
        {
            "positive_fraction": float(np.mean(diffs > 1e-12)),
            "nonnegative_fraction": float(np.mean(diffs > -1e-12)),
            "equality_fraction": float(np.mean(np.abs(diffs) <= 1e-12)),
            "unreached_fraction": float(np.mean(table.column("reached") == 0.0)),
            "mean_diff": float(np.mean(diffs)),
        }
    )
    return ExperimentResult(stats, {"bd_test": table})


# -- three-level validity scatter -----------------------------------------


@dataclass(frozen=True)
class XYScanConfig:
    norm2: float = 1.0
    theta: float = math.pi / 3
    gap: float = 1.0
    n_states: int = 10000
    seed: int = 3
    workers: int = 1


def _tangent_bound(p: XYPoint, theta: float, gap: float) -> float:
    arg = 1.0 - 4.0 * p.residual2 / 3.0
    if arg <= 1e-15:
        return math.inf
    return theta / (2.0 * gap * math.sqrt(arg))


def _xy_rows(args: tuple[XYScanConfig, int, int]) -> list[tuple]:
    cfg, lo, hi = args
    rows = []
    for i in range(lo, hi):
        rng = np.random.default_rng([cfg.seed, i])
        a, b = rng.uniform(size=2)
        if a + b > 1.0:
            a, b = 1.0 - a, 1.0 - b
        p = XYPoint(cfg.norm2 * a, cfg.norm2 * b, cfg.norm2)
        verdict = regime_membership(p, cfg.theta)
        t = hit_time_els3(p, cfg.theta, cfg.gap)
        tau_m = tau_circle_max(p, cfg.theta, cfg.gap)
        violation = (
            verdict.in_S and t is not None and t < tau_m - 1e-12
        )
        rows.append(
            (
                p.x, p.y, verdict.region, t,
                _tangent_bound(p, cfg.theta, cfg.gap), tau_m,
                verdict.in_S, verdict.bd_valid, violation,
            )
        )
    return rows


def run_xy_scan(cfg: XYScanConfig) -> ExperimentResult:
    """Scatter the coherence triangle and label each point by whether its
    closed-form hit time under-runs the worst-case bound."""
    chunks = [(cfg, lo, hi) for lo, hi in _split(cfg.n_states, cfg.workers * 4)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            parts = list(ex.map(_xy_rows, chunks))
    else:
        parts = [_xy_rows(c) for c in chunks]
    rows = [row for part in parts for row in part]
    table = Table(
        "xy_scan",
        ("x", "y", "verdict", "t", "tau_bd", "tau_m", "in_s", "bd_valid",
         "violation"),
        rows,
    )
    in_s = table.column("in_s") == 1.0
    valid = table.column("bd_valid") == 1.0
    violation = table.column("violation") == 1.0
    stats = SummaryStats(
        {
            "in_s_fraction": float(np.mean(in_s)),
            "violation_fraction": float(np.mean(violation)),
            "violation_count": float(np.sum(violation)),
            "violations_in_valid_region": float(np.sum(violation & valid)),
        }
    )
    return ExperimentResult(stats, {"xy_scan": table})


# -- h-function minima -----------------------------------------------------


@dataclass(frozen=True)
class HMinConfig:
    theta_min: float = 0.05
    theta_max: float = math.pi
    theta_points: int = 64


def run_h_min_table(cfg: HMinConfig) -> ExperimentResult:
    """Tabulate the certified minima of both h branches over the target
    grid; the global minimum staying at or above one is the bound's
    certificate."""
    rows = []
    for theta in np.linspace(cfg.theta_min, cfg.theta_max, cfg.theta_points):
        res = h_min(float(theta))
        rows.append(
            (res.theta, res.h1_min, res.h1_argmin, res.h2_min,
             res.h2_argmin, res.min_value)
        )
    table = Table(
        "h_min",
        ("theta", "h1_min", "h1_argmin", "h2_min", "h2_argmin", "min_value"),
        rows,
    )
    minima = table.column("min_value")
    stats = SummaryStats(
        {
            "global_min": float(minima.min()),
            "argmin_theta": float(rows[int(np.argmin(minima))][0]),
        }
    )
    return ExperimentResult(stats, {"h_min": table})
