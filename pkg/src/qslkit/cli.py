"""Command line front end.

Every subcommand writes its result tables as delimited files (CSV by
default, JSON with --out json), a *_summary.json when there are summary
statistics, and a quick-look PNG per table unless --no-plot is given.
A JSON payload also goes to stdout so the tool composes with shell
pipelines. Exit status: 0 on success, 2 when inputs fail validation,
3 when an integrator gives up.

Global flags (--seed, --out, --tol, --workers, --output, --no-plot) go
before the subcommand: ``qslkit --seed 3 noise scan``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .bloch import BlochState, su_generators, two_level_state
from .bounds import bound_report
from .dynamics import NoiseParams, first_hit_time, lindblad_evolve, unitary_evolve
from .errors import IntegrationError, ValidationError
from .experiments import (
    BdTestConfig,
    HMinConfig,
    NoiseScanConfig,
    XYScanConfig,
    _oat_grid_arrays,
    _tangent_bound,
    run_bd_test,
    run_h_min_table,
    run_noise_scan,
    run_xy_scan,
)
from .oat import OatParams, oat_tau
from .output import Table, _jsonable, table_payload, write_csv, write_json
from .plots import render_table
from .reachable import S0Descriptor, pi_reach_report, sample_s0
from .spectrum import oqsl, parse_spectrum
from .threelevel import (
    XYPoint,
    hit_time_els3,
    regime_membership,
    tau_circle_max,
)

__all__ = ["main", "build_parser"]

_XY_HEADER = (
    "x", "y", "verdict", "t", "tau_bd", "tau_m", "in_s", "bd_valid", "violation",
)


def _parse_floats(text: str) -> list[float]:
    text = text.strip()
    try:
        values = json.loads(text)
    except json.JSONDecodeError:
        values = [part for part in text.split(",") if part.strip()]
    if not isinstance(values, list):
        values = [values]
    try:
        return [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"cannot parse number list from {text!r}") from exc


def _parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"expected start:stop:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"expected start:stop:steps, got {text!r}") from exc
    if steps < 2:
        raise ValidationError("a range needs at least 2 steps")
    return np.linspace(lo, hi, steps)


def _add_state_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--state",
        help="Bloch vector as a JSON list (length N^2-1), inline or a file path",
    )
    parser.add_argument(
        "--s0",
        help="single-coherence state as j,k,m[,phase] in the spectrum eigenbasis",
    )
    parser.add_argument("--eta", type=float, help="qubit Bloch length (with --alpha)")
    parser.add_argument(
        "--alpha", type=float, help="qubit polar angle from the excited state"
    )
    parser.add_argument(
        "--phi", type=float, default=0.0, help="qubit azimuth (default 0)"
    )


def _state_from_args(args: argparse.Namespace, dim: int) -> BlochState:
    picked = sum(
        [args.state is not None, args.s0 is not None,
         args.eta is not None or args.alpha is not None]
    )
    if picked != 1:
        raise ValidationError(
            "give exactly one state source: --state, --s0, or --eta/--alpha"
        )
    if args.state is not None:
        text = args.state
        p = Path(text)
        if p.is_file():
            text = p.read_text(encoding="utf-8")
        try:
            vec = np.asarray(json.loads(text), dtype=float)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ValidationError(f"cannot parse --state: {exc}") from exc
        if vec.ndim != 1:
            raise ValidationError("--state expects a flat JSON list")
        n = round(math.sqrt(vec.size + 1))
        if n * n - 1 != vec.size:
            raise ValidationError(
                f"a Bloch vector has N^2-1 components, got {vec.size}"
            )
        if n != dim:
            raise ValidationError(
                f"state dimension {n} does not match spectrum dimension {dim}"
            )
        return BlochState(n, vec)
    if args.s0 is not None:
        parts = args.s0.split(",")
        if len(parts) not in (3, 4):
            raise ValidationError("--s0 expects j,k,m[,phase]")
        try:
            j, k = int(parts[0]), int(parts[1])
            m = float(parts[2])
            phase = float(parts[3]) if len(parts) == 4 else 0.0
        except ValueError as exc:
            raise ValidationError(f"cannot parse --s0: {exc}") from exc
        return sample_s0(S0Descriptor(dim, j, k, m, phase))
    if dim != 2:
        raise ValidationError(
            f"--eta/--alpha describe a qubit, spectrum has dimension {dim}"
        )
    if args.alpha is None:
        raise ValidationError("--alpha is required for a qubit state")
    eta = 1.0 if args.eta is None else args.eta
    return two_level_state(eta, args.alpha, args.phi)


def _emit(
    args: argparse.Namespace,
    key: str,
    tables: dict[str, Table],
    stats: dict | None,
) -> dict[str, str]:
    """Write tables, summary, and plots; return the file map."""
    stem = Path(args.output) if args.output else Path("qslkit_out") / key
    files: dict[str, str] = {}
    suffix = ".csv" if args.out == "csv" else ".json"
    for name, table in tables.items():
        tpath = stem.parent / f"{stem.name}_{name}{suffix}"
        if args.out == "csv":
            write_csv(tpath, table)
        else:
            write_json(tpath, table_payload(table))
        files[name] = str(tpath)
        if not args.no_plot:
            png = render_table(table, stem.parent / f"{stem.name}_{name}.png")
            files[f"{name}_png"] = str(png)
    if stats:
        spath = write_json(stem.parent / f"{stem.name}_summary.json", stats)
        files["summary"] = str(spath)
    return files


# -- subcommand bodies ------------------------------------------------------


def _cmd_generators(args: argparse.Namespace) -> dict:
    gens = su_generators(args.dim)
    rows = []
    for idx, mat in enumerate(gens):
        for (row, col), v in np.ndenumerate(mat):
            if v != 0:
                rows.append((idx, int(row), int(col), float(v.real), float(v.imag)))
    table = Table("generators", ("index", "row", "col", "re", "im"), rows)
    stats = {"dim": args.dim, "generators": len(gens)}
    files = _emit(args, "generators", {"generators": table}, stats)
    return {"stats": stats, "files": files}


def _cmd_bounds(args: argparse.Namespace) -> dict:
    sp = parse_spectrum(args.spectrum)
    state = _state_from_args(args, sp.dim)
    rep = bound_report(state, sp, args.theta)
    d = asdict(rep)
    table = Table("bounds", tuple(d.keys()), [tuple(d.values())])
    files = _emit(args, "bounds", {"bounds": table}, d)
    return {**d, "files": files}


def _cmd_oqsl(args: argparse.Namespace) -> dict:
    sp = parse_spectrum(args.spectrum)
    tau = oqsl(sp, args.theta)
    stats = {"theta": args.theta, "tau": tau}
    table = Table("oqsl", ("theta", "tau"), [(args.theta, tau)])
    files = _emit(args, "oqsl", {"oqsl": table}, stats)
    return {"stats": stats, "files": files}


def _cmd_hit_time(args: argparse.Namespace) -> dict:
    sp = parse_spectrum(args.spectrum)
    state = _state_from_args(args, sp.dim)
    tol = 1e-9 if args.tol is None else args.tol
    t = first_hit_time(
        state, sp, args.theta,
        horizon=args.horizon, tol=tol, scan_step=args.scan_step,
    )
    stats = {"theta": args.theta, "t_hit": t, "reached": t is not None}
    table = Table("hit_time", ("theta", "t_hit"), [(args.theta, t)])
    files = _emit(args, "hit_time", {"hit_time": table}, stats)
    return {"stats": stats, "files": files}


def _cmd_evolve(args: argparse.Namespace) -> dict:
    sp = parse_spectrum(args.spectrum)
    state = _state_from_args(args, sp.dim)
    if args.t_max <= 0.0:
        raise ValidationError("--t-max must be positive")
    times = np.linspace(0.0, args.t_max, args.t_steps)
    if args.gamma0 > 0.0:
        traj = lindblad_evolve(
            state, sp, NoiseParams(args.gamma0, args.nbar), times,
            step=args.step, keep_states=args.states,
        )
    else:
        traj = unitary_evolve(state, sp, times, keep_states=args.states)
    header: tuple[str, ...] = ("t", "theta")
    rows: list[tuple]
    if args.states:
        n = sp.dim
        header = header + tuple(
            f"rho_{j}_{k}_{part}"
            for j in range(n) for k in range(n) for part in ("re", "im")
        )
        rows = []
        for i, (t, ang) in enumerate(zip(traj.times, traj.angles)):
            flat = np.asarray(traj.states[i]).ravel()
            parts = [x for v in flat for x in (float(v.real), float(v.imag))]
            rows.append((float(t), float(ang), *parts))
    else:
        rows = [
            (float(t), float(ang)) for t, ang in zip(traj.times, traj.angles)
        ]
    table = Table("trajectory", header, rows)
    angles = np.asarray(traj.angles)
    stats = {
        "final_theta": float(angles[-1]),
        "max_theta": float(np.nanmax(angles)),
        "noisy": args.gamma0 > 0.0,
    }
    files = _emit(args, "evolve", {"trajectory": table}, stats)
    return {"stats": stats, "files": files}


def _cmd_reachable(args: argparse.Namespace) -> dict:
    sp = parse_spectrum(args.spectrum)
    tol = 1e-9 if args.tol is None else args.tol
    rep = pi_reach_report(sp, max_den=args.max_den, tol=tol)
    payload = {**asdict(rep), "theta": args.theta, "tau_oqsl": oqsl(sp, args.theta)}
    stem = Path(args.output) if args.output else Path("qslkit_out") / "reachable"
    rpath = write_json(stem.parent / f"{stem.name}_report.json", payload)
    return {**payload, "files": {"report": str(rpath)}}


def _cmd_oat_sweep(args: argparse.Namespace) -> dict:
    p0 = OatParams(args.n, args.chi, 0.0)
    deltas = _parse_range(args.delta_range)
    phis = np.linspace(0.0, math.pi, args.phi_steps)
    tau_bd_g, tau_g, ratio_g = _oat_grid_arrays(
        args.n, args.chi, args.theta, phis, deltas
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        log_gap = np.log10(tau_bd_g - tau_g)
    grid_rows = []
    for i, phi in enumerate(phis):
        for j, delta in enumerate(deltas):
            grid_rows.append(
                (float(phi), float(delta), float(tau_bd_g[i, j]),
                 float(ratio_g[i, j]), float(log_gap[i, j]))
            )
    grid = Table(
        "ratio_grid", ("phi", "delta", "tau_bd", "ratio", "log10_gap"), grid_rows
    )
    curve_rows = [
        (float(d), oat_tau(OatParams(args.n, args.chi, float(d)), args.theta))
        for d in deltas
    ]
    curve = Table("oqsl_curve", ("delta", "tau"), curve_rows)
    finite = ratio_g[np.isfinite(ratio_g)]
    stats = {
        "r_lt_1pct_fraction": float(np.mean(ratio_g < 0.01)),
        "r_band_1_to_10pct_fraction": float(
            np.mean((ratio_g >= 0.01) & (ratio_g < 0.10))
        ),
        "r_lt_10pct_fraction": float(np.mean(ratio_g < 0.10)),
        "min_ratio": float(finite.min()),
        "tau_delta0": oat_tau(p0, args.theta),
    }
    files = _emit(
        args, "oat_sweep", {"ratio_grid": grid, "oqsl_curve": curve}, stats
    )
    return {"stats": stats, "files": files}


def _cmd_noise_scan(args: argparse.Namespace) -> dict:
    sp = parse_spectrum(args.spectrum)
    cfg = NoiseScanConfig(
        spectrum=tuple(float(e) for e in sp.energies),
        nbar=args.nbar,
        gamma_grid=tuple(_parse_floats(args.gammas)),
        n_states=args.states,
        theta=args.theta,
        tol_theta=args.tol_theta,
        seed=7 if args.seed is None else args.seed,
        horizon=args.horizon,
        scan_step=args.scan_step,
        workers=args.workers,
    )
    res = run_noise_scan(cfg)
    files = _emit(args, "noise_scan", res.tables, res.stats.values)
    return {"stats": res.stats.values, "files": files}


def _cmd_bd_test(args: argparse.Namespace) -> dict:
    cfg = BdTestConfig(
        n_pairs=args.pairs,
        dim=args.dim,
        theta=args.theta,
        seed=11 if args.seed is None else args.seed,
        min_gap=args.min_gap,
        mode=args.mode,
        workers=args.workers,
    )
    res = run_bd_test(cfg)
    files = _emit(args, "bd_test", res.tables, res.stats.values)
    return {"stats": res.stats.values, "files": files}


def _three_level_row(p: XYPoint, theta: float, gap: float) -> tuple:
    verdict = regime_membership(p, theta)
    t = hit_time_els3(p, theta, gap)
    tau_m = tau_circle_max(p, theta, gap)
    violation = verdict.in_S and t is not None and t < tau_m - 1e-12
    return (
        p.x, p.y, verdict.region, t, _tangent_bound(p, theta, gap), tau_m,
        verdict.in_S, verdict.bd_valid, violation,
    )


def _cmd_three_level_regime(args: argparse.Namespace) -> dict:
    p = XYPoint(args.x, args.y, args.norm2)
    row = _three_level_row(p, args.theta, args.gap)
    table = Table("regime", _XY_HEADER, [row])
    stats = dict(zip(_XY_HEADER, row))
    files = _emit(args, "three_level_regime", {"regime": table}, stats)
    return {"stats": stats, "files": files}


def _cmd_three_level_validity(args: argparse.Namespace) -> dict:
    axis = np.linspace(0.0, args.norm2, args.grid)
    rows = []
    for x in axis:
        for y in axis:
            if x + y > args.norm2 + 1e-12:
                continue
            rows.append(
                _three_level_row(
                    XYPoint(float(x), float(y), args.norm2), args.theta, args.gap
                )
            )
    table = Table("validity_grid", _XY_HEADER, rows)
    in_s = table.column("in_s") == 1.0
    valid = table.column("bd_valid") == 1.0
    stats = {
        "points": len(rows),
        "in_s_fraction": float(np.mean(in_s)),
        "valid_fraction": float(np.mean(valid[in_s])) if in_s.any() else math.nan,
        "violation_count": int(np.sum(table.column("violation") == 1.0)),
    }
    files = _emit(args, "three_level_validity", {"validity_grid": table}, stats)
    return {"stats": stats, "files": files}


def _cmd_three_level_scan(args: argparse.Namespace) -> dict:
    cfg = XYScanConfig(
        norm2=args.norm2,
        theta=args.theta,
        gap=args.gap,
        n_states=args.states,
        seed=3 if args.seed is None else args.seed,
        workers=args.workers,
    )
    res = run_xy_scan(cfg)
    files = _emit(args, "three_level_scan", res.tables, res.stats.values)
    return {"stats": res.stats.values, "files": files}


def _cmd_h_min(args: argparse.Namespace) -> dict:
    cfg = HMinConfig(
        theta_min=args.theta_min,
        theta_max=args.theta_max,
        theta_points=args.points,
    )
    res = run_h_min_table(cfg)
    files = _emit(args, "h_min", res.tables, res.stats.values)
    return {"stats": res.stats.values, "files": files}


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qslkit",
        description="Energy-statistics speed limits: bounds, dynamics, "
        "reachability, and the batch experiments behind them.",
    )
    ap.add_argument("--seed", type=int, default=None, help="RNG seed for sampling")
    ap.add_argument(
        "--out", choices=("csv", "json"), default="csv",
        help="table file format (default csv)",
    )
    ap.add_argument(
        "--tol", type=float, default=None,
        help="numerical tolerance where a subcommand takes one",
    )
    ap.add_argument(
        "--workers", type=int, default=1, help="process count for experiments"
    )
    ap.add_argument(
        "--output", default=None, metavar="STEM",
        help="output path stem (default qslkit_out/<command>)",
    )
    ap.add_argument(
        "--no-plot", action="store_true", help="skip the quick-look PNGs"
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser(
        "generators", help="sparse listing of the traceless Hermitian basis"
    )
    g.add_argument("--dim", type=int, required=True)
    g.set_defaults(func=_cmd_generators)

    b = sub.add_parser("bounds", help="evaluate the bound suite for one state")
    b.add_argument("--spectrum", required=True)
    b.add_argument("--theta", type=float, required=True)
    _add_state_options(b)
    b.set_defaults(func=_cmd_bounds)

    o = sub.add_parser("oqsl", help="state-independent optimal time for a spectrum")
    o.add_argument("--spectrum", required=True)
    o.add_argument("--theta", type=float, required=True)
    o.set_defaults(func=_cmd_oqsl)

    h = sub.add_parser("hit-time", help="first time a state reaches the target angle")
    h.add_argument("--spectrum", required=True)
    h.add_argument("--theta", type=float, required=True)
    h.add_argument("--horizon", type=float, default=None)
    h.add_argument("--scan-step", type=float, default=None)
    _add_state_options(h)
    h.set_defaults(func=_cmd_hit_time)

    e = sub.add_parser("evolve", help="sample a trajectory and its Bloch angle")
    e.add_argument("--spectrum", required=True)
    e.add_argument("--t-max", type=float, required=True)
    e.add_argument("--t-steps", type=int, default=501)
    e.add_argument("--gamma0", type=float, default=0.0, help="damping rate")
    e.add_argument("--nbar", type=float, default=0.0, help="thermal occupation")
    e.add_argument("--step", type=float, default=1e-3, help="integrator step")
    e.add_argument(
        "--states", action="store_true",
        help="append flattened density matrix columns",
    )
    _add_state_options(e)
    e.set_defaults(func=_cmd_evolve)

    r = sub.add_parser(
        "reachable", help="structure of the set reachable at the half turn"
    )
    r.add_argument("--spectrum", required=True)
    r.add_argument("--theta", type=float, default=math.pi)
    r.add_argument("--max-den", type=int, default=999)
    r.set_defaults(func=_cmd_reachable)

    oat = sub.add_parser("oat", help="twisting-spectrum tools")
    oat_sub = oat.add_subparsers(dest="oat_command", required=True)
    sw = oat_sub.add_parser(
        "sweep", help="bound ratio over a detuning and angle grid"
    )
    sw.add_argument("--n", type=int, default=10, help="even particle number")
    sw.add_argument("--chi", type=float, default=1.0)
    sw.add_argument(
        "--delta-range", default="-20:20:201", metavar="A:B:STEPS",
        help="detuning grid (default -20:20:201)",
    )
    sw.add_argument("--theta", type=float, default=math.pi / 2.0)
    sw.add_argument("--phi-steps", type=int, default=201)
    sw.set_defaults(func=_cmd_oat_sweep)

    no = sub.add_parser("noise", help="damped-dynamics experiments")
    no_sub = no.add_subparsers(dest="noise_command", required=True)
    sc = no_sub.add_parser("scan", help="reach fraction against damping rate")
    sc.add_argument("--spectrum", default="1.0,2.1,4.5,8.3,11.0")
    sc.add_argument("--nbar", type=float, default=1.0)
    sc.add_argument(
        "--gammas", default="0,0.001,0.002,0.004,0.007,0.012,0.02,0.1",
        help="comma or JSON list of damping rates",
    )
    sc.add_argument("--states", type=int, default=300)
    sc.add_argument("--theta", type=float, default=math.pi)
    sc.add_argument("--tol-theta", type=float, default=0.02)
    sc.add_argument("--horizon", type=float, default=None)
    sc.add_argument("--scan-step", type=float, default=None)
    sc.set_defaults(func=_cmd_noise_scan)

    mc = sub.add_parser("mc", help="Monte Carlo checks")
    mc_sub = mc.add_subparsers(dest="mc_command", required=True)
    bt = mc_sub.add_parser(
        "bd-test", help="hit time against the bound over random spectra"
    )
    bt.add_argument("--pairs", type=int, default=20000)
    bt.add_argument("--dim", type=int, default=5)
    bt.add_argument("--theta", type=float, default=math.pi)
    bt.add_argument("--mode", choices=("uniform", "symmetric"), default="uniform")
    bt.add_argument("--min-gap", type=float, default=1e-3)
    bt.set_defaults(func=_cmd_bd_test)

    tl = sub.add_parser("three-level", help="coherence-plane analysis")
    tl_sub = tl.add_subparsers(dest="three_level_command", required=True)
    reg = tl_sub.add_parser("regime", help="classify one (x, y) point")
    reg.add_argument("--x", type=float, required=True)
    reg.add_argument("--y", type=float, required=True)
    reg.add_argument("--norm2", type=float, default=1.0)
    reg.add_argument("--theta", type=float, required=True)
    reg.add_argument("--gap", type=float, default=1.0)
    reg.set_defaults(func=_cmd_three_level_regime)
    val = tl_sub.add_parser("validity", help="classify a deterministic grid")
    val.add_argument("--norm2", type=float, default=1.0)
    val.add_argument("--theta", type=float, required=True)
    val.add_argument("--gap", type=float, default=1.0)
    val.add_argument("--grid", type=int, default=101)
    val.set_defaults(func=_cmd_three_level_validity)
    scn = tl_sub.add_parser("scan", help="Monte Carlo scatter of the plane")
    scn.add_argument("--norm2", type=float, default=1.0)
    scn.add_argument("--theta", type=float, default=math.pi / 3.0)
    scn.add_argument("--gap", type=float, default=1.0)
    scn.add_argument("--states", type=int, default=10000)
    scn.set_defaults(func=_cmd_three_level_scan)

    hm = sub.add_parser("h-min", help="tightness margins of the pure-state bound")
    hm.add_argument("--theta-min", type=float, default=0.05)
    hm.add_argument("--theta-max", type=float, default=math.pi)
    hm.add_argument("--points", type=int, default=64)
    hm.set_defaults(func=_cmd_h_min)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(_jsonable(payload), indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
