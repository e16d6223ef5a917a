"""Initial data, scenario execution and the epsilon sweep."""
from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..amplitude import (amplitude_coefficients, solve_amplitude_ode,
                         steady_amplitude)
from ..core import Field, build_grid, coexistence_state, project
from ..diagnostics import (log_slope, maxima_interleave, monitors, wave_speed)
from ..errors import AmplitudeTooLarge, InvalidArgument, NoCoexistence
from ..stability import growth_rate_sigma, stability_report
from ..timestepper import chem_face_gradient, make_state, simulate
from . import io
from .config import build_config

log = logging.getLogger(__name__)


def _reference(params):
    try:
        return coexistence_state(params)
    except NoCoexistence:
        return None


def critical_mode(params):
    if not params.is_symmetric:
        raise InvalidArgument("perturbation initial data needs symmetric parameters "
                              "(the critical mode comes from the stability analysis)")
    return stability_report(params.a1, params.L, params.dim).critical_modes[0]


def make_initial(cfg, grid, params):
    init = cfg.initial
    L = params.L
    if init.kind in ("perturbation", "constant"):
        ub, vb = coexistence_state(params)
        if init.kind == "constant":
            u, v = Field.constant(ub, grid), Field.constant(vb, grid)
        else:
            if abs(init.A0) >= min(ub, vb):
                raise AmplitudeTooLarge(
                    f"A0={init.A0} would make a density non-positive (min state {min(ub, vb):.4g})")
            mode = critical_mode(params)
            if grid.dim == 1:
                shape = project(lambda x: np.cos(mode[0] * np.pi * x / L), grid).values
            else:
                shape = project(lambda x, y: np.cos(mode[0] * np.pi * x / L)
                                * np.cos(mode[1] * np.pi * y / L), grid).values
            u = Field(ub + init.A0 * shape, grid)
            v = Field(vb - init.A0 * shape, grid)
    elif init.kind == "segregated":
        s1, s2 = init.s1, init.s2
        if not 0 < s1 < s2 < L:
            raise InvalidArgument(f"need 0 < s1 < s2 < L, got s1={s1}, s2={s2}")
        u = project(lambda x: np.where(x >= s2, 1.0 / (L - s2), 0.0), grid)
        v = project(lambda x: np.where(x <= s1, 1.0 / s1, 0.0), grid)
    elif init.kind == "compact":
        (l1, r1), (l2, r2) = init.I1, init.I2
        u = project(lambda x: np.where((x >= l1) & (x <= r1), 1.0 / (r1 - l1), 0.0), grid)
        v = project(lambda x: np.where((x >= l2) & (x <= r2), 1.0 / (r2 - l2), 0.0), grid)
    elif init.kind == "gaussian":
        center = init.center or (L / 2,) * grid.dim

        def gauss(s2):
            def f(*xs):
                r2 = sum((xi - ci) ** 2 for xi, ci in zip(xs, center))
                return np.exp(-r2 / (2 * s2)) / (2 * np.pi * s2) ** (grid.dim / 2)
            return f
        u = project(gauss(init.sigma1_sq), grid)
        v = project(gauss(init.sigma2_sq), grid)
    else:
        raise InvalidArgument(f"unknown initial kind {init.kind!r}")
    if init.noise:
        rng = np.random.default_rng(init.seed)
        u = Field(u.values * (1 + init.noise * rng.uniform(-1, 1, grid.shape)), grid)
        v = Field(v.values * (1 + init.noise * rng.uniform(-1, 1, grid.shape)), grid)
    return u, v


@dataclass
class RunResult:
    status: int
    trajectory: object
    summary: dict
    paths: dict = field(default_factory=dict)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return None if math.isnan(obj) else float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def smearing_warning(cfg, grid, u0, v0):
    """Flag a global dissipation coefficient far above the initial drift speed."""
    if cfg.scheme.dissipation != "global":
        return None
    st = make_state(u0, v0, elliptic_tol=cfg.scheme.elliptic_tol)
    grad = max(float(np.abs(g).max()) for c in (st.cu, st.cv) for g in chem_face_gradient(c))
    drift = max(cfg.params.chi1, cfg.params.chi2) * grad
    alpha = grid.dx / (2 * cfg.scheme.dt)
    if alpha > 10 * drift:
        return (f"dissipation dx/(2 dt) = {alpha:.3g} exceeds 10x the initial drift speed "
                f"{drift:.3g}; expect numerical smearing")
    return None


def run_scenario(cfg, out_dir=None, write=True):
    """Simulate one scenario, write its CSV/JSON artifacts and return the result."""
    params = cfg.params
    grid = build_grid(params.L, cfg.N, params.dim)
    u0, v0 = make_initial(cfg, grid, params)
    ref = _reference(params)
    log.info("running %s: N=%d dim=%d dt=%g t_end=%g", cfg.name, cfg.N, grid.dim,
             cfg.scheme.dt, cfg.scheme.t_end)
    smear = smearing_warning(cfg, grid, u0, v0)
    traj = simulate(params, (u0, v0), cfg.scheme, reference=ref, stride=cfg.stride,
                    front_sides=cfg.front_sides, front_level=cfg.front_level)
    series = traj.series
    mon = monitors(series, params, tol_neg=cfg.scheme.tol_neg)
    summary = {
        "scenario": cfg.name,
        "params": asdict(params),
        "N": cfg.N, "dx": grid.dx, "dt": cfg.scheme.dt, "t_end": cfg.scheme.t_end,
        "dissipation": cfg.scheme.dissipation,
        "factorization": cfg.scheme.factorization,
        "steps": cfg.scheme.n_steps,
        "reference": ref,
        "monitors": asdict(mon),
        "warnings": list(mon.warnings) + ([smear] if smear else []),
    }
    if params.is_symmetric and 0 < params.a1 < 1:
        rep = stability_report(params.a1, params.L, params.dim)
        summary["chi_star"] = rep.chi_star
        summary["critical_modes"] = rep.critical_modes
    extra = {}
    t = series.times

    if cfg.name == "amplitude-verify":
        coeffs = amplitude_coefficients(params.a1, params.L)
        eps = params.chi1 - coeffs.chi_star
        ts, As = solve_amplitude_ode(coeffs, eps, cfg.initial.A0, cfg.scheme.t_end)
        a_ode = np.interp(t, ts, As)
        extra["A_ode"] = a_ode
        amp = series.column("amp_u")
        plateau = steady_amplitude(coeffs, eps)
        late = t >= 50.0
        summary["amplitude"] = {
            "eps": eps, "k_star": coeffs.k_star, "c1": coeffs.c1, "c2": coeffs.c2,
            "lambda1": coeffs.lambda1, "lambda2": coeffs.lambda2,
            "A_inf_predicted": plateau, "A_amp_final": amp[-1], "A_ode_final": a_ode[-1],
            "max_gap_after_50": float(np.abs(amp[late] - a_ode[late]).max()) if late.any() else None,
        }
        if eps > 0:
            summary["amplitude"]["sigma"] = growth_rate_sigma(eps, params.a1, params.L)
            try:
                summary["amplitude"]["log_slope"] = log_slope(t, amp, *cfg.slope_window)
            except InvalidArgument:
                summary["amplitude"]["log_slope"] = None

    if grid.dim == 1:
        fits = {}
        for name in ("front_u", "front_v"):
            try:
                fit = wave_speed(series.column(name), t)
                fits[name] = {"speed": fit.speed, "residual": fit.residual}
            except InvalidArgument:
                fits[name] = None
            pos = series.column(name)
            pos = pos[np.isfinite(pos)]
            if pos.size and np.minimum(pos, params.L - pos).min() < 10 * grid.dx:
                summary["warnings"].append(
                    f"{name} within 10 cells of the boundary; the run is contaminated by the wall")
        summary["wave_speed"] = fits
        x = grid.centers
        summary["maxima_interleave"] = maxima_interleave(traj.final.u.values,
                                                         traj.final.v.values, x)
    for w in summary["warnings"]:
        log.warning(w)

    paths = {}
    if write:
        out = Path(out_dir or cfg.output_dir or os.path.join("runs", cfg.name))
        out.mkdir(parents=True, exist_ok=True)
        paths["timeseries"] = io.write_timeseries(out / "timeseries.csv", series, extra)
        snaps = []
        for st in traj.snapshots:
            snaps.append(io.write_snapshot(out / f"snapshot_t{st.t:g}.csv", st))
        snaps.append(io.write_snapshot(out / "snapshot_final.csv", traj.final))
        paths["snapshots"] = snaps
        paths["summary"] = out / "summary.json"
        paths["summary"].write_text(json.dumps(_jsonable(summary), indent=2) + "\n")
    series.extra.update(extra)
    return RunResult(0, traj, summary, paths)


@dataclass
class SweepRow:
    eps: float
    A_amp: float
    A_pred: float
    error: str | None = None


def _sweep_one(raw, eps):
    try:
        cfg = build_config(raw).with_eps(eps)
        res = run_scenario(cfg, write=False)
        coeffs = amplitude_coefficients(cfg.params.a1, cfg.params.L)
        amp = res.trajectory.series.column("amp_u")[-1]
        return SweepRow(eps, float(amp), steady_amplitude(coeffs, eps))
    except Exception as exc:  # noqa: BLE001 - one failed row must not stop the sweep
        return SweepRow(eps, math.nan, math.nan, f"{type(exc).__name__}: {exc}")


def sweep_epsilon(cfg, eps_list, workers=None, out_path=None):
    """One amplitude-verify simulation per ``eps``; plateau read at ``t_end``."""
    eps_list = [float(e) for e in eps_list]
    workers = workers or min(len(eps_list), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_one, [cfg.raw] * len(eps_list), eps_list))
    else:
        rows = [_sweep_one(cfg.raw, e) for e in eps_list]
    if out_path is not None:
        io.write_table(out_path, ["eps", "A_amp", "A_pred", "error"],
                       [(r.eps, r.A_amp, r.A_pred, r.error or "") for r in rows])
    return rows
