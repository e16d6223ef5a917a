"""Observables recorded along a run and the theorem monitors built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

COLUMNS = ("t", "mass_u", "mass_v", "amp_u", "amp_v", "min_u", "min_v",
           "max_u", "max_v", "front_u", "front_v")


def mass(f, grid=None):
    """Discrete integral ``sum(rho) * |C|``."""
    grid = f.grid if grid is None else grid
    vals = f.values if hasattr(f, "values") else np.asarray(f)
    return float(vals.sum() * grid.cell_volume)


def linf_amplitude(f, reference):
    vals = f.values if hasattr(f, "values") else np.asarray(f)
    return float(np.abs(vals - reference).max())


def front_position(values, x, level=0.5, side="right"):
    """Outermost crossing of ``level * max`` on ``side``, linearly interpolated.

    Returns ``None`` when the profile never crosses the level on that side.
    """
    values = np.asarray(values, dtype=float)
    x = np.asarray(x, dtype=float)
    thr = level * values.max()
    above = values >= thr
    if not above.any() or above.all():
        return None
    if side == "right":
        i = int(np.flatnonzero(above)[-1])
        if i == len(values) - 1:
            return None
        j = i + 1
    elif side == "left":
        j = int(np.flatnonzero(above)[0])
        if j == 0:
            return None
        i = j - 1
    else:
        raise InvalidArgument(f"side must be 'left' or 'right', got {side!r}")
    vi, vj = values[i], values[j]
    if vi == vj:
        return float(0.5 * (x[i] + x[j]))
    return float(x[i] + (thr - vi) * (x[j] - x[i]) / (vj - vi))


@dataclass
class SpeedFit:
    speed: float
    residual: float
    intercept: float


def wave_speed(positions, times, window=0.25):
    """Least-squares slope of front positions over the trailing ``window`` fraction."""
    t = np.asarray(times, dtype=float)
    p = np.asarray(positions, dtype=float)
    ok = np.isfinite(p)
    t, p = t[ok], p[ok]
    if len(t) == 0:
        raise InvalidArgument("no front positions to fit")
    start = t[-1] - window * (t[-1] - t[0]) if window < 1 else t[0]
    sel = t >= start
    if sel.sum() < 5:
        raise InvalidArgument(f"need at least 5 samples in the fit window, got {int(sel.sum())}")
    slope, icpt = np.polyfit(t[sel], p[sel], 1)
    resid = float(np.abs(p[sel] - (slope * t[sel] + icpt)).max())
    return SpeedFit(float(slope), resid, float(icpt))


@dataclass
class TimeSeries:
    """Per-step records; ``reference`` is ``(u_bar, v_bar)`` for the amplitude columns."""

    reference: tuple | None = None
    front_sides: tuple = ("left", "right")
    front_level: float = 0.5
    rows: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def record(self, state):
        grid = state.grid
        u, v = state.u.values, state.v.values
        if self.rows and state.t <= self.rows[-1][0]:
            raise InvalidArgument("time series times must increase")
        if self.reference is not None:
            amp_u = linf_amplitude(u, self.reference[0])
            amp_v = linf_amplitude(v, self.reference[1])
        else:
            amp_u = amp_v = math.nan
        if grid.dim == 1:
            x = grid.centers
            fu = front_position(u, x, self.front_level, self.front_sides[0])
            fv = front_position(v, x, self.front_level, self.front_sides[1])
        else:
            fu = fv = None
        self.rows.append((
            float(state.t), mass(state.u), mass(state.v), amp_u, amp_v,
            float(u.min()), float(v.min()), float(u.max()), float(v.max()),
            math.nan if fu is None else fu, math.nan if fv is None else fv,
        ))

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        i = COLUMNS.index(name)
        return np.array([r[i] for r in self.rows])

    def __getitem__(self, name):
        if name in self.extra:
            return np.asarray(self.extra[name])
        return self.column(name)

    @property
    def times(self):
        return self.column("t")


@dataclass
class MonitorReport:
    mass_bound_ok: bool
    positivity_ok: bool
    extinction_floor: tuple
    max_total_mass: float
    mass_bound: float
    min_density: float
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return self.mass_bound_ok and self.positivity_ok


def monitors(series, params, tol_neg=1e-8, mass_tol=1e-8, floor_warn=0.05):
    """Check the mass bound and near-positivity; report the empirical extinction floor.

    The floor for species ``u`` is ``min_{t >= 1} M_u(t) / min(M_u(1), 1)``
    (``nan`` if the run ends before ``t = 1``).
    """
    t = series.column("t")
    mu, mv = series.column("mass_u"), series.column("mass_v")
    bound = mu[0] + mv[0] + 2.0 * params.L ** params.dim + mass_tol
    total = mu + mv
    mins = np.minimum(series.column("min_u"), series.column("min_v"))
    floors = []
    warnings = []
    late = t >= 1.0 - 1e-12
    for name, m in (("u", mu), ("v", mv)):
        if not late.any():
            floors.append(math.nan)
            continue
        i1 = int(np.flatnonzero(late)[0])
        base = min(m[i1], 1.0)
        fl = float(m[late].min() / base) if base > 0 else 0.0
        floors.append(fl)
        if fl < floor_warn:
            warnings.append(f"mass of {name} fell to {fl:.3g} of its t=1 level")
    return MonitorReport(
        mass_bound_ok=bool(np.all(total <= bound)),
        positivity_ok=bool(mins.min() >= -tol_neg),
        extinction_floor=tuple(floors),
        max_total_mass=float(total.max()),
        mass_bound=float(bound),
        min_density=float(mins.min()),
        warnings=warnings,
    )


def log_slope(times, values, t0, t1):
    """Least-squares slope of ``log(values)`` over ``t0 <= t <= t1``."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    sel = (t >= t0) & (t <= t1) & (y > 0)
    if sel.sum() < 2:
        raise InvalidArgument(f"fewer than 2 positive samples in [{t0}, {t1}]")
    return float(np.polyfit(t[sel], np.log(y[sel]), 1)[0])


def peak_positions(values, x, rel_height=0.1):
    """Interior local maxima above ``rel_height * max``."""
    from scipy.signal import find_peaks

    values = np.asarray(values, dtype=float)
    idx, _ = find_peaks(values, height=rel_height * values.max())
    return np.asarray(x)[idx]


def maxima_interleave(u, v, x, rel_height=0.1):
    """True when the local maxima of ``u`` and ``v`` strictly alternate in space."""
    pu = peak_positions(u, x, rel_height)
    pv = peak_positions(v, x, rel_height)
    if len(pu) == 0 or len(pv) == 0 or np.intersect1d(pu, pv).size:
        return False
    labels = [lab for _, lab in sorted([(p, 0) for p in pu] + [(p, 1) for p in pv])]
    return all(a != b for a, b in zip(labels, labels[1:]))
