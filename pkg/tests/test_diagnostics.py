import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemolv.core import Field, Params, State, build_grid
from chemolv.diagnostics import (TimeSeries, front_position, linf_amplitude, log_slope,
                                 maxima_interleave, mass, monitors, peak_positions, wave_speed)
from chemolv.errors import InvalidArgument


def _state(u, v, grid, t):
    return State(Field(u, grid), Field(v, grid), Field(u, grid), Field(v, grid), t)


def test_mass_and_amplitude():
    g = build_grid(2.0, 4)
    f = Field(np.array([1.0, 2.0, 3.0, 4.0]), g)
    assert mass(f) == 5.0
    assert linf_amplitude(f, 2.5) == 1.5
    g2 = build_grid(30.0, 300, 2)
    assert mass(Field.constant(0.5, g2)) == pytest.approx(450.0, rel=1e-12)


def test_front_position_step():
    x = np.arange(10) + 0.5
    vals = np.where(x < 4, 1.0, 0.0)
    assert front_position(vals, x, side="right") == pytest.approx(4.0)
    assert front_position(vals, x, side="left") is None
    assert front_position(np.ones(10), x) is None
    with pytest.raises(InvalidArgument):
        front_position(vals, x, side="up")


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 60))
def test_front_translation_equivariance(shift):
    # bump centred on a cell, so the maximum (and the threshold) is unchanged
    x = np.arange(300) * 0.1 + 0.05
    bump = lambda c: np.exp(-((x - c) / 1.3) ** 2)
    base, moved = bump(x[100]), bump(x[100 + shift])
    d = front_position(moved, x) - front_position(base, x)
    assert d == pytest.approx(shift * 0.1, abs=1e-12)


def test_wave_speed_linear():
    t = np.linspace(0, 60, 121)
    fit = wave_speed(50 - 0.3 * t, t)
    assert fit.speed == pytest.approx(-0.3, abs=1e-12)
    assert fit.residual < 1e-10
    with pytest.raises(InvalidArgument):
        wave_speed([1, 2, 3], [0, 1, 2])


def test_wave_speed_ignores_nan():
    t = np.linspace(0, 10, 41)
    p = 2 * t + 1
    p[:5] = np.nan
    assert wave_speed(p, t).speed == pytest.approx(2.0)


def test_timeseries_and_monitors():
    g = build_grid(2.0, 10)
    ts = TimeSeries(reference=(0.5, 0.5))
    for t in (0.0, 0.5, 1.0, 2.0):
        ts.record(_state(np.full(10, 0.5 + 0.1 * t), np.full(10, 0.5), g, t))
    np.testing.assert_allclose(ts.times, [0, 0.5, 1, 2])
    np.testing.assert_allclose(ts["amp_u"], [0, 0.05, 0.1, 0.2])
    with pytest.raises(InvalidArgument):
        ts.record(_state(np.ones(10), np.ones(10), g, 1.5))
    rep = monitors(ts, Params(L=2.0))
    assert rep.ok
    assert rep.mass_bound == pytest.approx(2.0 + 4.0 + 1e-8)
    assert rep.extinction_floor[0] == pytest.approx(1.2)


def test_monitors_flag_violations():
    g = build_grid(1.0, 4)
    ts = TimeSeries()
    ts.record(_state(np.full(4, 0.1), np.full(4, 0.1), g, 0.0))
    ts.record(_state(np.array([5.0, 5, 5, -1e-6]), np.full(4, 0.1), g, 1.0))
    rep = monitors(ts, Params(L=1.0))
    assert not rep.mass_bound_ok
    assert not rep.positivity_ok


def test_extinction_floor_warning():
    g = build_grid(1.0, 4)
    ts = TimeSeries()
    for t, m in ((0.0, 1.0), (1.0, 1.0), (2.0, 0.01)):
        ts.record(_state(np.full(4, m), np.full(4, 1.0), g, t))
    rep = monitors(ts, Params(L=1.0))
    assert rep.extinction_floor[0] == pytest.approx(0.01)
    assert rep.warnings


def test_extinction_floor_short_run():
    g = build_grid(1.0, 4)
    ts = TimeSeries()
    ts.record(_state(np.ones(4), np.ones(4), g, 0.0))
    assert all(math.isnan(f) for f in monitors(ts, Params(L=1.0)).extinction_floor)


def test_log_slope_exponential():
    t = np.linspace(0, 30, 301)
    assert log_slope(t, 1e-2 * np.exp(0.03 * t), 5, 20) == pytest.approx(0.03, rel=1e-10)
    with pytest.raises(InvalidArgument):
        log_slope(t, np.zeros_like(t), 5, 20)


def test_peaks_and_interleave():
    x = np.linspace(0, 30, 301)
    u = 1 + np.cos(9 * np.pi * x / 30)
    v = 1 - np.cos(9 * np.pi * x / 30)
    pu = peak_positions(u, x)
    assert np.allclose(np.diff(pu), 60 / 9, atol=0.11)
    assert maxima_interleave(u, v, x)
    assert not maxima_interleave(u, u, x)
    assert not maxima_interleave(np.ones_like(x), v, x)
