import numpy as np
import pytest

from chemolv.core import Field, Params, build_grid, coexistence_state
from chemolv.errors import InvalidArgument, SchemeFailure
from chemolv.helmholtz import TridiagonalSystem
from chemolv.timestepper import (SchemeConfig, adi_step_2d, step, chem_face_gradient, directional_operator,
                                 lax_friedrichs_flux, linearized_reaction, make_state, simulate,
                                 step_1d)

from oracle import dense_step, gradient_loop


def test_gradient_linear_chemical():
    g = build_grid(4.0, 4)
    (grad,) = chem_face_gradient(Field(np.array([0.0, 1, 2, 3]), g))
    np.testing.assert_allclose(grad, [0.5, 1, 1, 0.5])


def test_gradient_2d_matches_loop(rng):
    g = build_grid(3.0, 5, 2)
    c = rng.normal(size=(5, 5))
    gx, gy = chem_face_gradient(Field(c, g))
    np.testing.assert_allclose(gx, gradient_loop(c, g.dx, 0))
    np.testing.assert_allclose(gy, gradient_loop(c, g.dx, 1))


def test_lax_friedrichs_examples():
    assert lax_friedrichs_flux(0.0, 0.0, 0.1, 0.1)(1.0, 0.0) == pytest.approx(0.5)
    # drift velocity 2 on both sides, uniform density: pure advection
    # chi = 20, gradient 0.1 on both sides: the repulsive drift velocity is -2
    assert lax_friedrichs_flux(-2.0, -2.0, 0.1, 0.05)(0.5, 0.5) == pytest.approx(-1.0)
    assert lax_friedrichs_flux(2.0, 2.0, 0.1, 0.05, "local")(0.5, 0.5) == pytest.approx(1.0)


def test_lax_friedrichs_consistency(rng):
    v = rng.normal(size=10)
    r = rng.uniform(0, 2, 10)
    for mode in ("local", "global"):
        np.testing.assert_allclose(lax_friedrichs_flux(v, v, 0.1, 0.01, mode)(r, r), v * r)


def test_lax_friedrichs_monotone_local():
    v_l, v_r = np.array([1.0, -2.0, 0.3]), np.array([-1.5, 0.5, 0.2])
    fl = lax_friedrichs_flux(v_l, v_r, 0.1, 0.01, "local")
    assert np.all(fl.left >= 0) and np.all(fl.right <= 0)


def test_lax_friedrichs_rejects():
    with pytest.raises(InvalidArgument):
        lax_friedrichs_flux(0.0, 0.0, 0.0, 0.1)
    with pytest.raises(InvalidArgument):
        lax_friedrichs_flux(0.0, 0.0, 0.1, 0.1, "upwind")


def test_linearized_reaction_examples():
    val, ds, do = linearized_reaction(1.0, 1.0, 0.2, 1.0)
    assert (val, ds, do) == pytest.approx((-0.2, -1.2, -0.2))
    ub = 1 / 1.2
    val, ds, do = linearized_reaction(ub, ub, 0.2, 1.0)
    assert abs(val) < 1e-15
    assert ds == pytest.approx(-ub)
    assert do == pytest.approx(-0.2 * ub)


def test_directional_operator_row_sums_and_dominance(rng):
    vel = rng.normal(size=(3, 12)) * 5
    slope = rng.uniform(-1, -0.1, (3, 12))
    sub, diag, sup = directional_operator(vel, 1.0, slope, 0.1, 0.01)
    sys_ = TridiagonalSystem(sub, diag, sup, np.zeros_like(vel))
    assert sys_.column_dominant
    # column sums of I - dt(A) are 1 - dt*slope: the transport part conserves mass
    col = diag.copy()
    col[:, :-1] += sub[:, 1:]
    col[:, 1:] += sup[:, :-1]
    np.testing.assert_allclose(col, 1 - 0.01 * slope, atol=1e-12)


def _random_state(rng, grid):
    u = rng.uniform(0.3, 1.5, grid.shape)
    v = rng.uniform(0.3, 1.5, grid.shape)
    return make_state(Field(u, grid), Field(v, grid), elliptic_tol=1e-13)


@pytest.mark.parametrize("dissipation", ["local", "global"])
def test_step_1d_dense_oracle(rng, dissipation):
    g = build_grid(2.0, 8)
    p = Params(a1=0.3, a2=0.1, chi1=4.0, chi2=7.0, d1=1.0, d2=0.5, b1=1.0, b2=2.0)
    st = _random_state(rng, g)
    cfg = SchemeConfig(dt=0.01, t_end=1.0, dissipation=dissipation)
    new = step_1d(st, p, cfg)
    u, v = st.u.values, st.v.values
    ru = dense_step(u, v, st.cv.values, p.chi1, p.a1, p.b1, p.d1, g.dx, cfg.dt,
                    dissipation=dissipation)
    rv = dense_step(v, u, st.cu.values, p.chi2, p.a2, p.b2, p.d2, g.dx, cfg.dt,
                    dissipation=dissipation)
    np.testing.assert_allclose(new.u.values, ru, atol=1e-10)
    np.testing.assert_allclose(new.v.values, rv, atol=1e-10)
    assert new.t == pytest.approx(0.01)


def test_step_mass_changes_only_by_reaction(rng):
    # transport conserves mass exactly, so the mass change is the summed reaction
    g = build_grid(2.0, 12)
    p = Params(a1=0.2, a2=0.4, chi1=10.0, chi2=15.0)
    st = _random_state(rng, g)
    cfg = SchemeConfig(dt=0.01, t_end=1.0)
    new = step(st, p, cfg)
    u, v, un = st.u.values, st.v.values, new.u.values
    f, fs, _ = linearized_reaction(u, v, p.a1, p.b1)
    expected = cfg.dt * (f + fs * (un - u)).sum()
    assert un.sum() - u.sum() == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("dissipation", ["local", "global"])
@pytest.mark.parametrize("mode", ["compensated", "direct"])
def test_adi_dense_factored_oracle(rng, dissipation, mode):
    g = build_grid(1.5, 6, 2)
    p = Params(a1=0.3, a2=0.1, chi1=3.0, chi2=5.0, d1=1.0, d2=0.7)
    st = _random_state(rng, g)
    cfg = SchemeConfig(dt=0.01, t_end=1.0, dissipation=dissipation, factorization=mode,
                       elliptic_tol=1e-13)
    new = adi_step_2d(st, p, cfg)
    u, v = st.u.values, st.v.values
    ru = dense_step(u, v, st.cv.values, p.chi1, p.a1, p.b1, p.d1, g.dx, cfg.dt, mode, dissipation)
    rv = dense_step(v, u, st.cu.values, p.chi2, p.a2, p.b2, p.d2, g.dx, cfg.dt, mode, dissipation)
    np.testing.assert_allclose(new.u.values, ru, atol=1e-10)
    np.testing.assert_allclose(new.v.values, rv, atol=1e-10)


def _splitting_gaps(rng, mode, dissipation, dts):
    # dx = 1 keeps dt * |operator| small enough to sit in the asymptotic regime
    g = build_grid(6.0, 6, 2)
    p = Params(a1=0.3, a2=0.1, chi1=3.0, chi2=5.0)
    st = _random_state(rng, g)
    args = (st.u.values, st.v.values, st.cv.values, p.chi1, p.a1, p.b1, p.d1, g.dx)
    return np.array([np.abs(dense_step(*args, dt, mode, dissipation)
                            - dense_step(*args, dt, "unfactored", dissipation)).max()
                     for dt in dts])


@pytest.mark.parametrize("mode", ["compensated", "direct"])
def test_adi_splitting_error_second_order(rng, mode):
    gaps = _splitting_gaps(rng, mode, "local", (0.01, 0.005, 0.0025))
    ratios = gaps[:-1] / gaps[1:]
    np.testing.assert_allclose(ratios, 4.0, atol=1.0)


def test_global_dissipation_splitting_gap_does_not_vanish(rng):
    # dt * dx / (2 dt dx) = 1/2 regardless of dt: the product term stays O(1)
    gaps = _splitting_gaps(rng, "compensated", "global", (0.01, 0.005, 0.0025))
    assert np.all(gaps[:-1] / gaps[1:] < 1.5)


def _x_only_gap(dt, reaction=True):
    L, N = 2.0, 10
    g1, g2 = build_grid(L, N), build_grid(L, N, 2)
    x = g1.centers
    u1 = 0.8 + 0.1 * np.cos(np.pi * x / L)
    v1 = 0.8 - 0.1 * np.cos(np.pi * x / L)
    p = Params.symmetric(0.2, 6.0, L)
    cfg = SchemeConfig(dt=dt, t_end=1.0, elliptic_tol=1e-13)
    s1 = make_state(Field(u1, g1), Field(v1, g1), elliptic_tol=1e-13)
    s2 = make_state(Field(np.repeat(u1[:, None], N, 1), g2),
                    Field(np.repeat(v1[:, None], N, 1), g2), elliptic_tol=1e-13)
    s1, s2 = step_1d(s1, p, cfg), adi_step_2d(s2, p, cfg)
    # y-independence is preserved exactly
    assert np.abs(s2.u.values - s2.u.values[:, :1]).max() <= 1e-14
    return np.abs(s2.u.values - s1.u.values[:, None]).max()


def test_adi_x_only_data_tracks_1d_step():
    # the y-sweep still carries half the reaction slope, so the two steppers
    # differ by a splitting term of order dt**2 and no more
    gaps = np.array([_x_only_gap(dt) for dt in (0.004, 0.002, 0.001)])
    assert gaps[0] < 1e-5
    np.testing.assert_allclose(gaps[:-1] / gaps[1:], 4.0, atol=1.0)


@pytest.mark.parametrize("chi", [0.0, 5.0, 20.0, 100.0])
@pytest.mark.parametrize("dim", [1, 2])
def test_fixed_point(chi, dim):
    p = Params(a1=0.5, a2=0.25, chi1=chi, chi2=chi, L=2.0, dim=dim)
    g = build_grid(2.0, 8, dim)
    ub, vb = coexistence_state(p)
    st = make_state(Field.constant(ub, g), Field.constant(vb, g), elliptic_tol=1e-13)
    cfg = SchemeConfig(dt=0.01, t_end=0.05, elliptic_tol=1e-13)
    out = simulate(p, (st.u, st.v), cfg).final
    assert np.abs(out.u.values - ub).max() <= 1e-12
    assert np.abs(out.v.values - vb).max() <= 1e-12


def test_simulate_step_count_and_snapshots():
    g = build_grid(2.0, 8)
    p = Params.symmetric(0.2, 1.0, 2.0)
    u0 = Field(0.8 + 0.01 * np.cos(np.pi * g.centers / 2), g)
    cfg = SchemeConfig(dt=0.1, t_end=1.0, snapshot_times=(0.0, 0.5, 1.0))
    calls = []
    traj = simulate(p, (u0, u0.copy()), cfg, reference=(5 / 6, 5 / 6), stride=3,
                    callback=lambda s: calls.append(s.t))
    assert len(calls) == 10
    np.testing.assert_allclose(traj.series.times, [0, 0.3, 0.6, 0.9, 1.0])
    assert [s.t for s in traj.snapshots] == pytest.approx([0.0, 0.5, 1.0])
    assert traj.final.t == pytest.approx(1.0)


def test_undershoot_raises():
    # huge drift with a large dt: the global coefficient leaves the M-matrix regime
    g = build_grid(1.0, 20)
    x = g.centers
    p = Params.symmetric(0.2, 500.0, 1.0)
    u = Field(np.where(x < 0.5, 1.0, 1e-3), g)
    v = Field(np.where(x < 0.5, 1e-3, 1.0), g)
    st = make_state(u, v)
    cfg = SchemeConfig(dt=0.5, t_end=1.0, dissipation="global", check_dominance=False)
    with pytest.raises(SchemeFailure):
        for _ in range(3):
            st = step_1d(st, p, cfg)


def test_scheme_config_validation():
    with pytest.raises(InvalidArgument):
        SchemeConfig(dt=0.0, t_end=1.0)
    with pytest.raises(InvalidArgument):
        SchemeConfig(dt=0.1, t_end=0.01)
    with pytest.raises(InvalidArgument):
        SchemeConfig(dt=0.1, t_end=1.0, dissipation="none")
