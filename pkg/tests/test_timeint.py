import numpy as np
import pytest

from twofluid_dg import dgsolver, timeint
from twofluid_dg.sbp import build_operators
from twofluid_dg.state import AdmissibilityError, GasParams
from twofluid_dg.timeint import RkScheme, StepControl


def test_scheme_for_degree():
    assert timeint.scheme_for_degree(1).order == 2
    assert timeint.scheme_for_degree(2).order == 3
    assert timeint.scheme_for_degree(3).order == 4


def test_scheme_stage_counts():
    assert RkScheme(2).stages == 2
    assert RkScheme(3).stages == 3
    assert RkScheme(4).stages == 5
    with pytest.raises(ValueError):
        RkScheme(1)


def test_stage_weights_are_convex():
    # SSP structure: state weights of every stage are nonnegative and sum to
    # one, residual coefficients are nonnegative.
    for order in (2, 3, 4):
        for aw, bw in RkScheme(order).stage_coefficients():
            ws = [a for _, a in aw]
            assert all(a >= 0 for a in ws)
            assert np.isclose(sum(ws), 1.0, atol=1e-12)
            assert all(b >= 0 for _, b in bw)


def test_stage_abscissae_end_at_one():
    for order in (2, 3, 4):
        c = timeint.stage_abscissae(RkScheme(order))
        assert c[0] == 0.0
        assert np.isclose(c[-1], 1.0, atol=1e-10)
        assert all(0.0 <= ci <= 1.0 + 1e-12 for ci in c)


@pytest.mark.parametrize("order", [2, 3, 4])
def test_temporal_order_scalar_ode(order):
    # u' = -u + sin(t), scalar; measure the observed convergence rate.
    def residual(u, t):
        return -u + np.sin(t)

    u_exact = lambda t: 0.5 * (np.exp(-t) + np.sin(t) - np.cos(t)) + 1.0 * np.exp(-t)
    scheme = RkScheme(order)
    T = 1.0
    # the finest levels are capped: SSPRK(5,4) coefficients are published to
    # 14 digits, so very small errors saturate near that consistency floor
    errs = []
    steps_list = [10, 20, 40]
    for nsteps in steps_list:
        dt = T / nsteps
        u = np.array([u_exact(0.0)])
        t = 0.0
        for _ in range(nsteps):
            u = timeint.step(u, scheme, dt, residual, t=t)
            t += dt
        errs.append(abs(u[0] - u_exact(T)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(rates - order) < 0.25), rates


def test_step_limiter_applied_each_stage():
    calls = []

    def residual(u, t):
        return np.zeros_like(u)

    def limiter(u):
        calls.append(1)
        return u

    timeint.step(np.zeros(3), RkScheme(3), 0.1, residual, limiter=limiter)
    assert len(calls) == RkScheme(3).stages


def test_step_control_validation():
    with pytest.raises(ValueError):
        StepControl(cfl=0.0)
    with pytest.raises(ValueError):
        StepControl(cfl=1.5)
    StepControl(cfl=0.5)


@pytest.fixture
def smooth_setup(params):
    def ic(x):
        W = np.zeros(x.shape + (18,))
        W[..., 0] = 1.0 + 0.2 * np.sin(2 * np.pi * x)
        W[..., 4] = 1.0
        W[..., 5] = 0.8
        W[..., 9] = 0.7
        W[..., 10] = 0.1
        return W

    mesh = dgsolver.uniform_mesh_1d(0.0, 1.0, 8)
    ops = build_operators(2)
    return mesh, ops, dgsolver.project_initial(mesh, ops, ic, params)


def test_compute_dt_1d(smooth_setup, params):
    mesh, ops, field = smooth_setup
    ctrl = StepControl(cfl=0.2, t_final=1.0)
    dt = timeint.compute_dt(field, mesh, ops, params, ctrl)
    from twofluid_dg.state import cons_to_prim
    W = cons_to_prim(field, params)
    lam = dgsolver.max_signal_speed(W, params, "x")
    span = ops.nodes[1] - ops.nodes[0]
    assert np.isclose(dt, 0.2 * span * np.min(mesh.widths) / lam)
    assert np.isclose(timeint.compute_dt(field, mesh, ops, params,
                                         StepControl(cfl=0.4)), 2 * dt)


def test_compute_dt_2d_combines_directions(params):
    def ic(x, y):
        W = np.zeros(x.shape + (18,))
        W[..., 0] = 1.0
        W[..., 4] = 1.0
        W[..., 5] = 1.0
        W[..., 9] = 1.0
        return W

    ops = build_operators(2)
    span = ops.nodes[1] - ops.nodes[0]
    mesh = dgsolver.uniform_mesh_2d(0.0, 1.0, 10, 0.0, 2.0, 10)
    field = dgsolver.project_initial(mesh, ops, ic, params)
    ctrl = StepControl(cfl=0.3)
    dt = timeint.compute_dt(field, mesh, ops, params, ctrl)
    from twofluid_dg.state import cons_to_prim
    W = cons_to_prim(field, params)
    lx = dgsolver.max_signal_speed(W, params, "x")
    ly = dgsolver.max_signal_speed(W, params, "y")
    expect = 0.3 * span / (lx / 0.1 + ly / 0.2)
    assert np.isclose(dt, expect)
    # combining both directions is stricter than either alone
    assert dt < 0.3 * span * 0.1 / lx


def test_integrate_reaches_t_final(smooth_setup, params):
    mesh, ops, field = smooth_setup
    out, times, dts = timeint.integrate(
        field, mesh, ops, params, RkScheme(3),
        StepControl(cfl=0.3, t_final=0.05), tvb_m=None)
    assert np.isclose(times[-1], 0.05)
    assert out.shape == field.shape
    assert np.all(np.isfinite(out))
    assert len(dts) == len(times) - 1


def test_integrate_zero_t_final(smooth_setup, params):
    mesh, ops, field = smooth_setup
    out, times, dts = timeint.integrate(
        field, mesh, ops, params, RkScheme(2),
        StepControl(cfl=0.3, t_final=0.0))
    assert np.array_equal(out, field)
    assert len(dts) == 0


def test_integrate_max_steps(smooth_setup, params):
    mesh, ops, field = smooth_setup
    with pytest.raises(RuntimeError, match="max_steps"):
        timeint.integrate(field, mesh, ops, params, RkScheme(2),
                          StepControl(cfl=0.3, t_final=10.0, max_steps=3))


def test_integrate_callback_cadence(smooth_setup, params):
    mesh, ops, field = smooth_setup
    seen = []
    timeint.integrate(field, mesh, ops, params, RkScheme(2),
                      StepControl(cfl=0.3, t_final=0.05), tvb_m=None,
                      callback=lambda t, u, n: seen.append((n, t)),
                      callback_every=2)
    assert seen[0][0] == 0
    assert np.isclose(seen[-1][1], 0.05)
    # every recorded step index is on the cadence except possibly the last
    assert all(n % 2 == 0 for n, _ in seen[:-1])


def test_conservation_under_integration(smooth_setup, params):
    # periodic evolution with no charge coupling conserves every component
    mesh, ops, field = smooth_setup
    p0 = GasParams(gamma_i=params.gamma_i, gamma_e=params.gamma_e, r_i=0.0, r_e=0.0)
    before = dgsolver.integrate_components(field, mesh, ops)
    out, _, _ = timeint.integrate(field, mesh, ops, p0, RkScheme(3),
                                  StepControl(cfl=0.3, t_final=0.1), tvb_m=None)
    after = dgsolver.integrate_components(out, mesh, ops)
    assert np.max(np.abs(after - before)) < 1e-12
