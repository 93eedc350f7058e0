"""SSP Runge-Kutta integrators and CFL step control.

Orders 2 and 3 are the classic Shu-Osher convex-combination schemes; the
fourth-order method is the five-stage SSPRK(5,4) of Spiteri and Ruuth.
Every stage is followed by the slope limiter and then the
bound-preserving limiter so each residual evaluation sees an admissible
field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dgsolver
from .dgsolver import Mesh1D
from .state import AdmissibilityError, cons_to_prim

# alpha/beta rows of the second- and third-order SSP schemes
_ALPHA = {
    2: [[1.0], [0.5, 0.5]],
    3: [[1.0], [0.75, 0.25], [1.0 / 3.0, 0.0, 2.0 / 3.0]],
}
_BETA = {
    2: [[1.0], [0.0, 0.5]],
    3: [[1.0], [0.0, 0.25], [0.0, 0.0, 2.0 / 3.0]],
}

# SSPRK(5,4): each row is (list of (state_index, weight), list of
# (state_index, dt_coefficient)) building the next stage.
_RK4_STAGES = [
    ([(0, 1.0)], [(0, 0.39175222700392)]),
    ([(0, 0.44437049406734), (1, 0.55562950593266)], [(1, 0.36841059262959)]),
    ([(0, 0.62010185138540), (2, 0.37989814861460)], [(2, 0.25189177424738)]),
    ([(0, 0.17807995410773), (3, 0.82192004589227)], [(3, 0.54497475021237)]),
    (
        [(0, 0.00683325884039), (2, 0.51723167208978), (3, 0.12759831133288), (4, 0.34833675773694)],
        [(3, 0.08460416338212), (4, 0.22600748319395)],
    ),
]


@dataclass(frozen=True)
class RkScheme:
    """Stage table of one SSP-RK method, orders 2-4."""

    order: int

    def __post_init__(self):
        if self.order not in (2, 3, 4):
            raise ValueError("order must be 2, 3 or 4")

    @property
    def stages(self):
        return 5 if self.order == 4 else self.order

    def stage_coefficients(self):
        """Uniform (state_weights, residual_weights) view of all stages."""
        if self.order == 4:
            return _RK4_STAGES
        rows = []
        for i, (arow, brow) in enumerate(zip(_ALPHA[self.order], _BETA[self.order])):
            aw = [(m, a) for m, a in enumerate(arow) if a != 0.0]
            bw = [(m, b) for m, b in enumerate(brow) if b != 0.0]
            rows.append((aw, bw))
        return rows


def scheme_for_degree(k):
    """The paired time integrator: k=1 -> RK2, k=2 -> RK3, k=3 -> RK4."""
    return RkScheme({1: 2, 2: 3}.get(k, 4))


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.15
    t_final: float = 1.0
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must be in (0, 1)")


def compute_dt(field_, mesh, ops, params, control):
    """CFL time step.

    1D: dt = CFL min_i (xi_1 - xi_0) dx_i / Lambda_x.
    2D: the per-direction inverse time scales add, so
    dt = CFL (xi_1 - xi_0) / (Lambda_x/dx + Lambda_y/dy).
    """
    W = cons_to_prim(np.asarray(field_, dtype=float), params)
    span = ops.nodes[1] - ops.nodes[0]
    if isinstance(mesh, Mesh1D):
        lam = dgsolver.max_signal_speed(W, params, "x")
        if lam == 0.0:
            raise AdmissibilityError("zero signal speed; cannot advance")
        dt = control.cfl * span * float(np.min(mesh.widths)) / lam
    else:
        lx = dgsolver.max_signal_speed(W, params, "x")
        ly = dgsolver.max_signal_speed(W, params, "y")
        if lx == 0.0 and ly == 0.0:
            raise AdmissibilityError("zero signal speed; cannot advance")
        dt = control.cfl * span / (
            lx / float(np.min(mesh.widths_x)) + ly / float(np.min(mesh.widths_y))
        )
    return dt


def _limit(field_, mesh, ops, tvb_m, eps):
    if tvb_m is not None:
        field_ = dgsolver.slope_limit(field_, mesh, ops, tvb_m)
    return dgsolver.bound_preserving_limit(field_, mesh, ops, eps)


def stage_abscissae(scheme):
    """Stage times as fractions of dt, from the convex stage structure."""
    c = [0.0]
    for aw, bw in scheme.stage_coefficients():
        c.append(sum(a * c[m] for m, a in aw) + sum(b for _, b in bw))
    return c


def step(field_, scheme, dt, residual, limiter=None, t=0.0):
    """One SSP-RK step; the limiter runs after every stage update.

    residual is called as residual(state, stage_time) so time-dependent
    forcings retain the design temporal order.
    """
    states = [np.asarray(field_, dtype=float)]
    rhs = [None] * (scheme.stages + 1)
    c = stage_abscissae(scheme)
    for aw, bw in scheme.stage_coefficients():
        acc = np.zeros_like(states[0])
        for m, a in aw:
            acc += a * states[m]
        for m, b in bw:
            if rhs[m] is None:
                rhs[m] = residual(states[m], t + c[m] * dt)
            acc += (b * dt) * rhs[m]
        if limiter is not None:
            acc = limiter(acc)
        states.append(acc)
    return states[-1]


def integrate(field_, mesh, ops, params, scheme, control, residual=None,
              tvb_m=0.0, bp_eps=1e-13, forcing=None, interface_flux="llf",
              callback=None, callback_every=1):
    """Advance to t_final; returns (field, times, dts).

    callback(t, field, step_index) fires after accepted steps on the given
    cadence and once more at the final time.
    """
    field_ = np.asarray(field_, dtype=float)
    if residual is None:
        res_fn = dgsolver.residual_1d if isinstance(mesh, Mesh1D) else dgsolver.residual_2d

        def residual(u, t):
            return res_fn(u, mesh, ops, params, forcing=forcing, t=t, interface_flux=interface_flux)

    def limiter(u):
        return _limit(u, mesh, ops, tvb_m, bp_eps)

    t = 0.0
    times = [t]
    dts = []
    if callback is not None:
        callback(t, field_, 0)
    nstep = 0
    while t < control.t_final - 1e-14:
        dt = compute_dt(field_, mesh, ops, params, control)
        dt = min(dt, control.t_final - t)
        try:
            field_ = step(field_, scheme, dt, residual, limiter, t=t)
        except AdmissibilityError as exc:
            raise AdmissibilityError(
                f"step {nstep} at t={t:.6g} failed: {exc}"
            ) from exc
        t += dt
        nstep += 1
        times.append(t)
        dts.append(dt)
        if callback is not None and nstep % callback_every == 0:
            callback(t, field_, nstep)
        if nstep >= control.max_steps:
            raise RuntimeError(f"max_steps={control.max_steps} exceeded at t={t:.6g}")
    if callback is not None and nstep % callback_every != 0:
        callback(t, field_, nstep)
    return field_, np.array(times), np.array(dts)
