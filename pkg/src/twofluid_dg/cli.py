"""Batch driver: run cases, convergence sweeps and property verification.

Outputs are plain-text delimited tables with a `#`-prefixed metadata
block; the manifest is flat key=value. Exit codes: 0 success, 1 usage
error, 2 runtime failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, cases, dgsolver, entflux, physflux, sbp, state, timeint
from .state import AdmissibilityError

_FMT = "%.17e"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser():
    p = _Parser(prog="twofluid-dg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--case", required=True, choices=cases.CASE_NAMES)
        sp.add_argument("--order", type=str, default=None,
                        help="polynomial degree k (1-3); comma list for sweep")
        sp.add_argument("--cells", type=str, default=None, help="cell count (comma list for sweep)")
        sp.add_argument("--cells-y", type=int, default=None)
        sp.add_argument("--cfl", type=float, default=None,
                        help="CFL number (default: the case's own)")
        sp.add_argument("--t-final", type=float, default=None)
        sp.add_argument("--tvb", type=float, default=None, help="TVB constant override")
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--snapshots", type=int, default=10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--serial", action="store_true", help="single-threaded execution")
        sp.add_argument("--config", type=str, default=None, help="key=value config file")

    run = sub.add_parser("run", help="integrate one configuration")
    common(run)
    sweep = sub.add_parser("sweep", help="convergence sweep over resolutions")
    common(sweep)
    ver = sub.add_parser("verify", help="run the property suites")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--serial", action="store_true")
    return p


def _apply_config(args):
    """File values fill in anything the command line left at its default."""
    if not args.config:
        return args
    cp = configparser.ConfigParser()
    read = cp.read(args.config)
    if not read:
        raise _UsageError(f"config file {args.config} not found")
    section = args.case if cp.has_section(args.case) else configparser.DEFAULTSECT
    conv = {"order": int, "cells": str, "cells_y": int, "cfl": float,
            "t_final": float, "tvb": float, "out": str, "snapshots": int, "seed": int}
    defaults = {"snapshots": 10, "seed": 0}
    for key, cast in conv.items():
        if cp.has_option(section, key):
            current = getattr(args, key)
            if current is None or current == defaults.get(key):
                setattr(args, key, cast(cp.get(section, key)))
    return args


def _prim_tail(W):
    """Derived per-species columns: rho, p and Lorentz factor."""
    gi = state.lorentz(W[..., 1], W[..., 2], W[..., 3])
    ge = state.lorentz(W[..., 6], W[..., 7], W[..., 8])
    return np.stack([W[..., 0], W[..., 4], gi, W[..., 5], W[..., 9], ge], axis=-1)


_STATE_COLS = [
    "D_i", "Mx_i", "My_i", "Mz_i", "E_i",
    "D_e", "Mx_e", "My_e", "Mz_e", "E_e",
    "Bx", "By", "Bz", "Ex", "Ey", "Ez", "phi", "psi",
]
_TAIL_COLS = ["rho_i", "p_i", "Gamma_i", "rho_e", "p_e", "Gamma_e"]


def write_snapshot(path, field, mesh, ops, params, meta):
    """One row per node: coordinates, 18 conserved components, derived
    primitives. The metadata block is `#`-prefixed key=value lines."""
    field = np.asarray(field, dtype=float)
    W = state.cons_to_prim(field, params)
    tail = _prim_tail(W)
    if isinstance(mesh, dgsolver.Mesh1D):
        x = dgsolver.node_coords_1d(mesh, ops)
        coords = x.reshape(-1, 1)
        coord_cols = ["x"]
    else:
        X, Y = dgsolver.node_coords_2d(mesh, ops)
        coords = np.stack([X.reshape(-1), Y.reshape(-1)], axis=-1)
        coord_cols = ["x", "y"]
    rows = np.hstack([coords, field.reshape(-1, 18), tail.reshape(-1, 6)])
    with open(path, "w") as fh:
        for key, val in meta.items():
            fh.write(f"# {key}={val}\n")
        fh.write(" ".join(coord_cols + _STATE_COLS + _TAIL_COLS) + "\n")
        np.savetxt(fh, rows, fmt=_FMT)


def load_snapshot(path):
    """(meta, header, data) for a snapshot written by write_snapshot."""
    meta = {}
    with open(path) as fh:
        line = fh.readline()
        while line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val
            line = fh.readline()
        header = line.split()
        data = np.loadtxt(fh)
    return meta, header, np.atleast_2d(data)


def _write_manifest(path, entries):
    with open(path, "w") as fh:
        for key, val in entries.items():
            fh.write(f"{key}={val}\n")


def _resolve_run(args):
    case = cases.get_case(args.case)
    try:
        order = int(args.order) if args.order is not None else 2
    except ValueError:
        raise _UsageError(f"invalid order {args.order!r}")
    if order not in (1, 2, 3):
        raise _UsageError("order must be 1, 2 or 3")
    if args.cells is not None:
        nx = int(args.cells)
    else:
        nx = case.default_cells[0]
    if case.dim == 2:
        ny = args.cells_y if args.cells_y is not None else (
            case.default_cells[1] if args.cells is None else nx)
        cells = (nx, ny)
    else:
        cells = (nx,)
    tvb = case.tvb_m if args.tvb is None else args.tvb
    if args.cfl is None:
        args.cfl = case.cfl
    return case, order, cells, tvb


def cmd_run(args):
    case, order, cells, tvb = _resolve_run(args)
    outdir = Path(args.out or f"out/{case.name}")
    outdir.mkdir(parents=True, exist_ok=True)
    ops = sbp.build_operators(order)
    mesh = case.build_mesh(cells)
    duration = (args.t_final if args.t_final is not None
                else case.t_final - case.t_start)

    manifest = {
        "case": case.name, "order": order, "cells": ",".join(map(str, cells)),
        "cfl": args.cfl, "t_start": case.t_start, "t_final": case.t_start + duration,
        "tvb": tvb, "snapshots": args.snapshots, "seed": args.seed,
        "serial": bool(args.serial), "version": __version__,
        "gamma_i": case.params.gamma_i, "gamma_e": case.params.gamma_e,
        "r_i": case.params.r_i, "r_e": case.params.r_e,
        "eta": case.params.eta, "source_scale": case.params.source_scale,
    }
    _write_manifest(outdir / "manifest.txt", manifest)

    series_path = outdir / "timeseries.txt"
    series = open(series_path, "w")
    diag_cols = list(case.diagnostics)
    cols = ["t", "dt", "total_fluid_entropy", "total_em_entropy"] + _STATE_COLS + diag_cols
    for key, val in manifest.items():
        series.write(f"# {key}={val}\n")
    series.write(" ".join(cols) + "\n")

    snap_times = np.linspace(0.0, duration, max(args.snapshots, 1) + 1)[1:]
    snap_state = {"next": 0, "count": 0, "last_t": None}

    def snap_meta(t):
        meta = dict(manifest)
        meta["t"] = repr(case.t_start + t)
        return meta

    last_dt = {"dt": 0.0}

    def callback(t, field, nstep):
        ent_f, ent_m = dgsolver.total_entropy(field, mesh, ops, case.params)
        totals = dgsolver.integrate_components(field, mesh, ops)
        row = [case.t_start + t, last_dt["dt"], ent_f, ent_m] + list(totals)
        for diag in diag_cols:
            if diag == "reconnection_flux":
                row.append(cases.reconnection_flux(field, mesh, ops))
        series.write(" ".join(_FMT % v for v in row) + "\n")
        while snap_state["next"] < len(snap_times) and t >= snap_times[snap_state["next"]] - 1e-12:
            write_snapshot(outdir / f"snapshot_{snap_state['count']:04d}.txt",
                           field, mesh, ops, case.params, snap_meta(t))
            snap_state["next"] += 1
            snap_state["count"] += 1

    U0 = dgsolver.project_initial(mesh, ops, case.ic, case.params)
    control = timeint.StepControl(cfl=args.cfl, t_final=duration)
    scheme = timeint.scheme_for_degree(order)
    forcing = case.forcing
    if forcing is not None and case.t_start != 0.0:
        base = forcing
        forcing = lambda x, t: base(x, t + case.t_start)

    wall = time.perf_counter()

    def residual(u, t):
        res_fn = dgsolver.residual_1d if case.dim == 1 else dgsolver.residual_2d
        return res_fn(u, mesh, ops, case.params, forcing=forcing, t=t)

    # wrap integrate's dt bookkeeping through the callback closure
    def tracking_callback(t, field, nstep):
        callback(t, field, nstep)

    try:
        Uf, times, dts = timeint.integrate(
            U0, mesh, ops, case.params, scheme, control, residual=residual,
            tvb_m=tvb, callback=_DtTracker(tracking_callback, last_dt), callback_every=1)
    except AdmissibilityError as exc:
        series.close()
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    series.close()
    write_snapshot(outdir / "final.txt", Uf, mesh, ops, case.params,
                   snap_meta(duration))
    print(f"{case.name}: {len(dts)} steps to t={case.t_start + duration:g} "
          f"in {time.perf_counter() - wall:.1f}s -> {outdir}")
    return 0


class _DtTracker:
    """Callback shim keeping the most recent dt visible to the writer."""

    def __init__(self, inner, slot):
        self.inner = inner
        self.slot = slot
        self.t_prev = 0.0

    def __call__(self, t, field, nstep):
        if nstep > 0:
            self.slot["dt"] = t - self.t_prev
        self.t_prev = t
        self.inner(t, field, nstep)


def cmd_sweep(args):
    case = cases.get_case(args.case)
    if case.exact is None:
        raise _UsageError(f"case {case.name} has no exact solution to sweep against")
    orders = [int(s) for s in str(args.order or "1,2,3").split(",")]
    res = [int(s) for s in (args.cells or "16,32,64,128").split(",")]
    outdir = Path(args.out or f"out/{case.name}_sweep")
    outdir.mkdir(parents=True, exist_ok=True)
    report = cases.convergence_sweep(case, orders, res, cfl=args.cfl, node_sum=True)
    path = outdir / "convergence.txt"
    with open(path, "w") as fh:
        fh.write(f"# case={case.name}\n# component={case.error_component}\n")
        fh.write(f"# version={__version__}\n")
        fh.write("order N l1_error rate\n")
        for order in orders:
            ns, errs, rates = report[order]
            for j, (n, e) in enumerate(zip(ns, errs)):
                rate = rates[j - 1] if j > 0 else float("nan")
                fh.write(f"{order} {n} {_FMT % e} {rate:.4f}\n")
    for order in orders:
        ns, errs, rates = report[order]
        print(f"order k={order}: errors {['%.3e' % e for e in errs]} rates "
              f"{['%.2f' % r for r in rates]}")
    print(f"wrote {path}")
    return 0


def _verify_suites(seed):
    rng = np.random.default_rng(seed)
    results = []

    def record(name, count, worst, tol):
        ok = worst < tol
        results.append((name, count, worst, tol, ok))

    for k in (1, 2, 3):
        ops = sbp.build_operators(k)
        worst = max(
            np.abs(ops.S + ops.S.T - ops.B).max(),
            np.abs(ops.S - ops.M @ ops.D).max(),
            np.abs(ops.D.sum(axis=1)).max(),
            np.abs(ops.S.sum(axis=0) - ops.tau).max(),
        )
        record(f"sbp_identities_k{k}", 4, float(worst), 1e-13)

    params = state.GasParams(gamma_i=5 / 3, gamma_e=5 / 3, r_i=1.0, r_e=-2.0)
    n = 10_000
    WL = _random_primitives(rng, n)
    WR = _random_primitives(rng, n)
    UL = state.prim_to_cons(WL, params)
    UR = state.prim_to_cons(WR, params)
    for direction in ("x", "y"):
        F = entflux.ec_flux_full(WL, WR, params, direction)
        VL = entflux.entropy_vars(UL, WL, params)
        VR = entflux.entropy_vars(UR, WR, params)
        psiL = np.stack(entflux.entropy_potential(UL, WL, params, direction), -1)
        psiR = np.stack(entflux.entropy_potential(UR, WR, params, direction), -1)
        resid = 0.0
        for blk, sl in (("i", state.ION), ("e", state.ELE), ("m", state.EM)):
            idx = {"i": 0, "e": 1, "m": 2}[blk]
            r = np.abs(np.sum((VR[:, sl] - VL[:, sl]) * F[:, sl], -1)
                       - (psiR[:, idx] - psiL[:, idx]))
            scale = 1.0 + np.abs(F[:, sl]).sum(-1)
            resid = max(resid, float((r / scale).max()))
        record(f"ec_identity_{direction}", n, resid, 1e-12)
        Fl = entflux.llf_flux(UL, UR, WL, WR, params, direction)
        diss = np.sum((VR - VL) * Fl, -1) - (psiR - psiL).sum(-1)
        scale = 1.0 + np.abs(Fl).sum(-1)
        record(f"llf_dissipation_{direction}", n, float((diss / scale).max()), 1e-12)

    W = _random_primitives(rng, n)
    U = state.prim_to_cons(W, params)
    W2 = state.cons_to_prim(U, params)
    err = np.abs(W2 - W) / np.maximum(np.abs(W), 1.0)
    record("primitive_roundtrip", n, float(err.max()), 1e-9)

    worst = 0.0
    for direction in ("x", "y"):
        for i in range(100):
            Wi = _random_primitives(rng, 1)[0]
            lam, R = physflux.right_eigenvectors(Wi, params, direction)
            A = physflux.flux_jacobian_fd(Wi, params, direction)
            resid = np.linalg.norm(A @ R - R * lam[None, :]) / max(np.linalg.norm(A), 1.0)
            worst = max(worst, float(resid))
    record("eigen_validation", 200, worst, 1e-6)
    return results


def _random_primitives(rng, n, vmax=0.9):
    W = np.zeros((n, 18))
    for base in (0, 5):
        W[:, base] = rng.uniform(1e-2, 10.0, n)
        W[:, base + 4] = rng.uniform(1e-2, 10.0, n)
        v = rng.uniform(0.0, vmax, n)
        th = rng.uniform(0.0, np.pi, n)
        ph = rng.uniform(0.0, 2 * np.pi, n)
        W[:, base + 1] = v * np.sin(th) * np.cos(ph)
        W[:, base + 2] = v * np.sin(th) * np.sin(ph)
        W[:, base + 3] = v * np.cos(th)
    W[:, 10:16] = rng.standard_normal((n, 6))
    return W


def cmd_verify(args):
    results = _verify_suites(args.seed)
    failed = 0
    for name, count, worst, tol, ok in results:
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: {count} checks, worst residual {worst:.3e} (tol {tol:g})")
        failed += not ok
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return 0 if failed == 0 else 3


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            args = _apply_config(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_verify(args)
    except (_UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (AdmissibilityError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
