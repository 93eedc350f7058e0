"""Semi-discrete DG residuals on tensor-product Gauss-Lobatto grids.

Fields are stored nodally: 1D shape (N, k+1, 18), 2D shape
(Nx, Ny, k+1, k+1, 18) with node index p along x and q along y. The
volume terms are flux-differenced with the entropy-conservative two-point
flux; interface coupling is LLF by default (entropy stable) or EC.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entflux import ec_flux_full, em_entropy, fluid_entropy, llf_flux
from .physflux import (
    full_flux,
    fluid_max_speed,
    lorentz_source,
    maxwell_max_speed,
    resistive_source,
)
from .state import EM, AdmissibilityError, cons_to_prim, prim_to_cons

_BC_TAGS_1D = ("periodic", "neumann")
_BC_TAGS_2D = ("periodic", "neumann", "conducting_wall")

# Mirror components for a conducting wall with normal along y: the normal
# fluid momenta, the normal magnetic field, and the tangential electric
# field change sign; everything else is copied.
_WALL_FLIP_Y = np.ones(18)
_WALL_FLIP_Y[[2, 7, 11, 13, 15]] = -1.0


@dataclass(frozen=True)
class Mesh1D:
    """Interval mesh: cell edges and one boundary tag for both ends."""

    edges: np.ndarray
    bc: str = "periodic"

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        object.__setattr__(self, "edges", edges)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be strictly increasing, length >= 2")
        if self.bc not in _BC_TAGS_1D:
            raise ValueError(f"unknown boundary tag {self.bc!r}")

    @property
    def n(self):
        return self.edges.size - 1

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])


@dataclass(frozen=True)
class Mesh2D:
    """Tensor-product mesh with per-direction boundary tags."""

    edges_x: np.ndarray
    edges_y: np.ndarray
    bc_x: str = "periodic"
    bc_y: str = "periodic"

    def __post_init__(self):
        for name in ("edges_x", "edges_y"):
            e = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, e)
            if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
                raise ValueError(f"{name} must be strictly increasing")
        for tag in (self.bc_x, self.bc_y):
            if tag not in _BC_TAGS_2D:
                raise ValueError(f"unknown boundary tag {tag!r}")

    @property
    def nx(self):
        return self.edges_x.size - 1

    @property
    def ny(self):
        return self.edges_y.size - 1

    @property
    def widths_x(self):
        return np.diff(self.edges_x)

    @property
    def widths_y(self):
        return np.diff(self.edges_y)


def uniform_mesh_1d(xmin, xmax, n, bc="periodic"):
    return Mesh1D(np.linspace(xmin, xmax, n + 1), bc)


def uniform_mesh_2d(xmin, xmax, nx, ymin, ymax, ny, bc_x="periodic", bc_y="periodic"):
    return Mesh2D(np.linspace(xmin, xmax, nx + 1), np.linspace(ymin, ymax, ny + 1), bc_x, bc_y)


def node_coords_1d(mesh, ops):
    """Physical node positions, shape (N, k+1)."""
    centers = mesh.centers[:, None]
    return centers + 0.5 * mesh.widths[:, None] * ops.nodes[None, :]


def node_coords_2d(mesh, ops):
    """(X, Y) each of shape (Nx, Ny, k+1, k+1)."""
    x = node_coords_1d(Mesh1D(mesh.edges_x, "neumann"), ops)
    y = node_coords_1d(Mesh1D(mesh.edges_y, "neumann"), ops)
    X = x[:, None, :, None]
    Y = y[None, :, None, :]
    shape = (mesh.nx, mesh.ny, ops.nodes.size, ops.nodes.size)
    return np.broadcast_to(X, shape).copy(), np.broadcast_to(Y, shape).copy()


def project_initial(mesh, ops, ic, params):
    """Collocate a primitive-state initial condition at the mapped GLL nodes.

    ic maps coordinate arrays to stacked 18-component primitives; the
    result is converted to conserved variables.  Evaluation points are
    nudged fractionally toward each cell's center so that a discontinuity
    aligned with a cell edge lands between cells (an interface jump) rather
    than inside one of them.
    """
    shift = 1e-9
    if isinstance(mesh, Mesh1D):
        x = node_coords_1d(mesh, ops)
        xc = mesh.centers[:, None]
        W = np.asarray(ic(x + shift * (xc - x)), dtype=float)
    else:
        X, Y = node_coords_2d(mesh, ops)
        xc = 0.5 * (mesh.edges_x[:-1] + mesh.edges_x[1:])[:, None, None, None]
        yc = 0.5 * (mesh.edges_y[:-1] + mesh.edges_y[1:])[None, :, None, None]
        W = np.asarray(
            ic(X + shift * (xc - X), Y + shift * (yc - Y)), dtype=float
        )
    bad = ~((W[..., 0] > 0) & (W[..., 4] > 0) & (W[..., 5] > 0) & (W[..., 9] > 0))
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        raise AdmissibilityError(f"initial condition inadmissible at node index {idx}")
    return prim_to_cons(W, params)


def apply_boundary(trace, tag, flip_normal_y=False):
    """Ghost state for one boundary trace.

    neumann copies the interior trace; conducting_wall mirrors it (normal
    momentum, normal B, tangential E negated). Periodic wrap is handled by
    the residual assembly directly, not here.
    """
    if tag == "neumann":
        return trace
    if tag == "conducting_wall":
        if not flip_normal_y:
            raise ValueError("conducting_wall is only supported on y boundaries")
        return trace * _WALL_FLIP_Y
    raise ValueError(f"unknown boundary tag {tag!r}")


def _interface_states(bc, axis_trace):
    """Left/right states at the N+1 interfaces along one direction.

    axis_trace is a pair (minus, plus) of functions extracting the
    high-side and low-side element traces.
    """
    Um, Up = axis_trace
    n = Um.shape[0]
    shape = (n + 1,) + Um.shape[1:]
    UL = np.empty(shape)
    UR = np.empty(shape)
    UL[1:] = Um
    UR[:-1] = Up
    if bc == "periodic":
        UL[0] = Um[-1]
        UR[-1] = Up[0]
    elif bc == "neumann":
        UL[0] = UR[0]
        UR[-1] = UL[-1]
    elif bc == "conducting_wall":
        UL[0] = UR[0] * _WALL_FLIP_Y
        UR[-1] = UL[-1] * _WALL_FLIP_Y
    else:
        raise ValueError(f"unknown boundary tag {bc!r}")
    return UL, UR


def _numerical_flux(UL, UR, WL, WR, params, direction, kind):
    if kind == "llf":
        return llf_flux(UL, UR, WL, WR, params, direction)
    if kind == "ec":
        return ec_flux_full(WL, WR, params, direction)
    raise ValueError(f"unknown interface flux {kind!r}")


def _volume_terms(field, W, ops, params, direction, node_axis):
    """2 sum_m D_jm F_EC(U_j, U_m), flux-differenced over one node axis.

    Returns the bracketed volume contribution (reference-element scaled)
    and the pointwise physical fluxes f(U_j) reused by the surface term.
    """
    kp = ops.nodes.size
    Wn = np.moveaxis(W, node_axis, 0)
    Un = np.moveaxis(field, node_axis, 0)
    fpt = np.stack([full_flux(Wn[j], Un[j], params, direction) for j in range(kp)])
    vol = np.zeros_like(fpt)
    for j in range(kp):
        vol[j] += 2.0 * ops.D[j, j] * fpt[j]
        for m in range(j + 1, kp):
            F = ec_flux_full(Wn[j], Wn[m], params, direction)
            vol[j] += 2.0 * ops.D[j, m] * F
            vol[m] += 2.0 * ops.D[m, j] * F
    return vol, fpt


def _surface_terms(vol, fpt, fstar, ops):
    """Subtract the SBP boundary correction (tau_j/omega_j)(f_j - f*_j).

    vol and fpt are node-major; fstar holds the interface fluxes with
    fstar[i] at the low face of element i and fstar[i+1] at its high face.
    """
    w0 = ops.weights[0]
    wk = ops.weights[-1]
    vol[0] -= (-1.0 / w0) * (fpt[0] - fstar[:-1])
    vol[-1] -= (1.0 / wk) * (fpt[-1] - fstar[1:])
    return vol


def residual_1d(field, mesh, ops, params, forcing=None, t=0.0, interface_flux="llf"):
    """dU/dt of the 1D scheme: flux-differenced volume terms, SBP surface
    correction with the chosen interface flux, plus Lorentz, resistive and
    optional forcing sources evaluated at the nodes."""
    field = np.asarray(field, dtype=float)
    W = cons_to_prim(field, params)
    vol, fpt = _volume_terms(field, W, ops, params, "x", node_axis=1)
    UL, UR = _interface_states(mesh.bc, (field[:, -1], field[:, 0]))
    WL, WR = _interface_states(mesh.bc, (W[:, -1], W[:, 0]))
    fstar = _numerical_flux(UL, UR, WL, WR, params, "x", interface_flux)
    vol = _surface_terms(vol, fpt, fstar, ops)
    res = np.moveaxis(vol, 0, 1) * (-2.0 / mesh.widths[:, None, None])
    res += lorentz_source(field, W, params)
    if params.eta != 0.0:
        res += resistive_source(field, W, params)
    if forcing is not None:
        res += forcing(node_coords_1d(mesh, ops), t)
    return res


def residual_2d(field, mesh, ops, params, forcing=None, t=0.0, interface_flux="llf"):
    """Tensor-product 2D residual: x-sweeps along fixed q, y-sweeps along
    fixed p, each the 1D operator applied line by line."""
    field = np.asarray(field, dtype=float)
    W = cons_to_prim(field, params)
    res = np.zeros_like(field)

    # x direction: node axis p (axis 2); interfaces stacked along axis 0.
    vol, fpt = _volume_terms(field, W, ops, params, "x", node_axis=2)
    UL, UR = _interface_states(mesh.bc_x, (field[:, :, -1], field[:, :, 0]))
    WL, WR = _interface_states(mesh.bc_x, (W[:, :, -1], W[:, :, 0]))
    fstar = _numerical_flux(UL, UR, WL, WR, params, "x", interface_flux)
    vol = _surface_terms(vol, fpt, fstar, ops)
    res -= np.moveaxis(vol, 0, 2) * (2.0 / mesh.widths_x[:, None, None, None, None])

    # y direction: node axis q (axis 3); interfaces along the y element axis.
    vol, fpt = _volume_terms(field, W, ops, params, "y", node_axis=3)
    Um = np.moveaxis(field[:, :, :, -1], 1, 0)
    Up = np.moveaxis(field[:, :, :, 0], 1, 0)
    UL, UR = _interface_states(mesh.bc_y, (Um, Up))
    Wm = np.moveaxis(W[:, :, :, -1], 1, 0)
    Wp = np.moveaxis(W[:, :, :, 0], 1, 0)
    WL, WR = _interface_states(mesh.bc_y, (Wm, Wp))
    fstar = _numerical_flux(UL, UR, WL, WR, params, "y", interface_flux)
    w0 = ops.weights[0]
    wk = ops.weights[-1]
    vol[0] -= (-1.0 / w0) * (fpt[0] - np.swapaxes(fstar[:-1], 0, 1))
    vol[-1] -= (1.0 / wk) * (fpt[-1] - np.swapaxes(fstar[1:], 0, 1))
    res -= np.moveaxis(vol, 0, 3) * (2.0 / mesh.widths_y[None, :, None, None, None])

    res += lorentz_source(field, W, params)
    if params.eta != 0.0:
        res += resistive_source(field, W, params)
    if forcing is not None:
        X, Y = node_coords_2d(mesh, ops)
        res += forcing(X, Y, t)
    return res


def cell_averages(field, ops):
    """Quadrature cell means over the node axes (reference measure 2 each)."""
    w = ops.weights
    if field.ndim == 3:
        return np.einsum("ijc,j->ic", field, w) / 2.0
    return np.einsum("xypqc,p,q->xyc", field, w, w) / 4.0


def _minmod_tvb(a, b, c, m_dx2):
    """TVB minmod: keep a where |a| <= M dx^2, else minmod(a, b, c)."""
    keep = np.abs(a) <= m_dx2
    same = (np.sign(a) == np.sign(b)) & (np.sign(a) == np.sign(c))
    mm = np.sign(a) * np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c)))
    return np.where(keep, a, np.where(same, mm, 0.0))


def _neighbor_means(ubar, bc, wall_axis_y=False):
    """Per-cell neighbor averages along the leading axis, honoring the BC."""
    prev = np.empty_like(ubar)
    nxt = np.empty_like(ubar)
    prev[1:] = ubar[:-1]
    nxt[:-1] = ubar[1:]
    if bc == "periodic":
        prev[0] = ubar[-1]
        nxt[-1] = ubar[0]
    elif bc == "neumann":
        prev[0] = ubar[0]
        nxt[-1] = ubar[-1]
    elif bc == "conducting_wall":
        prev[0] = ubar[0] * _WALL_FLIP_Y
        nxt[-1] = ubar[-1] * _WALL_FLIP_Y
    else:
        raise ValueError(f"unknown boundary tag {bc!r}")
    return prev, nxt


def slope_limit_1d(field, mesh, ops, tvb_m=0.0):
    """TVB slope limiter: troubled cells are replaced by a minmod-limited
    linear profile about the (unchanged) cell average."""
    field = np.asarray(field, dtype=float)
    w, xi = ops.weights, ops.nodes
    ubar = cell_averages(field, ops)
    prev, nxt = _neighbor_means(ubar, mesh.bc)
    dminus = ubar - prev
    dplus = nxt - ubar
    m_dx2 = tvb_m * mesh.widths[:, None] ** 2
    du_l = ubar - field[:, 0]
    du_r = field[:, -1] - ubar
    lim_l = _minmod_tvb(du_l, dplus, dminus, m_dx2)
    lim_r = _minmod_tvb(du_r, dplus, dminus, m_dx2)
    troubled = (lim_l != du_l) | (lim_r != du_r)
    # linear L2 slope in the reference coordinate, then limit it
    a1 = np.einsum("ijc,j,j->ic", field, w, xi) / np.dot(w, xi * xi)
    s = _minmod_tvb(a1, dplus, dminus, m_dx2)
    linear = ubar[:, None, :] + xi[None, :, None] * s[:, None, :]
    return np.where(troubled[:, None, :], linear, field)


def slope_limit_2d(field, mesh, ops, tvb_m=0.0):
    """Directional TVB limiter: the per-cell bilinear part is limited
    against x- and y-neighbor averages; troubled cells are replaced by
    ubar + xi s_x + eta s_y."""
    field = np.asarray(field, dtype=float)
    w, xi = ops.weights, ops.nodes
    wxx = np.dot(w, xi * xi)
    ubar = cell_averages(field, ops)
    px, nx = _neighbor_means(ubar, mesh.bc_x)
    ubar_y = ubar.swapaxes(0, 1)
    py, ny = _neighbor_means(ubar_y, mesh.bc_y)
    py, ny = py.swapaxes(0, 1), ny.swapaxes(0, 1)
    dxm, dxp = ubar - px, nx - ubar
    dym, dyp = ubar - py, ny - ubar
    mx = tvb_m * mesh.widths_x[:, None, None] ** 2
    my = tvb_m * mesh.widths_y[None, :, None] ** 2

    # face-mean deviations drive the troubled-cell test
    fx_l = ubar - np.einsum("xyqc,q->xyc", field[:, :, 0], w) / 2.0
    fx_r = np.einsum("xyqc,q->xyc", field[:, :, -1], w) / 2.0 - ubar
    fy_l = ubar - np.einsum("xypc,p->xyc", field[:, :, :, 0], w) / 2.0
    fy_r = np.einsum("xypc,p->xyc", field[:, :, :, -1], w) / 2.0 - ubar
    bad_x = (_minmod_tvb(fx_l, dxp, dxm, mx) != fx_l) | (_minmod_tvb(fx_r, dxp, dxm, mx) != fx_r)
    bad_y = (_minmod_tvb(fy_l, dyp, dym, my) != fy_l) | (_minmod_tvb(fy_r, dyp, dym, my) != fy_r)
    troubled = bad_x | bad_y

    ax = np.einsum("xypqc,p,q->xyc", field, w * xi, w) / (2.0 * wxx)
    ay = np.einsum("xypqc,p,q->xyc", field, w, w * xi) / (2.0 * wxx)
    sx = _minmod_tvb(ax, dxp, dxm, mx)
    sy = _minmod_tvb(ay, dyp, dym, my)
    linear = (
        ubar[:, :, None, None, :]
        + xi[None, None, :, None, None] * sx[:, :, None, None, :]
        + xi[None, None, None, :, None] * sy[:, :, None, None, :]
    )
    return np.where(troubled[:, :, None, None, :], linear, field)


def slope_limit(field, mesh, ops, tvb_m=0.0):
    if isinstance(mesh, Mesh1D):
        return slope_limit_1d(field, mesh, ops, tvb_m)
    return slope_limit_2d(field, mesh, ops, tvb_m)


def _species_q(U5):
    """Admissibility margin E - sqrt(D^2 + |M|^2) of one species block."""
    return U5[..., 4] - np.sqrt(U5[..., 0] ** 2 + np.sum(U5[..., 1:4] ** 2, axis=-1))


def bound_preserving_limit(field, mesh, ops, eps=1e-13):
    """Scale nodal fluid states toward the cell average until D >= eps and
    E - sqrt(D^2+|M|^2) >= eps everywhere; cell averages and the EM block
    are untouched. Fails hard if a cell average itself is inadmissible."""
    field = np.asarray(field, dtype=float)
    orig_shape = field.shape
    if field.ndim == 5:
        flat = field.reshape(field.shape[0] * field.shape[1], -1, 18)
    else:
        flat = field.copy()
    kp = ops.weights.size
    if field.ndim == 5:
        wq = np.outer(ops.weights, ops.weights).ravel() / 4.0
    else:
        wq = ops.weights / 2.0
    out = flat.copy()
    ubar = np.einsum("inc,n->ic", flat, wq)
    for base in (0, 5):
        blk = slice(base, base + 5)
        ub = ubar[:, blk]
        if np.any(ub[:, 0] < eps) or np.any(_species_q(ub) < eps):
            raise AdmissibilityError("cell-average state outside the admissible set")
        un = out[:, :, blk]
        # stage 1: pull D toward the mean where a node dips below eps
        dmin = un[..., 0].min(axis=1)
        need = dmin < eps
        th1 = np.ones(un.shape[0])
        th1[need] = (ub[need, 0] - eps) / (ub[need, 0] - dmin[need])
        un[..., 0] = ub[:, None, 0] + th1[:, None] * (un[..., 0] - ub[:, None, 0])
        # stage 2: pull the whole block where the energy margin fails
        q = _species_q(un)
        qmin = q.min(axis=1)
        need = qmin < eps
        if np.any(need):
            qb = _species_q(ub[need])
            th2 = (qb - eps) / (qb - qmin[need])
            un[need] = ub[need, None, :] + th2[:, None, None] * (un[need] - ub[need, None, :])
        out[:, :, blk] = un
    return out.reshape(orig_shape)


def total_entropy(field, mesh, ops, params):
    """(fluid, EM) entropy integrals over the domain by GLL quadrature."""
    field = np.asarray(field, dtype=float)
    W = cons_to_prim(field, params)
    ent_i, _, _ = fluid_entropy(W[..., 0:5], params.gamma_i)
    ent_e, _, _ = fluid_entropy(W[..., 5:10], params.gamma_e)
    ent_m = em_entropy(field[..., EM])
    return (_integrate(ent_i + ent_e, mesh, ops), _integrate(ent_m, mesh, ops))


def integrate_components(field, mesh, ops):
    """Domain integral of each of the 18 conserved components."""
    field = np.asarray(field, dtype=float)
    return np.stack([_integrate(field[..., c], mesh, ops) for c in range(18)])


def _integrate(values, mesh, ops):
    w = ops.weights
    if isinstance(mesh, Mesh1D):
        return float(np.einsum("ij,j,i->", values, w, mesh.widths) / 2.0)
    jac = np.multiply.outer(mesh.widths_x, mesh.widths_y) / 4.0
    return float(np.einsum("xypq,p,q,xy->", values, w, w, jac))


def max_signal_speed(W, params, direction):
    """Largest wave speed over all nodes: fluids and the Maxwell block."""
    si = fluid_max_speed(W[..., 0:5], params.gamma_i, direction)
    se = fluid_max_speed(W[..., 5:10], params.gamma_e, direction)
    return max(float(np.max(si)), float(np.max(se)), maxwell_max_speed(params))
