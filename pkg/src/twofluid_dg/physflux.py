"""Physical fluxes, source terms, eigenstructure and wave-speed estimates.

All routines accept stacked primitive/conserved arrays with the component
ordering of :mod:`twofluid_dg.state` and broadcast over leading axes.
Directions are the strings "x" and "y".
"""

from __future__ import annotations

import numpy as np

from .state import (
    ION, ELE, EM, NCOMP,
    AdmissibilityError, GasParams,
    enthalpy, sound_speed, lorentz, prim_to_cons_species,
)

_DIRS = {"x": 0, "y": 1}


def _check_direction(direction):
    if direction not in _DIRS:
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    return _DIRS[direction]


def fluid_flux(W, U, direction):
    """Flux of one fluid block: (D v_d, M v_d + p e_d, M_d)."""
    d = _check_direction(direction)
    W = np.asarray(W, dtype=float)
    U = np.asarray(U, dtype=float)
    vd = W[..., 1 + d]
    p = W[..., 4]
    F = U * vd[..., None]
    F[..., 1 + d] += p
    F[..., 4] = U[..., 1 + d]
    return F


def maxwell_matrix(params, direction):
    """8x8 symmetric flux matrix of the perfectly hyperbolic Maxwell block."""
    _check_direction(direction)
    k, c = params.kappa, params.chi
    A = np.zeros((8, 8))
    if direction == "x":
        # (kappa psi, -Ez, Ey, chi phi, Bz, -By, chi Ex, kappa Bx)
        A[0, 7] = k
        A[1, 5] = -1.0
        A[2, 4] = 1.0
        A[3, 6] = c
        A[4, 2] = 1.0
        A[5, 1] = -1.0
        A[6, 3] = c
        A[7, 0] = k
    else:
        # (Ez, kappa psi, -Ex, -Bz, chi phi, Bx, chi Ey, kappa By)
        A[0, 5] = 1.0
        A[1, 7] = k
        A[2, 3] = -1.0
        A[3, 2] = -1.0
        A[4, 6] = c
        A[5, 0] = 1.0
        A[6, 4] = c
        A[7, 1] = k
    return A


def maxwell_flux(Um, params, direction):
    """Linear Maxwell flux A_d @ Um; A_d is symmetric for both directions."""
    A = maxwell_matrix(params, direction)
    return np.asarray(Um, dtype=float) @ A.T


def full_flux(W, U, params, direction):
    """18-component physical flux from matching primitive/conserved arrays."""
    W = np.asarray(W, dtype=float)
    U = np.asarray(U, dtype=float)
    F = np.empty_like(U)
    F[..., ION] = fluid_flux(W[..., ION], U[..., ION], direction)
    F[..., ELE] = fluid_flux(W[..., ELE], U[..., ELE], direction)
    F[..., EM] = maxwell_flux(U[..., EM], params, direction)
    return F


def _charge_current(U, W, params):
    """(rho_c, j) from the lab-frame fluid densities; r D = r rho Gamma."""
    qi = params.r_i * U[..., 0]
    qe = params.r_e * U[..., 5]
    rho_c = qi + qe
    j = qi[..., None] * W[..., 1:4] + qe[..., None] * W[..., 6:9]
    return rho_c, j


def lorentz_source(U, W, params):
    """Lorentz force/work terms on the fluids and -j / chi rho_c on Maxwell.

    The current and charge sources carry params.source_scale; the fluid
    terms do not.
    """
    U = np.asarray(U, dtype=float)
    W = np.asarray(W, dtype=float)
    Evec = U[..., 13:16]
    Bvec = U[..., 10:13]
    S = np.zeros_like(U)
    for base, r in ((0, params.r_i), (5, params.r_e)):
        D = U[..., base]
        v = W[..., base + 1:base + 4]
        force = Evec + np.cross(v, Bvec)
        S[..., base + 1:base + 4] = (r * D)[..., None] * force
        S[..., base + 4] = r * D * np.sum(v * Evec, axis=-1)
    rho_c, j = _charge_current(U, W, params)
    S[..., 13:16] = -params.source_scale * j
    S[..., 16] = params.source_scale * params.chi * rho_c
    return S


def resistive_source(U, W, params):
    """Friction terms between the species; exactly antisymmetric, zero for eta=0.

    R_i = -eta omega_p^2/(r_i - r_e) (j - rho_0 Phi) on the ion momentum,
    with the matching energy term, and (R_e, R_e0) = -(R_i, R_i0).
    """
    U = np.asarray(U, dtype=float)
    W = np.asarray(W, dtype=float)
    S = np.zeros_like(U)
    if params.eta == 0.0:
        return S
    rho_i, rho_e = W[..., 0], W[..., 5]
    wp2 = params.r_i ** 2 * rho_i + params.r_e ** 2 * rho_e
    rho_c, j = _charge_current(U, W, params)
    Phi = (params.r_i * U[..., 0:1] * W[..., 1:4] + params.r_e * U[..., 5:6] * W[..., 6:9]) / wp2[..., None]
    Lam = (params.r_i ** 2 * U[..., 0] + params.r_e ** 2 * U[..., 5]) / wp2
    rho0 = Lam * rho_c - np.sum(j * Phi, axis=-1)
    coef = -params.eta * wp2 / (params.r_i - params.r_e)
    Ri = coef[..., None] * (j - rho0[..., None] * Phi)
    Ri0 = coef * (rho_c - rho0 * Lam)
    S[..., 1:4] = Ri
    S[..., 4] = Ri0
    S[..., 6:9] = -Ri
    S[..., 9] = -Ri0
    return S


def _fluid_eigs(W5, gamma, d):
    """Acoustic and material eigenvalues of one fluid block."""
    rho, p = W5[..., 0], W5[..., 4]
    v = W5[..., 1:4]
    vd = v[..., d]
    v2 = np.sum(v * v, axis=-1)
    c = sound_speed(rho, p, gamma)
    G = 1.0 / np.sqrt(1.0 - v2)
    Q = 1.0 - vd * vd - c * c * (v2 - vd * vd)
    if np.any(Q <= 0.0):
        raise AdmissibilityError("nonpositive acoustic discriminant Q")
    sq = (c / G) * np.sqrt(Q)
    den = 1.0 - c * c * v2
    lam_m = ((1.0 - c * c) * vd - sq) / den
    lam_p = ((1.0 - c * c) * vd + sq) / den
    return lam_m, vd, lam_p


def eigenvalues(W, params, direction):
    """All 18 eigenvalues in the ordering (ion 5, electron 5, Maxwell 8)."""
    d = _check_direction(direction)
    W = np.asarray(W, dtype=float)
    lam = np.empty(W.shape[:-1] + (NCOMP,))
    for base, gamma in ((0, params.gamma_i), (5, params.gamma_e)):
        lm, v, lp = _fluid_eigs(W[..., base:base + 5], gamma, d)
        lam[..., base] = lm
        lam[..., base + 1] = v
        lam[..., base + 2] = v
        lam[..., base + 3] = v
        lam[..., base + 4] = lp
    lam[..., 10:18] = np.array(
        [-params.chi, -params.kappa, -1.0, -1.0, 1.0, 1.0, params.kappa, params.chi]
    )
    return lam


def _dcons_dprim(W5, gamma):
    """Jacobian dU/dW of one species (5x5), single state."""
    rho, vx, vy, vz, p = W5
    v = np.array([vx, vy, vz])
    G = lorentz(vx, vy, vz)
    h = enthalpy(rho, p, gamma)
    k = gamma / (gamma - 1.0)
    w = rho * h * G * G
    J = np.zeros((5, 5))
    J[0, 0] = G
    J[0, 1:4] = rho * G ** 3 * v
    for i in range(3):
        J[1 + i, 0] = G * G * v[i]
        for jj in range(3):
            J[1 + i, 1 + jj] = w * (i == jj) + 2.0 * rho * h * G ** 4 * v[i] * v[jj]
        J[1 + i, 4] = k * G * G * v[i]
    J[4, 0] = G * G
    J[4, 1:4] = 2.0 * rho * h * G ** 4 * v
    J[4, 4] = k * G * G - 1.0
    return J


def _fluid_eigvec_prim(W5, gamma, d):
    """Right eigenvectors of the primitive-form fluid Jacobian (5x5)."""
    rho, vx, vy, vz, p = W5
    v = np.array([vx, vy, vz])
    G = lorentz(vx, vy, vz)
    h = enthalpy(rho, p, gamma)
    c = sound_speed(rho, p, gamma)
    vd = v[d]
    v2 = v @ v
    Q = 1.0 - vd * vd - c * c * (v2 - vd * vd)
    sq = np.sqrt(Q)
    R = np.zeros((5, 5))
    R[0, 0] = R[0, 4] = 1.0 / (c * c * h)
    R[0, 1] = 1.0
    R[4, 0] = R[4, 4] = 1.0
    # acoustic columns: perturbation of v_d, transverse velocity coupling
    R[1 + d, 0] = -sq / (c * h * G * rho)
    R[1 + d, 4] = sq / (c * h * G * rho)
    trans = [i for i in range(3) if i != d]
    for slot, i in enumerate(trans):
        denom = c * h * G * G * rho * (vd * vd - 1.0)
        R[1 + i, 0] = (c - G * sq * vd) * v[i] / denom
        R[1 + i, 4] = (c + G * sq * vd) * v[i] / denom
        R[1 + i, 2 + slot] = 1.0
    return R


_R_MAXWELL_X = np.array([
    [0, -1, 0, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, -1, 0, 0],
    [0, 0, -1, 0, 1, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 1, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 1, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 0, 1, 0],
], dtype=float)

_R_MAXWELL_Y = np.array([
    [0, 0, 0, -1, 0, 1, 0, 0],
    [0, -1, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, -1, 0, 0, 0],
    [0, 0, 1, 0, 1, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0, 1, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 0, 1, 0],
], dtype=float)


def right_eigenvectors(W, params, direction):
    """(lambdas, R) for a single full primitive state.

    R is block diagonal: two 5x5 fluid blocks mapped to conserved variables
    through dU/dW, and the constant 8x8 Maxwell block.
    """
    d = _check_direction(direction)
    W = np.asarray(W, dtype=float)
    if W.ndim != 1:
        raise ValueError("right_eigenvectors expects a single 18-state")
    lam = eigenvalues(W, params, direction)
    R = np.zeros((NCOMP, NCOMP))
    for base, gamma in ((0, params.gamma_i), (5, params.gamma_e)):
        W5 = W[base:base + 5]
        Rw = _fluid_eigvec_prim(W5, gamma, d)
        R[base:base + 5, base:base + 5] = _dcons_dprim(W5, gamma) @ Rw
    R[10:, 10:] = _R_MAXWELL_X if direction == "x" else _R_MAXWELL_Y
    return lam, R


def fluid_max_speed(W5, gamma, direction):
    """Max |eigenvalue| of one fluid block, elementwise over states."""
    d = _DIRS[direction]
    lm, vd, lp = _fluid_eigs(np.asarray(W5, dtype=float), gamma, d)
    return np.maximum.reduce([np.abs(lm), np.abs(vd), np.abs(lp)])


def maxwell_max_speed(params):
    return max(1.0, params.kappa, params.chi)


def max_wave_speed(W_L, W_R, params, direction, block):
    """LLF speed for one block: max |eigenvalue| over the two input states."""
    if block == "maxwell":
        return maxwell_max_speed(params)
    base, gamma = (0, params.gamma_i) if block == "ion" else (5, params.gamma_e)
    W_L = np.asarray(W_L, dtype=float)
    W_R = np.asarray(W_R, dtype=float)
    sL = fluid_max_speed(W_L[..., base:base + 5], gamma, direction)
    sR = fluid_max_speed(W_R[..., base:base + 5], gamma, direction)
    return np.maximum(sL, sR)


def flux_jacobian_fd(W, params, direction, eps_scale=1e-6):
    """Central finite-difference Jacobian df/dU at one state; test oracle."""
    from .state import prim_to_cons, cons_to_prim

    U0 = prim_to_cons(np.asarray(W, dtype=float), params)
    A = np.zeros((NCOMP, NCOMP))
    for j in range(NCOMP):
        eps = eps_scale * max(1.0, abs(U0[j]))
        Up, Um = U0.copy(), U0.copy()
        Up[j] += eps
        Um[j] -= eps
        Wp = cons_to_prim(Up, params)
        Wm = cons_to_prim(Um, params)
        fp = full_flux(Wp, Up, params, direction)
        fm = full_flux(Wm, Um, params, direction)
        A[:, j] = (fp - fm) / (2.0 * eps)
    return A
