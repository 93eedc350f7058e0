"""Entropy machinery: entropy scalars/variables/potentials, the logarithmic
mean, entropy-conservative two-point fluxes and the entropy-stable LLF
interface flux.

Fluid entropy per species is U = -rho Gamma s / (gamma - 1) with
s = ln(p rho^-gamma); the EM block carries the quadratic field energy, so
its entropy variables coincide with the state itself.
"""

from __future__ import annotations

import numpy as np

from .state import ION, ELE, EM, GasParams, lorentz
from .physflux import (
    full_flux, maxwell_flux, fluid_max_speed, maxwell_max_speed, _DIRS,
)


def fluid_entropy(W5, gamma):
    """(entropy, x-flux, y-flux) of one fluid block."""
    W5 = np.asarray(W5, dtype=float)
    rho, p = W5[..., 0], W5[..., 4]
    s = np.log(p) - gamma * np.log(rho)
    G = lorentz(W5[..., 1], W5[..., 2], W5[..., 3])
    ent = -rho * G * s / (gamma - 1.0)
    return ent, ent * W5[..., 1], ent * W5[..., 2]


def em_entropy(Um):
    """Quadratic electromagnetic entropy |Um|^2 / 2."""
    Um = np.asarray(Um, dtype=float)
    return 0.5 * np.sum(Um * Um, axis=-1)


def _species_entropy_vars(W5, gamma):
    W5 = np.asarray(W5, dtype=float)
    rho, p = W5[..., 0], W5[..., 4]
    s = np.log(p) - gamma * np.log(rho)
    beta = rho / p
    G = lorentz(W5[..., 1], W5[..., 2], W5[..., 3])
    V = np.empty_like(W5)
    V[..., 0] = (gamma - s) / (gamma - 1.0) + beta
    V[..., 1:4] = W5[..., 1:4] * (G * beta)[..., None]
    V[..., 4] = -G * beta
    return V


def entropy_vars(U, W, params):
    """18-component entropy variables from matching conserved/primitive data."""
    U = np.asarray(U, dtype=float)
    W = np.asarray(W, dtype=float)
    V = np.empty_like(U)
    V[..., ION] = _species_entropy_vars(W[..., ION], params.gamma_i)
    V[..., ELE] = _species_entropy_vars(W[..., ELE], params.gamma_e)
    V[..., EM] = U[..., EM]
    return V


def fluid_entropy_vars(U, W, params):
    """Gradient of the total fluid entropy (ion + electron) alone.

    Identical to entropy_vars on the fluid blocks with a zero EM block; the
    source terms are exactly orthogonal to this vector, which is the sense
    in which sources leave the (fluid) entropy evolution untouched.
    """
    V = entropy_vars(U, W, params)
    V[..., EM] = 0.0
    return V


def entropy_potential(U, W, params, direction):
    """Blockwise flux potential psi = V.f - F: (psi_ion, psi_ele, psi_em)."""
    d = _DIRS[direction]
    W = np.asarray(W, dtype=float)
    U = np.asarray(U, dtype=float)
    Gi = lorentz(W[..., 1], W[..., 2], W[..., 3])
    Ge = lorentz(W[..., 6], W[..., 7], W[..., 8])
    psi_i = W[..., 0] * Gi * W[..., 1 + d]
    psi_e = W[..., 5] * Ge * W[..., 6 + d]
    Um = U[..., EM]
    psi_m = 0.5 * np.sum(Um * maxwell_flux(Um, params, direction), axis=-1)
    return psi_i, psi_e, psi_m


# Switch point and series for the stabilized logarithmic mean; the zeta^6
# expansion keeps relative error below 1e-14 across the switch.
_LOGMEAN_CUT = 1e-4


def log_mean(a, b):
    """Stabilized logarithmic mean (a - b) / (ln a - ln b), symmetric in a, b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise ValueError("log_mean requires positive arguments")
    zeta = (a - b) / (a + b)
    z2 = zeta * zeta
    small = z2 < _LOGMEAN_CUT
    series = 1.0 + z2 / 3.0 + z2 * z2 / 5.0 + z2 * z2 * z2 / 7.0
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = np.where(small, 1.0, np.log(a / b) / np.where(small, 1.0, 2.0 * zeta))
    f = np.where(small, series, exact)
    return (a + b) / (2.0 * f)


def _ec_flux_species(WL, WR, gamma, d):
    """Entropy-conservative fluid flux from primitive 5-blocks."""
    WL = np.asarray(WL, dtype=float)
    WR = np.asarray(WR, dtype=float)
    rhoL, pL = WL[..., 0], WL[..., 4]
    rhoR, pR = WR[..., 0], WR[..., 4]
    GL = lorentz(WL[..., 1], WL[..., 2], WL[..., 3])
    GR = lorentz(WR[..., 1], WR[..., 2], WR[..., 3])
    betaL, betaR = rhoL / pL, rhoR / pR

    rho_ln = log_mean(rhoL, rhoR)
    beta_ln = log_mean(betaL, betaR)
    rho_b = 0.5 * (rhoL + rhoR)
    beta_b = 0.5 * (betaL + betaR)
    G_b = 0.5 * (GL + GR)
    M_b = 0.5 * (GL[..., None] * WL[..., 1:4] + GR[..., None] * WR[..., 1:4])
    L_beta = 1.0 / ((gamma - 1.0) * beta_ln) + 1.0

    denom = np.sum(M_b * M_b, axis=-1) - G_b * G_b
    if np.any(denom == 0.0):
        raise FloatingPointError("degenerate four-velocity averages in EC flux")
    Md = M_b[..., d]
    F = np.empty(np.broadcast_shapes(WL.shape, WR.shape), dtype=float)
    F5 = -G_b * (L_beta * rho_ln * Md + Md * rho_b / beta_b) / denom
    F[..., 0] = rho_ln * Md
    F[..., 1:4] = M_b / G_b[..., None] * F5[..., None]
    F[..., 1 + d] += rho_b / beta_b
    F[..., 4] = F5
    return F


def ec_flux_fluid(W_L, W_R, gamma, direction):
    """EC flux of one fluid species; arguments are primitive 5-blocks."""
    return _ec_flux_species(W_L, W_R, gamma, _DIRS[direction])


def ec_flux_maxwell(Um_L, Um_R, params, direction):
    """Central flux; entropy conservative because the flux matrix is symmetric."""
    return 0.5 * (maxwell_flux(Um_L, params, direction) + maxwell_flux(Um_R, params, direction))


def ec_flux_full(W_L, W_R, params, direction):
    """18-component entropy-conservative flux from primitive states."""
    W_L = np.asarray(W_L, dtype=float)
    W_R = np.asarray(W_R, dtype=float)
    F = np.empty(np.broadcast_shapes(W_L.shape, W_R.shape), dtype=float)
    d = _DIRS[direction]
    F[..., ION] = _ec_flux_species(W_L[..., ION], W_R[..., ION], params.gamma_i, d)
    F[..., ELE] = _ec_flux_species(W_L[..., ELE], W_R[..., ELE], params.gamma_e, d)
    F[..., EM] = ec_flux_maxwell(W_L[..., EM], W_R[..., EM], params, direction)
    return F


def llf_flux(U_L, U_R, W_L, W_R, params, direction):
    """Blockwise local Lax-Friedrichs flux: central average plus scaled jump.

    Each of the three flux blocks carries its own dissipation speed; the
    Maxwell block uses max(1, kappa, chi).
    """
    U_L = np.asarray(U_L, dtype=float)
    U_R = np.asarray(U_R, dtype=float)
    W_L = np.asarray(W_L, dtype=float)
    W_R = np.asarray(W_R, dtype=float)
    fL = full_flux(W_L, U_L, params, direction)
    fR = full_flux(W_R, U_R, params, direction)
    F = 0.5 * (fL + fR)
    for block, gamma in ((ION, params.gamma_i), (ELE, params.gamma_e)):
        lam = np.maximum(
            fluid_max_speed(W_L[..., block], gamma, direction),
            fluid_max_speed(W_R[..., block], gamma, direction),
        )
        F[..., block] -= 0.5 * lam[..., None] * (U_R[..., block] - U_L[..., block])
    F[..., EM] -= 0.5 * maxwell_max_speed(params) * (U_R[..., EM] - U_L[..., EM])
    return F
