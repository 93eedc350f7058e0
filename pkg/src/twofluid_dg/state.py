"""State vectors, equation of state, and conservative/primitive conversion.

The full state is an 18-component vector per node:

    0..4   ion fluid      (D, Mx, My, Mz, E)          conserved
    5..9   electron fluid (D, Mx, My, Mz, E)          conserved
    10..17 electromagnetic (Bx, By, Bz, Ex, Ey, Ez, phi, psi)

Primitive fluid blocks use (rho, vx, vy, vz, p); the EM block is its own
primitive. All functions broadcast over leading array dimensions, so a
"state" may be a single 18-vector or an (..., 18) field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NCOMP = 18
ION = slice(0, 5)
ELE = slice(5, 10)
EM = slice(10, 18)

# EM component offsets inside the full vector
BX, BY, BZ, EX, EY, EZ, PHI, PSI = range(10, 18)


class AdmissibilityError(ValueError):
    """State outside the physical domain (rho, p > 0 and |v| < 1)."""


class RecoveryError(AdmissibilityError):
    """Conservative-to-primitive conversion failed; carries the bad state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class GasParams:
    """Physical parameters shared by all operators.

    r_i, r_e are signed charge-to-mass ratios; kappa and chi are the
    divergence-cleaning speeds; eta = 0 disables resistive terms.
    source_scale multiplies only the current/charge sources in the
    Maxwell block (4*pi for the Balsara-normalized tests).
    """

    gamma_i: float = 4.0 / 3.0
    gamma_e: float = 4.0 / 3.0
    r_i: float = 1.0
    r_e: float = -1.0
    kappa: float = 1.0
    chi: float = 1.0
    eta: float = 0.0
    source_scale: float = 1.0

    def __post_init__(self):
        for g in (self.gamma_i, self.gamma_e):
            if not 1.0 < g <= 2.0:
                raise ValueError(f"adiabatic index {g} outside (1, 2]")
        if self.kappa < 0 or self.chi < 0 or self.eta < 0:
            raise ValueError("kappa, chi, eta must be nonnegative")

    def gamma(self, species):
        return self.gamma_i if species == "ion" else self.gamma_e

    def charge_mass(self, species):
        return self.r_i if species == "ion" else self.r_e


def lorentz(vx, vy, vz):
    """Lorentz factor 1/sqrt(1 - |v|^2); raises on superluminal input."""
    v2 = np.asarray(vx) ** 2 + np.asarray(vy) ** 2 + np.asarray(vz) ** 2
    if np.any(v2 >= 1.0):
        raise AdmissibilityError("superluminal velocity |v| >= 1")
    return 1.0 / np.sqrt(1.0 - v2)


def enthalpy(rho, p, gamma):
    """Specific enthalpy of the ideal-gas EOS, h = 1 + gamma/(gamma-1) p/rho."""
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise AdmissibilityError("enthalpy requires rho > 0 and p > 0")
    return 1.0 + gamma / (gamma - 1.0) * p / rho


def sound_speed(rho, p, gamma):
    """Relativistic sound speed, c^2 = k p / (n rho h) with k = gamma/(gamma-1)."""
    h = enthalpy(rho, p, gamma)
    k = gamma / (gamma - 1.0)
    return np.sqrt(k * p / ((k - 1.0) * np.asarray(rho, dtype=float) * h))


def prim_to_cons_species(W, gamma):
    """Map (rho, vx, vy, vz, p) -> (D, Mx, My, Mz, E) for one species."""
    W = np.asarray(W, dtype=float)
    rho, p = W[..., 0], W[..., 4]
    G = lorentz(W[..., 1], W[..., 2], W[..., 3])
    h = enthalpy(rho, p, gamma)
    w = rho * h * G * G
    U = np.empty_like(W)
    U[..., 0] = rho * G
    U[..., 1:4] = w[..., None] * W[..., 1:4]
    U[..., 4] = w - p
    return U


def species_admissible(U):
    """Boolean mask: D > 0 and E - sqrt(D^2 + |M|^2) > 0."""
    U = np.asarray(U, dtype=float)
    D, E = U[..., 0], U[..., 4]
    M2 = np.sum(U[..., 1:4] ** 2, axis=-1)
    return (D > 0.0) & (E - np.sqrt(D * D + M2) > 0.0)


def admissible(U):
    """True iff both fluid blocks of the full state satisfy admissibility."""
    U = np.asarray(U, dtype=float)
    return species_admissible(U[..., ION]) & species_admissible(U[..., ELE])


def quartic_coeffs(D, M, E, gamma):
    """Coefficients (c0, c1, c2, c3) of the velocity quartic v^4 + c3 v^3 + ..."""
    g = gamma
    denom = (g - 1.0) ** 2 * (M * M + D * D)
    c3 = -2.0 * g * (g - 1.0) * M * E / denom
    c2 = (g * g * E * E + 2.0 * (g - 1.0) * M * M - (g - 1.0) ** 2 * D * D) / denom
    c1 = -2.0 * g * M * E / denom
    c0 = M * M / denom
    return c0, c1, c2, c3


# Bracket padding for the upper velocity bound; keeps the bracket strictly
# above the root without pushing v_ub past 1 after the min().
_DELTA_UB = 1e-6
_NEWTON_ITERS = 10
_BISECT_ITERS = 20
_RESIDUAL_TOL = 1e-10


def _solve_speed(D, M, E, gamma):
    """Vectorized Newton (fixed 10 iterations) for |v| from the quartic,
    with a bisection fallback on [v_lb, v_ub] for ill-conditioned states."""
    c0, c1, c2, c3 = quartic_coeffs(D, M, E, gamma)

    def quartic(v):
        return (((v + c3) * v + c2) * v + c1) * v + c0

    def dquartic(v):
        return ((4.0 * v + 3.0 * c3) * v + 2.0 * c2) * v + c1

    g = gamma
    nonzero = M > 0.0
    Msafe = np.where(nonzero, M, 1.0)
    disc = g * g * E * E - 4.0 * (g - 1.0) * M * M
    disc = np.maximum(disc, 0.0)  # clamp; admissible states keep this positive
    v_lb = (g * E - np.sqrt(disc)) / (2.0 * Msafe * (g - 1.0))
    v_ub = np.minimum(1.0, M / E + _DELTA_UB)
    z = np.where(v_lb > 1e-9, 0.5 * (1.0 - D / E) * (v_lb - v_ub), 0.0)
    v = 0.5 * (v_lb + v_ub) + z

    for _ in range(_NEWTON_ITERS):
        dq = dquartic(v)
        dq = np.where(dq == 0.0, 1.0, dq)
        step = quartic(v) / dq
        v = np.clip(v - step, 0.0, v_ub)
        if np.max(np.abs(step)) < 1e-14:
            break

    scale = np.maximum.reduce([np.abs(c0), np.abs(c1), np.abs(c2), np.abs(c3), np.ones_like(v)])
    bad = nonzero & (np.abs(quartic(v)) > _RESIDUAL_TOL * scale)
    if np.any(bad):
        lo, hi = v_lb.copy(), v_ub.copy()
        flo = quartic(lo)
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            fm = quartic(mid)
            take_lo = (flo * fm <= 0.0)
            hi = np.where(bad & take_lo, mid, hi)
            lo = np.where(bad & ~take_lo, mid, lo)
            flo = np.where(bad & ~take_lo, fm, flo)
        vb = 0.5 * (lo + hi)
        v = np.where(bad & (np.abs(quartic(vb)) < np.abs(quartic(v))), vb, v)

    # The quartic comes from squaring M = v (g E - (g-1) M v - (g-1) D sqrt(1-v^2)),
    # which degenerates to a double root for ultra-relativistic states (p >> rho)
    # and caps the attainable accuracy near sqrt(machine eps). Polish on the
    # unsquared relation, whose root stays simple.
    for _ in range(3):
        root = np.sqrt(np.maximum(1.0 - v * v, 0.0))
        f = M - g * E * v + (g - 1.0) * M * v * v + (g - 1.0) * D * v * root
        df = -g * E + 2.0 * (g - 1.0) * M * v + (g - 1.0) * D * np.where(
            root > 0.0, root - v * v / np.maximum(root, 1e-300), 0.0
        )
        df = np.where(df == 0.0, 1.0, df)
        v = np.clip(v - f / df, 0.0, v_ub)

    return np.where(nonzero, v, 0.0)


def cons_to_prim_species(U, gamma):
    """Recover (rho, vx, vy, vz, p) from (D, Mx, My, Mz, E) for one species.

    Solves the quartic for v = |v| by Newton iteration seeded from the
    bracket midpoint; M = 0 short-circuits to v = 0.
    """
    U = np.asarray(U, dtype=float)
    D, E = U[..., 0], U[..., 4]
    M = np.sqrt(np.sum(U[..., 1:4] ** 2, axis=-1))
    ok = (D > 0.0) & (E - np.sqrt(D * D + M * M) > 0.0)
    if not np.all(ok):
        idx = np.argwhere(~np.atleast_1d(ok))
        raise RecoveryError(
            f"inadmissible conserved state at {idx[0] if idx.size else '?'}",
            state=U[tuple(idx[0])] if U.ndim > 1 and idx.size else U,
        )
    v = _solve_speed(D, M, E, gamma)
    Msafe = np.where(M > 0.0, M, 1.0)
    W = np.empty_like(U)
    W[..., 1:4] = U[..., 1:4] / Msafe[..., None] * v[..., None]
    # p = (gamma-1)(E - M v - rho) cancels three O(E) terms down to O(p);
    # in double precision that floors the relative error near eps*E/p, so
    # evaluate the subtraction in extended precision. p itself is almost
    # insensitive to the Newton error in v (dp/dv ~ rho G^2 v (h-1)).
    vl = v.astype(np.longdouble)
    rhol = D.astype(np.longdouble) * np.sqrt(1.0 - vl * vl)
    pl = (gamma - 1.0) * (E.astype(np.longdouble) - M.astype(np.longdouble) * vl - rhol)
    rho = rhol.astype(float)
    W[..., 0] = rho
    W[..., 4] = pl.astype(float)
    if np.any(W[..., 4] <= 0.0) or np.any(rho <= 0.0):
        raise RecoveryError("recovered primitives inadmissible", state=U)
    return W


def prim_to_cons(Wfull, params):
    """Full 18-component primitive -> conserved map (EM block copied)."""
    Wfull = np.asarray(Wfull, dtype=float)
    U = np.empty_like(Wfull)
    U[..., ION] = prim_to_cons_species(Wfull[..., ION], params.gamma_i)
    U[..., ELE] = prim_to_cons_species(Wfull[..., ELE], params.gamma_e)
    U[..., EM] = Wfull[..., EM]
    return U


def cons_to_prim(Ufull, params):
    """Full 18-component conserved -> primitive map (EM block copied)."""
    Ufull = np.asarray(Ufull, dtype=float)
    W = np.empty_like(Ufull)
    W[..., ION] = cons_to_prim_species(Ufull[..., ION], params.gamma_i)
    W[..., ELE] = cons_to_prim_species(Ufull[..., ELE], params.gamma_e)
    W[..., EM] = Ufull[..., EM]
    return W
