import numpy as np
import pytest

from twofluid_dg import physflux, entflux
from twofluid_dg.state import GasParams, prim_to_cons, prim_to_cons_species
from conftest import random_states


def test_fluid_flux_rest_state():
    W = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
    U = prim_to_cons_species(W, 5.0 / 3.0)
    fx = physflux.fluid_flux(W, U, "x")
    # At rest only the pressure contributes, in the normal momentum slot.
    assert np.allclose(fx, [0.0, 1.0, 0.0, 0.0, 0.0], atol=1e-14)
    fy = physflux.fluid_flux(W, U, "y")
    assert np.allclose(fy, [0.0, 0.0, 1.0, 0.0, 0.0], atol=1e-14)


def test_fluid_flux_advection_terms():
    W = np.array([2.0, 0.5, 0.0, 0.0, 1.0])
    U = prim_to_cons_species(W, 5.0 / 3.0)
    f = physflux.fluid_flux(W, U, "x")
    assert np.isclose(f[0], U[0] * 0.5)
    assert np.isclose(f[1], U[1] * 0.5 + 1.0)
    assert np.isclose(f[4], U[1])  # energy flux equals the momentum density


def test_maxwell_flux_is_linear(params, rng):
    A = physflux.maxwell_matrix(params, "x")
    Um = rng.normal(size=(40, 8))
    f = physflux.maxwell_flux(Um, params, "x")
    assert np.allclose(f, Um @ A.T, atol=1e-13)


def test_maxwell_matrix_entries():
    params = GasParams(kappa=1.5, chi=2.0)
    A = physflux.maxwell_matrix(params, "x")
    # d_t By - d_x Ez = 0 and d_t Bz + d_x Ey = 0
    assert A[1, 5] == -1.0 and A[2, 4] == 1.0
    # cleaning couplings: Bx <-> psi at speed kappa, Ex <-> phi at speed chi
    assert A[0, 7] == params.kappa and A[7, 0] == params.kappa
    assert A[3, 6] == params.chi and A[6, 3] == params.chi


def test_flux_consistency_with_fd_jacobian(params, rng):
    U, W = random_states(rng, 100, params, vmax=0.7)
    for d in ("x", "y"):
        lam = physflux.eigenvalues(W, params, d)
        for i in range(0, 100, 13):
            A = physflux.flux_jacobian_fd(W[i], params, d)
            got = np.sort(np.linalg.eigvals(A).real)
            want = np.sort(lam[i])
            scale = max(1.0, np.max(np.abs(want)))
            assert np.max(np.abs(got - want)) / scale < 1e-6


def test_eigenvalue_bounds(params, rng):
    U, W = random_states(rng, 500, params, vmax=0.9)
    for d in ("x", "y"):
        lam = physflux.eigenvalues(W, params, d)
        fluid = np.abs(lam[:, :10])
        assert np.all(fluid <= 1.0 + 1e-12)  # subluminal fluid speeds
        em = np.abs(lam[:, 10:])
        assert np.max(em) <= max(1.0, params.kappa, params.chi) + 1e-12


def test_eigenvectors_diagonalize(params, rng):
    U, W = random_states(rng, 100, params, vmax=0.7)
    for d in ("x", "y"):
        for i in range(0, 100, 7):
            A = physflux.flux_jacobian_fd(W[i], params, d)
            lam, R = physflux.right_eigenvectors(W[i], params, d)
            res = A @ R - R @ np.diag(lam)
            scale = np.linalg.norm(A @ R) + 1.0
            assert np.linalg.norm(res) / scale < 1e-6


def test_lorentz_source_structure(params, rng):
    U, W = random_states(rng, 200, params)
    S = physflux.lorentz_source(U, W, params)
    # continuity and divergence-cleaning-free slots carry no source
    assert np.allclose(S[:, 0], 0.0)
    assert np.allclose(S[:, 5], 0.0)
    assert np.allclose(S[:, 10:13], 0.0)  # B evolves only by curl E
    # energy source is v . momentum source per species
    for s in (0, 5):
        vdot = np.einsum("ij,ij->i", W[:, s + 1:s + 4], S[:, s + 1:s + 4])
        assert np.allclose(S[:, s + 4], vdot, rtol=1e-12, atol=1e-12)


def test_source_orthogonality(params, rng):
    # The system entropy is the fluid-entropy sum, so its gradient has no
    # electromagnetic block; the Lorentz source is exactly orthogonal to it.
    U, W = random_states(rng, 10_000, params)
    V = entflux.entropy_vars(U, W, params)
    S = physflux.lorentz_source(U, W, params)
    dots = np.einsum("ij,ij->i", V[:, :10], S[:, :10])
    scale = np.linalg.norm(V, axis=1) * np.linalg.norm(S, axis=1) + 1e-300
    assert np.max(np.abs(dots) / scale) < 1e-12


def test_resistive_source_antisymmetric(rng):
    params = GasParams(eta=0.05, r_i=2.0, r_e=-3.0)
    U, W = random_states(rng, 100, params)
    S = physflux.resistive_source(U, W, params)
    # friction exchanges momentum between the species
    assert np.allclose(S[:, 1:4] + S[:, 6:9], 0.0, atol=1e-12)
    assert np.allclose(S[:, 10:], 0.0)


def test_max_wave_speed_identical_states(params):
    W = np.zeros(18)
    W[0], W[4], W[5], W[9] = 1.0, 1.0, 1.0, 1.0
    U = prim_to_cons(W, params)
    for block, lo in (("ion", 0), ("electron", 5)):
        lam = physflux.max_wave_speed(W, W, params, "x", block)
        gamma = params.gamma_i if block == "ion" else params.gamma_e
        h = 1.0 + gamma / (gamma - 1.0)
        cs = np.sqrt(gamma * 1.0 / (1.0 * h))
        assert np.isclose(lam, cs, rtol=1e-12)
    assert physflux.max_wave_speed(W, W, params, "x", "maxwell") == max(
        1.0, params.kappa, params.chi)


def test_max_wave_speed_shock_pair():
    params = GasParams(gamma_i=2.0, gamma_e=2.0)
    WL = np.zeros(18)
    WL[0], WL[4], WL[5], WL[9] = 0.5, 0.5, 0.5, 0.5
    WR = np.zeros(18)
    WR[0], WR[4], WR[5], WR[9] = 0.0625, 0.05, 0.0625, 0.05
    lam = physflux.max_wave_speed(WL, WR, params, "x", "ion")
    cs = max(np.sqrt(2.0 * 0.5 / (0.5 * 3.0)),
             np.sqrt(2.0 * 0.05 / (0.0625 * (1.0 + 2.0 * 0.05 / 0.0625))))
    assert np.isclose(lam, cs, rtol=1e-12)


def test_invalid_direction_rejected(params):
    W = np.zeros(18)
    W[0], W[4], W[5], W[9] = 1.0, 1.0, 1.0, 1.0
    U = prim_to_cons(W, params)
    with pytest.raises(ValueError):
        physflux.full_flux(W, U, params, "z")
