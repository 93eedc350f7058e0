import numpy as np
import pytest

from twofluid_dg import state
from twofluid_dg.state import (
    GasParams, prim_to_cons, cons_to_prim, prim_to_cons_species,
    cons_to_prim_species, quartic_coeffs, admissible, AdmissibilityError,
    RecoveryError,
)
from conftest import random_primitives


def test_rest_state_conversion():
    W = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
    U = prim_to_cons_species(W, 5.0 / 3.0)
    # Gamma = 1, E = rho h - p with h = 1 + gamma/(gamma-1) p/rho
    assert np.allclose(U, [1.0, 0.0, 0.0, 0.0, 2.5], atol=1e-14)


def test_shock_tube_left_state():
    # gamma=2, rho=p=0.5 at rest: h = 1 + 2 p/rho = 3, E = rho h - p = 1
    W = np.array([0.5, 0.0, 0.0, 0.0, 0.5])
    U = prim_to_cons_species(W, 2.0)
    assert np.allclose(U, [0.5, 0.0, 0.0, 0.0, 1.0], atol=1e-14)


def test_moving_state_lorentz_factor():
    W = np.array([2.0, 0.6, 0.0, 0.0, 1.0])
    gamma = 5.0 / 3.0
    U = prim_to_cons_species(W, gamma)
    G = 1.0 / np.sqrt(1.0 - 0.36)
    h = 1.0 + gamma / (gamma - 1.0) * 1.0 / 2.0
    assert np.isclose(U[0], 2.0 * G)
    assert np.isclose(U[1], 2.0 * h * G * G * 0.6)
    assert np.isclose(U[4], 2.0 * h * G * G - 1.0)


def test_roundtrip_random_states(rng):
    W = random_primitives(rng, 10_000, vmax=0.95, p_range=(1e-4, 1e3))
    params = GasParams(gamma_i=5.0 / 3.0, gamma_e=4.0 / 3.0)
    U = prim_to_cons(W, params)
    W2 = cons_to_prim(U, params)
    scale = np.maximum(np.abs(W), 1.0)
    assert np.max(np.abs(W2 - W) / scale) < 1e-9


def test_quartic_residual_small(rng):
    W = random_primitives(rng, 10_000, vmax=0.95, p_range=(1e-4, 1e3))
    gamma = 5.0 / 3.0
    U = prim_to_cons_species(W[:, :5], gamma)
    D, E = U[:, 0], U[:, 4]
    M = np.linalg.norm(U[:, 1:4], axis=1)
    v = np.linalg.norm(cons_to_prim_species(U, gamma)[:, 1:4], axis=1)
    c0, c1, c2, c3 = quartic_coeffs(D, M, E, gamma)
    res = (((v + c3) * v + c2) * v + c1) * v + c0
    scale = np.maximum.reduce([np.abs(c0), np.abs(c1), np.abs(c2),
                               np.abs(c3), np.ones_like(v)])
    assert np.max(np.abs(res) / scale) < 1e-12


def test_exact_velocity_recovered():
    # Construct a state from known v and check |v| comes back sharp.
    for v in (0.0, 0.1, 0.5, 0.9, 0.99):
        W = np.array([1.0, v, 0.0, 0.0, 0.7])
        U = prim_to_cons_species(W, 4.0 / 3.0)
        W2 = cons_to_prim_species(U, 4.0 / 3.0)
        assert abs(W2[1] - v) < 1e-10


def test_zero_momentum_short_circuit():
    U = prim_to_cons_species(np.array([2.0, 0.0, 0.0, 0.0, 3.0]), 5.0 / 3.0)
    W = cons_to_prim_species(U, 5.0 / 3.0)
    assert W[1] == 0.0 and W[2] == 0.0 and W[3] == 0.0


def test_inadmissible_cons_raises():
    # E < sqrt(D^2 + M^2) violates admissibility
    U = np.array([1.0, 2.0, 0.0, 0.0, 1.5])
    with pytest.raises(RecoveryError):
        cons_to_prim_species(U, 5.0 / 3.0)


def test_inadmissible_prim_raises():
    W = np.zeros(18)
    W[0], W[4], W[5], W[9] = 1.0, 1.0, 1.0, 1.0
    W[1] = 1.2  # superluminal
    params = GasParams()
    with pytest.raises(AdmissibilityError):
        prim_to_cons(W, params)


def test_admissible_mask():
    params = GasParams()
    W = np.zeros((2, 18))
    W[:, 0], W[:, 4], W[:, 5], W[:, 9] = 1.0, 1.0, 1.0, 1.0
    U = prim_to_cons(W, params)
    U[1, 4] = 0.5  # break the ion energy
    mask = admissible(U)
    assert mask[0] and not mask[1]


def test_component_slices():
    assert state.NCOMP == 18
    assert list(range(18))[state.ION] == [0, 1, 2, 3, 4]
    assert list(range(18))[state.ELE] == [5, 6, 7, 8, 9]
    assert list(range(18))[state.EM] == [10, 11, 12, 13, 14, 15, 16, 17]


def test_gas_params_defaults():
    p = GasParams()
    assert p.kappa == 1.0 and p.chi == 1.0
    assert p.eta == 0.0 and p.source_scale == 1.0
