import numpy as np
import pytest

from twofluid_dg.state import GasParams, prim_to_cons


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def params():
    return GasParams(gamma_i=5.0 / 3.0, gamma_e=4.0 / 3.0, r_i=2.0, r_e=-3.0)


def random_primitives(rng, n, vmax=0.9, p_range=(1e-2, 10.0), em_scale=1.0):
    """Admissible random primitive states with |v| <= vmax per species."""
    W = np.zeros((n, 18))
    for s in (0, 5):
        W[:, s] = rng.uniform(0.1, 5.0, n)
        W[:, s + 4] = rng.uniform(*p_range, n)
        v = rng.normal(size=(n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        W[:, s + 1:s + 4] = v * rng.uniform(0.0, vmax, n)[:, None]
    W[:, 10:18] = rng.normal(0.0, em_scale, (n, 8))
    return W


def random_states(rng, n, params, **kw):
    W = random_primitives(rng, n, **kw)
    return prim_to_cons(W, params), W
