"""Gauss-Lobatto quadrature and the summation-by-parts operator matrices.

build_operators(k) returns the nodes/weights on [-1, 1] together with the
dense matrices D (nodal differentiation), M (diagonal mass), S = M D
(stiffness) and B = diag(-1, 0, ..., 0, 1). The SBP identities
S + S^T = B and the row/column-sum properties are checked at construction
and violation raises immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class SbpOperators:
    k: int
    nodes: np.ndarray
    weights: np.ndarray
    D: np.ndarray
    M: np.ndarray
    S: np.ndarray
    B: np.ndarray
    tau: np.ndarray = field(default=None)


def gauss_lobatto(k):
    """GLL nodes and weights for degree k (k+1 points including endpoints)."""
    if k < 1:
        raise OperatorError("polynomial degree must be >= 1")
    if k == 1:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    # interior nodes are roots of P_k'(x)
    ck = np.zeros(k + 1)
    ck[k] = 1.0
    interior = npleg.legroots(npleg.legder(ck))
    nodes = np.concatenate(([-1.0], np.sort(interior), [1.0]))
    pk = npleg.legval(nodes, ck)
    weights = 2.0 / (k * (k + 1) * pk * pk)
    return nodes, weights


def _diff_matrix(nodes):
    """D_jm = L_m'(xi_j) via barycentric weights."""
    n = len(nodes)
    w = np.ones(n)
    for j in range(n):
        for m in range(n):
            if m != j:
                w[j] /= nodes[j] - nodes[m]
    D = np.zeros((n, n))
    for j in range(n):
        for m in range(n):
            if m != j:
                D[j, m] = (w[m] / w[j]) / (nodes[j] - nodes[m])
        D[j, j] = -np.sum(D[j])
    return D


def lagrange_basis(nodes, xi):
    """Values L_m(xi) for all basis polynomials; shape (len(xi), len(nodes))."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    n = len(nodes)
    out = np.ones((len(xi), n))
    for m in range(n):
        for j in range(n):
            if j != m:
                out[:, m] *= (xi - nodes[j]) / (nodes[m] - nodes[j])
    return out


def build_operators(k):
    """Construct and verify the SBP operator set for degree k."""
    nodes, weights = gauss_lobatto(k)
    D = _diff_matrix(nodes)
    M = np.diag(weights)
    S = M @ D
    tau = np.zeros(k + 1)
    tau[0], tau[-1] = -1.0, 1.0
    B = np.diag(tau)

    tol = 1e-13
    checks = {
        "S + S^T = B": np.max(np.abs(S + S.T - B)),
        "row sums of D": np.max(np.abs(D.sum(axis=1))),
        "column sums of S": np.max(np.abs(S.sum(axis=0) - tau)),
        "weights sum to 2": abs(weights.sum() - 2.0),
    }
    worst = max(checks.values())
    if worst > tol:
        raise OperatorError(f"SBP identity violated: {checks}")

    return SbpOperators(k=k, nodes=nodes, weights=weights, D=D, M=M, S=S, B=B, tau=tau)


def differentiate(ops, values):
    """Nodal derivative on the reference element; exact for degree <= k."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] != ops.k + 1:
        raise OperatorError("nodal value length must be k+1")
    return ops.D @ values


def quadrature(ops, values, jacobian=1.0):
    """Discrete integral jacobian * sum(w_j values_j); exact to degree 2k-1."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] != ops.k + 1:
        raise OperatorError("nodal value length must be k+1")
    return jacobian * np.tensordot(ops.weights, values, axes=(0, 0))
