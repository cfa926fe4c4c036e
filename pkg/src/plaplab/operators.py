"""Degenerate diffusion with weighted absorption, as an exact energy gradient.

energy(E, u) is (1/p) times the p-th power of the weighted energy norm;
energy_gradient(E, u) is its gradient with respect to the quadrature L^2
inner product, assembled so that the identity

    inner_l2(energy_gradient(E, u), v) == d/ds energy(E, u + s v) |_{s=0}

holds to rounding for every interior perturbation v.  The operator is
monotone; tartar_lower_bound provides the pointwise strong-monotonicity
inequality with the explicit constant 2^(2-p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import State, check_same_grid, energy_norm_pow, grad
from .weights import TheoryParams, WeightField

__all__ = [
    "Energy",
    "energy",
    "energy_gradient",
    "monotonicity_gap",
    "tartar_lower_bound",
    "TARTAR_CONSTANT",
]


def TARTAR_CONSTANT(p: float) -> float:
    """Strong-monotonicity constant 2^(2-p) for exponents p > 2."""
    return 2.0 ** (2.0 - p)


@dataclass
class Energy:
    """Weighted p-energy bundle: weight field plus exponent bookkeeping."""

    weight: WeightField
    tp: TheoryParams

    @property
    def grid(self):
        return self.weight.grid

    @property
    def p(self) -> float:
        return self.tp.p


def energy(E: Energy, u: State) -> float:
    return energy_norm_pow(u, E.weight, E.p) / E.p


def energy_gradient(E: Energy, u: State) -> State:
    """L^2-gradient of the energy: stiffness flux divergence plus absorption.

    The flux on each staggered face is |du|^(p-2) du (zero at du = 0 since
    p > 2); its weighted divergence is divided by the node quadrature so the
    result pairs against test states through inner_l2.  Boundary nodes are
    zeroed: the operator acts on the interior only.
    """
    g = u.grid
    p = E.p
    out = np.zeros(g.shape)
    for k, dg in enumerate(grad(u)):
        flux = np.abs(dg) ** (p - 2.0) * dg * g.face_weights[k]
        hi = [slice(None)] * g.d
        lo = [slice(None)] * g.d
        hi[k] = slice(1, None)
        lo[k] = slice(None, -1)
        out[tuple(hi)] += flux / g.h
        out[tuple(lo)] -= flux / g.h
    out /= g.node_weights
    out += E.weight.values * np.abs(u.values) ** (p - 2.0) * u.values
    out[g.boundary_mask] = 0.0
    return State(g, out)


def monotonicity_gap(E: Energy, u: State, v: State) -> float:
    """inner_l2(energy_gradient(u) - energy_gradient(v), u - v); >= 0."""
    check_same_grid(u, v)
    gu = energy_gradient(E, u)
    gv = energy_gradient(E, v)
    diff = u.values - v.values
    return float(np.sum(u.grid.node_weights * (gu.values - gv.values) * diff))


def tartar_lower_bound(x: np.ndarray, y: np.ndarray, p: float):
    """Pointwise strong monotonicity of z -> |z|^(p-2) z for p > 2.

    x, y hold vectors along the last axis (any leading batch shape).
    Returns (lhs, rhs) with

        lhs = (|x|^(p-2) x - |y|^(p-2) y) . (x - y)
        rhs = 2^(2-p) |x - y|^p

    and lhs >= rhs holds for every pair.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx = np.linalg.norm(x, axis=-1, keepdims=True)
    ny = np.linalg.norm(y, axis=-1, keepdims=True)
    lhs = np.sum((nx ** (p - 2.0) * x - ny ** (p - 2.0) * y) * (x - y), axis=-1)
    rhs = TARTAR_CONSTANT(p) * np.linalg.norm(x - y, axis=-1) ** p
    return lhs, rhs
