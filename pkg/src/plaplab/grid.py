"""Lattice discretization of a truncated domain.

The unbounded domain is replaced by the box [-R_dom, R_dom]^d carrying a
uniform lattice with m points per axis and homogeneous Dirichlet values on
the box boundary.  Trapezoidal quadrature (boundary weights halved) defines
the discrete L^2 / L^p integrals.  Gradients live on staggered faces: the
face-centered difference along each axis, weighted by the face quadrature,
makes the discrete divergence the exact negative adjoint of the discrete
gradient.  That exactness is what the energy-gradient identities in
``operators`` rely on, so the quadrature conventions here are load-bearing.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridMismatchError

__all__ = [
    "Grid",
    "State",
    "make_grid",
    "make_state",
    "zero_state",
    "project_dirichlet",
    "require_dirichlet",
    "inner_l2",
    "norm_l2",
    "norm_lp",
    "grad",
    "energy_norm_pow",
    "energy_norm",
    "save_state",
    "load_state",
]


def _tensor(vecs: list[np.ndarray]) -> np.ndarray:
    out = vecs[0]
    for v in vecs[1:]:
        out = np.multiply.outer(out, v)
    return out


class Grid:
    """Uniform lattice on [-R_dom, R_dom]^d with trapezoidal quadrature.

    Attributes:
        d: spatial dimension (1, 2 or 3).
        R_dom: half-width of the truncated box.
        m: points per axis (so h = 2 R_dom / (m - 1)).
        axis: 1D node coordinates, shared by all axes.
        node_weights: tensorized trapezoid weights, shape (m,)*d.
        radius: Euclidean |x| at every node.
        boundary_mask / interior_mask: Dirichlet boundary partition.
        face_weights: per axis k, quadrature weights for the staggered
            faces (h along axis k, trapezoid transverse), shape m-1 on
            axis k and m on the others.
    """

    def __init__(self, d: int, R_dom: float, m: int):
        if d not in (1, 2, 3):
            raise ValueError(f"invalid dimension d={d}; supported: 1, 2, 3")
        if m < 3:
            raise ValueError(f"too few points m={m}; need m >= 3")
        if not R_dom > 0:
            raise ValueError(f"R_dom must be positive, got {R_dom}")
        self.d = int(d)
        self.R_dom = float(R_dom)
        self.m = int(m)
        self.h = 2.0 * self.R_dom / (self.m - 1)
        self.shape = (self.m,) * self.d
        self.size = self.m**self.d
        self.axis = np.linspace(-self.R_dom, self.R_dom, self.m)

        w1 = np.full(self.m, self.h)
        w1[0] = w1[-1] = 0.5 * self.h
        self._axis_weights = w1
        self.node_weights = _tensor([w1] * self.d)

        coords = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        self.coords = coords
        self.radius = np.sqrt(sum(c * c for c in coords))

        bmask = np.zeros(self.shape, dtype=bool)
        for k in range(self.d):
            sl = [slice(None)] * self.d
            sl[k] = 0
            bmask[tuple(sl)] = True
            sl[k] = -1
            bmask[tuple(sl)] = True
        self.boundary_mask = bmask
        self.interior_mask = ~bmask

        self.face_weights = []
        for k in range(self.d):
            vecs = [w1] * self.d
            vecs[k] = np.full(self.m - 1, self.h)
            self.face_weights.append(_tensor(vecs))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.d == other.d
            and self.m == other.m
            and self.R_dom == other.R_dom
        )

    def __hash__(self) -> int:
        return hash((self.d, self.R_dom, self.m))

    def __repr__(self) -> str:
        return f"Grid(d={self.d}, R_dom={self.R_dom}, m={self.m})"


def make_grid(d: int, R_dom: float, m: int) -> Grid:
    """Build a truncated-box lattice; see Grid for the conventions."""
    return Grid(d, R_dom, m)


@dataclass
class State:
    """Nodal values on a grid, optionally tagged with a time.

    Values must be finite everywhere.  The evolution routines additionally
    require zeros on the boundary mask (Dirichlet truncation); quadrature
    and norm evaluation accept any finite lattice function, which is useful
    when integrating analytic profiles that do not vanish at the box edge.
    """

    grid: Grid
    values: np.ndarray
    time_tag: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"state shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("state contains non-finite values")
        self.values = vals

    def copy(self) -> "State":
        return State(self.grid, self.values.copy(), self.time_tag)

    def with_time(self, t: float | None) -> "State":
        return State(self.grid, self.values, t)


def make_state(grid: Grid, values, time_tag: float | None = None) -> State:
    return State(grid, np.asarray(values, dtype=float), time_tag)


def zero_state(grid: Grid, time_tag: float | None = None) -> State:
    return State(grid, np.zeros(grid.shape), time_tag)


def project_dirichlet(u: State) -> State:
    """Zero the boundary nodes, leaving interior values untouched."""
    vals = u.values.copy()
    vals[u.grid.boundary_mask] = 0.0
    return State(u.grid, vals, u.time_tag)


def require_dirichlet(u: State) -> None:
    """Raise if any boundary node is nonzero; evolution entry check."""
    if np.any(u.values[u.grid.boundary_mask] != 0.0):
        raise ValueError("state violates the homogeneous Dirichlet boundary")


def check_same_grid(u: State, v: State) -> None:
    if u.grid is not v.grid and u.grid != v.grid:
        raise GridMismatchError(f"grid mismatch: {u.grid!r} vs {v.grid!r}")


def inner_l2(u: State, v: State) -> float:
    """Quadrature L^2 inner product."""
    check_same_grid(u, v)
    return float(np.sum(u.grid.node_weights * u.values * v.values))


def norm_l2(u: State) -> float:
    return float(np.sqrt(np.sum(u.grid.node_weights * u.values * u.values)))


def norm_lp(u: State, p: float) -> float:
    if p < 1:
        raise ValueError(f"norm_lp needs p >= 1, got {p}")
    return float(np.sum(u.grid.node_weights * np.abs(u.values) ** p) ** (1.0 / p))


def grad(u: State) -> list[np.ndarray]:
    """Face-centered differences, one array per axis (shape m-1 along it)."""
    g = u.grid
    return [np.diff(u.values, axis=k) / g.h for k in range(g.d)]


def energy_norm_pow(u: State, w, p: float) -> float:
    """p-th power of the weighted energy norm.

    Sum over staggered faces of |grad|^p times the face quadrature, plus
    the node quadrature of a |u|^p, with a the weight field's values.
    ``w`` is any object exposing .grid and .values (a WeightField).
    """
    g = u.grid
    if g is not w.grid and g != w.grid:
        raise GridMismatchError(f"grid mismatch: {g!r} vs {w.grid!r}")
    total = 0.0
    for k, dg in enumerate(grad(u)):
        total += float(np.sum(g.face_weights[k] * np.abs(dg) ** p))
    total += float(np.sum(g.node_weights * w.values * np.abs(u.values) ** p))
    return total


def energy_norm(u: State, w, p: float) -> float:
    return energy_norm_pow(u, w, p) ** (1.0 / p)


# --- snapshot files -------------------------------------------------------
#
# Plain text: four header lines (d, R_dom, m, time_tag) then node values in
# row-major order, one per line, 17 significant digits.


def save_state(u: State, path) -> None:
    lines = [
        f"d {u.grid.d}",
        f"R_dom {u.grid.R_dom:.17g}",
        f"m {u.grid.m}",
        "time_tag " + ("none" if u.time_tag is None else format(u.time_tag, ".17g")),
    ]
    lines.extend(format(v, ".17g") for v in u.values.ravel(order="C"))
    Path(path).write_text("\n".join(lines) + "\n")


def load_state(path, grid: Grid | None = None) -> State:
    text = Path(path).read_text().split("\n")
    header = {}
    for line in text[:4]:
        key, _, raw = line.partition(" ")
        header[key] = raw
    d = int(header["d"])
    R_dom = float(header["R_dom"])
    m = int(header["m"])
    tag = None if header["time_tag"] == "none" else float(header["time_tag"])
    if grid is None:
        grid = make_grid(d, R_dom, m)
    elif (grid.d, grid.R_dom, grid.m) != (d, R_dom, m):
        raise GridMismatchError(
            f"snapshot ({d}, {R_dom}, {m}) does not match grid {grid!r}"
        )
    vals = np.array([float(s) for s in text[4:] if s], dtype=float)
    if vals.size != grid.size:
        raise ValueError(f"snapshot holds {vals.size} values, grid needs {grid.size}")
    return State(grid, vals.reshape(grid.shape), tag)
