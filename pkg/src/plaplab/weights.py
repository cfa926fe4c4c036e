"""Weight families for the absorption term, with their side integrals.

A weight field is a node function a(x) >= 1.  The polynomial family is the
unperturbed member a0(x) = 1 + |x|^q; the shifted family adds eps * g with
0 <= g <= 1, so the sup-distance between the eps-member and the base is
exactly eps * sup(g).  The integral of a^(-2/(p-2)) controls the constant
in the L^2 embedding of the energy space, and its restriction to |x| > R
gives the tail estimate used by the truncation diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, InvariantError
from .grid import Grid

__all__ = [
    "TheoryParams",
    "WeightField",
    "IntegrabilityResult",
    "make_weight",
    "integrability",
    "tail_mass",
    "embedding_constant",
    "embedding_from_integral",
    "truncation_tail_bound",
]

EPS_MAX = 1.0  # perturbation budget; the embedding slack below assumes eps <= 1


@dataclass(frozen=True)
class TheoryParams:
    """Continuum exponents: p and the dimension n the analysis assumes.

    n_theory is decoupled from the lattice dimension on purpose: desk-scale
    runs use d = 1 while the exponent bookkeeping is carried out for the n
    the estimates are stated in.  sobolev_ok records whether 2 < p < n.
    """

    p: float
    n_theory: float

    def __post_init__(self):
        if not self.p > 2:
            raise InvariantError(f"p must exceed 2, got {self.p}", field="theory.p")
        if not self.n_theory > 0:
            raise InvariantError(
                f"n_theory must be positive, got {self.n_theory}", field="theory.n_theory"
            )

    @property
    def theta(self) -> float:
        return self.p / 2.0

    @property
    def theta_conj(self) -> float:
        # 1/theta + 1/theta_conj = 1, so theta_conj / theta = 2 / (p - 2)
        return self.p / (self.p - 2.0)

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def sobolev_ok(self) -> bool:
        return self.p < self.n_theory

    @property
    def p_star(self) -> float:
        """Critical exponent p n / (n - p); nan when 2 < p < n fails."""
        if not self.sobolev_ok:
            return float("nan")
        return self.p * self.n_theory / (self.n_theory - self.p)

    @property
    def weight_exponent(self) -> float:
        """The power -2/(p-2) that the side integrals raise a(x) to."""
        return 2.0 / (self.p - 2.0)


@dataclass
class WeightField:
    """Node values of one family member plus the family metadata."""

    grid: Grid
    values: np.ndarray
    family: str
    eps: float
    q: float
    g_name: str = "bump"
    # analytic sup |a_eps - a_0| of the family member; 0 for the base
    sup_gap: float = field(default=0.0)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValueError("weight shape does not match grid shape")
        if vals.min() < 1.0:
            raise InvariantError("weight field must satisfy a(x) >= 1 everywhere")
        self.values = vals

    def base_values(self) -> np.ndarray:
        return 1.0 + self.grid.radius**self.q


def _perturbation_shape(grid: Grid, g_name: str) -> np.ndarray:
    if g_name == "one":
        return np.ones(grid.shape)
    if g_name == "bump":
        return np.exp(-grid.radius**2)
    raise InvariantError(f"unknown perturbation shape {g_name!r}", field="weights.g")


def make_weight(
    grid: Grid,
    family: str = "polynomial",
    eps: float = 0.0,
    q: float = 6.0,
    g: str = "bump",
) -> WeightField:
    """Construct one member of a weight family.

    polynomial: a(x) = 1 + |x|^q, the unperturbed base (eps must be 0).
    shifted:    a_eps(x) = a0(x) + eps * g(x) with g in {one, bump},
                0 <= g <= 1 and sup g = 1, so sup |a_eps - a0| = eps.
    """
    if q < 0:
        raise InvariantError(f"q must be nonnegative, got {q}", field="weights.q")
    if not 0.0 <= eps <= EPS_MAX:
        raise InvariantError(
            f"eps={eps} outside [0, {EPS_MAX}]; the embedding slack budgets eps <= {EPS_MAX}",
            field="weights.eps",
        )
    base = 1.0 + grid.radius**q
    if family == "polynomial":
        if eps != 0.0:
            raise InvariantError(
                "polynomial family is the eps=0 base; use family=shifted for eps > 0",
                field="weights.family",
            )
        return WeightField(grid, base, family, 0.0, q, g, sup_gap=0.0)
    if family == "shifted":
        shape = _perturbation_shape(grid, g)
        return WeightField(grid, base + eps * shape, family, eps, q, g, sup_gap=eps)
    raise InvariantError(f"unknown weight family {family!r}", field="weights.family")


@dataclass(frozen=True)
class IntegrabilityResult:
    value: float
    finite_on_rn: bool

    def __float__(self) -> float:
        return self.value


def integrability(w: WeightField, tp: TheoryParams) -> IntegrabilityResult:
    """Quadrature of a^(-2/(p-2)) over the box, with the analytic verdict.

    The verdict refers to the untruncated integral of the family:
    1 + |x|^q decays fast enough exactly when 2q/(p-2) > n_theory.
    The quadrature value itself is always finite on the truncated grid.
    """
    s = tp.weight_exponent
    value = float(np.sum(w.grid.node_weights * w.values ** (-s)))
    finite = 2.0 * w.q / (tp.p - 2.0) > tp.n_theory
    return IntegrabilityResult(value, finite)


def tail_mass(w: WeightField, tp: TheoryParams, R: float) -> float:
    """Quadrature of a^(-2/(p-2)) over the nodes with |x| > R."""
    if not 0.0 < R < w.grid.R_dom:
        raise ValueError(f"tail radius R={R} must lie in (0, R_dom={w.grid.R_dom})")
    mask = w.grid.radius > R
    s = tp.weight_exponent
    return float(np.sum(w.grid.node_weights[mask] * w.values[mask] ** (-s)))


def embedding_from_integral(integral: float, tp: TheoryParams) -> float:
    """Embedding constant (integral + 1)^(1/theta') from a given side integral.

    The +1 is the uniform slack that covers every eps-member at once,
    which is what budgets eps <= 1 in make_weight.
    """
    return (integral + 1.0) ** (1.0 / tp.theta_conj)


def embedding_constant(w0: WeightField, tp: TheoryParams) -> float:
    """Constant c with ||u||_2^2 <= c ||u||_E^2 uniformly over eps-members.

    Must be fed the eps = 0 member: the chain bounds the eps-integrals by
    the base integral plus one.
    """
    if w0.eps != 0.0:
        raise InvariantError("embedding_constant expects the eps = 0 member")
    return embedding_from_integral(integrability(w0, tp).value, tp)


_SPHERE_AREA = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}


def truncation_tail_bound(q: float, tp: TheoryParams, R_dom: float, d: int) -> float:
    """Upper bound for the side integral lost beyond the truncation radius.

    Bounds the integral of (1 + |x|^q)^(-2/(p-2)) over |x| > R_dom by the
    pure-power integral; finite only when 2q/(p-2) exceeds the lattice
    dimension d.  Used to justify (and log) the choice of R_dom.
    """
    s = 2.0 * q / (tp.p - 2.0)
    if s <= d:
        return float("inf")
    return _SPHERE_AREA[d] * R_dom ** (d - s) / (s - d)
