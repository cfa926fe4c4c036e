"""Weight families, side integrals, and the discrete embedding.

The embedding inequality is exact on the lattice (it is a discrete Holder
step, not an approximation), so the property test runs with a slack of
1e-12 only to absorb rounding.
"""

import numpy as np
import pytest

from plaplab import (
    InvariantError,
    TheoryParams,
    embedding_constant,
    embedding_from_integral,
    energy_norm_pow,
    integrability,
    make_grid,
    make_state,
    make_weight,
    norm_l2,
    tail_mass,
    truncation_tail_bound,
)

TP = TheoryParams(p=4.0, n_theory=5.0)


def test_theory_params_exponents():
    assert TP.theta == 2.0
    assert TP.theta_conj == 2.0
    assert TP.p_conj == pytest.approx(4.0 / 3.0)
    assert TP.sobolev_ok
    assert TP.p_star == pytest.approx(20.0)
    assert TP.weight_exponent == pytest.approx(1.0)
    tp3 = TheoryParams(p=3.0, n_theory=4.0)
    assert tp3.theta == 1.5 and tp3.theta_conj == 3.0
    assert tp3.p_star == pytest.approx(12.0)


def test_theory_params_rejects_small_p():
    with pytest.raises(InvariantError):
        TheoryParams(p=2.0, n_theory=5.0)
    with pytest.raises(InvariantError):
        TheoryParams(p=1.5, n_theory=5.0)


def test_supercritical_p_flagged_not_fatal():
    tp = TheoryParams(p=6.0, n_theory=5.0)
    assert not tp.sobolev_ok
    assert np.isnan(tp.p_star)


def test_weight_families_and_bounds():
    g = make_grid(1, 8.0, 257)
    w0 = make_weight(g, family="polynomial", q=6.0)
    assert w0.eps == 0.0 and w0.sup_gap == 0.0
    assert w0.values.min() >= 1.0
    assert w0.values.max() == pytest.approx(1.0 + 8.0**6)
    w = make_weight(g, family="shifted", eps=0.3, q=6.0, g="bump")
    assert np.all(w.values >= w0.values)
    # bump peaks at the x = 0 node, so the analytic sup gap is attained
    assert np.max(w.values - w0.values) == pytest.approx(0.3, rel=1e-14)
    assert w.sup_gap == 0.3
    w1 = make_weight(g, family="shifted", eps=0.3, q=6.0, g="one")
    # base values reach 1 + 8^6, so the additive shift rounds at ~1e-10
    tol = 4 * np.finfo(float).eps * w0.values.max()
    assert np.all(np.abs((w1.values - w0.values) - 0.3) < tol)


def test_weight_eps_validation():
    g = make_grid(1, 8.0, 33)
    with pytest.raises(InvariantError):
        make_weight(g, family="polynomial", eps=0.1)
    with pytest.raises(InvariantError):
        make_weight(g, family="shifted", eps=-0.1)
    with pytest.raises(InvariantError):
        make_weight(g, family="shifted", eps=1.5)
    with pytest.raises(InvariantError):
        make_weight(g, family="lorentz")


def test_integrability_quadrature_against_arctan():
    # q = 2, p = 4 gives the integrand 1/(1 + x^2); the analytic value over
    # [-8, 8] is 2 atan(8) = 2.8928826644962702 and the trapezoid error is
    # O(h^2), so refining the grid must close in at second order
    vals = []
    for m in (65, 129, 257):
        g = make_grid(1, 8.0, m)
        w = make_weight(g, family="polynomial", q=2.0)
        vals.append(integrability(w, TP).value)
    exact = 2.8928826644962702
    errs = [abs(v - exact) for v in vals]
    assert errs[2] < 1e-4
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.2)


def test_integrability_verdict():
    g = make_grid(1, 8.0, 33)
    # finite on R^n iff 2q/(p-2) > n: q = 6, p = 4 gives 6 > 5
    assert integrability(make_weight(g, q=6.0), TP).finite_on_rn
    assert not integrability(make_weight(g, q=4.0), TP).finite_on_rn
    assert float(integrability(make_weight(g, q=6.0), TP)) > 0


def test_tail_mass_decreases_in_radius():
    g = make_grid(1, 8.0, 257)
    w = make_weight(g, q=6.0)
    m2, m4, m6 = (tail_mass(w, TP, R) for R in (2.0, 4.0, 6.0))
    assert m2 > m4 > m6 > 0
    with pytest.raises(ValueError):
        tail_mass(w, TP, 9.0)
    with pytest.raises(ValueError):
        tail_mass(w, TP, 0.0)


def test_truncation_tail_bound_closed_form():
    # s = 2q/(p-2) = 6, d = 1: integral of 2 x^(-6) over (8, inf) = 2 8^-5 / 5
    assert truncation_tail_bound(6.0, TP, 8.0, 1) == pytest.approx(
        1.2207031250000001e-05, rel=1e-14
    )
    assert truncation_tail_bound(1.0, TP, 8.0, 1) == np.inf
    # the bound dominates the lattice tail it stands for
    g = make_grid(1, 8.0, 1025)
    w = make_weight(g, q=6.0)
    assert tail_mass(w, TP, 7.9) <= truncation_tail_bound(6.0, TP, 7.9, 1)


def test_embedding_from_integral_frozen():
    # (2 + 1)^(1/theta') with theta' = 2
    assert embedding_from_integral(2.0, TP) == pytest.approx(1.7320508075688772, rel=1e-15)


def test_embedding_constant_requires_base_member():
    g = make_grid(1, 8.0, 33)
    w = make_weight(g, family="shifted", eps=0.2)
    with pytest.raises(InvariantError):
        embedding_constant(w, TP)


def test_embedding_inequality_exact_on_lattice():
    # ||u||_2^2 <= c ||u||_{E,eps}^2 for every eps-member covered by the
    # +1 slack; discrete Holder makes this exact, not asymptotic
    g = make_grid(1, 8.0, 257)
    w0 = make_weight(g, family="polynomial", q=6.0)
    c = embedding_constant(w0, TP)
    rng = np.random.default_rng(20260819)
    for eps in (0.0, 0.1, 0.5, 1.0):
        w = make_weight(g, family="shifted", eps=eps, q=6.0) if eps else w0
        for _ in range(350):
            vals = rng.standard_normal(g.shape) * rng.uniform(0.01, 30.0)
            u = make_state(g, vals)
            lhs = norm_l2(u) ** 2
            rhs = c * energy_norm_pow(u, w, TP.p) ** (2.0 / TP.p)
            assert lhs <= rhs * (1 + 1e-12)
