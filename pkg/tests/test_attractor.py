"""Cloud semidistance, pullback machinery, and paired-gap bookkeeping.

The heavier convergence claims live in the acceptance suite; here the
geometry is pinned with hand-checkable clouds on tiny grids.
"""

import numpy as np
import pytest

from plaplab import (
    AmplitudeSchedule,
    Cloud,
    Energy,
    PullbackConfig,
    StepConfig,
    TheoryParams,
    attraction_diagnostic,
    hausdorff_semidist,
    invariance_diagnostic,
    load_cloud,
    make_forcing,
    make_grid,
    make_state,
    make_weight,
    norm_l2,
    process_gap,
    pullback_section,
    sample_ball,
)

TP = TheoryParams(4.0, 5.0)


def tiny_grid():
    # nodes -1, 0, 1 with trapezoid weights (1/2, 1, 1/2)
    return make_grid(1, 1.0, 3)


def mk(g, *vals):
    return [make_state(g, np.array(v, dtype=float)) for v in vals]


def small_system(m=65):
    g = make_grid(1, 8.0, m)
    E = Energy(make_weight(g, q=6.0), TP)
    F = make_forcing(g, 0.25, AmplitudeSchedule("constant", 4.0))
    return g, E, F


def test_hausdorff_hand_case():
    g = tiny_grid()
    a = Cloud(mk(g, [0, 1, 0], [0, 2, 0]), 0.0)
    b = Cloud(mk(g, [0, 0, 0]), 0.0)
    # ||(0, y, 0)|| = sqrt(1 * y^2) = |y|: sup over a of the min is 2
    assert hausdorff_semidist(a, b) == pytest.approx(2.0, rel=1e-14)
    # reversed direction: the single b member picks its nearest a member
    assert hausdorff_semidist(b, a) == pytest.approx(1.0, rel=1e-14)


def test_hausdorff_against_bruteforce():
    g = make_grid(1, 2.0, 9)
    rng = np.random.default_rng(61)
    A = [make_state(g, rng.standard_normal(g.shape)) for _ in range(7)]
    B = [make_state(g, rng.standard_normal(g.shape)) for _ in range(5)]
    # plain double loop with the quadrature norm as the oracle
    expected = max(
        min(norm_l2(make_state(g, a.values - b.values)) for b in B) for a in A
    )
    got = hausdorff_semidist(Cloud(A, 0.0), Cloud(B, 0.0))
    assert got == pytest.approx(expected, rel=1e-12)


def test_hausdorff_subset_is_zero():
    g = tiny_grid()
    a = Cloud(mk(g, [0, 1, 0], [0, 2, 0]), 0.0)
    bigger = Cloud(mk(g, [0, 1, 0], [0, 2, 0], [0, 5, 0]), 0.0)
    assert hausdorff_semidist(a, bigger) == 0.0
    assert hausdorff_semidist(bigger, a) == pytest.approx(3.0, rel=1e-14)


def test_hausdorff_triangle_inequality():
    g = make_grid(1, 2.0, 9)
    rng = np.random.default_rng(67)
    clouds = [
        Cloud([make_state(g, rng.standard_normal(g.shape)) for _ in range(4)], 0.0)
        for _ in range(3)
    ]
    a, b, c = clouds
    assert hausdorff_semidist(a, c) <= (
        hausdorff_semidist(a, b) + hausdorff_semidist(b, c) + 1e-12
    )


def test_cloud_validation():
    g = tiny_grid()
    with pytest.raises(Exception):
        Cloud([], 0.0)
    g2 = make_grid(1, 1.0, 5)
    with pytest.raises(Exception):
        Cloud(mk(g, [0, 1, 0]) + [make_state(g2, np.zeros(5))], 0.0)


def test_sample_ball_properties():
    g = make_grid(1, 8.0, 129)
    rng = np.random.default_rng(71)
    samples = sample_ball(g, 5.0, 40, rng)
    assert len(samples) == 40
    for s in samples:
        assert norm_l2(s) <= 5.0 + 1e-12
        assert np.all(s.values[g.boundary_mask] == 0.0)
    # same seed, same ensemble, bit for bit
    again = sample_ball(g, 5.0, 40, np.random.default_rng(71))
    assert all(np.array_equal(a.values, b.values) for a, b in zip(samples, again))


def test_pullback_config_validation():
    with pytest.raises(Exception):
        PullbackConfig(depth_schedule=(3.0, 2.0))
    with pytest.raises(Exception):
        PullbackConfig(depth_schedule=(1.0,))
    with pytest.raises(Exception):
        PullbackConfig(rho0=-1.0)
    with pytest.raises(Exception):
        PullbackConfig(tol_pullback=0.0)


def test_pullback_section_converges_and_replays():
    g, E, F = small_system()
    cfg = PullbackConfig(
        rho0=4.0, m_samples=3, depth_schedule=(1.0, 2.0, 3.0, 5.0, 7.0), seed=5
    )
    step = StepConfig()
    sec = pullback_section(E, F, 0.0, cfg, step)
    assert sec.converged
    assert sec.certificate[-1][2] < cfg.tol_pullback
    assert len(sec.cloud.states) == 3
    assert sec.cloud.time_tag == 0.0
    # deterministic end to end
    rep = pullback_section(E, F, 0.0, cfg, step)
    assert all(
        np.array_equal(a.values, b.values)
        for a, b in zip(sec.cloud.states, rep.cloud.states)
    )
    # certificate rows are (shallower, deeper, distance)
    for da, db, dist in sec.certificate:
        assert db > da and dist >= 0.0


def test_attraction_diagnostic_depth_zero_and_decay():
    g, E, F = small_system()
    cfg = PullbackConfig(rho0=4.0, m_samples=3, depth_schedule=(1.0, 2.0, 3.0, 5.0, 7.0), seed=5)
    step = StepConfig()
    sec = pullback_section(E, F, 0.0, cfg, step)
    rng = np.random.default_rng(9)
    b0 = Cloud(sample_ball(g, 4.0, 3, rng), 0.0)
    dists = attraction_diagnostic(E, F, 0.0, b0, [0.0, 1.0, 3.0, 5.0], step, sec.cloud)
    # depth 0 is the raw ball against the section
    assert dists[0] == pytest.approx(hausdorff_semidist(b0, sec.cloud), rel=1e-14)
    assert dists[-1] < dists[0]
    assert dists[-1] < 1e-3


def test_invariance_diagnostic_small():
    g, E, F = small_system()
    cfg = PullbackConfig(rho0=4.0, m_samples=3, depth_schedule=(1.0, 2.0, 3.0, 5.0, 7.0), seed=5)
    fwd, bwd = invariance_diagnostic(E, F, 0.0, 0.5, cfg, StepConfig())
    assert fwd < 5 * cfg.tol_pullback
    assert bwd < 5 * cfg.tol_pullback
    with pytest.raises(Exception):
        invariance_diagnostic(E, F, 1.0, 1.0, cfg, StepConfig())


def test_process_gap_zero_for_identical_systems():
    g, E, F = small_system()
    rng = np.random.default_rng(73)
    u0 = sample_ball(g, 2.0, 1, rng)[0]
    gap = process_gap(E, E, F, u0, u0, 0.0, 0.3, StepConfig())
    assert np.all(gap.gap_sq == 0.0)
    assert gap.weight_gap == 0.0


def test_process_gap_tracks_weight_distance():
    g = make_grid(1, 8.0, 65)
    E0 = Energy(make_weight(g, q=6.0), TP)
    Ee = Energy(make_weight(g, family="shifted", eps=0.2, q=6.0), TP)
    F = make_forcing(g, 0.25, AmplitudeSchedule("constant", 4.0))
    rng = np.random.default_rng(79)
    u0 = sample_ball(g, 2.0, 1, rng)[0]
    gap = process_gap(Ee, E0, F, u0, u0, 0.0, 1.0, StepConfig())
    assert gap.weight_gap == pytest.approx(0.2, rel=1e-14)
    assert gap.gap_sq[0] == 0.0
    assert gap.sup_gap_sq > 0.0
    # measured envelope dominates the measured gap pointwise
    assert np.all(gap.gap_sq <= gap.envelope + 1e-15)
    assert gap.moment_measured > 0.0


def test_cloud_roundtrip(tmp_path):
    g, E, F = small_system()
    rng = np.random.default_rng(83)
    cloud = Cloud(sample_ball(g, 3.0, 4, rng), 1.5, {"eps": 0.0, "note": "roundtrip"})
    from plaplab import save_cloud

    save_cloud(cloud, tmp_path / "c")
    back = load_cloud(tmp_path / "c")
    assert back.time_tag == 1.5
    assert len(back.states) == 4
    assert back.provenance["note"] == "roundtrip"
    for a, b in zip(cloud.states, back.states):
        assert np.array_equal(a.values, b.values)
