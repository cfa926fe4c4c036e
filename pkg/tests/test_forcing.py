"""Drive schedules, spatial profiles, and the Lipschitz contract."""

import numpy as np
import pytest

from plaplab import (
    AmplitudeSchedule,
    Forcing,
    InvariantError,
    make_forcing,
    make_grid,
    make_profile,
    make_state,
    norm_l2,
)


def test_amplitude_kinds():
    assert AmplitudeSchedule("constant", 3.0)(17.0) == 3.0
    ramp = AmplitudeSchedule("ramp", base=1.0, rate=2.0, onset=0.0)
    assert ramp(3.0) == pytest.approx(7.0, rel=1e-15)  # 1 + 2 * 3
    assert ramp(-5.0) == 1.0  # clamped before onset
    expo = AmplitudeSchedule("exponential", base=1.0, rate=0.5, cap=2.0)
    assert expo(1.0) == pytest.approx(np.exp(0.5), rel=1e-14)
    assert expo(10.0) == pytest.approx(np.exp(1.0), rel=1e-14)  # frozen past cap


def test_amplitude_validation():
    with pytest.raises(InvariantError):
        AmplitudeSchedule("sawtooth", 1.0)
    with pytest.raises(InvariantError):
        AmplitudeSchedule("constant", -1.0)
    with pytest.raises(InvariantError):
        AmplitudeSchedule("ramp", 1.0, rate=-2.0)


def test_amplitude_nondecreasing():
    for sched in (
        AmplitudeSchedule("constant", 2.0),
        AmplitudeSchedule("ramp", 1.0, rate=0.7, onset=1.0),
        AmplitudeSchedule("exponential", 1.0, rate=0.3, cap=5.0),
    ):
        ts = np.linspace(-2.0, 12.0, 200)
        vals = [sched(t) for t in ts]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_profiles_unit_norm_and_dirichlet():
    g = make_grid(1, 8.0, 257)
    for kind in ("gaussian", "plateau"):
        prof = make_profile(g, kind)
        assert norm_l2(prof) == pytest.approx(1.0, rel=1e-14)
        assert np.all(prof.values[g.boundary_mask] == 0.0)
        assert np.all(prof.values >= 0.0)
    with pytest.raises(InvariantError):
        make_profile(g, "checkerboard")


def test_plateau_profile_flat_core():
    g = make_grid(1, 8.0, 257)
    prof = make_profile(g, "plateau")
    core = np.abs(g.axis) <= 0.74 * 8.0
    assert np.ptp(prof.values[core]) < 1e-14  # constant over the core


def test_drive_norm_at_zero_matches_amplitude():
    g = make_grid(1, 8.0, 257)
    F = make_forcing(g, lipschitz=0.25, amplitude=AmplitudeSchedule("ramp", 1.0, rate=0.5))
    z = make_state(g, np.zeros(g.shape))
    for t in (0.0, 1.0, 4.5):
        # sin coupling vanishes at u = 0, so the norm is amplitude(t) exactly
        assert norm_l2(F.eval(t, z)) == pytest.approx(F.amplitude(t), rel=1e-13)
        assert F.drive_norm_at_zero(t) == F.amplitude(t)


def test_empirical_lipschitz_below_declared():
    g = make_grid(1, 8.0, 129)
    F = make_forcing(g, lipschitz=0.4, amplitude=AmplitudeSchedule("constant", 2.0))
    rng = np.random.default_rng(29)
    for _ in range(200):
        a = rng.standard_normal(g.shape) * rng.uniform(0.1, 10)
        b = rng.standard_normal(g.shape) * rng.uniform(0.1, 10)
        u, v = make_state(g, a), make_state(g, b)
        du = norm_l2(make_state(g, F.eval(1.0, u).values - F.eval(1.0, v).values))
        dv = norm_l2(make_state(g, a - b))
        assert du <= 0.4 * dv * (1 + 1e-12)


def test_coupling_none_is_state_independent():
    g = make_grid(1, 8.0, 65)
    F = make_forcing(g, 0.25, AmplitudeSchedule("constant", 1.0), coupling="none")
    rng = np.random.default_rng(31)
    u = make_state(g, rng.standard_normal(g.shape))
    v = make_state(g, rng.standard_normal(g.shape))
    assert np.array_equal(F.eval(2.0, u).values, F.eval(2.0, v).values)


def test_forcing_boundary_zeroed():
    g = make_grid(1, 8.0, 65)
    F = make_forcing(g, 0.25, AmplitudeSchedule("constant", 5.0))
    u = make_state(g, np.ones(g.shape))  # nonzero boundary on purpose
    out = F.eval(0.0, u)
    assert np.all(out.values[g.boundary_mask] == 0.0)


def test_forcing_validation():
    g = make_grid(1, 8.0, 33)
    with pytest.raises(InvariantError):
        make_forcing(g, -0.1, AmplitudeSchedule("constant", 1.0))
    with pytest.raises(InvariantError):
        Forcing(g, 0.1, AmplitudeSchedule("constant", 1.0), make_profile(g), coupling="tanh")
