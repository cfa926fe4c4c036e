"""Pullback-attractor approximation and upper-semicontinuity diagnostics.

A section of the attractor at time t is approximated by evolving a fixed
ensemble of initial states from ever deeper start times t - depth up to t.
Successive clouds are compared in the Hausdorff semidistance; once they
agree to tol_pullback the deepest cloud stands in for the section.  The
same machinery yields the attraction diagnostic (distance of an evolved
bundle to the section as depth grows) and the eps-sweep that watches the
perturbed sections converge to the unperturbed one with the paired
trajectory gap and its envelope alongside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import perturbation_envelope
from .errors import InvariantError
from .forcing import Forcing
from .grid import Grid, State, load_state, norm_lp, save_state
from .operators import Energy
from .stepper import StepConfig, evolve

__all__ = [
    "Cloud",
    "PullbackConfig",
    "PullbackResult",
    "hausdorff_semidist",
    "sample_ball",
    "pullback_section",
    "attraction_diagnostic",
    "invariance_diagnostic",
    "PairGap",
    "process_gap",
    "SweepRow",
    "usc_sweep",
    "save_cloud",
    "load_cloud",
]


@dataclass
class Cloud:
    """Finite set of states at a common time, with provenance for replay."""

    states: list[State]
    time_tag: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.states:
            raise ValueError("cloud needs at least one member")
        g = self.states[0].grid
        for s in self.states[1:]:
            if s.grid is not g and s.grid != g:
                raise InvariantError("cloud members live on different grids")

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    def matrix(self) -> np.ndarray:
        return np.stack([s.values.ravel() for s in self.states])


def hausdorff_semidist(A: Cloud, B: Cloud) -> float:
    """sup over members of A of the L^2 distance to the closest member of B."""
    if A.grid != B.grid:
        raise InvariantError("clouds live on different grids")
    scale = np.sqrt(A.grid.node_weights).ravel()
    X = A.matrix() * scale
    Y = B.matrix() * scale
    d2 = np.sum((X[:, None, :] - Y[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.min(axis=1).max()))


@dataclass(frozen=True)
class PullbackConfig:
    """Ensemble construction parameters.

    rho0 should dominate the absorbing radius so attraction is exercised
    from outside the absorbing set; depths must increase strictly.
    """

    rho0: float = 6.0
    m_samples: int = 6
    depth_schedule: tuple = (1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 14.0)
    tol_pullback: float = 1e-4
    seed: int = 12345

    def __post_init__(self):
        if self.m_samples < 2:
            raise InvariantError("m_samples must be >= 2", field="pullback.m_samples")
        if self.rho0 <= 0:
            raise InvariantError("rho0 must be positive", field="pullback.rho0")
        if self.tol_pullback <= 0:
            raise InvariantError("tol_pullback must be positive", field="pullback.tol_pullback")
        sched = tuple(float(x) for x in self.depth_schedule)
        if len(sched) < 2:
            raise InvariantError("depth_schedule needs >= 2 entries", field="pullback.depths")
        if any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 0:
            raise InvariantError(
                "depth_schedule must be nonnegative and strictly increasing",
                field="pullback.depths",
            )
        object.__setattr__(self, "depth_schedule", sched)


def sample_ball(grid: Grid, radius: float, count: int, rng: np.random.Generator) -> list[State]:
    """Random interior states: uniform directions, radii uniform in [0, radius]."""
    out = []
    n_int = int(grid.interior_mask.sum())
    for _ in range(count):
        vals = np.zeros(grid.shape)
        vals[grid.interior_mask] = rng.standard_normal(n_int)
        norm = float(np.sqrt(np.sum(grid.node_weights * vals * vals)))
        r = radius * rng.uniform()
        vals *= r / norm
        out.append(State(grid, vals))
    return out


@dataclass
class PullbackResult:
    cloud: Cloud
    certificate: list  # (shallower depth, deeper depth, semidistance) triples
    converged: bool
    depth_used: float
    samples: list[State]


def _evolve_endpoints(
    E: Energy, F: Forcing, samples: list[State], tau: float, t: float, step: StepConfig
) -> list[State]:
    return [evolve(E, F, s, tau, t, step).final for s in samples]


def pullback_section(
    E: Energy, F: Forcing, t: float, cfg: PullbackConfig, step: StepConfig
) -> PullbackResult:
    """Approximate the attractor section at time t by deepening pullback runs.

    The sample ensemble is drawn once from cfg.seed and reused at every
    depth, so identical (seed, config) pairs reproduce the clouds bit for
    bit.  Stops at the first successive-cloud semidistance below
    tol_pullback; otherwise returns the deepest cloud with converged=False.
    """
    rng = np.random.default_rng(cfg.seed)
    samples = sample_ball(E.grid, cfg.rho0, cfg.m_samples, rng)
    eps = E.weight.eps
    cert = []
    prev: Cloud | None = None
    prev_depth = None
    converged = False
    cloud = None
    depth = cfg.depth_schedule[0]
    for depth in cfg.depth_schedule:
        ends = _evolve_endpoints(E, F, samples, t - depth, t, step)
        cloud = Cloud(
            ends, t, {"eps": eps, "depth": depth, "seed": cfg.seed, "time_tag": t}
        )
        if prev is not None:
            d = hausdorff_semidist(prev, cloud)
            cert.append((prev_depth, depth, d))
            if d < cfg.tol_pullback:
                converged = True
                break
        prev, prev_depth = cloud, depth
    return PullbackResult(cloud, cert, converged, depth, samples)


def attraction_diagnostic(
    E: Energy,
    F: Forcing,
    t: float,
    b0: Cloud,
    depths,
    step: StepConfig,
    attractor: Cloud,
) -> np.ndarray:
    """Semidistance to the section after evolving b0 from t - depth, per depth."""
    dists = []
    for depth in depths:
        if depth == 0:
            ends = b0.states
        else:
            ends = _evolve_endpoints(E, F, b0.states, t - depth, t, step)
        dists.append(hausdorff_semidist(Cloud(ends, t), attractor))
    return np.array(dists)


def invariance_diagnostic(
    E: Energy,
    F: Forcing,
    t_from: float,
    t_to: float,
    cfg: PullbackConfig,
    step: StepConfig,
):
    """Evolve the section at t_from to t_to and compare with the section there.

    Returns (forward, backward) semidistances between the evolved cloud and
    the directly constructed section; both should sit at the certificate
    scale when the sections have converged.
    """
    if t_to <= t_from:
        raise InvariantError("t_to must exceed t_from")
    sec_from = pullback_section(E, F, t_from, cfg, step)
    sec_to = pullback_section(E, F, t_to, cfg, step)
    ends = _evolve_endpoints(E, F, sec_from.cloud.states, t_from, t_to, step)
    evolved = Cloud(ends, t_to)
    return (
        hausdorff_semidist(evolved, sec_to.cloud),
        hausdorff_semidist(sec_to.cloud, evolved),
    )


# --- paired-trajectory gap ---------------------------------------------------


@dataclass
class PairGap:
    times: np.ndarray
    gap_sq: np.ndarray
    envelope: np.ndarray
    moment_measured: float
    weight_gap: float

    @property
    def sup_gap_sq(self) -> float:
        return float(self.gap_sq.max())


def process_gap(
    E_eps: Energy,
    E_base: Energy,
    F: Forcing,
    u_tau_eps: State,
    u_tau_base: State,
    tau: float,
    t: float,
    step: StepConfig,
) -> PairGap:
    """Evolve the perturbed and base systems in lockstep and bound the gap.

    The moment constant of the envelope is measured along the run as the
    supremum of ||u_base||_p^p + ||u_base||_p^(p-1) ||u_eps||_p, and the
    weight gap is the analytic sup-distance of the two weight fields.
    """
    p = E_base.p
    traj_e = evolve(E_eps, F, u_tau_eps, tau, t, step)
    traj_b = evolve(E_base, F, u_tau_base, tau, t, step)
    times = traj_b.times
    w = E_base.grid.node_weights
    gap_sq = np.array(
        [
            float(np.sum(w * (se.values - sb.values) ** 2))
            for se, sb in zip(traj_e.states, traj_b.states)
        ]
    )
    moments = np.array(
        [
            norm_lp(sb, p) ** p + norm_lp(sb, p) ** (p - 1.0) * norm_lp(se, p)
            for se, sb in zip(traj_e.states, traj_b.states)
        ]
    )
    moment = float(moments.max())
    wgap = abs(E_eps.weight.sup_gap - E_base.weight.sup_gap)
    env = np.array(
        [
            perturbation_envelope(F.lipschitz, moment, s, tau, gap_sq[0], wgap)
            for s in times
        ]
    )
    return PairGap(times, gap_sq, env, moment, wgap)


# --- the eps sweep -----------------------------------------------------------


@dataclass
class SweepRow:
    eps: float
    dist_h_to_base: float
    sup_gap_sq: float
    envelope: float
    depth_used: float
    converged: bool


def usc_sweep(
    eps_list,
    t: float,
    *,
    make_energy,
    forcing: Forcing,
    pullback: PullbackConfig,
    step: StepConfig,
) -> tuple[list[SweepRow], dict]:
    """Distance of the perturbed sections to the base section as eps shrinks.

    make_energy(eps) must build the Energy for one family member; identical
    pullback seeds are used for every member so the eps = 0 row is exactly
    zero and the remaining rows differ only through the weight field.  Each
    row also carries the paired-trajectory gap from the deepest pullback
    start, with its envelope evaluated from the measured moment constant.
    """
    base = make_energy(0.0)
    sec_base = pullback_section(base, forcing, t, pullback, step)
    rows = []
    results = {0.0: sec_base}
    for eps in eps_list:
        if eps == 0.0:
            rows.append(SweepRow(0.0, 0.0, 0.0, 0.0, sec_base.depth_used, sec_base.converged))
            continue
        E_eps = make_energy(eps)
        sec = pullback_section(E_eps, forcing, t, pullback, step)
        dist = hausdorff_semidist(sec.cloud, sec_base.cloud)
        tau = t - sec.depth_used
        u0 = sec.samples[0]
        gap = process_gap(E_eps, base, forcing, u0, u0, tau, t, step)
        rows.append(
            SweepRow(
                eps,
                dist,
                gap.sup_gap_sq,
                float(gap.envelope[-1]),
                sec.depth_used,
                sec.converged,
            )
        )
        results[eps] = sec
    rows.sort(key=lambda r: -r.eps)
    return rows, results


# --- cloud persistence -------------------------------------------------------


def save_cloud(cloud: Cloud, directory) -> None:
    """Write members as snapshots plus a manifest with the provenance."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(cloud.states):
        save_state(s.with_time(cloud.time_tag), d / f"member_{i:03d}.txt")
    manifest = {
        "time_tag": cloud.time_tag,
        "n_members": len(cloud.states),
        "grid": {"d": cloud.grid.d, "R_dom": cloud.grid.R_dom, "m": cloud.grid.m},
    }
    manifest.update(cloud.provenance)
    (d / "cloud_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def load_cloud(directory, grid: Grid | None = None) -> Cloud:
    d = Path(directory)
    manifest = json.loads((d / "cloud_manifest.json").read_text())
    states = [
        load_state(path, grid) for path in sorted(d.glob("member_*.txt"))
    ]
    prov = {
        k: v for k, v in manifest.items() if k not in ("time_tag", "n_members", "grid")
    }
    return Cloud(states, manifest["time_tag"], prov)
