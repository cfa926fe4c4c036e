"""Implicit time stepping by proximal minimization.

One step from u at time t treats the drive explicitly and the monotone
operator implicitly: with z = u + dt * drive(t, u), the new state is the
minimizer of

    J(v) = 0.5 ||v - z||_2^2 + dt * energy(v)

over interior values, equivalently the solution of v + dt * grad = z.
J is 1-strongly convex in the quadrature L^2 metric, so a gradient descent
with Barzilai-Borwein steps and a watermark backtracking safeguard converges
linearly; the accepted iterate always satisfies J(v) <= J(u) exactly, which
is what makes the per-step dissipation inequality assertable without slack.
The returned residual is ||v + dt*grad(v) - z||_2 and is guaranteed to be
at most tol_inner * (1 + ||z||_2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InnerSolverError, InvariantError
from .forcing import Forcing
from .grid import State, energy_norm, norm_l2, require_dirichlet
from .operators import Energy, energy, energy_gradient

__all__ = ["StepConfig", "ProxResult", "Trajectory", "prox_step", "prox_step_full", "evolve"]

_ARMIJO = 1e-4
_WATERMARK = 8  # nonmonotone window for the BB safeguard
_MAX_HALVINGS = 80


@dataclass(frozen=True)
class StepConfig:
    dt: float = 1e-2
    tol_inner: float = 1e-8
    max_inner_iters: int = 2000

    def __post_init__(self):
        if not self.dt > 0:
            raise InvariantError(f"dt must be positive, got {self.dt}", field="step.dt")
        if not 0 < self.tol_inner <= 1e-3:
            raise InvariantError(
                f"tol_inner must lie in (0, 1e-3], got {self.tol_inner}",
                field="step.tol_inner",
            )
        if self.max_inner_iters < 1:
            raise InvariantError("max_inner_iters must be >= 1", field="step.max_inner_iters")


@dataclass
class ProxResult:
    state: State
    residual: float
    iterations: int


@dataclass
class Trajectory:
    """Discrete trajectory with per-step monitors.

    monitors maps column name -> array over steps (index 0 is the initial
    state, where the solver columns are zero).
    """

    times: np.ndarray
    states: list[State]
    monitors: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def final(self) -> State:
        return self.states[-1]


def _step_curvature(E: Energy, u: State, dt: float) -> float:
    """Cheap overestimate of the largest curvature of J at u; seeds the step."""
    g = u.grid
    p = E.p
    peak = 0.0
    for k in range(g.d):
        dg = np.abs(np.diff(u.values, axis=k)) / g.h
        if dg.size:
            peak = max(peak, float(dg.max()))
    stiff = (p - 1.0) * peak ** (p - 2.0) * 2.0 * g.d / (g.h * g.h)
    absorb = (p - 1.0) * float((E.weight.values * np.abs(u.values) ** (p - 2.0)).max())
    return 1.0 + dt * (stiff + absorb)


def _prox_solve(E: Energy, z: np.ndarray, dt: float, cfg: StepConfig, v0: np.ndarray):
    """Minimize J from warm start v0; returns (values, residual, iterations)."""
    g = E.grid
    w = g.node_weights
    z_state = State(g, z)
    target = cfg.tol_inner * (1.0 + norm_l2(z_state))

    def grad_J(vals: np.ndarray) -> np.ndarray:
        return vals - z + dt * energy_gradient(E, State(g, vals)).values

    def val_J(vals: np.ndarray) -> float:
        diff = vals - z
        return 0.5 * float(np.sum(w * diff * diff)) + dt * energy(E, State(g, vals))

    v = v0.copy()
    gv = grad_J(v)
    res = float(np.sqrt(np.sum(w * gv * gv)))
    if res <= target:
        return v, res, 0

    Jv = val_J(v)
    recent = [Jv]
    alpha = 1.0 / _step_curvature(E, State(g, v0), dt)
    for it in range(1, cfg.max_inner_iters + 1):
        watermark = max(recent)
        step = alpha
        accepted = False
        for _ in range(_MAX_HALVINGS):
            v_new = v - step * gv
            J_new = val_J(v_new)
            if J_new <= watermark - _ARMIJO * step * res * res:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # step underflowed: J is at its rounding floor near the minimum
            break
        g_new = grad_J(v_new)
        dv = v_new - v
        dg = g_new - gv
        # 1-strong monotonicity of grad_J gives <dv, dg> >= ||dv||^2 > 0,
        # so the BB1 step is well defined and lies in (0, 1]
        denom = float(np.sum(w * dv * dg))
        alpha = float(np.sum(w * dv * dv)) / denom if denom > 0 else 1.0
        v, gv = v_new, g_new
        Jv = J_new
        recent.append(Jv)
        if len(recent) > _WATERMARK:
            recent.pop(0)
        res = float(np.sqrt(np.sum(w * gv * gv)))
        if res <= target:
            return v, res, it
    raise InnerSolverError(
        f"inner solve stalled at residual {res:.3e} (target {target:.3e})",
        residual=res,
        iterations=cfg.max_inner_iters,
    )


def prox_step_full(E: Energy, F: Forcing, u: State, t: float, cfg: StepConfig) -> ProxResult:
    """One implicit step from (t, u) to t + dt, with solver diagnostics."""
    require_dirichlet(u)
    if cfg.dt * F.lipschitz >= 1.0:
        raise InvariantError(
            f"dt * lipschitz = {cfg.dt * F.lipschitz:.3g} >= 1; "
            "the explicit drive splitting needs dt * L < 1",
            field="step.dt",
        )
    z = u.values + cfg.dt * F.eval(t, u).values
    vals, res, iters = _prox_solve(E, z, cfg.dt, cfg, u.values)
    return ProxResult(State(E.grid, vals, t + cfg.dt), res, iters)


def prox_step(E: Energy, F: Forcing, u: State, t: float, cfg: StepConfig) -> State:
    return prox_step_full(E, F, u, t, cfg).state


def evolve(
    E: Energy,
    F: Forcing,
    u_tau: State,
    tau: float,
    t_end: float,
    cfg: StepConfig,
) -> Trajectory:
    """March from tau to t_end, rounding the horizon up to whole steps.

    Interpolation is never attempted: the number of steps is
    ceil((t_end - tau)/dt) and the reported final time is tau + n*dt.
    Step k evaluates the drive at tau + k*dt, so runs that share tau and
    dt are composable and bit-for-bit deterministic.
    """
    if t_end < tau:
        raise InvariantError(f"t_end={t_end} precedes tau={tau}", field="simulate.t_end")
    n_steps = max(0, int(np.ceil((t_end - tau) / cfg.dt - 1e-9)))
    times = np.empty(n_steps + 1)
    times[0] = tau
    u = u_tau.with_time(tau)
    states = [u]
    cols = {
        "l2_norm": np.empty(n_steps + 1),
        "E_norm": np.empty(n_steps + 1),
        "energy": np.empty(n_steps + 1),
        "inner_residual": np.zeros(n_steps + 1),
        "inner_iters": np.zeros(n_steps + 1),
    }

    def record(i: int, s: State):
        cols["l2_norm"][i] = norm_l2(s)
        cols["E_norm"][i] = energy_norm(s, E.weight, E.p)
        cols["energy"][i] = energy(E, s)
        if not np.isfinite(cols["l2_norm"][i]) or not np.isfinite(cols["energy"][i]):
            raise InvariantError(f"non-finite monitor at step {i}")

    record(0, u)
    for k in range(n_steps):
        t_k = tau + k * cfg.dt
        out = prox_step_full(E, F, u, t_k, cfg)
        u = out.state.with_time(tau + (k + 1) * cfg.dt)
        times[k + 1] = u.time_tag
        states.append(u)
        record(k + 1, u)
        cols["inner_residual"][k + 1] = out.residual
        cols["inner_iters"][k + 1] = out.iterations
    return Trajectory(times, states, cols)
