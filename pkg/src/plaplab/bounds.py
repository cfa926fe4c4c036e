"""Explicit dissipativity constants and closed-form a-priori curves.

Everything here is arithmetic on the run parameters; no state is evolved.
From the embedding constant c (so ||u||_2^2 <= c ||u||_E^2) the energy norm
controls the L^2 norm with coercivity c^(-p/2).  Splitting the drive terms
with Young's inequality at a tunable parameter leaves the decay rate

    rate = coercivity - (young^theta / theta + young^p / p)

against the drive level

    level(t) = (1/theta') (L/young)^theta' + (1/p') (amplitude(t)/young)^p'

and the comparison inequality  (1/2) d/dt ||u||^2 + rate * ||u||^p <= level(t)
yields, for t - tau >= transient_time, the absorbing bound absorb_l2 for
(1/2)||u||^2 and, one uniform-Gronwall window later, absorb_energy for
||u||_E^p.  The module also provides the comparison-ODE integrator used to
cross-check those curves and the linear-in-weight-gap perturbation envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InfeasibleYoungError, InvariantError
from .weights import TheoryParams

__all__ = [
    "DissipationReport",
    "build_report",
    "report_from_young",
    "decay_ode_solve",
    "decay_envelope",
    "GronwallCheck",
    "gronwall_window_check",
    "perturbation_envelope",
    "gronwall_factor",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class DissipationReport:
    """Constants of one run, with the absorbing curves as methods.

    embed_const >= 1 and lipschitz > 0 are caller obligations.  amplitude
    must be nondecreasing; all curves evaluate it at window-shifted times
    on that assumption.
    """

    tp: TheoryParams
    embed_const: float
    lipschitz: float
    amplitude: Callable[[float], float]
    young_param: float
    t_ref: float = 0.0

    def __post_init__(self):
        if not self.embed_const >= 1.0:
            raise InvariantError(f"embed_const must be >= 1, got {self.embed_const}")
        if not self.lipschitz > 0:
            raise InvariantError(
                f"lipschitz must be positive for the dissipation constants, got {self.lipschitz}",
                field="forcing.L",
            )
        if not self.young_param > 0:
            raise InvariantError(f"young_param must be positive, got {self.young_param}")

    # --- scalar constants -------------------------------------------------

    @property
    def coercivity(self) -> float:
        """c^(-p/2): the energy norm to the p dominates this times ||u||_2^p."""
        return self.embed_const ** (-self.tp.p / 2.0)

    @property
    def decay_rate(self) -> float:
        tp = self.tp
        e = self.young_param
        return self.coercivity - (e**tp.theta / tp.theta + e**tp.p / tp.p)

    @property
    def transient_time(self) -> float:
        """Time for the data-independent transient term to fall to 1."""
        return 2.0 / (self.decay_rate * (self.tp.p - 2.0))

    @property
    def settle_time(self) -> float:
        """Two transients: when the energy-norm absorbing bound applies."""
        return 2.0 * self.transient_time

    @property
    def window(self) -> float:
        """Averaging window of the uniform-Gronwall pass (one transient)."""
        return self.transient_time

    # --- curves -------------------------------------------------------------

    def drive_level(self, t: float) -> float:
        tp = self.tp
        e = self.young_param
        a = (self.lipschitz / e) ** tp.theta_conj / tp.theta_conj
        b = (self.amplitude(t) / e) ** tp.p_conj / tp.p_conj
        return a + b

    def absorb_l2(self, t: float) -> float:
        """Absorbing bound for (1/2)||u(t)||_2^2, valid once t - tau >= transient_time."""
        return (self.drive_level(t) / self.decay_rate) ** (2.0 / self.tp.p) + 1.0

    def l2_envelope(self, t: float, tau: float) -> float:
        """Data-free comparison bound for (1/2)||u(t)||_2^2, any t > tau."""
        return decay_envelope(self.decay_rate, self.tp.p, self.drive_level, t, tau)

    @property
    def gron_exp(self) -> float:
        return self.window * self.tp.p / self.tp.theta

    def gron_drive(self, t: float) -> float:
        tp = self.tp
        R = self.window
        return (R * tp.p / tp.theta_conj) * self.lipschitz ** (
            2.0 * tp.theta_conj
        ) + R * tp.p * self.amplitude(t + R) ** 2

    def gron_mass(self, t: float) -> float:
        R = self.window
        b_now = self.absorb_l2(t)
        b_fwd = self.absorb_l2(t + R)
        return 0.5 * b_now + R * self.lipschitz * b_fwd + R * self.amplitude(t + R) * math.sqrt(b_fwd)

    def absorb_energy(self, t: float) -> float:
        """Absorbing bound for ||u(t)||_E^p, valid once t - tau >= settle_time."""
        return (self.gron_mass(t) / self.window + self.gron_drive(t)) * math.exp(self.gron_exp)

    def moment_apriori(self, t: float) -> float:
        """A-priori bound for the L^p moment sum entering the perturbation
        estimate, from absorb_energy and a >= 1; valid post-settle."""
        return 2.0 * self.absorb_energy(t)

    def as_dict(self) -> dict:
        tp = self.tp
        return {
            "p": tp.p,
            "n_theory": tp.n_theory,
            "theta": tp.theta,
            "theta_conj": tp.theta_conj,
            "p_conj": tp.p_conj,
            "p_star": tp.p_star,
            "sobolev_ok": tp.sobolev_ok,
            "embed_const": self.embed_const,
            "coercivity": self.coercivity,
            "lipschitz": self.lipschitz,
            "young_param": self.young_param,
            "decay_rate": self.decay_rate,
            "transient_time": self.transient_time,
            "settle_time": self.settle_time,
            "window": self.window,
            "gron_exp": self.gron_exp,
            "t_ref": self.t_ref,
            "absorb_l2_at_t_ref": self.absorb_l2(self.t_ref),
        }


def report_from_young(
    tp: TheoryParams,
    embed_const: float,
    lipschitz: float,
    amplitude: Callable[[float], float],
    young_param: float,
    t_ref: float = 0.0,
) -> DissipationReport:
    """Build a report at a pinned Young parameter; rate must come out positive."""
    rep = DissipationReport(tp, embed_const, lipschitz, amplitude, young_param, t_ref)
    if not rep.decay_rate > 0:
        raise InfeasibleYoungError(
            f"decay rate {rep.decay_rate:.3e} <= 0 at young_param={young_param}",
            young_grid=np.array([young_param]),
            rate_values=np.array([rep.decay_rate]),
        )
    return rep


def _rate(tp: TheoryParams, coercivity: float, e: float) -> float:
    return coercivity - (e**tp.theta / tp.theta + e**tp.p / tp.p)


def build_report(
    tp: TheoryParams,
    embed_const: float,
    lipschitz: float,
    amplitude: Callable[[float], float],
    t_ref: float = 0.0,
) -> DissipationReport:
    """Select the Young parameter minimizing absorb_l2(t_ref), then report.

    The parameter is scanned on a log grid over the feasible interval
    (where the decay rate stays positive) and refined by golden section
    around the best grid point.  If no grid point is feasible the failure
    carries the scanned grid and rate values.
    """
    if not embed_const >= 1.0:
        raise InvariantError(f"embed_const must be >= 1, got {embed_const}")
    coercivity = embed_const ** (-tp.p / 2.0)

    probe = np.logspace(-12, 2, 57)
    if not (coercivity > 0 and math.isfinite(coercivity)):
        raise InfeasibleYoungError(
            f"coercivity {coercivity} leaves no positive decay rate",
            young_grid=probe,
            rate_values=np.array([_rate(tp, coercivity, e) for e in probe]),
        )

    # the rate is strictly decreasing in the parameter: bracket its root
    hi = 1.0
    while _rate(tp, coercivity, hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            break
    lo = hi / 2.0 if hi > 1.0 else 1e-12
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _rate(tp, coercivity, mid) > 0:
            lo = mid
        else:
            hi = mid
    e_max = lo  # largest scanned parameter with positive rate

    grid = np.logspace(math.log10(e_max) - 8.0, math.log10(e_max), 160)
    rates = np.array([_rate(tp, coercivity, e) for e in grid])
    feasible = rates > 0
    if not feasible.any():
        raise InfeasibleYoungError(
            "no Young parameter on the scanned grid keeps the decay rate positive",
            young_grid=grid,
            rate_values=rates,
        )

    def objective(e: float) -> float:
        r = _rate(tp, coercivity, e)
        if r <= 0:
            return float("inf")
        level = (lipschitz / e) ** tp.theta_conj / tp.theta_conj
        level += (amplitude(t_ref) / e) ** tp.p_conj / tp.p_conj
        return (level / r) ** (2.0 / tp.p) + 1.0

    vals = np.array([objective(e) if ok else np.inf for e, ok in zip(grid, feasible)])
    i = int(np.argmin(vals))
    lo_b = grid[max(0, i - 1)]
    hi_b = grid[min(len(grid) - 1, i + 1)]
    a, b = lo_b, hi_b
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(120):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(x2)
    best = x1 if f1 <= f2 else x2
    if objective(best) > vals[i]:
        best = grid[i]
    return report_from_young(tp, embed_const, lipschitz, amplitude, best, t_ref)


# --- comparison ODE oracle --------------------------------------------------


def decay_ode_solve(
    rate: float,
    theta: float,
    drive: Callable[[float], float],
    y0: float,
    horizon: float,
    max_dt: float = 5e-3,
):
    """Integrate y' = 2 (drive(t) - rate * y^theta) from y(0) = y0.

    Explicit RK4 with a stiffness-limited step so large initial data do not
    blow past the equilibrium.  Returns (times, values); the solution of the
    equality ODE dominates every curve obeying the differential inequality,
    which is what makes this usable as an independent comparison oracle.
    """
    if y0 < 0:
        raise InvariantError(f"y0 must be >= 0, got {y0}")

    def f(t: float, y: float) -> float:
        yc = max(y, 0.0)
        return 2.0 * (drive(t) - rate * yc**theta)

    ts = [0.0]
    ys = [float(y0)]
    t, y = 0.0, float(y0)
    while t < horizon:
        slope = 2.0 * rate * theta * max(y, 1e-30) ** (theta - 1.0)
        dt = min(max_dt, 0.2 / (1.0 + slope), horizon - t)
        k1 = f(t, y)
        k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        y = max(y, 0.0)
        t = t + dt
        ts.append(t)
        ys.append(y)
    return np.array(ts), np.array(ys)


def decay_envelope(
    rate: float, p: float, drive: Callable[[float], float], t: float, tau: float
) -> float:
    """Data-free bound ((drive/rate)^(2/p) + [rate/2 (p-2)(t-tau)]^(-2/(p-2)));
    infinite at t = tau, decaying to the equilibrium level."""
    if t <= tau:
        return float("inf")
    head = (drive(t) / rate) ** (2.0 / p)
    tail = (0.5 * rate * (p - 2.0) * (t - tau)) ** (-2.0 / (p - 2.0))
    return head + tail


# --- uniform Gronwall and perturbation envelopes ----------------------------


@dataclass(frozen=True)
class GronwallCheck:
    bound: float
    observed: float

    @property
    def ok(self) -> bool:
        return self.observed <= self.bound

    @property
    def margin(self) -> float:
        return self.bound - self.observed


def gronwall_window_check(
    exp_int: float, drive_int: float, mass_int: float, window: float, values
) -> GronwallCheck:
    """Check the window conclusion y(end) <= (mass/window + drive) * e^exp
    against a sampled curve over one window."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise ValueError("empty curve")
    bound = (mass_int / window + drive_int) * math.exp(exp_int)
    return GronwallCheck(bound, float(vals[-1]))


def perturbation_envelope(
    lipschitz: float,
    moment_bound: float,
    t: float,
    tau: float,
    gap0: float,
    weight_gap: float,
) -> float:
    """Squared-gap envelope (gap0 + 2 M (t - tau) weight_gap) e^(2 L (t - tau)).

    Linear in the sup-distance between the two weight fields; gap0 is the
    squared gap of the initial data.
    """
    dt = t - tau
    if dt < 0:
        raise InvariantError(f"t={t} precedes tau={tau}")
    return (gap0 + 2.0 * moment_bound * dt * weight_gap) * math.exp(2.0 * lipschitz * dt)


def gronwall_factor(lipschitz: float, moment_bound: float, t: float, tau: float) -> float:
    """Prefactor max(1, 2 M (t - tau)) e^(2 L (t - tau)) of the flattened envelope."""
    dt = t - tau
    return max(1.0, 2.0 * moment_bound * dt) * math.exp(2.0 * lipschitz * dt)
