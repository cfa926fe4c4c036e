"""Command-line entry point: ``plaplab run <experiment> <config> [--out DIR]``.

Experiments write delimited tables (and snapshots) plus a reproducibility
manifest into the output directory; unless plots are switched off, each
table is rendered to a figure alongside.  All floating-point output uses 17
significant digits so re-running an emitted manifest reproduces the tables
byte for byte.  Exit codes: 0 success, 2 parse error, 3 invariant violation,
4 solver nonconvergence; failures also emit a JSON error record to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .attractor import (
    Cloud,
    attraction_diagnostic,
    process_gap,
    pullback_section,
    sample_ball,
    save_cloud,
    usc_sweep,
)
from .bounds import build_report, perturbation_envelope
from .config import RunConfig, config_echo, parse_config
from .errors import (
    ConfigError,
    InfeasibleYoungError,
    InnerSolverError,
    InvariantError,
    PlaplabError,
)
from .grid import State, project_dirichlet, save_state, norm_l2
from .stepper import evolve
from .weights import embedding_constant, integrability, truncation_tail_bound

OUT_ENV = "PLAPLAB_OUT"

EXPERIMENTS = ("simulate", "bounds", "attractor", "perturb", "sweep")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows, comments: list[str] = ()) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    path.write_text("\n".join(lines) + "\n")


def _initial_state(rc: RunConfig, grid, section: str) -> State:
    kind = rc.get_str(section, "u0")
    scale = rc.get_float(section, "u0_scale")
    if kind == "zero":
        return State(grid, np.zeros(grid.shape))
    if kind == "bump":
        return project_dirichlet(State(grid, scale * np.exp(-(grid.radius**2))))
    if kind == "random":
        rng = np.random.default_rng(rc.seed())
        u = sample_ball(grid, 1.0, 1, rng)[0]
        n = norm_l2(u)
        return State(grid, u.values * (scale / n))
    raise ConfigError(f"{section}.u0: unknown initial state {kind!r}", field=f"{section}.u0")


def _write_manifest(outdir: Path, rc: RunConfig) -> None:
    (outdir / "manifest.cfg").write_text(config_echo(rc))
    meta = {
        "version": __version__,
        "experiment": rc.experiment,
        "seed": rc.seed(),
        "config": rc.raw,
    }
    (outdir / "manifest.json").write_text(json.dumps(meta, indent=2) + "\n")


def _weight_notes(rc: RunConfig, grid, tp) -> dict:
    """Truncation and exponent diagnostics logged with every run."""
    q = rc.get_float("weights", "q")
    tail_tol = rc.get_float("weights", "tail_tol")
    tail = truncation_tail_bound(q, tp, grid.R_dom, grid.d)
    notes = {
        "truncation_tail_bound": tail,
        "tail_tol": tail_tol,
        "tail_ok": bool(tail <= tail_tol),
        "sobolev_ok": tp.sobolev_ok,
    }
    if not notes["tail_ok"]:
        print(
            f"warning: truncation tail bound {tail:.3e} exceeds weights.tail_tol={tail_tol:.3e}; "
            "increase grid.R_dom or weights.q",
            file=sys.stderr,
        )
    if not tp.sobolev_ok:
        print(
            f"warning: theory exponents violate 2 < p < n (p={tp.p}, n={tp.n_theory})",
            file=sys.stderr,
        )
    return notes


# --- experiments -------------------------------------------------------------


def run_simulate(rc: RunConfig, outdir: Path) -> None:
    grid = rc.build_grid()
    tp = rc.build_theory()
    E = rc.build_energy(grid, tp)
    F = rc.build_forcing(grid)
    step = rc.build_step()
    tau = rc.get_float("simulate", "tau")
    t_end = rc.get_float("simulate", "t_end")
    u0 = _initial_state(rc, grid, "simulate")
    _weight_notes(rc, grid, tp)

    traj = evolve(E, F, u0, tau, t_end, step)
    rows = [
        (
            k,
            traj.times[k],
            traj.monitors["l2_norm"][k],
            traj.monitors["E_norm"][k],
            traj.monitors["energy"][k],
            traj.monitors["inner_residual"][k],
            traj.monitors["inner_iters"][k],
        )
        for k in range(len(traj.times))
    ]
    _write_csv(
        outdir / "trajectory.csv",
        ["step", "time", "l2_norm", "E_norm", "energy", "inner_residual", "inner_iters"],
        rows,
        comments=[f"plaplab simulate seed={rc.seed()}"],
    )
    save_state(traj.final, outdir / "final_state.txt")
    if rc.get_bool("run", "plots"):
        from .report import save_trajectory_figure

        save_trajectory_figure(traj.times, traj.monitors, outdir / "trajectory.png")


def run_bounds(rc: RunConfig, outdir: Path) -> None:
    grid = rc.build_grid()
    tp = rc.build_theory()
    w_base = rc.build_weight(grid, eps=0.0)
    w_run = rc.build_weight(grid)
    F = rc.build_forcing(grid)
    notes = _weight_notes(rc, grid, tp)

    integ = integrability(w_base, tp)
    c = embedding_constant(w_base, tp)
    rep = build_report(tp, c, F.lipschitz, F.amplitude, t_ref=rc.get_float("bounds", "t_ref"))

    t_min = rc.get_float("bounds", "t_min")
    t_max = rc.get_float("bounds", "t_max")
    n_t = rc.get_int("bounds", "n_t")
    ts = np.linspace(t_min, t_max, n_t)
    drive = [rep.drive_level(t) for t in ts]
    b1 = [rep.absorb_l2(t) for t in ts]
    b2 = [rep.absorb_energy(t) for t in ts]
    env = [
        perturbation_envelope(
            F.lipschitz, rep.moment_apriori(t), t, t_min, 0.0, w_run.sup_gap
        )
        for t in ts
    ]
    _write_csv(
        outdir / "bounds_curves.csv",
        ["t", "drive_level", "absorb_l2", "absorb_energy", "envelope"],
        zip(ts, drive, b1, b2, env),
        comments=[f"plaplab bounds seed={rc.seed()}"],
    )
    payload = rep.as_dict()
    payload["side_integral"] = integ.value
    payload["side_integral_finite_on_rn"] = integ.finite_on_rn
    payload["weight_gap"] = w_run.sup_gap
    payload.update(notes)
    (outdir / "bounds.json").write_text(json.dumps(payload, indent=2) + "\n")
    if rc.get_bool("run", "plots"):
        from .report import save_bounds_figure

        save_bounds_figure(ts, drive, b1, b2, outdir / "bounds.png")


def run_attractor(rc: RunConfig, outdir: Path) -> None:
    grid = rc.build_grid()
    tp = rc.build_theory()
    E = rc.build_energy(grid, tp)
    F = rc.build_forcing(grid)
    step = rc.build_step()
    pcfg = rc.build_pullback()
    t = rc.get_float("pullback", "t")
    _weight_notes(rc, grid, tp)

    sec = pullback_section(E, F, t, pcfg, step)
    save_cloud(sec.cloud, outdir / "cloud")
    _write_csv(
        outdir / "certificate.csv",
        ["depth_a", "depth_b", "dist_h"],
        sec.certificate,
        comments=[f"plaplab attractor seed={rc.seed()}", f"converged={int(sec.converged)}"],
    )

    rng = np.random.default_rng(pcfg.seed + 1)
    b0 = Cloud(sample_ball(grid, pcfg.rho0, pcfg.m_samples, rng), t)
    depths = list(pcfg.depth_schedule)
    dists = attraction_diagnostic(E, F, t, b0, depths, step, sec.cloud)
    _write_csv(
        outdir / "attraction.csv",
        ["depth", "dist_h"],
        zip(depths, dists),
        comments=[f"plaplab attractor seed={rc.seed()}"],
    )
    if rc.get_bool("run", "plots"):
        from .report import save_attraction_figure

        save_attraction_figure(depths, dists, pcfg.tol_pullback, outdir / "attraction.png")


def run_perturb(rc: RunConfig, outdir: Path) -> None:
    grid = rc.build_grid()
    tp = rc.build_theory()
    F = rc.build_forcing(grid)
    step = rc.build_step()
    tau = rc.get_float("perturb", "tau")
    t = rc.get_float("perturb", "t")
    eps_list = rc.get_floats("perturb", "eps_list")
    u0 = _initial_state(rc, grid, "perturb")
    _weight_notes(rc, grid, tp)

    E0 = rc.build_energy(grid, tp, eps=0.0)
    summary = []
    curves = {}
    for eps in eps_list:
        E_eps = rc.build_energy(grid, tp, eps=eps)
        gap = process_gap(E_eps, E0, F, u0, u0, tau, t, step)
        name = outdir / f"gap_eps{eps:g}.csv"
        _write_csv(
            name,
            ["time", "gap_sq", "envelope"],
            zip(gap.times, gap.gap_sq, gap.envelope),
            comments=[f"plaplab perturb eps={eps:g} seed={rc.seed()}"],
        )
        summary.append(
            (
                eps,
                gap.sup_gap_sq,
                float(np.sqrt(gap.sup_gap_sq)),
                float(gap.envelope[-1]),
                gap.moment_measured,
                gap.weight_gap,
            )
        )
        curves[eps] = (gap.times, gap.gap_sq, gap.envelope)
    _write_csv(
        outdir / "perturb.csv",
        ["eps", "sup_gap_sq", "sup_gap", "envelope_final", "moment_measured", "weight_gap"],
        summary,
        comments=[f"plaplab perturb seed={rc.seed()}"],
    )
    if rc.get_bool("run", "plots"):
        from .report import save_gap_figure

        save_gap_figure(curves, outdir / "gaps.png")


def run_sweep(rc: RunConfig, outdir: Path) -> None:
    grid = rc.build_grid()
    tp = rc.build_theory()
    F = rc.build_forcing(grid)
    step = rc.build_step()
    pcfg = rc.build_pullback()
    t = rc.get_float("pullback", "t")
    eps_list = rc.get_floats("sweep", "eps_list")
    _weight_notes(rc, grid, tp)

    rows, sections = usc_sweep(
        [0.0] + [e for e in eps_list if e != 0.0],
        t,
        make_energy=lambda eps: rc.build_energy(grid, tp, eps=eps),
        forcing=F,
        pullback=pcfg,
        step=step,
    )
    _write_csv(
        outdir / "sweep.csv",
        ["eps", "dist_h_to_base", "sup_gap_sq", "envelope", "depth_used", "converged_flag"],
        [
            (r.eps, r.dist_h_to_base, r.sup_gap_sq, r.envelope, r.depth_used, int(r.converged))
            for r in rows
        ],
        comments=[f"plaplab sweep seed={rc.seed()}"],
    )
    for eps, sec in sections.items():
        save_cloud(sec.cloud, outdir / f"cloud_eps{eps:g}")
    if rc.get_bool("run", "plots"):
        from .report import save_sweep_figure

        save_sweep_figure(rows, outdir / "sweep.png")


_RUNNERS = {
    "simulate": run_simulate,
    "bounds": run_bounds,
    "attractor": run_attractor,
    "perturb": run_perturb,
    "sweep": run_sweep,
}


def _error(kind: str, exc: Exception) -> None:
    record = {"status": "error", "type": kind, "message": str(exc)}
    field = getattr(exc, "field", None)
    if field:
        record["field"] = field
    print(json.dumps(record), file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plaplab",
        description="Dissipativity constants and pullback-attractor diagnostics "
        "for a degenerate diffusion flow on a truncated grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one experiment from a config file")
    runp.add_argument("experiment", choices=EXPERIMENTS)
    runp.add_argument("config", help="path to the key-value config file")
    runp.add_argument("--out", default=None, help="output directory (overrides config and env)")
    args = parser.parse_args(argv)

    try:
        rc = parse_config(args.config, experiment=args.experiment)
        out = args.out or os.environ.get(OUT_ENV) or rc.get_str("run", "out_dir")
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        _RUNNERS[args.experiment](rc, outdir)
        _write_manifest(outdir, rc)
    except ConfigError as e:
        _error("parse-error", e)
        return 2
    except (InvariantError, InfeasibleYoungError) as e:
        _error("invariant-violation", e)
        return 3
    except InnerSolverError as e:
        _error("solver-nonconvergence", e)
        return 4
    except PlaplabError as e:
        _error("error", e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
