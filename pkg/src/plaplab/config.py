"""Run configuration: a flat key-value text format with one section per module.

Unknown sections or keys are rejected so typos surface as parse errors with
the offending dotted path.  ``resolve`` folds the file over the defaults
below and returns both the typed objects and a normalized echo suitable for
reproducibility manifests: re-running an echoed config reproduces every
delimited output byte for byte.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .attractor import PullbackConfig
from .errors import ConfigError, InvariantError
from .forcing import AmplitudeSchedule, Forcing, make_forcing
from .grid import Grid, make_grid
from .operators import Energy
from .stepper import StepConfig
from .weights import TheoryParams, WeightField, make_weight

__all__ = ["RunConfig", "parse_config", "config_echo", "DEFAULTS"]

DEFAULTS: dict[str, dict[str, str]] = {
    "run": {
        "seed": "20260819",
        "out_dir": "plaplab_out",
        "plots": "on",
    },
    "grid": {
        "d": "1",
        "R_dom": "8.0",
        "m": "257",
    },
    "theory": {
        "p": "4.0",
        "n_theory": "5.0",
    },
    "weights": {
        "family": "shifted",
        "q": "6.0",
        "eps": "0.0",
        "g": "bump",
        "tail_tol": "1e-4",
    },
    "forcing": {
        "L": "0.25",
        "amplitude": "constant",
        "b0": "4.0",
        "b1": "0.0",
        "t0": "0.0",
        "t_cap": "10.0",
        "profile": "plateau",
        "coupling": "sin",
    },
    "step": {
        "dt": "1e-2",
        "tol_inner": "1e-8",
        "max_inner_iters": "2000",
    },
    "simulate": {
        "tau": "0.0",
        "t_end": "10.0",
        "u0": "zero",
        "u0_scale": "1.0",
    },
    "bounds": {
        "t_ref": "0.0",
        "t_min": "0.0",
        "t_max": "10.0",
        "n_t": "101",
    },
    "pullback": {
        "t": "0.0",
        "rho0": "6.0",
        "m_samples": "6",
        "depths": "1, 2, 3, 5, 7, 10, 14",
        "tol_pullback": "1e-4",
    },
    "perturb": {
        "eps_list": "0.4, 0.2, 0.1, 0.05",
        "tau": "0.0",
        "t": "10.0",
        "u0": "random",
        "u0_scale": "5.0",
    },
    "sweep": {
        "eps_list": "0.4, 0.2, 0.1, 0.05, 0.025",
    },
}

_SECTION_ORDER = list(DEFAULTS)


@dataclass
class RunConfig:
    """Resolved configuration: raw string table plus typed accessors."""

    raw: dict[str, dict[str, str]]
    experiment: str = "simulate"

    # --- typed getters ------------------------------------------------------

    def _get(self, section: str, key: str, conv, kind: str):
        text = self.raw[section][key]
        try:
            return conv(text)
        except ValueError:
            raise ConfigError(
                f"{section}.{key}: expected {kind}, got {text!r}", field=f"{section}.{key}"
            ) from None

    def get_float(self, section: str, key: str) -> float:
        return self._get(section, key, float, "a number")

    def get_int(self, section: str, key: str) -> int:
        return self._get(section, key, int, "an integer")

    def get_str(self, section: str, key: str) -> str:
        return self.raw[section][key]

    def get_bool(self, section: str, key: str) -> bool:
        text = self.raw[section][key].lower()
        if text in ("on", "true", "yes", "1"):
            return True
        if text in ("off", "false", "no", "0"):
            return False
        raise ConfigError(
            f"{section}.{key}: expected on/off, got {text!r}", field=f"{section}.{key}"
        )

    def get_floats(self, section: str, key: str) -> list[float]:
        text = self.raw[section][key]
        try:
            return [float(tok) for tok in text.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(
                f"{section}.{key}: expected a comma-separated list of numbers, got {text!r}",
                field=f"{section}.{key}",
            ) from None

    # --- builders -----------------------------------------------------------

    def seed(self) -> int:
        return self.get_int("run", "seed")

    def build_grid(self) -> Grid:
        d = self.get_int("grid", "d")
        R = self.get_float("grid", "R_dom")
        m = self.get_int("grid", "m")
        try:
            return make_grid(d, R, m)
        except ValueError as e:
            raise InvariantError(f"grid: {e}", field="grid") from None

    def build_theory(self) -> TheoryParams:
        return TheoryParams(self.get_float("theory", "p"), self.get_float("theory", "n_theory"))

    def build_weight(self, grid: Grid, eps: float | None = None) -> WeightField:
        if eps is None:
            eps = self.get_float("weights", "eps")
        return make_weight(
            grid,
            family=self.get_str("weights", "family"),
            eps=eps,
            q=self.get_float("weights", "q"),
            g=self.get_str("weights", "g"),
        )

    def build_energy(self, grid: Grid, tp: TheoryParams, eps: float | None = None) -> Energy:
        return Energy(self.build_weight(grid, eps), tp)

    def build_forcing(self, grid: Grid) -> Forcing:
        amp = AmplitudeSchedule(
            kind=self.get_str("forcing", "amplitude"),
            base=self.get_float("forcing", "b0"),
            rate=self.get_float("forcing", "b1"),
            onset=self.get_float("forcing", "t0"),
            cap=self.get_float("forcing", "t_cap"),
        )
        return make_forcing(
            grid,
            lipschitz=self.get_float("forcing", "L"),
            amplitude=amp,
            profile_kind=self.get_str("forcing", "profile"),
            coupling=self.get_str("forcing", "coupling"),
        )

    def build_step(self) -> StepConfig:
        return StepConfig(
            dt=self.get_float("step", "dt"),
            tol_inner=self.get_float("step", "tol_inner"),
            max_inner_iters=self.get_int("step", "max_inner_iters"),
        )

    def build_pullback(self) -> PullbackConfig:
        return PullbackConfig(
            rho0=self.get_float("pullback", "rho0"),
            m_samples=self.get_int("pullback", "m_samples"),
            depth_schedule=tuple(self.get_floats("pullback", "depths")),
            tol_pullback=self.get_float("pullback", "tol_pullback"),
            seed=self.seed(),
        )


def parse_config(path, experiment: str = "simulate") -> RunConfig:
    """Read a config file over the defaults; reject unknown keys."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from None
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from None

    raw = {sec: dict(keys) for sec, keys in DEFAULTS.items()}
    for sec in parser.sections():
        if sec == "run" and parser.has_option("run", "experiment"):
            # informative echo field; the CLI subcommand decides what runs
            parser.remove_option("run", "experiment")
        if sec not in raw:
            raise ConfigError(f"unknown section [{sec}]", field=sec)
        for key, value in parser.items(sec):
            if key not in raw[sec]:
                raise ConfigError(f"unknown key {sec}.{key}", field=f"{sec}.{key}")
            raw[sec][key] = value.strip()
    return RunConfig(raw, experiment)


def config_echo(rc: RunConfig) -> str:
    """Normalized round-trippable config text, defaults included."""
    lines = ["[run]", f"experiment = {rc.experiment}"]
    for key, value in rc.raw["run"].items():
        lines.append(f"{key} = {value}")
    for sec in _SECTION_ORDER[1:]:
        lines.append("")
        lines.append(f"[{sec}]")
        for key, value in rc.raw[sec].items():
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
