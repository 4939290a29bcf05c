"""Experiment configs, figure presets and CSV/JSON artifact writers.

Resolution order of a config: built-in defaults, then the named preset, then
the config file, then explicit overrides.  Every artifact embeds the fully
resolved config, and a written artifact can be fed back as ``--config`` to
reproduce it bit for bit.

CSV files start with one ``# config: {...}`` comment line followed by a
one-line header.  Numbers are written with ``repr`` (shortest round-trip form
of the double), ``.`` as decimal separator, one row per line.
"""
from __future__ import annotations

import dataclasses
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .model import NoiseRates, SystemParams, derive
from .open_dynamics import NoiseModel, decay_curve, pulse_loss_curve
from .tomography import BASIS_LABELS, chi_analytic, chi_invariant_errors, chi_reconstruct, process_fidelity
from .unitary import PULSE_MODES, excited_population_pure, t1_echo_schedule, trajectory
from . import linalg

KINDS = ("derive", "trajectory", "decay", "pulse-loss", "tomography")
FORMATS = ("csv", "json")
CONFIG_PREFIX = "# config: "


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(message)
        self.key = key


@dataclass
class ExperimentConfig:
    kind: str = "derive"
    preset: str | None = None
    v_perp: float = 5.0
    delta_omega: list = field(default_factory=lambda: [0.0])
    epsilon: float | None = None
    gamma1_q: float = 1.0
    gamma1_m: float = 0.0
    gammaphi_q: float = 0.0
    gammaphi_m: float = 0.0
    clamp_factor: float = 50.0
    model: str = "lindblad"
    pulses: str = "ideal"
    ideal_z: bool = False
    t_max: float = 4.0
    points: int = 201
    free_time: float | None = None
    free_time_periods: float | None = None
    output: str | None = None
    format: str = "csv"

    def validate(self) -> ExperimentConfig:
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}, got {self.kind!r}")
        if self.model not in [m.value for m in NoiseModel]:
            raise ConfigError("model", f"must be 'lindblad' or 'secular', got {self.model!r}")
        if self.pulses not in PULSE_MODES:
            raise ConfigError("pulses", f"must be one of {PULSE_MODES}, got {self.pulses!r}")
        if self.format not in FORMATS:
            raise ConfigError("format", f"must be one of {FORMATS}, got {self.format!r}")
        if not isinstance(self.delta_omega, list) or not self.delta_omega:
            raise ConfigError("delta_omega", "needs at least one value")
        if self.points < 1:
            raise ConfigError("points", f"must be >= 1, got {self.points!r}")
        if not (self.t_max >= 0 and math.isfinite(self.t_max)):
            raise ConfigError("t_max", f"must be finite and >= 0, got {self.t_max!r}")
        for key in ("free_time", "free_time_periods"):
            value = getattr(self, key)
            if value is not None and not value >= 0:
                raise ConfigError(key, f"must be >= 0, got {value!r}")
        try:
            self.params(self.delta_omega[0])
        except ValueError as exc:
            key = "clamp_factor" if "clamp" in str(exc) else "v_perp"
            raise ConfigError(key, str(exc)) from None
        try:
            self.noise()
        except ValueError as exc:
            raise ConfigError(str(exc).split()[0], str(exc)) from None
        if self.kind in ("trajectory", "tomography") and len(self.delta_omega) != 1:
            raise ConfigError("delta_omega", f"{self.kind} takes a single detuning")
        return self

    def params(self, delta_omega: float) -> SystemParams:
        return SystemParams(self.v_perp, float(delta_omega), self.epsilon, self.clamp_factor)

    def noise(self) -> NoiseRates:
        return NoiseRates(self.gamma1_q, self.gamma1_m, self.gammaphi_q, self.gammaphi_m)

    def t_grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.t_max])
        return np.linspace(0.0, self.t_max, self.points)

    def resolved_free_time(self, params: SystemParams) -> float:
        if self.free_time is not None:
            return self.free_time
        if self.free_time_periods is not None:
            return self.free_time_periods * 2 * math.pi / derive(params).omega0
        return self.t_max

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


PRESETS: dict[str, dict] = {
    "fig2": dict(kind="trajectory", v_perp=5.0, delta_omega=[0.0], pulses="ideal",
                 free_time_periods=1 / 3, points=241),
    "fig3": dict(kind="trajectory", v_perp=5.0, delta_omega=[-5.0], pulses="ideal",
                 free_time_periods=1.0, points=241),
    "fig5": dict(kind="decay", v_perp=5.0, delta_omega=[0.0, 5.0, 15.0], gamma1_q=1.0, gamma1_m=0.0,
                 gammaphi_q=0.0, gammaphi_m=0.0, model="secular", pulses="ideal", t_max=4.0, points=401),
    "fig6": dict(kind="decay", v_perp=5.0, delta_omega=[0.0, 1.0, 2.0], gamma1_q=1.0, gamma1_m=0.0,
                 gammaphi_q=0.5, gammaphi_m=0.0, model="lindblad", pulses="hamiltonian", t_max=6.0,
                 points=601),
    "fig7": dict(kind="pulse-loss", v_perp=5.0, delta_omega=[round(x, 10) for x in np.linspace(0.1, 20.0, 200)],
                 gamma1_q=1.0, gamma1_m=0.0, gammaphi_q=0.5, gammaphi_m=0.0, model="lindblad",
                 pulses="hamiltonian"),
}

_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def load_config_file(path) -> dict:
    """Read a JSON/YAML config, or the config embedded in a previously written artifact."""
    path = Path(path)
    text = path.read_text()
    first = text.split("\n", 1)[0]
    if first.startswith(CONFIG_PREFIX):
        return json.loads(first[len(CONFIG_PREFIX):])
    data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} does not hold a key-value mapping")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return data


def resolve_config(preset: str | None = None, file_values: dict | None = None, overrides: dict | None = None):
    values: dict = {}
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    preset = overrides.get("preset", file_values.get("preset", preset))
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        values.update(PRESETS[preset])
        values["preset"] = preset
    for source in (file_values, overrides):
        for key, value in source.items():
            if key not in _FIELDS:
                raise ConfigError(key, "unknown config key")
            values[key] = value
    if "delta_omega" in values and not isinstance(values["delta_omega"], list):
        values["delta_omega"] = [values["delta_omega"]]
    try:
        cfg = ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None
    return cfg.validate()


# --- runners ----------------------------------------------------------------


@dataclass
class Table:
    columns: list
    rows: list
    extra: dict = field(default_factory=dict)


def run_derive(cfg: ExperimentConfig) -> Table:
    cols = ["delta_omega", "omega0", "xi0", "delta_omega_1", "omega1", "t_pi", "t_swap",
            "t_pi_over_t_swap", "gamma_plus", "clamp_active"]
    rows = []
    for dw in cfg.delta_omega:
        d = derive(cfg.params(dw), cfg.noise())
        rows.append([float(dw), d.omega0, d.xi0, d.delta_omega_1, d.omega1, d.t_pi, d.t_swap,
                     d.t_pi / d.t_swap, d.gamma_plus, d.clamp_active])
    return Table(cols, rows)


def run_trajectory(cfg: ExperimentConfig) -> Table:
    params = cfg.params(cfg.delta_omega[0])
    T = cfg.resolved_free_time(params)
    sched = t1_echo_schedule(params, T, cfg.pulses, ideal_z=cfg.ideal_z)
    total = sched.duration
    dt = total / max(cfg.points - 1, 1) if total > 0 else 1.0
    rows = [
        [t, *map(float, b), excited_population_pure(psi)]
        for t, b, psi in trajectory(sched, linalg.basis_state(1, 0), dt)
    ]
    return Table(["time", "x", "y", "z", "p_excited_qubit"], rows, {"free_time": T})


def run_decay(cfg: ExperimentConfig) -> Table:
    noise = cfg.noise()
    rows = []
    for dw in cfg.delta_omega:
        params = cfg.params(dw)
        seq = decay_curve(params, noise, cfg.pulses, cfg.model, cfg.t_grid(), ideal_z=cfg.ideal_z)
        free = decay_curve(params, noise, "none", cfg.model, seq.x)
        for k in range(len(seq.x)):
            rows.append([seq.x[k], seq.p1q[k], seq.ref_qubit[k], seq.ref_gamma_plus[k], free.p1q[k], float(dw)])
    cols = ["time_or_detuning", "p1q_simulated", "p1q_reference_qubit", "p1q_reference_gammaplus",
            "p1q_no_sequence", "delta_omega"]
    return Table(cols, rows)


def run_pulse_loss(cfg: ExperimentConfig) -> Table:
    c = pulse_loss_curve(cfg.params(cfg.delta_omega[0]), cfg.noise(), cfg.model, cfg.delta_omega,
                         ideal_z=cfg.ideal_z)
    rows = [list(r) for r in zip(c.x, c.p1q, c.ref_qubit, c.ref_gamma_plus)]
    return Table(["time_or_detuning", "p1q_simulated", "p1q_reference_qubit", "p1q_reference_gammaplus"], rows)


def run_tomography(cfg: ExperimentConfig) -> Table:
    params = cfg.params(cfg.delta_omega[0])
    noise = cfg.noise()
    T = cfg.resolved_free_time(params)
    eps = cfg.epsilon or 0.0
    builder = lambda p, t, pulses: t1_echo_schedule(p, t, pulses, ideal_z=cfg.ideal_z)  # noqa: E731
    chi = chi_reconstruct(params, noise, cfg.model, T, cfg.pulses, epsilon=eps, sequence_builder=builder)
    ref = chi_analytic(noise.gamma_plus, eps, T)
    rows = [[m, n, chi[m, n].real, chi[m, n].imag, ref[m, n].real, ref[m, n].imag]
            for m in range(4) for n in range(4)]
    extra = {
        "basis": list(BASIS_LABELS),
        "free_time": T,
        "chi": [[[chi[m, n].real, chi[m, n].imag] for n in range(4)] for m in range(4)],
        "chi_analytic": [[[ref[m, n].real, ref[m, n].imag] for n in range(4)] for m in range(4)],
        "max_abs_difference": float(np.max(np.abs(chi - ref))),
        "process_fidelity": process_fidelity(chi, ref),
        "invariant_errors": chi_invariant_errors(chi),
    }
    return Table(["row", "col", "chi_re", "chi_im", "analytic_re", "analytic_im"], rows, extra)


RUNNERS = {
    "derive": run_derive,
    "trajectory": run_trajectory,
    "decay": run_decay,
    "pulse-loss": run_pulse_loss,
    "tomography": run_tomography,
}


def run(cfg: ExperimentConfig) -> Table:
    return RUNNERS[cfg.kind](cfg)


# --- serialization ----------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def render(table: Table, cfg: ExperimentConfig, fmt: str | None = None) -> str:
    fmt = fmt or cfg.format
    config = cfg.to_dict()
    if fmt == "json":
        payload = {
            "config": config,
            "columns": list(table.columns),
            "data": {c: [_plain(r[i]) for r in table.rows] for i, c in enumerate(table.columns)},
        }
        payload.update(table.extra)
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(CONFIG_PREFIX + json.dumps(config, separators=(",", ":")) + "\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory and rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path):
    """Parse an artifact CSV into (config, columns, float array)."""
    lines = Path(path).read_text().splitlines()
    config = json.loads(lines[0][len(CONFIG_PREFIX):])
    columns = lines[1].split(",")
    data = np.array([[float(x) if x not in ("true", "false") else float(x == "true") for x in ln.split(",")]
                     for ln in lines[2:]])
    return config, columns, data
