"""Experiment configs and runners: open-loop sweeps, compensation, FRF curves, single relay.

Configs are INI files with the sections below; every key is optional and
unknown sections or keys are rejected.

[mesh]        n, u_min, u_max, init, interpolate, plant_n
[density]     kind (uniform | gaussian), y_min, y_max, mu_beta, mu_alpha,
              sigma_bb, sigma_ba, sigma_aa
[controller]  K, dt
[signal]      kind (sine | chirp | zigzag | constant), amplitude, freq_hz,
              f0_hz, f1_hz, duration, peak_step, n_cycles, slope
[frf]         K, gains, omega0s, delta, omega_min, omega_max, points
[output]      dir, record_every
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, signals
from .compensator import Compensator, CompensatorConfig, StabilityWarning, StaticGain
from .density import GaussianParams, gaussian_density, uniform_density
from .preisach import DensityGrid, InitMode, NumericalError, build_mesh, init_state


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


@dataclass
class MeshSection:
    n: int = 400
    u_min: float = -1.0
    u_max: float = 1.0
    init: str = "demagnetized"
    interpolate: bool = False
    plant_n: int = 0  # 0: plant uses the model mesh


@dataclass
class DensitySection:
    kind: str = "uniform"
    y_min: float = -1.0
    y_max: float = 1.0
    mu_beta: float = -0.35
    mu_alpha: float = 0.35
    sigma_bb: float = 0.05
    sigma_ba: float = 0.0
    sigma_aa: float = 0.05


@dataclass
class ControllerSection:
    K: float = 6000.0
    dt: float = 1e-5


@dataclass
class SignalSection:
    kind: str = "chirp"
    amplitude: float = 0.9
    freq_hz: float = 1.0
    f0_hz: float = 0.1
    f1_hz: float = 10.0
    duration: float = 120.0
    peak_step: float = 0.1
    n_cycles: int = 9
    slope: float = 1.0


@dataclass
class FrfSection:
    K: float = 1000.0
    gains: tuple[float, ...] = (0.1, 1.0, 10.0)
    omega0s: tuple[float, ...] = (0.1, 1.0, 10.0)
    delta: float = 2.5
    omega_min: float = 1e-2
    omega_max: float = 1e6
    points: int = 161


@dataclass
class OutputSection:
    dir: str = "out"
    record_every: int = 1


@dataclass
class ExperimentConfig:
    mesh: MeshSection = field(default_factory=MeshSection)
    density: DensitySection = field(default_factory=DensitySection)
    controller: ControllerSection = field(default_factory=ControllerSection)
    signal: SignalSection = field(default_factory=SignalSection)
    frf: FrfSection = field(default_factory=FrfSection)
    output: OutputSection = field(default_factory=OutputSection)

    # -- serialization ---------------------------------------------------
    @classmethod
    def sections(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def set(self, section: str, key: str, text: str) -> None:
        if section not in self.sections():
            raise ConfigError(f"unknown section [{section}]")
        sec = getattr(self, section)
        types = {f.name: f.type for f in dataclasses.fields(sec)}
        if key not in types:
            raise ConfigError(f"unknown key '{key}' in [{section}]")
        try:
            setattr(sec, key, _parse(types[key], text.strip()))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {text!r}: {exc}") from None

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        parser = configparser.ConfigParser(interpolation=None, default_section="\0")
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        cfg = cls()
        for section in parser.sections():
            for key, value in parser.items(section):
                cfg.set(section, key, value)
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        return cls.from_ini(text)

    def to_ini(self, skip=()) -> str:
        """INI text; ``skip`` holds "section.key" names to leave out."""
        buf = io.StringIO()
        for section in self.sections():
            buf.write(f"[{section}]\n")
            sec = getattr(self, section)
            for f in dataclasses.fields(sec):
                if f"{section}.{f.name}" not in skip:
                    buf.write(f"{f.name} = {_format(getattr(sec, f.name))}\n")
            buf.write("\n")
        return buf.getvalue()

    def apply_overrides(self, overrides) -> "ExperimentConfig":
        for item in overrides or ():
            lhs, sep, value = item.partition("=")
            section, dot, key = lhs.strip().partition(".")
            if not sep or not dot:
                raise ConfigError(f"override {item!r} must look like section.key=value")
            self.set(section, key, value)
        return self

    # -- validation and construction ------------------------------------
    def validate(self) -> None:
        m, d, c, s = self.mesh, self.density, self.controller, self.signal
        _require(m.n >= 1, "mesh.n must be >= 1")
        _require(m.plant_n >= 0, "mesh.plant_n must be >= 0")
        _require(_finite(m.u_min, m.u_max) and m.u_min < m.u_max, "mesh needs u_min < u_max")
        try:
            InitMode.parse(m.init)
        except ValueError as exc:
            raise ConfigError(f"mesh.init: {exc}") from None
        _require(d.kind in ("uniform", "gaussian"), f"density.kind {d.kind!r} is not uniform/gaussian")
        _require(_finite(d.y_min, d.y_max) and d.y_min < d.y_max, "density needs y_min < y_max")
        try:
            self.gaussian_params()
        except ValueError as exc:
            raise ConfigError(f"density: {exc}") from None
        _require(_finite(c.K, c.dt) and c.K > 0 and c.dt > 0, "controller needs K > 0 and dt > 0")
        _require(s.kind in ("sine", "chirp", "zigzag", "constant"), f"signal.kind {s.kind!r} unknown")
        _require(_finite(s.amplitude) and s.duration > 0, "signal needs finite amplitude, duration > 0")
        _require(s.duration >= c.dt, "signal.duration shorter than one step")
        if s.kind == "sine":
            _require(s.freq_hz > 0 and s.amplitude >= 0, "sine needs freq_hz > 0, amplitude >= 0")
        if s.kind == "chirp":
            _require(0 < s.f0_hz <= s.f1_hz and s.amplitude >= 0, "chirp needs 0 < f0_hz <= f1_hz")
        if s.kind == "zigzag":
            _require(s.peak_step > 0 and s.n_cycles >= 1 and s.slope > 0,
                     "zigzag needs peak_step > 0, n_cycles >= 1, slope > 0")
            _require(s.peak_step * s.n_cycles <= self.zigzag_limit() * (1 + 1e-12),
                     "zigzag final peak exceeds the input domain")
        f = self.frf
        _require(f.K > 0 and all(g > 0 for g in f.gains) and all(w > 0 for w in f.omega0s),
                 "frf needs positive K, gains and omega0s")
        _require(f.delta > 1, "frf.delta must exceed 1")
        _require(0 < f.omega_min < f.omega_max and f.points >= 1, "frf needs 0 < omega_min < omega_max")
        _require(self.output.record_every >= 1, "output.record_every must be >= 1")

    def validate_reference(self, r: np.ndarray) -> None:
        """A compensated reference must stay inside the reachable output range."""
        d = self.density
        _require(r.min() >= d.y_min and r.max() <= d.y_max,
                 f"reference spans [{r.min():.4g}, {r.max():.4g}] outside the output range "
                 f"[{d.y_min}, {d.y_max}]; the integrator would wind up")

    def zigzag_limit(self) -> float:
        """Largest symmetric peak that fits in the input domain."""
        return min(-self.mesh.u_min, self.mesh.u_max)

    def gaussian_params(self) -> GaussianParams:
        d = self.density
        return GaussianParams((d.mu_beta, d.mu_alpha),
                              ((d.sigma_bb, d.sigma_ba), (d.sigma_ba, d.sigma_aa)))

    def build_density(self, n: int | None = None) -> DensityGrid:
        m, d = self.mesh, self.density
        mesh = build_mesh(n or m.n, m.u_min, m.u_max)
        if d.kind == "uniform":
            return uniform_density(mesh, (d.y_min, d.y_max))
        return gaussian_density(mesh, self.gaussian_params(), (d.y_min, d.y_max))

    def build_signal(self) -> signals.SampledSignal:
        s, dt = self.signal, self.controller.dt
        if s.kind == "sine":
            return signals.sine(s.amplitude, s.freq_hz, s.duration, dt)
        if s.kind == "chirp":
            return signals.chirp_linear(s.amplitude, s.f0_hz, s.f1_hz, s.duration, dt)
        if s.kind == "zigzag":
            return signals.zigzag_growing(s.peak_step, s.n_cycles, s.slope, dt,
                                          limit=self.zigzag_limit())
        n = int(round(s.duration / dt))
        return signals.SampledSignal(dt, np.full(n, s.amplitude),
                                     {"kind": "constant", "value": s.amplitude})


def _parse(kind, text: str):
    kind = kind if isinstance(kind, str) else kind.__name__
    if kind == "int":
        v = float(text)
        if v != int(v):
            raise ValueError("expected an integer")
        return int(v)
    if kind == "float":
        return float(text)
    if kind == "bool":
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected a boolean")
    if kind.startswith("tuple"):
        return _floats(text)
    return text


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def _finite(*values) -> bool:
    return all(math.isfinite(v) for v in values)


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise ConfigError(message)


@dataclass
class ExperimentRecord:
    """Trajectory columns plus derived metrics; ``cycles`` rows are (nu_hz, eps)."""

    kind: str
    config: ExperimentConfig
    t: np.ndarray
    r: np.ndarray
    u: np.ndarray
    y: np.ndarray
    ystar: np.ndarray
    e: np.ndarray
    cycles: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    metrics: dict = field(default_factory=dict)
    frf_rows: list = field(default_factory=list)

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if self.kind == "frf":
            written.append(_write_csv(out / "frf.csv", ["curve", "omega", "mag_db", "phase_deg"],
                                      self.frf_rows))
        else:
            cols = (self.t, self.r, self.u, self.y, self.ystar, self.e)
            written.append(_write_csv(out / "trajectory.csv", ["t", "r", "u", "y", "ystar", "e"],
                                      zip(*cols)))
            written.append(_write_csv(out / "loop.csv", ["u", "y"], zip(self.u, self.y)))
        if self.kind == "compensate":
            written.append(_write_csv(out / "inverse_map.csv", ["r", "u"], zip(self.r, self.u)))
            if len(self.cycles):
                eps_db = [20.0 * math.log10(e) if e > 0 else -math.inf for e in self.cycles[:, 1]]
                written.append(_write_csv(out / "error_spectrum.csv", ["nu_hz", "eps", "eps_db"],
                                          zip(self.cycles[:, 0], self.cycles[:, 1], eps_db)))
        summary = out / "summary.txt"
        with open(summary, "w") as fh:
            fh.write(f"experiment = {self.kind}\n")
            for key in sorted(self.metrics):
                fh.write(f"{key} = {_format(self.metrics[key])}\n")
            # the output directory is left out so reruns elsewhere stay byte-identical
            fh.write("\n# config\n")
            fh.write(self.config.to_ini(skip=("output.dir",)))
        written.append(summary)
        return written


def _cell(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def _write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_cell(v) for v in row])
    return path


def run_loop_sweep(config: ExperimentConfig) -> ExperimentRecord:
    """Open loop: the signal drives the model directly."""
    config.validate()
    density = config.build_density()
    state = init_state(density.mesh, density, config.mesh.init, config.mesh.interpolate)
    sig = config.build_signal()
    u = np.clip(sig.samples, density.mesh.u_min, density.mesh.u_max)
    y = state.apply_sequence(u)
    k = config.output.record_every
    e = sig.samples - y
    metrics = {"y_min": float(y.min()), "y_max": float(y.max()),
               "y_initial": float(init_state(density.mesh, density, config.mesh.init,
                                             config.mesh.interpolate).y)}
    return ExperimentRecord("sweep", config, sig.t[::k], sig.samples[::k], u[::k], y[::k],
                            y[::k], e[::k], metrics=metrics)


def _cycle_frequency(sig: signals.SampledSignal):
    kind = sig.descriptor.get("kind")
    if kind in ("sine", "chirp"):
        return lambda t: signals.instantaneous_frequency(sig, t)
    return None


def run_compensation(config: ExperimentConfig) -> ExperimentRecord:
    """Reference -> compensator -> u -> plant -> y, with identical model and plant by default."""
    config.validate()
    density = config.build_density()
    sig = config.build_signal()
    config.validate_reference(sig.samples)
    plant_density = density if config.mesh.plant_n in (0, config.mesh.n) \
        else config.build_density(config.mesh.plant_n)
    plant = init_state(plant_density.mesh, plant_density, config.mesh.init, config.mesh.interpolate)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StabilityWarning)
        comp_cfg = CompensatorConfig(density, config.controller.K, config.controller.dt,
                                     config.mesh.init, config.mesh.interpolate)
    # whole cycles only
    bounds = signals.cycle_bounds(sig)

    uncompensated = plant.copy().apply_sequence(sig.samples)
    res = Compensator(comp_cfg).run(sig.samples, plant, config.output.record_every,
                                    bounds if len(bounds) >= 2 else None)
    metrics = {
        "peak_abs_e": float(np.abs(res.e).max()),
        "peak_abs_r_minus_y": float(np.abs(res.r - res.y).max()),
        "peak_abs_r_minus_y_uncompensated": float(np.abs(sig.samples - uncompensated).max()),
        "final_abs_e": float(abs(res.e[-1])),
        "settle_time_abs_e_1e-4": analysis.settle_time(res.t, res.e, 1e-4),
        "loop_gain_K_kappa_dt": comp_cfg.loop_gain,
        "stability_warning": bool(caught),
    }
    cycles = np.empty((0, 2))
    if len(bounds) >= 2:
        t0 = bounds[:-1] * sig.dt
        t1 = bounds[1:] * sig.dt
        mid = 0.5 * (t0 + t1)
        freq = _cycle_frequency(sig)
        nu = freq(mid) if freq else 1.0 / (t1 - t0)
        cycles = np.column_stack([nu, res.cycle_peak])
        metrics["n_cycles"] = len(cycles)
        try:
            metrics["eps_slope_db_per_decade"] = analysis.slope_db_per_decade(cycles)
        except ValueError:
            pass
    return ExperimentRecord("compensate", config, res.t, res.r, res.u, res.y, res.ystar, res.e,
                            cycles, metrics)


def frf_curves(config: ExperimentConfig) -> list[tuple[str, float, float, float]]:
    f = config.frf
    omegas = np.geomspace(f.omega_min, f.omega_max, f.points)
    rows = []
    for A in f.gains:
        for w in omegas:
            p = analysis.sensitivity_linear(float(w), f.K, A)
            rows.append((f"linear_A={A:g}", float(w), p.magnitude_db, p.phase_deg))
    for w0 in f.omega0s:
        for w in omegas:
            p = analysis.sensitivity_hysteresis(float(w), f.K, 1.0, w0, f.delta)
            rows.append((f"hysteresis_omega0={w0:g}", float(w), p.magnitude_db, p.phase_deg))
    return rows


def run_frf(config: ExperimentConfig) -> ExperimentRecord:
    """Analytic error-transfer curves: one per static gain and one per lag centre frequency."""
    config.validate()
    rows = frf_curves(config)
    f = config.frf
    metrics = {f"corner_rad_s_A={A:g}": f.K * A for A in f.gains}
    empty = np.empty(0)
    return ExperimentRecord("frf", config, empty, empty, empty, empty, empty, empty,
                            metrics=metrics, frf_rows=rows)


def run_hysteron_demo(config: ExperimentConfig) -> ExperimentRecord:
    """Single relay (n = 1) driven by a sine; reports the fundamental phase lag."""
    config.validate()
    one = dataclasses.replace(config, mesh=dataclasses.replace(config.mesh, n=1, plant_n=0))
    density = one.build_density()
    s = config.signal
    sig = signals.sine(s.amplitude, s.freq_hz, s.duration, config.controller.dt)
    state = init_state(density.mesh, density, config.mesh.init)
    y = state.apply_sequence(sig.samples)
    per = int(math.floor(len(sig) * sig.dt * s.freq_hz + 1e-9))
    n_win = int(round(per / (s.freq_hz * sig.dt)))
    metrics = {"periods": per}
    try:
        if per < 1 or abs(n_win * sig.dt * s.freq_hz - per) > 1e-6:
            raise ValueError("no whole-period window")
        phase = analysis.fundamental_phase(sig.samples[:n_win], y[:n_win], s.freq_hz, sig.dt)
        metrics["phase_rad"] = phase
        metrics["phase_deg"] = math.degrees(phase)
        metrics["degenerate"] = False
    except ValueError as exc:
        metrics["degenerate"] = True
        metrics["degenerate_reason"] = str(exc)
    return ExperimentRecord("hysteron", one, sig.t, sig.samples, sig.samples, y, y,
                            sig.samples - y, metrics=metrics)


def linear_loop_sensitivity(K: float, A: float, omega: float, steps_per_corner: float = 100.0,
                            periods: int = 5) -> float:
    """Measured |e / r| of the integral loop around ``y = A u`` for a sine reference.

    The step is ``1 / (steps_per_corner * K * A)`` and then nudged so that a
    period is a whole number of steps; the transient (ten loop time
    constants, rounded up to whole periods) is discarded.
    """
    dt0 = 1.0 / (steps_per_corner * K * A)
    per_steps = max(int(round(2.0 * math.pi / (omega * dt0))), 8)
    dt = 2.0 * math.pi / (omega * per_steps)
    settle = int(math.ceil(10.0 / (K * A) / (per_steps * dt)))
    n = per_steps * (settle + periods)
    t = np.arange(n) * dt
    r = np.sin(omega * t)
    cfg = _static_config(K, dt)
    res = Compensator(cfg, StaticGain(A)).run(r)
    win = slice(settle * per_steps, n)
    ph = np.exp(-1j * omega * t[win])
    # e[k] = r[k] - y*[k-1]; compare against the reference sample it was formed from
    return float(abs(np.dot(res.e[win], ph)) / abs(np.dot(r[win], ph)))


def _static_config(K: float, dt: float) -> CompensatorConfig:
    mesh = build_mesh(1)
    return CompensatorConfig(uniform_density(mesh), K, dt)


RUNNERS = {
    "sweep": run_loop_sweep,
    "compensate": run_compensation,
    "frf": run_frf,
    "hysteron": run_hysteron_demo,
}


def run(kind: str, config: ExperimentConfig, out_dir=None) -> ExperimentRecord:
    record = RUNNERS[kind](config)
    record.write(out_dir or config.output.dir)
    return record


__all__ = [
    "ConfigError", "ExperimentConfig", "ExperimentRecord", "NumericalError", "RUNNERS",
    "frf_curves", "linear_loop_sensitivity", "run", "run_compensation", "run_frf",
    "run_hysteron_demo", "run_loop_sweep",
]
