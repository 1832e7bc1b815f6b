"""Uniformly sampled reference signals: sine, growing zigzag, linear chirp.

Samples sit at ``t = k * dt``.  Sine and chirp cover the half-open window
``[0, duration)``; the zigzag includes its final turning point.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class SampledSignal:
    dt: float
    samples: np.ndarray = field(repr=False)
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        x = np.array(self.samples, dtype=float)
        if x.ndim != 1 or not np.all(np.isfinite(x)):
            raise ValueError("samples must be a finite 1-D sequence")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dt

    @property
    def duration(self) -> float:
        return len(self.samples) * self.dt

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t", "value"])
            for t, v in zip(self.t, self.samples):
                wr.writerow([repr(float(t)), repr(float(v))])


def _n_samples(duration: float, dt: float) -> int:
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt!r}")
    if not (math.isfinite(duration) and duration > 0):
        raise ValueError(f"duration must be positive, got {duration!r}")
    n = int(round(duration / dt))
    if n < 1:
        raise ValueError("duration shorter than one sample")
    return n


def sine(amplitude: float, freq_hz: float, duration: float, dt: float) -> SampledSignal:
    if not amplitude >= 0:
        raise ValueError("amplitude must be non-negative")
    if not freq_hz > 0:
        raise ValueError("frequency must be positive")
    t = np.arange(_n_samples(duration, dt)) * dt
    x = amplitude * np.sin(2.0 * np.pi * freq_hz * t)
    return SampledSignal(dt, x, {"kind": "sine", "amplitude": amplitude,
                                 "freq_hz": freq_hz, "duration": duration})


def zigzag_waypoints(peak_step: float, n_cycles: int) -> np.ndarray:
    """0, +p, -p, +2p, -2p, ... up to +-n_cycles * p."""
    peaks = peak_step * np.arange(1, n_cycles + 1)
    return np.concatenate([[0.0], np.stack([peaks, -peaks], axis=1).ravel()])


def zigzag_growing(peak_step: float, n_cycles: int, slope: float, dt: float,
                   limit: float = 1.0) -> SampledSignal:
    """Triangle wave at constant |slope| whose reversal peaks grow by peak_step per cycle."""
    if not peak_step > 0:
        raise ValueError("peak_step must be positive")
    if int(n_cycles) != n_cycles or n_cycles < 1:
        raise ValueError("n_cycles must be a positive integer")
    if not slope > 0:
        raise ValueError("slope must be positive")
    if n_cycles * peak_step > limit * (1 + 1e-12):
        raise ValueError(f"final peak {n_cycles * peak_step} exceeds the domain {limit}")
    way = zigzag_waypoints(peak_step, int(n_cycles))
    times = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(way)) / slope)])
    n = _n_samples(times[-1], dt)
    t = np.arange(n + 1) * dt
    x = np.interp(t, times, way)
    return SampledSignal(dt, x, {"kind": "zigzag", "peak_step": peak_step,
                                 "n_cycles": int(n_cycles), "slope": slope})


def chirp_linear(amplitude: float, f0_hz: float, f1_hz: float, duration: float,
                 dt: float) -> SampledSignal:
    """``a * sin(2 pi (f0 t + (f1 - f0) t^2 / (2 T)))``; f0 == f1 is a plain sine."""
    if not amplitude >= 0:
        raise ValueError("amplitude must be non-negative")
    if not (0 < f0_hz <= f1_hz and math.isfinite(f1_hz)):
        raise ValueError(f"need 0 < f0 <= f1, got ({f0_hz}, {f1_hz})")
    t = np.arange(_n_samples(duration, dt)) * dt
    x = amplitude * np.sin(2.0 * np.pi * chirp_cycles(t, f0_hz, f1_hz, duration))
    return SampledSignal(dt, x, {"kind": "chirp", "amplitude": amplitude, "f0_hz": f0_hz,
                                 "f1_hz": f1_hz, "duration": duration})


def chirp_cycles(t, f0_hz: float, f1_hz: float, duration: float):
    """Accumulated phase of the chirp in cycles."""
    return f0_hz * t + (f1_hz - f0_hz) * t * t / (2.0 * duration)


def instantaneous_frequency(signal: SampledSignal, t):
    """Frequency in Hz at time t for sine and chirp signals."""
    d = signal.descriptor
    kind = d.get("kind")
    if kind == "sine":
        return np.full_like(np.asarray(t, dtype=float), d["freq_hz"])
    if kind == "chirp":
        return d["f0_hz"] + (d["f1_hz"] - d["f0_hz"]) * np.asarray(t, dtype=float) / d["duration"]
    raise ValueError(f"no instantaneous frequency for {kind!r} signals")


def cycle_starts(signal: SampledSignal) -> np.ndarray:
    """Sample indices where a new period begins.

    For sine and chirp this uses the analytic phase, so the indices do not
    depend on rounding of samples near zero.  Other signals fall back to
    zero up-crossings of the samples.
    """
    kind = signal.descriptor.get("kind")
    t = signal.t
    if kind == "sine":
        cyc = signal.descriptor["freq_hz"] * t
    elif kind == "chirp":
        d = signal.descriptor
        cyc = chirp_cycles(t, d["f0_hz"], d["f1_hz"], d["duration"])
    else:
        x = signal.samples
        return np.flatnonzero((x[:-1] < 0) & (x[1:] >= 0)) + 1
    c = np.floor(cyc + 1e-9).astype(np.int64)
    starts = np.flatnonzero(np.diff(c)) + 1
    if len(c) and abs(cyc[0] - round(cyc[0])) < 1e-9:
        starts = np.concatenate([[0], starts])
    return starts


def _total_cycles(signal: SampledSignal):
    d = signal.descriptor
    end = len(signal) * signal.dt
    if d.get("kind") == "sine":
        return d["freq_hz"] * end
    if d.get("kind") == "chirp":
        return chirp_cycles(end, d["f0_hz"], d["f1_hz"], d["duration"])
    return None


def cycle_bounds(signal: SampledSignal) -> np.ndarray:
    """Boundaries of whole periods: the cycle starts, closed by the sample
    count when the signal ends exactly on a period boundary."""
    starts = cycle_starts(signal)
    total = _total_cycles(signal)
    if total is not None and len(starts) and abs(total - round(total)) < 1e-9:
        starts = np.concatenate([starts, [len(signal)]])
    return starts
