"""Feedforward compensation through an integral loop around a model copy.

An integral loop is closed around an internal hysteresis model:
``e = r - y*``, ``u <- u + K dt e``, then the model is advanced to ``u``.
With high gain the model output tracks ``r``, so ``u`` approximates the
inverse hysteresis map applied to ``r`` without ever inverting the model.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .preisach import DensityGrid, InitMode, NumericalError, PreisachState, init_state


class StabilityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CompensatorConfig:
    """Loop settings.  Warns when ``K * kappa * dt >= 2``.

    ``kappa`` is the model's largest branch slope bound; past that product
    the forward-Euler loop around a slope-``kappa`` branch can oscillate.
    """

    density: DensityGrid = field(repr=False)
    K: float = 6000.0
    dt: float = 1e-5
    init: InitMode = InitMode.DEMAGNETIZED
    interpolate: bool = False

    def __post_init__(self):
        for name in ("K", "dt"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        object.__setattr__(self, "init", InitMode.parse(self.init))
        if self.loop_gain >= 2.0:
            warnings.warn(f"K*kappa*dt = {self.loop_gain:.3g} >= 2; the discrete loop may be "
                          "unstable", StabilityWarning, stacklevel=3)

    @property
    def kappa(self) -> float:
        return self.density.max_slope()

    @property
    def loop_gain(self) -> float:
        return self.K * self.kappa * self.dt

    def new_model(self) -> PreisachState:
        return init_state(self.density.mesh, self.density, self.init, self.interpolate)


class StaticGain:
    """Memoryless model ``y = A u`` with the same stepping interface as PreisachState."""

    input_bounds = (-math.inf, math.inf)

    def __init__(self, A: float, u0: float = 0.0):
        self.A = float(A)
        self.u_prev = float(u0)

    @property
    def y(self) -> float:
        return self.A * self.u_prev

    def apply_input(self, u: float) -> float:
        u = float(u)
        if not math.isfinite(u):
            raise ValueError(f"non-finite input {u!r}")
        dy = self.A * (u - self.u_prev)
        self.u_prev = u
        return dy

    def copy(self) -> "StaticGain":
        return StaticGain(self.A, self.u_prev)


@dataclass
class FeedforwardResult:
    """Loop trajectory, possibly decimated; ``e[k]`` is the error that produced ``u[k]``."""

    t: np.ndarray
    r: np.ndarray
    u: np.ndarray
    ystar: np.ndarray
    y: np.ndarray
    e: np.ndarray
    cycle_peak: np.ndarray


class Compensator:
    """Integrator plus internal model; step it one reference sample at a time."""

    def __init__(self, config: CompensatorConfig, model=None):
        self.config = config
        self.model = model if model is not None else config.new_model()
        self.u = self.model.u_prev
        self.ystar = self.model.y

    def step(self, r: float) -> float:
        r = float(r)
        if not math.isfinite(r):
            raise ValueError(f"non-finite reference {r!r}")
        lo, hi = self.model.input_bounds
        u = min(max(self.u + self.config.K * self.config.dt * (r - self.ystar), lo), hi)
        if not math.isfinite(u):
            raise NumericalError("integrator diverged")
        self.model.apply_input(u)
        self.u = u
        self.ystar = self.model.y
        return u

    def run(self, reference, plant=None, record_every: int = 1,
            cycle_bounds=None) -> FeedforwardResult:
        """Feed a whole reference through the loop.

        ``plant`` (optional) receives the same u and supplies y; otherwise
        y is the internal output.  ``cycle_bounds`` are sample indices whose
        consecutive pairs delimit cycles for the per-cycle peak of |r - y|;
        it is evaluated on every sample even when recording is decimated.
        """
        r = np.ascontiguousarray(reference, dtype=float)
        if r.ndim != 1 or len(r) == 0:
            raise ValueError("reference must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(r)):
            raise ValueError("reference contains non-finite values")
        record_every = int(record_every)
        if record_every < 1:
            raise ValueError("record_every must be >= 1")
        bounds = np.asarray(cycle_bounds if cycle_bounds is not None else [0, 0], dtype=np.int64)
        n_rec = (len(r) + record_every - 1) // record_every
        out = [np.empty(n_rec) for _ in range(4)]
        peaks = np.zeros(max(len(bounds) - 1, 0))

        fast = isinstance(self.model, PreisachState) and (
            plant is None or (isinstance(plant, PreisachState)
                              and plant.interpolate == self.model.interpolate))
        if fast:
            plant_op = plant.op if plant is not None else self.model.op
            done = kern.feedforward_loop(
                r, self.config.K * self.config.dt, self.u, self.model.op, plant_op,
                self.model.interpolate, plant is not None, record_every, bounds,
                *out, peaks)
            self.u = self.model.u_prev
            self.ystar = self.model.y
            if done < len(r):
                raise NumericalError(f"loop failed at sample {done}")
        else:
            self._run_python(r, plant, record_every, bounds, out, peaks)

        dt = self.config.dt
        idx = np.arange(0, len(r), record_every)
        u, ystar, y, e = out
        return FeedforwardResult(idx * dt, r[idx], u, ystar, y, e, peaks)

    def _run_python(self, r, plant, record_every, bounds, out, peaks):
        seg, n_seg = 0, len(bounds) - 1
        for k, rk in enumerate(r):
            e = rk - self.ystar
            u = self.step(rk)
            if plant is not None:
                plant.apply_input(u)
                y = plant.y
            else:
                y = self.ystar
            while seg < n_seg and k >= bounds[seg + 1]:
                seg += 1
            if seg < n_seg and k >= bounds[seg]:
                peaks[seg] = max(peaks[seg], abs(rk - y))
            if k % record_every == 0:
                row = k // record_every
                out[0][row], out[1][row], out[2][row], out[3][row] = u, self.ystar, y, e


def run_feedforward(config: CompensatorConfig, reference, plant=None,
                    record_every: int = 1, cycle_bounds=None) -> FeedforwardResult:
    """Fresh compensator from ``config`` run over ``reference`` samples spaced by config.dt."""
    samples = getattr(reference, "samples", reference)
    if hasattr(reference, "dt") and not math.isclose(reference.dt, config.dt, rel_tol=1e-12):
        raise ValueError(f"reference dt {reference.dt} differs from loop dt {config.dt}")
    return Compensator(config).run(samples, plant, record_every, cycle_bounds)
