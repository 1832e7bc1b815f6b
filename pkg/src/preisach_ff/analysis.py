"""Loop-error transfer functions and time-series metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .preisach import DensityGrid, InitMode, init_state


@dataclass(frozen=True)
class FrequencyResponsePoint:
    omega: float
    magnitude: float
    phase: float

    @classmethod
    def from_complex(cls, omega: float, value: complex) -> "FrequencyResponsePoint":
        return cls(float(omega), float(abs(value)), wrap_phase(float(np.angle(value))))

    @property
    def magnitude_db(self) -> float:
        return 20.0 * math.log10(self.magnitude) if self.magnitude > 0 else -math.inf

    @property
    def phase_deg(self) -> float:
        return math.degrees(self.phase)


def wrap_phase(phi: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(phi, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


def _check(omega, **positive):
    if not (math.isfinite(omega) and omega >= 0):
        raise ValueError(f"omega must be finite and >= 0, got {omega!r}")
    for name, v in positive.items():
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True)
class LagApproximation:
    """First-order lag surrogate of a hysteresis loop's harmonic response."""

    omega0: float
    delta: float = 2.5
    A: float = 1.0
    ybar: float = 0.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if not self.delta > 1:
            raise ValueError("delta must exceed 1")

    def F(self, omega: float) -> complex:
        jw = 1j * omega
        return (jw / (self.delta * self.omega0) + 1.0) / (jw * self.delta / self.omega0 + 1.0)


def sensitivity_linear(omega: float, K: float, A: float) -> FrequencyResponsePoint:
    """jw / (jw + K A): tracking error of the integral loop around a static gain."""
    _check(omega, K=K, A=A)
    jw = 1j * omega
    return FrequencyResponsePoint.from_complex(omega, jw / (jw + K * A))


def lag_F(omega: float, omega0: float, delta: float = 2.5) -> FrequencyResponsePoint:
    _check(omega, omega0=omega0)
    if not delta > 1:
        raise ValueError("delta must exceed 1")
    return FrequencyResponsePoint.from_complex(omega, LagApproximation(omega0, delta).F(omega))


def sensitivity_hysteresis(omega: float, K: float, A: float, omega0: float,
                           delta: float = 2.5) -> FrequencyResponsePoint:
    """1 / (1 + (K A / jw) F(jw)); zero at DC."""
    _check(omega, K=K, A=A, omega0=omega0)
    if not delta > 1:
        raise ValueError("delta must exceed 1")
    if omega == 0:
        return FrequencyResponsePoint(0.0, 0.0, math.pi / 2)
    jw = 1j * omega
    f = LagApproximation(omega0, delta).F(omega)
    return FrequencyResponsePoint.from_complex(omega, jw / (jw + K * A * f))


def per_cycle_peak_error(t, r, y, bounds, frequency=None) -> list[tuple[float, float]]:
    """Peak |r - y| over each cycle ``bounds[c] <= k < bounds[c + 1]``.

    ``frequency(t_mid)`` gives the frequency reported for a cycle; by default
    it is the inverse of the cycle length.
    """
    t, r, y = (np.asarray(a, dtype=float) for a in (t, r, y))
    bounds = np.asarray(bounds, dtype=np.int64)
    if len(bounds) < 2:
        raise ValueError("need at least one full cycle")
    if np.any(np.diff(bounds) <= 0) or bounds[0] < 0 or bounds[-1] > len(t):
        raise ValueError("cycle bounds must be increasing sample indices")
    err = np.abs(r - y)
    peaks = np.maximum.reduceat(err[bounds[0]:bounds[-1]], bounds[:-1] - bounds[0])
    dt = t[1] - t[0] if len(t) > 1 else 1.0
    t0 = t[0] + bounds[:-1] * dt
    t1 = t[0] + bounds[1:] * dt
    mid = 0.5 * (t0 + t1)
    nu = np.asarray(frequency(mid), dtype=float) if frequency else 1.0 / (t1 - t0)
    return [(float(a), float(b)) for a, b in zip(np.broadcast_to(nu, mid.shape), peaks)]


def slope_db_per_decade(points) -> float:
    """Least-squares slope of 20 log10(eps) against log10(nu)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 5:
        raise ValueError("need at least 5 (nu, eps) points")
    nu, eps = pts[:, 0], pts[:, 1]
    if np.any(eps <= 0) or np.any(nu <= 0):
        raise ValueError("frequencies and errors must be positive")
    x = np.log10(nu)
    if x.max() - x.min() < 1.0 - 1e-12:
        raise ValueError("points must span at least one decade")
    return float(np.polyfit(x, 20.0 * np.log10(eps), 1)[0])


def fundamental_phase(x, y, freq_hz: float, dt: float) -> float:
    """Phase of y's fundamental minus x's, by correlation at one frequency.

    The window must hold a whole number of periods.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be 1-D and of equal length")
    periods = len(x) * dt * freq_hz
    if len(x) == 0 or abs(periods - round(periods)) > 1e-6 or round(periods) < 1:
        raise ValueError(f"window holds {periods:.6g} periods; need a whole number")
    ph = np.exp(-2j * np.pi * freq_hz * dt * np.arange(len(x)))
    cx, cy = np.dot(x, ph), np.dot(y - y.mean(), ph)
    scale = max(np.abs(x).max(), np.abs(y).max(), 1e-300) * len(x)
    if abs(cx) < 1e-12 * scale or abs(cy) < 1e-12 * scale:
        raise ValueError("fundamental component vanishes; phase undefined")
    return wrap_phase(float(np.angle(cy) - np.angle(cx)))


def settle_time(t, e, tol: float) -> float:
    """Earliest time after which |e| stays below tol (inf if it never does)."""
    bad = np.flatnonzero(np.abs(np.asarray(e, dtype=float)) >= tol)
    if len(bad) == 0:
        return float(t[0])
    if bad[-1] == len(e) - 1:
        return math.inf
    return float(t[bad[-1] + 1])


def max_branch_slope(density: DensityGrid) -> float:
    """Largest |dy/du| seen while sweeping both major branches edge by edge."""
    mesh = density.mesh
    best = 0.0
    for mode, path in ((InitMode.ALL_DOWN, mesh.edges[1:]),
                       (InitMode.ALL_UP, mesh.edges[-2::-1])):
        s = init_state(mesh, density, mode)
        y = np.concatenate([[s.y], s.apply_sequence(path)])
        best = max(best, float(np.abs(np.diff(y)).max()) / mesh.delta)
    return best
