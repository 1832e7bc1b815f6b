"""Discretized Preisach operator on a uniform triangular (beta, alpha) mesh.

The relay memory is a staircase stored as one up-level per beta column.  An
input step visits only the columns whose level changes, so the update cost is
proportional to the switched band rather than to the number of relays.

Threshold convention: relay ``(i, j)`` (alpha row ``i``, beta column ``j``,
``i >= j``) switches up once ``u >= edges[i + 1]`` and down once
``u <= edges[j]``.  With ``n = 1`` this is the single relay switching at the
domain bounds.

Sub-cell mode (``interpolate=True``) treats each cell as a continuum of
relays with uniform density and tracks the exact real-valued staircase as a
stack of alternating extrema.  It agrees with the quantized output whenever
every stored extremum lies on a cell edge.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern

STACK_CAPACITY = 1 << 15


class NumericalError(ArithmeticError):
    """A simulation produced a non-finite value or exhausted its memory stack."""


class InitMode(enum.Enum):
    ALL_DOWN = "all_down"
    ALL_UP = "all_up"
    DEMAGNETIZED = "demagnetized"

    @classmethod
    def parse(cls, value: "InitMode | str") -> "InitMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"down": "all_down", "alldown": "all_down", "up": "all_up",
                   "allup": "all_up", "demag": "demagnetized"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown init mode {value!r}") from None


@dataclass(frozen=True, eq=False)
class TriangularMesh:
    """Uniform ``n x n`` grid over ``[u_min, u_max]^2`` restricted to alpha >= beta."""

    n: int
    u_min: float
    u_max: float
    edges: np.ndarray = field(repr=False)

    @property
    def delta(self) -> float:
        return (self.u_max - self.u_min) / self.n

    @property
    def n_cells(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def cell_mask(self) -> np.ndarray:
        """Boolean ``(n, n)`` mask of valid cells, indexed ``[alpha, beta]``."""
        return np.tri(self.n, dtype=bool)

    def cell_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """(alpha_index, beta_index) of every cell, row-major."""
        return np.nonzero(self.cell_mask())

    def same_as(self, other: "TriangularMesh") -> bool:
        return (self.n == other.n and self.u_min == other.u_min
                and self.u_max == other.u_max)


def build_mesh(n: int, u_min: float = -1.0, u_max: float = 1.0) -> TriangularMesh:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"mesh size must be an integer >= 1, got {n!r}")
    u_min, u_max = float(u_min), float(u_max)
    if not (math.isfinite(u_min) and math.isfinite(u_max)):
        raise ValueError("mesh bounds must be finite")
    if u_min >= u_max:
        raise ValueError(f"need u_min < u_max, got [{u_min}, {u_max}]")
    n = int(n)
    edges = np.linspace(u_min, u_max, n + 1)
    edges[0], edges[-1] = u_min, u_max
    edges.setflags(write=False)
    return TriangularMesh(n, u_min, u_max, edges)


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Non-negative relay weights on a mesh.

    ``weights[i, j]`` belongs to the relay in alpha row ``i`` and beta column
    ``j``; entries with ``i < j`` are zero.  The output is
    ``offset + sum(up) - sum(down)``, so ``2 * total_mass`` is the output
    range and ``offset`` its midpoint.
    """

    mesh: TriangularMesh
    weights: np.ndarray = field(repr=False)
    offset: float = 0.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        n = self.mesh.n
        if w.shape != (n, n):
            raise ValueError(f"weights shape {w.shape} does not match mesh n={n}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if np.any(w[~self.mesh.cell_mask()] != 0):
            raise ValueError("weights must vanish where alpha < beta")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

        colcum = np.zeros((n, n + 1))
        np.cumsum(w.T, axis=1, out=colcum[:, 1:])
        offw = w.copy()
        np.fill_diagonal(offw, 0.0)
        # offcum[p, q] = sum(offw[:p, q:])
        offcum = np.zeros((n + 1, n + 1))
        offcum[1:, :n] = np.cumsum(np.cumsum(offw[:, ::-1], axis=1)[:, ::-1], axis=0)
        diagcum = np.concatenate([[0.0], np.cumsum(np.diag(w))])
        for name, arr in (("colcum", colcum), ("offw", offw), ("offcum", offcum),
                          ("diagcum", diagcum)):
            arr.setflags(write=False)
            object.__setattr__(self, "_" + name, arr)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def y_range(self) -> tuple[float, float]:
        m = self.total_mass
        return self.offset - m, self.offset + m

    @property
    def colcum(self) -> np.ndarray:
        return self._colcum

    def triangle_mass(self, b: float, a: float) -> float:
        """Mass of {b <= beta <= alpha <= a}, density uniform inside cells."""
        return float(kern.triangle_mass(self.mesh.edges, self._offcum, self._offw,
                                        self._diagcum, float(b), float(a)))

    def max_band_mass(self) -> float:
        """Heaviest single row or column: half the largest one-edge output jump."""
        return float(max(self.weights.sum(axis=0).max(), self.weights.sum(axis=1).max()))

    def max_slope(self) -> float:
        """Bound on |dy/du| along monotone runs (one band per cell width)."""
        return 2.0 * self.max_band_mass() / self.mesh.delta

    def to_csv(self, path) -> None:
        a, b = self.mesh.cell_indices()
        c = self.mesh.centers
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["alpha_center", "beta_center", "weight"])
            for i, j in zip(a, b):
                wr.writerow([repr(float(c[i])), repr(float(c[j])),
                             repr(float(self.weights[i, j]))])


def _levels_to_extrema(levels: np.ndarray, edges: np.ndarray) -> list[float]:
    n = len(levels)
    p = int(np.count_nonzero(levels > np.arange(n)))
    ext = [float(edges[0])]
    if p == 0:
        return ext
    ext.append(float(edges[levels[0]]))
    for j in range(1, p):
        if levels[j] != levels[j - 1]:
            ext += [float(edges[j]), float(edges[levels[j]])]
    ext.append(float(edges[p]))
    return ext


def _extrema_steps(ext) -> list[tuple[float, float, float]]:
    """(beta_start, beta_end, alpha_level) of each up-region step."""
    steps = []
    for k in range(1, len(ext), 2):
        top = ext[k]
        end = ext[k + 1] if k + 1 < len(ext) else top
        steps.append((ext[k - 1], end, top))
    return steps


def _corners_from_extrema(ext) -> list[tuple[float, float]]:
    steps = _extrema_steps(ext)
    if not steps:
        return [(ext[0], ext[0])]
    pts = [(steps[0][0], steps[0][2])]
    for s, (_, end, top) in enumerate(steps):
        pts.append((end, top))
        if s + 1 < len(steps):
            pts.append((end, steps[s + 1][2]))
        elif end != top:
            pts.append((end, end))
    return pts


class PreisachState:
    """Mutable relay memory plus running output.

    Inputs are clamped to the mesh domain.  Each call to :meth:`apply_input`
    is one monotone move from the previous input, so a continuous signal has
    to be sampled finely enough that every sample step is monotone.
    """

    def __init__(self, density: DensityGrid, levels, u_prev: float,
                 interpolate: bool = False, stack_capacity: int = STACK_CAPACITY):
        self.mesh = density.mesh
        self.density = density
        self.interpolate = bool(interpolate)
        self.levels = np.array(levels, dtype=np.int64)
        if self.levels.shape != (self.mesh.n,):
            raise ValueError("levels length must equal mesh size")
        if not self.check_staircase():
            raise ValueError("levels do not describe a staircase")
        u_prev = float(np.clip(u_prev, self.mesh.u_min, self.mesh.u_max))
        self._sc = np.zeros(5)
        self._ext = np.zeros(stack_capacity)

        ext = _levels_to_extrema(self.levels, self.mesh.edges)
        self._ext[:len(ext)] = ext
        ns = len(ext)
        if u_prev > ext[-1]:
            ns, _ = kern.stack_up(self._ext, ns, u_prev, *self._prefix)
        elif u_prev < ext[-1]:
            ns, _ = kern.stack_down(self._ext, ns, u_prev, *self._prefix)
        self._sc[kern.DEPTH] = ns
        self._sc[kern.U_PREV] = u_prev
        self._sc[kern.Y] = self._quantized_sum()
        up = kern.stack_up_mass(self._ext, ns, *self._prefix)
        self._sc[kern.YC] = density.offset + 2.0 * up - density.total_mass

    @property
    def _prefix(self):
        d = self.density
        return self.mesh.edges, d._offcum, d._offw, d._diagcum

    @property
    def op(self):
        d = self.density
        return (self.levels, d.colcum, self.mesh.edges, self._sc, self._ext,
                d._offcum, d._offw, d._diagcum)

    @property
    def u_prev(self) -> float:
        return float(self._sc[kern.U_PREV])

    @property
    def y(self) -> float:
        return float(self._sc[kern.YC] if self.interpolate else self._sc[kern.Y])

    @property
    def input_bounds(self) -> tuple[float, float]:
        return self.mesh.u_min, self.mesh.u_max

    @property
    def y_quantized(self) -> float:
        return float(self._sc[kern.Y])

    @property
    def extrema(self) -> list[float]:
        """Sub-cell memory: alternating extrema starting with u_min."""
        return [float(x) for x in self._ext[:int(self._sc[kern.DEPTH])]]

    def copy(self) -> "PreisachState":
        new = object.__new__(PreisachState)
        new.mesh, new.density, new.interpolate = self.mesh, self.density, self.interpolate
        new.levels = self.levels.copy()
        new._sc = self._sc.copy()
        new._ext = self._ext.copy()
        return new

    def apply_input(self, u_new: float) -> float:
        u_new = float(u_new)
        if not math.isfinite(u_new):
            raise ValueError(f"non-finite input {u_new!r}")
        dy = kern.apply_input(self.op, u_new, self.interpolate)
        if not math.isfinite(dy):
            raise NumericalError("sub-cell memory stack is full")
        return float(dy)

    def apply_sequence(self, inputs) -> np.ndarray:
        """Apply many inputs at once; returns the output after each one."""
        inputs = np.ascontiguousarray(inputs, dtype=float)
        if not np.all(np.isfinite(inputs)):
            raise ValueError("non-finite input in sequence")
        out = np.empty_like(inputs)
        done = kern.apply_sequence(self.op, inputs, self.interpolate, out)
        if done < len(inputs):
            raise NumericalError("sub-cell memory stack is full")
        return out

    def up_mask(self) -> np.ndarray:
        n = self.mesh.n
        rows = np.arange(n)[:, None]
        return (rows >= np.arange(n)[None, :]) & (rows < self.levels[None, :])

    def _quantized_sum(self) -> float:
        w = self.density.weights
        return float(self.density.offset + 2.0 * w[self.up_mask()].sum() - w.sum())

    def _subcell_coverage(self) -> np.ndarray:
        # per-cell fraction of area below the real-valued staircase
        e, d = self.mesh.edges, self.mesh.delta
        lo, hi = e[:-1], e[1:]
        cov = np.zeros((self.mesh.n, self.mesh.n))
        diag = np.zeros(self.mesh.n)
        for b0, b1, top in _extrema_steps(self.extrema):
            width = np.clip(np.minimum(b1, hi) - np.maximum(b0, lo), 0.0, None)
            height = np.clip(top - lo, 0.0, d)
            cov += np.outer(height, width) / (d * d)
            c = np.minimum(top, hi)
            s0 = np.maximum(b0, lo)
            s1 = np.minimum(np.minimum(b1, hi), c)
            tri = np.where(s1 > s0, ((c - s0) ** 2 - (c - s1) ** 2) / 2.0, 0.0)
            diag += tri / (d * d / 2.0)
        cov[~self.mesh.cell_mask()] = 0.0
        np.fill_diagonal(cov, diag)
        return cov

    def direct_output(self) -> float:
        """Output recomputed by summing every relay (ignores the running sum).

        In sub-cell mode each cell contributes its covered area fraction.
        """
        if not self.interpolate:
            return self._quantized_sum()
        w = self.density.weights
        up = float((w * self._subcell_coverage()).sum())
        return self.density.offset + 2.0 * up - self.density.total_mass

    def check_staircase(self) -> bool:
        lv = self.levels
        j = np.arange(self.mesh.n)
        if np.any(lv < j) or np.any(lv > self.mesh.n):
            return False
        filled = lv > j
        p = int(filled.sum())
        return bool(np.all(filled[:p]) and np.all(np.diff(lv[:p]) <= 0))

    def interface_corners(self) -> list[tuple[float, float]]:
        """Vertices of the staircase as (beta, alpha), left to right.

        Starts on the left domain edge and ends on the diagonal; an empty up
        region gives the single point (u_min, u_min).  Sub-cell mode reports
        the real-valued staircase, otherwise corners sit on cell edges.
        """
        if self.interpolate:
            ext = self.extrema
        else:
            ext = _levels_to_extrema(self.levels, self.mesh.edges)
        return _corners_from_extrema(ext)

    def corners_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["beta", "alpha"])
            for b, a in self.interface_corners():
                wr.writerow([repr(b), repr(a)])

    def cells_to_csv(self, path) -> None:
        a, b = self.mesh.cell_indices()
        up = self.up_mask()
        w = self.density.weights
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["alpha_index", "beta_index", "weight", "state"])
            for i, j in zip(a, b):
                wr.writerow([int(i), int(j), repr(float(w[i, j])), 1 if up[i, j] else -1])


def _demagnetized_levels(density: DensityGrid) -> np.ndarray:
    # Cells strictly below the anti-diagonal i + j = n - 1 are up, cells above
    # are down.  Cells on it map to themselves under the point reflection of
    # the plane; the first m of them are set up, m chosen to minimise |y|.
    n = density.mesh.n
    j = np.arange(n)
    n_mirror = (n + 1) // 2
    base = np.where(j < n_mirror, n - 1 - j, j)
    rows = j[:, None]
    up = density.weights[(rows >= j[None, :]) & (rows < base[None, :])].sum()
    y_base = 2.0 * up - density.total_mass
    w_mirror = density.weights[n - 1 - j[:n_mirror], j[:n_mirror]]
    prefix = np.concatenate([[0.0], np.cumsum(w_mirror)])
    m = int(np.argmin(np.abs(y_base + 2.0 * prefix)))
    levels = base.copy()
    levels[:m] += 1
    return levels


def init_state(mesh: TriangularMesh, density: DensityGrid,
               mode: InitMode | str = InitMode.DEMAGNETIZED,
               interpolate: bool = False) -> PreisachState:
    """Fresh memory: negative saturation, positive saturation, or demagnetized.

    The demagnetized staircase follows the anti-diagonal through the domain
    centre, where the last input is placed.
    """
    if not density.mesh.same_as(mesh):
        raise ValueError("density is defined on a different mesh")
    mode = InitMode.parse(mode)
    n = mesh.n
    if mode is InitMode.ALL_DOWN:
        levels, u0 = np.arange(n), mesh.u_min
    elif mode is InitMode.ALL_UP:
        levels, u0 = np.full(n, n), mesh.u_max
    else:
        levels, u0 = _demagnetized_levels(density), 0.5 * (mesh.u_min + mesh.u_max)
    return PreisachState(density, levels, u0, interpolate)
