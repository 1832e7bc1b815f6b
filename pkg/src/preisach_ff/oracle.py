"""Brute-force references for the Preisach operator, used by the tests.

``NaiveRelayBank`` keeps one explicit +-1 state per relay and applies the
threshold rule to every relay on every input; it never looks at a staircase.
"""

from __future__ import annotations

import numpy as np

from .preisach import DensityGrid


class NaiveRelayBank:
    def __init__(self, density: DensityGrid, state=None):
        mesh = density.mesh
        self.mask = mesh.cell_mask()
        self.weights = density.weights[self.mask]
        self.offset = density.offset
        rows, cols = np.nonzero(self.mask)
        self.alpha = mesh.edges[rows + 1]
        self.beta = mesh.edges[cols]
        self.u_min, self.u_max = mesh.u_min, mesh.u_max
        if state is None:
            self.state = -np.ones(len(self.weights))
        else:
            s = np.asarray(state)
            self.state = (s[self.mask] if s.shape == self.mask.shape else s).astype(float).copy()
        if not np.all(np.abs(self.state) == 1):
            raise ValueError("relay states must be +1 or -1")

    @classmethod
    def all_up(cls, density: DensityGrid) -> "NaiveRelayBank":
        return cls(density, np.ones(int(density.mesh.cell_mask().sum())))

    @property
    def y(self) -> float:
        return float(self.offset + np.dot(self.weights, self.state))

    def naive_step(self, u: float) -> float:
        u = min(max(float(u), self.u_min), self.u_max)
        self.state[u >= self.alpha] = 1.0
        self.state[u <= self.beta] = -1.0
        return self.y

    def run(self, inputs) -> np.ndarray:
        return np.array([self.naive_step(u) for u in inputs])


def uniform_branch(u: float, direction) -> float:
    """Major-loop branch of the uniform density on [-1, 1] x [-1, 1].

    ``direction`` is "ascending" (from negative saturation) or "descending"
    (from positive saturation); +1 and -1 are accepted too.
    """
    u = float(u)
    if not -1.0 <= u <= 1.0:
        raise ValueError(f"input {u} outside [-1, 1]")
    if direction in ("ascending", "up", 1):
        return (u + 1.0) ** 2 / 2.0 - 1.0
    if direction in ("descending", "down", -1):
        return 1.0 - (1.0 - u) ** 2 / 2.0
    raise ValueError(f"unknown direction {direction!r}")
