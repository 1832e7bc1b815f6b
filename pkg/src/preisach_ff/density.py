"""Preisach density constructors: uniform and truncated 2-D Gaussian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .preisach import DensityGrid, TriangularMesh


@dataclass(frozen=True)
class GaussianParams:
    """Mean ``(mu_beta, mu_alpha)`` and 2x2 covariance, both in (beta, alpha) order."""

    mu: tuple[float, float] = (-0.35, 0.35)
    sigma: tuple[tuple[float, float], tuple[float, float]] = ((0.05, 0.0), (0.0, 0.05))

    def __post_init__(self):
        cov = np.asarray(self.sigma, dtype=float)
        if cov.shape != (2, 2) or not np.all(np.isfinite(cov)):
            raise ValueError("covariance must be a finite 2x2 matrix")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-14):
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ValueError("covariance must be positive definite")
        if len(self.mu) != 2 or not np.all(np.isfinite(self.mu)):
            raise ValueError("mean must be a finite pair")


def _check_range(y_range) -> tuple[float, float]:
    y_min, y_max = (float(v) for v in y_range)
    if not (np.isfinite(y_min) and np.isfinite(y_max)) or y_min >= y_max:
        raise ValueError(f"need finite y_min < y_max, got {y_range!r}")
    return y_min, y_max


def normalize(mesh: TriangularMesh, raw: np.ndarray, y_range) -> DensityGrid:
    """Scale raw non-negative weights so that the saturated output spans y_range."""
    y_min, y_max = _check_range(y_range)
    raw = np.where(mesh.cell_mask(), raw, 0.0)
    total = raw.sum()
    if not total > 0:
        raise ValueError("density has no mass on the mesh")
    return DensityGrid(mesh, raw * (0.5 * (y_max - y_min) / total), 0.5 * (y_max + y_min))


def uniform_density(mesh: TriangularMesh, y_range=(-1.0, 1.0)) -> DensityGrid:
    """Equal weight on every relay, including the half cells on the diagonal."""
    return normalize(mesh, mesh.cell_mask().astype(float), y_range)


def gaussian_density(mesh: TriangularMesh, params: GaussianParams | None = None,
                     y_range=(-1.0, 1.0)) -> DensityGrid:
    """Gaussian pdf at each cell centroid times cell area, truncated to alpha >= beta.

    Diagonal cells are half squares: their centroid sits at one third of the
    cell towards the upper-left corner and their area is halved.
    """
    params = params or GaussianParams()
    n, d = mesh.n, mesh.delta
    c = mesh.centers
    alpha = np.broadcast_to(c[:, None], (n, n)).copy()
    beta = np.broadcast_to(c[None, :], (n, n)).copy()
    area = np.full((n, n), d * d)
    diag = np.arange(n)
    alpha[diag, diag] += d / 6.0
    beta[diag, diag] -= d / 6.0
    area[diag, diag] *= 0.5

    mu = np.asarray(params.mu, dtype=float)
    inv = np.linalg.inv(np.asarray(params.sigma, dtype=float))
    x = np.stack([beta - mu[0], alpha - mu[1]], axis=-1)
    q = np.einsum("...i,ij,...j->...", x, inv, x)
    return normalize(mesh, np.exp(-0.5 * q) * area, y_range)
