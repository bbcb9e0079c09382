"""Correlated-Gaussian benchmark tasks with closed-form information quantities.

X and Y are each d-dimensional standard normal vectors with componentwise
correlation rho, so the exact mutual information, the conditional density
of Y given X, and both marginals are available in closed form. Sampling is
counter-based (Philox keyed by seed and stream index, normals via
Box-Muller), so batches are bit-reproducible regardless of thread
scheduling or call order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN_2PI = math.log(2.0 * math.pi)

__all__ = [
    "GaussianTask",
    "SampleBatch",
    "true_mi",
    "rho_for_target_mi",
    "task_for_target_mi",
    "sample",
    "cond_log_density",
    "pairwise_cond_log_density",
    "marginal_log_density",
    "marginal_entropy",
]


@dataclass(frozen=True)
class GaussianTask:
    """Componentwise-correlated standard-normal pair of dimension `dim`."""

    dim: int
    rho: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly inside (-1, 1)")


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Paired draws from a task, tagged with their generating seed and stream."""

    xs: np.ndarray
    ys: np.ndarray
    seed: int
    stream: int
    task: GaussianTask

    def __post_init__(self):
        if self.xs.shape != self.ys.shape:
            raise ValueError("xs and ys must have identical shape")
        if self.xs.ndim != 2 or self.xs.shape[0] < 2:
            raise ValueError("batch must be (n, dim) with n >= 2")

    @property
    def n(self) -> int:
        return self.xs.shape[0]


def true_mi(task: GaussianTask) -> float:
    """Exact mutual information -(d/2) ln(1 - rho^2) in nats."""
    return -0.5 * task.dim * math.log1p(-task.rho * task.rho)


def rho_for_target_mi(target_mi: float, dim: int) -> float:
    """Correlation producing the requested information at the given dimension."""
    if target_mi < 0:
        raise ValueError("target information must be nonnegative")
    return math.sqrt(-math.expm1(-2.0 * target_mi / dim))


def task_for_target_mi(dim: int, target_mi: float) -> GaussianTask:
    return GaussianTask(dim, rho_for_target_mi(target_mi, dim))


def _standard_normals(seed: int, stream: int, shape: tuple) -> np.ndarray:
    """Box-Muller normals from a Philox generator keyed by (seed, stream)."""
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative")
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u = gen.random((2, pairs))
    radius = np.sqrt(-2.0 * np.log1p(-u[0]))  # 1 - u in (0, 1], so the log is finite
    angle = 2.0 * math.pi * u[1]
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:count].reshape(shape)


def sample(task: GaussianTask, n: int, seed: int, stream: int = 0) -> SampleBatch:
    """Draw n paired samples: x standard normal, y = rho x + sqrt(1-rho^2) noise.

    Deterministic in (seed, stream); distinct streams never share generator
    state, so concurrent sampling is safe.
    """
    if n < 2:
        raise ValueError("need n >= 2 (contrastive estimators require negatives)")
    xs = _standard_normals(seed, 2 * stream, (n, task.dim))
    noise = _standard_normals(seed, 2 * stream + 1, (n, task.dim))
    ys = task.rho * xs + math.sqrt(1.0 - task.rho * task.rho) * noise
    return SampleBatch(xs=xs, ys=ys, seed=seed, stream=stream, task=task)


def cond_log_density(task: GaussianTask, y, x):
    """log N(y; rho x, (1 - rho^2) I), elementwise over leading axes.

    Accepts any broadcastable (..., dim) pair and reduces over the last
    axis; everything stays in log space.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape[-1] != task.dim or x.shape[-1] != task.dim:
        raise ValueError(f"trailing dimension must be {task.dim}")
    var = 1.0 - task.rho * task.rho
    resid = y - task.rho * x
    ll = -0.5 * ((resid * resid) / var + math.log(var) + LN_2PI)
    out = ll.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def pairwise_cond_log_density(task: GaussianTask, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """(i, j) table of log density of y_i under the conditional at x_j."""
    return cond_log_density(task, ys[:, None, :], xs[None, :, :])


def marginal_log_density(task: GaussianTask, y):
    """log N(y; 0, I) over the last axis."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != task.dim:
        raise ValueError(f"trailing dimension must be {task.dim}")
    out = (-0.5 * (y * y + LN_2PI)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def marginal_entropy(task: GaussianTask) -> float:
    """Differential entropy of the standard-normal marginal, (d/2) ln(2 pi e)."""
    return 0.5 * task.dim * (LN_2PI + 1.0)
