"""Gaussian importance field around the temporal prior and per-patch scores."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .geometry import Box

DEFAULT_EPSILON = 1e-2


@dataclass(frozen=True)
class ImportanceParams:
    mu_x: float
    mu_y: float
    sigma_x: float
    sigma_y: float
    beta: float
    epsilon: float = DEFAULT_EPSILON

    @classmethod
    def from_prior(cls, r: Box, beta: float, epsilon: float = DEFAULT_EPSILON) -> "ImportanceParams":
        if r.w <= 0 or r.h <= 0:
            raise InvalidArgumentError(f"degenerate prior box {r}")
        if not (beta > 0 and math.isfinite(beta)):
            raise InvalidArgumentError(f"bandwidth must be positive and finite, got {beta}")
        if not epsilon > 0:
            raise InvalidArgumentError(f"epsilon must be positive, got {epsilon}")
        return cls(r.cx, r.cy, math.sqrt(beta * r.w), math.sqrt(beta * r.h), beta, epsilon)


def gaussian_value(p: ImportanceParams, x, y):
    """Unnormalized Gaussian bump, 1 at the prior center. Broadcasts over arrays."""
    zx = (np.asarray(x, dtype=float) - p.mu_x) / p.sigma_x
    zy = (np.asarray(y, dtype=float) - p.mu_y) / p.sigma_y
    return np.exp(-0.5 * (zx * zx + zy * zy))


@dataclass(frozen=True)
class ScoreGrid:
    """Patch importance scores, ``scores[l, k]`` for row ``l`` and column ``k`` (0-based)."""

    scores: np.ndarray
    epsilon: float = DEFAULT_EPSILON

    @property
    def m(self) -> int:
        return self.scores.shape[0]

    @property
    def n(self) -> int:
        return self.scores.shape[1]

    def transposed(self) -> "ScoreGrid":
        return ScoreGrid(self.scores.T.copy(), self.epsilon)


def patch_centers(extent: float, count: int) -> np.ndarray:
    """Centers of ``count`` equal patches tiling ``[0, extent]``."""
    return (np.arange(count) + 0.5) * (extent / count)


def score_grid(r: Box, W: float, H: float, m: int, n: int,
               beta: float, epsilon: float = DEFAULT_EPSILON) -> ScoreGrid:
    """Importance of each patch of the uniform ``m x n`` grid over a ``W x H`` crop.

    Scores are sampled at the uniform patch centers, so they do not depend on
    the intervals being optimized.
    """
    if m < 2 or n < 2:
        raise InvalidArgumentError(f"grid needs at least 2 patches per axis, got {m}x{n}")
    if not (W > 0 and H > 0):
        raise InvalidArgumentError(f"crop extent must be positive, got {W}x{H}")
    p = ImportanceParams.from_prior(r, beta, epsilon)
    xs = patch_centers(W, n)
    ys = patch_centers(H, m)
    s = gaussian_value(p, xs[None, :], ys[:, None]) + epsilon
    s.setflags(write=False)
    return ScoreGrid(s, epsilon)
