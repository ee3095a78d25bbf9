"""End-to-end search-patch generation, prior jittering and target-size statistics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Tuple

import numpy as np

from .coord_map import map_box_forward
from .errors import DegenerateDeformationError, InvalidArgumentError
from .geometry import Box, ContextMode, clip_box, crop_image, crop_size, crop_window
from .importance import score_grid
from .qp import Intervals, ZoomParams, assemble, solve
from .resample import warp
from .warp_grid import AxisMap, axis_maps, control_grid

log = logging.getLogger(__name__)

ZOOM = "zoom"
UNIFORM = "uniform"
MODES = (ZOOM, UNIFORM)


@dataclass(frozen=True)
class HyperParams:
    search_size: int = 256
    context_factor: float = 5.0
    context_mode: ContextMode = ContextMode.PER_AXIS
    grid: int = 16
    beta: float = 64.0
    gamma: float = 1.5
    lam: float = 1.0
    epsilon: float = 1e-2
    jitter_small: float = 0.1
    jitter_large: float = 0.5
    jitter_small_prob: float = 0.8
    pad_value: float = 0.0

    def __post_init__(self):
        if self.search_size <= 0:
            raise InvalidArgumentError(f"search size must be positive, got {self.search_size}")
        if self.grid < 2:
            raise InvalidArgumentError(f"grid must have at least 2 patches per axis, got {self.grid}")
        if not 0 <= self.jitter_small_prob <= 1:
            raise InvalidArgumentError("jitter_small_prob must be a probability")
        if self.jitter_small < 0 or self.jitter_large < 0:
            raise InvalidArgumentError("jitter scales must be non-negative")
        # validates gamma / lambda
        self.zoom

    @property
    def zoom(self) -> ZoomParams:
        return ZoomParams(self.gamma, self.lam)

    def with_(self, **kw) -> "HyperParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class ResizeResult:
    patch: np.ndarray
    axis_map: AxisMap
    prior_on_crop: Box
    crop_origin: Tuple[int, int]
    crop_extent: Tuple[float, float]
    fallback: bool = False  # True when the QP degenerated and the uniform map was used


def _clamp_prior(r: Box, W: float, H: float) -> Box:
    return Box(min(max(r.cx, 0.0), W), min(max(r.cy, 0.0), H), r.w, r.h)


def uniform_map(W: float, H: float, hp: HyperParams) -> AxisMap:
    iv = Intervals.uniform(W, H, hp.grid, hp.grid)
    return axis_maps(control_grid(iv, W, H), hp.search_size, hp.search_size)


def build_axis_map(r: Box, W: float, H: float, hp: HyperParams,
                   mode: str = ZOOM) -> Tuple[AxisMap, bool]:
    """Solve for the grid around prior ``r`` (crop coordinates).

    Returns the axis map and whether the uniform fallback was taken.
    """
    if mode not in MODES:
        raise InvalidArgumentError(f"mode must be one of {MODES}, got {mode!r}")
    # gamma == 1: both energies vanish on the uniform grid, which is the exact minimizer
    if mode == UNIFORM or hp.gamma == 1:
        return uniform_map(W, H, hp), False
    r = _clamp_prior(r, W, H)
    S = score_grid(r, W, H, hp.grid, hp.grid, hp.beta, hp.epsilon)
    try:
        iv = solve(assemble(S, W, H, hp.zoom))
        g = control_grid(iv, W, H)
    except DegenerateDeformationError as exc:
        log.warning("degenerate deformation (%s); falling back to uniform resize", exc)
        return uniform_map(W, H, hp), True
    return axis_maps(g, hp.search_size, hp.search_size), False


def make_search_patch(frame, prev_box: Box, hp: HyperParams = HyperParams(),
                      mode: str = ZOOM) -> ResizeResult:
    """Crop around the previous box and resize the crop to ``hp.search_size``."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim not in (2, 3) or frame.size == 0:
        raise InvalidArgumentError(f"expected a non-empty HxW(xC) frame, got shape {frame.shape}")
    fh, fw = frame.shape[:2]
    if clip_box(prev_box, fw, fh) is None:
        raise InvalidArgumentError(f"previous box {prev_box} does not overlap the {fw}x{fh} frame")
    W, H = crop_size(prev_box, hp.context_factor, hp.context_mode)
    x0, y0, _, _ = crop_window(prev_box, W, H)
    crop, r = crop_image(frame, prev_box, W, H, hp.pad_value)
    am, fallback = build_axis_map(r, W, H, hp, mode)
    return ResizeResult(warp(crop, am), am, r, (x0, y0), (W, H), fallback)


def jitter_prior(gt_w: float, gt_h: float, hp: HyperParams,
                 rng: np.random.Generator) -> Tuple[float, float]:
    """Log-normally jittered prior size for training; the scale is a two-component mixture."""
    if not (gt_w > 0 and gt_h > 0):
        raise InvalidArgumentError(f"ground-truth size must be positive, got {gt_w}x{gt_h}")
    j = hp.jitter_small if rng.random() < hp.jitter_small_prob else hp.jitter_large
    jw, jh = rng.normal(0.0, j, size=2)
    return math.exp(jw) * gt_w, math.exp(jh) * gt_h


@dataclass(frozen=True)
class SizeRecord:
    gt: Box
    prior: Box
    frame_w: float
    frame_h: float


@dataclass(frozen=True)
class SizeStats:
    avg: float
    std: float
    n: int
    areas: np.ndarray = field(repr=False, default=None)


def mapped_target_area(rec: SizeRecord, hp: HyperParams, mode: str = ZOOM) -> Optional[float]:
    """Area of the ground-truth box on the resized patch; ``None`` if it is not visible in the crop."""
    W, H = crop_size(rec.prior, hp.context_factor, hp.context_mode)
    x0, y0, _, _ = crop_window(rec.prior, W, H)
    gt = clip_box(rec.gt, rec.frame_w, rec.frame_h)
    if gt is None:
        return None
    gt = clip_box(gt.shifted(-x0, -y0), W, H)
    if gt is None:
        return None
    am, _ = build_axis_map(rec.prior.shifted(-x0, -y0), W, H, hp, mode)
    return map_box_forward(gt, am).area


def target_size_stats(records: Iterable[SizeRecord], hp: HyperParams = HyperParams(),
                      mode: str = ZOOM) -> SizeStats:
    """Mean and (population) standard deviation of the mapped ground-truth area."""
    records = list(records)
    if not records:
        raise InvalidArgumentError("empty sequence")
    areas = [a for a in (mapped_target_area(r, hp, mode) for r in records) if a is not None]
    if not areas:
        raise InvalidArgumentError("no record has a visible target inside its crop")
    arr = np.asarray(areas)
    return SizeStats(float(arr.mean()), float(arr.std()), len(arr), arr)
