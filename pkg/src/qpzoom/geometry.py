"""Boxes, crop sizing and crop extraction."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidArgumentError


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in center form, pixel units.

    Zero width/height is allowed so that point boxes can be mapped; anything
    that needs an extent (crop sizing, importance) checks for positivity itself.
    """

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if not _finite(self.cx, self.cy, self.w, self.h):
            raise InvalidArgumentError(f"box has non-finite fields: {self}")
        if self.w < 0 or self.h < 0:
            raise InvalidArgumentError(f"box has negative size: {self}")

    @classmethod
    def from_corners(cls, x1: float, y1: float, x2: float, y2: float) -> "Box":
        return cls((x1 + x2) / 2, (y1 + y2) / 2, x2 - x1, y2 - y1)

    @property
    def corners(self) -> Tuple[float, float, float, float]:
        return (self.cx - self.w / 2, self.cy - self.h / 2,
                self.cx + self.w / 2, self.cy + self.h / 2)

    @property
    def area(self) -> float:
        return self.w * self.h

    def shifted(self, dx: float, dy: float) -> "Box":
        return Box(self.cx + dx, self.cy + dy, self.w, self.h)

    def as_list(self):
        return [self.cx, self.cy, self.w, self.h]


class ContextMode(enum.Enum):
    """How the unit context amount is derived from the box size."""

    PER_AXIS = "per-axis"   # c_w = b.w, c_h = b.h
    MEAN = "mean"           # c_w = c_h = (b.w + b.h) / 2


def crop_size(b: Box, f: float, mode: ContextMode = ContextMode.PER_AXIS) -> Tuple[float, float]:
    """Side length of the square crop around ``b`` for context factor ``f``.

    Returns ``(W, H)``; they are always equal.
    """
    if not _finite(f) or f < 1:
        raise InvalidArgumentError(f"context factor must be finite and >= 1, got {f}")
    if b.w <= 0 or b.h <= 0:
        raise InvalidArgumentError(f"reference box must have positive size: {b}")
    if mode is ContextMode.PER_AXIS:
        cw, ch = b.w, b.h
    elif mode is ContextMode.MEAN:
        cw = ch = (b.w + b.h) / 2
    else:
        raise InvalidArgumentError(f"unknown context mode {mode!r}")
    side = math.sqrt((b.w + (f - 1) * cw) * (b.h + (f - 1) * ch))
    return side, side


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def crop_window(b: Box, W: float, H: float) -> Tuple[int, int, int, int]:
    """Integer crop window ``(x0, y0, width, height)`` in frame pixels.

    The origin is the real-valued top-left corner rounded to the nearest
    integer (halves round up); the buffer is ``ceil(W) x ceil(H)``.
    """
    if not _finite(W, H) or W <= 0 or H <= 0:
        raise InvalidArgumentError(f"crop extent must be positive, got {W}x{H}")
    x0 = _round_half_up(b.cx - W / 2)
    y0 = _round_half_up(b.cy - H / 2)
    return x0, y0, int(math.ceil(W)), int(math.ceil(H))


def crop_image(img: np.ndarray, b: Box, W: float, H: float,
               pad_value: float = 0.0) -> Tuple[np.ndarray, Box]:
    """Cut a ``ceil(W) x ceil(H)`` window centered on ``b`` out of ``img``.

    Parts of the window outside the frame are filled with ``pad_value``.
    Returns the crop and ``b`` expressed in crop coordinates; the sub-pixel
    residual of the origin rounding ends up in the returned box center.
    """
    img = np.asarray(img)
    if img.ndim not in (2, 3) or img.shape[0] == 0 or img.shape[1] == 0:
        raise InvalidArgumentError(f"empty or malformed image of shape {img.shape}")
    x0, y0, cw, ch = crop_window(b, W, H)
    fh, fw = img.shape[:2]

    out = np.full((ch, cw) + img.shape[2:], pad_value, dtype=np.float64)
    sx0, sx1 = max(x0, 0), min(x0 + cw, fw)
    sy0, sy1 = max(y0, 0), min(y0 + ch, fh)
    if sx0 < sx1 and sy0 < sy1:
        out[sy0 - y0:sy1 - y0, sx0 - x0:sx1 - x0] = img[sy0:sy1, sx0:sx1]
    return out, b.shifted(-x0, -y0)


def to_crop_coords(b: Box, origin: Tuple[int, int]) -> Box:
    return b.shifted(-origin[0], -origin[1])


def from_crop_coords(b: Box, origin: Tuple[int, int]) -> Box:
    return b.shifted(origin[0], origin[1])


def clip_box(b: Box, x_max: float, y_max: float, x_min: float = 0.0, y_min: float = 0.0):
    """Intersect ``b`` with a rectangle; ``None`` when the overlap has no area."""
    x1, y1, x2, y2 = b.corners
    x1, y1 = max(x1, x_min), max(y1, y_min)
    x2, y2 = min(x2, x_max), min(y2, y_max)
    if x2 <= x1 or y2 <= y1:
        return None
    return Box.from_corners(x1, y1, x2, y2)
