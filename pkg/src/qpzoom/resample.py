"""Bilinear resampling of an image through a separable target->source mapping."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError
from .warp_grid import AxisMap


def _as_image(src) -> np.ndarray:
    src = np.asarray(src, dtype=np.float64)
    if src.ndim not in (2, 3) or src.shape[0] == 0 or src.shape[1] == 0:
        raise InvalidArgumentError(f"expected a non-empty HxW or HxWxC image, got shape {src.shape}")
    return src


def _size(v: float, name: str) -> int:
    iv = int(round(v))
    if iv <= 0 or abs(iv - v) > 1e-9:
        raise InvalidArgumentError(f"{name} must be a positive integer, got {v}")
    return iv


def _brackets(coords: np.ndarray, size: int):
    c = np.clip(coords, 0.0, size - 1.0)
    i0 = np.floor(c).astype(np.intp)
    i1 = np.minimum(i0 + 1, size - 1)
    return i0, i1, c - i0


def sample_separable(src: np.ndarray, xc: np.ndarray, yc: np.ndarray) -> np.ndarray:
    """Bilinear samples ``out[j, i] = src(yc[j], xc[i])`` at fractional pixel indices.

    Coordinates outside the image are clamped to the border pixel.
    """
    hs, ws = src.shape[:2]
    y0, y1, ty = _brackets(yc, hs)
    x0, x1, tx = _brackets(xc, ws)
    extra = (1,) * (src.ndim - 2)
    flat = src.reshape((hs * ws,) + src.shape[2:])
    r0 = (y0 * ws)[:, None]
    r1 = (y1 * ws)[:, None]
    tx = tx.reshape((1, -1) + extra)
    ty = ty.reshape((-1, 1) + extra)
    # lerp form a + t*(b - a): exact for t == 0 and for constant neighbourhoods
    top = _lerp(flat.take(r0 + x0, axis=0), flat.take(r0 + x1, axis=0), tx)
    bot = _lerp(flat.take(r1 + x0, axis=0), flat.take(r1 + x1, axis=0), tx)
    return _lerp(top, bot, ty)


def _lerp(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> np.ndarray:
    # overwrites b
    b -= a
    b *= t
    b += a
    return b


def warp(src, am: AxisMap) -> np.ndarray:
    """Resample ``src`` into an ``am.h x am.w`` image through the axis maps.

    Target pixel ``(x', y')`` reads the source at
    ``(x_map(x' + 1/2) - 1/2, y_map(y' + 1/2) - 1/2)``.
    """
    src = _as_image(src)
    w, h = _size(am.w, "target width"), _size(am.h, "target height")
    xc = am.x_map(np.arange(w) + 0.5) - 0.5
    yc = am.y_map(np.arange(h) + 0.5) - 0.5
    return sample_separable(src, xc, yc)


def uniform_resize(src, w: int, h: int) -> np.ndarray:
    """Plain bilinear resize with the same pixel-center convention as :func:`warp`."""
    src = _as_image(src)
    w, h = _size(w, "target width"), _size(h, "target height")
    hs, ws = src.shape[:2]
    xc = (np.arange(w) + 0.5) * (ws / w) - 0.5
    yc = (np.arange(h) + 0.5) * (hs / h) - 0.5
    return sample_separable(src, xc, yc)
