"""Minimal binary PGM/PPM reader and writer; PNG goes through Pillow when it is installed.

Samples are floats in [0, 1].  Reading divides by maxval, writing rounds half
up after scaling by 255, so a read/write cycle of an 8-bit file is lossless.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import InvalidArgumentError

_WS = b" \t\n\r\v\f"


class ImageFormatError(InvalidArgumentError):
    pass


def _tokens(data: bytes, count: int):
    """First ``count`` header tokens and the offset just past the single separating whitespace."""
    out = []
    i = 0
    while len(out) < count:
        while i < len(data) and (data[i] in _WS or data[i] == ord("#")):
            if data[i] == ord("#"):
                while i < len(data) and data[i] not in b"\r\n":
                    i += 1
            else:
                i += 1
        start = i
        while i < len(data) and data[i] not in _WS and data[i] != ord("#"):
            i += 1
        if start == i:
            raise ImageFormatError("truncated PNM header")
        out.append(data[start:i])
    if i >= len(data) or data[i] not in _WS:
        raise ImageFormatError("missing whitespace after PNM header")
    return out, i + 1


def decode_pnm(data: bytes) -> np.ndarray:
    if data[:2] not in (b"P5", b"P6"):
        raise ImageFormatError("only binary PGM (P5) and PPM (P6) are supported")
    toks, off = _tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in toks[1:])
    except ValueError as exc:
        raise ImageFormatError(f"bad PNM header: {exc}") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise ImageFormatError(f"bad PNM dimensions/maxval: {width}x{height}, {maxval}")
    channels = 3 if toks[0] == b"P6" else 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height * channels
    raw = np.frombuffer(data, dtype=dtype, count=count, offset=off) \
        if len(data) - off >= count * dtype.itemsize else None
    if raw is None:
        raise ImageFormatError("truncated PNM pixel data")
    img = raw.astype(np.float64) / maxval
    shape = (height, width, 3) if channels == 3 else (height, width)
    return img.reshape(shape)


def quantize(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    return np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def encode_pnm(img: np.ndarray) -> bytes:
    q = quantize(img)
    if q.ndim == 3 and q.shape[2] == 1:
        q = q[..., 0]
    if q.ndim == 2:
        magic = b"P5"
    elif q.ndim == 3 and q.shape[2] == 3:
        magic = b"P6"
    else:
        raise InvalidArgumentError(f"cannot write image of shape {q.shape} as PNM")
    header = b"%s\n%d %d\n255\n" % (magic, q.shape[1], q.shape[0])
    return header + q.tobytes()


def _pillow():
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise ImageFormatError("PNG support needs Pillow (pip install qpzoom[png])") from exc
    return Image


def read_image(path) -> np.ndarray:
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".png":
        Image = _pillow()
        with Image.open(path) as im:
            arr = np.asarray(im.convert("L" if im.mode in ("L", "I", "1") else "RGB"))
        return arr.astype(np.float64) / 255.0
    with open(path, "rb") as fh:
        return decode_pnm(fh.read())


def write_image(path, img: np.ndarray) -> None:
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".png":
        Image = _pillow()
        q = quantize(img)
        Image.fromarray(q[..., 0] if q.ndim == 3 and q.shape[2] == 1 else q).save(path)
        return
    with open(path, "wb") as fh:
        fh.write(encode_pnm(img))
