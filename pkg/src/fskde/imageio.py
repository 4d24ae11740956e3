"""Grayscale image I/O: binary PGM (P5) by hand, PNG through Pillow."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

_PGM_HEADER = re.compile(rb"\AP5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s")


class ImageFormatError(ValueError):
    pass


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    m = _PGM_HEADER.match(data)
    if m is None:
        raise ImageFormatError(f"{path}: not a binary (P5) PGM file")
    width, height, maxval = (int(g) for g in m.groups())
    if not 0 < maxval < 65536:
        raise ImageFormatError(f"{path}: bad maxval {maxval}")
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    count = width * height
    body = data[m.end():]
    if len(body) < count * dtype.itemsize:
        raise ImageFormatError(f"{path}: truncated pixel data")
    return np.frombuffer(body, dtype=dtype, count=count).reshape(height, width).astype(float)


def write_pgm(path, image: np.ndarray) -> None:
    pixels = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    height, width = pixels.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (width, height) + pixels.tobytes())


def read_png(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode not in ("L", "I;16", "I"):
            im = im.convert("L")
        return np.asarray(im, dtype=float)


def write_png(path, image: np.ndarray) -> None:
    pixels = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path)


def read_image(path) -> np.ndarray:
    """Load a grayscale PGM or PNG as a float array, dispatching on magic bytes."""
    path = Path(path)
    with path.open("rb") as fh:
        magic = fh.read(8)
    if magic.startswith(b"P5"):
        return read_pgm(path)
    if magic.startswith(b"\x89PNG"):
        return read_png(path)
    raise ImageFormatError(f"{path}: unsupported image format (expected P5 PGM or PNG)")


def write_image(path, image: np.ndarray) -> None:
    if str(path).lower().endswith(".png"):
        write_png(path, image)
    else:
        write_pgm(path, image)
