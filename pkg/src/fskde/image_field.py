"""Gradient angle-weight images and per-pixel FS-KDE descriptor fields.

The local FS-KDE at pixel x with window phi has coefficients

    F_k(x) = H_k (W e^{-ik Theta} * phi)(x),

so a field of order K costs K + 1 complex convolutions.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage, signal

from .descriptor import AngleWeightSet, Descriptor, estimate
from .kernel import Kernel, wrap_angle


@dataclass(frozen=True)
class AngularImage:
    angles: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if angles.shape != weights.shape or angles.ndim != 2:
            raise ValueError(f"angle image {angles.shape} and weight image {weights.shape} must be matching 2-D arrays")
        if not np.all(np.isfinite(angles)):
            raise ValueError("angles must be finite")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "weights", weights)

    @property
    def shape(self):
        return self.angles.shape

    def masked(self, mask: np.ndarray) -> "AngularImage":
        return AngularImage(self.angles, np.where(mask, self.weights, 0.0))


def gradient_field(image, operator: str = "central") -> AngularImage:
    """Gradient angle (atan2(dy, dx), rows pointing down) and magnitude of an image.

    ``central`` uses central differences inside and one-sided differences on the
    border; ``sobel`` uses the 3x3 Sobel operator scaled to unit gain.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2 or min(image.shape) < 3:
        raise ValueError(f"image must be 2-D and at least 3x3, got shape {image.shape}")
    if operator == "central":
        gy, gx = np.gradient(image)
    elif operator == "sobel":
        gx = ndimage.sobel(image, axis=1, mode="nearest") / 8.0
        gy = ndimage.sobel(image, axis=0, mode="nearest") / 8.0
    else:
        raise ValueError(f"unknown gradient operator {operator!r}")
    weights = np.hypot(gx, gy)
    angles = np.where(weights > 0, wrap_angle(np.arctan2(gy, gx)), 0.0)
    return AngularImage(angles, weights)


class WindowShape(str, enum.Enum):
    BOX = "box"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Window:
    """Nonnegative window with unit L1 norm, centered at ``taps[h // 2, w // 2]``."""

    taps: np.ndarray = field(repr=False)
    shape: WindowShape

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=float)
        if taps.ndim != 2 or taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise ValueError(f"window must be 2-D with odd sides, got {taps.shape}")
        if np.any(taps < 0) or taps.sum() <= 0:
            raise ValueError("window taps must be nonnegative and not all zero")
        object.__setattr__(self, "taps", taps / taps.sum())

    @property
    def separable_factors(self):
        """(column, row) 1-D factors if the taps are an outer product, else None."""
        u, s, vt = np.linalg.svd(self.taps)
        if s.size > 1 and s[1] > 1e-14 * s[0]:
            return None
        col = u[:, 0] * math.sqrt(s[0])
        row = vt[0] * math.sqrt(s[0])
        if col.sum() < 0:
            col, row = -col, -row
        return col, row


def box_window(size: int) -> Window:
    return Window(np.ones((size, size)), WindowShape.BOX)


def gaussian_window(sigma: float, radius: int | None = None) -> Window:
    radius = int(math.ceil(3 * sigma)) if radius is None else radius
    x = np.arange(-radius, radius + 1)
    g = np.exp(-0.5 * (x / sigma) ** 2)
    return Window(np.outer(g, g), WindowShape.GAUSSIAN)


@dataclass(frozen=True)
class DescriptorField:
    """Planes F_k(x), k = 0..K, stacked as a (K + 1, H, W) complex array."""

    order: int
    planes: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return self.planes.shape[1:]

    def descriptor_at(self, row: int, col: int) -> Descriptor:
        return Descriptor(self.order, self.planes[:, row, col])

    def save(self, directory, stem: str = "plane") -> Path:
        """One raw little-endian complex128 file per plane plus ``manifest.json``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        names = []
        for k, plane in enumerate(self.planes):
            name = f"{stem}_{k:03d}.bin"
            np.ascontiguousarray(plane, dtype="<c16").tofile(directory / name)
            names.append(name)
        manifest = {
            "K": self.order,
            "height": int(self.shape[0]),
            "width": int(self.shape[1]),
            "dtype": "complex128-le",
            "layout": "row-major (re, im) float64 pairs",
            "planes": names,
        }
        path = directory / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2))
        return path

    @classmethod
    def load(cls, manifest_path) -> "DescriptorField":
        manifest_path = Path(manifest_path)
        meta = json.loads(manifest_path.read_text())
        shape = (meta["height"], meta["width"])
        planes = np.stack([
            np.fromfile(manifest_path.parent / name, dtype="<c16").reshape(shape)
            for name in meta["planes"]
        ])
        return cls(int(meta["K"]), planes)


def _convolve_spatial(plane: np.ndarray, window: Window) -> np.ndarray:
    factors = window.separable_factors
    if factors is None:
        return signal.convolve2d(plane, window.taps, mode="same", boundary="fill")
    col, row = factors
    out = []
    for part in (plane.real, plane.imag):
        tmp = ndimage.convolve1d(part, row, axis=1, mode="constant")
        out.append(ndimage.convolve1d(tmp, col, axis=0, mode="constant"))
    return out[0] + 1j * out[1]


def _convolve_fft(plane: np.ndarray, window: Window) -> np.ndarray:
    return signal.fftconvolve(plane, window.taps, mode="same")


def local_fskde(field: AngularImage, window: Window, kernel: Kernel, method: str = "spatial") -> DescriptorField:
    """Per-pixel FS-KDE of ``field`` under ``window`` with zero-padded borders.

    ``method`` is ``spatial`` (separable passes when possible) or ``fft``.
    """
    h, w = field.shape
    wh, ww = window.taps.shape
    if wh > h or ww > w:
        raise ValueError(f"window {window.taps.shape} larger than image {field.shape}")
    convolve = {"spatial": _convolve_spatial, "fft": _convolve_fft}.get(method)
    if convolve is None:
        raise ValueError(f"unknown convolution method {method!r}")
    planes = np.empty((kernel.order + 1, h, w), dtype=complex)
    for k in range(kernel.order + 1):
        z = field.weights * np.exp(-1j * k * field.angles)
        planes[k] = kernel.coeffs[k] * convolve(z, window)
    planes[0] = planes[0].real
    return DescriptorField(kernel.order, planes)


def circular_mask(shape, diameter: float) -> np.ndarray:
    """Pixels within ``diameter / 2`` of the array center ((h - 1) / 2, (w - 1) / 2)."""
    h, w = shape
    if diameter > min(h, w):
        raise ValueError(f"mask diameter {diameter} exceeds patch size {shape}")
    rows, cols = np.ogrid[:h, :w]
    r2 = (rows - (h - 1) / 2.0) ** 2 + (cols - (w - 1) / 2.0) ** 2
    return r2 <= (diameter / 2.0) ** 2


def masked_samples(patch, mask_diameter: float, operator: str = "central") -> AngleWeightSet:
    """Gradient angle-weight samples of the pixels inside the circular mask."""
    grad = gradient_field(patch, operator)
    mask = circular_mask(grad.shape, mask_diameter)
    return AngleWeightSet(grad.angles[mask], grad.weights[mask])


def patch_descriptor(patch, kernel: Kernel, mask_diameter: float, operator: str = "central") -> Descriptor:
    """Single FS-KDE of the masked gradients of a patch.

    Gradients are taken on the full patch first; the mask only selects which
    pixels contribute, and N is the number of pixels inside it.
    """
    return estimate(masked_samples(patch, mask_diameter, operator), kernel)
