"""Synthetic patch-correspondence datasets for desk-scale benchmarking.

Each scene is band-limited oriented noise (white noise filtered to a ring of
spatial frequencies and an orientation lobe), optionally overlaid with a
smooth step edge so that some scenes have a one-sided gradient distribution.
Two views of a scene differ by a small random affine warp, a gain/offset
change and additive pixel noise.  View ``a`` and ``b`` of scene i form a
corresponding pair; view ``a`` of scene i and view ``b`` of scene i + 1 form a
non-corresponding pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .dataset import Dataset, PatchPair


@dataclass(frozen=True)
class SyntheticConfig:
    n_pairs: int = 2000
    patch_size: int = 64
    seed: int = 0
    margin: int = 24
    freq_range: tuple[float, float] = (0.05, 0.14)
    freq_width: float = 0.035
    lobe_power: tuple[int, int] = (1, 6)
    edge_fraction: float = 0.5
    edge_strength: tuple[float, float] = (0.6, 1.6)
    edge_width: float = 3.0
    jitter_rotation_deg: float = 8.0
    jitter_scale: float = 0.08
    jitter_shift: float = 2.5
    gain_jitter: float = 0.1
    offset_jitter: float = 6.0
    pixel_noise: float = 4.0
    contrast: float = 40.0


def _oriented_texture(rng: np.random.Generator, size: int, cfg: SyntheticConfig) -> np.ndarray:
    noise = rng.standard_normal((size, size))
    fy = np.fft.fftfreq(size)[:, None]
    fx = np.fft.fftfreq(size)[None, :]
    radius = np.hypot(fx, fy)
    f0 = rng.uniform(*cfg.freq_range)
    orientation = rng.uniform(0.0, math.pi)
    power = rng.integers(cfg.lobe_power[0], cfg.lobe_power[1] + 1)
    lobe = np.cos(np.arctan2(fy, fx) - orientation) ** (2 * power)
    ring = np.exp(-0.5 * ((radius - f0) / cfg.freq_width) ** 2)
    tex = np.fft.ifft2(np.fft.fft2(noise) * ring * lobe).real
    return tex / (tex.std() + 1e-12)


def _scene(rng: np.random.Generator, cfg: SyntheticConfig) -> np.ndarray:
    size = cfg.patch_size + 2 * cfg.margin
    canvas = _oriented_texture(rng, size, cfg)
    if rng.uniform() < cfg.edge_fraction:
        c = (size - 1) / 2.0
        rows, cols = np.mgrid[:size, :size]
        direction = rng.uniform(-math.pi, math.pi)
        offset = rng.uniform(-8.0, 8.0)
        proj = (cols - c) * math.cos(direction) + (rows - c) * math.sin(direction) - offset
        canvas = canvas + rng.uniform(*cfg.edge_strength) * np.tanh(proj / cfg.edge_width)
    return canvas


def _view(scene: np.ndarray, rng: np.random.Generator, cfg: SyntheticConfig) -> np.ndarray:
    n = cfg.patch_size
    c_out = (n - 1) / 2.0
    c_in = (scene.shape[0] - 1) / 2.0
    angle = math.radians(rng.uniform(-cfg.jitter_rotation_deg, cfg.jitter_rotation_deg))
    scale = 1.0 + rng.uniform(-cfg.jitter_scale, cfg.jitter_scale)
    shift = rng.uniform(-cfg.jitter_shift, cfg.jitter_shift, 2)
    rows, cols = np.mgrid[:n, :n].astype(float)
    y, x = rows - c_out, cols - c_out
    ca, sa = math.cos(angle) * scale, math.sin(angle) * scale
    src = [sa * x + ca * y + c_in + shift[0], ca * x - sa * y + c_in + shift[1]]
    warped = ndimage.map_coordinates(scene, src, order=1, mode="reflect")
    gain = 1.0 + rng.uniform(-cfg.gain_jitter, cfg.gain_jitter)
    offset = rng.uniform(-cfg.offset_jitter, cfg.offset_jitter)
    img = 128.0 + offset + gain * cfg.contrast * warped + cfg.pixel_noise * rng.standard_normal((n, n))
    return np.clip(np.rint(img), 0, 255)


def generate_synthetic(cfg: SyntheticConfig = SyntheticConfig()) -> Dataset:
    """Build ``cfg.n_pairs`` corresponding and as many non-corresponding pairs.

    Scene i draws from ``SeedSequence(cfg.seed, spawn_key=(i,))``, so any
    prefix of scenes is reproducible on its own.
    """
    if cfg.n_pairs < 2:
        raise ValueError("need at least two scenes to form non-corresponding pairs")
    patches = {}
    width = len(str(cfg.n_pairs - 1))
    for i in range(cfg.n_pairs):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(i,)))
        scene = _scene(rng, cfg)
        patches[f"s{i:0{width}d}a"] = _view(scene, rng, cfg)
        patches[f"s{i:0{width}d}b"] = _view(scene, rng, cfg)
    pairs = []
    for i in range(cfg.n_pairs):
        j = (i + 1) % cfg.n_pairs
        pairs.append(PatchPair(f"s{i:0{width}d}a", f"s{i:0{width}d}b", True))
        pairs.append(PatchPair(f"s{i:0{width}d}a", f"s{j:0{width}d}b", False))
    return Dataset(patches, pairs, cfg.patch_size)
