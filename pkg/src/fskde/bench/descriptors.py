"""Baseline patch descriptors: masked intensities and gradient histograms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..image_field import circular_mask, masked_samples
from ..kernel import TWO_PI


@dataclass(frozen=True)
class HistogramDescriptor:
    """Bin b covers [-pi + 2 pi b / B, -pi + 2 pi (b + 1) / B)."""

    bins: np.ndarray

    def __len__(self):
        return self.bins.size


def angle_bins(angles, n_bins: int) -> np.ndarray:
    idx = np.floor((np.asarray(angles) + math.pi) * (n_bins / TWO_PI)).astype(int)
    return np.clip(idx, 0, n_bins - 1)


def hist_from_samples(angles, weights, n_bins: int) -> np.ndarray:
    return np.bincount(angle_bins(angles, n_bins), weights=weights, minlength=n_bins)


def hist_descriptor(patch, bins: int, mask_diameter: float, operator: str = "central") -> HistogramDescriptor:
    """Hard-binned histogram of masked gradient angles, weighted by magnitude."""
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    samples = masked_samples(patch, mask_diameter, operator)
    return HistogramDescriptor(hist_from_samples(samples.angles, samples.weights, bins))


def canonical_hist(h: HistogramDescriptor) -> HistogramDescriptor:
    """Circularly shift so the largest bin comes first (first maximum wins ties)."""
    return HistogramDescriptor(np.roll(h.bins, -int(np.argmax(h.bins))))


def canonical_hist_batch(hists: np.ndarray) -> np.ndarray:
    shifts = np.argmax(hists, axis=1)
    idx = (np.arange(hists.shape[1]) + shifts[:, None]) % hists.shape[1]
    return np.take_along_axis(hists, idx, axis=1)


def intensity_descriptor(patch, mask_diameter: float) -> np.ndarray:
    patch = np.asarray(patch, dtype=float)
    return patch[circular_mask(patch.shape, mask_diameter)]
