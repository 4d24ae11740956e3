"""Descriptor extraction, pairwise distances and AUC for each benchmark method."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..canonical import canonical_levels_batch
from ..image_field import circular_mask, gradient_field
from ..kernel import TWO_PI, make_kernel, truncation_mask
from ..numfmt import fmt
from .dataset import Dataset
from .descriptors import canonical_hist_batch, hist_from_samples
from .roc import roc_auc

METHODS = ("intensity", "hist", "hist_canon", "fskde", "fskde_f1", "fskde_fk")
DEFAULT_EPSILON = 1e-5
REPORT_COLUMNS = ("method", "size_param", "auc", "n_pos", "n_neg")
_CHUNK = 256


def rotate_patch(patch: np.ndarray, angle: float) -> np.ndarray:
    """Rotate counter-clockwise (as displayed) about the patch center, bilinear."""
    h, w = patch.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    rows, cols = np.mgrid[:h, :w].astype(float)
    y, x = rows - cy, cols - cx
    c, s = math.cos(angle), math.sin(angle)
    # inverse map: output pixel samples the source at R(-angle) applied in display coordinates
    src_x = c * x - s * y
    src_y = s * x + c * y
    return ndimage.map_coordinates(patch, [src_y + cy, src_x + cx], order=1, mode="nearest")


def fskde_order_for_budget(budget: int, epsilon: float = DEFAULT_EPSILON):
    """Largest order K whose truncated descriptor stores exactly ``budget`` reals."""
    if budget < 2 or budget % 2:
        raise ValueError(f"FS-KDE descriptor budgets are even and >= 2, got {budget}")
    cutoff = budget // 2 - 1
    best = None
    for order in range(cutoff, 4 * (cutoff + 2) ** 2):
        if truncation_mask(order, epsilon).cutoff == cutoff:
            best = order
        elif best is not None:
            break
    if best is None:
        raise ValueError(f"no kernel order yields a {budget}-real descriptor at epsilon={epsilon}")
    return best


@dataclass
class PreparedPatches:
    """Masked gradient samples of every patch, stacked as (P, M) arrays."""

    ids: list[str]
    index: dict[str, int]
    intensities: np.ndarray
    angles: np.ndarray
    weights: np.ndarray
    rotations: np.ndarray | None
    mask_diameter: float
    cache: dict = field(default_factory=dict, repr=False)


def default_mask_diameter(patch_size: int) -> float:
    """60 pixels for the usual 64-pixel patches; scales with patch size."""
    return patch_size * 60.0 / 64.0


def prepare_patches(dataset: Dataset, rotate: bool = False, seed: int = 0,
                    mask_diameter: float | None = None, operator: str = "central") -> PreparedPatches:
    """Optionally rotate every patch, then collect masked gradients.

    Patch i (in sorted id order) is rotated by an angle drawn uniformly from
    [0, 2 pi) using ``SeedSequence(seed, spawn_key=(i,))``.
    """
    ids = sorted(dataset.patches)
    if not ids:
        raise ValueError("dataset has no patches")
    shape = dataset.patches[ids[0]].shape
    if mask_diameter is None:
        mask_diameter = default_mask_diameter(shape[0])
    mask = circular_mask(shape, mask_diameter)
    m = int(mask.sum())
    intensities = np.empty((len(ids), m))
    angles = np.empty((len(ids), m))
    weights = np.empty((len(ids), m))
    rotations = np.empty(len(ids)) if rotate else None
    for i, pid in enumerate(ids):
        patch = dataset.patches[pid]
        if patch.shape != shape:
            raise ValueError(f"patch {pid} has shape {patch.shape}, expected {shape}")
        if rotate:
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
            rotations[i] = rng.uniform(0.0, TWO_PI)
            patch = rotate_patch(patch, rotations[i])
        grad = gradient_field(patch, operator)
        intensities[i] = patch[mask]
        angles[i] = grad.angles[mask]
        weights[i] = grad.weights[mask]
    return PreparedPatches(ids, {pid: i for i, pid in enumerate(ids)}, intensities, angles, weights,
                           rotations, mask_diameter)


def fskde_coeffs(prepared: PreparedPatches, order: int, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Truncated FS-KDE coefficients (P, K + 1) of every prepared patch."""
    kernel = make_kernel(order)
    key = (order, epsilon)
    if key in prepared.cache:
        return prepared.cache[key]
    p, m = prepared.angles.shape
    out = np.zeros((p, order + 1), dtype=complex)
    for start in range(0, p, _CHUNK):
        sl = slice(start, start + _CHUNK)
        u = np.exp(-1j * prepared.angles[sl])
        term = prepared.weights[sl].astype(complex)
        for k in range(truncation_mask(order, epsilon).cutoff + 1):
            out[sl, k] = kernel.coeffs[k] * term.sum(axis=1) / m
            term *= u
    out[:, 0] = out[:, 0].real
    prepared.cache[key] = out
    return out


def _parseval(diff: np.ndarray) -> np.ndarray:
    mag2 = np.abs(diff) ** 2
    return np.sqrt(TWO_PI * (mag2[..., 0] + 2.0 * mag2[..., 1:].sum(axis=-1)))


def _euclid(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sqrt(((a - b) ** 2).sum(axis=-1))


@dataclass
class BenchmarkReport:
    method: str
    size_param: int
    auc: float
    n_pos: int
    n_neg: int
    descriptor_length: int
    order: int | None
    pairs: list
    distances: np.ndarray

    def row(self):
        return [self.method, self.size_param, fmt(self.auc), self.n_pos, self.n_neg]

    def dump_distances(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id_a", "id_b", "label", "distance"])
        for p, d in zip(self.pairs, self.distances.tolist()):
            writer.writerow([p.id_a, p.id_b, int(p.corresponding), fmt(d)])
        return buf.getvalue()


def reports_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


def pair_distances(prepared: PreparedPatches, pairs, method: str, size_param: int,
                   epsilon: float = DEFAULT_EPSILON):
    """Distances for each pair; returns (distances, descriptor length, order)."""
    ia = np.array([prepared.index[p.id_a] for p in pairs], dtype=int)
    ib = np.array([prepared.index[p.id_b] for p in pairs], dtype=int)
    if method == "intensity":
        d = prepared.intensities
        return _euclid(d[ia], d[ib]), d.shape[1], None
    if method in ("hist", "hist_canon"):
        if size_param < 2:
            raise ValueError(f"need at least 2 histogram bins, got {size_param}")
        hists = np.stack([hist_from_samples(a, w, size_param) for a, w in zip(prepared.angles, prepared.weights)])
        if method == "hist_canon":
            hists = canonical_hist_batch(hists)
        return _euclid(hists[ia], hists[ib]), size_param, None
    if method in ("fskde", "fskde_f1", "fskde_fk"):
        order = fskde_order_for_budget(size_param, epsilon)
        coeffs = fskde_coeffs(prepared, order, epsilon)
        if method == "fskde":
            return _parseval(coeffs[ia] - coeffs[ib]), size_param, order
        if method == "fskde_f1":
            forms, _ = canonical_levels_batch(coeffs, 1)
            return _parseval(forms[ia, 0] - forms[ib, 0]), size_param, order
        forms, degenerate = canonical_levels_batch(coeffs, max(order, 1))
        per_level = _parseval(forms[ia] - forms[ib])
        per_level[degenerate[ia] | degenerate[ib]] = np.inf
        best = per_level.min(axis=1)
        plain = _parseval(coeffs[ia] - coeffs[ib])
        return np.where(np.isinf(best), plain, best), size_param, order
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def run_benchmark(dataset: Dataset, method: str, size_param: int, *, rotate: bool = False, seed: int = 0,
                  epsilon: float = DEFAULT_EPSILON, mask_diameter: float | None = None,
                  operator: str = "central", prepared: PreparedPatches | None = None) -> BenchmarkReport:
    """AUC of ``method`` on the labelled pairs of ``dataset``.

    ``prepared`` lets several methods share one gradient/rotation pass; it must
    have been built from the same dataset with the same rotate/seed settings.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if prepared is None:
        prepared = prepare_patches(dataset, rotate, seed, mask_diameter, operator)
    pairs = dataset.pairs
    dist, length, order = pair_distances(prepared, pairs, method, size_param, epsilon)
    labels = np.array([p.corresponding for p in pairs], dtype=bool)
    auc = roc_auc(dist[labels], dist[~labels])
    return BenchmarkReport(method, size_param, auc, int(labels.sum()), int((~labels).sum()), length, order,
                           list(pairs), dist)
