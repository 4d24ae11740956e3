"""Rotation canonicalization of FS-KDE descriptors.

F1 canonicalization rotates a descriptor so that F_1 becomes real and
positive.  Fk canonicalization continues recursively: at level j the
descriptor is rotated by the principal value arg(F_j)/j of its current
j-th coefficient, the smallest rotation that makes F_j real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .descriptor import Descriptor, distance, rotate
from .kernel import TWO_PI

TINY = np.finfo(float).tiny
ZERO_REL = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def zero_threshold(d: Descriptor) -> float:
    """Coefficient magnitude at or below which a phase is treated as undefined."""
    return ZERO_REL * (abs(d.coeffs[0]) + TINY)


def principal_angle(z: complex) -> float:
    """arg(z) in (-pi, pi]."""
    a = math.atan2(z.imag, z.real)
    return a + TWO_PI if a <= -math.pi else a


@dataclass(frozen=True)
class CanonicalDescriptor:
    base: Descriptor
    level: int
    applied_rotation: float
    degenerate_levels: tuple[int, ...] = ()

    @property
    def degenerate(self) -> bool:
        """True when the final level's rotation had to be skipped."""
        return self.level in self.degenerate_levels

    @property
    def coeffs(self) -> np.ndarray:
        return self.base.coeffs


def _step_rotations(d: Descriptor, level: int):
    """Yield (j, phi_j or None, rotated descriptor) for j = 1..level."""
    eps = zero_threshold(d)
    current = d
    for j in range(1, level + 1):
        f = current.coeffs[j] if j <= d.order else 0.0
        if abs(f) <= eps:
            yield j, None, current
            continue
        phi = principal_angle(f) / j
        current = rotate(current, phi)
        yield j, phi, current


def canonicalize_fk(d: Descriptor, level: int) -> CanonicalDescriptor:
    """Level-``level`` recursive canonicalization.

    Levels whose coefficient is numerically zero keep the previous rotation
    and are listed in ``degenerate_levels``.
    """
    if not 1 <= level <= max(d.order, 1):
        raise ValueError(f"canonicalization level must lie in [1, {d.order}], got {level}")
    total = 0.0
    skipped = []
    current = d
    for j, phi, current in _step_rotations(d, level):
        if phi is None:
            skipped.append(j)
        else:
            total += phi
    return CanonicalDescriptor(current, level, total, tuple(skipped))


def canonicalize_f1(d: Descriptor) -> CanonicalDescriptor:
    """Rotate so F_1 is real and nonnegative: F~_k = e^{-ik arg F_1} F_k."""
    return canonicalize_fk(d, 1)


def canonical_levels(d: Descriptor, max_level: int | None = None) -> list[CanonicalDescriptor]:
    """Canonical forms for every level 1..max_level in one recursive pass."""
    max_level = d.order if max_level is None else max_level
    out = []
    total = 0.0
    skipped: list[int] = []
    for j, phi, current in _step_rotations(d, max_level):
        if phi is None:
            skipped.append(j)
        else:
            total += phi
        out.append(CanonicalDescriptor(current, j, total, tuple(skipped)))
    return out


def canonical_distance_fk(a: Descriptor, b: Descriptor) -> float:
    """min over levels 1..K of the distance between level-l canonical forms.

    Levels that are degenerate in either descriptor are skipped; if every
    level is degenerate the plain distance is returned.
    """
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} vs {b.order}")
    best = math.inf
    for ca, cb in zip(canonical_levels(a), canonical_levels(b)):
        if ca.degenerate or cb.degenerate:
            continue
        best = min(best, distance(ca.base, cb.base))
    return distance(a, b) if best == math.inf else best


def canonical_distance_f1(a: Descriptor, b: Descriptor) -> float:
    return distance(canonicalize_f1(a).base, canonicalize_f1(b).base)


def _golden_section(fun, lo: float, hi: float, tol: float):
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = fun(d)
    x = 0.5 * (lo + hi)
    return x, fun(x)


def min_distance_search(a: Descriptor, b: Descriptor, grid_size: int = 256, tol: float = 1e-10):
    """Brute-force rotation alignment: min over phi of ||rotate(a, phi) - b||.

    Scans a uniform phi grid, then refines the best cell by golden-section
    search.  Returns ``(distance, phi)`` with phi in [0, 2 pi); phi is the
    rotation that carries ``a`` onto ``b``.
    """
    if grid_size < 8:
        raise ValueError(f"grid_size must be >= 8, got {grid_size}")
    size = max(a.order, b.order) + 1
    fa = np.zeros(size, dtype=complex)
    fb = np.zeros(size, dtype=complex)
    fa[: a.order + 1] = a.coeffs
    fb[: b.order + 1] = b.coeffs
    k = np.arange(size)
    weights = np.full(size, 2.0)
    weights[0] = 1.0

    def dist(phis):
        phis = np.atleast_1d(phis)
        diff = np.exp(-1j * np.multiply.outer(phis, k)) * fa - fb
        return np.sqrt(TWO_PI * (np.abs(diff) ** 2 @ weights))

    step = TWO_PI / grid_size
    grid = np.arange(grid_size) * step
    values = dist(grid)
    i = int(np.argmin(values))
    phi, best = _golden_section(lambda p: float(dist(p)[0]), grid[i] - step, grid[i] + step, tol)
    if values[i] < best:
        phi, best = grid[i], values[i]
    return float(best), float(phi % TWO_PI)


def canonical_levels_batch(coeffs: np.ndarray, max_level: int):
    """Vectorized ``canonical_levels`` over a (P, K + 1) stack of coefficients.

    Returns ``(forms, degenerate)`` of shapes (P, L, K + 1) and (P, L), where
    L = max_level and ``degenerate[p, l]`` marks a skipped rotation at level l + 1.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    p, size = coeffs.shape
    k = np.arange(size)
    eps = ZERO_REL * (np.abs(coeffs[:, 0]) + TINY)
    forms = np.empty((p, max_level, size), dtype=complex)
    degenerate = np.zeros((p, max_level), dtype=bool)
    current = coeffs.copy()
    for j in range(1, max_level + 1):
        f = current[:, j] if j < size else np.zeros(p, dtype=complex)
        skip = np.abs(f) <= eps
        a = np.arctan2(f.imag, f.real)
        a = np.where(a <= -math.pi, a + TWO_PI, a)
        phi = np.where(skip, 0.0, a / j)
        current = current * np.exp(-1j * np.multiply.outer(phi, k))
        forms[:, j - 1] = current
        degenerate[:, j - 1] = skip
    return forms, degenerate
