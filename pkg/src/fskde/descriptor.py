"""FS-KDE descriptors: estimation from weighted angles and descriptor algebra.

A descriptor of order K stores the one-sided coefficients F_0..F_K of

    f(theta) = (1/N) sum_n w_n h(theta - theta_n) = sum_{|k|<=K} F_k e^{ik theta},

with F_{-k} = conj(F_k) implied.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .kernel import TWO_PI, Kernel, TruncationMask

_HEADER = struct.Struct("<ii")


@dataclass(frozen=True)
class AngleWeightSet:
    angles: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if angles.shape != weights.shape:
            raise ValueError(f"{angles.size} angles but {weights.size} weights")
        if not np.all(np.isfinite(angles)) or not np.all(np.isfinite(weights)):
            raise ValueError("angles and weights must be finite")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.angles.size

    def rotated(self, phi: float) -> "AngleWeightSet":
        return AngleWeightSet(self.angles + phi, self.weights)

    def concat(self, other: "AngleWeightSet") -> "AngleWeightSet":
        return AngleWeightSet(
            np.concatenate([self.angles, other.angles]),
            np.concatenate([self.weights, other.weights]),
        )


@dataclass(frozen=True)
class Descriptor:
    """One-sided Fourier coefficients F_0..F_K of an FS-KDE."""

    order: int
    coeffs: np.ndarray = field(repr=False)
    trunc: TruncationMask | None = None

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).ravel()
        if coeffs.size != self.order + 1:
            raise ValueError(f"order {self.order} needs {self.order + 1} coefficients, got {coeffs.size}")
        coeffs[0] = coeffs[0].real
        if self.trunc is not None:
            coeffs[~self.trunc.keep] = 0.0
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def cutoff(self) -> int:
        return self.order if self.trunc is None else self.trunc.cutoff

    @property
    def full_coeffs(self) -> np.ndarray:
        """F_k for k = -K..K."""
        return np.concatenate([np.conj(self.coeffs[:0:-1]), self.coeffs])

    @property
    def n_reals(self) -> int:
        """Real numbers needed to store the retained coefficients."""
        return 2 * (self.cutoff + 1)

    def __call__(self, theta):
        return evaluate(self, theta)

    def energy(self) -> float:
        """sum_{k=-K..K} |F_k|^2."""
        mag2 = np.abs(self.coeffs) ** 2
        return float(mag2[0] + 2.0 * mag2[1:].sum())

    def to_dict(self) -> dict:
        out = {
            "K": self.order,
            "cutoff": self.cutoff,
            "re": self.coeffs.real.tolist(),
            "im": self.coeffs.imag.tolist(),
        }
        if self.trunc is not None:
            out["epsilon"] = self.trunc.epsilon
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Descriptor":
        order = int(data["K"])
        cutoff = int(data.get("cutoff", order))
        coeffs = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        trunc = None
        if cutoff < order:
            trunc = TruncationMask(order, cutoff, float(data.get("epsilon", math.nan)))
        return cls(order, coeffs, trunc)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Descriptor":
        return cls.from_dict(json.loads(text))

    def to_bytes(self) -> bytes:
        """Little-endian int32 K, int32 cutoff, then interleaved (re, im) float64 pairs."""
        pairs = np.empty(2 * (self.order + 1), dtype="<f8")
        pairs[0::2] = self.coeffs.real
        pairs[1::2] = self.coeffs.imag
        return _HEADER.pack(self.order, self.cutoff) + pairs.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "Descriptor":
        if len(blob) < _HEADER.size:
            raise ValueError("descriptor blob shorter than its header")
        order, cutoff = _HEADER.unpack_from(blob)
        if order < 0 or not 0 <= cutoff <= order or len(blob) != _HEADER.size + 16 * (order + 1):
            raise ValueError(f"inconsistent descriptor blob: K={order}, cutoff={cutoff}, {len(blob)} bytes")
        pairs = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size, count=2 * (order + 1))
        trunc = TruncationMask(order, cutoff, math.nan) if cutoff < order else None
        return cls(order, pairs[0::2] + 1j * pairs[1::2], trunc)


def estimate(samples: AngleWeightSet, kernel: Kernel) -> Descriptor:
    """F_k = H_k / N * sum_n w_n e^{-ik theta_n}, k = 0..K.

    Weights are not normalized, so f integrates to mean(w) rather than one.
    """
    n = len(samples)
    if n == 0:
        raise ValueError("cannot estimate a descriptor from an empty sample set")
    k = np.arange(kernel.order + 1)
    phases = np.exp(-1j * np.multiply.outer(samples.angles, k))
    return Descriptor(kernel.order, kernel.coeffs * (samples.weights @ phases) / n)


def evaluate(d: Descriptor, theta):
    """f(theta) = F_0 + 2 sum_{k>=1} Re(F_k e^{ik theta})."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(1, d.order + 1)
    phases = np.exp(1j * np.multiply.outer(theta, k))
    # row-wise reduction, so f(theta) does not depend on how many angles are batched
    return d.coeffs[0].real + 2.0 * (phases * d.coeffs[1:]).real.sum(axis=-1)


def rotate(d: Descriptor, phi: float) -> Descriptor:
    """Rotate f by phi: F'_k = e^{-ik phi} F_k, so f'(theta) = f(theta - phi)."""
    k = np.arange(d.order + 1)
    return Descriptor(d.order, np.exp(-1j * k * phi) * d.coeffs, d.trunc)


def _padded(a: np.ndarray, size: int) -> np.ndarray:
    if a.size == size:
        return a
    out = np.zeros(size, dtype=complex)
    out[: a.size] = a
    return out


def coeff_distance(a: Descriptor, b: Descriptor) -> float:
    """Coefficient-space norm sqrt(sum_{k=-K..K} |F_k - G_k|^2), without the 2 pi."""
    size = max(a.order, b.order) + 1
    diff = np.abs(_padded(a.coeffs, size) - _padded(b.coeffs, size)) ** 2
    return math.sqrt(diff[0] + 2.0 * diff[1:].sum())


def distance(a: Descriptor, b: Descriptor) -> float:
    """L2 distance ||f - g|| between the angular functions via Parseval.

    Descriptors of different order are compared by zero-padding the shorter one.
    """
    return math.sqrt(TWO_PI) * coeff_distance(a, b)


def truncate(d: Descriptor, mask: TruncationMask) -> Descriptor:
    if mask.order != d.order:
        raise ValueError(f"mask order {mask.order} does not match descriptor order {d.order}")
    return Descriptor(d.order, d.coeffs, mask)
