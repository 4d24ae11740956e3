"""The bandlimited cos^2K angular kernel and its Fourier series coefficients.

The kernel of order K is ``h(theta) = C_K cos^{2K}(theta / 2)``.  Expanding the
power with the binomial theorem shows it has exactly 2K + 1 nonzero Fourier
series coefficients

    H_k = C_K binom(2K, K + k) / 2^{2K},     |k| <= K,

with ``C_K = 2^{2K-1} / (binom(2K, K) pi)`` chosen so that h integrates to one.
For large K the binomials are replaced by their normal approximation, giving
``H_k = exp(-k^2 / K) / (2 pi)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

TWO_PI = 2.0 * math.pi

#: Orders with ``2K >= APPROX_SWITCH`` use the normal approximation by default.
APPROX_SWITCH = 80


class KernelMode(str, enum.Enum):
    EXACT = "exact"
    APPROX = "approx"


def wrap_angle(theta):
    """Reduce angles to [-pi, pi)."""
    theta = np.asarray(theta, dtype=float)
    return theta - TWO_PI * np.floor((theta + math.pi) / TWO_PI)


def log_norm_const(order: int) -> float:
    """log C_K, evaluated through log-gamma so it never overflows."""
    log_binom = gammaln(2 * order + 1) - 2.0 * gammaln(order + 1)
    return (2 * order - 1) * math.log(2.0) - log_binom - math.log(math.pi)


def exact_coeffs(order: int) -> np.ndarray:
    """H_0..H_K of the cos^2K kernel.

    Uses the ratio ``H_{k+1} / H_k = (K - k) / (K + k + 1)`` starting from
    ``H_0 = 1 / (2 pi)``, so no factorial is ever formed.
    """
    coeffs = np.empty(order + 1)
    coeffs[0] = 1.0 / TWO_PI
    for k in range(order):
        coeffs[k + 1] = coeffs[k] * (order - k) / (order + k + 1)
    return coeffs


def approx_coeffs(order: int) -> np.ndarray:
    k = np.arange(order + 1, dtype=float)
    if order == 0:
        return np.array([1.0 / TWO_PI])
    return np.exp(-k * k / order) / TWO_PI


@dataclass(frozen=True)
class Kernel:
    """cos^2K kernel of a given order.

    ``coeffs[k]`` holds H_k for k = 0..K; H_{-k} = H_k is implied.
    """

    order: int
    coeffs: np.ndarray = field(repr=False)
    norm_const: float
    mode: KernelMode

    @property
    def full_coeffs(self) -> np.ndarray:
        """H_k for k = -K..K."""
        return np.concatenate([self.coeffs[:0:-1], self.coeffs])

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    def __call__(self, theta):
        return kernel_eval(self, theta)


def default_mode(order: int) -> KernelMode:
    return KernelMode.APPROX if 2 * order >= APPROX_SWITCH else KernelMode.EXACT


def make_kernel(order: int, mode: KernelMode | str | None = None) -> Kernel:
    """Build the order-K kernel.

    ``mode=None`` picks the normal approximation once ``2K >= 80`` and the
    exact binomial coefficients below that.
    """
    if isinstance(order, bool) or int(order) != order:
        raise ValueError(f"kernel order must be an integer, got {order!r}")
    order = int(order)
    if order < 0:
        raise ValueError(f"kernel order must be >= 0, got {order}")
    mode = default_mode(order) if mode is None else KernelMode(mode)
    coeffs = exact_coeffs(order) if mode is KernelMode.EXACT else approx_coeffs(order)
    coeffs.setflags(write=False)
    return Kernel(order, coeffs, math.exp(log_norm_const(order)), mode)


def synthesize(full_coeffs: np.ndarray, theta) -> np.ndarray:
    """Complex Fourier synthesis ``sum_k c_k e^{ik theta}`` over k = -K..K."""
    full_coeffs = np.asarray(full_coeffs)
    order = (len(full_coeffs) - 1) // 2
    theta = np.asarray(theta, dtype=float)
    k = np.arange(-order, order + 1)
    phases = np.exp(1j * np.multiply.outer(theta, k))
    return phases @ full_coeffs


def kernel_eval(kernel: Kernel, theta):
    """Evaluate h(theta).

    Exact kernels use the closed form; approximate kernels have no closed form
    and are synthesized from their coefficients.
    """
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("kernel_eval requires finite angles")
    theta = wrap_angle(theta)
    if kernel.mode is KernelMode.EXACT:
        return kernel.norm_const * np.cos(theta / 2.0) ** (2 * kernel.order)
    values = synthesize(kernel.full_coeffs, theta)
    assert np.max(np.abs(values.imag), initial=0.0) < 1e-12
    return values.real


@dataclass(frozen=True)
class TruncationMask:
    """Keeps |k| <= cutoff, the coefficients with exp(-k^2/K) >= epsilon."""

    order: int
    cutoff: int
    epsilon: float

    @property
    def retained(self) -> int:
        """Number of stored one-sided coefficients that survive."""
        return self.cutoff + 1

    @property
    def keep(self) -> np.ndarray:
        return np.arange(self.order + 1) <= self.cutoff


def truncation_mask(order: int, epsilon: float) -> TruncationMask:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if order < 0:
        raise ValueError(f"kernel order must be >= 0, got {order}")
    if order == 0:
        return TruncationMask(0, 0, epsilon)
    cutoff = int(math.floor(math.sqrt(order * math.log(1.0 / epsilon))))
    # guard the floor against rounding at exact squares
    while cutoff > 0 and math.exp(-cutoff * cutoff / order) < epsilon:
        cutoff -= 1
    while math.exp(-(cutoff + 1) ** 2 / order) >= epsilon:
        cutoff += 1
    return TruncationMask(order, min(cutoff, order), epsilon)


def derivative_coeffs(kernel: Kernel, n: int) -> np.ndarray:
    """Coefficients (ik)^n H_k of the n-th derivative, for k = -K..K."""
    if n < 0:
        raise ValueError(f"derivative order must be >= 0, got {n}")
    k = kernel.frequencies
    return (1j * k) ** n * kernel.full_coeffs
