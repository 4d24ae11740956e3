"""Monte-Carlo study of how stable F1 canonicalization is under noise.

Noise model: every sample, viewed as the complex number w_n e^{i theta_n}, gets
complex Gaussian noise with real and imaginary standard deviation
sigma / sqrt(N); the noisy weights are then rescaled to sum to N.

The expected canonicalization distance ||F~ - canon(F~)|| is bounded by

    E sqrt( sum_{|k|<=K} (2 B_k N sin(k/2 arctan(B_1 eps / (|F_1| + B_1 ups))))^2 ),

eps, ups ~ N(0, sigma^2), where B_k N = H_k.  All distances here are plain
coefficient norms sqrt(sum_{k=-K..K} |.|^2), with no 2 pi factor.

Random streams: the base set uses ``SeedSequence(seed, spawn_key=(0,))``;
trial t at sigma index i uses ``SeedSequence(seed, spawn_key=(1, i, t))``,
drawing 2N normals for the sample noise followed by 2 for the bound.  Results
therefore do not depend on the order in which trials run.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .descriptor import AngleWeightSet, Descriptor, coeff_distance, estimate, rotate
from .kernel import TWO_PI, Kernel, make_kernel
from .numfmt import fmt

ROTATION_GRID = 720
CSV_COLUMNS = ("sigma", "trial", "noise_dist", "canon_dist", "bound_sample")


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    n: int
    rng_seed: int = 0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"noise scale must be positive, got {self.sigma}")

    @property
    def sample_std(self) -> float:
        return self.sigma / math.sqrt(self.n)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


def bound_coefficients(kernel: Kernel, n: int) -> np.ndarray:
    """B_k = H_k / N for k = 0..K."""
    return kernel.coeffs / n


def normalize_set(samples: AngleWeightSet) -> AngleWeightSet:
    """Scale weights to sum to N and rotate so the weighted mean angle is zero.

    Sets whose weighted resultant vanishes have no mean angle and are only
    rescaled.
    """
    n = len(samples)
    total = samples.weights.sum()
    if total <= 0:
        raise ValueError("cannot normalize a set with zero total weight")
    weights = samples.weights * (n / total)
    resultant = np.sum(weights * np.exp(1j * samples.angles))
    mean = math.atan2(resultant.imag, resultant.real) if abs(resultant) > 1e-12 * n else 0.0
    return AngleWeightSet(samples.angles - mean, weights)


def _perturb_batch(z: np.ndarray, noise: np.ndarray):
    """Noisy complex samples -> (angles, rescaled weights), batched on axis 0."""
    zt = z + noise
    weights = np.abs(zt)
    alpha = z.shape[-1] / weights.sum(axis=-1, keepdims=True)
    return np.angle(zt), alpha * weights


def draw_noise(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    """N complex draws with independent N(0, sigma^2 / N) real and imaginary parts."""
    parts = rng.standard_normal((n, 2))
    return (sigma / math.sqrt(n)) * (parts[:, 0] + 1j * parts[:, 1])


def perturb(samples: AngleWeightSet, model: NoiseModel, rng: np.random.Generator | None = None) -> AngleWeightSet:
    """Noisy version of a set under ``model`` (normalizing the set first)."""
    base = normalize_set(samples)
    n = len(base)
    rng = model.rng() if rng is None else rng
    z = base.weights * np.exp(1j * base.angles)
    angles, weights = _perturb_batch(z, draw_noise(rng, n, model.sigma))
    return AngleWeightSet(angles, weights)


def bound_value(f1_mag, eps, ups, kernel: Kernel, n: int, quadrant: bool = False):
    """Bound integrand for given eps, ups draws (broadcasts over arrays).

    ``quadrant=False`` uses the principal arctan of the ratio; ``True`` uses the
    true argument atan2, which differs by pi when the denominator is negative.
    """
    b = bound_coefficients(kernel, n)
    num = b[1] * np.asarray(eps, dtype=float) if kernel.order >= 1 else np.zeros_like(eps, dtype=float)
    den = f1_mag + (b[1] * np.asarray(ups, dtype=float) if kernel.order >= 1 else 0.0)
    if quadrant:
        angle = np.arctan2(num, den)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            angle = np.arctan(num / den)
        angle = np.where(num == 0, 0.0, angle)
    k = np.arange(1, kernel.order + 1)
    terms = (2.0 * b[1:] * n * np.sin(0.5 * np.multiply.outer(angle, k))) ** 2
    # k and -k contribute equally; k = 0 contributes sin(0) = 0
    return np.sqrt(2.0 * terms.sum(axis=-1))


def bound_sample(f1_mag: float, sigma: float, order: int | Kernel, n: int, rng: np.random.Generator) -> float:
    """One Monte-Carlo draw of the bound integrand."""
    if f1_mag < 0:
        raise ValueError("|F_1| must be nonnegative")
    if not sigma > 0:
        raise ValueError(f"noise scale must be positive, got {sigma}")
    kernel = order if isinstance(order, Kernel) else make_kernel(order)
    eps, ups = sigma * rng.standard_normal(2)
    return float(bound_value(f1_mag, eps, ups, kernel, n))


def make_base_set(kind: str, n: int, rng: np.random.Generator) -> AngleWeightSet:
    """Base distributions for the simulation.

    ``random``: uniform angles weighted by 1 + cos(theta), a cardioid-shaped
    distribution whose F_1 dominates.  ``symmetric``: angles in antipodal pairs
    (theta, theta + pi) with shared weights, so every odd coefficient, F_1
    included, vanishes.
    """
    if kind == "random":
        angles = rng.uniform(-math.pi, math.pi, n)
        weights = 1.0 + np.cos(angles) + 1e-3
    elif kind == "symmetric":
        if n % 2:
            raise ValueError("symmetric base sets need an even sample count")
        half = rng.uniform(-math.pi, math.pi, n // 2)
        w = rng.uniform(0.5, 1.5, n // 2)
        angles = np.concatenate([half, half + math.pi])
        weights = np.concatenate([w, w])
    else:
        raise ValueError(f"unknown base set kind {kind!r}")
    return AngleWeightSet(angles, weights)


def _batch_coeffs(angles: np.ndarray, weights: np.ndarray, kernel: Kernel) -> np.ndarray:
    """estimate() for a (T, N) batch of sets, via powers of e^{-i theta}."""
    n = angles.shape[-1]
    u = np.exp(-1j * angles)
    term = weights.astype(complex)
    out = np.empty(angles.shape[:-1] + (kernel.order + 1,), dtype=complex)
    for k in range(kernel.order + 1):
        out[..., k] = kernel.coeffs[k] * term.sum(axis=-1) / n
        term = term * u
    out[..., 0] = out[..., 0].real
    return out


def _coeff_norm(diff: np.ndarray) -> np.ndarray:
    mag2 = np.abs(diff) ** 2
    return np.sqrt(mag2[..., 0] + 2.0 * mag2[..., 1:].sum(axis=-1))


def _canonical_shift(coeffs: np.ndarray) -> np.ndarray:
    """F1 canonicalization of a batch; rows with |F_1| ~ 0 are left alone."""
    k = np.arange(coeffs.shape[-1])
    f1 = coeffs[..., 1]
    a = np.where(np.abs(f1) > 1e-12 * (np.abs(coeffs[..., 0]) + np.finfo(float).tiny), np.angle(f1), 0.0)
    return coeffs * np.exp(-1j * np.multiply.outer(a, k))


def _trial_draws(seed: int, sigma_index: int, trial: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, sigma_index, trial)))
    return rng.standard_normal(2 * n + 2)


@dataclass
class SigmaSummary:
    sigma: float
    noise_mean: float
    noise_se: float
    canon_mean: float
    canon_se: float
    bound_mean: float
    bound_se: float
    bound_quadrant_mean: float
    bound_quadrant_se: float

    @property
    def pooled_se(self) -> float:
        return math.hypot(self.canon_se, self.bound_se)

    @property
    def bound_holds(self) -> bool:
        return self.canon_mean <= self.bound_mean + 3.0 * self.pooled_se


@dataclass
class SimulationReport:
    order: int
    n: int
    base_kind: str
    f1_mag: float
    sigmas: np.ndarray
    trials: int
    noise_dist: np.ndarray  # (n_sigma, trials)
    canon_dist: np.ndarray
    bound: np.ndarray
    bound_quadrant: np.ndarray
    rotation_phi: np.ndarray
    rotation_dist: np.ndarray
    summaries: list[SigmaSummary] = field(default_factory=list)

    def records(self):
        for i, sigma in enumerate(self.sigmas):
            for t in range(self.trials):
                yield sigma, t, self.noise_dist[i, t], self.canon_dist[i, t], self.bound[i, t]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for sigma, t, nd, cd, b in self.records():
            writer.writerow([fmt(sigma), t, fmt(nd), fmt(cd), fmt(b)])
        return buf.getvalue()

    def summary_dict(self) -> dict:
        return {
            "K": self.order,
            "N": self.n,
            "base": self.base_kind,
            "f1_mag": self.f1_mag,
            "trials": self.trials,
            "rotation_dist_mean": float(self.rotation_dist.mean()),
            "rotation_dist_max": float(self.rotation_dist.max()),
            "sigmas": [vars(s) | {"pooled_se": s.pooled_se, "bound_holds": s.bound_holds} for s in self.summaries],
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary_dict(), indent=2)

    def rotation_csv(self) -> str:
        lines = ["phi,rotation_dist"]
        lines += [f"{fmt(p)},{fmt(d)}" for p, d in zip(self.rotation_phi, self.rotation_dist)]
        return "\n".join(lines) + "\n"


def _mean_se(x: np.ndarray):
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def simulate_stability(base: AngleWeightSet, kernel: Kernel, sigmas, trials: int, rng_seed: int,
                       base_kind: str = "custom") -> SimulationReport:
    """Noise distance, canonicalization distance and bound draws for each sigma.

    A sigma of zero leaves the set unperturbed.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    sigmas = np.asarray(sigmas, dtype=float)
    if np.any(sigmas < 0):
        raise ValueError("noise scales must be nonnegative")
    base = normalize_set(base)
    n = len(base)
    ref = estimate(base, kernel)
    f1_mag = float(abs(ref.coeffs[1])) if kernel.order >= 1 else 0.0
    z = base.weights * np.exp(1j * base.angles)

    shape = (sigmas.size, trials)
    noise_dist, canon_dist = np.empty(shape), np.empty(shape)
    bound, bound_q = np.empty(shape), np.empty(shape)
    summaries = []
    for i, sigma in enumerate(sigmas):
        draws = np.stack([_trial_draws(rng_seed, i, t, n) for t in range(trials)])
        if sigma > 0:
            noise = (sigma / math.sqrt(n)) * (draws[:, 0:2 * n:2] + 1j * draws[:, 1:2 * n:2])
            angles, weights = _perturb_batch(z, noise)
        else:
            angles = np.broadcast_to(base.angles, (trials, n))
            weights = np.broadcast_to(base.weights, (trials, n))
        noisy = _batch_coeffs(angles, weights, kernel)
        noise_dist[i] = _coeff_norm(noisy - ref.coeffs)
        canon_dist[i] = _coeff_norm(noisy - _canonical_shift(noisy))
        eps, ups = sigma * draws[:, 2 * n], sigma * draws[:, 2 * n + 1]
        bound[i] = bound_value(f1_mag, eps, ups, kernel, n)
        bound_q[i] = bound_value(f1_mag, eps, ups, kernel, n, quadrant=True)
        summaries.append(SigmaSummary(float(sigma), *_mean_se(noise_dist[i]), *_mean_se(canon_dist[i]),
                                      *_mean_se(bound[i]), *_mean_se(bound_q[i])))

    phi = np.arange(ROTATION_GRID) * (TWO_PI / ROTATION_GRID)
    k = np.arange(kernel.order + 1)
    rotated = np.exp(-1j * np.multiply.outer(phi, k)) * ref.coeffs
    rotation_dist = _coeff_norm(rotated - ref.coeffs)

    return SimulationReport(kernel.order, n, base_kind, f1_mag, sigmas, trials, noise_dist, canon_dist,
                            bound, bound_q, phi, rotation_dist, summaries)


def rotation_distance(d: Descriptor, phi: float) -> float:
    """||F - rotate(F, phi)|| in coefficient norm."""
    return coeff_distance(d, rotate(d, phi))
