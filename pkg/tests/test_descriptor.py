import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_descriptor, random_set
from fskde.descriptor import AngleWeightSet, Descriptor, distance, estimate, evaluate, rotate, truncate
from fskde.kernel import kernel_eval, make_kernel, truncation_mask

GRID = np.linspace(-math.pi, math.pi, 1000)


def brute_force_kde(samples, kernel, theta):
    """(1/N) sum_n w_n h(theta - theta_n), straight from the kernel."""
    total = np.zeros_like(theta)
    for a, w in zip(samples.angles, samples.weights):
        total += w * kernel_eval(kernel, theta - a)
    return total / len(samples)


def two_sided(d, theta):
    k = np.arange(-d.order, d.order + 1)
    return np.exp(1j * np.outer(theta, k)) @ d.full_coeffs


def test_single_sample_gives_kernel_coeffs():
    for order in (0, 1, 7, 50):
        kernel = make_kernel(order)
        d = estimate(AngleWeightSet([0.0], [1.0]), kernel)
        np.testing.assert_allclose(d.coeffs, kernel.coeffs, rtol=1e-15)


def test_antipodal_pair_cancels_first_coefficient():
    d = estimate(AngleWeightSet([0.0, math.pi], [1.0, 1.0]), make_kernel(1, "exact"))
    assert d.coeffs[0] == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert abs(d.coeffs[1]) < 1e-17


def test_empty_set_rejected():
    with pytest.raises(ValueError):
        estimate(AngleWeightSet([], []), make_kernel(3))


@pytest.mark.parametrize("angles,weights", [([0.0, 1.0], [1.0]), ([0.0], [-1.0]), ([np.inf], [1.0])])
def test_angle_weight_set_validation(angles, weights):
    with pytest.raises(ValueError):
        AngleWeightSet(angles, weights)


@pytest.mark.parametrize("order", [1, 4, 16, 45])
def test_estimate_matches_angular_domain_kde(rng, order):
    kernel = make_kernel(order)
    for _ in range(5):
        s = random_set(rng)
        np.testing.assert_allclose(evaluate(estimate(s, kernel), GRID), brute_force_kde(s, kernel, GRID), atol=1e-9)


def test_uniform_angles_give_flat_density():
    n = 64
    s = AngleWeightSet(-math.pi + 2 * math.pi * np.arange(n) / n, np.full(n, 3.0))
    d = estimate(s, make_kernel(10))
    np.testing.assert_allclose(evaluate(d, GRID), 3.0 / (2 * math.pi), atol=1e-14)


def test_single_sample_evaluates_to_kernel_peak():
    kernel = make_kernel(6)
    d = estimate(AngleWeightSet([0.0], [1.0]), kernel)
    assert evaluate(d, 0.0) == pytest.approx(float(kernel_eval(kernel, 0.0)), rel=1e-14)


def test_real_synthesis_matches_two_sided(rng):
    for _ in range(20):
        d = random_descriptor(rng, order=int(rng.integers(1, 30)))
        full = two_sided(d, GRID)
        assert np.abs(full.imag).max() < 1e-12
        np.testing.assert_allclose(evaluate(d, GRID), full.real, atol=1e-12)


def test_rotate_identity_and_inverse(rng):
    d = random_descriptor(rng)
    np.testing.assert_array_equal(rotate(d, 0.0).coeffs, d.coeffs)
    back = rotate(rotate(d, 0.83), -0.83)
    np.testing.assert_allclose(back.coeffs, d.coeffs, atol=1e-12)


def test_rotation_equivariance(rng):
    for _ in range(100):
        s = random_set(rng)
        kernel = make_kernel(int(rng.integers(1, 20)))
        phi = rng.uniform(-math.pi, math.pi)
        lhs = rotate(estimate(s, kernel), phi).coeffs
        rhs = estimate(s.rotated(phi), kernel).coeffs
        assert np.abs(lhs - rhs).max() < 1e-12


def test_rotation_shifts_density(rng):
    d = random_descriptor(rng)
    np.testing.assert_allclose(evaluate(rotate(d, 1.1), GRID), evaluate(d, GRID - 1.1), atol=1e-12)


def quadrature_l2(a, b, m=4096):
    theta = -math.pi + 2 * math.pi * np.arange(m) / m
    diff = evaluate(a, theta) - evaluate(b, theta)
    return (diff ** 2).mean() * 2 * math.pi


def test_distance_matches_quadrature(rng):
    for _ in range(50):
        order = int(rng.integers(1, 40))
        a, b = random_descriptor(rng, order), random_descriptor(rng, order)
        assert distance(a, b) ** 2 == pytest.approx(quadrature_l2(a, b), rel=1e-6)


def test_distance_to_self_and_rotated(rng):
    d = random_descriptor(rng)
    assert distance(d, d) == 0.0
    assert distance(d, rotate(d, math.pi)) > 0


def test_cross_order_distance_zero_pads(rng):
    s = random_set(rng)
    low, high = estimate(s, make_kernel(3)), random_descriptor(rng, order=6)
    padded = Descriptor(6, np.concatenate([low.coeffs, np.zeros(3)]))
    assert distance(low, high) == pytest.approx(distance(padded, high), rel=1e-15)
    assert distance(low, high) ** 2 == pytest.approx(quadrature_l2(low, high), rel=1e-6)


def test_truncate_identity_when_cutoff_is_order(rng):
    d = random_descriptor(rng, order=4)
    mask = truncation_mask(4, 1e-5)
    assert mask.cutoff == 4
    np.testing.assert_array_equal(truncate(d, mask).coeffs, d.coeffs)


def test_truncate_k64(rng):
    d = random_descriptor(rng, order=64)
    t = truncate(d, truncation_mask(64, 1e-5))
    assert np.count_nonzero(t.coeffs) == 28
    assert np.all(t.coeffs[28:] == 0)
    assert t.n_reals == 56
    tail = np.abs(d.coeffs[28:]) ** 2
    assert distance(d, t) == pytest.approx(math.sqrt(2 * math.pi * 2 * tail.sum()), rel=1e-12)


def test_truncate_order_mismatch(rng):
    with pytest.raises(ValueError):
        truncate(random_descriptor(rng, order=5), truncation_mask(6, 1e-3))


def test_linearity_over_concatenation(rng):
    kernel = make_kernel(12)
    for _ in range(20):
        a, b = random_set(rng), random_set(rng)
        whole = estimate(a.concat(b), kernel).coeffs
        parts = (len(a) * estimate(a, kernel).coeffs + len(b) * estimate(b, kernel).coeffs) / (len(a) + len(b))
        assert np.abs(whole - parts).max() < 1e-12


def test_storage_parity(rng):
    d = random_descriptor(rng, order=9)
    assert d.coeffs.size == 10 and d.n_reals == 20
    assert d.coeffs[0].imag == 0.0


def test_zero_weights_give_zero_descriptor():
    d = estimate(AngleWeightSet([0.1, 2.0], [0.0, 0.0]), make_kernel(5))
    assert not np.any(d.coeffs)


def test_json_round_trip(rng):
    d = truncate(random_descriptor(rng, order=20), truncation_mask(20, 1e-3))
    back = Descriptor.from_json(d.to_json())
    np.testing.assert_array_equal(back.coeffs, d.coeffs)
    assert back.cutoff == d.cutoff and back.trunc.epsilon == 1e-3
    data = d.to_dict()
    assert set(data) >= {"K", "cutoff", "re", "im"} and len(data["re"]) == 21


def test_binary_round_trip_and_layout(rng):
    d = random_descriptor(rng, order=7)
    blob = d.to_bytes()
    assert len(blob) == 8 + 16 * 8
    assert int.from_bytes(blob[:4], "little") == 7 and int.from_bytes(blob[4:8], "little") == 7
    assert np.frombuffer(blob[8:16], "<f8")[0] == d.coeffs[0].real
    np.testing.assert_array_equal(Descriptor.from_bytes(blob).coeffs, d.coeffs)


angle_arrays = arrays(float, st.integers(1, 30), elements=st.floats(-math.pi, math.pi))


@settings(max_examples=60, deadline=None)
@given(angle_arrays, st.floats(-10, 10), st.integers(0, 30))
def test_rotation_equivariance_property(angles, phi, order):
    s = AngleWeightSet(angles, np.linspace(0.1, 1.0, angles.size))
    kernel = make_kernel(order)
    lhs = rotate(estimate(s, kernel), phi).coeffs
    rhs = estimate(s.rotated(phi), kernel).coeffs
    assert np.abs(lhs - rhs).max() < 1e-11


@settings(max_examples=60, deadline=None)
@given(angle_arrays, st.integers(1, 30))
def test_density_real_and_energy_matches_parseval(angles, order):
    d = estimate(AngleWeightSet(angles, np.ones(angles.size)), make_kernel(order))
    assert np.abs(two_sided(d, GRID).imag).max() < 1e-12
    zero = Descriptor(order, np.zeros(order + 1))
    assert distance(d, zero) ** 2 == pytest.approx(2 * math.pi * d.energy(), rel=1e-12)


def test_evaluate_batch_is_bitwise_scalar(rng):
    d = random_descriptor(rng, order=40)
    theta = rng.uniform(-math.pi, math.pi, 257)
    batch = evaluate(d, theta)
    assert all(batch[i] == evaluate(d, t) for i, t in enumerate(theta))
