import math

import numpy as np
import pytest

from fskde.descriptor import AngleWeightSet, distance, estimate, evaluate, rotate
from fskde.image_field import (
    AngularImage,
    DescriptorField,
    Window,
    box_window,
    circular_mask,
    gaussian_window,
    gradient_field,
    local_fskde,
    masked_samples,
    patch_descriptor,
)
from fskde.imageio import ImageFormatError, read_image, write_image
from fskde.kernel import make_kernel


def random_field(rng, h=16, w=16):
    return AngularImage(rng.uniform(-math.pi, math.pi, (h, w)), rng.uniform(0, 2, (h, w)))


def direct_local(field, taps, kernel, r, c):
    """F_k(x) = H_k sum_y phi(y) W(x - y) e^{-ik Theta(x - y)} with zero padding."""
    hh, ww = taps.shape[0] // 2, taps.shape[1] // 2
    k = np.arange(kernel.order + 1)
    acc = np.zeros(kernel.order + 1, dtype=complex)
    for dy in range(-hh, hh + 1):
        for dx in range(-ww, ww + 1):
            y, x = r - dy, c - dx
            if 0 <= y < field.shape[0] and 0 <= x < field.shape[1]:
                acc += taps[dy + hh, dx + ww] * field.weights[y, x] * np.exp(-1j * k * field.angles[y, x])
    return kernel.coeffs * acc


def test_ramp_gradient():
    x = np.tile(np.arange(8.0), (8, 1))
    g = gradient_field(3 * x)
    np.testing.assert_allclose(g.weights, 3.0)
    np.testing.assert_allclose(g.angles, 0.0)
    g = gradient_field(-2 * x.T)
    np.testing.assert_allclose(g.weights, 2.0)
    np.testing.assert_allclose(g.angles, -math.pi / 2)


def test_sobel_unit_gain():
    x = np.tile(np.arange(8.0), (8, 1))
    g = gradient_field(5 * x, "sobel")
    np.testing.assert_allclose(g.weights[1:-1, 1:-1], 5.0)
    np.testing.assert_allclose(g.angles[1:-1, 1:-1], 0.0, atol=1e-15)


def test_flat_image_has_zero_weights():
    g = gradient_field(np.full((5, 5), 7.0))
    assert not np.any(g.weights) and not np.any(g.angles)


@pytest.mark.parametrize("shape", [(2, 5), (5,)])
def test_gradient_rejects_small_or_1d(shape):
    with pytest.raises(ValueError):
        gradient_field(np.zeros(shape))


def test_gradient_rejects_unknown_operator():
    with pytest.raises(ValueError):
        gradient_field(np.zeros((4, 4)), "prewitt")


def test_rot90_rotates_gradient_angles(rng):
    img = rng.normal(size=(9, 9))
    g = gradient_field(img)
    gr = gradient_field(np.rot90(img))
    # np.rot90 turns content counter-clockwise on screen; with rows down this
    # adds -pi/2 to every gradient angle.
    inner = (slice(1, -1), slice(1, -1))
    expected = np.rot90(g.angles) - math.pi / 2
    diff = np.angle(np.exp(1j * (gr.angles - expected)))[inner]
    mask = np.rot90(g.weights)[inner] > 1e-9
    assert np.abs(diff[mask]).max() < 1e-12
    np.testing.assert_allclose(gr.weights[inner], np.rot90(g.weights)[inner], atol=1e-12)


def test_window_validation():
    with pytest.raises(ValueError):
        Window(np.ones((4, 3)), "box")
    with pytest.raises(ValueError):
        Window(-np.ones((3, 3)), "box")
    w = box_window(5)
    assert w.taps.sum() == pytest.approx(1.0) and w.separable_factors is not None
    g = gaussian_window(1.5)
    assert g.taps.shape == (11, 11) and g.separable_factors is not None
    assert Window(np.eye(3), "box").separable_factors is None


def test_one_pixel_window_is_pointwise(rng):
    f = random_field(rng, 6, 7)
    kernel = make_kernel(5)
    out = local_fskde(f, Window(np.ones((1, 1)), "box"), kernel)
    k = np.arange(6)[:, None, None]
    expected = kernel.coeffs[:, None, None] * f.weights * np.exp(-1j * k * f.angles)
    expected[0] = expected[0].real
    np.testing.assert_allclose(out.planes, expected, atol=1e-15)


def test_field_matches_direct_sum_everywhere(rng):
    f = random_field(rng)
    kernel = make_kernel(6)
    window = gaussian_window(1.0, radius=2)
    out = local_fskde(f, window, kernel)
    for r in range(16):
        for c in range(16):
            np.testing.assert_allclose(out.planes[:, r, c], direct_local(f, window.taps, kernel, r, c), atol=1e-10)


def test_nonseparable_window_matches_direct(rng):
    f = random_field(rng, 20, 18)
    kernel = make_kernel(4)
    taps = rng.uniform(0, 1, (5, 3))
    window = Window(taps, "box")
    assert window.separable_factors is None
    out = local_fskde(f, window, kernel)
    for r, c in rng.integers(0, 18, (50, 2)):
        np.testing.assert_allclose(out.planes[:, r, c], direct_local(f, window.taps, kernel, r, c), atol=1e-10)


def test_interior_box_equals_estimate(rng):
    f = random_field(rng, 12, 12)
    kernel = make_kernel(7)
    out = local_fskde(f, box_window(5), kernel)
    r, c = 6, 5
    s = AngleWeightSet(f.angles[r - 2:r + 3, c - 2:c + 3].ravel(), f.weights[r - 2:r + 3, c - 2:c + 3].ravel())
    np.testing.assert_allclose(out.descriptor_at(r, c).coeffs, estimate(s, kernel).coeffs, atol=1e-14)


def test_spatial_matches_fft(rng):
    f = random_field(rng, 24, 30)
    kernel = make_kernel(8)
    for window in (box_window(7), gaussian_window(2.0)):
        a = local_fskde(f, window, kernel, "spatial").planes
        b = local_fskde(f, window, kernel, "fft").planes
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_field_linear_in_weights(rng):
    f = random_field(rng)
    g = AngularImage(f.angles, rng.uniform(0, 1, f.shape))
    both = AngularImage(f.angles, 2 * f.weights + 3 * g.weights)
    kernel, window = make_kernel(5), box_window(3)
    lhs = local_fskde(both, window, kernel).planes
    rhs = 2 * local_fskde(f, window, kernel).planes + 3 * local_fskde(g, window, kernel).planes
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_window_larger_than_image(rng):
    with pytest.raises(ValueError):
        local_fskde(random_field(rng, 4, 4), box_window(5), make_kernel(2))
    with pytest.raises(ValueError):
        local_fskde(random_field(rng, 8, 8), box_window(3), make_kernel(2), "winograd")


def test_circular_mask_count():
    assert circular_mask((64, 64), 60).sum() == 2828
    m = circular_mask((5, 5), 3)
    assert m[2, 2] and m[1, 2] and not m[0, 0]
    with pytest.raises(ValueError):
        circular_mask((8, 8), 9)


def test_patch_descriptor_uses_mask_count(rng):
    patch = rng.uniform(0, 255, (64, 64))
    kernel = make_kernel(6)
    d = patch_descriptor(patch, kernel, 60)
    s = masked_samples(patch, 60)
    assert len(s) == 2828
    g = gradient_field(patch)
    m = circular_mask((64, 64), 60)
    assert d.coeffs[0].real == pytest.approx(kernel.coeffs[0] * g.weights[m].sum() / 2828, rel=1e-12)


def test_stripes_concentrate_density():
    x = np.arange(32.0)
    patch = np.tile(127 + 100 * np.sin(2 * math.pi * x / 8), (32, 1))
    d = patch_descriptor(patch, make_kernel(16), 28)
    theta = np.linspace(-math.pi, math.pi, 721)[:-1]
    dens = evaluate(d, theta)
    peaks = theta[dens > 0.5 * dens.max()]
    assert np.all(np.minimum(np.abs(peaks), math.pi - np.abs(peaks)) < 0.5)


def test_rot90_patch_rotates_descriptor(rng):
    patch = rng.uniform(0, 255, (33, 33))
    kernel = make_kernel(8)
    a = patch_descriptor(patch, kernel, 29)
    b = patch_descriptor(np.rot90(patch), kernel, 29)
    assert distance(a, b) > 1e-3
    assert distance(rotate(a, -math.pi / 2), b) < 1e-12


def test_field_save_load(tmp_path, rng):
    field = local_fskde(random_field(rng, 9, 11), box_window(3), make_kernel(4))
    manifest = field.save(tmp_path / "f")
    assert len(list((tmp_path / "f").glob("plane_*.bin"))) == 5
    back = DescriptorField.load(manifest)
    assert back.order == 4
    np.testing.assert_array_equal(back.planes, field.planes)


@pytest.mark.parametrize("name", ["img.pgm", "img.png"])
def test_image_round_trip(tmp_path, rng, name):
    img = rng.integers(0, 256, (13, 17)).astype(float)
    write_image(tmp_path / name, img)
    np.testing.assert_array_equal(read_image(tmp_path / name), img)


def test_pgm_with_comment_and_16bit(tmp_path):
    body = np.array([[1, 300], [65535, 0]], dtype=">u2").tobytes()
    (tmp_path / "a.pgm").write_bytes(b"P5\n# comment\n2 2\n65535\n" + body)
    np.testing.assert_array_equal(read_image(tmp_path / "a.pgm"), [[1, 300], [65535, 0]])


def test_bad_image_rejected(tmp_path):
    (tmp_path / "x.pgm").write_bytes(b"P2\n2 2\n255\n0 0 0 0")
    with pytest.raises(ImageFormatError):
        read_image(tmp_path / "x.pgm")
    (tmp_path / "t.pgm").write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    with pytest.raises(ImageFormatError):
        read_image(tmp_path / "t.pgm")
