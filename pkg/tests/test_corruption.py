import numpy as np
import pytest

from yesno_uq.corruption import (
    KINDS,
    CorruptionSpec,
    GrayImage,
    apply_corruption,
    gaussian_kernel,
    severity_params,
)

TABLE = {
    ("gaussian_noise", 1): 0.04, ("gaussian_noise", 3): 0.08, ("gaussian_noise", 5): 0.12,
    ("gaussian_blur", 1): 1.0, ("gaussian_blur", 3): 2.0, ("gaussian_blur", 5): 3.0,
    ("contrast", 1): 0.7, ("contrast", 3): 0.5, ("contrast", 5): 0.3,
    ("brightness", 1): 0.05, ("brightness", 3): 0.10, ("brightness", 5): 0.15,
    ("jpeg", 1): 50, ("jpeg", 3): 30, ("jpeg", 5): 10,
}


@pytest.mark.parametrize("cell", sorted(TABLE))
def test_severity_table(cell):
    assert severity_params(*cell) == TABLE[cell]


def test_unknown_kind_and_severity():
    with pytest.raises(ValueError):
        severity_params("fog", 1)
    with pytest.raises(ValueError):
        severity_params("jpeg", 2)


def gradient(h=64, w=80):
    y, x = np.mgrid[0:h, 0:w]
    return GrayImage(((x * 3 + y * 2) % 256).astype(np.uint8))


def test_contrast_identity():
    img = gradient()
    assert apply_corruption(img, CorruptionSpec("contrast", 0, 1.0)) == img


def test_noise_zero_identity():
    img = gradient()
    assert apply_corruption(img, CorruptionSpec("gaussian_noise", 0, 0.0), seed=3) == img


def test_brightness_constant_image():
    img = GrayImage(np.full((10, 10), 128, np.uint8))
    out = apply_corruption(img, CorruptionSpec.of("brightness", 3))
    assert np.all(out.pixels == 154)


def test_brightness_mean_shift_on_non_clipping_image():
    img = GrayImage(np.random.default_rng(0).integers(20, 200, size=(50, 50)).astype(np.uint8))
    for sev in (1, 3, 5):
        spec = CorruptionSpec.of("brightness", sev)
        shift = apply_corruption(img, spec).pixels.astype(float).mean() - img.pixels.astype(float).mean()
        expected = np.floor(255 * spec.parameter + 0.5)  # shift after half-up rounding
        assert shift == pytest.approx(expected, abs=1e-12)
        assert abs(shift - 255 * spec.parameter) <= 0.5


def test_outputs_clipped():
    img = GrayImage(np.array([[0, 255], [250, 5]], np.uint8))
    for kind in KINDS:
        for sev in (1, 3, 5):
            out = apply_corruption(img, CorruptionSpec.of(kind, sev), seed=1).pixels
            assert out.dtype == np.uint8 and out.min() >= 0 and out.max() <= 255
    bright = apply_corruption(GrayImage(np.full((2, 2), 250, np.uint8)), CorruptionSpec.of("brightness", 5))
    assert np.all(bright.pixels == 255)


@pytest.mark.parametrize("sigma", [1.0, 2.0, 3.0])
def test_blur_kernel(sigma):
    k = gaussian_kernel(sigma)
    assert abs(k.sum() - 1.0) < 1e-9
    assert k.size == 2 * int(np.ceil(3 * sigma)) + 1


@pytest.mark.parametrize("value", [0, 77, 255])
def test_blur_constant_identity(value):
    img = GrayImage(np.full((20, 30), value, np.uint8))
    assert apply_corruption(img, CorruptionSpec.of("gaussian_blur", 5)) == img


def test_blur_clamp_to_edge():
    # a step edge at the border: clamped padding keeps the border row unchanged far from the step
    px = np.zeros((20, 20), np.uint8)
    px[:, 10:] = 200
    out = apply_corruption(GrayImage(px), CorruptionSpec.of("gaussian_blur", 1)).pixels
    assert out[0, 0] == 0 and out[-1, -1] == 200
    assert 0 < out[5, 9] < 200


def test_noise_reproducible_and_variance():
    img = GrayImage(np.full((512, 512), 128, np.uint8))
    spec = CorruptionSpec.of("gaussian_noise", 1)
    a = apply_corruption(img, spec, seed=5)
    assert a == apply_corruption(img, spec, seed=5)
    assert a != apply_corruption(img, spec, seed=6)
    diff = a.pixels.astype(float) - 128
    assert diff.var() == pytest.approx((255 * 0.04) ** 2, rel=0.05)


def test_contrast_pulls_to_mean():
    img = gradient()
    out = apply_corruption(img, CorruptionSpec.of("contrast", 5)).pixels.astype(float)
    assert out.std() < img.pixels.std()
    assert out.mean() == pytest.approx(img.pixels.mean(), abs=0.5)


def test_jpeg_changes_detailed_image_and_keeps_shape():
    img = GrayImage(np.random.default_rng(1).integers(0, 256, size=(32, 48)).astype(np.uint8))
    out = apply_corruption(img, CorruptionSpec.of("jpeg", 5))
    assert out.pixels.shape == (32, 48)
    assert out != img


def test_empty_image_rejected():
    with pytest.raises(ValueError):
        apply_corruption(GrayImage(np.zeros((0, 0), np.uint8)), CorruptionSpec.of("contrast", 1))


def test_png_round_trip(tmp_path):
    img = gradient()
    img.save(tmp_path / "a.png")
    assert GrayImage.load(tmp_path / "a.png") == img


def test_from_list():
    img = GrayImage.from_list(3, 2, [0, 1, 2, 300, 4, -5])
    assert (img.width, img.height) == (3, 2)
    assert img.pixels.tolist() == [[0, 1, 2], [255, 4, 0]]
    with pytest.raises(ValueError):
        GrayImage.from_list(3, 3, [0] * 4)
