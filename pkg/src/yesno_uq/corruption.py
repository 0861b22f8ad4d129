"""Grayscale pixel-space corruptions: 5 kinds at severities 1, 3 and 5.

Noise std and brightness shift are fractions of the full intensity range and
are scaled by 255 before being applied to uint8 pixels. Results are rounded
half-up and clipped to [0, 255].
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

KINDS = ("gaussian_noise", "gaussian_blur", "contrast", "brightness", "jpeg")
SEVERITIES = (1, 3, 5)

_PARAMS = {
    "gaussian_noise": (0.04, 0.08, 0.12),
    "gaussian_blur": (1.0, 2.0, 3.0),
    "contrast": (0.7, 0.5, 0.3),
    "brightness": (0.05, 0.10, 0.15),
    "jpeg": (50, 30, 10),
}


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str
    severity: int
    parameter: float

    @classmethod
    def of(cls, kind: str, severity: int) -> "CorruptionSpec":
        return cls(kind, severity, severity_params(kind, severity))


@dataclass(frozen=True, eq=False)
class GrayImage:
    """uint8 image stored as a (height, width) array."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 2:
            raise ValueError("grayscale images must be 2-D")
        if self.pixels.dtype != np.uint8:
            object.__setattr__(self, "pixels", np.clip(self.pixels, 0, 255).astype(np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)

    @classmethod
    def from_list(cls, width: int, height: int, values) -> "GrayImage":
        arr = np.asarray(values)
        if arr.size != width * height:
            raise ValueError("pixel count does not match width * height")
        return cls(np.clip(arr, 0, 255).astype(np.uint8).reshape(height, width))

    @classmethod
    def load(cls, path) -> "GrayImage":
        with Image.open(path) as im:
            return cls(np.asarray(im.convert("L"), dtype=np.uint8).copy())

    def save(self, path) -> None:
        Image.fromarray(self.pixels, mode="L").save(path, format="PNG")


def severity_params(kind: str, severity: int) -> float:
    if kind not in _PARAMS:
        raise ValueError(f"unknown corruption kind {kind!r}")
    if severity not in SEVERITIES:
        raise ValueError(f"severity must be one of {SEVERITIES}, got {severity}")
    return _PARAMS[kind][SEVERITIES.index(severity)]


def _finish(x: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(x + 0.5), 0, 255).astype(np.uint8)


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma))
    if radius == 0:
        return np.ones(1)
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _convolve_axis(x: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    r = kernel.size // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(x, pad, mode="edge")
    out = np.zeros_like(x)
    n = x.shape[axis]
    for i, w in enumerate(kernel):
        out += w * np.take(padded, np.arange(i, i + n), axis=axis)
    return out


def blur(pixels: np.ndarray, sigma: float) -> np.ndarray:
    k = gaussian_kernel(sigma)
    x = pixels.astype(float)
    return _convolve_axis(_convolve_axis(x, k, 0), k, 1)


def jpeg_roundtrip(pixels: np.ndarray, quality: int) -> np.ndarray:
    if not 1 <= quality <= 100:
        raise ValueError("JPEG quality must be in [1, 100]")
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="L").save(buf, format="JPEG", quality=int(quality))
    buf.seek(0)
    with Image.open(buf) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8).copy()


def apply_corruption(image: GrayImage, spec: CorruptionSpec, seed: int = 0) -> GrayImage:
    x = image.pixels
    if x.size == 0:
        raise ValueError("cannot corrupt an empty image")
    kind, param = spec.kind, spec.parameter
    if kind == "gaussian_noise":
        noise = np.random.default_rng(seed).standard_normal(x.shape)
        return GrayImage(_finish(x + 255.0 * param * noise))
    if kind == "gaussian_blur":
        return GrayImage(_finish(blur(x, param)))
    if kind == "contrast":
        xf = x.astype(float)
        return GrayImage(_finish(param * xf + (1.0 - param) * xf.mean()))
    if kind == "brightness":
        return GrayImage(_finish(x + 255.0 * param))
    if kind == "jpeg":
        return GrayImage(jpeg_roundtrip(x, int(param)))
    raise ValueError(f"unknown corruption kind {kind!r}")
