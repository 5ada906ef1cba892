"""Intensity preprocessing: Lanczos-3 upscaling, statistics, outlier
rescaling, and 3x3 convolution.

All arithmetic runs at float64 working precision.  Color images are handled
per channel and quantized back to 8 bits on output; grayscale stays float.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import GrayImage, RasterImage

# Lanczos-3 support: the window spans |x| < 3, six taps per axis.
LANCZOS_A = 3
_TAP_OFFSETS = np.arange(-2, 4)


def lanczos_kernel(x):
    """Lanczos-3 window: sinc(x) * sinc(x/3) for |x| < 3, else 0.

    sinc is the normalized form sin(pi x) / (pi x) with sinc(0) = 1.  Accepts
    a scalar or an array; returns the same shape.
    """
    arr = np.asarray(x, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        out = np.where(np.abs(arr) < LANCZOS_A, np.sinc(arr) * np.sinc(arr / LANCZOS_A), 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def _resample_axis(plane: np.ndarray, ratio: int) -> np.ndarray:
    """Upscale the last axis of a float64 plane by an integer ratio.

    Output sample o maps to source coordinate (o + 0.5) / ratio - 0.5
    (half-pixel centers).  Six taps around the source coordinate are weighted
    with the Lanczos-3 window, weights renormalized to sum to one, and tap
    indices are clipped to the valid range (edge replication).
    """
    n = plane.shape[-1]
    out_n = n * ratio
    src = (np.arange(out_n) + 0.5) / ratio - 0.5
    base = np.floor(src).astype(np.int64)
    taps = base[:, None] + _TAP_OFFSETS[None, :]            # (out_n, 6)
    w = lanczos_kernel(src[:, None] - taps)
    w /= w.sum(axis=1, keepdims=True)
    idx = np.clip(taps, 0, n - 1)
    return np.einsum("ot,hot->ho", w, plane[..., idx])


def _upscale_plane(plane: np.ndarray, ratio: int) -> np.ndarray:
    out = _resample_axis(plane, ratio)
    return _resample_axis(out.T, ratio).T


def lanczos_upscale(src, ratio: int):
    """Upscale an image by an integer ratio >= 1 with the Lanczos-3 window.

    The resampling is separable (rows then columns); each output pixel draws
    on a 6x6 source neighborhood.  Returns the same kind of image as ``src``
    with dimensions multiplied by ``ratio``.
    """
    if isinstance(ratio, bool) or not isinstance(ratio, (int, np.integer)):
        raise ValueError("upscale ratio must be an integer")
    if ratio < 1:
        raise ValueError("upscale ratio must be >= 1, got %d" % ratio)
    ratio = int(ratio)
    if isinstance(src, GrayImage):
        return GrayImage(_upscale_plane(src.values, ratio))
    if isinstance(src, RasterImage):
        planes = [
            _upscale_plane(src.pixels[:, :, c].astype(np.float64), ratio) for c in range(3)
        ]
        return RasterImage.from_float(np.stack(planes, axis=2))
    raise TypeError("lanczos_upscale expects a RasterImage or GrayImage")


@dataclass(frozen=True)
class StatsSummary:
    """Mean and population standard deviation of an intensity plane."""

    mean: float
    std: float
    count: int


def compute_stats(img: GrayImage) -> StatsSummary:
    """Mean and population std (divisor N, not N-1) over all pixels."""
    if not isinstance(img, GrayImage):
        raise TypeError("compute_stats expects a GrayImage")
    v = img.values
    return StatsSummary(mean=float(v.mean()), std=float(v.std()), count=int(v.size))


@dataclass(frozen=True)
class RescaleBounds:
    """Clamp interval [lower, upper] = mean -/+ k * std used by rescale_outliers."""

    lower: float
    upper: float
    k: float

    @classmethod
    def from_stats(cls, stats: StatsSummary, k: float) -> "RescaleBounds":
        if not k > 0:
            raise ValueError("k must be positive, got %r" % (k,))
        return cls(lower=stats.mean - k * stats.std, upper=stats.mean + k * stats.std, k=float(k))


def rescale_outliers(img: GrayImage, k: float = 2.0) -> GrayImage:
    """Clamp intensities to mean +/- k*std and stretch the result to [0, 255].

    Pixels outside the interval are clipped to its endpoints, then the
    interval is mapped affinely onto [0, 255].  A constant image (zero std)
    is returned unchanged.
    """
    if not isinstance(img, GrayImage):
        raise TypeError("rescale_outliers expects a GrayImage")
    stats = compute_stats(img)
    if stats.std == 0.0:
        return img
    bounds = RescaleBounds.from_stats(stats, k)
    clamped = np.clip(img.values, bounds.lower, bounds.upper)
    scaled = (clamped - bounds.lower) * (255.0 / (bounds.upper - bounds.lower))
    # Roundoff in the affine map can land a hair outside [0, 255]; the
    # documented range is exact, so clip it back.
    return GrayImage(np.clip(scaled, 0.0, 255.0))


@dataclass(frozen=True, eq=False)
class Kernel3x3:
    """Nine finite convolution weights, row-major (3, 3)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (3, 3):
            raise ValueError("kernel must be 3x3, got %s" % (w.shape,))
        if not np.isfinite(w).all():
            raise ValueError("kernel weights must be finite")
        if w.flags.writeable:
            w = w.copy()
            w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> "Kernel3x3":
        """The averaging kernel: all weights 1/9."""
        return cls(np.full((3, 3), 1.0 / 9.0))

    @classmethod
    def delta(cls) -> "Kernel3x3":
        """Identity kernel: 1 at the center, 0 elsewhere."""
        w = np.zeros((3, 3))
        w[1, 1] = 1.0
        return cls(w)

    @classmethod
    def from_flat(cls, values) -> "Kernel3x3":
        v = np.asarray(list(values), dtype=np.float64)
        if v.shape != (9,):
            raise ValueError("expected nine kernel weights, got %d" % v.size)
        return cls(v.reshape(3, 3))


def _convolve_plane(plane: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # True convolution: out(i,j) = sum_{m,n in -1..1} h(m,n) * x(i-m, j-n),
    # with h indexed so weights[1,1] is h(0,0).  Borders replicate the edge.
    h, w = plane.shape
    padded = np.pad(plane, 1, mode="edge")
    out = np.zeros((h, w), dtype=np.float64)
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            out += weights[m + 1, n + 1] * padded[1 - m : 1 - m + h, 1 - n : 1 - n + w]
    return out


def convolve2d(img, kernel: Kernel3x3):
    """Convolve an image with a 3x3 kernel (true convolution, not correlation).

    Output has the same dimensions as the input; borders behave as if the
    edge pixels extended outward.  Grayscale input convolves the float plane;
    color input convolves each channel and re-quantizes to 8 bits.
    """
    if not isinstance(kernel, Kernel3x3):
        raise TypeError("convolve2d expects a Kernel3x3")
    if isinstance(img, GrayImage):
        return GrayImage(_convolve_plane(img.values, kernel.weights))
    if isinstance(img, RasterImage):
        planes = [
            _convolve_plane(img.pixels[:, :, c].astype(np.float64), kernel.weights)
            for c in range(3)
        ]
        return RasterImage.from_float(np.stack(planes, axis=2))
    raise TypeError("convolve2d expects a RasterImage or GrayImage")
