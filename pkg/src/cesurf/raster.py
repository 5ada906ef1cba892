"""Image containers and lossless file I/O.

Images are kept in two working forms: 8-bit RGB rasters as read from disk,
and floating-point grayscale planes used by every numeric stage.  Arrays are
frozen after construction so instances can be shared across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

# Rec.601 luma weights for R, G, B.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_SUPPORTED_MODES = ("RGB", "RGBA")


class ImageIOError(Exception):
    """Base class for image file errors."""


class UnreadableFileError(ImageIOError):
    """The file could not be opened or read at all."""


class UnsupportedFormatError(ImageIOError):
    """The file decoded to something other than 8-bit RGB/RGBA."""


class CorruptFileError(ImageIOError):
    """The stream is not a decodable image (bad magic, truncation, ...)."""


class ImageSaveError(ImageIOError):
    """Writing an image file failed."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    # Private copy so later mutation of the caller's buffer cannot leak in.
    if arr.flags.writeable:
        arr = arr.copy()
        arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RasterImage:
    """8-bit RGB image, ``pixels`` shaped (height, width, 3), immutable."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise ValueError("RasterImage requires uint8 pixels, got %s" % px.dtype)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError("RasterImage requires shape (H, W, 3), got %s" % (px.shape,))
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image dimensions must be positive")
        object.__setattr__(self, "pixels", _frozen(px))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def from_float(cls, values: np.ndarray) -> "RasterImage":
        """Quantize a float (H, W, 3) array to 8 bits, clipping to [0, 255]."""
        arr = np.asarray(values, dtype=np.float64)
        return cls(np.clip(np.rint(arr), 0, 255).astype(np.uint8))


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Grayscale plane at working precision, ``values`` shaped (H, W) float64.

    Values are conventionally on the display scale [0, 255] but are not
    clipped; quantization happens only when a file is written.  Every value
    must be finite.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("GrayImage requires shape (H, W), got %s" % (v.shape,))
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("image dimensions must be positive")
        if not np.isfinite(v).all():
            raise ValueError("GrayImage values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def to_u8(self) -> np.ndarray:
        """Quantized view for display/save: round, clip to [0, 255], uint8."""
        return np.clip(np.rint(self.values), 0, 255).astype(np.uint8)


def rgb_to_gray(img: RasterImage) -> GrayImage:
    """Collapse RGB to luma: 0.299 R + 0.587 G + 0.114 B, at float precision."""
    if not isinstance(img, RasterImage):
        raise TypeError("rgb_to_gray expects a RasterImage")
    wr, wg, wb = LUMA_WEIGHTS
    px = img.pixels.astype(np.float64)
    return GrayImage(wr * px[:, :, 0] + wg * px[:, :, 1] + wb * px[:, :, 2])


def load_image(path) -> RasterImage:
    """Decode an 8-bit RGB or RGBA raster file (PNG, or binary PPM for fixtures).

    The alpha channel, if present, is dropped.  Raises UnreadableFileError if
    the file cannot be opened, CorruptFileError if the stream does not decode,
    and UnsupportedFormatError for modes other than 8-bit RGB/RGBA.
    """
    p = Path(path)
    try:
        fh = open(p, "rb")
    except OSError as e:
        raise UnreadableFileError("cannot open %s: %s" % (p, e)) from e
    with fh:
        try:
            with Image.open(fh) as im:
                if im.mode not in _SUPPORTED_MODES:
                    raise UnsupportedFormatError(
                        "unsupported image mode %r in %s (need 8-bit RGB/RGBA)" % (im.mode, p)
                    )
                im.load()
                arr = np.asarray(im, dtype=np.uint8)
        except UnidentifiedImageError as e:
            raise CorruptFileError("not a decodable image: %s" % p) from e
        except (OSError, SyntaxError, ValueError) as e:
            raise CorruptFileError("corrupt image stream in %s: %s" % (p, e)) from e
    if arr.ndim == 3 and arr.shape[2] == 4:
        arr = arr[:, :, :3].copy()
    return RasterImage(arr)


def save_image(img, path) -> None:
    """Write an image losslessly; PNG by default, P6 PPM for a .ppm suffix.

    GrayImage inputs are quantized to 8 bits and written as RGB with equal
    channels.  I/O failures raise ImageSaveError carrying the path and cause.
    """
    p = Path(path)
    if isinstance(img, GrayImage):
        u8 = img.to_u8()
        arr = np.repeat(u8[:, :, None], 3, axis=2)
    elif isinstance(img, RasterImage):
        arr = img.pixels
    else:
        raise TypeError("save_image expects a RasterImage or GrayImage")
    fmt = "PPM" if p.suffix.lower() == ".ppm" else "PNG"
    try:
        Image.fromarray(np.ascontiguousarray(arr)).save(p, format=fmt)
    except OSError as e:
        raise ImageSaveError("cannot write %s: %s" % (p, e)) from e
