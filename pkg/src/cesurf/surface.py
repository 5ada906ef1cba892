"""Height-field surface assembly: background masking, color grid, and the
X/Y/Z/C surface representation with a small binary dump format."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .raster import GrayImage, RasterImage

SURFACE_MAGIC = b"CESG"
BACKGROUND_WHITE = (255, 255, 255)


@dataclass(frozen=True, eq=False)
class BackgroundMask:
    """Boolean plane, True where a pixel belongs to the dark background."""

    flags: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.flags)
        if f.dtype != np.bool_ or f.ndim != 2:
            raise ValueError("mask must be a 2-d boolean array")
        if f.flags.writeable:
            f = f.copy()
            f.setflags(write=False)
        object.__setattr__(self, "flags", f)

    @property
    def height(self) -> int:
        return self.flags.shape[0]

    @property
    def width(self) -> int:
        return self.flags.shape[1]

    @property
    def background_count(self) -> int:
        return int(self.flags.sum())


def extract_background_mask(img: RasterImage, threshold: int = 10) -> BackgroundMask:
    """Flag near-black pixels: background iff max(R, G, B) <= threshold."""
    if not isinstance(img, RasterImage):
        raise TypeError("extract_background_mask expects a RasterImage")
    if not (0 <= threshold <= 255):
        raise ValueError("threshold must be in [0, 255], got %r" % (threshold,))
    return BackgroundMask(img.pixels.max(axis=2) <= threshold)


def build_color_grid(img: RasterImage, mask: BackgroundMask) -> RasterImage:
    """Whiten the background: saturating-add full scale at masked pixels.

    Masked (background) pixels become exactly (255, 255, 255); foreground
    pixels are unchanged.
    """
    if not isinstance(img, RasterImage):
        raise TypeError("build_color_grid expects a RasterImage")
    if (mask.height, mask.width) != (img.height, img.width):
        raise ValueError(
            "mask dimensions %dx%d do not match image %dx%d"
            % (mask.height, mask.width, img.height, img.width)
        )
    lift = mask.flags.astype(np.uint16) * 255
    out = np.minimum(img.pixels.astype(np.uint16) + lift[:, :, None], 255)
    return RasterImage(out.astype(np.uint8))


@dataclass(frozen=True, eq=False)
class SurfaceGrid:
    """Colored height field: X/Y integer lattice, Z heights, C colors.

    xgrid(i, j) = j and ygrid(i, j) = i (column/row meshgrid); zgrid holds
    intensities at working precision; colorgrid is (H, W, 3) uint8.
    """

    xgrid: np.ndarray
    ygrid: np.ndarray
    zgrid: np.ndarray
    colorgrid: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.xgrid, dtype=np.float64)
        y = np.asarray(self.ygrid, dtype=np.float64)
        z = np.asarray(self.zgrid, dtype=np.float64)
        c = np.asarray(self.colorgrid)
        if z.ndim != 2 or z.shape[0] < 1 or z.shape[1] < 1:
            raise ValueError("zgrid must be (H, W) with positive dimensions")
        if x.shape != z.shape or y.shape != z.shape:
            raise ValueError("xgrid/ygrid/zgrid shapes must agree")
        if c.dtype != np.uint8 or c.shape != z.shape + (3,):
            raise ValueError("colorgrid must be uint8 (H, W, 3) matching zgrid")
        if not np.isfinite(z).all():
            raise ValueError("zgrid values must be finite")
        for name, arr in (("xgrid", x), ("ygrid", y), ("zgrid", z), ("colorgrid", c)):
            if arr.flags.writeable:
                arr = arr.copy()
                arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def height(self) -> int:
        return self.zgrid.shape[0]

    @property
    def width(self) -> int:
        return self.zgrid.shape[1]


def build_surface(gray: GrayImage, color: RasterImage) -> SurfaceGrid:
    """Assemble a surface: Z from the gray plane, C from the color grid.

    X and Y are the integer pixel lattice in column/row order; Z copies the
    gray values bit for bit.
    """
    if not isinstance(gray, GrayImage):
        raise TypeError("build_surface expects a GrayImage for heights")
    if not isinstance(color, RasterImage):
        raise TypeError("build_surface expects a RasterImage for colors")
    if (gray.height, gray.width) != (color.height, color.width):
        raise ValueError(
            "gray %dx%d and color %dx%d dimensions do not match"
            % (gray.height, gray.width, color.height, color.width)
        )
    x, y = np.meshgrid(
        np.arange(gray.width, dtype=np.float64), np.arange(gray.height, dtype=np.float64)
    )
    return SurfaceGrid(xgrid=x, ygrid=y, zgrid=gray.values, colorgrid=color.pixels)


def save_surface(surf: SurfaceGrid, path) -> None:
    """Write the binary dump: magic "CESG", u32 width, u32 height,
    float32 Z grid, then RGB8 colors, all little-endian row-major."""
    p = Path(path)
    blob = bytearray()
    blob += SURFACE_MAGIC
    blob += struct.pack("<II", surf.width, surf.height)
    blob += surf.zgrid.astype("<f4").tobytes()
    blob += np.ascontiguousarray(surf.colorgrid).tobytes()
    p.write_bytes(bytes(blob))


def load_surface(path) -> SurfaceGrid:
    """Read a surface dump written by save_surface; X/Y are rebuilt from the
    stored dimensions."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != SURFACE_MAGIC:
        raise ValueError("not a surface dump: bad magic in %s" % path)
    w, h = struct.unpack_from("<II", raw, 4)
    zbytes = 4 * w * h
    cbytes = 3 * w * h
    if len(raw) != 12 + zbytes + cbytes:
        raise ValueError(
            "surface dump %s has %d bytes, expected %d" % (path, len(raw), 12 + zbytes + cbytes)
        )
    z = np.frombuffer(raw, dtype="<f4", count=w * h, offset=12).reshape(h, w)
    c = np.frombuffer(raw, dtype=np.uint8, count=cbytes, offset=12 + zbytes).reshape(h, w, 3)
    x, ygrid = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    return SurfaceGrid(xgrid=x, ygrid=ygrid, zgrid=z.astype(np.float64), colorgrid=c.copy())
