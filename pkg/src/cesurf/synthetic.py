"""Deterministic synthetic frames and surfaces for demos and tests."""

from __future__ import annotations

import numpy as np

from .raster import GrayImage, RasterImage
from .surface import SurfaceGrid, build_surface


def disc_on_black(size: int = 200, radius: float | None = None,
                  color=(200, 40, 40), center=None) -> RasterImage:
    """Solid disc of one color on exact black."""
    if radius is None:
        radius = size * 0.3
    if center is None:
        center = ((size - 1) / 2.0, (size - 1) / 2.0)
    cy, cx = center
    yy, xx = np.mgrid[0:size, 0:size]
    inside = (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2
    px = np.zeros((size, size, 3), dtype=np.uint8)
    px[inside] = np.asarray(color, dtype=np.uint8)
    return RasterImage(px)


def textured_disc_frame(size: int = 360) -> RasterImage:
    """Camera-like frame: a warm textured disc vignetted into a dark border.

    Fully deterministic (no RNG) so repeated runs hash identically.
    """
    c = (size - 1) / 2.0
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    r = np.hypot(yy - c, xx - c)
    ang = np.arctan2(yy - c, xx - c)
    rim = size * 0.42
    fall = np.clip(1.0 - (r / rim) ** 2, 0.0, 1.0)
    folds = 0.5 + 0.5 * np.sin(6.0 * ang + r * 0.09)
    speck = 0.5 + 0.5 * np.sin(xx * 0.55) * np.sin(yy * 0.47)
    red = 150 * fall + 70 * fall * folds + 20 * speck * fall
    green = 60 * fall + 45 * fall * folds
    blue = 40 * fall + 18 * speck * fall
    px = np.stack([red, green, blue], axis=2)
    # Faint sensor floor outside the rim, still under typical mask thresholds.
    px[r >= rim] = 3.0
    return RasterImage.from_float(px)


def hemisphere_gray(size: int = 257, radius: float = 128.0,
                    amplitude: float = 6.0) -> GrayImage:
    """Low-relief dome: z = amplitude * sqrt(1 - (r/radius)^2), 0 outside."""
    c = (size - 1) / 2.0
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    rr = ((yy - c) ** 2 + (xx - c) ** 2) / radius**2
    z = amplitude * np.sqrt(np.clip(1.0 - rr, 0.0, 1.0))
    return GrayImage(z)


def hemisphere_surface(size: int = 257, radius: float = 128.0,
                       amplitude: float = 6.0) -> SurfaceGrid:
    """Dome height field with a height-ramped two-tone color grid."""
    gray = hemisphere_gray(size=size, radius=radius, amplitude=amplitude)
    t = (gray.values / amplitude)[..., None] if amplitude else gray.values[..., None] * 0.0
    low = np.array([40.0, 70.0, 180.0])
    high = np.array([210.0, 60.0, 50.0])
    colors = low + (high - low) * t
    return build_surface(gray, RasterImage.from_float(colors))
