"""Line-of-sight rendering of a colored height field.

The camera is orthographic.  A pose is (azimuth, elevation) in degrees:
azimuth rotates counterclockwise about +z starting from the -y axis, and
elevation tilts out of the x-y plane (+90 looks along +z).  The view vector
points from the surface toward the camera.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .raster import RasterImage
from .surface import SurfaceGrid


@dataclass(frozen=True)
class ViewPose:
    """Azimuth/elevation in degrees; azimuth is normalized into [0, 360)."""

    azimuth_deg: float
    elevation_deg: float

    def __post_init__(self):
        az = float(self.azimuth_deg)
        el = float(self.elevation_deg)
        if not (math.isfinite(az) and math.isfinite(el)):
            raise ValueError("pose angles must be finite")
        if not -90.0 <= el <= 90.0:
            raise ValueError("elevation must lie in [-90, 90], got %r" % el)
        object.__setattr__(self, "azimuth_deg", az % 360.0)
        object.__setattr__(self, "elevation_deg", el)


@dataclass(frozen=True)
class RenderSettings:
    """Output raster geometry and shading environment for render_surface."""

    out_width: int = 640
    out_height: int = 640
    background: tuple = (255, 255, 255)
    z_exaggeration: float = 1.0

    def __post_init__(self):
        if self.out_width < 16 or self.out_height < 16:
            raise ValueError("render dimensions must be at least 16 pixels")
        bg = tuple(int(c) for c in self.background)
        if len(bg) != 3 or any(not 0 <= c <= 255 for c in bg):
            raise ValueError("background must be an RGB triple in [0, 255]")
        if not self.z_exaggeration > 0:
            raise ValueError("z_exaggeration must be positive")
        object.__setattr__(self, "background", bg)


def line_of_sight(pose: ViewPose) -> np.ndarray:
    """Unit vector from the surface toward the camera.

    v = (cos(el) sin(az), -cos(el) cos(az), sin(el)); (az=0, el=0) views from
    the -y side and (el=90) from straight above.
    """
    az = math.radians(pose.azimuth_deg)
    el = math.radians(pose.elevation_deg)
    return np.array(
        [math.cos(el) * math.sin(az), -math.cos(el) * math.cos(az), math.sin(el)]
    )


def view_basis(pose: ViewPose):
    """Orthonormal (right, up, view) screen basis for a pose.

    right lies in the x-y plane; up completes the right-handed frame so that
    right x up = view.
    """
    az = math.radians(pose.azimuth_deg)
    el = math.radians(pose.elevation_deg)
    sa, ca = math.sin(az), math.cos(az)
    se, ce = math.sin(el), math.cos(el)
    right = np.array([ca, sa, 0.0])
    up = np.array([-se * sa, se * ca, ce])
    view = np.array([ce * sa, -ce * ca, se])
    return right, up, view


@njit(cache=True, nogil=True)
def _raster_kernel(tx, ty, td, tcol, img, zbuf):  # pragma: no cover - jitted
    # Serial z-buffer fill: triangles in order, interior then outline, so that
    # equal-depth collisions always keep the earlier write.
    ntri = tx.shape[0]
    height = zbuf.shape[0]
    width = zbuf.shape[1]
    for t in range(ntri):
        x0 = tx[t, 0]; x1 = tx[t, 1]; x2 = tx[t, 2]
        y0 = ty[t, 0]; y1 = ty[t, 1]; y2 = ty[t, 2]
        d0 = td[t, 0]; d1 = td[t, 1]; d2 = td[t, 2]
        r = tcol[t, 0]; g = tcol[t, 1]; b = tcol[t, 2]
        area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area != 0.0:
            inv = 1.0 / area
            xlo = min(x0, min(x1, x2)); xhi = max(x0, max(x1, x2))
            ylo = min(y0, min(y1, y2)); yhi = max(y0, max(y1, y2))
            c0 = int(math.floor(xlo - 0.5))
            c1 = int(math.ceil(xhi - 0.5))
            r0 = int(math.floor(ylo - 0.5))
            r1 = int(math.ceil(yhi - 0.5))
            if c0 < 0: c0 = 0
            if r0 < 0: r0 = 0
            if c1 > width - 1: c1 = width - 1
            if r1 > height - 1: r1 = height - 1
            for row in range(r0, r1 + 1):
                py = row + 0.5
                for col in range(c0, c1 + 1):
                    px = col + 0.5
                    e01 = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0)
                    e12 = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
                    e20 = (x0 - x2) * (py - y2) - (y0 - y2) * (px - x2)
                    if area > 0.0:
                        inside = e01 >= 0.0 and e12 >= 0.0 and e20 >= 0.0
                    else:
                        inside = e01 <= 0.0 and e12 <= 0.0 and e20 <= 0.0
                    if inside:
                        depth = (e12 * d0 + e20 * d1 + e01 * d2) * inv
                        if depth > zbuf[row, col]:
                            zbuf[row, col] = depth
                            img[row, col, 0] = r
                            img[row, col, 1] = g
                            img[row, col, 2] = b
        for k in range(3):
            if k == 0:
                ax = x0; ay = y0; ad = d0; bx = x1; by = y1; bd = d1
            elif k == 1:
                ax = x1; ay = y1; ad = d1; bx = x2; by = y2; bd = d2
            else:
                ax = x2; ay = y2; ad = d2; bx = x0; by = y0; bd = d0
            ddx = bx - ax
            ddy = by - ay
            steps = int(max(abs(ddx), abs(ddy))) + 1
            for s in range(steps + 1):
                f = s / steps
                px = ax + ddx * f
                py = ay + ddy * f
                depth = ad + (bd - ad) * f
                col = int(math.floor(px))
                row = int(math.floor(py))
                if 0 <= col < width and 0 <= row < height:
                    if depth > zbuf[row, col]:
                        zbuf[row, col] = depth
                        img[row, col, 0] = r
                        img[row, col, 1] = g
                        img[row, col, 2] = b


def _surface_triangles(height: int, width: int) -> np.ndarray:
    """Triangle index array for the grid: per 2x2 cell, row-major, the
    (i, j)-corner triangle first, then its partner."""
    i, j = np.meshgrid(np.arange(height - 1), np.arange(width - 1), indexing="ij")
    v00 = (i * width + j).ravel()
    v01 = v00 + 1
    v10 = v00 + width
    v11 = v10 + 1
    tri_a = np.column_stack([v00, v01, v10])
    tri_b = np.column_stack([v01, v11, v10])
    out = np.empty((2 * tri_a.shape[0], 3), dtype=np.int64)
    out[0::2] = tri_a
    out[1::2] = tri_b
    return out


def render_surface(surf: SurfaceGrid, pose: ViewPose, settings: RenderSettings | None = None) -> RasterImage:
    """Project the surface along the pose's line of sight and rasterize it.

    Each grid cell contributes two flat-shaded triangles (mean of corner
    colors); nearer fragments win the z-buffer, ties keep the earlier
    triangle.  The projection is centered and scaled to fill 95% of the
    frame.  A single-row or single-column surface degenerates to a line
    strip.  The result depends only on the inputs, bit for bit.
    """
    if settings is None:
        settings = RenderSettings()
    out_w, out_h = settings.out_width, settings.out_height

    right, up, view = view_basis(pose)
    verts = np.column_stack(
        [
            surf.xgrid.ravel(),
            surf.ygrid.ravel(),
            surf.zgrid.ravel() * settings.z_exaggeration,
        ]
    )
    sx = verts @ right
    sy = verts @ up
    depth = verts @ view

    ext_x = float(sx.max() - sx.min())
    ext_y = float(sy.max() - sy.min())
    scale_opts = []
    if ext_x > 0:
        scale_opts.append(0.95 * out_w / ext_x)
    if ext_y > 0:
        scale_opts.append(0.95 * out_h / ext_y)
    scale = min(scale_opts) if scale_opts else 1.0

    cx = (float(sx.max()) + float(sx.min())) / 2.0
    cy = (float(sy.max()) + float(sy.min())) / 2.0
    px = out_w / 2.0 + (sx - cx) * scale
    py = out_h / 2.0 - (sy - cy) * scale

    colors_flat = surf.colorgrid.reshape(-1, 3)
    if surf.height == 1 or surf.width == 1:
        n = surf.height * surf.width
        if n < 2:
            tris = np.empty((0, 3), dtype=np.int64)
        else:
            a = np.arange(n - 1)
            tris = np.column_stack([a, a + 1, a + 1])
        shade = colors_flat[tris[:, 0]].astype(np.float64)
        shade = (shade + colors_flat[tris[:, 1]]) / 2.0
    else:
        tris = _surface_triangles(surf.height, surf.width)
        shade = colors_flat[tris].astype(np.float64).mean(axis=1)
    tcol = np.clip(np.rint(shade), 0, 255).astype(np.uint8)

    img = np.empty((out_h, out_w, 3), dtype=np.uint8)
    img[:, :] = np.asarray(settings.background, dtype=np.uint8)
    zbuf = np.full((out_h, out_w), -np.inf)
    if tris.shape[0]:
        _raster_kernel(
            np.ascontiguousarray(px[tris]),
            np.ascontiguousarray(py[tris]),
            np.ascontiguousarray(depth[tris]),
            tcol,
            img,
            zbuf,
        )
    return RasterImage(img)


def coverage_fraction(render: RasterImage, background=(255, 255, 255)) -> float:
    """Fraction of pixels that differ from the background color."""
    bg = np.asarray(background, dtype=np.uint8)
    if bg.shape != (3,):
        raise ValueError("background must be an RGB triple")
    return float(np.any(render.pixels != bg, axis=2).mean())
