"""
How elevation changes what you see
==================================

Sweeps the camera elevation over a dome and tabulates the on-screen
coverage, then compares the rendered footprint of the steep view with
the closed-form projected extents of the surface bounding box.
"""

import math
from pathlib import Path

import numpy as np

from cesurf import (
    RenderSettings,
    ViewPose,
    coverage_fraction,
    hemisphere_surface,
    render_surface,
    save_image,
)

out = Path(__file__).parent / "output" / "03_sweep"
out.mkdir(parents=True, exist_ok=True)

surf = hemisphere_surface(size=129, radius=64.0, amplitude=16.0)
settings = RenderSettings(out_width=320, out_height=320)

print("elevation   coverage")
for el in range(-90, 1, 10):
    render = render_surface(surf, ViewPose(0.0, el), settings)
    print("   %4d     %.4f" % (el, coverage_fraction(render)))
    if el in (-80, -40, 0):
        save_image(render, out / ("sweep_el%d.png" % el))

# footprint check at el=-80: project the surface bounding box by hand.
# The box formula is tight only when the surface reaches the box corners,
# so use a low-relief dome for the comparison.
surf = hemisphere_surface(size=129, radius=64.0, amplitude=4.0)
el = -80.0
render = render_surface(surf, ViewPose(0.0, el), settings)
fg = np.any(render.pixels != 255, axis=2)
rows = np.nonzero(fg.any(axis=1))[0]
cols = np.nonzero(fg.any(axis=0))[0]

xr = float(surf.xgrid.max() - surf.xgrid.min())
yr = float(surf.ygrid.max() - surf.ygrid.min())
zr = float(surf.zgrid.max() - surf.zgrid.min())
s, c = abs(math.sin(math.radians(el))), abs(math.cos(math.radians(el)))
ew = xr                  # azimuth 0: width is the x extent
eh = s * yr + c * zr     # height mixes depth-extent and z-extent
scale = min(0.95 * 320 / ew, 0.95 * 320 / eh)

print("measured footprint: %d x %d px" % (cols[-1] - cols[0] + 1, rows[-1] - rows[0] + 1))
print("box projection:     %.1f x %.1f px" % (ew * scale, eh * scale))
print("images written to", out)
