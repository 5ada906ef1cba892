"""
From a flat frame to a colored surface
======================================

Builds the height-field surface for a frame (heights from luma, colors
from the background-whitened grid) and renders it from a few poses.
"""

from pathlib import Path

from cesurf import (
    Kernel3x3,
    RenderSettings,
    ViewPose,
    build_color_grid,
    build_surface,
    convolve2d,
    coverage_fraction,
    extract_background_mask,
    lanczos_upscale,
    render_surface,
    rescale_outliers,
    rgb_to_gray,
    save_image,
    save_surface,
    textured_disc_frame,
)

out = Path(__file__).parent / "output" / "02_surface"
out.mkdir(parents=True, exist_ok=True)

frame = textured_disc_frame(size=160)
color = convolve2d(lanczos_upscale(frame, 2), Kernel3x3.uniform())
gray = convolve2d(rescale_outliers(rgb_to_gray(lanczos_upscale(frame, 2)), 2.0),
                  Kernel3x3.uniform())

mask = extract_background_mask(color, threshold=10)
print("background pixels:", mask.background_count, "of", color.width * color.height)

grid = build_color_grid(color, mask)
surf = build_surface(gray, grid)
save_surface(surf, out / "surface.cesg")
print("surface grid:", surf.zgrid.shape, " z range %.1f..%.1f" % (surf.zgrid.min(), surf.zgrid.max()))

settings = RenderSettings(out_width=480, out_height=480)
for az, el in ((0.0, -80.0), (0.0, 0.0), (45.0, -45.0), (0.0, 90.0)):
    render = render_surface(surf, ViewPose(az, el), settings)
    name = "view_az%g_el%g.png" % (az, el)
    save_image(render, out / name)
    print("%-22s coverage %.3f" % (name, coverage_fraction(render)))

print("renders written to", out)
