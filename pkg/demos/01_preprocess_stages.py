"""
Preprocessing stages, one image at a time
=========================================

Runs a synthetic camera frame through each conditioning step and saves
the intermediate images so the effect of every stage is visible.
"""

from pathlib import Path

from cesurf import (
    Kernel3x3,
    compute_stats,
    convolve2d,
    lanczos_upscale,
    rescale_outliers,
    rgb_to_gray,
    save_image,
    textured_disc_frame,
)

out = Path(__file__).parent / "output" / "01_preprocess"
out.mkdir(parents=True, exist_ok=True)

frame = textured_disc_frame(size=200)
save_image(frame, out / "0_input.png")
print("input:", frame.width, "x", frame.height)

# Lanczos-3 upscale doubles both dimensions before anything else touches
# the pixels.
up = lanczos_upscale(frame, 2)
save_image(up, out / "1_upscaled.png")
print("upscaled:", up.width, "x", up.height)

gray = rgb_to_gray(up)
save_image(gray, out / "2_gray.png")

stats = compute_stats(gray)
print("gray mean %.3f  std %.3f  over %d pixels" % (stats.mean, stats.std, stats.count))

# Clamp to mean +/- 2 std, then stretch onto [0, 255]. Hot specks stop
# dominating the intensity range.
rescaled = rescale_outliers(gray, 2.0)
save_image(rescaled, out / "3_rescaled.png")
after = compute_stats(rescaled)
print("rescaled mean %.3f  std %.3f" % (after.mean, after.std))

smoothed = convolve2d(rescaled, Kernel3x3.uniform())
save_image(smoothed, out / "4_smoothed.png")

print("stage images written to", out)
