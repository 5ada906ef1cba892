import numpy as np
import pytest

from cesurf import (
    CorruptFileError,
    GrayImage,
    ImageSaveError,
    RasterImage,
    UnreadableFileError,
    UnsupportedFormatError,
    load_image,
    rgb_to_gray,
    save_image,
)


def test_rgb_to_gray_pure_red():
    img = RasterImage(np.full((3, 4, 3), (255, 0, 0), dtype=np.uint8))
    gray = rgb_to_gray(img)
    assert gray.values.shape == (3, 4)
    assert np.allclose(gray.values, 76.245, atol=1e-9)


def test_rgb_to_gray_weights_and_range(random_rgb):
    img = random_rgb(16, 16)
    gray = rgb_to_gray(img)
    px = img.pixels.astype(np.float64)
    expect = 0.299 * px[:, :, 0] + 0.587 * px[:, :, 1] + 0.114 * px[:, :, 2]
    assert np.array_equal(gray.values, expect)
    assert gray.values.min() >= 0.0 and gray.values.max() <= 255.0


def test_gray_is_float_not_quantized():
    img = RasterImage(np.full((1, 1, 3), (1, 1, 0), dtype=np.uint8))
    # 0.299 + 0.587 = 0.886 must survive, not round to an integer.
    assert abs(rgb_to_gray(img).values[0, 0] - 0.886) < 1e-12


def test_png_round_trip(tmp_path, random_rgb):
    img = random_rgb(13, 17)
    p = tmp_path / "t.png"
    save_image(img, p)
    back = load_image(p)
    assert np.array_equal(back.pixels, img.pixels)


def test_ppm_p6_input(tmp_path):
    # Hand-rolled binary PPM: 2x1, red then green.
    p = tmp_path / "t.ppm"
    p.write_bytes(b"P6\n2 1\n255\n" + bytes([255, 0, 0, 0, 255, 0]))
    img = load_image(p)
    assert img.width == 2 and img.height == 1
    assert tuple(img.pixels[0, 0]) == (255, 0, 0)
    assert tuple(img.pixels[0, 1]) == (0, 255, 0)


def test_rgba_alpha_dropped(tmp_path):
    from PIL import Image

    arr = np.zeros((2, 2, 4), dtype=np.uint8)
    arr[..., 0] = 9
    arr[..., 3] = 77
    p = tmp_path / "a.png"
    Image.fromarray(arr, mode="RGBA").save(p)
    img = load_image(p)
    assert img.pixels.shape == (2, 2, 3)
    assert np.array_equal(img.pixels[..., 0], np.full((2, 2), 9))


def test_load_missing_file(tmp_path):
    with pytest.raises(UnreadableFileError):
        load_image(tmp_path / "nope.png")


def test_load_corrupt_stream(tmp_path):
    p = tmp_path / "garbage.png"
    p.write_bytes(b"this is not an image at all")
    with pytest.raises(CorruptFileError):
        load_image(p)


def test_load_truncated_png(tmp_path, random_rgb):
    p = tmp_path / "whole.png"
    save_image(random_rgb(32, 32), p)
    clipped = tmp_path / "cut.png"
    clipped.write_bytes(p.read_bytes()[:60])
    with pytest.raises(CorruptFileError):
        load_image(clipped)


def test_load_unsupported_depth(tmp_path):
    from PIL import Image

    p = tmp_path / "deep.png"
    Image.new("I;16", (4, 4)).save(p)
    with pytest.raises(UnsupportedFormatError):
        load_image(p)


def test_save_into_missing_directory(tmp_path, random_rgb):
    with pytest.raises(ImageSaveError) as exc:
        save_image(random_rgb(2, 2), tmp_path / "no" / "dir" / "x.png")
    assert "x.png" in str(exc.value)


def test_raster_image_validation():
    with pytest.raises(ValueError):
        RasterImage(np.zeros((2, 2), dtype=np.uint8))
    with pytest.raises(ValueError):
        RasterImage(np.zeros((2, 2, 3), dtype=np.float64))
    with pytest.raises(ValueError):
        RasterImage(np.zeros((0, 2, 3), dtype=np.uint8))


def test_gray_image_rejects_non_finite():
    bad = np.ones((2, 2))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        GrayImage(bad)
    bad[0, 0] = np.inf
    with pytest.raises(ValueError):
        GrayImage(bad)


def test_images_are_immutable(random_rgb, random_gray):
    img = random_rgb()
    with pytest.raises(ValueError):
        img.pixels[0, 0, 0] = 1
    gray = random_gray()
    with pytest.raises(ValueError):
        gray.values[0, 0] = 1.0


def test_source_buffer_cannot_mutate_image():
    buf = np.zeros((2, 2, 3), dtype=np.uint8)
    img = RasterImage(buf)
    buf[0, 0, 0] = 99
    assert img.pixels[0, 0, 0] == 0


def test_gray_save_quantizes_only_at_boundary(tmp_path):
    gray = GrayImage(np.array([[0.4, 127.6], [254.5, 300.0]]))
    p = tmp_path / "g.png"
    save_image(gray, p)
    back = load_image(p)
    # round half to even at .5, clip above 255
    assert back.pixels[0, 0, 0] == 0
    assert back.pixels[0, 1, 0] == 128
    assert back.pixels[1, 0, 0] == 254
    assert back.pixels[1, 1, 0] == 255
