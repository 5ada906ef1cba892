import hashlib

import numpy as np
import pytest

from cesurf import (
    PipelineConfig,
    PipelineError,
    RasterImage,
    RenderSettings,
    ViewPose,
    load_image,
    run_pipeline,
    save_image,
    textured_disc_frame,
)
from cesurf.cli import main
from cesurf.pipeline import THREADS_ENV_VAR

SMALL_RENDER = RenderSettings(out_width=64, out_height=64)


@pytest.fixture
def frame_path(tmp_path):
    path = tmp_path / "frame.png"
    save_image(textured_disc_frame(size=40), path)
    return path


def _config(frame_path, outdir, **kw):
    kw.setdefault("render", SMALL_RENDER)
    return PipelineConfig(input_path=str(frame_path), output_dir=str(outdir), **kw)


def _manifest_lines(outdir):
    return (outdir / "manifest.txt").read_text().splitlines()


# ------------------------------------------------------------------- runs ---

def test_default_run_artifacts(frame_path, tmp_path):
    outdir = tmp_path / "out"
    entries = run_pipeline(_config(frame_path, outdir))

    for name in ("gray.png", "color.png", "color_grid.png",
                 "render_az0_el-80.png", "render_az0_el0.png", "manifest.txt"):
        assert (outdir / name).exists(), name

    gray = load_image(outdir / "gray.png")
    assert (gray.width, gray.height) == (80, 80)  # 2x upscale of 40
    color = load_image(outdir / "color.png")
    assert (color.width, color.height) == (80, 80)
    rendered = load_image(outdir / "render_az0_el-80.png")
    assert (rendered.width, rendered.height) == (64, 64)

    assert entries["input_sha256"] == hashlib.sha256(frame_path.read_bytes()).hexdigest()
    assert entries["working_size"] == "80x80"
    assert entries["pose.0"] == "0,-80"
    assert entries["pose.1"] == "0,0"
    # nine plain decimal weights, no stray scalar-type wrappers
    weights = entries["kernel"].split(",")
    assert len(weights) == 9
    assert all(float(w) == pytest.approx(1 / 9) for w in weights)

    lines = _manifest_lines(outdir)
    assert all("=" in line for line in lines)
    keys = [line.split("=", 1)[0] for line in lines]
    for key in ("tool", "input", "input_sha256", "scale_ratio", "k_sigma",
                "kernel", "mask_threshold", "output.gray.png",
                "output.manifest.txt", "stage.load.seconds",
                "stage.render.seconds"):
        assert key in keys, key


def test_gray_render_is_white_backed(frame_path, tmp_path):
    outdir = tmp_path / "out"
    run_pipeline(_config(frame_path, outdir))
    render = load_image(outdir / "render_az0_el-80.png")
    # background of the frame is whitened, so the corner must be pure white
    assert tuple(render.pixels[0, 0]) == (255, 255, 255)
    assert np.any(render.pixels != 255)


def test_no_preprocess_keeps_dimensions(frame_path, tmp_path):
    outdir = tmp_path / "out"
    entries = run_pipeline(_config(frame_path, outdir, preprocess_enabled=False))
    assert entries["working_size"] == "40x40"
    gray = load_image(outdir / "gray.png")
    assert (gray.width, gray.height) == (40, 40)
    # disabled preprocessing must also skip the convolution: the input's
    # untouched pixels survive into color.png
    color = load_image(outdir / "color.png")
    assert np.array_equal(color.pixels, textured_disc_frame(size=40).pixels)


def test_stl_run_writes_mesh(frame_path, tmp_path):
    outdir = tmp_path / "out"
    entries = run_pipeline(_config(frame_path, outdir, stl_enabled=True))
    stl = outdir / "mesh.stl"
    assert stl.exists()
    ntri = int(entries["mesh_triangles"])
    assert stl.stat().st_size == 84 + 50 * ntri
    assert "z_scale" in entries and "base_offset" in entries


def test_single_pose_and_custom_kernel(frame_path, tmp_path):
    from cesurf import Kernel3x3

    outdir = tmp_path / "out"
    run_pipeline(_config(frame_path, outdir, poses=(ViewPose(10.0, -70.0),)))
    assert (outdir / "render_az10_el-70.png").exists()
    assert not (outdir / "render_az0_el0.png").exists()

    delta_dir = tmp_path / "delta"
    run_pipeline(_config(frame_path, delta_dir, kernel=Kernel3x3.delta()))
    uniform_dir = tmp_path / "uniform"
    run_pipeline(_config(frame_path, uniform_dir))
    a = load_image(delta_dir / "gray.png")
    b = load_image(uniform_dir / "gray.png")
    assert not np.array_equal(a.pixels, b.pixels)


# ---------------------------------------------------------------- failures ---

def test_missing_input_tagged_load(tmp_path):
    cfg = _config(tmp_path / "nope.png", tmp_path / "out")
    with pytest.raises(PipelineError) as exc:
        run_pipeline(cfg)
    assert exc.value.stage == "load"
    assert "[load]" in str(exc.value)


def test_bad_config_tagged_setup(frame_path, tmp_path):
    cfg = _config(frame_path, tmp_path / "out", scale_ratio=0)
    with pytest.raises(PipelineError) as exc:
        run_pipeline(cfg)
    assert exc.value.stage == "setup"


def test_midrun_failure_cleans_partial_outputs(tmp_path):
    # A single-row frame renders fine but cannot close into a solid, so the
    # mesh stage fails after several files were already written; the run must
    # remove them all.
    row = np.zeros((1, 6, 3), dtype=np.uint8)
    row[0, 2:5] = (200, 80, 80)
    path = tmp_path / "row.png"
    save_image(RasterImage(row), path)

    outdir = tmp_path / "out"
    cfg = _config(path, outdir, preprocess_enabled=False, stl_enabled=True)
    with pytest.raises(PipelineError) as exc:
        run_pipeline(cfg)
    assert exc.value.stage == "mesh"
    assert outdir.exists()
    assert list(outdir.iterdir()) == []


def test_output_dir_under_file_fails(frame_path, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    cfg = _config(frame_path, blocker / "out")
    with pytest.raises(PipelineError) as exc:
        run_pipeline(cfg)
    assert exc.value.stage == "setup"


# --------------------------------------------------------------------- cli ---

def test_cli_default_run(frame_path, tmp_path, capsys):
    outdir = tmp_path / "out"
    rc = main([str(frame_path), "-o", str(outdir)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "wrote" in out and str(outdir) in out
    assert (outdir / "render_az0_el-80.png").exists()
    assert (outdir / "render_az0_el0.png").exists()
    render = load_image(outdir / "render_az0_el-80.png")
    assert (render.width, render.height) == (640, 640)


def test_cli_flags(frame_path, tmp_path):
    outdir = tmp_path / "out"
    rc = main([str(frame_path), "-o", str(outdir),
               "--scale", "1", "--k-sigma", "1.5",
               "--kernel", "0,0,0,0,1,0,0,0,0",
               "--mask-threshold", "5",
               "--az", "15", "--el", "-60",
               "--stl", "--z-scale", "2.0", "--base-offset", "4.0"])
    assert rc == 0
    assert (outdir / "render_az15_el-60.png").exists()
    assert (outdir / "mesh.stl").exists()
    lines = _manifest_lines(outdir)
    assert "scale_ratio=1" in lines
    assert "k_sigma=1.5" in lines
    assert "mask_threshold=5" in lines
    assert "z_scale=2.0" in lines
    assert "base_offset=4.0" in lines


def test_cli_missing_input_rc2(tmp_path, capsys):
    rc = main([str(tmp_path / "nope.png"), "-o", str(tmp_path / "out")])
    assert rc == 2
    err = capsys.readouterr().err
    assert "ce-surf: error [load]" in err


def test_cli_pose_mismatch_exits(frame_path, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main([str(frame_path), "-o", str(tmp_path / "out"), "--az", "10"])
    assert exc.value.code == 2


def test_cli_bad_kernel_exits(frame_path, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main([str(frame_path), "-o", str(tmp_path / "out"), "--kernel", "1,2,3"])
    assert exc.value.code == 2


def test_cli_bad_pose_value_exits(frame_path, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main([str(frame_path), "-o", str(tmp_path / "out"),
              "--az", "0", "--el", "120"])
    assert exc.value.code == 2


# ----------------------------------------------------------------- threads ---

def test_threads_env_controls_pool(frame_path, tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "1")
    outdir = tmp_path / "serial"
    assert main([str(frame_path), "-o", str(outdir)]) == 0
    assert "render_threads=1" in _manifest_lines(outdir)

    monkeypatch.setenv(THREADS_ENV_VAR, "5")
    outdir = tmp_path / "capped"
    assert main([str(frame_path), "-o", str(outdir)]) == 0
    # pool never exceeds the number of poses
    assert "render_threads=2" in _manifest_lines(outdir)


def test_threads_env_rejects_garbage(frame_path, tmp_path, monkeypatch):
    monkeypatch.setenv(THREADS_ENV_VAR, "lots")
    with pytest.raises(SystemExit) as exc:
        main([str(frame_path), "-o", str(tmp_path / "out")])
    assert exc.value.code == 2


def test_thread_count_does_not_change_pixels(frame_path, tmp_path):
    poses = tuple(ViewPose(az, -55.0) for az in (0.0, 45.0, 90.0, 135.0))
    serial_dir = tmp_path / "serial"
    pooled_dir = tmp_path / "pooled"
    run_pipeline(_config(frame_path, serial_dir, poses=poses, threads=1))
    run_pipeline(_config(frame_path, pooled_dir, poses=poses, threads=4))
    for pose in poses:
        name = "render_az%g_el%g.png" % (pose.azimuth_deg, pose.elevation_deg)
        assert (serial_dir / name).read_bytes() == (pooled_dir / name).read_bytes()


# ----------------------------------------------------------- repeatability ---

def test_repeat_runs_identical(frame_path, tmp_path):
    first = tmp_path / "a"
    second = tmp_path / "b"
    run_pipeline(_config(frame_path, first, stl_enabled=True))
    run_pipeline(_config(frame_path, second, stl_enabled=True))

    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        if name == "manifest.txt":
            continue
        assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def stable(outdir):
        return [line for line in _manifest_lines(outdir)
                if not line.startswith("stage.")]

    assert stable(first) == stable(second)
