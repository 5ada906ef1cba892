"""End-to-end run: load, preprocess, reconstruct, render, optionally mesh.

The pipeline stages are, in order: load -> Lanczos upscale -> grayscale ->
outlier rescale -> 3x3 convolve -> background mask / color grid -> surface
-> one render per pose -> optional printable mesh + STL.  With preprocessing
disabled the upscale/rescale/convolve trio is skipped and every later stage
runs unchanged on the original-size image.

Each run writes a line-oriented ``manifest.txt`` (``key=value`` records)
covering the input hash, the effective configuration, every output file, and
per-stage wall times.  Any stage failure raises PipelineError tagged with the
stage name after removing files written so far.
"""

from __future__ import annotations

import hashlib
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .preprocess import Kernel3x3, convolve2d, lanczos_upscale, rescale_outliers
from .printmesh import default_base_offset, default_z_scale, export_stl, surface_to_mesh, validate_mesh
from .raster import load_image, rgb_to_gray, save_image
from .surface import build_color_grid, build_surface, extract_background_mask
from .viewer import RenderSettings, ViewPose, render_surface

THREADS_ENV_VAR = "CE_SURF_THREADS"
DEFAULT_POSES = (ViewPose(0.0, -80.0), ViewPose(0.0, 0.0))


class PipelineError(Exception):
    """A stage failed; ``stage`` names it and the message carries the cause."""

    def __init__(self, stage: str, message: str):
        super().__init__("[%s] %s" % (stage, message))
        self.stage = stage


@dataclass
class PipelineConfig:
    """Everything a run needs; field defaults mirror the CLI defaults."""

    input_path: str
    output_dir: str
    scale_ratio: int = 2
    k_sigma: float = 2.0
    kernel: Kernel3x3 = field(default_factory=Kernel3x3.uniform)
    mask_threshold: int = 10
    poses: tuple = DEFAULT_POSES
    preprocess_enabled: bool = True
    stl_enabled: bool = False
    z_scale: float | None = None
    base_offset: float | None = None
    render: RenderSettings = field(default_factory=RenderSettings)
    threads: int = 0


def _validate_config(cfg: PipelineConfig) -> None:
    if isinstance(cfg.scale_ratio, bool) or not isinstance(cfg.scale_ratio, int):
        raise ValueError("scale_ratio must be an integer")
    if cfg.scale_ratio < 1:
        raise ValueError("scale_ratio must be >= 1")
    if not cfg.k_sigma > 0:
        raise ValueError("k_sigma must be positive")
    if not isinstance(cfg.kernel, Kernel3x3):
        raise ValueError("kernel must be a Kernel3x3")
    if not (0 <= cfg.mask_threshold <= 255):
        raise ValueError("mask_threshold must be in [0, 255]")
    if not cfg.poses:
        raise ValueError("at least one view pose is required")
    for p in cfg.poses:
        if not isinstance(p, ViewPose):
            raise ValueError("poses must be ViewPose instances")
    if cfg.z_scale is not None and not cfg.z_scale > 0:
        raise ValueError("z_scale must be positive")
    if cfg.base_offset is not None and not cfg.base_offset > 0:
        raise ValueError("base_offset must be positive")
    if cfg.threads < 0:
        raise ValueError("threads must be >= 0")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _pose_name(pose: ViewPose) -> str:
    return "render_az%g_el%g.png" % (pose.azimuth_deg, pose.elevation_deg)


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute the full pipeline; returns the manifest as an ordered dict."""
    outdir = Path(cfg.output_dir)
    written: list[Path] = []
    entries: dict[str, str] = {"tool": "ce-surf"}
    timings: list[tuple[str, float]] = []

    @contextmanager
    def stage(name: str):
        t0 = time.perf_counter()
        try:
            yield
        except PipelineError:
            raise
        except Exception as e:
            raise PipelineError(name, str(e)) from e
        timings.append((name, time.perf_counter() - t0))

    def emit(img, name: str):
        path = outdir / name
        save_image(img, path)
        written.append(path)
        entries["output.%s" % name] = name

    try:
        with stage("setup"):
            _validate_config(cfg)
            outdir.mkdir(parents=True, exist_ok=True)

        with stage("load"):
            img = load_image(cfg.input_path)
            digest = hashlib.sha256(Path(cfg.input_path).read_bytes()).hexdigest()
            entries["input"] = str(cfg.input_path)
            entries["input_sha256"] = digest
            entries["input_size"] = "%dx%d" % (img.width, img.height)

        entries["preprocess"] = _fmt(cfg.preprocess_enabled)
        entries["scale_ratio"] = _fmt(cfg.scale_ratio)
        entries["k_sigma"] = _fmt(cfg.k_sigma)
        entries["kernel"] = ",".join(repr(float(v)) for v in cfg.kernel.weights.ravel())
        entries["mask_threshold"] = _fmt(cfg.mask_threshold)
        entries["color_path"] = "upscaled color convolved with the same kernel; mask taken from it"
        for idx, pose in enumerate(cfg.poses):
            entries["pose.%d" % idx] = "%g,%g" % (pose.azimuth_deg, pose.elevation_deg)
        entries["render_size"] = "%dx%d" % (cfg.render.out_width, cfg.render.out_height)

        with stage("preprocess"):
            if cfg.preprocess_enabled:
                color = lanczos_upscale(img, cfg.scale_ratio)
                gray = rgb_to_gray(color)
                gray = rescale_outliers(gray, cfg.k_sigma)
                gray = convolve2d(gray, cfg.kernel)
                color = convolve2d(color, cfg.kernel)
            else:
                color = img
                gray = rgb_to_gray(img)
            emit(gray, "gray.png")
            emit(color, "color.png")
            entries["working_size"] = "%dx%d" % (color.width, color.height)

        with stage("surface"):
            mask = extract_background_mask(color, cfg.mask_threshold)
            cgrid = build_color_grid(color, mask)
            emit(cgrid, "color_grid.png")
            surf = build_surface(gray, cgrid)
            entries["background_pixels"] = str(mask.background_count)

        with stage("render"):
            if cfg.threads > 0:
                workers = cfg.threads
            else:
                workers = min(len(cfg.poses), os.cpu_count() or 1)
            workers = max(1, min(workers, len(cfg.poses)))
            entries["render_threads"] = str(workers)
            if workers == 1:
                renders = [render_surface(surf, p, cfg.render) for p in cfg.poses]
            else:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    renders = list(
                        pool.map(lambda p: render_surface(surf, p, cfg.render), cfg.poses)
                    )
            for pose, rendered in zip(cfg.poses, renders):
                emit(rendered, _pose_name(pose))

        entries["stl"] = _fmt(cfg.stl_enabled)
        if cfg.stl_enabled:
            with stage("mesh"):
                z_scale = cfg.z_scale if cfg.z_scale is not None else default_z_scale(surf)
                base = cfg.base_offset if cfg.base_offset is not None else default_base_offset(surf)
                entries["z_scale"] = _fmt(float(z_scale))
                entries["base_offset"] = _fmt(float(base))
                mesh = surface_to_mesh(surf, base_offset=base, z_scale=z_scale)
                report = validate_mesh(mesh)
                if not report.passed:
                    raise ValueError("mesh validation failed: %s" % "; ".join(report.failures))
                entries["mesh_triangles"] = str(mesh.triangle_count)
                stl_path = outdir / "mesh.stl"
                export_stl(mesh, stl_path)
                written.append(stl_path)
                entries["output.mesh.stl"] = "mesh.stl"

        with stage("manifest"):
            entries["output.manifest.txt"] = "manifest.txt"
            for name, seconds in timings:
                entries["stage.%s.seconds" % name] = "%.6f" % seconds
            manifest_path = outdir / "manifest.txt"
            lines = ["%s=%s" % (k, v) for k, v in entries.items()]
            manifest_path.write_text("\n".join(lines) + "\n")
            written.append(manifest_path)
    except PipelineError:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise
    return entries
