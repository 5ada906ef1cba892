"""Command-line entry point: ce-surf <input> -o <dir> [options]."""

from __future__ import annotations

import argparse
import os
import sys

from .pipeline import THREADS_ENV_VAR, DEFAULT_POSES, PipelineConfig, PipelineError, run_pipeline
from .preprocess import Kernel3x3
from .viewer import ViewPose


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ce-surf",
        description="Reconstruct a colored 3D height-field surface from an 8-bit "
        "RGB frame, render it along chosen lines of sight, and optionally "
        "export a printable STL solid.",
    )
    parser.add_argument("input", help="input image (PNG; binary PPM accepted)")
    parser.add_argument("-o", "--output", required=True, metavar="DIR",
                        help="directory for all artifacts")
    parser.add_argument("--scale", type=int, default=2, metavar="N",
                        help="integer upscale ratio (default 2)")
    parser.add_argument("--k-sigma", type=float, default=2.0, metavar="F",
                        help="std-dev multiplier for outlier rescaling (default 2)")
    parser.add_argument("--kernel", metavar="w1,...,w9",
                        help="nine comma-separated convolution weights, row-major "
                        "(default: uniform 1/9)")
    parser.add_argument("--mask-threshold", type=int, default=10, metavar="T",
                        help="background-mask intensity threshold (default 10)")
    parser.add_argument("--az", type=float, action="append", metavar="A",
                        help="view azimuth in degrees (repeatable, pairs with --el)")
    parser.add_argument("--el", type=float, action="append", metavar="E",
                        help="view elevation in degrees (repeatable, pairs with --az)")
    parser.add_argument("--no-preprocess", action="store_true",
                        help="skip upscaling, rescaling and convolution")
    parser.add_argument("--stl", action="store_true",
                        help="also export a watertight printable mesh.stl")
    parser.add_argument("--z-scale", type=float, default=None, metavar="F",
                        help="height multiplier for the printed solid "
                        "(default: Z range prints at 20%% of the longer side)")
    parser.add_argument("--base-offset", type=float, default=None, metavar="F",
                        help="base thickness below the lowest surface point "
                        "(default: 5%% of the longer side)")
    return parser


def _parse_kernel(text: str, parser: argparse.ArgumentParser) -> Kernel3x3:
    try:
        weights = [float(tok) for tok in text.split(",")]
        return Kernel3x3.from_flat(weights)
    except ValueError as e:
        parser.error("--kernel: %s" % e)


def _parse_poses(args, parser: argparse.ArgumentParser):
    az = args.az or []
    el = args.el or []
    if len(az) != len(el):
        parser.error("--az and --el must be given in pairs (%d vs %d)" % (len(az), len(el)))
    if not az:
        return DEFAULT_POSES
    try:
        return tuple(ViewPose(a, e) for a, e in zip(az, el))
    except ValueError as e:
        parser.error("invalid pose: %s" % e)


def _parse_threads(parser: argparse.ArgumentParser) -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return 0
    try:
        value = int(raw)
    except ValueError:
        parser.error("%s must be an integer, got %r" % (THREADS_ENV_VAR, raw))
    if value < 0:
        parser.error("%s must be >= 0" % THREADS_ENV_VAR)
    return value


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    kernel = _parse_kernel(args.kernel, parser) if args.kernel else Kernel3x3.uniform()
    cfg = PipelineConfig(
        input_path=args.input,
        output_dir=args.output,
        scale_ratio=args.scale,
        k_sigma=args.k_sigma,
        kernel=kernel,
        mask_threshold=args.mask_threshold,
        poses=_parse_poses(args, parser),
        preprocess_enabled=not args.no_preprocess,
        stl_enabled=args.stl,
        z_scale=args.z_scale,
        base_offset=args.base_offset,
        threads=_parse_threads(parser),
    )
    try:
        entries = run_pipeline(cfg)
    except PipelineError as e:
        print("ce-surf: error %s" % e, file=sys.stderr)
        return 2
    outputs = [v for k, v in entries.items() if k.startswith("output.")]
    print("wrote %d files to %s" % (len(outputs), args.output))
    return 0


if __name__ == "__main__":
    sys.exit(main())
