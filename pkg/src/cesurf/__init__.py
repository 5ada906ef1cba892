"""cesurf: colored height-field surfaces from small 8-bit camera frames.

Pipeline: Lanczos-3 upscaling and intensity conditioning, surface
reconstruction (X/Y lattice, Z from luma, whitened background colors),
orthographic line-of-sight rendering, and watertight STL export.
"""

from .raster import (
    CorruptFileError,
    GrayImage,
    ImageIOError,
    ImageSaveError,
    LUMA_WEIGHTS,
    RasterImage,
    UnreadableFileError,
    UnsupportedFormatError,
    load_image,
    rgb_to_gray,
    save_image,
)
from .preprocess import (
    Kernel3x3,
    RescaleBounds,
    StatsSummary,
    compute_stats,
    convolve2d,
    lanczos_kernel,
    lanczos_upscale,
    rescale_outliers,
)
from .surface import (
    BackgroundMask,
    SURFACE_MAGIC,
    SurfaceGrid,
    build_color_grid,
    build_surface,
    extract_background_mask,
    load_surface,
    save_surface,
)
from .synthetic import (
    disc_on_black,
    hemisphere_gray,
    hemisphere_surface,
    textured_disc_frame,
)
from .viewer import (
    RenderSettings,
    ViewPose,
    coverage_fraction,
    line_of_sight,
    render_surface,
    view_basis,
)
from .printmesh import (
    MeshValidationReport,
    TriangleMesh,
    default_base_offset,
    default_z_scale,
    export_stl,
    mesh_volume,
    surface_to_mesh,
    validate_mesh,
)
from .pipeline import PipelineConfig, PipelineError, run_pipeline

__version__ = "0.1.0"
