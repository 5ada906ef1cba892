"""
Closing a surface into a printable solid
========================================

Turns a dome surface into a watertight mesh, checks the closed-solid
invariants, and writes a binary STL ready for a slicer.
"""

from pathlib import Path

from cesurf import (
    default_base_offset,
    default_z_scale,
    export_stl,
    hemisphere_surface,
    mesh_volume,
    surface_to_mesh,
    validate_mesh,
)

out = Path(__file__).parent / "output" / "04_solid"
out.mkdir(parents=True, exist_ok=True)

surf = hemisphere_surface(size=65, radius=32.0, amplitude=12.0)
print("surface grid:", surf.zgrid.shape)

# default print parameters: z range scales to 20% of the longer side,
# base thickness is 5% of it
z_scale = default_z_scale(surf)
base = default_base_offset(surf)
print("z_scale %.4f  base_offset %.2f" % (z_scale, base))

mesh = surface_to_mesh(surf, base_offset=base, z_scale=z_scale)
print("mesh: %d vertices, %d triangles" % (mesh.vertex_count, mesh.triangle_count))

report = validate_mesh(mesh)
print("edge manifold:", report.is_edge_manifold)
print("consistently oriented:", report.is_consistently_oriented)
print("euler characteristic:", report.euler_characteristic)
print("boundary edges:", report.boundary_edge_count)
print("enclosed volume: %.1f" % mesh_volume(mesh))
print("validation passed:", report.passed)

path = out / "dome.stl"
export_stl(mesh, path)
print("wrote %s (%d bytes = 84 + 50 * %d)" % (path, path.stat().st_size, mesh.triangle_count))
