"""Printable solid construction from a height-field surface.

The solid is the surface sheet extruded down to a flat base: H*W top
vertices, four bottom corners, a two-triangle bottom quad, and side walls
stitched against the boundary ring.  Windings face outward (counter-
clockwise seen from outside) so the signed volume of a valid mesh is
positive.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .surface import SurfaceGrid

STL_HEADER_TEXT = b"ce-surf heightfield v1"
STL_RECORD_BYTES = 50  # 12 f32 + u16 attribute


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Indexed triangle soup: vertices (N, 3) float64, triangles (F, 3) int."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        t = np.asarray(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must be (N, 3)")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError("triangles must be (F, 3)")
        if not np.isfinite(v).all():
            raise ValueError("vertex coordinates must be finite")
        for name, arr in (("vertices", v), ("triangles", t)):
            if arr.flags.writeable:
                arr = arr.copy()
                arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    @property
    def triangle_count(self) -> int:
        return self.triangles.shape[0]


def default_z_scale(surf: SurfaceGrid) -> float:
    """Scale so the printed Z range is 20% of the longer footprint side;
    1.0 for a flat surface."""
    zrange = float(surf.zgrid.max() - surf.zgrid.min())
    if zrange == 0.0:
        return 1.0
    longer = max(surf.width - 1, surf.height - 1)
    return 0.2 * longer / zrange


def default_base_offset(surf: SurfaceGrid) -> float:
    """Base thickness below min Z: 5% of the longer footprint side."""
    return 0.05 * max(surf.width - 1, surf.height - 1)


def _oriented(a, b, c):
    # Order a 2-d triangle counterclockwise; the caller guarantees it is not
    # degenerate.
    ia, ua = a
    ib, ub = b
    ic, uc = c
    s = (ub[0] - ua[0]) * (uc[1] - ua[1]) - (ub[1] - ua[1]) * (uc[0] - ua[0])
    if s > 0:
        return (ia, ib, ic)
    return (ia, ic, ib)


def _triangulate_wall(chain, bl, br):
    """Triangulate one side wall without zero-area triangles.

    ``chain`` is the list of (vertex index, (u, w)) top points in increasing
    u; ``bl``/``br`` are the bottom corners under its ends.  The wall polygon
    is x-monotone with a flat base, so a single sweep clipping strictly
    convex top vertices leaves a convex remainder that a greedy positive-area
    ear clip finishes.  Triangles come out counterclockwise in (u, w), which
    the caller's axis choice turns into outward-facing windings.
    """
    pts = [bl] + list(chain) + [br]
    tris = []
    stack = [pts[0], pts[1]]
    for v in pts[2:]:
        while len(stack) >= 2:
            _, ua = stack[-2]
            _, ub = stack[-1]
            _, uv = v
            turn = (ub[0] - ua[0]) * (uv[1] - ub[1]) - (ub[1] - ua[1]) * (uv[0] - ub[0])
            if turn < 0.0:  # strict peak: clip it
                tris.append(_oriented(stack[-2], stack[-1], v))
                stack.pop()
            else:
                break
        stack.append(v)
    # Remainder is convex: base edge plus a chain with no strict peaks.
    poly = [stack[0]] + stack[:0:-1]
    while len(poly) >= 3:
        if len(poly) == 3:
            a, b, c = poly
            s = (b[1][0] - a[1][0]) * (c[1][1] - a[1][1]) - (b[1][1] - a[1][1]) * (
                c[1][0] - a[1][0]
            )
            if s != 0.0:
                tris.append(_oriented(a, b, c))
            break
        clipped = False
        for i in range(1, len(poly) - 1):
            a, b, c = poly[i - 1], poly[i], poly[i + 1]
            s = (b[1][0] - a[1][0]) * (c[1][1] - a[1][1]) - (b[1][1] - a[1][1]) * (
                c[1][0] - a[1][0]
            )
            if s > 0.0:
                tris.append((a[0], b[0], c[0]))
                del poly[i]
                clipped = True
                break
        if not clipped:
            # All remaining vertices collinear; nothing left to fill.
            break
    return tris


def surface_to_mesh(surf: SurfaceGrid, base_offset: float | None = None,
                    z_scale: float | None = None) -> TriangleMesh:
    """Close the height field into a watertight solid.

    Top sheet: two triangles per grid cell at Z * z_scale.  Bottom: a single
    quad at min(Z * z_scale) - base_offset spanning the footprint.  Side
    walls join the sheet boundary to the four bottom corners.  Requires at
    least a 2x2 grid, base_offset > 0 and z_scale > 0.
    """
    if surf.height < 2 or surf.width < 2:
        raise ValueError("mesh construction needs at least a 2x2 surface")
    if z_scale is None:
        z_scale = default_z_scale(surf)
    if base_offset is None:
        base_offset = default_base_offset(surf)
    if not base_offset > 0:
        raise ValueError("base_offset must be positive, got %r" % (base_offset,))
    if not z_scale > 0:
        raise ValueError("z_scale must be positive, got %r" % (z_scale,))

    h, w = surf.height, surf.width
    n = h * w
    ztop = surf.zgrid * z_scale
    zbase = float(ztop.min()) - base_offset
    xmax = float(surf.xgrid[0, -1])
    ymax = float(surf.ygrid[-1, 0])

    verts = np.empty((n + 4, 3), dtype=np.float64)
    verts[:n, 0] = surf.xgrid.ravel()
    verts[:n, 1] = surf.ygrid.ravel()
    verts[:n, 2] = ztop.ravel()
    sw, se, ne, nw = n, n + 1, n + 2, n + 3
    verts[sw] = (0.0, 0.0, zbase)
    verts[se] = (xmax, 0.0, zbase)
    verts[ne] = (xmax, ymax, zbase)
    verts[nw] = (0.0, ymax, zbase)

    # Top sheet, counterclockwise from above.
    i, j = np.meshgrid(np.arange(h - 1), np.arange(w - 1), indexing="ij")
    v00 = (i * w + j).ravel()
    v01 = v00 + 1
    v10 = v00 + w
    v11 = v10 + 1
    top = np.empty((2 * v00.size, 3), dtype=np.int64)
    top[0::2] = np.column_stack([v00, v01, v10])
    top[1::2] = np.column_stack([v01, v11, v10])

    bottom = np.array([[sw, nw, ne], [sw, ne, se]], dtype=np.int64)

    # Walls in (u, w)-plane coordinates chosen so counterclockwise triangles
    # face outward: south u=+x, north u=-x, west u=-y, east u=+y.
    zt = ztop
    def top_pt(i_, j_, u):
        return (i_ * w + j_, (u, float(zt[i_, j_])))

    walls = []
    south = [top_pt(0, j_, float(j_)) for j_ in range(w)]
    walls += _triangulate_wall(south, (sw, (0.0, zbase)), (se, (xmax, zbase)))
    north = [top_pt(h - 1, j_, xmax - float(j_)) for j_ in range(w - 1, -1, -1)]
    walls += _triangulate_wall(north, (ne, (0.0, zbase)), (nw, (xmax, zbase)))
    west = [top_pt(i_, 0, ymax - float(i_)) for i_ in range(h - 1, -1, -1)]
    walls += _triangulate_wall(west, (nw, (0.0, zbase)), (sw, (ymax, zbase)))
    east = [top_pt(i_, w - 1, float(i_)) for i_ in range(h)]
    walls += _triangulate_wall(east, (se, (0.0, zbase)), (ne, (ymax, zbase)))

    tris = np.concatenate([top, bottom, np.asarray(walls, dtype=np.int64)])
    return TriangleMesh(vertices=verts, triangles=tris)


@dataclass
class MeshValidationReport:
    """Outcome of validate_mesh; ``passed`` summarizes the failure list."""

    vertex_count: int
    triangle_count: int
    edge_count: int
    euler_characteristic: int
    boundary_edge_count: int
    is_edge_manifold: bool
    is_consistently_oriented: bool
    degenerate_triangle_count: int
    signed_volume: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def mesh_volume(mesh: TriangleMesh) -> float:
    """Signed enclosed volume via the divergence theorem; positive for
    outward-facing windings."""
    v = mesh.vertices
    t = mesh.triangles
    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def validate_mesh(mesh: TriangleMesh) -> MeshValidationReport:
    """Check closed-solid invariants: valid indices, no degenerate triangles,
    every edge shared by exactly two consistently wound triangles, Euler
    characteristic 2, positive enclosed volume."""
    failures = []
    v = mesh.vertices
    t = mesh.triangles
    nvert = v.shape[0]
    ntri = t.shape[0]

    if ntri == 0 or nvert == 0:
        return MeshValidationReport(
            vertex_count=nvert, triangle_count=ntri, edge_count=0,
            euler_characteristic=nvert, boundary_edge_count=0,
            is_edge_manifold=False, is_consistently_oriented=False,
            degenerate_triangle_count=0, signed_volume=0.0,
            failures=["mesh is empty"],
        )
    if t.min() < 0 or t.max() >= nvert:
        return MeshValidationReport(
            vertex_count=nvert, triangle_count=ntri, edge_count=0,
            euler_characteristic=0, boundary_edge_count=0,
            is_edge_manifold=False, is_consistently_oriented=False,
            degenerate_triangle_count=0, signed_volume=0.0,
            failures=["triangle indices out of range"],
        )

    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    # Repeated-index triangles also land here: their cross product is zero.
    cross = np.cross(b - a, c - a)
    degen = int(((cross * cross).sum(axis=1) == 0.0).sum())
    if degen:
        failures.append("%d degenerate (zero-area) triangles" % degen)

    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    und = np.sort(directed, axis=1)
    und_keys = und[:, 0].astype(np.int64) * nvert + und[:, 1]
    uniq_und, und_counts = np.unique(und_keys, return_counts=True)
    edge_count = int(uniq_und.size)
    boundary = int((und_counts == 1).sum())
    manifold = bool((und_counts == 2).all())
    if boundary:
        failures.append("%d boundary edges" % boundary)
    if not manifold:
        failures.append("edges not shared by exactly two triangles")

    dir_keys = directed[:, 0].astype(np.int64) * nvert + directed[:, 1]
    oriented = bool(np.unique(dir_keys).size == dir_keys.size)
    if not oriented:
        failures.append("inconsistent winding (repeated directed edge)")

    euler = nvert - edge_count + ntri
    if euler != 2:
        failures.append("Euler characteristic %d, expected 2" % euler)

    volume = mesh_volume(mesh)
    if manifold and oriented and not volume > 0.0:
        failures.append("signed volume %g is not positive" % volume)

    return MeshValidationReport(
        vertex_count=nvert,
        triangle_count=ntri,
        edge_count=edge_count,
        euler_characteristic=euler,
        boundary_edge_count=boundary,
        is_edge_manifold=manifold,
        is_consistently_oriented=oriented,
        degenerate_triangle_count=degen,
        signed_volume=volume,
        failures=failures,
    )


def export_stl(mesh: TriangleMesh, path) -> None:
    """Write binary STL: the 80-byte header "ce-surf heightfield v1" (zero
    padded), u32 triangle count, then per triangle a unit normal computed
    from the winding and three float32 vertices plus a zero u16 attribute.
    File size is exactly 84 + 50 * triangle_count bytes.
    """
    p = Path(path)
    t = mesh.triangles
    v = mesh.vertices
    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    normals = np.cross(b - a, c - a)
    lengths = np.sqrt((normals * normals).sum(axis=1))
    safe = np.where(lengths > 0.0, lengths, 1.0)
    normals = normals / safe[:, None]

    record = np.zeros(
        t.shape[0],
        dtype=np.dtype(
            [
                ("normal", "<f4", 3),
                ("a", "<f4", 3),
                ("b", "<f4", 3),
                ("c", "<f4", 3),
                ("attr", "<u2"),
            ]
        ),
    )
    record["normal"] = normals
    record["a"] = a
    record["b"] = b
    record["c"] = c
    header = STL_HEADER_TEXT.ljust(80, b"\x00")
    with open(p, "wb") as fh:
        fh.write(header)
        fh.write(struct.pack("<I", t.shape[0]))
        fh.write(record.tobytes())
