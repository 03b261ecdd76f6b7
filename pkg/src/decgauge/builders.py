"""Built-in mesh generators for disks, annuli, squares, strips, and 3D bodies.

These remove any external mesher dependency: every verification run works on
meshes constructed here.  Disks are regular N-gon fans of circumradius 1,
annuli two concentric N-gons, so areas and perimeters follow closed-form
polygon formulas in tests.
"""

from __future__ import annotations

import numpy as np

from .mesh import HypersurfaceMesh, MeshError, RegionMesh, SimplicialComplex


def disk(n: int = 16) -> RegionMesh:
    """Regular n-gon fan of circumradius 1 with a single labeled rim."""
    if n < 3:
        raise MeshError("disk needs at least 3 rim vertices")
    angles = 2 * np.pi * np.arange(n) / n
    coords = np.vstack([[0.0, 0.0], np.column_stack([np.cos(angles), np.sin(angles)])])
    cells = [(0, 1 + k, 1 + (k + 1) % n) for k in range(n)]
    cx = SimplicialComplex(n + 1, cells, coordinates=coords)
    rim = {
        cx.index[1][tuple(sorted((1 + k, 1 + (k + 1) % n)))] for k in range(n)
    }
    return RegionMesh(cx, face_labels={"rim": rim}, name=f"disk:N={n}")


def annulus(n: int = 16, inner_radius: float = 0.5) -> RegionMesh:
    """Annulus between concentric regular n-gons, faces "inner" and "outer"."""
    if n < 3:
        raise MeshError("annulus needs at least 3 vertices per ring")
    if not 0 < inner_radius < 1:
        raise MeshError("inner radius must lie in (0, 1)")
    angles = 2 * np.pi * np.arange(n) / n
    outer = np.column_stack([np.cos(angles), np.sin(angles)])
    inner = inner_radius * outer
    coords = np.vstack([outer, inner])
    cells = []
    for k in range(n):
        a, b = k, (k + 1) % n
        cells.append((a, b, n + a))
        cells.append((b, n + b, n + a))
    cx = SimplicialComplex(2 * n, cells, coordinates=coords)
    outer_f = {cx.index[1][tuple(sorted((k, (k + 1) % n)))] for k in range(n)}
    inner_f = {
        cx.index[1][tuple(sorted((n + k, n + (k + 1) % n)))] for k in range(n)
    }
    return RegionMesh(
        cx,
        face_labels={"outer": outer_f, "inner": inner_f},
        name=f"annulus:N={n}",
    )


def square_annulus() -> RegionMesh:
    """The 8-triangle square annulus between [-2,2]^2 and [-1,1]^2."""
    outer = np.array([[2, 2], [-2, 2], [-2, -2], [2, -2]], dtype=float)
    inner = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=float)
    coords = np.vstack([outer, inner])
    cells = []
    for k in range(4):
        a, b = k, (k + 1) % 4
        cells.append((a, b, 4 + a))
        cells.append((b, 4 + b, 4 + a))
    cx = SimplicialComplex(8, cells, coordinates=coords)
    outer_f = {cx.index[1][tuple(sorted((k, (k + 1) % 4)))] for k in range(4)}
    inner_f = {cx.index[1][tuple(sorted((4 + k, 4 + (k + 1) % 4)))] for k in range(4)}
    return RegionMesh(
        cx, face_labels={"outer": outer_f, "inner": inner_f}, name="ann8"
    )


def _grid_region(nx: int, ny: int, width: float, height: float, name: str) -> RegionMesh:
    """Axis-aligned rectangle triangulated on an (nx+1) x (ny+1) grid."""
    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    coords = np.array([[x, y] for y in ys for x in xs])
    vid = lambda i, j: j * (nx + 1) + i
    cells = []
    for j in range(ny):
        for i in range(nx):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i, j + 1), vid(i + 1, j + 1)
            cells.append((a, b, d))
            cells.append((a, d, c))
    cx = SimplicialComplex((nx + 1) * (ny + 1), cells, coordinates=coords)
    south = {cx.index[1][tuple(sorted((vid(i, 0), vid(i + 1, 0))))] for i in range(nx)}
    north = {
        cx.index[1][tuple(sorted((vid(i, ny), vid(i + 1, ny))))] for i in range(nx)
    }
    west = {cx.index[1][tuple(sorted((vid(0, j), vid(0, j + 1))))] for j in range(ny)}
    east = {
        cx.index[1][tuple(sorted((vid(nx, j), vid(nx, j + 1))))] for j in range(ny)
    }
    return RegionMesh(
        cx,
        face_labels={"south": south, "east": east, "north": north, "west": west},
        name=name,
    )


def square(n: int = 2) -> RegionMesh:
    """Unit square on an n x n grid with labeled sides (4 corner vertices)."""
    if n < 1:
        raise MeshError("square needs n >= 1")
    return _grid_region(n, n, 1.0, 1.0, f"square:N={n}")


def strip(n: int = 4, height: int = 1) -> RegionMesh:
    """A 1 x n strip of unit squares; gluing "west" to "east" gives an annulus."""
    if n < 2:
        raise MeshError("strip needs n >= 2 for a valid end-to-end gluing")
    return _grid_region(n, height, float(n), float(height), f"strip:N={n}")


def strip_end_matching(mesh: RegionMesh) -> dict:
    """Canonical vertex matching of a strip's west face onto its east face."""
    cx = mesh.complex
    for lab in ("west", "east"):
        if lab not in mesh.face_labels:
            raise MeshError("mesh has no west/east faces to match")
    coords = cx.coordinates
    west = sorted(
        {int(v) for f in mesh.face_labels["west"] for v in cx.simplices[1][f]},
        key=lambda v: coords[v][1],
    )
    east = sorted(
        {int(v) for f in mesh.face_labels["east"] for v in cx.simplices[1][f]},
        key=lambda v: coords[v][1],
    )
    return dict(zip(west, east))


def tetrahedron() -> RegionMesh:
    """A single solid tetrahedron with one label per boundary triangle."""
    coords = np.array(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    )
    cx = SimplicialComplex(4, [(0, 1, 2, 3)], coordinates=coords)
    labels = {}
    for i, f in enumerate(map(tuple, cx.simplices[2])):
        labels[f"f{i}"] = {cx.index[2][f]}
    return RegionMesh(cx, face_labels=labels, name="tetrahedron")


def solid_torus(k: int = 8, major_radius: float = 2.0) -> RegionMesh:
    """Solid torus from k triangular prisms around a circle, 3 tets each."""
    if k < 3:
        raise MeshError("solid torus needs at least 3 segments")
    section = np.array([[0.5, 0.0], [-0.25, 0.4], [-0.25, -0.4]])
    coords = []
    for s in range(k):
        theta = 2 * np.pi * s / k
        for r, z in section:
            coords.append(
                [
                    (major_radius + r) * np.cos(theta),
                    (major_radius + r) * np.sin(theta),
                    z,
                ]
            )
    coords = np.asarray(coords)

    def vid(s, j):
        return 3 * (s % k) + j

    cells = []
    for s in range(k):
        a = [vid(s, j) for j in range(3)]
        b = [vid(s + 1, j) for j in range(3)]
        for tet in ((a[0], a[1], a[2], b[2]), (a[0], a[1], b[1], b[2]),
                    (a[0], b[0], b[1], b[2])):
            p = coords[list(tet)]
            det = np.linalg.det(p[1:] - p[0])
            cells.append(tet if det > 0 else (tet[1], tet[0]) + tet[2:])
    cx = SimplicialComplex(3 * k, cells, coordinates=coords)
    shell = {int(f) for f in cx.boundary_facets()}
    return RegionMesh(cx, face_labels={"shell": shell}, name=f"solid_torus:K={k}")


def circle(n: int = 24, length: float = 2 * np.pi) -> HypersurfaceMesh:
    """Closed polygonal loop of n edges with total length as given."""
    if n < 3:
        raise MeshError("circle needs at least 3 edges")
    radius = length / (2 * n * np.sin(np.pi / n))
    angles = 2 * np.pi * np.arange(n) / n
    coords = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    cells = [(i, (i + 1) % n) for i in range(n)]
    cx = SimplicialComplex(n, cells, coordinates=coords)
    return HypersurfaceMesh(cx, orientation_sign=1)


_BUILDERS = {
    "disk": lambda **kw: disk(int(kw.get("N", 16))),
    "annulus": lambda **kw: annulus(int(kw.get("N", 16))),
    "ann8": lambda **kw: square_annulus(),
    "square": lambda **kw: square(int(kw.get("N", 2))),
    "strip": lambda **kw: strip(int(kw.get("N", 4))),
    "tetrahedron": lambda **kw: tetrahedron(),
    "solid_torus": lambda **kw: solid_torus(int(kw.get("K", 8))),
}


def from_spec(spec: str) -> RegionMesh:
    """Build a region from a spec string like ``disk:N=16`` or ``ann8``."""
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name not in _BUILDERS:
        raise MeshError(
            f"unknown builtin mesh {name!r}; known: {sorted(_BUILDERS)}"
        )
    kwargs = {}
    if args:
        for item in args.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise MeshError(f"malformed mesh spec argument {item!r}")
            try:
                kwargs[key.strip()] = int(value)
            except ValueError:
                raise MeshError(f"non-integer mesh spec argument {item!r}") from None
    try:
        return _BUILDERS[name](**kwargs)
    except TypeError as exc:
        raise MeshError(f"bad arguments for mesh {name!r}: {exc}") from None
