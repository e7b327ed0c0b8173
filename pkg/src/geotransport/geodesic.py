"""Spherical geodesic grid: icosahedron seed, refinement, and integration."""

from dataclasses import dataclass, field

import numpy as np

from .quadrature import integrate_projected_triangle

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def expected_counts(k: int):
    """Closed-form (points, edges, triangles) after k refinements."""
    if k < 0:
        raise ValueError(f"refinement level must be >= 0, got {k}")
    npts = 12 * 4**k - 6 * sum(4**i for i in range(k))
    return npts, 3 * (npts - 2), 2 * (npts - 2)


@dataclass(frozen=True)
class GeodesicGrid:
    """Refined icosahedral triangulation of the unit sphere.

    Triangles are consistently oriented outward (positive triple product of
    their vertices); edges are canonical (min, max) index pairs.
    """

    level: int
    vertices: np.ndarray  # (N, 3) unit vectors
    edges: np.ndarray  # (E, 2) int
    triangles: np.ndarray  # (T, 3) int
    vertex_neighbors: list = field(repr=False, default=None)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_areas(self):
        """Spherical-excess area of every triangle."""
        v = self.vertices[self.triangles]
        return _spherical_excess(v[:, 0], v[:, 1], v[:, 2])

    def vertex_triangles(self):
        """List of triangle indices incident to each vertex."""
        out = [[] for _ in range(self.n_vertices)]
        for t, tri in enumerate(self.triangles):
            for v in tri:
                out[v].append(t)
        return out


def _spherical_excess(a, b, c):
    # L'Huilier-free formula via the vector identity
    # tan(E/2) = |a.(b x c)| / (1 + a.b + b.c + c.a)
    num = np.abs(np.einsum("ij,ij->i", a, np.cross(b, c)))
    den = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum(
        "ij,ij->i", c, a
    )
    return 2.0 * np.arctan2(num, den)


def _canonical_triangle(tri):
    i = int(np.argmin(tri))
    return tuple(tri[(i + j) % 3] for j in range(3))


def _orient_outward(vertices, tri):
    a, b, c = (vertices[i] for i in tri)
    if np.dot(a, np.cross(b, c)) < 0.0:
        tri = (tri[0], tri[2], tri[1])
    return _canonical_triangle(tri)


def _edges_and_neighbors(n, triangles):
    edge_set = set()
    for a, b, c in triangles:
        edge_set.update(
            ((min(a, b), max(a, b)), (min(b, c), max(b, c)), (min(a, c), max(a, c)))
        )
    edges = np.array(sorted(edge_set), dtype=np.int64)
    neighbors = [[] for _ in range(n)]
    for a, b in edges:
        neighbors[a].append(int(b))
        neighbors[b].append(int(a))
    return edges, [sorted(nb) for nb in neighbors]


def build_base_icosahedron() -> GeodesicGrid:
    """The 12-vertex base grid, vertices in the three cyclic sign families."""
    phi = GOLDEN
    scale = 1.0 / np.sqrt(1.0 + phi * phi)
    verts = []
    signs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
    for s1, s2 in signs:
        verts.append((0.0, s1 * 1.0, s2 * phi))
    for s1, s2 in signs:
        verts.append((s1 * 1.0, s2 * phi, 0.0))
    for s1, s2 in signs:
        verts.append((s1 * phi, 0.0, s2 * 1.0))
    vertices = scale * np.array(verts)

    # Neighbors are the 5 nearest vertices; edge length is the minimum
    # pairwise distance, well separated from the next distance.
    d2 = np.sum((vertices[:, None, :] - vertices[None, :, :]) ** 2, axis=-1)
    edge2 = np.min(d2[d2 > 1e-12])
    adj = (d2 < edge2 * 1.5) & (d2 > 1e-12)
    tris = set()
    for a in range(12):
        for b in range(a + 1, 12):
            if not adj[a, b]:
                continue
            for c in range(b + 1, 12):
                if adj[a, c] and adj[b, c]:
                    tris.add(_orient_outward(vertices, (a, b, c)))
    triangles = np.array(sorted(tris), dtype=np.int64)
    edges, neighbors = _edges_and_neighbors(12, triangles)
    return GeodesicGrid(0, vertices, edges, triangles, neighbors)


def refine(grid: GeodesicGrid) -> GeodesicGrid:
    """Bisect every edge, project midpoints to the sphere, split triangles in 4.

    Parent vertices keep their indices; midpoints are appended in canonical
    (min, max) edge-key order, so refinement is reproducible.
    """
    n0 = grid.n_vertices
    midpoint_index = {}
    new_vertices = [grid.vertices]
    mids = []
    for idx, (a, b) in enumerate(map(tuple, grid.edges)):
        midpoint_index[(a, b)] = n0 + idx
        m = 0.5 * (grid.vertices[a] + grid.vertices[b])
        mids.append(m / np.linalg.norm(m))
    new_vertices.append(np.array(mids))
    vertices = np.vstack(new_vertices)

    def mid(a, b):
        return midpoint_index[(min(a, b), max(a, b))]

    tris = []
    for a, b, c in map(tuple, grid.triangles):
        mab, mbc, mca = mid(a, b), mid(b, c), mid(c, a)
        for tri in ((a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)):
            tris.append(_orient_outward(vertices, tri))
    triangles = np.array(sorted(set(tris)), dtype=np.int64)
    edges, neighbors = _edges_and_neighbors(len(vertices), triangles)

    out = GeodesicGrid(grid.level + 1, vertices, edges, triangles, neighbors)
    want = expected_counts(out.level)
    got = (out.n_vertices, out.n_edges, out.n_triangles)
    if got != want:
        raise RuntimeError(f"refinement produced counts {got}, expected {want}")
    return out


def build_grid(k: int) -> GeodesicGrid:
    """Base icosahedron refined k times."""
    grid = build_base_icosahedron()
    for _ in range(k):
        grid = refine(grid)
    return grid


def barycentric_to_unit_vector(grid: GeodesicGrid, triangle: int, bary) -> np.ndarray:
    """Planar barycentric combination of a triangle's vertices, projected to the sphere."""
    xi = np.asarray(bary, dtype=float)
    if abs(xi.sum() - 1.0) > 1e-12 or np.any(xi < -1e-14) or np.any(xi > 1.0 + 1e-14):
        raise ValueError(f"invalid barycentric point {bary}")
    x = xi @ grid.vertices[grid.triangles[triangle]]
    return x / np.linalg.norm(x)


def unit_vector_to_barycentric(grid: GeodesicGrid, triangle: int, omega) -> np.ndarray:
    """Barycentric coordinates of the planar pre-image of a direction.

    Solves xi1 x1 + xi2 x2 + xi3 x3 ~ omega (up to radial scale) and
    normalizes the coefficients to sum to one.
    """
    verts = grid.vertices[grid.triangles[triangle]]
    xi = np.linalg.solve(verts.T, np.asarray(omega, dtype=float))
    return xi / xi.sum()


def find_triangle(grid: GeodesicGrid, omega, tol: float = 1e-13):
    """Lowest-index triangle whose central projection contains omega.

    Returns (triangle_index, barycentric).  Boundary points belong to every
    incident triangle; the lowest index wins.
    """
    omega = np.asarray(omega, dtype=float)
    # Candidate pre-filter: triangles incident to the nearest vertex.
    near = int(np.argmax(grid.vertices @ omega))
    candidates = [t for t, tri in enumerate(grid.triangles) if near in tri]
    for tset in (candidates, range(grid.n_triangles)):
        best = None
        for t in tset:
            xi = unit_vector_to_barycentric(grid, t, omega)
            if np.all(xi >= -tol):
                best = t if best is None else min(best, t)
        if best is not None:
            return best, unit_vector_to_barycentric(grid, best, omega)
    raise RuntimeError(f"no containing triangle found for {omega}")


def integrate_triangle(grid: GeodesicGrid, triangle: int, f) -> float:
    """Integral of f over one spherical triangle via the fixed projected rule."""
    p = grid.vertices[grid.triangles[triangle]]
    return integrate_projected_triangle(p[0], p[1], p[2], f)


def integrate_sphere(grid: GeodesicGrid, f) -> float:
    """Integral of f over the whole sphere, triangle by triangle."""
    return sum(integrate_triangle(grid, t, f) for t in range(grid.n_triangles))


def export_grid(grid: GeodesicGrid, path):
    """Plain-text export: header, vertices, edges, triangles (0-based)."""
    with open(path, "w") as fh:
        fh.write(
            f"geogrid {grid.level} {grid.n_vertices} {grid.n_edges} {grid.n_triangles}\n"
        )
        for v in grid.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for a, b in grid.edges:
            fh.write(f"{a} {b}\n")
        for a, b, c in grid.triangles:
            fh.write(f"{a} {b} {c}\n")
