"""Angular basis families: hat functions, honeycomb cells, real spherical harmonics."""

from dataclasses import dataclass

import numpy as np

from . import geodesic
from .geodesic import GeodesicGrid
from .quadrature import sphere_product_rule, triangle_quad_points

FEMN = "femn"
SN = "sn"
FPN = "fpn"


def fem_basis_eval(grid: GeodesicGrid, A: int, omega) -> float:
    """Piecewise-linear hat function of vertex A evaluated at a direction.

    Inside a triangle with local barycentric coordinates (xi1, xi2, xi3) and
    xi1 attached to A the value is 2*xi1 + xi2 + xi3 - 1, which reduces to
    xi1 on the simplex; it is continuous across element boundaries.
    """
    t, xi = geodesic.find_triangle(grid, omega)
    tri = grid.triangles[t]
    for local, v in enumerate(tri):
        if v == A:
            others = xi.sum() - xi[local]
            return float(2.0 * xi[local] + others - 1.0)
    return 0.0


def sn_basis_eval(grid: GeodesicGrid, A: int, omega) -> float:
    """Indicator of the honeycomb cell of vertex A.

    Within the containing triangle the owner is the vertex with the largest
    barycentric coordinate; exact ties go to the lowest vertex index.
    """
    return 1.0 if sn_owner(grid, omega) == A else 0.0


def sn_owner(grid: GeodesicGrid, omega) -> int:
    t, xi = geodesic.find_triangle(grid, omega)
    tri = grid.triangles[t]
    best = np.max(xi)
    owners = [int(tri[i]) for i in range(3) if xi[i] >= best - 1e-14]
    return min(owners)


def real_spherical_harmonic(l: int, m: int, omega) -> float:
    """Real orthonormal spherical harmonic Y_{lm} at a unit vector."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid mode (l={l}, m={m})")
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    vals = sh_table(l, omega)[:, mode_index(l, m)]
    return float(vals[0]) if vals.size == 1 else vals


def mode_index(l: int, m: int) -> int:
    """Flat index of mode (l, m) in the l-major, m = -l..l ordering."""
    return l * l + (m + l)


def mode_lm(n_modes: int):
    """Arrays of l and m per flat mode index."""
    ls, ms = [], []
    l = 0
    while len(ls) < n_modes:
        for m in range(-l, l + 1):
            ls.append(l)
            ms.append(m)
        l += 1
    return np.array(ls[:n_modes]), np.array(ms[:n_modes])


def sh_table(l_max: int, points: np.ndarray) -> np.ndarray:
    """All real Y_{lm} with l <= l_max at unit vectors, shape (npts, (l_max+1)^2).

    Associated Legendre factors are generated by the standard stable upward
    recurrence on fully normalized functions; the Condon-Shortley phase is
    carried inside the recurrence seed, which drops out of all products used
    here.
    """
    points = np.asarray(points, dtype=float)
    mu = np.clip(points[:, 2], -1.0, 1.0)
    phi = np.arctan2(points[:, 1], points[:, 0])
    s = np.sqrt(np.maximum(0.0, 1.0 - mu * mu))
    npts = len(points)
    nm = (l_max + 1) ** 2
    out = np.empty((npts, nm))

    # pbar[m][l] = N_l^m P_l^m(mu), normalized so the real harmonics built
    # below are orthonormal on the sphere.
    pbar_prev_m = np.full(npts, 1.0 / np.sqrt(4.0 * np.pi))
    for m in range(l_max + 1):
        if m > 0:
            pbar_prev_m = -np.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pbar_prev_m
        plm2 = pbar_prev_m  # l = m
        _store(out, m, m, plm2, phi)
        if m < l_max:
            plm1 = np.sqrt(2.0 * m + 3.0) * mu * plm2  # l = m + 1
            _store(out, m + 1, m, plm1, phi)
            for l in range(m + 2, l_max + 1):
                a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = np.sqrt(
                    ((2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m))
                    / ((2.0 * l - 3.0) * (l * l - m * m))
                )
                plm = a * mu * plm1 - b * plm2
                _store(out, l, m, plm, phi)
                plm2, plm1 = plm1, plm
    return out


def _store(out, l, m, pbar, phi):
    if m == 0:
        out[:, mode_index(l, 0)] = pbar
    else:
        out[:, mode_index(l, m)] = np.sqrt(2.0) * pbar * np.cos(m * phi)
        out[:, mode_index(l, -m)] = np.sqrt(2.0) * pbar * np.sin(m * phi)


@dataclass(frozen=True)
class AngularBasis:
    """One of the three angular discretizations with its basis integrals."""

    kind: str
    n: int
    grid: GeodesicGrid = None  # femn / sn
    l_max: int = None  # fpn
    basis_integrals: np.ndarray = None  # V_A = integral of Psi_A

    @property
    def resolution_label(self):
        if self.kind == FPN:
            return f"l_max={self.l_max}"
        return f"k={self.grid.level}"

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Basis matrix Psi_A at unit vectors, shape (npts, N)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == FPN:
            return sh_table(self.l_max, points)
        out = np.zeros((len(points), self.n))
        for i, w in enumerate(points):
            if self.kind == FEMN:
                t, xi = geodesic.find_triangle(self.grid, w)
                tri = self.grid.triangles[t]
                for local, v in enumerate(tri):
                    out[i, v] = xi[local]
            else:
                out[i, sn_owner(self.grid, w)] = 1.0
        return out


def fpn_quadrature(l_max: int, extra_degree: int = 2):
    """Sphere rule exact for all matrix/moment integrands of an FP_N basis."""
    n_theta = l_max + 2 + extra_degree
    n_phi = 2 * l_max + 4 + 2 * extra_degree
    return sphere_product_rule(n_theta, n_phi)


def _cell_subtriangles():
    # Barycentric corners of the two sub-triangles forming the honeycomb
    # quadrilateral of local vertex 0 inside one triangle.
    v = np.array([1.0, 0.0, 0.0])
    mab = np.array([0.5, 0.5, 0.0])
    mac = np.array([0.5, 0.0, 0.5])
    c = np.array([1.0, 1.0, 1.0]) / 3.0
    return [(v, mab, c), (v, c, mac)]


def make_basis(kind: str, *, k: int = None, l_max: int = None) -> AngularBasis:
    """Build a basis and its V_A integrals."""
    kind = kind.lower()
    if kind == FPN:
        if l_max is None or l_max < 0:
            raise ValueError("fpn basis needs l_max >= 0")
        n = (l_max + 1) ** 2
        v = np.zeros(n)
        v[0] = np.sqrt(4.0 * np.pi)
        return AngularBasis(FPN, n, l_max=l_max, basis_integrals=v)
    if kind not in (FEMN, SN):
        raise ValueError(f"unknown basis kind {kind!r}")
    if k is None or k < 0:
        raise ValueError(f"{kind} basis needs refinement level k >= 0")
    grid = geodesic.build_grid(k)
    n = grid.n_vertices
    v = np.zeros(n)
    if kind == FEMN:
        for tri in grid.triangles:
            p = grid.vertices[tri]
            _, w, bary = triangle_quad_points(p[0], p[1], p[2])
            v[tri] += bary.T @ w
    else:
        subs = _cell_subtriangles()
        for tri in grid.triangles:
            p = grid.vertices[tri]
            for local in range(3):
                order = [local, (local + 1) % 3, (local + 2) % 3]
                q = p[order]
                for b0, b1, b2 in subs:
                    _, w, _ = triangle_quad_points(b0 @ q, b1 @ q, b2 @ q)
                    v[tri[local]] += w.sum()
    return AngularBasis(kind, n, grid=grid, basis_integrals=v)
