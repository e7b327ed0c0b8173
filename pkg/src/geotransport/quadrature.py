"""Quadrature rules: planar-triangle rules and product rules on the sphere."""

import numpy as np


def simplex_rule(n: int = 10):
    """Gauss product rule on the unit simplex {s, t >= 0, s + t <= 1}.

    Built by collapsing an n x n Gauss-Legendre grid on [0,1]^2 with the
    map (u, v) -> (u, v(1-u)), which carries the extra (1-u) Jacobian into
    the weights.  Exact for planar polynomials of total degree <= 2n - 3,
    all weights positive.  Returns barycentric points (m, 3) and weights
    summing to 1/2 (the simplex area).
    """
    x, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    U, V = np.meshgrid(u, u, indexing="ij")
    WU, WV = np.meshgrid(wu, wu, indexing="ij")
    s = U.ravel()
    t = (V * (1.0 - U)).ravel()
    wts = (WU * WV * (1.0 - U)).ravel()
    bary = np.column_stack([1.0 - s - t, s, t])
    return bary, wts


# Shared default rule: high-degree planar exactness keeps the projection
# error of spherical-triangle integrals far below the tolerances used in
# matrix assembly, even on the big k=0 icosahedron faces.
_BARY, _WTS = simplex_rule(14)


def integrate_projected_triangle(p0, p1, p2, f):
    """Integrate f(unit vectors) over the central projection of a planar triangle.

    p0, p1, p2 are 3-vectors (not necessarily unit).  The planar triangle
    is projected radially onto the unit sphere; the exact area-element
    Jacobian of the projection is applied at each quadrature node.  f must
    accept an (m, 3) array of unit vectors and return an (m,) or
    (m, ...) array.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    x = _BARY @ np.array([p0, p1, p2])  # (m, 3) planar points
    r = np.linalg.norm(x, axis=1)
    xhat = x / r[:, None]
    # Tangent vectors of the projected map: d(xhat)/ds with x(s,t) affine.
    a = p1 - p0
    b = p2 - p0
    ta = (a[None, :] - xhat * (xhat @ a)[:, None]) / r[:, None]
    tb = (b[None, :] - xhat * (xhat @ b)[:, None]) / r[:, None]
    jac = np.linalg.norm(np.cross(ta, tb), axis=1)
    vals = f(xhat)
    # simplex weights sum to 1/2, matching the (s, t) parameter area; |ta x tb|
    # carries the rest of the surface measure.
    return np.tensordot(_WTS * jac, vals, axes=(0, 0))


def triangle_quad_points(p0, p1, p2):
    """Quadrature nodes (unit vectors), combined weights, and barycentric nodes
    for the projected triangle.  weights include the projection Jacobian so that
    integral f = sum(w * f(x))."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    x = _BARY @ np.array([p0, p1, p2])
    r = np.linalg.norm(x, axis=1)
    xhat = x / r[:, None]
    a = p1 - p0
    b = p2 - p0
    ta = (a[None, :] - xhat * (xhat @ a)[:, None]) / r[:, None]
    tb = (b[None, :] - xhat * (xhat @ b)[:, None]) / r[:, None]
    jac = np.linalg.norm(np.cross(ta, tb), axis=1)
    return xhat, _WTS * jac, _BARY


def sphere_product_rule(n_theta: int, n_phi: int):
    """Gauss-Legendre x uniform-phi rule on the unit sphere.

    Exact for spherical polynomials with polar degree <= 2*n_theta - 1 and
    azimuthal trigonometric degree <= n_phi - 1.  Returns unit vectors
    (m, 3) and weights summing to 4*pi.
    """
    mu, wmu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    MU, PHI = np.meshgrid(mu, phi, indexing="ij")
    sin_theta = np.sqrt(1.0 - MU**2)
    pts = np.stack(
        [sin_theta * np.cos(PHI), sin_theta * np.sin(PHI), MU], axis=-1
    ).reshape(-1, 3)
    wts = (wmu[:, None] * wphi * np.ones_like(PHI)).ravel()
    return pts, wts
