"""Assembly of the angle-space matrices driving the coupled advection system."""

from dataclasses import dataclass

import numpy as np

from .basis import FEMN, FPN, SN, AngularBasis, _cell_subtriangles, fpn_quadrature, sh_table
from .quadrature import triangle_quad_points

DEFAULT_DISSIPATION = 1.0 / np.sqrt(3.0)


class AssemblyError(RuntimeError):
    pass


@dataclass(frozen=True)
class AngularMatrices:
    """Precomputed angle-space operators for one basis.

    advection = lumped_mass^-1 @ stiffness; dissipation is the eigen-rebuilt
    |advection| floored at the dissipation parameter v.
    """

    basis: AngularBasis
    mass: np.ndarray  # (N, N) consistent mass
    lumped_mass: np.ndarray  # (N,) diagonal
    stiffness: np.ndarray  # (3, N, N)
    advection: np.ndarray  # (3, N, N)
    dissipation: np.ndarray  # (3, N, N)
    eigenvalues: np.ndarray  # (3, N) real
    right_eigenvectors: np.ndarray  # (3, N, N)
    left_eigenvectors: np.ndarray  # (3, N, N)
    v_dissipation: float
    first_moments: np.ndarray  # (3, N)   integral Omega_i Psi_A
    second_moments: np.ndarray  # (3, 3, N) integral Omega_i Omega_j Psi_A


def _symmetrize(mat, what, tol=1e-11):
    skew = np.max(np.abs(mat - mat.T))
    if skew > tol:
        raise AssemblyError(f"{what} deviates from symmetry by {skew:.3e}")
    return 0.5 * (mat + mat.T)


def _assemble_femn(basis):
    grid = basis.grid
    n = basis.n
    mass = np.zeros((n, n))
    stiff = np.zeros((3, n, n))
    t1 = np.zeros((3, n))
    t2 = np.zeros((3, 3, n))
    for tri in grid.triangles:
        p = grid.vertices[tri]
        x, w, bary = triangle_quad_points(p[0], p[1], p[2])
        wb = w[:, None] * bary  # (m, 3)
        mass[np.ix_(tri, tri)] += bary.T @ wb
        for i in range(3):
            stiff[i][np.ix_(tri, tri)] += bary.T @ (x[:, i : i + 1] * wb)
            t1[i][tri] += x[:, i] @ wb
            for j in range(3):
                t2[i, j][tri] += (x[:, i] * x[:, j]) @ wb
    return mass, stiff, t1, t2


def _assemble_sn(basis):
    grid = basis.grid
    n = basis.n
    mass = np.zeros((n, n))
    stiff = np.zeros((3, n, n))
    t1 = np.zeros((3, n))
    t2 = np.zeros((3, 3, n))
    subs = _cell_subtriangles()
    for tri in grid.triangles:
        p = grid.vertices[tri]
        for local in range(3):
            a = tri[local]
            order = [local, (local + 1) % 3, (local + 2) % 3]
            q = p[order]
            for b0, b1, b2 in subs:
                x, w, _ = triangle_quad_points(b0 @ q, b1 @ q, b2 @ q)
                mass[a, a] += w.sum()
                for i in range(3):
                    stiff[i, a, a] += w @ x[:, i]
                    t1[i, a] += w @ x[:, i]
                    for j in range(3):
                        t2[i, j, a] += w @ (x[:, i] * x[:, j])
    return mass, stiff, t1, t2


def _assemble_fpn(basis):
    pts, w = fpn_quadrature(basis.l_max)
    y = sh_table(basis.l_max, pts)
    wy = w[:, None] * y
    mass = y.T @ wy
    stiff = np.stack([y.T @ (pts[:, i : i + 1] * wy) for i in range(3)])
    t1 = np.stack([pts[:, i] @ wy for i in range(3)])
    t2 = np.stack(
        [
            np.stack([(pts[:, i] * pts[:, j]) @ wy for j in range(3)])
            for i in range(3)
        ]
    )
    return mass, stiff, t1, t2


def assemble_matrices(
    basis: AngularBasis, v_dissipation: float = DEFAULT_DISSIPATION
) -> AngularMatrices:
    """Mass, lumped mass, stiffness, advection, and dissipation matrices."""
    if basis.kind == FEMN:
        mass, stiff, t1, t2 = _assemble_femn(basis)
    elif basis.kind == SN:
        mass, stiff, t1, t2 = _assemble_sn(basis)
    elif basis.kind == FPN:
        mass, stiff, t1, t2 = _assemble_fpn(basis)
    else:
        raise ValueError(f"unknown basis kind {basis.kind!r}")

    mass = _symmetrize(mass, "mass matrix")
    stiff = np.stack([_symmetrize(stiff[i], f"stiffness[{i}]") for i in range(3)])

    lumped = mass.sum(axis=1)
    if np.any(lumped <= 0.0):
        raise AssemblyError("lumped mass has a non-positive diagonal entry")

    adv = stiff / lumped[None, :, None]
    eigvals = np.empty((3, basis.n))
    rights = np.empty((3, basis.n, basis.n))
    lefts = np.empty((3, basis.n, basis.n))
    diss = np.empty((3, basis.n, basis.n))
    # D^-1 S is similar to the symmetric D^-1/2 S D^-1/2 (D = lumped mass),
    # so the spectrum is exactly real; the symmetric solve avoids the
    # spurious conjugate pairs a general eigensolver produces at rounding
    # level.  L is the inverse of R by orthogonality of the symmetric
    # eigenvectors.
    sqrt_d = np.sqrt(lumped)
    for i in range(3):
        sym = stiff[i] / np.outer(sqrt_d, sqrt_d)
        lam, q = np.linalg.eigh(0.5 * (sym + sym.T))
        r = q / sqrt_d[:, None]
        left = q.T * sqrt_d[None, :]
        recon = np.max(np.abs((r * lam[None, :]) @ left - adv[i]))
        if recon > 1e-10:
            raise AssemblyError(
                f"advection[{i}] eigen-factorization residual {recon:.3e}"
            )
        eigvals[i] = lam
        rights[i] = r
        lefts[i] = left
        diss[i] = r @ (np.maximum(v_dissipation, np.abs(lam))[:, None] * left)

    return AngularMatrices(
        basis=basis,
        mass=mass,
        lumped_mass=lumped,
        stiffness=stiff,
        advection=adv,
        dissipation=diss,
        eigenvalues=eigvals,
        right_eigenvectors=rights,
        left_eigenvectors=lefts,
        v_dissipation=v_dissipation,
        first_moments=t1,
        second_moments=t2,
    )
