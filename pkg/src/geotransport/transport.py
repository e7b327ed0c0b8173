"""Collision/source operators and moment functionals of the semi-discrete system."""

from dataclasses import dataclass

import numpy as np

from .matrices import AngularMatrices

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class MediumMap:
    """Per-cell emissivity, absorption, and scattering coefficients (nx, ny)."""

    eta: np.ndarray
    kappa_a: np.ndarray
    kappa_s: np.ndarray

    def __post_init__(self):
        for name in ("eta", "kappa_a", "kappa_s"):
            arr = getattr(self, name)
            if np.any(arr < 0.0):
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def vacuum(cls, nx, ny):
        z = np.zeros((nx, ny))
        return cls(z, z.copy(), z.copy())


@dataclass(frozen=True)
class SourceOperator:
    """Emission vector e^A and linear collision operator P^A_B for one cell."""

    emission: np.ndarray  # (N,)
    collision: np.ndarray  # (N, N)

    def apply(self, f_cell):
        return self.emission + self.collision @ f_cell


def build_source_operator(eta, kappa_a, kappa_s, matrices: AngularMatrices) -> SourceOperator:
    """Galerkin projection of eta - kappa_a F + kappa_s (E / 4pi - F).

    Using the lumped mass inverse and V_A = integral Psi_A:
        e^A = eta * [Mbar^-1 V]^A
        P^A_B = (kappa_s / 4pi) [Mbar^-1 V]^A V_B - (kappa_a + kappa_s) delta^A_B
    Isotropic elastic scattering is conservative: V . (P F) = 0 when
    kappa_a = 0.
    """
    v = matrices.basis.basis_integrals
    u = v / matrices.lumped_mass
    emission = eta * u
    collision = (kappa_s / FOUR_PI) * np.outer(u, v)
    collision -= (kappa_a + kappa_s) * np.eye(matrices.basis.n)
    return SourceOperator(emission, collision)


def compute_energy(f_cell, basis):
    """Radiation energy density E = sum_A F^A V_A."""
    return np.asarray(f_cell) @ basis.basis_integrals


def compute_flux_and_pressure(f_cell, matrices: AngularMatrices):
    """First moment (flux vector) and second moment (pressure tensor)."""
    f_cell = np.asarray(f_cell)
    flux = matrices.first_moments @ f_cell
    pressure = matrices.second_moments @ f_cell
    return flux, pressure


def apply_sources(f, medium: MediumMap, matrices: AngularMatrices, out=None):
    """Vectorized e + P F over all cells; f has shape (nx, ny, N).

    Exploits the rank-1 structure of the scattering projection so no
    per-cell matrix products are needed.
    """
    v = matrices.basis.basis_integrals
    u = v / matrices.lumped_mass
    energy = f @ v  # (nx, ny)
    iso = (medium.eta + (medium.kappa_s / FOUR_PI) * energy)[:, :, None] * u
    if out is None:
        out = np.zeros_like(f)
    out += iso
    out -= (medium.kappa_a + medium.kappa_s)[:, :, None] * f
    return out
