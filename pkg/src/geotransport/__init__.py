"""Deterministic Boltzmann radiation transport with geodesic-grid angular bases."""

__version__ = "0.1.0"

__all__ = [
    "basis",
    "cli",
    "dg",
    "driver",
    "fieldio",
    "geodesic",
    "integrator",
    "matrices",
    "positivity",
    "problems",
    "quadrature",
    "transport",
]
