"""Positivity post-processing: clipping limiter and Lanczos spectral filter."""

from dataclasses import dataclass

import numpy as np

from .basis import mode_lm


@dataclass
class ClipDiagnostics:
    fallback_isotropic: int = 0
    zeroed: int = 0
    clipped_energy: float = 0.0


def clip_limiter(f_cell, matrices, diagnostics: ClipDiagnostics = None):
    """Zero negative coefficients, rescale the rest to conserve sum(M F).

    theta = (sum_AB M_AB F^A) / (sum_AB M_AB max(F, 0)^A); for the geodesic
    bases the conserved functional equals the energy E.  Fallbacks: a cell
    with positive pre-limit energy but no positive coefficients is replaced
    by the isotropic state of the same energy; a cell with non-positive
    energy is zeroed.  Both are counted.
    """
    f_cell = np.asarray(f_cell, dtype=float)
    row = matrices.mass.sum(axis=0)  # sum_B M_AB
    if np.all(f_cell >= 0.0):
        return f_cell.copy()
    clipped = np.maximum(f_cell, 0.0)
    num = row @ f_cell
    den = row @ clipped
    if diagnostics is not None:
        diagnostics.clipped_energy += float(row @ np.minimum(f_cell, 0.0))
    if num <= 0.0:
        # non-positive pre-limit energy: nothing can be rescaled to conserve
        # it while staying non-negative, so the cell is dropped
        if diagnostics is not None:
            diagnostics.zeroed += 1
        return np.zeros_like(f_cell)
    if den <= 0.0:
        if diagnostics is not None:
            diagnostics.fallback_isotropic += 1
        return isotropic_state(num, matrices)
    return (num / den) * clipped


def isotropic_state(energy, matrices):
    """Coefficient vector of the angle-constant state with the given energy."""
    v = matrices.basis.basis_integrals
    u = v / matrices.lumped_mass  # representation of the constant 1/(4pi)... scaled
    return (energy / (v @ u)) * u


def clip_field(f, matrices, diagnostics: ClipDiagnostics = None):
    """Vectorized clipping over an (..., N) coefficient array."""
    row = matrices.mass.sum(axis=0)
    neg = f < 0.0
    bad = np.any(neg, axis=-1)
    if not np.any(bad):
        return f
    out = f.copy()
    sub = f[bad]
    clipped = np.maximum(sub, 0.0)
    num = sub @ row
    den = clipped @ row
    if diagnostics is not None:
        diagnostics.clipped_energy += float((np.minimum(sub, 0.0) @ row).sum())
    positive = num > 0.0
    safe = positive & (den > 0.0)
    scaled = np.zeros_like(sub)
    scaled[safe] = (num[safe] / den[safe])[:, None] * clipped[safe]
    iso_mask = positive & (den <= 0.0)
    if np.any(iso_mask):
        iso = isotropic_state(1.0, matrices)
        scaled[iso_mask] = num[iso_mask][:, None] * iso
        if diagnostics is not None:
            diagnostics.fallback_isotropic += int(iso_mask.sum())
    if diagnostics is not None:
        diagnostics.zeroed += int((~positive).sum())
    out[bad] = scaled
    return out


@dataclass(frozen=True)
class FilterSpec:
    """Lanczos filter configuration for FP_N runs."""

    sigma_eff: float
    l_max: int
    strength: float = None  # raw per-call strength s, overrides sigma_eff

    def __post_init__(self):
        if self.sigma_eff < 0.0:
            raise ValueError("sigma_eff must be non-negative")


def lanczos_kernel(x):
    return np.sinc(np.asarray(x) / np.pi)  # sin(x)/x with sinc's pi convention


def lanczos_filter(f_modes, spec: FilterSpec, dt):
    """Attenuate each (l, m) mode by sigma_L(l / (l_max + 1))^s.

    The strength s is calibrated per call so the highest retained l decays
    at rate sigma_eff: s = -dt sigma_eff / log sigma_L(l_max / (l_max + 1)).
    The l = 0 mode is untouched for any strength.
    """
    f_modes = np.asarray(f_modes, dtype=float)
    factors = lanczos_factors(spec, dt, f_modes.shape[-1])
    return f_modes * factors


def lanczos_factors(spec: FilterSpec, dt, n_modes):
    ls, _ = mode_lm(n_modes)
    if spec.strength is not None:
        s = spec.strength
    elif spec.sigma_eff == 0.0 or spec.l_max == 0:
        s = 0.0
    else:
        s = -dt * spec.sigma_eff / np.log(
            lanczos_kernel(spec.l_max / (spec.l_max + 1.0))
        )
    factors = lanczos_kernel(ls / (spec.l_max + 1.0)) ** s
    factors[ls == 0] = 1.0
    return factors


def limiter_indicator(f):
    """Fraction of (cell x angle) entries with a negative coefficient."""
    f = np.asarray(f)
    return float(np.count_nonzero(f < 0.0)) / f.size
