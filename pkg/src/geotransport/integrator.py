"""Second-order Runge-Kutta midpoint stepping with sub-step hooks."""

import warnings

import numpy as np

from .dg import FieldState

DEFAULT_CFL = 1.0 / 3.0


def check_cfl(dt, grid, cfl=DEFAULT_CFL):
    """Warn when dt exceeds the guard bound (max wave speed is 1)."""
    bound = cfl * min(grid.dx, grid.dy)
    if dt > bound * (1.0 + 1e-12):
        warnings.warn(
            f"dt={dt} exceeds the CFL guard {bound:.6g}; proceeding anyway",
            RuntimeWarning,
        )
    return dt <= bound * (1.0 + 1e-12)


def step_rk2(state: FieldState, rhs, dt, hooks=()) -> FieldState:
    """One midpoint step.  hooks are applied to every stage input and to the
    final state (slope limiting first, positivity last, per the hook list)."""

    def post(s):
        for hook in hooks:
            s = hook(s)
        return s

    base = post(state)
    half = FieldState(base.grid, base.f + 0.5 * dt * rhs(base), base.time + 0.5 * dt)
    _check_finite(half)
    half = post(half)
    full = FieldState(base.grid, base.f + dt * rhs(half), base.time + dt)
    _check_finite(full)
    return post(full)


def _check_finite(state):
    if not np.all(np.isfinite(state.f)):
        raise RuntimeError(f"non-finite state after stage at t={state.time}")
