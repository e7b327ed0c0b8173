"""RK2 midpoint stepping with sub-step hooks."""

import numpy as np
import pytest

from geotransport.dg import FieldState, PeriodicBC, SpatialGrid2D, compute_rhs
from geotransport.integrator import DEFAULT_CFL, check_cfl, step_rk2
from geotransport.transport import FOUR_PI, MediumMap, apply_sources


def make_state(value=1.0, nx=4, ny=4, n=1):
    grid = SpatialGrid2D(nx, ny, 0.1, 0.1)
    return FieldState(grid, np.full((nx, ny, n), value), 0.0)


class TestStepRk2:
    def test_linear_decay_factor(self):
        # dF/dt = -10 F, dt = 0.01: midpoint factor 1 - 10 dt + 50 dt^2
        state = make_state(1.0)
        out = step_rk2(state, lambda s: -10.0 * s.f, 0.01)
        np.testing.assert_allclose(out.f, 0.905, atol=1e-15)
        assert out.time == pytest.approx(0.01)

    def test_exact_on_constant_rhs(self, femn1_matrices):
        # uniform emission in a periodic vacuum: E grows at exactly 4 pi eta
        m = femn1_matrices
        eta = 0.3
        grid = SpatialGrid2D(4, 4, 0.1, 0.1)
        medium = MediumMap(
            np.full((4, 4), eta), np.zeros((4, 4)), np.zeros((4, 4))
        )
        state = FieldState(grid, np.zeros((4, 4, m.basis.n)), 0.0)

        def rhs(s):
            out = compute_rhs(
                s, PeriodicBC(), m.advection[0], m.advection[1],
                m.dissipation[0], m.dissipation[1],
            )
            apply_sources(s.f, medium, m, out)
            return out

        dt = 0.05
        for _ in range(4):
            state = step_rk2(state, rhs, dt)
        energy = state.f @ m.basis.basis_integrals
        np.testing.assert_allclose(energy, FOUR_PI * eta * 4 * dt, rtol=1e-12)

    def test_order_two_on_nonlinear_decay(self):
        # dF/dt = -F^2 from F = 1: exact solution 1 / (1 + t)
        errs = []
        for steps in (20, 40, 80):
            state = make_state(1.0)
            dt = 1.0 / steps
            for _ in range(steps):
                state = step_rk2(state, lambda s: -s.f**2, dt)
            errs.append(abs(state.f[0, 0, 0] - 0.5))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        np.testing.assert_allclose(orders, 2.0, atol=0.2)

    def test_hooks_run_three_times_per_step(self):
        calls = []

        def hook(s):
            calls.append(s.time)
            return s

        step_rk2(make_state(), lambda s: 0.0 * s.f, 0.1, [hook])
        assert len(calls) == 3  # stage input, midpoint input, final state

    def test_hook_order(self):
        order = []
        hooks = [
            lambda s: (order.append("limit"), s)[1],
            lambda s: (order.append("clip"), s)[1],
        ]
        step_rk2(make_state(), lambda s: 0.0 * s.f, 0.1, hooks)
        assert order[:2] == ["limit", "clip"]

    def test_non_finite_stage_aborts(self):
        def bad_rhs(s):
            return np.full_like(s.f, np.inf)

        with pytest.raises(RuntimeError, match="non-finite"):
            step_rk2(make_state(), bad_rhs, 0.1)


class TestCflGuard:
    def test_within_bound_silent(self):
        grid = SpatialGrid2D(4, 4, 0.3, 0.3)
        assert check_cfl(DEFAULT_CFL * 0.3, grid)

    def test_exceeding_bound_warns(self):
        grid = SpatialGrid2D(4, 4, 0.3, 0.3)
        with pytest.warns(RuntimeWarning, match="CFL"):
            ok = check_cfl(0.2, grid)
        assert not ok
