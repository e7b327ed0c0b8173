"""Source operators, moments, and the vectorized collision update."""

import numpy as np
import pytest

from conftest import random_directions
from geotransport.transport import (
    FOUR_PI,
    MediumMap,
    apply_sources,
    build_source_operator,
    compute_energy,
    compute_flux_and_pressure,
)


class TestMediumMap:
    def test_vacuum(self):
        m = MediumMap.vacuum(4, 6)
        assert m.eta.shape == (4, 6)
        assert not m.eta.any() and not m.kappa_a.any() and not m.kappa_s.any()

    def test_negative_rejected(self):
        z = np.zeros((2, 2))
        with pytest.raises(ValueError):
            MediumMap(z, np.full((2, 2), -1.0), z)
        with pytest.raises(ValueError):
            MediumMap(np.full((2, 2), -0.1), z, z)


class TestSourceOperator:
    def test_vacuum_cell(self, femn1_matrices):
        op = build_source_operator(0.0, 0.0, 0.0, femn1_matrices)
        assert not op.emission.any()
        assert not op.collision.any()

    def test_pure_absorber(self, all_matrices):
        for m in all_matrices.values():
            op = build_source_operator(0.0, 10.0, 0.0, m)
            np.testing.assert_array_equal(op.collision, -10.0 * np.eye(m.basis.n))

    def test_fpn_scattering_modes(self, fpn4_matrices):
        op = build_source_operator(0.0, 0.0, 1.0, fpn4_matrices)
        n = fpn4_matrices.basis.n
        e0 = np.zeros(n)
        e0[0] = 1.0
        assert np.max(np.abs(op.collision @ e0)) <= 1e-10
        for mode in (1, 5, n - 1):
            em = np.zeros(n)
            em[mode] = 1.0
            np.testing.assert_allclose(op.collision @ em, -em, atol=1e-12)

    def test_fpn_diagonal(self, fpn4_matrices):
        op = build_source_operator(0.0, 0.3, 0.7, fpn4_matrices)
        off = op.collision - np.diag(np.diag(op.collision))
        assert np.max(np.abs(off)) <= 1e-12

    def test_scattering_conservativity(self, all_matrices, rng):
        for m in all_matrices.values():
            op = build_source_operator(0.0, 0.0, 3.0, m)
            for _ in range(20):
                f = rng.normal(size=m.basis.n)
                e = compute_energy(op.collision @ f, m.basis)
                assert abs(e) <= 1e-9 * np.linalg.norm(f)

    def test_emission_isotropy(self, all_matrices, rng):
        for kind, m in all_matrices.items():
            op = build_source_operator(2.0, 0.0, 0.0, m)
            if kind == "fpn":
                assert np.max(np.abs(op.emission[1:])) <= 1e-12
                continue
            pts = random_directions(rng, 30)
            vals = m.basis.evaluate(pts) @ op.emission
            assert np.max(np.abs(vals - vals[0])) <= 1e-9 * abs(vals[0])

    def test_linearity(self, femn1_matrices, rng):
        m = femn1_matrices
        a = build_source_operator(1.0, 2.0, 3.0, m)
        b = build_source_operator(0.5, 1.0, 1.5, m)
        np.testing.assert_allclose(a.emission, 2.0 * b.emission, atol=1e-14)
        np.testing.assert_allclose(a.collision, 2.0 * b.collision, atol=1e-14)

    def test_apply(self, femn1_matrices, rng):
        op = build_source_operator(1.0, 2.0, 3.0, femn1_matrices)
        f = rng.normal(size=femn1_matrices.basis.n)
        np.testing.assert_allclose(
            op.apply(f), op.emission + op.collision @ f, atol=0
        )


class TestMoments:
    def test_energy_fpn_constant_mode(self, fpn4):
        f = np.zeros(fpn4.n)
        f[0] = 1.0
        assert compute_energy(f, fpn4) == pytest.approx(np.sqrt(FOUR_PI), abs=1e-12)

    def test_energy_femn_constant(self, femn1):
        f = np.full(femn1.n, 0.7)
        assert compute_energy(f, femn1) == pytest.approx(0.7 * FOUR_PI, abs=1e-9)

    def test_energy_sn_isotropic(self, sn1):
        f = np.full(sn1.n, 1.0 / FOUR_PI)
        assert compute_energy(f, sn1) == pytest.approx(1.0, abs=1e-10)

    def test_isotropic_flux_vanishes(self, all_matrices):
        for m in all_matrices.values():
            u = m.basis.basis_integrals / m.lumped_mass
            flux, _ = compute_flux_and_pressure(u, m)
            assert np.max(np.abs(flux)) <= 1e-10

    def test_isotropic_pressure(self, all_matrices):
        for m in all_matrices.values():
            v = m.basis.basis_integrals
            u = v / m.lumped_mass
            iso = u / (v @ u)  # E = 1
            _, p = compute_flux_and_pressure(iso, m)
            assert np.max(np.abs(p - np.eye(3) / 3.0)) <= 1e-8

    def test_pressure_trace_is_energy(self, all_matrices, rng):
        for m in all_matrices.values():
            f = rng.normal(size=m.basis.n)
            _, p = compute_flux_and_pressure(f, m)
            assert np.trace(p) == pytest.approx(
                compute_energy(f, m.basis), abs=1e-10
            )


class TestApplySources:
    def test_matches_per_cell_operator(self, femn1_matrices, rng):
        m = femn1_matrices
        nx, ny = 3, 4
        eta = rng.uniform(0, 1, (nx, ny))
        ka = rng.uniform(0, 2, (nx, ny))
        ks = rng.uniform(0, 2, (nx, ny))
        medium = MediumMap(eta, ka, ks)
        f = rng.normal(size=(nx, ny, m.basis.n))
        got = apply_sources(f, medium, m)
        for i in range(nx):
            for j in range(ny):
                op = build_source_operator(eta[i, j], ka[i, j], ks[i, j], m)
                np.testing.assert_allclose(got[i, j], op.apply(f[i, j]), atol=1e-12)

    def test_accumulates_into_out(self, sn1_matrices, rng):
        m = sn1_matrices
        medium = MediumMap.vacuum(2, 2)
        f = rng.normal(size=(2, 2, m.basis.n))
        out = np.ones_like(f)
        apply_sources(f, medium, m, out)
        np.testing.assert_array_equal(out, np.ones_like(f))
