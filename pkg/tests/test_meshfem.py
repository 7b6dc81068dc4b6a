"""Meshes, P1 assembly, and spectral extraction."""

import math
import os

import numpy as np
import pytest
import scipy.linalg

from reillylab.errors import (ArgumentError, ConvergenceError,
                              EllipticityError, TopologyError,
                              UnsupportedConfiguration)
from reillylab.fem import DiscreteGeometry, assemble_forms
from reillylab.gallery import (clifford_torus, ellipsoid, flat_torus,
                               hyperbolic_geodesic_sphere, sphere,
                               veronese_rp2)
from reillylab.mesh import (Mesh, check_mesh, icosphere, load_off,
                            projective_icosphere, save_off, torus_grid)
from reillylab.spectra import (SpectrumResult, product_spectrum, solve_pencil,
                               sphere_spectrum)


class TestMeshes:
    def test_icosphere_counts(self):
        for level in range(4):
            m = icosphere(level)
            assert m.vertex_count == 10 * 4**level + 2
            assert m.triangle_count == 20 * 4**level
            stats = check_mesh(m)
            assert stats["euler"] == 2
            assert np.allclose(np.linalg.norm(m.points, axis=1), 1.0)

    def test_torus_grid(self):
        m = torus_grid(8, 10)
        assert m.vertex_count == 80
        stats = check_mesh(m)
        assert stats["euler"] == 0 and stats["oriented"]

    def test_projective_quotient(self):
        for level in (1, 2):
            base = icosphere(level)
            m = projective_icosphere(level)
            assert m.vertex_count == base.vertex_count // 2
            assert m.triangle_count == base.triangle_count // 2
            stats = check_mesh(m)
            assert stats["euler"] == 1 and not stats["oriented"]

    def test_open_mesh_rejected(self):
        m = icosphere(0)
        broken = Mesh(points=m.points, triangles=m.triangles[:-1],
                      topology="sphere")
        with pytest.raises(TopologyError):
            check_mesh(broken)

    def test_orientation_flip_rejected(self):
        m = icosphere(1)
        tris = m.triangles.copy()
        tris[0] = tris[0][::-1]
        with pytest.raises(TopologyError):
            check_mesh(Mesh(points=m.points, triangles=tris, topology="sphere"))

    def test_invalid_grid_arguments(self):
        with pytest.raises(ArgumentError):
            torus_grid(2)
        with pytest.raises(ArgumentError):
            icosphere(-1)


class TestOFF:
    def test_round_trip_three_dim(self, tmp_path):
        m = icosphere(1)
        path = os.path.join(tmp_path, "sphere.off")
        save_off(path, m.points, m.triangles)
        pts, tris = load_off(path)
        assert np.array_equal(pts, m.points)
        assert np.array_equal(tris, m.triangles)

    def test_round_trip_higher_dim(self, tmp_path):
        m = torus_grid(5)
        path = os.path.join(tmp_path, "torus.off")
        save_off(path, m.points, m.triangles)
        pts, tris = load_off(path)
        assert np.array_equal(pts, m.points)
        assert np.array_equal(tris, m.triangles)

    def test_reject_foreign_file(self, tmp_path):
        path = os.path.join(tmp_path, "junk.off")
        with open(path, "w") as fh:
            fh.write("PLY\n12 20 0\n")
        with pytest.raises(ArgumentError):
            load_off(path)


class TestAssembly:
    def setup_method(self):
        self.imm = sphere(2, 1.0, 1, 0.0)
        self.geom = DiscreteGeometry(self.imm, icosphere(2))
        self.K, self.M = assemble_forms(self.geom)

    def test_constants_in_kernel(self):
        ones = np.ones(self.geom.mesh.vertex_count)
        scale = abs(self.K.diagonal()).max()
        assert np.max(np.abs(self.K @ ones)) < 1e-12 * scale

    def test_mass_reproduces_volume(self):
        ones = np.ones(self.geom.mesh.vertex_count)
        assert abs(ones @ (self.M @ ones) - self.geom.volume) < 1e-12 * self.geom.volume
        assert abs(self.geom.volume - 4 * math.pi) < 0.02 * 4 * math.pi

    def test_weight_linearity(self):
        K2, _ = assemble_forms(self.geom, tensor_field=lambda fr: 2.0 * np.eye(2))
        assert np.max(np.abs((K2 - 2.0 * self.K).toarray())) < 1e-12 * abs(self.K.diagonal()).max()

    def test_unit_potential_adds_mass(self):
        Kq, _ = assemble_forms(self.geom, potential=lambda fr: 1.0)
        diff = (Kq - self.K - self.M).toarray()
        assert np.max(np.abs(diff)) < 1e-13

    def test_indefinite_weight_rejected(self):
        with pytest.raises(EllipticityError, match="not positive definite"):
            assemble_forms(self.geom, tensor_field=lambda fr: np.diag([1.0, -1.0]))

    def test_integrate_constant(self):
        vals = np.ones(self.geom.mesh.vertex_count)
        assert abs(self.geom.integrate(vals) - self.geom.volume) < 1e-12 * self.geom.volume

    def test_requires_surface_domain(self):
        with pytest.raises(UnsupportedConfiguration):
            DiscreteGeometry(clifford_torus(2, 4, 0.7, 0.0), icosphere(1))


class TestSphereSpectrum:
    def test_fem_eigenvalue_and_multiplicity(self):
        geom = DiscreteGeometry(sphere(2, 1.0, 1, 0.0), icosphere(3))
        res = solve_pencil(*assemble_forms(geom), count=12)
        lam2 = res.lambda2()
        assert abs(lam2 - 2.0) < 0.02 * 2.0
        assert res.multiplicity_of(lam2) == 3

    def test_galerkin_refinement_decreases(self):
        imm = sphere(2, 1.0, 1, 0.0)
        seq = []
        for level in (1, 2, 3, 4):
            geom = DiscreteGeometry(imm, icosphere(level))
            seq.append(solve_pencil(*assemble_forms(geom), count=6).lambda2())
        assert all(a > b for a, b in zip(seq, seq[1:]))
        assert all(v > 2.0 - 1e-6 for v in seq)
        assert abs(seq[-1] - 2.0) < 0.002 * 2.0

    def test_rayleigh_quotient_bounds(self):
        geom = DiscreteGeometry(sphere(2, 1.0, 1, 0.0), icosphere(2))
        K, M = assemble_forms(geom)
        res = solve_pencil(K, M, count=6)
        rng = np.random.default_rng(3)
        ones = np.ones(K.shape[0])
        for _ in range(5):
            v = rng.standard_normal(K.shape[0])
            v -= ones * (ones @ (M @ v)) / (ones @ (M @ ones))
            quot = (v @ (K @ v)) / (v @ (M @ v))
            assert quot >= res.lambda2() - 1e-10

    def test_dense_and_arpack_agree(self):
        geom = DiscreteGeometry(flat_torus(), torus_grid(47))  # 2209 > dense limit
        K, M = assemble_forms(geom)
        res = solve_pencil(K, M, count=8)
        assert res.backend == "fem-arpack"
        dense = scipy.linalg.eigh(K.toarray(), M.toarray(), eigvals_only=True,
                                  subset_by_index=(0, 7))
        assert np.max(np.abs(res.values - dense)) < 1e-8 * max(1.0, dense[-1])

    def test_potential_shift_is_exact(self):
        geom = DiscreteGeometry(sphere(2, 1.0, 1, 0.0), icosphere(2))
        K, M = assemble_forms(geom)
        Kq, _ = assemble_forms(geom, potential=lambda fr: 3.0)
        plain = solve_pencil(K, M, count=4)
        shifted = solve_pencil(Kq, M, count=4)
        assert abs(shifted.lambda2(has_potential=True) - plain.lambda2() - 3.0) < 1e-9


class TestOtherGeometries:
    def test_flat_torus_spectrum(self):
        geom = DiscreteGeometry(flat_torus(), torus_grid(40))
        res = solve_pencil(*assemble_forms(geom), count=12)
        lam2 = res.lambda2()
        assert abs(lam2 - 4 * math.pi**2) < 0.01 * 4 * math.pi**2
        assert res.multiplicity_of(lam2) == 4

    def test_rectangular_torus_prefers_long_direction(self):
        r1 = 1.0 / (2 * math.pi)
        geom = DiscreteGeometry(flat_torus(r1, 2 * r1), torus_grid(24, 48))
        res = solve_pencil(*assemble_forms(geom), count=8)
        assert abs(res.lambda2() - 1.0 / (2 * r1) ** 2) < 0.01 / (2 * r1) ** 2

    def test_anisotropic_weight_splits_multiplicity(self):
        geom = DiscreteGeometry(flat_torus(), torus_grid(40))
        K, M = assemble_forms(geom, tensor_field=lambda fr: np.diag([2.0, 1.0]))
        res = solve_pencil(K, M, count=8)
        lam2 = res.lambda2()
        assert abs(lam2 - 4 * math.pi**2) < 0.01 * 4 * math.pi**2
        assert res.multiplicity_of(lam2) == 2

    def test_projective_plane_spectrum(self):
        geom = DiscreteGeometry(veronese_rp2(), projective_icosphere(3))
        res = solve_pencil(*assemble_forms(geom), count=14)
        lam2 = res.lambda2()
        assert abs(lam2 - 6.0) < 0.025 * 6.0
        assert res.multiplicity_of(lam2) == 5
        assert abs(geom.volume - 2 * math.pi) < 0.02 * 2 * math.pi

    def test_hyperbolic_sphere_spectrum(self):
        geom = DiscreteGeometry(hyperbolic_geodesic_sphere(1.0), icosphere(4))
        res = solve_pencil(*assemble_forms(geom), count=8)
        want = 2.0 / math.sinh(1.0) ** 2
        assert abs(res.lambda2() - want) < 0.01 * want

    def test_ellipsoid_below_round_sphere(self):
        geom = DiscreteGeometry(ellipsoid((1.0, 1.0, 1.3)), icosphere(3))
        res = solve_pencil(*assemble_forms(geom), count=6)
        assert res.lambda2() < 2.0


class TestClosedFormSpectra:
    def test_sphere_spectrum_table(self):
        res = sphere_spectrum(2, 1.0, count=12)
        assert np.allclose(res.values[:4], [0.0, 2.0, 6.0, 12.0])
        assert list(res.multiplicities[:4]) == [1, 3, 5, 7]
        assert res.lambda2() == 2.0
        res4 = sphere_spectrum(4, 0.8, count=8)
        assert abs(res4.lambda2() - 4.0 / 0.64) < 1e-12
        assert res4.multiplicities[1] == 5

    def test_circle_multiplicities(self):
        res = sphere_spectrum(1, 1.0, count=7)
        assert list(res.multiplicities[:4]) == [1, 2, 2, 2]
        assert np.allclose(res.values[:3], [0.0, 1.0, 4.0])

    def test_product_matches_brute_force(self):
        res = product_spectrum([(2, 1.0), (2, 1.3)], weights=[1.5, 3.0], count=20)
        brute = []
        for j in range(8):
            for k in range(8):
                lamj = 1.5 * j * (j + 1)
                lamk = 3.0 * k * (k + 1) / 1.69
                mult = sphere_multiplicity_ref(2, j) * sphere_multiplicity_ref(2, k)
                brute.extend([lamj + lamk] * mult)
        brute = np.sort(brute)
        assert np.allclose(res.expanded(), brute[:len(res.expanded())], atol=1e-12)

    def test_product_lambda2_picks_cheapest_factor(self):
        res = product_spectrum([(2, 0.5), (1, 1.0)], weights=[1.0, 4.0], count=10)
        assert abs(res.lambda2() - min(2.0 / 0.25, 4.0 * 1.0)) < 1e-12

    def test_clifford_closed_form(self):
        a = math.sqrt(0.5)
        b = math.sqrt(0.5)
        rec = clifford_torus(2, 4, a, 0.0).reference["newton:2"]
        res = product_spectrum([(2, a), (2, b)],
                               weights=[rec.extras["t"], rec.extras["s"]], count=8)
        assert abs(res.lambda2() - 8.0) < 1e-9

    def test_argument_validation(self):
        with pytest.raises(ArgumentError):
            sphere_spectrum(0, 1.0)
        with pytest.raises(ArgumentError):
            product_spectrum([(2, 1.0)], weights=[1.0, 2.0])
        with pytest.raises(ArgumentError):
            product_spectrum([(2, 1.0)], weights=[-1.0])


def sphere_multiplicity_ref(n, k):
    if k == 0:
        return 1
    return math.comb(n + k, n) - math.comb(n + k - 2, n)
