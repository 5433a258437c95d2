"""Surface discretization: quadrature, operators, distance, field I/O."""

import numpy as np
import pytest

import skewmf as s
from skewmf.errors import ConfigurationError, ContractViolation
from skewmf.fieldio import dump_field, export_csv, load_field
from skewmf.surface import SPHERE_RADIUS

from fieldgen import random_mean_zero


class TestBuildGrid:
    def test_torus_32_uniform_weights(self):
        g = s.build_grid("torus", 32)
        assert g.n_nodes == 1024
        assert np.allclose(g.weights, 1.0 / 1024)

    def test_sphere_weights_sum_to_one(self):
        g = s.build_grid("sphere", (24, 48))
        assert abs(np.sum(g.weights) - 1.0) < 1e-12

    def test_torus_weights_sum_to_one(self):
        g = s.build_grid("torus", 16)
        assert abs(np.sum(g.weights) - 1.0) < 1e-12

    @pytest.mark.parametrize("res", [7, 6, (32, 7), (9, 16)])
    def test_bad_resolution_rejected(self, res):
        with pytest.raises(ConfigurationError):
            s.build_grid("torus", res)

    def test_odd_sphere_rejected(self):
        with pytest.raises(ConfigurationError):
            s.build_grid("sphere", (24, 49))


class TestIntegrate:
    def test_constant_one(self, torus32, sphere48):
        for g in (torus32, sphere48):
            assert abs(s.integrate(g, np.ones(g.shape)) - 1.0) < 1e-12

    def test_cosine_mode_vanishes(self, torus32):
        x = torus32.node_points()[..., 0]
        assert abs(s.integrate(torus32, np.cos(2 * np.pi * x))) < 1e-12

    def test_refinement_oracle(self):
        # band-limited f: f^2 stays under Nyquist, so both grids are exact
        g1 = s.build_grid("torus", 16)
        g2 = s.build_grid("torus", 32)
        rng = np.random.default_rng(3)
        coeffs = rng.standard_normal((4, 4, 2))
        vals = []
        for g in (g1, g2):
            x = g.node_points()[..., 0]
            y = g.node_points()[..., 1]
            f = np.ones(g.shape)
            for kx in range(4):
                for ky in range(4):
                    ph = 2 * np.pi * (kx * x + ky * y)
                    f = f + coeffs[kx, ky, 0] * np.cos(ph) + coeffs[kx, ky, 1] * np.sin(ph)
            vals.append(s.integrate(g, f * f))
        assert abs(vals[0] - vals[1]) < 1e-10 * abs(vals[1])

    def test_sphere_refinement(self):
        vals = []
        for n in (24, 48):
            g = s.build_grid("sphere", n)
            th = g.node_points()[..., 0]
            ph = g.node_points()[..., 1]
            f = np.exp(0.3 * np.cos(th) + 0.2 * np.sin(th) * np.cos(ph))
            vals.append(s.integrate(g, f))
        assert abs(vals[0] - vals[1]) < 1e-8 * abs(vals[1])


class TestDirichlet:
    def test_zero_field(self, torus32):
        assert s.dirichlet(torus32, np.zeros(torus32.shape)) == 0.0

    def test_cosine_mode_energy(self, torus32):
        x = torus32.node_points()[..., 0]
        u = np.cos(2 * np.pi * x)
        assert abs(s.dirichlet(torus32, u) - 2 * np.pi**2) < 1e-10

    def test_polarization_identity(self, torus32, sphere48):
        rng = np.random.default_rng(5)
        for g in (torus32, sphere48):
            u = random_mean_zero(g, rng)
            v = random_mean_zero(g, rng)
            lhs = s.gradient_pairing(g, u, v)
            rhs = 0.5 * (s.dirichlet(g, u + v) - s.dirichlet(g, u) - s.dirichlet(g, v))
            assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs))

    def test_positive_definite(self, torus32):
        rng = np.random.default_rng(6)
        u = random_mean_zero(torus32, rng)
        assert s.dirichlet(torus32, u) > 0

    def test_rejects_non_mean_zero(self, torus32):
        with pytest.raises(ContractViolation):
            s.dirichlet(torus32, np.ones(torus32.shape))


class TestLaplacian:
    def test_torus_eigenfunction(self, torus32):
        x = torus32.node_points()[..., 0]
        u = np.cos(2 * np.pi * x)
        neg_lap = -s.laplacian(torus32, u).values
        assert np.max(np.abs(neg_lap - 4 * np.pi**2 * u)) < 1e-9

    def test_sphere_eigenfunction(self, sphere48):
        # Y_1^0 ~ cos(theta) with eigenvalue l(l+1)/R^2 = 2/R^2
        u = sphere48.project_mean_zero(np.cos(sphere48.node_points()[..., 0]))
        neg_lap = sphere48.neg_laplacian(u)
        lam = 2.0 / SPHERE_RADIUS**2
        assert np.max(np.abs(neg_lap - lam * u)) < 1e-9 * lam

    def test_green_identity(self, torus32, sphere48):
        rng = np.random.default_rng(7)
        for g in (torus32, sphere48):
            u = random_mean_zero(g, rng)
            lhs = s.integrate(g, -s.laplacian(g, u).values * u)
            rhs = s.dirichlet(g, u)
            assert abs(lhs - rhs) < 1e-10 * (1 + abs(rhs))

    def test_inverse_roundtrip(self, torus32, sphere48):
        rng = np.random.default_rng(8)
        for g in (torus32, sphere48):
            u = g.bandlimit(random_mean_zero(g, rng))
            u = g.project_mean_zero(u)
            back = s.inverse_laplacian(g, s.laplacian(g, u)).values
            assert np.max(np.abs(back - u)) < 1e-10 * (1 + np.max(np.abs(u)))

    def test_inverse_rejects_non_mean_zero(self, torus32):
        with pytest.raises(ContractViolation):
            s.inverse_laplacian(torus32, np.ones(torus32.shape))

    def test_inverse_of_zero(self, torus32):
        out = s.inverse_laplacian(torus32, np.zeros(torus32.shape)).values
        assert np.all(out == 0)

    def test_annihilates_constants(self, torus32, sphere48):
        for g in (torus32, sphere48):
            out = g.neg_laplacian(np.full(g.shape, 3.7))
            # roundoff scales with the largest resolved eigenvalue (~1e4)
            assert np.max(np.abs(out)) < 1e-7

    def test_maps_mean_zero_to_mean_zero(self, torus32, sphere48):
        rng = np.random.default_rng(9)
        for g in (torus32, sphere48):
            u = random_mean_zero(g, rng)
            assert abs(s.integrate(g, g.neg_laplacian(u))) < 1e-10


class TestPoincare:
    def test_discrete_poincare(self, torus16, sphere48):
        rng = np.random.default_rng(10)
        for g in (torus16, sphere48):
            for _ in range(100):
                u = g.bandlimit(random_mean_zero(g, rng, smooth=False))
                u = g.project_mean_zero(u)
                dir_u = s.dirichlet(g, u)
                l2 = s.integrate(g, u * u)
                assert dir_u >= g.lambda1 * l2 - 1e-9 * (1 + dir_u)


class TestDistance:
    def test_self_distance(self, torus32, sphere48):
        assert s.distance(torus32, (0.3, 0.4), (0.3, 0.4)) == 0.0
        assert s.distance(sphere48, (1.0, 2.0), (1.0, 2.0)) == 0.0

    def test_torus_wrap(self, torus32):
        assert abs(s.distance(torus32, (0, 0), (0.5, 0)) - 0.5) < 1e-14
        assert abs(s.distance(torus32, (0, 0), (0.9, 0)) - 0.1) < 1e-14

    def test_sphere_antipodal(self, sphere48):
        d = s.distance(sphere48, (0.0, 0.0), (np.pi, 0.0))
        assert abs(d - np.pi * SPHERE_RADIUS) < 1e-12

    def test_symmetry_and_triangle(self, torus32, sphere48):
        rng = np.random.default_rng(11)
        for g in (torus32, sphere48):
            pts = g.node_points().reshape(-1, 2)
            for _ in range(20):
                a, b, c = (tuple(pts[rng.integers(len(pts))]) for _ in range(3))
                assert abs(s.distance(g, a, b) - s.distance(g, b, a)) < 1e-12
                assert s.distance(g, a, c) <= s.distance(g, a, b) + s.distance(g, b, c) + 1e-12


class TestFieldIO:
    def test_roundtrip_bits(self, torus32, sphere48, tmp_path):
        rng = np.random.default_rng(12)
        for g, name in ((torus32, "t.lcsf"), (sphere48, "s.lcsf")):
            f = s.Field(g, rng.standard_normal(g.shape))
            path = tmp_path / name
            dump_field(f, path)
            back = load_field(path)
            assert back.grid.kind == g.kind
            assert back.grid.shape == g.shape
            assert np.array_equal(back.values, f.values)

    def test_header_magic(self, torus16, tmp_path):
        f = s.Field.zeros(torus16)
        path = tmp_path / "f.lcsf"
        dump_field(f, path)
        with open(path, "rb") as fh:
            assert fh.read(4) == b"LCSF"

    def test_csv_export(self, torus16, tmp_path):
        f = s.Field(torus16, np.arange(torus16.n_nodes, dtype=float).reshape(torus16.shape))
        path = tmp_path / "f.csv"
        export_csv(f, path)
        rows = path.read_text().strip().splitlines()
        assert len(rows) == torus16.n_nodes + 1  # header + nodes
        assert rows[0].split(",")[-1] == "value"


class TestSphereTransforms:
    def test_projection_idempotent(self, sphere48):
        rng = np.random.default_rng(13)
        v = rng.standard_normal(sphere48.shape)
        once = sphere48.bandlimit(v)
        twice = sphere48.bandlimit(once)
        assert np.max(np.abs(twice - once)) < 1e-12 * (1 + np.max(np.abs(once)))
