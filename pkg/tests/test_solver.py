"""Critical-point search, Newton on the full system, continuation."""

import numpy as np
import pytest
from scipy.optimize import newton_krylov

import skewmf as s
from skewmf.errors import ConvergenceError, PathError, UnboundedDescentError

from fieldgen import random_mean_zero


@pytest.fixture(scope="module")
def pd_flat16():
    g = s.build_grid("torus", 16)
    ones = np.ones(g.shape)
    return s.desingularize(g, (4 * np.pi, 4 * np.pi), ones, ones)


@pytest.fixture(scope="module")
def pd_cos16():
    g = s.build_grid("torus", 16)
    h = 1.0 + 0.5 * np.cos(2 * np.pi * g.node_points()[..., 0])
    return s.desingularize(g, (4 * np.pi, 5 * np.pi), h, h)


class TestResidual:
    def test_trivial_zero(self, pd_flat16):
        z = np.zeros(pd_flat16.grid.shape)
        r1, r2 = s.residual(pd_flat16, z, z)
        assert r1 == 0.0 and r2 == 0.0

    def test_perturbation_linear_growth(self, pd_flat16):
        g = pd_flat16.grid
        rng = np.random.default_rng(40)
        phi = random_mean_zero(g, rng)
        res = []
        for eps in (0.01, 0.02, 0.04):
            r1, r2 = s.residual(pd_flat16, eps * phi, eps * phi)
            res.append(max(r1, r2))
        # residual of a perturbed solution scales ~linearly with eps
        assert res[1] / res[0] == pytest.approx(2.0, rel=0.15)
        assert res[2] / res[1] == pytest.approx(2.0, rel=0.25)


class TestMinimizeOuter:
    def test_trivial_solution(self, pd_flat16):
        g = pd_flat16.grid
        rng = np.random.default_rng(41)
        rep = s.minimize_outer(pd_flat16, random_mean_zero(g, rng, 0.1))
        assert rep.success
        assert np.max(np.abs(rep.u1)) < 1e-8
        assert np.max(np.abs(rep.u2)) < 1e-8

    def test_residual_contract(self, pd_cos16):
        g = pd_cos16.grid
        rng = np.random.default_rng(42)
        rep = s.minimize_outer(pd_cos16, random_mean_zero(g, rng, 0.1))
        assert rep.success and rep.max_residual < 1e-7

    def test_monotone_energy(self, pd_cos16):
        g = pd_cos16.grid
        rng = np.random.default_rng(43)
        rep = s.minimize_outer(pd_cos16, random_mean_zero(g, rng, 0.5))
        vals = [t["J_tilde"] for t in rep.trace]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_scalar_reduction_oracle(self, torus32):
        # symmetric data: the system collapses to one scalar mean-field
        # equation; cross-check against an independent Newton-Krylov solve
        g = torus32
        rho = 6 * np.pi
        h = 1.0 + 0.5 * np.cos(2 * np.pi * g.node_points()[..., 0])
        pd = s.desingularize(g, (rho, rho), h, h)
        rng = np.random.default_rng(44)
        rep = s.minimize_outer(pd, random_mean_zero(g, rng, 0.1))
        assert rep.success
        assert np.max(np.abs(rep.u1 - rep.u2)) < 1e-6

        logh = np.log(h)

        def scalar_residual(flat):
            u = g.project_mean_zero(flat.reshape(g.shape))
            m = np.max(logh + u)
            e = np.exp(logh + u - m)
            nu = e / np.sum(g.weights * e)
            return (g.neg_laplacian(u) - rho * g.project_mean_zero(nu - 1.0)).ravel()

        sol = newton_krylov(scalar_residual, np.zeros(g.n_nodes), f_tol=1e-10)
        u_scalar = g.project_mean_zero(sol.reshape(g.shape))
        assert np.max(np.abs(u_scalar - rep.u1)) < 1e-6

    def test_unbounded_descent_flagged(self, torus32):
        # mean rho above the coercive band: descent from a bubble blows down
        g = torus32
        pd = s.desingularize(g, (15 * np.pi, 15 * np.pi),
                             np.ones(g.shape), np.ones(g.shape))
        phi = s.bubble_field(g, s.BubbleParams(30.0, s.Barycenter([(1.0, (0.5, 0.5))])))
        with pytest.warns(UserWarning):
            with pytest.raises((UnboundedDescentError, ConvergenceError)):
                s.minimize_outer(pd, phi.values, divergence_level=-500.0,
                                 max_iter=300)


class TestNewtonEL:
    def test_stays_at_exact_root(self, pd_flat16):
        rep = s.newton_el(pd_flat16)
        assert rep.success and rep.max_residual == 0.0

    def test_quadratic_polish(self, pd_cos16):
        g = pd_cos16.grid
        rng = np.random.default_rng(45)
        warm = s.minimize_outer(pd_cos16, random_mean_zero(g, rng, 0.1))
        rep = s.newton_el(pd_cos16, warm.u1, warm.u2, tol=1e-12)
        assert rep.success and rep.max_residual < 1e-12
        assert len(rep.trace) <= 4  # <= 3 Newton steps from a warm start

    def test_symmetric_data_symmetric_solution(self, torus16):
        g = torus16
        h = 1.0 + 0.3 * np.cos(2 * np.pi * g.node_points()[..., 1])
        pd = s.desingularize(g, (5 * np.pi, 5 * np.pi), h, h)
        rng = np.random.default_rng(46)
        init = random_mean_zero(g, rng, 0.1)
        rep = s.newton_el(pd, init, init)
        assert rep.success
        assert np.max(np.abs(rep.u1 - rep.u2)) < 1e-8

    def test_swap_covariance(self, torus16):
        g = torus16
        h1 = 1.0 + 0.3 * np.cos(2 * np.pi * g.node_points()[..., 0])
        h2 = 1.0 + 0.2 * np.sin(2 * np.pi * g.node_points()[..., 1])
        pd = s.desingularize(g, (4 * np.pi, 5 * np.pi), h1, h2)
        rng = np.random.default_rng(47)
        a = random_mean_zero(g, rng, 0.1)
        b = random_mean_zero(g, rng, 0.1)
        rep = s.newton_el(pd, a, b)
        rep_sw = s.newton_el(pd.swapped(), b, a)
        assert np.max(np.abs(rep.u1 - rep_sw.u2)) < 1e-8
        assert np.max(np.abs(rep.u2 - rep_sw.u1)) < 1e-8

    def test_energy_reconstruction(self, pd_cos16):
        g = pd_cos16.grid
        rng = np.random.default_rng(48)
        warm = s.minimize_outer(pd_cos16, random_mean_zero(g, rng, 0.1))
        rep = s.newton_el(pd_cos16, warm.u1, warm.u2)
        assert abs(s.J_full(pd_cos16, rep.u1, rep.u2) - rep.j_tilde_value) < 1e-9


class TestContinuation:
    def test_constant_branch(self, torus16):
        g = torus16
        ones = np.ones(g.shape)
        pd = s.desingularize(g, (4 * np.pi, 4 * np.pi), ones, ones)
        path = [(4 * np.pi + np.pi * i / 3, 4 * np.pi + np.pi * i / 3)
                for i in range(7)]  # (4pi,4pi) -> (6pi,6pi)
        reps = s.continuation(pd, path)
        for rep in reps:
            assert rep.max_residual < 1e-10
            assert np.max(np.abs(rep.u1)) < 1e-9

    def test_branch_with_weights(self, torus16):
        g = torus16
        h = 1.0 + 0.5 * np.cos(2 * np.pi * g.node_points()[..., 0])
        pd = s.desingularize(g, (6 * np.pi, 6 * np.pi), h, h)
        # skirt the q = 4 pi curve: raise rho1 only, q stays below 4 pi - margin
        path = [(6 * np.pi, 6 * np.pi), (6.4 * np.pi, 6 * np.pi),
                (6.8 * np.pi, 6 * np.pi)]
        reps = s.continuation(pd, path)
        assert all(r.max_residual < 1e-8 for r in reps)

    def test_path_through_lambda_rejected(self, torus16):
        g = torus16
        ones = np.ones(g.shape)
        pd = s.desingularize(g, (7 * np.pi, 7 * np.pi), ones, ones)
        with pytest.raises(PathError):
            s.continuation(pd, [(7 * np.pi, 7 * np.pi), (8 * np.pi, 8 * np.pi)])

    def test_big_step_rejected(self, torus16):
        g = torus16
        ones = np.ones(g.shape)
        pd = s.desingularize(g, (4 * np.pi, 4 * np.pi), ones, ones)
        with pytest.raises(PathError):
            s.continuation(pd, [(4 * np.pi, 4 * np.pi), (6 * np.pi, 6 * np.pi)])


class TestFindK1:
    def test_flat_weights_trivial(self, torus16):
        g = torus16
        ones = np.ones(g.shape)
        pd = s.desingularize(g, (9 * np.pi, 9 * np.pi), ones, ones)
        rep = s.find_k1_solution(pd)
        assert rep.success and rep.max_residual < 1e-7
        assert np.max(np.abs(rep.u1)) < 1e-8  # constants already solve

    def test_cosine_weights(self):
        g = s.build_grid("torus", 32)
        h = 1.0 + 0.5 * np.cos(2 * np.pi * g.node_points()[..., 0])
        pd = s.desingularize(g, (9 * np.pi, 9 * np.pi), h, h)
        rep = s.find_k1_solution(pd)
        assert rep.success and rep.max_residual < 1e-7
        # the density is genuinely nonconstant
        assert np.max(np.abs(rep.u1)) > 1e-2


class TestReportInvariants:
    def test_reconstruction_identity(self, pd_cos16):
        g = pd_cos16.grid
        rng = np.random.default_rng(49)
        rep = s.minimize_outer(pd_cos16, random_mean_zero(g, rng, 0.1))
        assert np.max(np.abs(rep.u1 + rep.u2 - 2 * rep.F)) < 1e-14
        assert np.max(np.abs(rep.u2 - rep.u1 - 2 * rep.G)) < 1e-14
