import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unitbundle import models as md
from unitbundle import utb
from unitbundle.curvature import PreconditionError
from unitbundle.utb import LiftedVector

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_lift(rng, u):
    n = u.shape[0]
    return utb._lv(rng.normal(size=n), rng.normal(size=n), u)


def curved_model(n, seed):
    rng = np.random.default_rng(seed)
    dR = md.random_nabla_curvature(n, rng) if n <= 3 else None
    return md.CurvModel(md.random_curvature(n, rng), dR=dR), rng


class TestLifts:
    def test_tangential_lift_drops_u_component(self):
        u = np.array([0.0, 0.0, 1.0])
        v = LiftedVector.tangential([1.0, 2.0, 3.0], u)
        assert np.allclose(v.t_part, [1.0, 2.0, 0.0])
        assert not v.h_part.any()

    def test_tangential_part_must_be_orthogonal(self):
        with pytest.raises(PreconditionError):
            LiftedVector(np.array([0.0, 1.0]), np.zeros(2), np.array([0.0, 1.0]))

    def test_non_unit_fiber_point(self):
        with pytest.raises(PreconditionError):
            utb.xi(np.array([1.0, 1.0]))

    def test_unknown_lift(self):
        with pytest.raises(ValueError):
            LiftedVector.lift([1.0, 0.0], np.array([0.0, 1.0]), "v")

    def test_arithmetic(self):
        u = np.array([1.0, 0.0])
        a = LiftedVector.horizontal([1.0, 2.0], u)
        b = LiftedVector.tangential([0.0, 1.0], u)
        c = (a + b) * 2.0 - b
        assert c.close_to(utb._lv([0.0, 1.0], [2.0, 4.0], u), 1e-15)
        assert (-a).close_to(a * -1.0, 0.0)


class TestContactStructure:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_xi_is_unit_and_dual_to_eta(self, n):
        u = unit(np.random.default_rng(n), n)
        x = utb.xi(u)
        assert utb.eta(x) == pytest.approx(1.0)
        assert utb.gbar(x, x) == pytest.approx(1.0)
        assert not np.any(utb.phi(x).as_array() > 1e-15)

    @settings(max_examples=30, deadline=None)
    @given(seeds, st.integers(2, 5))
    def test_contact_metric_identities(self, seed, n):
        rng = np.random.default_rng(seed)
        u = unit(rng, n)
        X, Y = random_lift(rng, u), random_lift(rng, u)
        x = utb.xi(u)
        # phi^2 = -I + eta (x) xi
        assert utb.phi(utb.phi(X)).close_to(-X + x * utb.eta(X), 1e-12)
        # eta = gbar(xi, .)
        assert utb.eta(X) == pytest.approx(utb.gbar(x, X), abs=1e-12)
        # gbar(phi X, phi Y) = gbar(X, Y) - eta(X) eta(Y)
        assert utb.gbar(utb.phi(X), utb.phi(Y)) == pytest.approx(
            utb.gbar(X, Y) - utb.eta(X) * utb.eta(Y), abs=1e-12)
        # phi is gbar-skew
        assert utb.gbar(utb.phi(X), Y) == pytest.approx(-utb.gbar(X, utb.phi(Y)), abs=1e-12)

    def test_contact_tensors(self):
        u = np.array([0.0, 1.0])
        d = utb.contact_tensors(u, [3.0, 4.0], "h")
        assert d.eta == 2.0
        assert d.gbar_self == pytest.approx(25 / 4)
        assert d.gbar_xi == pytest.approx(2.0)
        assert d.phi.close_to(LiftedVector.tangential([3.0, 4.0], u), 1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_frame_is_orthonormal_and_ends_with_xi(self, n):
        u = unit(np.random.default_rng(10 + n), n)
        basis = utb.gbar_frame(u)
        G = np.array([[utb.gbar(a, b) for b in basis] for a in basis])
        assert len(basis) == 2 * n - 1
        assert np.allclose(G, np.eye(2 * n - 1), atol=1e-12)
        assert basis[-1].close_to(utb.xi(u), 1e-12)


class TestConnection:
    def test_tt_case(self):
        m = md.constant_curvature(3, 1.0)
        u = np.array([0.0, 0.0, 1.0])
        out = utb.nabla_bar("tt", [1.0, 0.0, 0.0], [0.0, 0.0, 2.0], np.zeros(3), m, u)
        assert np.allclose(out.t_part, [-2.0, 0.0, 0.0])

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_torsion_free_on_mixed_pairs(self, seed):
        # with nabla_X Y = nabla_Y X = 0 at the point, nabla_{X^h} Y^t - nabla_{Y^t} X^h = [X^h, Y^t] = 0
        rng = np.random.default_rng(seed)
        m = md.CurvModel(md.random_curvature(3, rng))
        u = unit(rng, 3)
        X, Y = rng.normal(size=3), rng.normal(size=3)
        Y = Y - np.dot(Y, u) * u
        a = utb.nabla_bar("ht", X, Y, np.zeros(3), m, u)
        b = utb.nabla_bar("th", Y, X, np.zeros(3), m, u)
        assert a.close_to(b, 1e-12)

    def test_unknown_case(self):
        with pytest.raises(ValueError):
            utb.nabla_bar("xx", [1.0, 0.0], [0.0, 1.0], [0.0, 0.0], md.constant_curvature(2, 1.0), np.array([1.0, 0.0]))


def riemann4(m, u, A, B, C, D):
    return utb.gbar(utb.riemann_bar_lifted(A, B, C, m), D)


class TestCurvature:
    @pytest.mark.parametrize("n", [2, 3])
    def test_algebraic_symmetries(self, n):
        m, rng = curved_model(n, 100 + n)
        u = unit(rng, n)
        for _ in range(3):
            A, B, C, D = (random_lift(rng, u) for _ in range(4))
            r = riemann4(m, u, A, B, C, D)
            assert r == pytest.approx(-riemann4(m, u, B, A, C, D), abs=1e-10)
            assert r == pytest.approx(-riemann4(m, u, A, B, D, C), abs=1e-10)
            assert r == pytest.approx(riemann4(m, u, C, D, A, B), abs=1e-10)
            bianchi = r + riemann4(m, u, B, C, A, D) + riemann4(m, u, C, A, B, D)
            assert abs(bianchi) < 1e-10

    def test_unit_two_sphere(self):
        # Sasaki T1 S^2 has constant curvature 1/4; the factor 1/4 in gbar rescales it to 1
        m = md.constant_curvature(2, 1.0)
        u = np.array([0.0, 1.0])
        basis = utb.gbar_frame(u)
        for a, b in itertools.combinations(basis, 2):
            assert riemann4(m, u, a, b, b, a) == pytest.approx(1.0)

    def test_unknown_case(self):
        with pytest.raises(ValueError):
            utb.riemann_bar("ttx", [1.0, 0.0], [1.0, 0.0], [1.0, 0.0], md.constant_curvature(2, 1.0), np.array([0.0, 1.0]))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_ricci_is_trace_of_riemann(self, n):
        m, rng = curved_model(n, 200 + n)
        u = unit(rng, n)
        for _ in range(3):
            Y, Z = random_lift(rng, u), random_lift(rng, u)
            assert utb.ricci_bar(Y, Z, m) == pytest.approx(utb.ricci_from_riemann_bar(Y, Z, m), abs=1e-9)

    def test_ricci_rejects_mixed_fibers(self):
        m = md.constant_curvature(2, 1.0)
        a = LiftedVector.horizontal([1.0, 0.0], np.array([1.0, 0.0]))
        b = LiftedVector.horizontal([1.0, 0.0], np.array([0.0, 1.0]))
        with pytest.raises(PreconditionError):
            utb.ricci_bar(a, b, m)


class TestScalar:
    def test_two_sphere_values(self):
        m = md.constant_curvature(2, 1.0)
        u = np.array([1.0, 0.0])
        assert utb.scalar_bar(m, u) == pytest.approx(6.0)
        assert utb.scalar_bar(m, u, "as-printed") == pytest.approx(1.5)

    def test_four_sphere_curvature_two(self):
        m = md.constant_curvature(4, 2.0)
        assert utb.scalar_bar(m, np.eye(4)[0]) == pytest.approx(96.0)

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.integers(2, 5))
    def test_trace_consistent_is_matrix_trace(self, seed, n):
        rng = np.random.default_rng(seed)
        m = md.random_model(n, rng)
        u = unit(rng, n)
        assert np.trace(utb.ricci_bar_matrix(m, u)) == pytest.approx(utb.scalar_bar(m, u), rel=1e-10, abs=1e-10)

    def test_unknown_normalization(self):
        with pytest.raises(ValueError):
            utb.scalar_bar(md.constant_curvature(2, 1.0), np.array([1.0, 0.0]), "other")


class TestEtaEinstein:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_roots_pass_all_conditions(self, n):
        for kappa in {1.0, float(n - 2)}:
            m = md.constant_curvature(n, kappa)
            al, be = utb.solve_alpha_beta(m)
            rep = utb.eta_einstein_residual(m, np.eye(n)[0], al, be)
            assert rep.is_eta_einstein
            assert utb.eta_einstein_matrix_residual(m, np.eye(n)[-1], al, be) < 1e-10
            assert abs(rep.constraint_410_residual) < 1e-9

    def test_four_sphere_curvature_two_constants(self):
        assert utb.solve_alpha_beta(md.constant_curvature(4, 2.0)) == pytest.approx((16.0, -16.0))

    def test_two_sphere_constants(self):
        assert utb.solve_alpha_beta(md.constant_curvature(2, 1.0)) == pytest.approx((2.0, 0.0))

    @pytest.mark.parametrize("n,kappa", [(3, 2.0), (4, 0.5), (5, -1.0), (2, 0.5)])
    def test_non_roots_fail(self, n, kappa):
        m = md.constant_curvature(n, kappa)
        al, be = utb.solve_alpha_beta(m)
        assert not utb.eta_einstein_residual(m, np.eye(n)[0], al, be).is_eta_einstein
        assert utb.eta_einstein_matrix_residual(m, np.eye(n)[0], al, be) > 1e-3

    @settings(max_examples=20, deadline=None)
    @given(seeds, st.integers(2, 4), st.floats(-3, 3), st.floats(-3, 3))
    def test_forms_vanish_iff_matrix_residual_vanishes(self, seed, n, alpha, beta):
        # the three pointwise forms are block rescalings of rhobar - alpha gbar - beta eta(x)eta
        m, rng = curved_model(n, seed % 1000)
        u = unit(rng, n)
        E = utb.complete_frame(u)
        d41, d42, d43 = utb.eta_einstein_forms(m, u, alpha, beta)
        dev = utb.ricci_bar_matrix(m, u) - alpha * np.eye(2 * n - 1)
        dev[-1, -1] -= beta
        P = E[:, : n - 1]
        assert np.allclose(dev[: n - 1, : n - 1], P.T @ d41 @ P, atol=1e-9)
        assert np.allclose(dev[n - 1:, n - 1:], -2 * E.T @ d43 @ E, atol=1e-9)
        assert np.allclose(dev[: n - 1, n - 1:], 2 * P.T @ d42 @ E, atol=1e-9)

    def test_candidate_from_trace_identities(self):
        for n in range(2, 9):
            for k in {1.0, float(n - 2)}:
                m = md.constant_curvature(n, k)
                t = utb.trace_identities(m, np.eye(n)[0], *utb.solve_alpha_beta(m))
                assert max(t.eq_4_24, t.eq_4_25, t.eq_4_26) < 1e-10


class TestScalarConstraints:
    def test_two_dim_constraint(self):
        for k in (-1.0, 0.0, 0.5, 1.0, 2.0):
            assert utb.check_constraint_410(md.constant_curvature(2, k)) == pytest.approx(-32 * (k * k - k))

    @pytest.mark.parametrize("n", range(2, 8))
    def test_moment_identity_at_roots(self, n):
        for k in {1.0, float(n - 2)}:
            m = md.constant_curvature(n, k)
            assert utb.check_identity_49(m, *utb.solve_alpha_beta(m)) < 1e-10

    def test_quadrature_average(self):
        m = md.constant_curvature(3, 1.0)
        al, be = utb.solve_alpha_beta(m)
        assert abs(utb.sphere_average_43(m, al, be, samples=20_000)) < 1e-3

    def test_bounds(self):
        assert utb.einstein_bounds(4, 12.0) and utb.einstein_bounds(4, 24.0)
        assert not utb.einstein_bounds(4, 11.9) and not utb.einstein_bounds(4, 24.1)
        with pytest.raises(ValueError):
            utb.einstein_bounds(2, 2.0)

    @pytest.mark.parametrize("a", [-1.0, -2.0])
    def test_einstein_quadratic_vanishes_at_sphere_roots(self, a):
        lhs, rhs = utb.einstein_quadratic_sides(md.singer_thorpe_4d((a, a, a, 0, 0, 0)))
        assert lhs == pytest.approx(0.0, abs=1e-12) and rhs == pytest.approx(0.0, abs=1e-12)

    def test_einstein_quadratic_sides_differ_off_roots(self):
        lhs, rhs = utb.einstein_quadratic_sides(md.singer_thorpe_4d((-1.5, -1.5, -1.5, 0, 0, 0)))
        assert lhs == pytest.approx(0.0, abs=1e-12)
        assert rhs < -1.0
