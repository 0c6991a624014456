import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unitbundle import classify as cl
from unitbundle import models as md
from unitbundle import utb
from unitbundle.curvature import ShapeError

seeds = st.integers(min_value=0, max_value=2**32 - 1)
BRANCH = (-1.0, 0.5, -1.0, -0.5, 1.0, -0.5)


class TestDim2:
    @pytest.mark.parametrize("kappa", [0.0, 1.0])
    def test_roots(self, kappa):
        c = cl.classify_dim2(kappa)
        assert c.is_eta_einstein and c.kappa == kappa
        assert c.label() == f"ConstCurv({kappa:g})"
        assert c.residual("eq-4.10") == 0.0

    @pytest.mark.parametrize("kappa", [0.5, -1.0, 2.0, 1e-3])
    def test_non_roots(self, kappa):
        c = cl.classify_dim2(kappa)
        assert c.verdict is cl.Verdict.NOT_ETA_EINSTEIN
        assert c.label() == "NotEtaEinstein"
        assert c.residual("eq-4.10") == pytest.approx(-32 * (kappa ** 2 - kappa))

    def test_half(self):
        assert abs(cl.classify_dim2(0.5).residual("eq-4.10")) == pytest.approx(8.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-2, 3))
    def test_agrees_with_constant_curvature_classifier(self, kappa):
        assert cl.classify_dim2(kappa).is_eta_einstein == cl.classify_const_curv(2, kappa).is_eta_einstein

    def test_missing_residual(self):
        with pytest.raises(KeyError):
            cl.classify_dim2(1.0).residual("eq-5.17")


class TestDim3:
    def test_two_g(self):
        c = cl.classify_dim3(2 * np.eye(3))
        assert c.is_eta_einstein and c.kappa == 1.0 and c.tau == 6.0
        assert c.residual("eq-4-3") == 0.0
        assert c.residual("eq-4.1") < 1e-12

    def test_identity_ricci(self):
        c = cl.classify_dim3(np.eye(3))
        assert not c.is_eta_einstein
        assert c.residual("eq-4-3") == pytest.approx(15.0)

    def test_lhs_formula(self):
        rho = np.diag([1.0, 2.0, 4.0])
        tau = 7.0
        dev = rho - tau / 3 * np.eye(3)
        assert cl.dim3_lhs(rho) == pytest.approx(23 * np.sum(dev ** 2) + 5 / 3 * (tau - 6) ** 2)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_rejects_random(self, seed):
        r = md.random_symmetric(3, np.random.default_rng(seed))
        assert not cl.classify_dim3(r).is_eta_einstein

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-5, 5).filter(lambda k: abs(k - 1) > 1e-3))
    def test_rejects_other_space_forms(self, kappa):
        assert not cl.classify_dim3(2 * kappa * np.eye(3)).is_eta_einstein

    def test_shape(self):
        with pytest.raises(ShapeError):
            cl.classify_dim3(np.eye(2))


class TestConstantCurvature:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_roots(self, n):
        for kappa in {1.0, float(n - 2)}:
            c = cl.classify_const_curv(n, kappa)
            assert c.is_eta_einstein, (n, kappa)
            assert max(c.residual(e) for e in ("eq-4.1", "eq-4.2", "eq-4.3")) <= 1e-10
            assert c.residual("const-curv-quadratic") == 0.0

    @pytest.mark.parametrize("n", range(2, 9))
    def test_grid(self, n):
        for kappa in np.linspace(-3, n, 57):
            expected = abs(kappa - 1) < 1e-12 or abs(kappa - (n - 2)) < 1e-12
            assert cl.classify_const_curv(n, float(kappa)).is_eta_einstein == expected

    def test_six_dim_curvature_four(self):
        c = cl.classify_const_curv(6, 4.0)
        assert c.is_eta_einstein and c.label() == "ConstCurv(4)"
        assert (c.alpha, c.beta) == pytest.approx(utb.solve_alpha_beta(md.constant_curvature(6, 4.0)))

    def test_dimension(self):
        with pytest.raises(ValueError):
            cl.classify_const_curv(1, 1.0)


class TestFourDimEinstein:
    @pytest.mark.parametrize("p,kappa,tau", [((-1, -1, -1, 0, 0, 0), 1.0, 12.0), ((-2, -2, -2, 0, 0, 0), 2.0, 24.0)])
    def test_spheres(self, p, kappa, tau):
        c = cl.classify_4d_einstein(p)
        assert c.is_eta_einstein and c.kappa == kappa and c.tau == tau
        assert c.residual("eq-5.17") == 0.0
        assert c.residual("eq-4.3") < 1e-12

    def test_branch_values_contradict(self):
        c = cl.classify_4d_einstein(BRANCH)
        assert c.verdict is cl.Verdict.CONTRADICTION
        assert c.branch == "two-equal:c-a"
        assert c.tau == 6.0
        assert c.residual("eq-5.16") == 48.0
        assert c.residual("eq-5.16-discriminant") == -156.0
        assert c.residual("eq-4.10") == pytest.approx(-576.0)
        assert c.alpha == pytest.approx(10.5)

    def test_branch_values_fail_pointwise(self):
        # the contradiction is real: no (alpha, beta) makes the matrix residual vanish
        m = md.singer_thorpe_4d(BRANCH)
        rng = np.random.default_rng(0)
        u = rng.normal(size=4)
        u /= np.linalg.norm(u)
        rb = utb.ricci_bar_matrix(m, u)
        assert np.ptp(np.diag(rb)[:-1]) > 0.1

    def test_discriminant(self):
        assert cl.DISCRIMINANT_516 == -156.0
        taus = np.linspace(-100, 100, 2001)
        assert np.all(cl.quadratic_516(taus) > 0)

    def test_quadratic_roots(self):
        assert cl.quadratic_517(12.0) == 0.0 and cl.quadratic_517(24.0) == 0.0

    @pytest.mark.parametrize("a", [-3.0, -1.5, -0.5, 0.0, 0.7])
    def test_equal_off_roots(self, a):
        c = cl.classify_4d_einstein((a, a, a, 0, 0, 0))
        assert c.verdict is cl.Verdict.NOT_ETA_EINSTEIN
        assert c.residual("eq-5.17") == pytest.approx((-12 * a - 12) * (-12 * a - 24))

    def test_not_super_einstein(self):
        c = cl.classify_4d_einstein((-1, -1, -1, 0.3, -0.3, 0))
        assert c.verdict is cl.Verdict.NOT_ETA_EINSTEIN
        assert c.branch == "super-einstein"
        assert c.residual("eq-5.4") > 0.1

    def test_distinct_with_unequal_norms(self):
        # a, b, c distinct; the super-Einstein relations hold (t = 2) but 2(a^2+d^2) etc. differ
        c = cl.classify_4d_einstein((1, 2, 3, 1, 0, -1))
        assert c.verdict is cl.Verdict.NOT_ETA_EINSTEIN
        assert c.branch == "distinct"
        assert c.residual("eq-5.5-5.7") == pytest.approx(16.0)

    def test_degenerate_band(self):
        # b - a sits between tol and 10 tol while the super-Einstein relations hold exactly
        tol, d = 1e-9, 5e-9
        c = cl.classify_4d_einstein((-1.0, -1.0 + d, -1.0, -d / 3, 2 * d / 3, -d / 3), tol)
        assert c.verdict is cl.Verdict.CONTRADICTION
        assert c.branch == "degenerate-branch"
        assert c.residual("branch-gap") == pytest.approx(d, rel=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_only_spheres_are_eta_einstein(self, seed):
        p = md.random_st_params(np.random.default_rng(seed))
        c = cl.classify_4d_einstein(p)
        if c.is_eta_einstein:
            assert c.kappa in (1.0, 2.0)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-3, 1).filter(lambda a: min(abs(a + 1), abs(a + 2)) > 1e-6))
    def test_equal_sweep(self, a):
        assert not cl.classify_4d_einstein((a, a, a, 0, 0, 0)).is_eta_einstein

    def test_bad_length(self):
        with pytest.raises(ValueError):
            cl.classify_4d_einstein((1, 2, 3))


class TestPatterns:
    def test_equal(self):
        assert cl.st_equal_pattern(md.STParams(-1, -1, -1, 0, 0, 0))[0] == "equal"

    def test_two_equal(self):
        assert cl.st_equal_pattern(md.STParams(*BRANCH))[0] == "two-equal:c-a"

    def test_distinct(self):
        assert cl.st_equal_pattern(md.STParams(1, 2, 3, 0, 0, 0))[0] == "distinct"

    def test_ambiguous_gap(self):
        assert cl.st_equal_pattern(md.STParams(1, 1 + 5e-9, 3, 0, 0, 0), 1e-9)[0] == "degenerate"


class TestClassificationRecord:
    def test_to_dict(self):
        d = cl.classify_const_curv(3, 1.0).to_dict()
        assert d["verdict"] == "eta-einstein-const-curv"
        assert d["label"] == "ConstCurv(1)"
        assert {"equation": "eq-4.10", "residual": pytest.approx(0.0)} in d["certificate"]

    def test_contradiction_label(self):
        assert cl.classify_4d_einstein(BRANCH).label() == "Contradiction(two-equal:c-a)"
