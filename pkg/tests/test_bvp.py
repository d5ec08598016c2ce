import math

import numpy as np
import pytest

from nanorod.bvp import (
    closed_form_moment,
    integrate,
    linear_shooting_determinant,
    node_count,
    reduce_rhs,
    residual_M2,
    shoot,
    solve_postbuckling,
    tip_deflection,
)
from nanorod.charcurve import solve_lambda2
from nanorod.errors import NoConvergenceError
from nanorod.model import LoadPoint, RodSetup
from nanorod.quadrature import Grid

from conftest import critical_point, fixture_curvature


@pytest.fixture(scope="module")
def bgrid():
    # shooting accuracy is step-limited well below tolerances at n = 1024
    return Grid(1024)


class TestRhs:
    def test_straight_configuration_is_stationary(self):
        setup = RodSetup(kappa=0.25)
        deriv = reduce_rhs((0.3, 0.0, 0.0, 0.0, 0.0), LoadPoint(5.0, 1.0), setup, 0.3)
        assert deriv == (1.0, 0.0, 0.0, 0.0, 0.0)

    def test_local_rod_closure(self):
        # kappa = 0: theta' = m + alpha1/rho0
        setup = RodSetup(kappa=0.0, alpha1=0.02, rho0=lambda t: 1.0 + 0.0 * t)
        deriv = reduce_rhs((0.0, 0.1, 0.2, 0.3, 0.4), LoadPoint(5.0, 1.0), setup, 0.5)
        assert deriv[2] == pytest.approx(0.4 + 0.02, rel=1e-14)

    def test_moment_closure_consistency_along_trajectory(self, bgrid):
        # m recomputed from the closed-form constitutive elimination, with
        # the curvature taken by finite differences of the sampled slope,
        # matches the integrated m on the interior of a nontrivial trajectory
        p0 = critical_point(10.0, 0.25, near=0.682732)
        sol = solve_postbuckling(p0, 0.25, 0.3, grid=bgrid)
        recomputed = closed_form_moment(sol)
        gap = np.max(np.abs((recomputed - sol.trajectory.m)[1:-1]))
        assert gap < 1e-6


class TestIntegrate:
    def test_trivial_solution(self, bgrid):
        setup = RodSetup(kappa=0.25)
        traj = integrate(LoadPoint(2.0, 0.5), setup, 0.0, 0.0, grid=bgrid)
        assert np.max(np.abs(traj.y)) == 0.0
        assert traj.x[-1] == pytest.approx(1.0, abs=1e-14)

    def test_shear_matches_quadrature_of_deflection(self, bgrid):
        p0 = critical_point(10.0, 0.25, near=0.682732)
        sol = solve_postbuckling(p0, 0.25, 0.3, grid=bgrid)
        lhs = sol.trajectory.v
        rhs = sol.setup.alpha2 + sol.load.lambda1 * bgrid.i1(sol.trajectory.y)
        assert np.max(np.abs(lhs - rhs)) < 1e-8

    def test_step_refinement(self, bgrid):
        p0 = critical_point(10.0, 0.25, near=0.682732)
        sol = solve_postbuckling(p0, 0.25, 0.3, grid=bgrid)
        setup = RodSetup(kappa=0.25)
        coarse = integrate(sol.load, setup, sol.v0, sol.m0, n_steps=1024)
        fine = integrate(sol.load, setup, sol.v0, sol.m0, n_steps=2048)
        assert abs(coarse.y[-1] - fine.y[-1]) < 1e-8

    def test_inextensibility_structural(self, bgrid):
        p0 = critical_point(10.0, 0.25, near=0.682732)
        sol = solve_postbuckling(p0, 0.25, 0.5, grid=bgrid)
        th = sol.trajectory.theta
        assert np.max(np.abs(np.cos(th) ** 2 + np.sin(th) ** 2 - 1.0)) < 1e-15


class TestShoot:
    def test_trivial_branch_from_zero_guess(self, bgrid):
        setup = RodSetup(kappa=0.25)
        sol = shoot(LoadPoint(5.0, 0.3), setup, 0.0, 0.0, grid=bgrid)
        assert tip_deflection(sol) == 0.0
        assert max(abs(r) for r in sol.terminal_residuals) < 1e-9

    def test_tangential_offset_carries_small_branch(self, bgrid):
        # loads moved along the curve tangent: a small nontrivial solution
        # exists there as well (amplitude linear in the offset)
        p0 = critical_point(10.0, 0.25, near=0.682732)
        from nanorod.charcurve import eta_prime
        slope = eta_prime(p0, 0.25)
        p = p0.offset(0.5, slope * 0.5)
        setup = RodSetup(kappa=0.25)
        sol = shoot(p, setup, 0.05, 0.04, grid=bgrid)
        assert abs(tip_deflection(sol)) > 1e-3
        assert node_count(sol) == 0

    def test_imperfect_rod_linear_response(self, bgrid):
        # alpha = 0.01 response compared with the linearized inhomogeneous
        # problem solved by superposition
        kappa = 0.25
        setup = RodSetup(kappa=kappa, alpha1=0.01, alpha2=0.01, rho0=fixture_curvature)
        p = LoadPoint(2.0, 0.3)  # well below critical
        sol = shoot(p, setup, 0.0, 0.0, grid=bgrid)
        y_lin = _linear_imperfect_response(p, setup, bgrid)
        assert abs(tip_deflection(sol)) > 1e-4
        assert tip_deflection(sol) == pytest.approx(y_lin, rel=0.10)

    def test_nonconvergence_reports_last_iterate(self, bgrid):
        setup = RodSetup(kappa=0.45)
        with pytest.raises(NoConvergenceError) as err:
            shoot(LoadPoint(5.0, 1.0), setup, 40.0, -35.0, grid=bgrid, max_iter=4)
        assert err.value.last_iterate is not None


def _linear_imperfect_response(p, setup, grid):
    """Tip deflection of the linearized imperfect rod by shooting superposition.

    Linear system: y'' = (m + alpha1/rho0 - kappa l1 y) / (1 - kappa l2),
    v' = -l1 y, m' = -v - l2 y', with y(0) = y'(0) = 0, v(1) = alpha2, m(1) = 0.
    """
    kappa, l1, l2 = setup.kappa, p.lambda1, p.lambda2
    denom = 1.0 - kappa * l2

    def rhs(t, state, alpha1):
        y, yd, v, m = state
        curv = alpha1 * float(setup.rho0(t)) if alpha1 else 0.0
        ydd = (m + curv - kappa * l1 * y) / denom
        return np.array([yd, ydd, -l1 * y, -v - l2 * yd])

    def run(v0, m0, alpha1):
        n = 2000
        h = 1.0 / n
        s = np.array([0.0, 0.0, v0, m0])
        t = 0.0
        for _ in range(n):
            k1 = rhs(t, s, alpha1)
            k2 = rhs(t + h / 2, s + h / 2 * k1, alpha1)
            k3 = rhs(t + h / 2, s + h / 2 * k2, alpha1)
            k4 = rhs(t + h, s + h * k3, alpha1)
            s = s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        return s

    base = run(0.0, 0.0, setup.alpha1)
    e1 = run(1.0, 0.0, 0.0)
    e2 = run(0.0, 1.0, 0.0)
    rhs_vec = np.array([setup.alpha2 - base[2], -base[3]])
    mat = np.array([[e1[2], e2[2]], [e1[3], e2[3]]])
    v0, m0 = np.linalg.solve(mat, rhs_vec)
    final = run(v0, m0, setup.alpha1)
    return float(final[0])


class TestPostbuckling:
    def test_fig6_style_point(self, bgrid):
        p0 = critical_point(0.05, 0.25, near=1.52248)
        sol = solve_postbuckling(p0, 0.25, 0.5, grid=bgrid)
        y = sol.trajectory.y
        assert node_count(sol) == 0
        assert abs(y[-1]) == max(abs(y.min()), abs(y.max()))
        assert sol.m2_residual < 1e-4

    def test_morphology_transition_across_branch_minimum(self, bgrid):
        below = critical_point(5.0, 0.45, near=1.05447)
        above = critical_point(7.5, 0.45, near=1.05978)
        sol_below = solve_postbuckling(below, 0.45, 0.02, "along-lambda2", grid=bgrid)
        sol_above = solve_postbuckling(above, 0.45, 0.02, "along-lambda2", grid=bgrid)
        assert node_count(sol_below) == 0
        assert node_count(sol_above) == 1

    def test_mirror_pair(self, bgrid):
        p0 = critical_point(10.0, 0.25, near=0.682732)
        plus = solve_postbuckling(p0, 0.25, 0.3, sign=1, grid=bgrid)
        minus = solve_postbuckling(p0, 0.25, 0.3, sign=-1, grid=bgrid)
        assert np.max(np.abs(plus.trajectory.y + minus.trajectory.y)) < 1e-8
        assert np.max(np.abs(plus.trajectory.m + minus.trajectory.m)) < 1e-8

    def test_supercritical_amplitude_scaling(self, bgrid):
        p0 = critical_point(10.0, 0.25, near=0.682732)
        ratios = []
        for dl1 in (0.1, 0.2, 0.3, 0.4, 0.5):
            sol = solve_postbuckling(p0, 0.25, dl1, grid=bgrid)
            ratios.append(abs(tip_deflection(sol)) / math.sqrt(dl1))
        assert max(ratios) / min(ratios) < 1.15

    def test_residual_sensitivity_to_perturbation(self, bgrid):
        p0 = critical_point(10.0, 0.25, near=0.682732)
        sol = solve_postbuckling(p0, 0.25, 0.3, grid=bgrid)
        base = residual_M2(sol, grid=bgrid)
        perturbed = sol.trajectory.y + 1e-3 * np.sin(np.pi * bgrid.t)
        sol.trajectory.y = perturbed
        bumped = residual_M2(sol, grid=bgrid)
        assert base < 1e-4
        assert bumped > base + 1e-4


class TestResidualM2:
    def test_trivial_solution_zero(self, bgrid):
        setup = RodSetup(kappa=0.25)
        sol = shoot(LoadPoint(5.0, 0.3), setup, 0.0, 0.0, grid=bgrid)
        assert residual_M2(sol, grid=bgrid) < 1e-10


class TestLinearShootingDeterminant:
    def test_brackets_known_root(self):
        lo = linear_shooting_determinant(LoadPoint(10.0, 0.66), 0.25)
        hi = linear_shooting_determinant(LoadPoint(10.0, 0.70), 0.25)
        assert lo * hi < 0.0

    def test_euler_limit(self):
        from scipy.optimize import brentq
        det = lambda x: linear_shooting_determinant(LoadPoint(1e-8, x), 0.0)
        root = brentq(det, 2.0, 3.0, xtol=1e-12)
        assert root == pytest.approx(math.pi**2 / 4.0, abs=1e-3)

    def test_nonzero_off_curve(self):
        val = linear_shooting_determinant(LoadPoint(7.3, 0.41), 0.25)
        assert abs(val) > 1e-12

    def test_agrees_with_char_residual_roots(self):
        from scipy.optimize import brentq
        rng = np.random.default_rng(42)
        for _ in range(10):
            kappa = rng.uniform(0.0, 0.35)
            l1 = rng.uniform(0.5, 12.0)
            r_char = solve_lambda2(l1, kappa)
            det = lambda x: linear_shooting_determinant(LoadPoint(l1, x), kappa)
            r_det = brentq(det, r_char - 0.05, r_char + 0.05, xtol=1e-13)
            assert abs(r_char - r_det) < 1e-6


class TestMorphologyMetrics:
    def test_trivial_metrics(self, bgrid):
        setup = RodSetup(kappa=0.25)
        sol = shoot(LoadPoint(5.0, 0.3), setup, 0.0, 0.0, grid=bgrid)
        assert tip_deflection(sol) == 0.0
        assert node_count(sol) == 0
