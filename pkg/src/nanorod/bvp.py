"""Nonlinear equilibrium of the rod by shooting, and the linear shooting oracle.

State vector (x, y, theta, v, m): coordinates, tangent angle, shear resultant,
bending moment, all dimensionless on t in [0, 1].  The second-order
moment-curvature law is closed to first order by eliminating the moment's
second derivative, leaving

    theta' = (m - kappa l1 y cos(theta) + alpha1 / rho0)
             / (1 + kappa (v sin(theta) - l2 cos(theta)))

alongside v' = -l1 y, m' = -v cos(theta) - l2 sin(theta), x' = cos(theta),
y' = sin(theta).  Boundary conditions: x = y = theta = 0 at the clamp,
v(1) = alpha2 and m(1) = 0 at the tip; (v(0), m(0)) are the shooting
unknowns.  Integration is classical fixed-step 4th order with one step per
grid interval, so trajectories land exactly on the shared quadrature grid.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    AmplitudeSeedError,
    ConstitutiveSingularityError,
    InadmissibleSlopeError,
    NoConvergenceError,
    RegimeError,
)
from .model import LoadPoint, RodSetup
from .modes import adjoint_kernel, mode_shape
from .quadrature import Grid
from .reduction import (
    Verdict,
    amplitude_for_offsets,
    crossing_offsets,
    reduction_coefficients,
)

SING_TOL = 1e-8
THETA_LIMIT = 0.5 * math.pi


def reduce_rhs(state, p: LoadPoint, setup: RodSetup, t: float):
    """Time derivative (x', y', theta', v', m') of the closed first-order system."""
    x, y, theta, v, m = state
    if abs(theta) >= THETA_LIMIT:
        raise RegimeError(f"|theta| = {abs(theta):.4f} >= pi/2 at t = {t:.4f}")
    c = math.cos(theta)
    s = math.sin(theta)
    den = 1.0 + setup.kappa * (v * s - p.lambda2 * c)
    if abs(den) < SING_TOL:
        raise ConstitutiveSingularityError(t)
    curv = setup.alpha1 * float(setup.rho0(t)) if setup.alpha1 != 0.0 else 0.0
    theta_dot = (m - setup.kappa * p.lambda1 * y * c + curv) / den
    return (c, s, theta_dot, -p.lambda1 * y, -v * c - p.lambda2 * s)


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    m: np.ndarray

    def terminal(self):
        return self.v[-1], self.m[-1]


def integrate(p: LoadPoint, setup: RodSetup, v0: float, m0: float,
              n_steps: Optional[int] = None, grid: Optional[Grid] = None) -> Trajectory:
    """Fixed-step RK4 integration from the clamp, one step per grid interval."""
    if grid is None:
        grid = Grid()
    n = n_steps if n_steps is not None else grid.n
    h = 1.0 / n
    l1, l2, kappa = p.lambda1, p.lambda2, setup.kappa
    alpha1 = setup.alpha1
    rho0 = setup.rho0
    cos, sin = math.cos, math.sin

    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    ths = np.empty(n + 1)
    vs = np.empty(n + 1)
    ms = np.empty(n + 1)
    x = y = th = 0.0
    v, m = v0, m0
    xs[0] = ys[0] = ths[0] = 0.0
    vs[0], ms[0] = v, m
    t = 0.0

    def rhs(tt, xx, yy, thth, vv, mm):
        if abs(thth) >= THETA_LIMIT:
            raise RegimeError(f"|theta| reached pi/2 at t = {tt:.4f}")
        c = cos(thth)
        s = sin(thth)
        den = 1.0 + kappa * (vv * s - l2 * c)
        if abs(den) < SING_TOL:
            raise ConstitutiveSingularityError(tt)
        curv = alpha1 * float(rho0(tt)) if alpha1 != 0.0 else 0.0
        return c, s, (mm - kappa * l1 * yy * c + curv) / den, -l1 * yy, -vv * c - l2 * s

    h2 = 0.5 * h
    h6 = h / 6.0
    for i in range(1, n + 1):
        a1 = rhs(t, x, y, th, v, m)
        a2 = rhs(t + h2, x + h2 * a1[0], y + h2 * a1[1], th + h2 * a1[2],
                 v + h2 * a1[3], m + h2 * a1[4])
        a3 = rhs(t + h2, x + h2 * a2[0], y + h2 * a2[1], th + h2 * a2[2],
                 v + h2 * a2[3], m + h2 * a2[4])
        a4 = rhs(t + h, x + h * a3[0], y + h * a3[1], th + h * a3[2],
                 v + h * a3[3], m + h * a3[4])
        x += h6 * (a1[0] + 2.0 * (a2[0] + a3[0]) + a4[0])
        y += h6 * (a1[1] + 2.0 * (a2[1] + a3[1]) + a4[1])
        th += h6 * (a1[2] + 2.0 * (a2[2] + a3[2]) + a4[2])
        v += h6 * (a1[3] + 2.0 * (a2[3] + a3[3]) + a4[3])
        m += h6 * (a1[4] + 2.0 * (a2[4] + a3[4]) + a4[4])
        t += h
        xs[i], ys[i], ths[i], vs[i], ms[i] = x, y, th, v, m

    return Trajectory(t=np.linspace(0.0, 1.0, n + 1), x=xs, y=ys, theta=ths, v=vs, m=ms)


@dataclass
class BvpSolution:
    trajectory: Trajectory
    load: LoadPoint
    setup: RodSetup
    v0: float
    m0: float
    terminal_residuals: tuple
    m2_residual: Optional[float] = field(default=None)

    @property
    def grid_t(self):
        return self.trajectory.t


def shoot(p: LoadPoint, setup: RodSetup, guess_v0: float, guess_m0: float,
          grid: Optional[Grid] = None, tol: float = 1e-9, max_iter: int = 50) -> BvpSolution:
    """Newton on (v(1) - alpha2, m(1)) over the initial values (v(0), m(0))."""
    if grid is None:
        grid = Grid()
    u = np.array([guess_v0, guess_m0], dtype=float)

    def residual(uu):
        traj = integrate(p, setup, uu[0], uu[1], grid=grid)
        v1, m1 = traj.terminal()
        return np.array([v1 - setup.alpha2, m1]), traj

    try:
        r, traj = residual(u)
    except (ConstitutiveSingularityError, RegimeError) as exc:
        raise NoConvergenceError(f"initial guess not integrable: {exc}",
                                 last_iterate=tuple(u)) from exc
    for _ in range(max_iter):
        if np.max(np.abs(r)) < tol:
            sol = BvpSolution(trajectory=traj, load=p, setup=setup, v0=float(u[0]),
                              m0=float(u[1]), terminal_residuals=(float(r[0]), float(r[1])))
            sol.m2_residual = residual_M2(sol, grid=grid)
            return sol
        jac = np.zeros((2, 2))
        for j in range(2):
            up = u.copy()
            hp = 1e-7 * max(1.0, abs(u[j]))
            up[j] += hp
            try:
                rp, _ = residual(up)
            except (ConstitutiveSingularityError, RegimeError) as exc:
                raise NoConvergenceError(f"Jacobian probe failed: {exc}",
                                         last_iterate=tuple(u)) from exc
            jac[:, j] = (rp - r) / hp
        try:
            du = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError("singular shooting Jacobian", last_iterate=tuple(u)) from exc
        base = np.max(np.abs(r))
        lam = 1.0
        while lam > 1e-3:
            try:
                r_new, traj_new = residual(u + lam * du)
            except (ConstitutiveSingularityError, RegimeError):
                lam *= 0.5
                continue
            if np.max(np.abs(r_new)) < base or lam <= 0.125:
                break
            lam *= 0.5
        else:
            raise NoConvergenceError("shooting line search stalled",
                                     last_iterate=tuple(u), residual=float(base))
        u = u + lam * du
        r, traj = r_new, traj_new
    raise NoConvergenceError(
        f"shooting Newton did not converge in {max_iter} iterations",
        last_iterate=tuple(u), residual=float(np.max(np.abs(r))),
    )


def _mode_seed(p0: LoadPoint, kappa: float, amplitude: float, grid: Grid):
    """Initial (v0, m0) predicted from the linear mode at amplitude a."""
    yL = mode_shape(p0, kappa, grid)
    v0 = amplitude * p0.lambda1 * grid.inner(np.ones_like(grid.t), yL.y(grid.t))
    m0 = amplitude * (1.0 - kappa * p0.lambda2) * float(yL.d2y(0.0))
    return v0, m0


def solve_postbuckling(p0: LoadPoint, kappa: float, delta: float,
                       direction: str = "along-lambda1", sign: int = 1,
                       grid: Optional[Grid] = None) -> BvpSolution:
    """Nontrivial equilibrium near a critical point, loads offset across the curve.

    The offset follows the crossing path of the reduction module
    ((delta, -eta' delta) for along-lambda1, (-eta' delta, delta) for
    along-lambda2); the shooting seed comes from the bifurcation amplitude of
    the linear mode, with the requested branch sign.  If the direct solve
    fails or collapses to the trivial state, the offset is walked up
    geometrically in five continuation steps.
    """
    if grid is None:
        grid = Grid()
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    yL = mode_shape(p0, kappa, grid)
    q2 = adjoint_kernel(2, p0, kappa, grid)
    rc = reduction_coefficients(p0, kappa, yL, q2, grid)
    if rc.verdict is Verdict.DEGENERATE:
        raise AmplitudeSeedError("degenerate critical point; no seeding amplitude")

    setup = RodSetup(kappa=kappa)

    def attempt(d, guess=None):
        dl1, dl2 = crossing_offsets(rc, d, direction)
        amp = amplitude_for_offsets(rc, dl1, dl2)
        if amp is None:
            raise AmplitudeSeedError(
                f"offset {d} lies on the trivial side; no nontrivial branch to seed")
        p = p0.offset(dl1, dl2)
        v0, m0 = guess if guess is not None else _mode_seed(p0, kappa, sign * amp, grid)
        sol = shoot(p, setup, v0, m0, grid=grid)
        if abs(tip_deflection(sol)) < 0.2 * amp * abs(float(yL.y(1.0))):
            raise NoConvergenceError("converged to the trivial branch",
                                     last_iterate=(sol.v0, sol.m0))
        return sol

    try:
        return attempt(delta)
    except (NoConvergenceError, ConstitutiveSingularityError, RegimeError):
        pass
    sol = None
    guess = None
    for k in range(1, 6):
        sol = attempt(delta * (k / 5.0) ** 2, guess=guess)
        guess = (sol.v0, sol.m0)
    return sol


def residual_M2(sol: BvpSolution, grid: Optional[Grid] = None) -> float:
    """Sup-norm of the single-equation operator residual on the sampled deflection.

    The deflection's second derivative is taken by central differences; the
    integral kernels by the shared quadrature.  The first and last grid
    points are skipped (one-sided stencils would dominate the residual).
    """
    if grid is None:
        grid = Grid(len(sol.trajectory.t) - 1)
    setup, p = sol.setup, sol.load
    kappa, l1, l2 = setup.kappa, p.lambda1, p.lambda2
    y = sol.trajectory.y
    yd = np.sin(sol.trajectory.theta)
    if np.max(np.abs(yd)) >= 1.0:
        raise InadmissibleSlopeError("|y'| reached 1 on the trajectory")
    h = grid.h
    ydd = np.empty_like(y)
    ydd[1:-1] = (yd[2:] - yd[:-2]) / (2.0 * h)
    ydd[0] = ydd[1]
    ydd[-1] = ydd[-2]

    root = np.sqrt(1.0 - yd**2)
    i1y = grid.i1(y)
    j1 = grid.cumint_right(root)
    j2 = grid.cumint_right(root * i1y)
    i1yd = grid.i1(yd)
    curv = setup.alpha1 * np.asarray(setup.rho0(grid.t), dtype=float) if setup.alpha1 else 0.0
    numer = curv + setup.alpha2 * j1 + l1 * (j2 - kappa * y * root) + l2 * i1yd
    denom = 1.0 + kappa * setup.alpha2 * yd + kappa * l1 * yd * i1y - kappa * l2 * root
    res = ydd - root * numer / denom
    return float(np.max(np.abs(res[1:-1])))


def closed_form_moment(sol: BvpSolution) -> np.ndarray:
    """Bending moment recomputed from the constitutive closure, independently
    of the integrated m: the deflection's second derivative is taken by
    central differences of the sampled slope (endpoints copied inward).
    """
    setup, p = sol.setup, sol.load
    th = sol.trajectory.theta
    c, s = np.cos(th), np.sin(th)
    h = sol.trajectory.t[1] - sol.trajectory.t[0]
    ydd = np.empty_like(s)
    ydd[1:-1] = (s[2:] - s[:-2]) / (2.0 * h)
    ydd[0] = ydd[1]
    ydd[-1] = ydd[-2]
    den = 1.0 + setup.kappa * (sol.trajectory.v * s - p.lambda2 * c)
    curv = (setup.alpha1 * np.asarray(setup.rho0(sol.trajectory.t), dtype=float)
            if setup.alpha1 else np.zeros_like(th))
    return (ydd / c) * den + setup.kappa * p.lambda1 * sol.trajectory.y * c - curv


def tip_deflection(sol: BvpSolution) -> float:
    return float(sol.trajectory.y[-1])


def node_count(sol: BvpSolution, zero_tol: float = 1e-9) -> int:
    """Interior sign changes of y' on (0, 1); 0 is first-mode-like."""
    yd = np.sin(sol.trajectory.theta[1:-1])
    return _sign_changes(yd, zero_tol)


def mode_node_count(yL, grid: Grid, zero_tol: float = 1e-9) -> int:
    """Same morphology metric applied to a closed-form mode shape."""
    return _sign_changes(yL.dy(grid.t)[1:-1], zero_tol)


def _sign_changes(samples: np.ndarray, zero_tol: float) -> int:
    scale = np.max(np.abs(samples))
    if scale == 0.0:
        return 0
    signif = samples[np.abs(samples) > max(zero_tol, 1e-7 * scale)]
    if signif.size < 2:
        return 0
    return int(np.sum(np.sign(signif[:-1]) != np.sign(signif[1:])))


def linear_shooting_determinant(p: LoadPoint, kappa: float, n_steps: int = 512) -> float:
    """Terminal-condition determinant of the linearized fourth-order problem.

    Two unit solutions with (y''(0), y'''(0)) = (1, 0) and (0, 1) are
    integrated; the rows are the two tip conditions of the linearized
    boundary set.  Zeros coincide with the characteristic residual's zeros,
    which makes this the independent root oracle for the curve module.
    """
    denom = 1.0 - kappa * p.lambda2
    if denom <= 0.0:
        return float("nan")
    co2 = (kappa * p.lambda1 + p.lambda2) / denom
    co0 = p.lambda1 / denom
    h = 1.0 / n_steps

    def rhs(state):
        y, d1, d2, d3 = state
        return np.array([d1, d2, d3, -co2 * d2 + co0 * y])

    cols = []
    for ic in ((0.0, 0.0, 1.0, 0.0), (0.0, 0.0, 0.0, 1.0)):
        s = np.array(ic)
        for _ in range(n_steps):
            k1 = rhs(s)
            k2 = rhs(s + 0.5 * h * k1)
            k3 = rhs(s + 0.5 * h * k2)
            k4 = rhs(s + h * k3)
            s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        b1 = s[2] * denom + kappa * p.lambda1 * s[0]
        b2 = s[3] * denom + (kappa * p.lambda1 + p.lambda2) * s[1]
        cols.append((b1, b2))
    return cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]
