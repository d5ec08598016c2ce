"""Imperfection unfolding: the d-constants, determinant, and universality test.

Shape (alpha1) and tip-load (alpha2) imperfections perturb the bifurcation
equation into a two-parameter family

    Psi(a, dl, alpha) = alpha1 d01 + alpha2 d02 + ...            (see psi())

whose universality hinges on det [[d01, d21], [d02, d22]] != 0 together with
the nondegeneracy of the perfect-rod coefficients.  The d-constants are inner
products of curvature/load kernels with the adjoint kernel q; the chain
constants (d13, d14, d25, d26, d39, d310) are exact multiples of d01/d02 and
are computed from them rather than re-integrated.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularCurvatureError
from .model import LoadPoint
from .modes import AdjointKernel, ModeShape
from .quadrature import Grid
from .reduction import DEGENERATE_TOL, ReductionCoefficients, Verdict


@dataclass(frozen=True)
class UnfoldingCoefficients:
    d01: float
    d02: float
    d11: float
    d12: float
    d13: float
    d14: float
    d21: float
    d22: float
    d23: float
    d24: float
    d25: float
    d26: float
    d31: float
    d32: float
    d33: float
    d34: float
    d35: float
    d36: float
    d37: float
    d38: float
    d39: float
    d310: float

    # the (dl2)^3 row appears under two labels in the unfolding polynomial
    @property
    def d51(self) -> float:
        return self.d39

    @property
    def d52(self) -> float:
        return self.d310


def unfolding_coefficients(
    p0: LoadPoint,
    kappa: float,
    yL: ModeShape,
    q: AdjointKernel,
    rho0: Callable,
    grid: Grid,
) -> UnfoldingCoefficients:
    """All d-constants at a verified critical point, by quadrature."""
    l1, l2 = p0.lambda1, p0.lambda2
    x = 1.0 - kappa * l2
    t = grid.t

    try:
        curv = np.asarray(rho0(t), dtype=float)
    except SingularCurvatureError:
        raise
    except Exception as exc:
        raise SingularCurvatureError(f"curvature profile evaluation failed: {exc}") from exc
    if curv.shape != t.shape:
        curv = np.broadcast_to(np.asarray(curv, dtype=float), t.shape).copy()
    if not np.all(np.isfinite(curv)):
        raise SingularCurvatureError("curvature profile is not finite on [0, 1]")

    yv = yL.y(t)
    yd = yL.dy(t)
    qv = q.q(t)
    one_minus_t = 1.0 - t
    i1y = grid.i1(yv)
    i2y = grid.i2(yv)
    i1yd = grid.i1(yd)
    i1yd2 = grid.i1(yd**2)
    a_term = i2y - kappa * yv

    d01 = -grid.inner(curv, qv) / x
    d02 = -grid.inner(one_minus_t, qv) / x
    d11 = kappa / x**2 * grid.inner(curv * yd, qv)
    d12 = kappa / x**2 * grid.inner(one_minus_t * yd, qv)
    d13 = -kappa / x * d01
    d14 = -kappa / x * d02
    d21 = 0.5 / x * grid.inner(
        curv * yd * (yd + kappa / x * (2.0 * l1 * i1y + l2 * yd)), qv)
    d22 = 0.5 / x * grid.inner(
        one_minus_t * yd**2 + i1yd2
        + kappa / x * yd * (2.0 * l1 * (one_minus_t * i1y + a_term)
                            + l2 * (one_minus_t * yd + 2.0 * i1yd)), qv)
    d23 = (1.0 - kappa / x) * d11
    d24 = (1.0 - kappa / x) * d12
    d25 = kappa**2 / x**2 * d01
    d26 = kappa**2 / x**2 * d02
    d31 = 0.5 * kappa / x**2 * grid.inner(curv * yd**3, qv)
    d32 = 0.5 * kappa / x**2 * grid.inner(yd * (one_minus_t * yd**2 - i1yd2), qv)
    d33 = kappa / x**2 * grid.inner(curv * yd * i1y, qv)
    d34 = kappa / x**2 * grid.inner(yd * (one_minus_t * i1y + a_term), qv)
    d35 = -0.5 * kappa**2 / x**3 * grid.inner(curv * yd * (2.0 * l1 * i1y + l2 * yd), qv)
    d36 = 0.5 * kappa / x**2 * grid.inner(
        2.0 * yd * i1yd - i1yd2
        - kappa / x * yd * (2.0 * l1 * (one_minus_t * i1y + a_term)
                            + l2 * (one_minus_t * yd + 2.0 * i1yd)), qv)
    d37 = -(1.0 - 2.0 * kappa / x) * d11
    d38 = -(1.0 - 2.0 * kappa / x) * d12
    d39 = kappa**3 / x**3 * d01
    d310 = kappa**3 / x**3 * d02

    return UnfoldingCoefficients(
        d01=d01, d02=d02, d11=d11, d12=d12, d13=d13, d14=d14,
        d21=d21, d22=d22, d23=d23, d24=d24, d25=d25, d26=d26,
        d31=d31, d32=d32, d33=d33, d34=d34, d35=d35, d36=d36,
        d37=d37, d38=d38, d39=d39, d310=d310,
    )


def unfolding_determinant(uc: UnfoldingCoefficients) -> float:
    """det [[d01, d21], [d02, d22]]."""
    return uc.d01 * uc.d22 - uc.d21 * uc.d02


@dataclass(frozen=True)
class UnfoldingReport:
    universal: bool
    c3: float
    crossing_coefficient: float
    determinant: float
    reasons: tuple


def is_universal_unfolding(
    rc: ReductionCoefficients,
    uc: UnfoldingCoefficients,
    tol: float = DEGENERATE_TOL,
) -> UnfoldingReport:
    """True iff |c3|, the crossing coefficient, and the determinant all clear tol."""
    det = unfolding_determinant(uc)
    reasons = []
    if abs(rc.c3) <= tol or abs(rc.crossing_coefficient) <= tol or rc.verdict is Verdict.DEGENERATE:
        reasons.append("c-condition")
    if abs(det) <= tol:
        reasons.append("determinant")
    return UnfoldingReport(
        universal=not reasons,
        c3=rc.c3,
        crossing_coefficient=rc.crossing_coefficient,
        determinant=det,
        reasons=tuple(reasons),
    )


def psi(uc: UnfoldingCoefficients, rc: ReductionCoefficients):
    """Polynomial evaluator Psi(a, dl1, dl2, alpha1, alpha2) of the truncated
    two-parameter unfolding; the higher-order remainder is dropped.
    """

    def evaluate(a, dl1, dl2, alpha1, alpha2):
        return (
            alpha1 * uc.d01 + alpha2 * uc.d02
            + a * (alpha1 * alpha2 * uc.d11 + alpha2**2 * uc.d12)
            + dl2 * (alpha1 * uc.d13 + alpha2 * uc.d14)
            + a**2 * (alpha1 * uc.d21 + alpha2 * uc.d22)
            + a * dl1 * rc.c11
            + a * dl2 * (rc.c12 + alpha1 * alpha2 * uc.d23 + alpha2**2 * uc.d24)
            + dl2**2 * (alpha1 * uc.d25 + alpha2 * uc.d26)
            + a**3 * (rc.c3 + alpha1 * alpha2 * uc.d31 + alpha2**2 * uc.d32)
            + a**2 * dl1 * (alpha1 * uc.d33 + alpha2 * uc.d34)
            + a**2 * dl2 * (alpha1 * uc.d35 + alpha2 * uc.d36)
            + a * dl2**2 * (rc.c13 + alpha1 * alpha2 * uc.d37 + alpha2**2 * uc.d38)
            + dl2**3 * (alpha1 * uc.d39 + alpha2 * uc.d310)
        )

    return evaluate
