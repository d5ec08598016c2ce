"""Interaction-curve equation: evaluation, roots, branches, folds, kappa_cr.

The critical load pairs (lambda1, lambda2) of the linearized rod are the
zeros of a transcendental determinant

    f = sqrt(lambda1 / (1 - kappa lambda2)) * F(lambda1, lambda2)

with the bracketed factor

    F = 2 l1 + kappa l1 (kappa l1 - l2)
        + (2 l1 + l2^2 - kappa l1 l2) cos(r1) cosh(r2)
        - sqrt(l1 / (1 - kappa l2)) (l2 - kappa (l1 - kappa l1 l2 + l2^2))
          sin(r1) sinh(r2)

where r1, r2 are the wavenumbers of the linearized fourth-order operator.
All root finding works on the de-singularized factor F: its zeros for
lambda1 > 0 coincide with the zeros of f, but F has no spurious root at
lambda1 = 0 and no square-root branch sensitivity.

Conventions adopted here:
  * a fold (branching point) solves F = 0 and dF/dlambda2 = 0;
  * a branch minimum solves F = 0 and dF/dlambda1 = 0;
  * kappa_cr, the non-locality at which the first-mode curve stops reaching
    the lambda2 = 0 axis, solves F(l1, 0; kappa) = 0 and
    dF/dlambda1(l1, 0; kappa) = 0 in (kappa, l1): the two axis crossings
    merge into a double root in lambda1 there.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegeneratePointError,
    DomainError,
    InvalidInputError,
    NoFoldError,
    RootNotFoundError,
    SingularDenominatorError,
)
from .model import LoadPoint

SCAN_PANELS = 2000
ADMISSIBLE_MARGIN = 1e-9
DEFAULT_L2_CAP = 40.0  # scan ceiling for kappa = 0, where 1/kappa is no bound
_TOUCH_REL = 1e-5      # |F| at a tangency, relative to the scan scale


@dataclass(frozen=True)
class Wavenumbers:
    r1: float
    r2: float


def lambda2_max(kappa: float) -> float:
    """Upper end of the admissible lambda2 range (constitutive singularity)."""
    if kappa <= 0.0:
        return DEFAULT_L2_CAP
    return (1.0 - ADMISSIBLE_MARGIN) / kappa


def _check_admissible(lambda1: float, lambda2: float, kappa: float) -> float:
    denom = 1.0 - kappa * lambda2
    if denom <= 0.0:
        raise SingularDenominatorError(
            f"1 - kappa*lambda2 = {denom:.3e} <= 0 at lambda2 = {lambda2}"
        )
    if lambda1 < 0.0:
        raise DomainError(f"lambda1 = {lambda1} < 0")
    return denom


def wavenumbers(p: LoadPoint, kappa: float) -> Wavenumbers:
    """Wavenumbers r1 (oscillatory) and r2 (hyperbolic) at a load point."""
    l1, l2 = p.lambda1, p.lambda2
    denom = _check_admissible(l1, l2, kappa)
    half = 0.5 * (kappa * l1 + l2) / denom
    s = math.sqrt(l1 / denom + half * half)
    return Wavenumbers(r1=math.sqrt(s + half), r2=math.sqrt(max(s - half, 0.0)))


def char_residual(p: LoadPoint, kappa: float) -> float:
    """De-singularized interaction-curve residual (bracketed factor F)."""
    return _residual(p.lambda1, p.lambda2, kappa)


def char_f(p: LoadPoint, kappa: float) -> float:
    """Full determinant f, including the sqrt(lambda1/(1-kappa*lambda2)) prefactor."""
    l1, l2 = p.lambda1, p.lambda2
    denom = _check_admissible(l1, l2, kappa)
    return math.sqrt(l1 / denom) * _residual(l1, l2, kappa)


def _residual(l1: float, l2: float, kappa: float) -> float:
    denom = _check_admissible(l1, l2, kappa)
    w = wavenumbers(LoadPoint(l1, l2), kappa)
    pref = math.sqrt(l1 / denom)
    return (
        2.0 * l1
        + kappa * l1 * (kappa * l1 - l2)
        + (2.0 * l1 + l2 * l2 - kappa * l1 * l2) * math.cos(w.r1) * math.cosh(w.r2)
        - pref
        * (l2 - kappa * (l1 - kappa * l1 * l2 + l2 * l2))
        * math.sin(w.r1)
        * math.sinh(w.r2)
    )


def char_partials(p: LoadPoint, kappa: float, h: Optional[float] = None) -> tuple[float, float]:
    """Central finite differences (dF/dlambda1, dF/dlambda2) of the residual."""
    l1, l2 = p.lambda1, p.lambda2
    h1 = h if h is not None else 1e-6 * max(1.0, abs(l1))
    h2 = h if h is not None else 1e-6 * max(1.0, abs(l2))
    if l1 - h1 < 0.0 or 1.0 - kappa * (l2 + h2) <= 0.0:
        raise DomainError("finite-difference stencil leaves the admissible region")
    df1 = (_residual(l1 + h1, l2, kappa) - _residual(l1 - h1, l2, kappa)) / (2.0 * h1)
    df2 = (_residual(l1, l2 + h2, kappa) - _residual(l1, l2 - h2, kappa)) / (2.0 * h2)
    return df1, df2


def _kappa_partial(l1: float, l2: float, kappa: float, h: float = 1e-7) -> float:
    lo = max(kappa - h, 0.0)
    return (_residual(l1, l2, kappa + h) - _residual(l1, l2, lo)) / (kappa + h - lo)


def eta_prime(p0: LoadPoint, kappa: float) -> float:
    """Implicit slope d(lambda2)/d(lambda1) of the interaction curve at p0."""
    df1, df2 = char_partials(p0, kappa)
    if abs(df2) < 1e-8 * max(1.0, abs(df1)):
        raise DegeneratePointError(
            f"dF/dlambda2 = {df2:.3e} at ({p0.lambda1}, {p0.lambda2}); fold point"
        )
    return -df1 / df2


def _scan_roots(fun, lo, hi, panels=SCAN_PANELS, allow_touch=True, touch_gate=None):
    """All roots of fun on [lo, hi]: sign-change roots plus tangency (double) roots.

    A tangency is accepted when a local minimum of |fun| on the scan refines,
    via Newton on fun', to a stationary point where |fun| is negligible:
    either against the scan scale, or against the caller-supplied gate
    ``touch_gate(x)`` (used to admit residuals explained by the finite
    printing precision of the transverse load parameter).
    """
    xs = np.linspace(lo, hi, panels + 1)
    vals = np.array([fun(x) for x in xs])
    scale = float(np.max(np.abs(vals)))
    roots = []
    for i in range(panels):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append((a, False))
        elif fa * fb < 0.0:
            roots.append((brentq(fun, a, b, xtol=1e-14, rtol=8.9e-16), False))
    if vals[-1] == 0.0:
        roots.append((hi, False))
    if allow_touch and scale > 0.0:
        roots.extend(_touch_roots(fun, xs, vals, scale, [r for r, _ in roots], touch_gate))
    roots.sort(key=lambda rt: rt[0])
    return roots, scale


def _touch_roots(fun, xs, vals, scale, known, touch_gate=None):
    """Local |fun| minima that are numerically double roots."""
    touches = []
    absv = np.abs(vals)
    step = xs[1] - xs[0]
    for i in range(1, len(xs) - 1):
        if not (absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1]):
            continue
        if absv[i] > 1e-3 * scale:
            continue
        if vals[i - 1] * vals[i] < 0.0 or vals[i] * vals[i + 1] < 0.0:
            continue  # a genuine sign change, already refined
        x = _refine_stationary(fun, xs[i], step)
        if x is None or not (xs[0] <= x <= xs[-1]):
            continue
        gate = _TOUCH_REL * scale
        if touch_gate is not None:
            gate = max(gate, touch_gate(x))
        if abs(fun(x)) > gate:
            continue
        if any(abs(x - r) < 10.0 * step for r in known + [t for t in touches]):
            continue
        touches.append(x)
    return [(x, True) for x in touches]


def _refine_stationary(fun, x0, step, iters=60):
    """Newton on fun' = 0 with central differences, starting from x0."""
    x = x0
    h = max(1e-7, 1e-7 * abs(x0))
    for _ in range(iters):
        d1 = (fun(x + h) - fun(x - h)) / (2.0 * h)
        d2 = (fun(x + h) - 2.0 * fun(x) + fun(x - h)) / (h * h)
        if d2 == 0.0:
            return None
        dx = -d1 / d2
        if abs(dx) > 5.0 * step:
            dx = math.copysign(5.0 * step, dx)
        x += dx
        if abs(dx) < 1e-13 * max(1.0, abs(x)):
            return x
    return None


def solve_lambda2(
    lambda1: float,
    kappa: float,
    bracket: Optional[tuple[float, float]] = None,
    which: int = 1,
) -> float:
    """The which-th root in lambda2 of the residual at fixed lambda1."""
    lo, hi = bracket if bracket is not None else (1e-9, lambda2_max(kappa))
    if kappa > 0.0 and hi * kappa >= 1.0:
        raise DomainError(f"bracket touches the singularity lambda2 = 1/kappa = {1.0 / kappa}")

    def gate(x):
        # residual explainable by lambda1 and kappa known to ~6 significant digits
        try:
            d1, _ = char_partials(LoadPoint(lambda1, x), kappa)
            dk = _kappa_partial(lambda1, x, kappa)
        except (DomainError, SingularDenominatorError, InvalidInputError):
            return 0.0
        return 1e-5 * (abs(d1) * max(1.0, abs(lambda1)) + abs(dk) * max(1.0, kappa))

    roots, _ = _scan_roots(lambda x: _residual(lambda1, x, kappa), lo, hi, touch_gate=gate)
    if len(roots) < which:
        raise RootNotFoundError(
            f"only {len(roots)} lambda2 root(s) on [{lo}, {hi}] at lambda1 = {lambda1}, "
            f"requested #{which}"
        )
    return roots[which - 1][0]


def solve_lambda1(
    lambda2: float,
    kappa: float,
    bracket: Optional[tuple[float, float]] = None,
    which: int = 1,
) -> float:
    """The which-th root in lambda1 of the residual at fixed lambda2."""
    lo, hi = bracket if bracket is not None else (1e-6, 60.0)
    _check_admissible(lo, lambda2, kappa)

    def gate(x):
        # residual explainable by lambda2 and kappa known to ~6 significant digits
        try:
            _, d2 = char_partials(LoadPoint(x, lambda2), kappa)
            dk = _kappa_partial(x, lambda2, kappa)
        except (DomainError, SingularDenominatorError, InvalidInputError):
            return 0.0
        return 1e-5 * (abs(d2) * max(1.0, abs(lambda2)) + abs(dk) * max(1.0, kappa))

    roots, _ = _scan_roots(lambda x: _residual(x, lambda2, kappa), lo, hi, touch_gate=gate)
    if len(roots) < which:
        raise RootNotFoundError(
            f"only {len(roots)} lambda1 root(s) on [{lo}, {hi}] at lambda2 = {lambda2}, "
            f"requested #{which}"
        )
    return roots[which - 1][0]


def _damped_newton2(fun, x0, max_iter=50, tol=1e-10, fd_step=1e-6):
    """Damped Newton for a 2-vector system with finite-difference Jacobian."""
    x = np.array(x0, dtype=float)
    r = np.array(fun(x), dtype=float)
    for _ in range(max_iter):
        if np.max(np.abs(r)) < tol:
            return x
        jac = np.zeros((2, 2))
        for j in range(2):
            xp = x.copy()
            hp = fd_step * max(1.0, abs(x[j]))
            xp[j] += hp
            try:
                jac[:, j] = (np.array(fun(xp)) - r) / hp
            except (SingularDenominatorError, DomainError, InvalidInputError) as exc:
                raise NoFoldError(f"Jacobian probe left the admissible region at {x}") from exc
        try:
            dx = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise NoFoldError(f"singular Jacobian at {x}") from exc
        lam = 1.0
        base = np.max(np.abs(r))
        for _ in range(12):
            try:
                r_new = np.array(fun(x + lam * dx), dtype=float)
            except (SingularDenominatorError, DomainError, InvalidInputError):
                lam *= 0.5
                continue
            if np.max(np.abs(r_new)) < base or lam < 1e-3:
                break
            lam *= 0.5
        else:
            raise NoFoldError(f"line search stalled at {x}")
        x = x + lam * dx
        r = r_new
    if np.max(np.abs(r)) < tol:
        return x
    raise NoFoldError(f"Newton did not converge: residual {np.max(np.abs(r)):.3e} at {x}")


def _local_scale(l1, l2, kappa, dl=0.05):
    probes = []
    for d1, d2 in ((dl, 0.0), (-dl, 0.0), (0.0, dl), (0.0, -dl)):
        try:
            probes.append(abs(_residual(max(l1 + d1, 1e-9), l2 + d2, kappa)))
        except (SingularDenominatorError, DomainError):
            pass
    return max(probes) if probes else 1.0


def find_fold(kappa: float, guess: LoadPoint) -> LoadPoint:
    """Fold of the interaction curve: F = 0 and dF/dlambda2 = 0 near the guess."""
    scale = _local_scale(guess.lambda1, guess.lambda2, kappa)

    def system(x):
        l1, l2 = x
        df1, df2 = char_partials(LoadPoint(l1, l2), kappa)
        return (_residual(l1, l2, kappa) / scale, df2 / scale)

    sol = _damped_newton2(system, (guess.lambda1, guess.lambda2), tol=1e-8 / max(scale, 1.0))
    l1, l2 = float(sol[0]), float(sol[1])
    if l1 <= 0.0 or l2 < -1e-9:
        raise NoFoldError(f"fold Newton left the first-mode quadrant: ({l1}, {l2})")
    return LoadPoint(l1, max(l2, 0.0))


def find_branch_minimum(kappa: float, guess: LoadPoint) -> LoadPoint:
    """Stationary lambda2 along the curve: F = 0 and dF/dlambda1 = 0."""
    scale = _local_scale(guess.lambda1, guess.lambda2, kappa)

    def system(x):
        l1, l2 = x
        df1, df2 = char_partials(LoadPoint(l1, l2), kappa)
        return (_residual(l1, l2, kappa) / scale, df1 / scale)

    sol = _damped_newton2(system, (guess.lambda1, guess.lambda2), tol=1e-8 / max(scale, 1.0))
    l1, l2 = float(sol[0]), float(sol[1])
    if l1 <= 0.0 or l2 < -1e-9:
        raise NoFoldError(f"branch-minimum Newton left the admissible quadrant: ({l1}, {l2})")
    return LoadPoint(l1, l2)


def find_kappa_cr(guess_kappa: float = 0.37, guess_lambda1: float = 29.0) -> tuple[float, float]:
    """Critical non-locality: the axis crossings merge into a double lambda1 root.

    Solves F(l1, 0; kappa) = 0 and dF/dlambda1(l1, 0; kappa) = 0 in
    (kappa, l1).  Equivalently, the branch minimum of the folded first-mode
    curve touches the lambda2 = 0 axis.
    """
    scale = _local_scale(guess_lambda1, 0.0, guess_kappa)

    def system(x):
        kap, l1 = x
        if kap <= 0.0 or l1 <= 0.0:
            raise DomainError("left the admissible (kappa, lambda1) quadrant")
        df1, _ = char_partials(LoadPoint(l1, 0.0), kap)
        return (_residual(l1, 0.0, kap) / scale, df1 / scale)

    sol = _damped_newton2(system, (guess_kappa, guess_lambda1), max_iter=80,
                          tol=1e-8 / max(scale, 1.0))
    return float(sol[0]), float(sol[1])


@dataclass
class BranchCurve:
    """One traced branch of an interaction-curve family."""

    kappa: float
    mode_index: int
    branch_tag: str  # "single" | "lower" | "upper"
    points: list = field(default_factory=list)  # [(LoadPoint, eta_prime)]
    fold: Optional[LoadPoint] = None


def _eta_prime_or_nan(p: LoadPoint, kappa: float) -> float:
    try:
        return eta_prime(p, kappa)
    except DegeneratePointError:
        return float("nan")


def trace_curve(kappa, lambda1_grid, mode_index: int = 1, l2_cap: Optional[float] = None):
    """Trace the mode_index-th interaction-curve family over a lambda1 grid.

    All residual roots in lambda2 are found per grid column, chained into
    continuous branches, and grouped into families: two branches that
    terminate together at a fold form one family (tags lower/upper), a
    branch that exits alone stays single.  Families are numbered by the
    lambda2-order of their lowest branch at its first column.
    """
    grid = [float(l1) for l1 in lambda1_grid]
    hi = l2_cap if l2_cap is not None else lambda2_max(kappa)
    columns = []
    for l1 in grid:
        roots, _ = _scan_roots(lambda x: _residual(l1, x, kappa), 1e-9, hi, allow_touch=False)
        columns.append([r for r, _ in roots])

    chains = _chain_columns(grid, columns)
    families = _group_families(chains, kappa)
    result = []
    for fam_index, fam in enumerate(families, start=1):
        if fam_index != mode_index:
            continue
        for tag, chain in fam["branches"]:
            pts = [(LoadPoint(l1, l2), _eta_prime_or_nan(LoadPoint(l1, l2), kappa))
                   for l1, l2 in chain]
            result.append(BranchCurve(kappa=kappa, mode_index=fam_index, branch_tag=tag,
                                      points=pts, fold=fam["fold"]))
    return result


def _chain_columns(grid, columns):
    """Chain per-column roots into continuous curves.

    Each open chain predicts its next lambda2 by linear extrapolation; chains
    and roots are matched globally, nearest prediction first, inside a window
    that scales with the predicted step.  Unmatched chains close, unmatched
    roots start new chains.
    """
    chains = []
    active = []
    for ci, (l1, roots) in enumerate(zip(grid, columns)):
        candidates = []
        for chain in active:
            pts = chain["pts"]
            gap = l1 - pts[-1][0]
            if len(pts) >= 2:
                slope = (pts[-1][1] - pts[-2][1]) / (pts[-1][0] - pts[-2][0])
                pred = pts[-1][1] + slope * gap
                window = max(0.05, 4.0 * abs(pred - pts[-1][1]))
            else:
                pred = pts[-1][1]
                window = max(0.05, 0.12 * abs(gap))
            for ri, r in enumerate(roots):
                dist = abs(r - pred)
                if dist < window:
                    candidates.append((dist, id(chain), chain, ri))
        candidates.sort(key=lambda c: (c[0], c[1]))
        used_roots = set()
        matched = set()
        for dist, key, chain, ri in candidates:
            if key in matched or ri in used_roots:
                continue
            matched.add(key)
            used_roots.add(ri)
            chain["pts"].append((l1, roots[ri]))
        next_active = []
        for chain in active:
            if id(chain) in matched:
                next_active.append(chain)
            else:
                chain["closed_at"] = ci
        for ri, r in enumerate(roots):
            if ri not in used_roots:
                chain = {"pts": [(l1, r)], "start_col": ci, "start_rank": ri,
                         "closed_at": None}
                chains.append(chain)
                next_active.append(chain)
        active = next_active
    for chain in active:
        chain["closed_at"] = len(grid)
    return chains


def _group_families(chains, kappa):
    """Pair branches that die at the same column with nearby endpoints (folds)."""
    chains = sorted(chains, key=lambda c: (c["start_col"], c["pts"][0][1]))
    families = []
    paired = set()
    for i, ca in enumerate(chains):
        if i in paired:
            continue
        partner = None
        for j in range(i + 1, len(chains)):
            if j in paired:
                continue
            cb = chains[j]
            if ca["closed_at"] != cb["closed_at"] or ca["closed_at"] is None:
                continue
            gap = abs(ca["pts"][-1][1] - cb["pts"][-1][1])
            span = abs(ca["pts"][-1][1] - ca["pts"][0][1]) + abs(cb["pts"][-1][1] - cb["pts"][0][1])
            if gap < max(0.6, 0.5 * span):
                partner = j
                break
        if partner is None:
            families.append({"branches": [("single", ca["pts"])], "fold": None,
                             "l2_first": ca["pts"][0][1]})
            continue
        cb = chains[partner]
        paired.add(partner)
        lower, upper = (ca, cb) if ca["pts"][-1][1] <= cb["pts"][-1][1] else (cb, ca)
        fold = None
        seed_l1 = 0.5 * (lower["pts"][-1][0] + upper["pts"][-1][0])
        seed_l2 = 0.5 * (lower["pts"][-1][1] + upper["pts"][-1][1])
        try:
            fold = find_fold(kappa, LoadPoint(seed_l1, seed_l2))
        except (NoFoldError, DomainError, SingularDenominatorError, InvalidInputError):
            pass
        families.append({"branches": [("lower", lower["pts"]), ("upper", upper["pts"])],
                         "fold": fold, "l2_first": min(ca["pts"][0][1], cb["pts"][0][1])})
    families.sort(key=lambda f: f["l2_first"])
    return families
