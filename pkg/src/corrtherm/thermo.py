"""Thermomajorization: thermal Lorenz curves, Gibbs-preserving witnesses and
minimal-work search."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import linfeas
from .config import DEFAULT_TOL, DELTA_HI_DEFAULT, Tolerances
from .dist import BipartiteDist, Dist, point_mass, tensor, tensor_many, trace_distance
from .entropy import ThermalContext
from .errors import (
    DimensionMismatch,
    InfeasibleAtUpperBound,
    NotThermomajorized,
    SolverBudgetExceeded,
)
from .majorization import StochasticMatrix, bistochastic_witness


@dataclass(frozen=True)
class LorenzCurve:
    """Piecewise-linear thermomajorization curve given by its elbow points.

    x is cumulative Gibbs weight, y cumulative probability; the curve is
    concave, starts at (0, 0) and ends at (1, 1).
    """

    elbows: tuple[tuple[float, float], ...]

    @property
    def xs(self) -> np.ndarray:
        return np.asarray([e[0] for e in self.elbows])

    @property
    def ys(self) -> np.ndarray:
        return np.asarray([e[1] for e in self.elbows])

    def at(self, x) -> np.ndarray:
        """Linear interpolation of the curve."""
        return np.interp(x, self.xs, self.ys)

    def to_rows(self) -> list[tuple[float, float]]:
        return [tuple(e) for e in self.elbows]


class WorkDirection(enum.Enum):
    SPEND_EXCITED_TO_GROUND = "spend"
    EXTRACT_GROUND_TO_EXCITED = "extract"


@dataclass(frozen=True)
class WorkBitSpec:
    """Two-level work bit with energies (0, gap)."""

    gap: float
    direction: WorkDirection = WorkDirection.SPEND_EXCITED_TO_GROUND

    def __post_init__(self):
        if self.gap < 0:
            raise DimensionMismatch(f"work-bit gap must be >= 0, got {self.gap}")

    def context(self, beta: float = 1.0) -> ThermalContext:
        return ThermalContext((0.0, self.gap), beta)

    def initial(self) -> Dist:
        if self.direction is WorkDirection.SPEND_EXCITED_TO_GROUND:
            return point_mass(1, 2)
        return point_mass(0, 2)

    def final(self) -> Dist:
        if self.direction is WorkDirection.SPEND_EXCITED_TO_GROUND:
            return point_mass(0, 2)
        return point_mass(1, 2)


def beta_order(p: Dist, ctx: ThermalContext) -> list[int]:
    """Indices sorted by p_i / gibbs_i descending; ties by ascending energy
    then index, so witnesses are deterministic."""
    g = ctx.gibbs.probs
    ratios = p.probs / g
    return sorted(range(p.dim), key=lambda i: (-ratios[i], ctx.energies[i], i))


def thermal_lorenz(p: Dist, ctx: ThermalContext) -> LorenzCurve:
    """Thermal Lorenz curve of p: beta-order, then cumulative (Gibbs, prob)."""
    if p.dim != ctx.dim:
        raise DimensionMismatch(f"dims {p.dim} != {ctx.dim}")
    order = beta_order(p, ctx)
    xs = np.concatenate([[0.0], np.cumsum(ctx.gibbs.probs[order])])
    ys = np.concatenate([[0.0], np.cumsum(p.probs[order])])
    xs[-1] = 1.0
    ys[-1] = min(ys[-1], 1.0)
    return LorenzCurve(tuple((float(x), float(y)) for x, y in zip(xs, ys)))


def thermomajorizes(
    p: Dist, q: Dist, ctx: ThermalContext, *, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """True iff p's thermal Lorenz curve is nowhere below q's."""
    if p.dim != q.dim or p.dim != ctx.dim:
        raise DimensionMismatch("dimension mismatch")
    cp = thermal_lorenz(p, ctx)
    cq = thermal_lorenz(q, ctx)
    slack = tol.tau_maj_scale * p.dim
    return bool(np.all(cp.at(cq.xs) >= cq.ys - slack))


def _witness_exact(p: Dist, q: Dist, gibbs: Dist) -> Optional[StochasticMatrix]:
    d = p.dim
    a_rows: list[list[Fraction]] = []
    b: list[Fraction] = []
    # column sums = 1
    for j in range(d):
        row = [Fraction(0)] * (d * d)
        for i in range(d):
            row[i * d + j] = Fraction(1)
        a_rows.append(row)
        b.append(Fraction(1))
    # L gibbs = gibbs and L p = q
    for target, vec in ((gibbs.exact, gibbs.exact), (q.exact, p.exact)):
        for i in range(d):
            row = [Fraction(0)] * (d * d)
            for j in range(d):
                row[i * d + j] = vec[j]
            a_rows.append(row)
            b.append(target[i])
    x = linfeas.feasible_point(a_rows, b)
    if x is None:
        return None
    return StochasticMatrix([[x[i * d + j] for j in range(d)] for i in range(d)])


def gibbs_preserving_witness(
    p: Dist,
    q: Dist,
    ctx: ThermalContext,
    *,
    tol: Tolerances = DEFAULT_TOL,
    max_iter: int = 100_000,
) -> StochasticMatrix:
    """Stochastic L with L p = q and L gibbs = gibbs.

    Exact-rational mode (all of p, q, gibbs exact and dim <= 6) enumerates a
    vertex of the feasibility polytope; otherwise a bounded alternating
    projection between the affine constraints and the non-negative orthant.
    """
    if not thermomajorizes(p, q, ctx, tol=tol):
        raise NotThermomajorized("p does not thermomajorize q")
    d = p.dim
    g = ctx.gibbs
    if d <= 6 and p.exact is not None and q.exact is not None and g.exact is not None:
        lam = _witness_exact(p, q, g)
        if lam is not None:
            return lam
        # fall through: exact infeasibility can only be float-boundary noise
    rows = []
    b = []
    for j in range(d):
        r = np.zeros(d * d)
        r[j::d] = 1.0
        rows.append(r)
        b.append(1.0)
    for target, vec in ((g.probs, g.probs), (q.probs, p.probs)):
        for i in range(d):
            r = np.zeros(d * d)
            r[i * d : (i + 1) * d] = vec
            rows.append(r)
            b.append(target[i])
    a = np.vstack(rows)
    b = np.asarray(b)
    a_pinv = np.linalg.pinv(a)
    x = np.tile(q.probs[:, None], (1, d)).ravel()
    for it in range(max_iter):
        x_aff = x - a_pinv @ (a @ x - b)
        if x_aff.min() >= -1e-12:
            cand = np.maximum(x_aff, 0.0).reshape(d, d)
            cand /= cand.sum(axis=0, keepdims=True)
            if (
                0.5 * np.abs(cand @ p.probs - q.probs).sum() <= tol.gibbs_witness
                and 0.5 * np.abs(cand @ g.probs - g.probs).sum() <= tol.gibbs_witness
            ):
                return StochasticMatrix(cand.tolist())
        x = np.maximum(x_aff, 0.0)
    raise SolverBudgetExceeded(f"no witness after {max_iter} projections")


@dataclass(frozen=True)
class WithJoint:
    """Formation target given as a correlated AM joint plus catalyst state."""

    q_am: BipartiteDist
    sigma_m: Dist


def _formation_predicate(
    p: Dist,
    q: Dist,
    ctx: ThermalContext,
    mode,
    tol: Tolerances,
):
    if isinstance(mode, WithJoint):
        q_am, sigma_m = mode.q_am, mode.sigma_m
        if trace_distance(q_am.marginal_a(), q) > tol.tau_norm:
            raise DimensionMismatch("joint marginal on A does not match target")
        if trace_distance(q_am.marginal_b(), sigma_m) > tol.tau_norm:
            raise DimensionMismatch("joint marginal on M does not match catalyst")
        ctx_am = ctx.compose(ThermalContext.trivial(sigma_m.dim, ctx.beta))
        initial_head = tensor(p, sigma_m)
        target_head = q_am.flatten()
    else:
        ctx_am = ctx
        initial_head = p
        target_head = q

    def predicate(delta: float) -> bool:
        wb = WorkBitSpec(delta)
        full_ctx = ctx_am.compose(wb.context(ctx.beta))
        initial = tensor(initial_head, wb.initial())
        target = tensor(target_head, wb.final())
        return thermomajorizes(initial, target, full_ctx, tol=tol)

    return predicate


def min_work_formation(
    p: Dist,
    q: Dist,
    ctx: ThermalContext,
    mode="no_catalyst",
    *,
    delta_hi: float = DELTA_HI_DEFAULT,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Minimal work-bit gap (energy units) for p (x) e_W -> target (x) g_W.

    Bisection over the gap; feasibility is monotone in the gap (a larger gap
    only lowers the target's Lorenz curve), which the property tests check.
    """
    predicate = _formation_predicate(p, q, ctx, mode, tol)
    hi = delta_hi * ctx.kt
    if predicate(0.0):
        return 0.0
    if not predicate(hi):
        raise InfeasibleAtUpperBound(f"infeasible even at gap {hi}")
    lo = 0.0
    target_tol = tol.work_bisect * ctx.kt
    while hi - lo > target_tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
