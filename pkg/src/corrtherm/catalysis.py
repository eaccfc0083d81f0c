"""Correlating-catalyst constructions.

Centerpiece is an explicit bipartite extension of a target distribution q:
a joint state on the system A and a machine B whose A-marginal is exactly q,
whose A:B mutual information is small (tunable through a parameter delta)
and whose entropies exceed those of p simultaneously at every Renyi order
once the inner multiplicity n is large enough.  The machine dimension is
n^2 + n + 1 per row, so for the astronomically large n that the entropy
balance sometimes requires the joint state is never materialized; all
spectral quantities have closed forms in (delta, n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional

import numpy as np

from .config import DEFAULT_GRID, DEFAULT_TOL, MATERIALIZE_CAP, AlphaGrid, Tolerances
from .dist import BipartiteDist, Dist, mix, tensor, tensor_many, uniform
from .entropy import BURG, Alpha, _Burg, burg_entropy, eta, renyi_entropy
from .errors import (
    BudgetExceeded,
    DeltaOutOfRange,
    DimensionMismatch,
    EntropyConditionViolated,
    EqualUpToPermutation,
    RankCondition,
    RankDeficient,
    TooLargeToMaterialize,
)
from .majorization import _padded_sorted, catalyst_search, majorizes


@dataclass(frozen=True)
class ExtensionParams:
    """Construction parameters: correlation scale delta and multiplicity n.

    ``delta`` may be a Fraction to keep the materialized extension exact;
    ``n`` is an exact int and may be astronomically large, consumers only
    ever need log(n).
    """

    delta: object
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DeltaOutOfRange(f"multiplicity n must be >= 1, got {self.n}")
        if not self.delta > 0:
            raise DeltaOutOfRange(f"delta must be positive, got {self.delta}")

    @property
    def cols(self) -> int:
        """Machine dimension n^2 + n + 1."""
        return self.n * self.n + self.n + 1


def _check_delta(q: Dist, delta) -> None:
    if not q.full_rank():
        raise RankDeficient("extension target must have full rank")
    q_min = min(q.exact) if q.exact is not None else float(q.probs.min())
    if not 0 < delta < q_min / 2:
        raise DeltaOutOfRange(f"delta {delta} outside (0, min(q)/2) = (0, {q_min / 2})")


def build_extension(q: Dist, params: ExtensionParams) -> BipartiteDist:
    """Materialize the m x (n^2+n+1) extension of q.

    Row i is (delta, delta/n^2 repeated n^2 times, (q_i - 2 delta)/n
    repeated n times).  Exact-rational whenever q and delta are rational.
    """
    _check_delta(q, params.delta)
    m, n = q.dim, params.n
    if m * params.cols > MATERIALIZE_CAP:
        raise TooLargeToMaterialize(f"extension has {m * params.cols} entries")
    exact = q.exact is not None and isinstance(params.delta, Rational)
    if exact:
        d = Fraction(params.delta)
        rows = [
            [d] + [d / n**2] * n**2 + [(qi - 2 * d) / n] * n for qi in q.exact
        ]
    else:
        d = float(params.delta)
        rows = [
            [d] + [d / n**2] * n**2 + [(qi - 2 * d) / n] * n
            for qi in q.probs.tolist()
        ]
    return BipartiteDist(rows)


def extension_marginal_b(q: Dist, params: ExtensionParams) -> Dist:
    """Machine marginal (m delta, m delta/n^2 x n^2, (1-2m delta)/n x n)."""
    _check_delta(q, params.delta)
    m, n = q.dim, params.n
    if params.cols > MATERIALIZE_CAP:
        raise TooLargeToMaterialize(f"marginal has {params.cols} entries")
    if q.exact is not None and isinstance(params.delta, Rational):
        d = Fraction(params.delta)
        return Dist([m * d] + [m * d / n**2] * n**2 + [(1 - 2 * m * d) / n] * n)
    d = float(params.delta)
    return Dist([m * d] + [m * d / n**2] * n**2 + [(1 - 2 * m * d) / n] * n)


def extension_mutual_information(q: Dist, delta) -> float:
    """A:B mutual information of the extension; independent of n.

    Equals sum_i (q_i - 2 delta) log(q_i - 2 delta) - sum_i q_i log q_i
    - 2 m delta log m - (1 - 2 m delta) log(1 - 2 m delta); tends to 0 as
    delta -> 0.
    """
    _check_delta(q, delta)
    m = q.dim
    d = float(delta)
    qq = q.probs
    shifted = qq - 2.0 * d
    value = (
        float((shifted * np.log(shifted)).sum())
        - float((qq * np.log(qq)).sum())
        - 2.0 * m * d * math.log(m)
        + eta(1.0 - 2.0 * m * d)
    )
    return max(value, 0.0)


def _lse(terms) -> float:
    arr = np.asarray(terms, dtype=np.float64)
    tmax = arr.max()
    return float(tmax + math.log(np.exp(arr - tmax).sum()))


def entropy_balance(p: Dist, q: Dist, params: ExtensionParams, alpha: Alpha) -> float:
    """H_alpha(extension of q) - H_alpha(machine marginal) - H_alpha(p).

    Positive balance at order alpha means the extension construction beats p
    at that order.  Evaluated from closed forms in (delta, n), entirely in
    the log domain, so n may be arbitrarily large.  Both p and q must have
    full rank.
    """
    _check_delta(q, params.delta)
    if not p.full_rank():
        raise RankDeficient("balance needs a full-rank p")
    m, n = q.dim, params.n
    d = float(params.delta)
    ln_n = math.log(n)
    log_qd = np.log(q.probs - 2.0 * d)
    log_md = math.log(m * d)
    log_rest = math.log(1.0 - 2.0 * m * d)

    if isinstance(alpha, _Burg):
        # weights of the three column groups in the Burg average
        r_outer = float(Fraction(n * n + 1, n * n + n + 1))
        r_inner = float(Fraction(n, n * n + n + 1))
        value = (
            -r_outer * math.log(m)
            + r_inner * (float(log_qd.sum()) / m - log_rest)
        )
        return value - burg_entropy(p)

    a = float(alpha)
    if a == 0.0:
        return 0.0
    if a == math.inf:
        log_max_ab = max(math.log(d), float(log_qd.max()) - ln_n)
        log_max_b = max(log_md, log_rest - ln_n)
        return log_max_b - log_max_ab - renyi_entropy(p, math.inf)
    if a == -math.inf:
        log_min_ab = min(math.log(d) - 2.0 * ln_n, float(log_qd.min()) - ln_n)
        log_min_b = min(log_md - 2.0 * ln_n, log_rest - ln_n)
        return log_min_ab - log_min_b - renyi_entropy(p, -math.inf)
    if a == 1.0:
        # independent of n
        return (
            -float(((q.probs - 2.0 * d) * log_qd).sum())
            + 2.0 * m * d * math.log(m)
            - eta(1.0 - 2.0 * m * d)
            - renyi_entropy(p, 1.0)
        )
    num = _lse(
        [
            math.log(m) + a * math.log(d),
            math.log(m) + a * math.log(d) + 2.0 * (1.0 - a) * ln_n,
            (1.0 - a) * ln_n + _lse(a * log_qd),
        ]
    )
    den = _lse(
        [
            a * log_md,
            a * log_md + 2.0 * (1.0 - a) * ln_n,
            a * log_rest + (1.0 - a) * ln_n,
        ]
    )
    return math.copysign(1.0, a) / (1.0 - a) * (num - den) - renyi_entropy(p, a)


def balance_limit(p: Dist, m: int, alpha: Alpha) -> float:
    """n -> infinity limit of the entropy balance.

    sgn(alpha) * log(m) - H_alpha(p) away from {0, Burg}; exactly 0 at
    alpha = 0 (full-rank case); -log(m) - H_Burg(p) for the Burg order.
    """
    if isinstance(alpha, _Burg):
        return -math.log(m) - burg_entropy(p)
    a = float(alpha)
    if a == 0.0:
        return 0.0
    return math.copysign(1.0, a) * math.log(m) - renyi_entropy(p, a)


@dataclass(frozen=True)
class BalanceCurve:
    """Entropy-balance samples over an alpha grid for fixed (delta, n)."""

    params: ExtensionParams
    samples: tuple[tuple[Alpha, float], ...]

    @property
    def min_value(self) -> float:
        return min(v for _, v in self.samples)

    def positive(self, slack: float = 0.0) -> bool:
        return all(v > -slack for _, v in self.samples)

    def to_rows(self) -> list[tuple[float, float]]:
        """Finite-alpha samples only, as (alpha, balance) pairs."""
        return [
            (float(a), v)
            for a, v in self.samples
            if not isinstance(a, _Burg) and math.isfinite(a)
        ]


def balance_curve(
    p: Dist,
    q: Dist,
    params: ExtensionParams,
    grid: AlphaGrid = DEFAULT_GRID,
    *,
    include_limits: bool = True,
) -> BalanceCurve:
    samples: list[tuple[Alpha, float]] = [
        (float(a), entropy_balance(p, q, params, float(a))) for a in grid.values()
    ]
    samples.append((1.0, entropy_balance(p, q, params, 1.0)))
    if include_limits:
        for a in (math.inf, -math.inf):
            samples.append((a, entropy_balance(p, q, params, a)))
        samples.append((BURG, entropy_balance(p, q, params, BURG)))
    return BalanceCurve(params, tuple(samples))


def find_extension_params(
    p: Dist,
    q: Dist,
    eps_corr: float = 1e-3,
    grid: AlphaGrid = DEFAULT_GRID,
    *,
    budget: int = 60,
) -> ExtensionParams:
    """Pick (delta, n) with positive balance at every sampled order and
    mutual information below ``eps_corr``.

    delta starts at min(q)/4 and is halved until the n-independent
    conditions hold (Shannon balance positive, mutual information small);
    then n is grown by squaring until every grid order plus the +-infinity
    and Burg limits are positive.  Growing n never destroys positivity
    since the balance is non-decreasing in n.
    """
    if not p.full_rank() or not q.full_rank():
        raise RankDeficient("extension search needs full-rank p and q")
    if renyi_entropy(p, 1.0) >= renyi_entropy(q, 1.0):
        raise EntropyConditionViolated(
            "target must have strictly larger Shannon entropy"
        )
    exact = q.exact is not None
    delta = min(q.exact) / 4 if exact else Fraction(float(q.probs.min()) / 4).limit_denominator(10**12)
    for _ in range(budget):
        params = ExtensionParams(delta, 1)
        if (
            entropy_balance(p, q, params, 1.0) > 0
            and extension_mutual_information(q, delta) < eps_corr
        ):
            break
        delta /= 2
    else:
        raise BudgetExceeded("no delta found within budget")
    n = 1
    alphas = list(grid.values()) + [math.inf, -math.inf, BURG]
    for _ in range(budget):
        params = ExtensionParams(delta, n)
        if all(entropy_balance(p, q, params, a) > 0 for a in alphas):
            return params
        n = 2 if n == 1 else n * n
    raise BudgetExceeded("no multiplicity n found within budget")


def full_rank_lift(p: Dist, q: Dist, *, budget: int = 200) -> tuple[Dist, Fraction]:
    """Mix p toward uniform until full rank while keeping H below H(q).

    Returns (lifted p, kappa) with lifted = (1-kappa) p + kappa uniform;
    p majorizes the lift, so any transition from the lift is reachable from
    p itself.  kappa = 0 when p already has full rank.
    """
    h_q = renyi_entropy(q, 1.0)
    if renyi_entropy(p, 1.0) >= h_q:
        raise EntropyConditionViolated("target must have strictly larger Shannon entropy")
    if p.full_rank():
        return p, Fraction(0)
    u = uniform(p.dim)
    kappa = Fraction(1, 2)
    for _ in range(budget):
        lifted = mix(p, u, kappa)
        if renyi_entropy(lifted, 1.0) < h_q:
            return lifted, kappa
        kappa /= 2
    raise BudgetExceeded("no lift found within budget")


def zero_split(p: Dist, q: Dist) -> tuple[Dist, Dist]:
    """Restrict both states to the top-rank(q) levels, sorted descending.

    Requires rank(p) <= rank(q); the discarded entries are all zero on both
    sides, so the reduced transition is equivalent to the original one up to
    permutations.
    """
    a, b = _padded_sorted(p, q)
    rank_q = int(np.count_nonzero(b))
    rank_p = int(np.count_nonzero(a))
    if rank_p > rank_q:
        raise RankCondition(f"rank(p) = {rank_p} exceeds rank(q) = {rank_q}")
    if p.exact is not None and q.exact is not None:
        pe = sorted(p.exact, reverse=True)
        qe = sorted(q.exact, reverse=True)
        pe = pe + [Fraction(0)] * (rank_q - len(pe))
        return Dist(pe[:rank_q]), Dist(qe[:rank_q])
    return Dist(a[:rank_q].tolist()), Dist(b[:rank_q].tolist())


@dataclass(frozen=True)
class ExtensionCertificate:
    """Outcome of the correlating-catalyst feasibility check."""

    feasible: bool
    reason: str
    p_reduced: Optional[Dist] = None
    q_reduced: Optional[Dist] = None
    kappa: Optional[Fraction] = None
    params: Optional[ExtensionParams] = None
    mutual_information: Optional[float] = None
    min_balance: Optional[float] = None

    def __bool__(self) -> bool:
        return self.feasible


def main_theorem_check(
    p: Dist,
    q: Dist,
    eps_corr: float = 1e-3,
    grid: AlphaGrid = DEFAULT_GRID,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> ExtensionCertificate:
    """Feasibility of p -> q under a correlating catalyst, with certificate.

    Feasible exactly when H_0(p) <= H_0(q) and H(p) < H(q).  On success the
    certificate carries explicit construction parameters: the reduced
    full-rank pair, the lift weight kappa and (delta, n) for the extension.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    a, b = _padded_sorted(p, q)
    if np.allclose(a, b, atol=tol.tau_maj_scale, rtol=0):
        raise EqualUpToPermutation("p and q agree up to permutation")
    if renyi_entropy(p, 0.0) > renyi_entropy(q, 0.0):
        return ExtensionCertificate(False, "rank condition H_0(p) <= H_0(q) fails")
    gap = renyi_entropy(q, 1.0) - renyi_entropy(p, 1.0)
    if gap <= 0:
        return ExtensionCertificate(
            False, f"Shannon condition H(p) < H(q) fails by {-gap:.3e}"
        )
    p_red, q_red = zero_split(p, q)
    p_lift, kappa = full_rank_lift(p_red, q_red)
    params = find_extension_params(p_lift, q_red, eps_corr, grid)
    curve = balance_curve(p_lift, q_red, params, grid)
    return ExtensionCertificate(
        True,
        "extension with positive balance at all sampled orders",
        p_reduced=p_red,
        q_reduced=q_red,
        kappa=kappa,
        params=params,
        mutual_information=extension_mutual_information(q_red, params.delta),
        min_balance=curve.min_value,
    )


@dataclass(frozen=True)
class ExtensionWitness:
    """Materialized extension plus the catalyst making majorization explicit."""

    extension: BipartiteDist
    catalyst: Dist
    params: ExtensionParams

    def machine_state(self) -> Dist:
        """Marginal of the machine side including the catalyst."""
        return tensor(self.extension.marginal_b(), self.catalyst)


def _scatter_rows(ext_red: BipartiteDist, q: Dist) -> BipartiteDist:
    """Lift an extension of sorted-nonzero q back to q's original indexing.

    Zero entries of q get all-zero rows; the A-marginal of the result is
    exactly q.  Majorization statements survive since the flattening is a
    permutation plus zero padding.
    """
    cols = ext_red.dims[1]
    exact = ext_red.exact is not None and q.exact is not None
    if exact:
        order = sorted(range(q.dim), key=lambda i: (-q.exact[i], i))
        zero_row = [Fraction(0)] * cols
        rows = [zero_row] * q.dim
        for k in range(ext_red.dims[0]):
            rows[order[k]] = list(ext_red.exact[k])
    else:
        order = sorted(range(q.dim), key=lambda i: (-q.probs[i], i))
        rows = [[0.0] * cols] * q.dim
        rows = list(rows)
        for k in range(ext_red.dims[0]):
            rows[order[k]] = ext_red.joint[k].tolist()
    return BipartiteDist(rows)


def construct_extension_witness(
    p: Dist,
    q: Dist,
    eps_corr: float = 1e-3,
    *,
    max_n: int = 6,
    catalyst_dim: int = 5,
    tol: Tolerances = DEFAULT_TOL,
) -> Optional[ExtensionWitness]:
    """Small materialized extension E of q with p (x) E_B (x) c > E (x) c.

    Zeros are handled by restricting to the support of q (requires
    rank(p) <= rank(q)) and lifting the reduced p to full rank, which only
    loosens the majorization.  Tries growing multiplicities and, when plain
    majorization fails, a bounded catalyst search.  ``None`` means the
    bounded search gave up; the asymptotic construction may still exist.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    if renyi_entropy(p, 1.0) >= renyi_entropy(q, 1.0):
        return None
    try:
        p_red, q_red = zero_split(p, q)
    except RankCondition:
        return None
    q_min = min(q_red.exact) if q_red.exact is not None else float(q_red.probs.min())
    for n in range(1, max_n + 1):
        for shrink in range(6):
            delta = q_min / 4 / 2**shrink
            if isinstance(q_min, Fraction):
                delta = Fraction(q_min, 4 * 2**shrink)
            if extension_mutual_information(q_red, delta) >= eps_corr:
                continue
            params = ExtensionParams(delta, n)
            ext_red = build_extension(q_red, params)
            ext = _scatter_rows(ext_red, q)
            flat = ext.flatten()
            source = tensor(p, ext.marginal_b())
            if majorizes(source, flat, tol=tol):
                return ExtensionWitness(ext, Dist([1]), params)
            c = catalyst_search(source, flat, max_dim=catalyst_dim, tol=tol)
            if c is not None:
                return ExtensionWitness(ext, c, params)
    return None


@dataclass(frozen=True)
class TwoCatalystResult:
    """Bipartite r_BC whose marginals enable p (x) r_B (x) r_C > q (x) r_BC."""

    r_bc: BipartiteDist
    verified: bool


def two_catalyst_construction(
    p: Dist,
    q: Dist,
    eps_corr: float = 1e-3,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> TwoCatalystResult:
    """Strictly catalytic two-system construction.

    B is a copy of the target and C the machine side of an extension
    witness; swapping the roles of the system and its copy turns the
    extension relation into p (x) (r_B (x) r_C) > q (x) r_BC with both
    catalyst marginals exactly restored.
    """
    witness = construct_extension_witness(p, q, eps_corr, tol=tol)
    if witness is None:
        raise BudgetExceeded("no materializable extension witness found")
    # r_BC lives on (copy of target) x (machine including catalyst)
    ext_with_cat = tensor(witness.extension.flatten(), witness.catalyst)
    k = witness.extension.dims[1] * witness.catalyst.dim
    if ext_with_cat.exact is not None:
        rows = [ext_with_cat.exact[i * k : (i + 1) * k] for i in range(q.dim)]
    else:
        rows = ext_with_cat.probs.reshape(q.dim, k).tolist()
    r_bc = BipartiteDist(rows)
    source = tensor_many(p, r_bc.marginal_a(), r_bc.marginal_b())
    target = tensor(q, r_bc.flatten())
    return TwoCatalystResult(r_bc, majorizes(source, target, tol=tol))
