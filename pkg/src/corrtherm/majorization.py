"""Majorization tests, bistochastic witnesses and catalytic trumping checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_GRID, DEFAULT_TOL, AlphaGrid, Tolerances
from .dist import Dist, tensor
from .entropy import BURG, Alpha, renyi_entropy
from .errors import (
    BothRankDeficient,
    DimensionMismatch,
    EqualUpToPermutation,
    NotMajorized,
)


class StochasticMatrix:
    """Column-stochastic matrix; optionally exact-rational."""

    __slots__ = ("entries", "exact")

    def __init__(self, entries, *, tol: Tolerances = DEFAULT_TOL):
        rows = [list(r) for r in entries]
        exact = None
        if all(isinstance(v, (int, Fraction)) for r in rows for v in r):
            exact = tuple(tuple(Fraction(v) for v in r) for r in rows)
        arr = np.asarray([[float(v) for v in r] for r in rows], dtype=np.float64)
        if np.any(arr < -tol.tau_norm):
            raise ValueError("negative entry in stochastic matrix")
        col_sums = arr.sum(axis=0)
        if np.any(np.abs(col_sums - 1.0) > 1e-8):
            raise ValueError(f"column sums {col_sums} deviate from 1")
        arr.setflags(write=False)
        self.entries = arr
        self.exact = exact

    @property
    def dims(self) -> tuple[int, int]:
        return self.entries.shape

    def is_bistochastic(self, tol: float = 1e-9) -> bool:
        d_out, d_in = self.entries.shape
        if d_out != d_in:
            return False
        return bool(np.all(np.abs(self.entries.sum(axis=1) - 1.0) <= tol))

    def apply(self, p: Dist) -> Dist:
        if p.dim != self.entries.shape[1]:
            raise DimensionMismatch(f"matrix takes dim {self.entries.shape[1]}, got {p.dim}")
        if self.exact is not None and p.exact is not None:
            out = [sum(r[j] * p.exact[j] for j in range(p.dim)) for r in self.exact]
            return Dist(out)
        return Dist((self.entries @ p.probs).tolist())

    def apply_vector(self, v: np.ndarray) -> np.ndarray:
        """Apply to an arbitrary (possibly signed) vector."""
        return self.entries @ np.asarray(v, dtype=np.float64)

    def compose(self, other: "StochasticMatrix") -> "StochasticMatrix":
        """self after other."""
        if self.exact is not None and other.exact is not None:
            a, b = self.exact, other.exact
            n, k, m = len(a), len(b), len(b[0])
            prod = [
                [sum(a[i][l] * b[l][j] for l in range(k)) for j in range(m)]
                for i in range(n)
            ]
            return StochasticMatrix(prod)
        return StochasticMatrix((self.entries @ other.entries).tolist())

    @classmethod
    def identity(cls, d: int) -> "StochasticMatrix":
        return cls([[Fraction(int(i == j)) for j in range(d)] for i in range(d)])

    def __repr__(self):
        return f"StochasticMatrix(dims={self.dims})"


@dataclass(frozen=True)
class TrumpingVerdict:
    feasible: str  # "Yes" | "No" | "Boundary"
    violated: tuple[tuple[Alpha, float], ...]
    grid: str
    min_margin: float

    def __bool__(self) -> bool:
        return self.feasible == "Yes"


def _padded_sorted(p: Dist, q: Dist) -> tuple[np.ndarray, np.ndarray]:
    a, b = p.sorted_desc(), q.sorted_desc()
    d = max(a.size, b.size)
    a = np.pad(a, (0, d - a.size))
    b = np.pad(b, (0, d - b.size))
    return a, b


def majorizes(p: Dist, q: Dist, *, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff every prefix sum of p-sorted dominates q-sorted.

    Dimensions are aligned by zero padding; prefix k is allowed slack
    ``tau_maj_scale * k``.
    """
    a, b = _padded_sorted(p, q)
    gaps = np.cumsum(a) - np.cumsum(b)
    slack = tol.tau_maj_scale * np.arange(1, a.size + 1)
    return bool(np.all(gaps >= -slack))


def _sort_desc_exact(values):
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    return [values[i] for i in order], order


def _witness_sorted(x, y, *, exact: bool, max_steps: int):
    """Product of T-transforms mapping sorted-desc x onto sorted-desc y.

    Returns the accumulated matrix as a list of lists in the input numeric
    type.  Classic construction: pick the largest index j with x_j > y_j and
    the smallest k > j with x_k < y_k; each averaging step settles at least
    one coordinate, so at most d-1 steps occur.
    """
    d = len(x)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    m = [[one if i == j else zero for j in range(d)] for i in range(d)]
    cur = list(x)
    eps = 0 if exact else 1e-15
    for _ in range(max_steps):
        j = None
        for i in range(d):
            if cur[i] - y[i] > eps:
                j = i
        if j is None:
            break
        k = None
        for i in range(j + 1, d):
            if y[i] - cur[i] > eps:
                k = i
                break
        if k is None:
            break
        delta = min(cur[j] - y[j], y[k] - cur[k])
        t = delta / (cur[j] - cur[k])
        # apply T on coordinates (j, k) to cur and accumulate into m
        cj, ck = cur[j], cur[k]
        cur[j] = (one - t) * cj + t * ck
        cur[k] = t * cj + (one - t) * ck
        row_j = m[j]
        row_k = m[k]
        new_j = [(one - t) * row_j[c] + t * row_k[c] for c in range(d)]
        new_k = [t * row_j[c] + (one - t) * row_k[c] for c in range(d)]
        m[j] = new_j
        m[k] = new_k
    return m


def bistochastic_witness(p: Dist, q: Dist, *, tol: Tolerances = DEFAULT_TOL) -> StochasticMatrix:
    """Bistochastic L with L p = q, built from two-outcome averaging steps."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    if not majorizes(p, q, tol=tol):
        raise NotMajorized("p does not majorize q")
    d = p.dim
    exact = p.exact is not None and q.exact is not None
    if exact:
        xs, perm_p = _sort_desc_exact(list(p.exact))
        ys, perm_q = _sort_desc_exact(list(q.exact))
    else:
        xs, perm_p = _sort_desc_exact(p.probs.tolist())
        ys, perm_q = _sort_desc_exact(q.probs.tolist())
    core = _witness_sorted(xs, ys, exact=exact, max_steps=2 * d)
    # L = P_q^T * core * P_p, with P_p the sorting permutation of p
    zero = Fraction(0) if exact else 0.0
    out = [[zero] * d for _ in range(d)]
    for i in range(d):  # row i of sorted space maps to row perm_q[i]
        for j in range(d):
            out[perm_q[i]][perm_p[j]] = core[i][j]
    lam = StochasticMatrix(out)
    if not exact:
        resid = 0.5 * np.abs(lam.entries @ p.probs - q.probs).sum()
        if resid > tol.witness:
            raise NotMajorized(f"witness residual {resid} exceeds {tol.witness}")
    return lam


def _entropy_margins(p: Dist, q: Dist, alphas: Sequence[float]) -> list[tuple[Alpha, float]]:
    out = []
    for a in alphas:
        out.append((float(a), renyi_entropy(q, float(a)) - renyi_entropy(p, float(a))))
    for a in (math.inf, -math.inf):
        out.append((a, renyi_entropy(q, a) - renyi_entropy(p, a)))
    out.append((BURG, renyi_entropy(q, BURG) - renyi_entropy(p, BURG)))
    return out


def trumping_conditions(
    p: Dist,
    q: Dist,
    grid: AlphaGrid = DEFAULT_GRID,
    *,
    tol: Tolerances = DEFAULT_TOL,
) -> TrumpingVerdict:
    """Klimesh/Turgut conditions H_alpha(p) < H_alpha(q) over a sample grid.

    Margins are H_alpha(q) - H_alpha(p); the limits at +-inf and the Burg
    condition are checked by closed form.  A grid cannot certify "for all
    real alpha", so near-zero margins are reported as Boundary.
    """
    a, b = _padded_sorted(p, q)
    if np.allclose(a, b, atol=tol.tau_maj_scale, rtol=0):
        raise EqualUpToPermutation("p and q agree up to permutation")
    if not p.full_rank() and not q.full_rank():
        raise BothRankDeficient("both inputs contain zeros")
    margins = _entropy_margins(p, q, grid.values())
    finite = [m for _, m in margins if not math.isnan(m)]
    min_margin = min(finite)
    violated = tuple((a, m) for a, m in margins if m <= 0)
    if violated:
        feasible = "No"
    elif min_margin < tol.boundary_margin:
        feasible = "Boundary"
    else:
        feasible = "Yes"
    desc = (
        f"geometric +-[{grid.geo_lo},{grid.geo_hi}]x{grid.geo_points}"
        f" + linear [{grid.lin_lo},{grid.lin_hi}] step {grid.lin_step}"
        f" + dip [{grid.dip_lo},{grid.dip_hi}] step {grid.dip_step}"
        f" + {{-inf,+inf,Burg}}"
    )
    return TrumpingVerdict(feasible, violated, desc, min_margin)


def tensor_margin(p: Dist, q: Dist, c: np.ndarray) -> float:
    """Smallest prefix-sum gap of sorted(p (x) c) over sorted(q (x) c)."""
    pc = np.sort(np.outer(p.probs, c).ravel())[::-1]
    qc = np.sort(np.outer(q.probs, c).ravel())[::-1]
    return float(np.min(np.cumsum(pc) - np.cumsum(qc)))


def catalyst_search(
    p: Dist,
    q: Dist,
    max_dim: int = 6,
    budget: int = 2000,
    *,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> Optional[Dist]:
    """Bounded numeric search for c with p (x) c > q (x) c (majorization).

    Seeded random restarts over the catalyst simplex plus hill climbing on
    the minimal prefix-sum margin.  ``None`` means budget exhaustion, not a
    disproof.
    """
    if majorizes(p, q, tol=tol):
        return Dist([1])
    rng = np.random.default_rng(seed)
    evals = 0

    def ok(c: np.ndarray) -> Optional[Dist]:
        c = np.maximum(c, 0.0)
        c = c / c.sum()
        cand = Dist(c.tolist())
        if majorizes(tensor(p, cand), tensor(q, cand), tol=tol):
            return cand
        return None

    for d_c in range(2, max_dim + 1):
        # structured scan: geometric profiles c ~ (1, r, r^2, ...)
        for r in np.linspace(0.05, 1.0, 40):
            evals += 1
            c = r ** np.arange(d_c)
            found = ok(c)
            if found is not None:
                return found
            if evals >= budget:
                return None
        # random restarts with margin hill climbing
        for _ in range(8):
            c = rng.dirichlet(np.ones(d_c))
            best = tensor_margin(p, q, c)
            for _ in range(60):
                evals += 1
                if evals >= budget:
                    return None
                i, j = rng.integers(0, d_c, size=2)
                if i == j:
                    continue
                step = rng.uniform(0, c[i])
                trial = c.copy()
                trial[i] -= step
                trial[j] += step
                margin = tensor_margin(p, q, trial)
                if margin > best:
                    best, c = margin, trial
                    if best >= -tol.tau_maj_scale * p.dim * d_c:
                        found = ok(c)
                        if found is not None:
                            return found
            found = ok(c)
            if found is not None:
                return found
    return None
