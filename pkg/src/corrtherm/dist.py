"""Probability vectors and joint distributions.

Two numeric backends coexist: plain float64 arrays (default) and exact
rationals (``fractions.Fraction``), used to make the small worked examples
bit-exact.  A ``Dist`` built from Fractions (or ints) keeps the exact values
alongside the float view; operations preserve exactness whenever all inputs
are exact.

Tensor products are flattened row-major: entry ``(i, j)`` of ``p (x) q``
lands at flat index ``i * dim(q) + j``.  This convention is fixed so that
multi-system orderings (A outer, W inner, etc.) are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DimensionMismatch, LambdaOutOfRange, NegativeEntry, NotNormalized


def _as_exact(values: Sequence) -> Optional[tuple[Fraction, ...]]:
    if all(isinstance(v, Rational) for v in values):
        return tuple(Fraction(v) for v in values)
    return None


class Dist:
    """A validated finite probability vector."""

    __slots__ = ("probs", "exact")

    def __init__(self, values: Iterable, *, tol: Tolerances = DEFAULT_TOL):
        values = list(values)
        if not values:
            raise DimensionMismatch("empty probability vector")
        exact = _as_exact(values)
        probs = np.asarray([float(v) for v in values], dtype=np.float64)
        if np.any(probs < -tol.tau_norm):
            raise NegativeEntry(f"negative entry in {probs}")
        if exact is not None:
            if any(v < 0 for v in exact):
                raise NegativeEntry(f"negative entry in {values}")
            if sum(exact) != 1:
                raise NotNormalized(f"exact entries sum to {sum(exact)}, not 1")
        else:
            # clamp float round-off just below zero; larger deviations were
            # rejected above
            probs = np.maximum(probs, 0.0)
            total = probs.sum()
            if abs(total - 1.0) > tol.tau_norm:
                raise NotNormalized(f"entries sum to {total}, not 1")
        probs.setflags(write=False)
        self.probs = probs
        self.exact = exact

    @property
    def dim(self) -> int:
        return self.probs.size

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def full_rank(self) -> bool:
        if self.exact is not None:
            return all(v > 0 for v in self.exact)
        return bool(np.all(self.probs > 0))

    def as_float(self) -> "Dist":
        """Drop the exact backend (useful to force float arithmetic)."""
        return Dist(self.probs.tolist())

    def sorted_desc(self) -> np.ndarray:
        return np.sort(self.probs)[::-1]

    def to_json(self) -> dict:
        return {"probs": self.probs.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Dist":
        return cls(obj["probs"])

    def __len__(self) -> int:
        return self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return self.dim == other.dim and bool(np.array_equal(self.probs, other.probs))

    def __hash__(self):
        return hash(tuple(self.probs.tolist()))

    def __repr__(self) -> str:
        return f"Dist({self.probs.tolist()})"


def uniform(m: int) -> Dist:
    return Dist([Fraction(1, m)] * m)


def point_mass(i: int, m: int) -> Dist:
    vals = [Fraction(0)] * m
    vals[i] = Fraction(1)
    return Dist(vals)


class BipartiteDist:
    """Joint distribution over two systems, stored as a matrix.

    Rows index the A outcomes, columns the B outcomes.  Marginals are
    computed on access, never stored.
    """

    __slots__ = ("joint", "exact")

    def __init__(self, joint, *, tol: Tolerances = DEFAULT_TOL):
        rows = [list(r) for r in joint]
        flat = [v for r in rows for v in r]
        if not flat or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("joint distribution must be a rectangular matrix")
        exact = _as_exact(flat)
        arr = np.asarray([[float(v) for v in r] for r in rows], dtype=np.float64)
        if np.any(arr < -tol.tau_norm):
            raise NegativeEntry("negative entry in joint distribution")
        if exact is not None:
            if any(v < 0 for v in exact):
                raise NegativeEntry("negative entry in joint distribution")
            if sum(exact) != 1:
                raise NotNormalized(f"exact entries sum to {sum(exact)}, not 1")
            exact = tuple(tuple(Fraction(v) for v in r) for r in rows)
        else:
            arr = np.maximum(arr, 0.0)
            total = arr.sum()
            if abs(total - 1.0) > tol.tau_norm:
                raise NotNormalized(f"entries sum to {total}, not 1")
        arr.setflags(write=False)
        self.joint = arr
        self.exact = exact

    @property
    def dims(self) -> tuple[int, int]:
        return self.joint.shape

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def marginal_a(self) -> Dist:
        if self.exact is not None:
            return Dist([sum(r) for r in self.exact])
        return Dist(self.joint.sum(axis=1).tolist())

    def marginal_b(self) -> Dist:
        if self.exact is not None:
            cols = zip(*self.exact)
            return Dist([sum(c) for c in cols])
        return Dist(self.joint.sum(axis=0).tolist())

    def flatten(self) -> Dist:
        """Row-major flattening to a plain Dist."""
        if self.exact is not None:
            return Dist([v for r in self.exact for v in r])
        return Dist(self.joint.ravel().tolist())

    def to_json(self) -> dict:
        return {"joint": self.joint.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "BipartiteDist":
        return cls(obj["joint"])

    def __repr__(self) -> str:
        return f"BipartiteDist({self.joint.tolist()})"


def tensor(p: Dist, q: Dist) -> Dist:
    """Product distribution, row-major: entry (i, j) at index i*dim(q)+j."""
    if p.exact is not None and q.exact is not None:
        return Dist([a * b for a in p.exact for b in q.exact])
    return Dist(np.outer(p.probs, q.probs).ravel().tolist())


def tensor_many(*dists: Dist) -> Dist:
    out = dists[0]
    for d in dists[1:]:
        out = tensor(out, d)
    return out


def as_bipartite(p: Dist, d_a: int, d_b: int) -> BipartiteDist:
    """Reinterpret a flat vector over a product space as a joint matrix."""
    if p.dim != d_a * d_b:
        raise DimensionMismatch(f"cannot reshape dim {p.dim} to {d_a}x{d_b}")
    if p.exact is not None:
        rows = [p.exact[i * d_b : (i + 1) * d_b] for i in range(d_a)]
        return BipartiteDist(rows)
    return BipartiteDist(p.probs.reshape(d_a, d_b).tolist())


def trace_distance(p: Dist, q: Dist) -> float:
    """Half the l1 distance; lies in [0, 1]."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def mix(p: Dist, q: Dist, lam) -> Dist:
    """Convex combination (1 - lam) * p + lam * q."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    if not 0 <= lam <= 1:
        raise LambdaOutOfRange(f"lambda {lam} outside [0, 1]")
    if p.exact is not None and q.exact is not None and isinstance(lam, Rational):
        lam = Fraction(lam)
        return Dist([(1 - lam) * a + lam * b for a, b in zip(p.exact, q.exact)])
    return Dist(((1.0 - float(lam)) * p.probs + float(lam) * q.probs).tolist())
