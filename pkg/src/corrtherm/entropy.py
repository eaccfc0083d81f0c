"""Renyi entropies, Burg entropy, Renyi divergences and alpha-free energies.

Alpha parameters are plain floats, with ``math.inf`` / ``-math.inf`` for the
limit orders and the module-level :data:`BURG` sentinel for the Burg entropy
marker that enters the trumping conditions alongside the Renyi family.
Entropies are in nats.  Values on rank-deficient inputs follow the limit
conventions documented on each function; results may be ``+-inf``.

Everything that involves powers is evaluated in the log domain through a
log-sum-exp so that alphas up to +-1e3 and probabilities down to 1e-300
survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

import numpy as np

from .dist import BipartiteDist, Dist, tensor
from .errors import DimensionMismatch, OutOfRange


class _Burg:
    """Marker for the Burg entropy condition; not a numeric alpha."""

    __slots__ = ()

    def __repr__(self):
        return "BURG"


BURG = _Burg()

Alpha = Union[float, _Burg]


@dataclass(frozen=True)
class ThermalContext:
    """Hamiltonian energies plus inverse temperature; owns the Gibbs state.

    Energies are in units of kT when ``beta == 1``.  If all Boltzmann
    weights exp(-beta*E_i) are exactly rational (passed via ``weights``),
    the Gibbs state keeps an exact-rational backend.
    """

    energies: tuple[float, ...]
    beta: float = 1.0
    gibbs: Dist = field(init=False, compare=False)
    log_z: float = field(init=False, compare=False)

    def __init__(self, energies: Sequence[float], beta: float = 1.0, *, weights=None):
        if beta <= 0:
            raise OutOfRange(f"beta must be positive, got {beta}")
        object.__setattr__(self, "energies", tuple(float(e) for e in energies))
        object.__setattr__(self, "beta", float(beta))
        if weights is not None:
            weights = [Fraction(w) for w in weights]
            z = sum(weights)
            gibbs = Dist([w / z for w in weights])
            log_z = math.log(z)
        else:
            w = -self.beta * np.asarray(self.energies)
            wmax = w.max()
            log_z = wmax + math.log(np.exp(w - wmax).sum())
            gibbs = Dist(np.exp(w - log_z).tolist())
            # renormalize away the last float ulp
            gibbs = Dist((gibbs.probs / gibbs.probs.sum()).tolist())
        object.__setattr__(self, "gibbs", gibbs)
        object.__setattr__(self, "log_z", float(log_z))

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def kt(self) -> float:
        return 1.0 / self.beta

    @classmethod
    def from_rational_weights(cls, weights, beta: float = 1.0) -> "ThermalContext":
        """Context with energies -log(w_i)/beta for rational Boltzmann weights."""
        weights = [Fraction(w) for w in weights]
        energies = [-math.log(w) / beta for w in weights]
        return cls(energies, beta, weights=weights)

    @classmethod
    def trivial(cls, dim: int, beta: float = 1.0) -> "ThermalContext":
        return cls.from_rational_weights([1] * dim, beta)

    def compose(self, other: "ThermalContext") -> "ThermalContext":
        """Composite context with additive energies, self outer, other inner."""
        if self.beta != other.beta:
            raise DimensionMismatch("cannot compose contexts at different beta")
        energies = [ea + eb for ea in self.energies for eb in other.energies]
        ga, gb = self.gibbs, other.gibbs
        if ga.exact is not None and gb.exact is not None:
            weights = [a * b for a in ga.exact for b in gb.exact]
            ctx = ThermalContext(energies, self.beta, weights=weights)
            # the products of normalized Gibbs entries sum to 1, so the
            # constructor sees log Z = 0; the true value is additive
            object.__setattr__(ctx, "log_z", self.log_z + other.log_z)
        else:
            ctx = ThermalContext(energies, self.beta)
        return ctx


def _log_nonzero(p: Dist) -> np.ndarray:
    return np.log(p.probs[p.probs > 0])


def renyi_entropy(p: Dist, alpha: Alpha) -> float:
    """H_alpha(p) = sgn(alpha)/(1-alpha) * log sum_i p_i^alpha.

    Closed forms at alpha in {0, 1, +-inf}; Burg routed to
    :func:`burg_entropy`.  For alpha < 0 a zero entry gives -inf.
    """
    if isinstance(alpha, _Burg):
        return burg_entropy(p)
    alpha = float(alpha)
    logs = _log_nonzero(p)
    has_zero = logs.size < p.dim
    if alpha == 0.0:
        return math.log(logs.size)
    if alpha == 1.0:
        return float(-(np.exp(logs) * logs).sum())
    if alpha == math.inf:
        return float(-logs.max())
    if alpha == -math.inf:
        # sgn convention: lim_{a -> -inf} H_a(p) = log min_i p_i
        return -math.inf if has_zero else float(logs.min())
    if alpha < 0 and has_zero:
        return -math.inf
    # log sum p_i^alpha via log-sum-exp of alpha * log p_i
    terms = alpha * logs
    tmax = terms.max()
    log_sum = tmax + math.log(np.exp(terms - tmax).sum())
    return math.copysign(1.0, alpha) / (1.0 - alpha) * log_sum


def burg_entropy(p: Dist) -> float:
    """H_Burg(p) = (1/m) sum_i log p_i; -inf on any zero entry."""
    if not p.full_rank():
        return -math.inf
    return float(np.log(p.probs).sum() / p.dim)


def sgn_plus(alpha: float) -> float:
    """+1 on [0, +inf], -1 on [-inf, 0)."""
    return 1.0 if alpha >= 0 else -1.0


def renyi_divergence(p: Dist, q: Dist, alpha: Alpha) -> float:
    """S_alpha(p||q) with the sgn+ convention and the four limit orders."""
    if isinstance(alpha, _Burg):
        raise OutOfRange("Burg marker has no divergence counterpart")
    if p.dim != q.dim:
        raise DimensionMismatch(f"dims {p.dim} != {q.dim}")
    alpha = float(alpha)
    pp, qq = p.probs, q.probs
    if alpha == 0.0:
        mass = float(qq[pp > 0].sum())
        return math.inf if mass == 0 else -math.log(mass)
    if alpha == 1.0:
        sup = pp > 0
        if np.any(qq[sup] == 0):
            return math.inf
        return float((pp[sup] * (np.log(pp[sup]) - np.log(qq[sup]))).sum())
    if alpha == math.inf:
        sup = pp > 0
        if np.any(qq[sup] == 0):
            return math.inf
        return float(np.log(pp[sup] / qq[sup]).max())
    if alpha == -math.inf:
        return renyi_divergence(q, p, math.inf)
    # finite alpha not in {0, 1}: log sum p^alpha q^(1-alpha) in log domain
    if alpha > 0:
        sup = pp > 0
        if alpha > 1 and np.any(qq[sup] == 0):
            return math.inf
        inner = sup & (qq > 0) if alpha < 1 else sup
        if not np.any(inner):
            return math.inf  # orthogonal supports
        terms = alpha * np.log(pp[inner]) + (1.0 - alpha) * np.log(qq[inner])
    else:
        if np.any(pp == 0):
            return math.inf  # 0^alpha diverges for alpha < 0
        inner = qq > 0  # q_i^(1-alpha) with 1-alpha > 1 vanishes at q_i = 0
        terms = alpha * np.log(pp[inner]) + (1.0 - alpha) * np.log(qq[inner])
    tmax = terms.max()
    log_sum = tmax + math.log(np.exp(terms - tmax).sum())
    return sgn_plus(alpha) / (alpha - 1.0) * float(log_sum)


def free_energy_alpha(p: Dist, ctx: ThermalContext, alpha: Alpha) -> float:
    """F_alpha(p) = -kT log Z + kT S_alpha(p||gibbs), in energy units."""
    if p.dim != ctx.dim:
        raise DimensionMismatch(f"dims {p.dim} != {ctx.dim}")
    return ctx.kt * (-ctx.log_z + renyi_divergence(p, ctx.gibbs, alpha))


def delta_f_alpha_example(alpha: float, delta: float) -> float:
    """Closed-form alpha-free-energy difference of the qubit heating example.

    Returns DeltaF_alpha / kT for the transition gamma_A (x) e_W ->
    rho'_A (x) g_W with work-bit gap ``delta`` (in kT units); increasing in
    alpha.  alpha = 1 and alpha = inf are served by their limits.
    """
    if alpha == 1.0:
        return math.log(3.0) - 1.5 * math.log(2.0) - delta
    if alpha == math.inf:
        return math.log(1.5) - delta
    a = float(alpha)
    num = math.log(2.0 ** (1.0 - a) + 1.0) - a * math.log(2.0) + (a - 1.0) * math.log(3.0)
    return num / (a - 1.0) - delta


def mutual_information(j: BipartiteDist) -> float:
    """I(A:B) = S_1(joint || product of marginals); >= 0."""
    prod = tensor(j.marginal_a(), j.marginal_b())
    return renyi_divergence(j.flatten(), prod, 1.0)


def eta(x: float) -> float:
    """eta(x) = -x log x with eta(0) = 0, on [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise OutOfRange(f"eta argument {x} outside [0, 1]")
    if x == 0.0:
        return 0.0
    return -x * math.log(x)


def eta_bin(x: float) -> float:
    """Binary entropy eta(x) + eta(1-x)."""
    if not 0.0 <= x <= 1.0:
        raise OutOfRange(f"eta_bin argument {x} outside [0, 1]")
    return eta(x) + eta(1.0 - x)
