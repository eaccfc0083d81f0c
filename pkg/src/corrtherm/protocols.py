"""End-to-end protocol pipelines.

Three executable protocols are assembled from explicit stochastic stages:
state formation with a correlating machine, performing work on a system via
a two-level work bit, and extracting work with the help of a max-entropy
sink.  The common skeleton is

    shrink -> embed -> bistochastic core -> unembed -> unshrink

where the shrink stage moves the Gibbs state onto a nearby rational one,
the embedding converts it to a uniform state (so thermomajorization becomes
plain majorization) and the bistochastic core is an explicit witness, found
either directly, through a catalyst, or through a correlating extension of
the target.  Every assembled pipeline fixes the thermal state, so it is a
valid thermal operation by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

import numpy as np

from .catalysis import (
    ExtensionWitness,
    construct_extension_witness,
    main_theorem_check,
)
from .config import (
    DEFAULT_TOL,
    MATERIALIZE_CAP,
    PIPELINE_DIM_CAP,
    RATIONAL_DENOMINATOR_CAP,
    WORKBIT_DENOMINATOR_CAP,
    Tolerances,
)
from .dist import BipartiteDist, Dist, mix, point_mass, tensor, tensor_many, trace_distance, uniform
from .entropy import (
    BURG,
    Alpha,
    ThermalContext,
    _Burg,
    eta_bin,
    free_energy_alpha,
    mutual_information,
    renyi_divergence,
    renyi_entropy,
    sgn_plus,
)
from .errors import (
    BadShape,
    BudgetExceeded,
    CapExceeded,
    DimensionMismatch,
    FreeEnergyViolation,
    RankDeficient,
    SinkTooSmall,
    TooLargeToMaterialize,
)
from .majorization import StochasticMatrix, bistochastic_witness, catalyst_search, majorizes
from .thermo import WithJoint, WorkBitSpec, thermomajorizes


@dataclass(frozen=True)
class EmbeddingSpec:
    """Level multiplicities d = (d_1, ..., d_n) with D = sum d_i.

    Expanding outcome i into d_i equiprobable sub-outcomes maps the rational
    Gibbs state (d_1/D, ..., d_n/D) onto the uniform distribution.
    """

    d: tuple[int, ...]

    def __post_init__(self):
        if not self.d or any(di < 1 for di in self.d):
            raise DimensionMismatch(f"multiplicities must be positive, got {self.d}")

    @property
    def big_d(self) -> int:
        return sum(self.d)

    def gibbs_rational(self) -> Dist:
        return Dist([Fraction(di, self.big_d) for di in self.d])

    def compose(self, other: "EmbeddingSpec") -> "EmbeddingSpec":
        """Spec of the product system, self outer."""
        return EmbeddingSpec(tuple(a * b for a in self.d for b in other.d))

    def embed_matrix(self) -> StochasticMatrix:
        cols = len(self.d)
        rows = []
        for j, dj in enumerate(self.d):
            for _ in range(dj):
                row = [Fraction(0)] * cols
                row[j] = Fraction(1, dj)
                rows.append(row)
        return StochasticMatrix(rows)

    def unembed_matrix(self) -> StochasticMatrix:
        rows = []
        for j, dj in enumerate(self.d):
            row = []
            for k, dk in enumerate(self.d):
                row.extend([Fraction(int(k == j))] * dk)
            rows.append(row)
        return StochasticMatrix(rows)


def rational_gibbs_approx(
    ctx: ThermalContext,
    delta_approx: float = 1e-3,
    *,
    cap: int = RATIONAL_DENOMINATOR_CAP,
) -> EmbeddingSpec:
    """Multiplicities whose rational Gibbs state is delta-close to ctx's.

    Closeness is in the multiplicative sense: both max_j(1 - g_j/gamma_j)
    and max_j(1 - gamma_j/g_j) stay below ``delta_approx``.  Exact when the
    Gibbs state is already rational with a small enough denominator; else
    the smallest common denominator D <= cap is found by sweeping.
    """
    if not 0 < delta_approx < 1:
        raise DimensionMismatch(f"delta_approx {delta_approx} outside (0, 1)")
    g = ctx.gibbs
    if g.exact is not None:
        denom = math.lcm(*(v.denominator for v in g.exact))
        if denom <= cap:
            return EmbeddingSpec(tuple(int(v * denom) for v in g.exact))
    gamma = g.probs
    m = g.dim
    for big_d in range(m, cap + 1):
        raw = gamma * big_d
        d = np.floor(raw).astype(int)
        d = np.maximum(d, 1)
        short = big_d - int(d.sum())
        if short < 0:
            continue
        if short > 0:
            # hand the leftover units to the largest fractional parts
            order = np.argsort(-(raw - np.floor(raw)))
            for k in order[:short]:
                d[k] += 1
        approx = d / big_d
        bound = max(float(np.max(1.0 - approx / gamma)), float(np.max(1.0 - gamma / approx)))
        if bound < delta_approx:
            return EmbeddingSpec(tuple(int(v) for v in d))
    raise CapExceeded(f"no denominator <= {cap} achieves {delta_approx}")


def embed(p: Dist, spec: EmbeddingSpec) -> Dist:
    """Expand outcome i into d_i copies of p_i/d_i."""
    if p.dim != len(spec.d):
        raise DimensionMismatch(f"dims {p.dim} != {len(spec.d)}")
    if spec.big_d > MATERIALIZE_CAP:
        raise TooLargeToMaterialize(f"embedded dimension {spec.big_d}")
    if p.exact is not None:
        vals = []
        for pi, di in zip(p.exact, spec.d):
            vals.extend([pi / di] * di)
        return Dist(vals)
    vals = []
    for pi, di in zip(p.probs.tolist(), spec.d):
        vals.extend([pi / di] * di)
    return Dist(vals)


def unembed(x: Dist, spec: EmbeddingSpec) -> Dist:
    """Block sums; exact left inverse of :func:`embed`."""
    if x.dim != spec.big_d:
        raise DimensionMismatch(f"dims {x.dim} != {spec.big_d}")
    out = []
    pos = 0
    if x.exact is not None:
        for di in spec.d:
            out.append(sum(x.exact[pos : pos + di]))
            pos += di
    else:
        for di in spec.d:
            out.append(float(x.probs[pos : pos + di].sum()))
            pos += di
    return Dist(out)


def embedded_entropy(p: Dist, spec: EmbeddingSpec, alpha: Alpha) -> float:
    """H_alpha of the embedding, by closed form.

    sgn+(alpha) log D - S_alpha(p || rational Gibbs); never materializes,
    so D may exceed any cap.  The Burg order averages log(p_i/d_i) with
    weight d_i/D.
    """
    if p.dim != len(spec.d):
        raise DimensionMismatch(f"dims {p.dim} != {len(spec.d)}")
    big_d = spec.big_d
    if isinstance(alpha, _Burg):
        if not p.full_rank():
            return -math.inf
        return (
            sum(di * (math.log(pi) - math.log(di)) for pi, di in zip(p.probs.tolist(), spec.d))
            / big_d
        )
    return sgn_plus(float(alpha)) * math.log(big_d) - renyi_divergence(
        p, spec.gibbs_rational(), alpha
    )


def shrink_map(r: Dist, r_target: Dist) -> StochasticMatrix:
    """Stochastic map with Phi(r) = r_target and small displacement.

    Phi(x) = lam x + (r_target - lam r) with lam = min_j r_target_j / r_j;
    every state moves by at most 1 - lam in trace norm.
    """
    if r.dim != r_target.dim:
        raise DimensionMismatch(f"dims {r.dim} != {r_target.dim}")
    if not r.full_rank() or not r_target.full_rank():
        raise RankDeficient("shrink map needs full-rank states")
    d = r.dim
    if r.exact is not None and r_target.exact is not None:
        lam = min(rt / rr for rt, rr in zip(r_target.exact, r.exact))
        shift = [rt - lam * rr for rt, rr in zip(r_target.exact, r.exact)]
        rows = [
            [shift[i] + (lam if i == j else Fraction(0)) for j in range(d)]
            for i in range(d)
        ]
        return StochasticMatrix(rows)
    lam = float(np.min(r_target.probs / r.probs))
    shift = r_target.probs - lam * r.probs
    mat = np.tile(shift[:, None], (1, d)) + lam * np.eye(d)
    return StochasticMatrix(mat.tolist())


def rational_work_gap(
    lo: float,
    hi: float,
    beta: float = 1.0,
    *,
    prefer: str = "low",
    cap: int = WORKBIT_DENOMINATOR_CAP,
) -> tuple[float, Fraction]:
    """Gap Delta in (lo, hi) with exp(-beta Delta) = a/b rational, b minimal.

    ``prefer`` breaks ties within the winning denominator: "low" picks the
    smallest Delta in the interval, "high" the largest.  Returns (Delta,
    a/b).
    """
    if not 0 <= lo < hi:
        raise DimensionMismatch(f"need 0 <= lo < hi, got ({lo}, {hi})")
    x_lo = math.exp(-beta * hi)
    x_hi = math.exp(-beta * lo)
    for b in range(1, cap + 1):
        a_min = math.floor(x_lo * b) + 1
        a_max = math.ceil(x_hi * b) - 1
        a_min = max(a_min, 1)
        a_max = min(a_max, b if x_hi < 1.0 else b - 1)
        if a_min > a_max:
            continue
        a = a_max if prefer == "low" else a_min
        frac = Fraction(a, b)
        if x_lo < frac < x_hi:
            return -math.log(frac) / beta, frac
    raise CapExceeded(f"no rational gap with denominator <= {cap} in ({lo}, {hi})")


def _workbit_context(gap: float, weight: Fraction, beta: float) -> ThermalContext:
    """Two-level context (0, gap) with exact Boltzmann weight exp(-beta gap)."""
    return ThermalContext((0.0, gap), beta, weights=(Fraction(1), weight))


@dataclass(frozen=True)
class SharpState:
    """Uniform-on-m-of-n sink state, optionally smeared by eps_smear."""

    m: int
    n: int
    eps_smear: object = 0

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise BadShape(f"need 1 <= m <= n, got ({self.m}, {self.n})")
        if not 0 <= self.eps_smear < 1:
            raise BadShape(f"eps_smear {self.eps_smear} outside [0, 1)")
        if self.eps_smear > 0 and self.m == self.n:
            raise BadShape("smearing needs n > m")


def sharp_state(spec: SharpState) -> Dist:
    """((1-eps)/m x m, eps/(n-m) x (n-m)); exact for rational eps_smear."""
    m, n, eps = spec.m, spec.n, spec.eps_smear
    if isinstance(eps, Rational):
        eps = Fraction(eps)
        head = (1 - eps) / m
        tail = eps / (n - m) if n > m else Fraction(0)
    else:
        head = (1.0 - eps) / m
        tail = eps / (n - m) if n > m else 0.0
    return Dist([head] * m + [tail] * (n - m))


def sink_balance(spec: SharpState, beta: float = 1.0) -> tuple[float, float]:
    """Free-energy drop (Delta F, Delta F_0) of smearing the sharp state.

    Delta F = (eta(eps) + eta(1-eps) + eps log((n-m)/m)) / beta vanishes as
    eps -> 0 while Delta F_0 = log(n/m) / beta stays put; the sink trades an
    arbitrarily small amount of free energy for a fixed amount of rank.
    """
    m, n, eps = spec.m, spec.n, float(spec.eps_smear)
    df0 = math.log(n / m) / beta
    if eps == 0.0:
        return 0.0, df0
    df = (eta_bin(eps) + eps * math.log((n - m) / m)) / beta
    return df, df0


@dataclass(frozen=True)
class ProtocolReport:
    """Outcome of a protocol run, with the assembled stages when available."""

    feasible: bool
    achieved_work: float
    output_error: float
    marginal_m_exact: bool
    workbit_pure: bool
    mutual_info_am: float
    pipeline: tuple[tuple[str, StochasticMatrix], ...] = ()
    certificate_only: bool = False
    gibbs_residual: float = math.nan
    sink_error: float = 0.0
    detail: str = ""

    def to_json(self) -> str:
        obj = {
            "feasible": self.feasible,
            "achieved_work": self.achieved_work,
            "output_error": self.output_error,
            "marginal_m_exact": self.marginal_m_exact,
            "workbit_pure": self.workbit_pure,
            "mutual_info_am": self.mutual_info_am,
            "certificate_only": self.certificate_only,
            "gibbs_residual": None if math.isnan(self.gibbs_residual) else self.gibbs_residual,
            "sink_error": self.sink_error,
            "stages": [
                {"name": name, "dims": list(mat.dims)} for name, mat in self.pipeline
            ],
            "detail": self.detail,
        }
        return json.dumps(obj)


def _identity_kron(mat: StochasticMatrix, k: int) -> StochasticMatrix:
    """mat (x) I_k, acting on the outer system of a composite."""
    if k == 1:
        return mat
    r, c = mat.dims
    if mat.exact is not None:
        zero = Fraction(0)
        rows = [[zero] * (c * k) for _ in range(r * k)]
        for i in range(r):
            for j in range(c):
                v = mat.exact[i][j]
                if v:
                    for s in range(k):
                        rows[i * k + s][j * k + s] = v
        return StochasticMatrix(rows)
    return StochasticMatrix(np.kron(mat.entries, np.eye(k)).tolist())


def _marginal(p: Dist, dims: Sequence[int], keep: Sequence[int]) -> Dist:
    """Marginal on the ``keep`` axes of a flat state over product dims."""
    keep = tuple(keep)
    if p.exact is not None:
        shape = tuple(dims)
        out_shape = tuple(shape[a] for a in keep)
        out = {}
        for flat, v in enumerate(p.exact):
            idx = []
            rem = flat
            for d in reversed(shape):
                idx.append(rem % d)
                rem //= d
            idx = tuple(reversed(idx))
            key = tuple(idx[a] for a in keep)
            out[key] = out.get(key, Fraction(0)) + v
        vals = []
        for flat in range(int(np.prod(out_shape))):
            idx = []
            rem = flat
            for d in reversed(out_shape):
                idx.append(rem % d)
                rem //= d
            vals.append(out.get(tuple(reversed(idx)), Fraction(0)))
        return Dist(vals)
    arr = p.probs.reshape(tuple(dims))
    drop = tuple(a for a in range(len(dims)) if a not in keep)
    return Dist(arr.sum(axis=drop).ravel().tolist())


@dataclass(frozen=True)
class _CoreStrategy:
    """How the bistochastic core was realized."""

    name: str
    machine: Dist  # machine state appended at the inner end of the ordering
    target: Dist  # exact image of the embedded source under the core


def _find_core(
    source: Dist,
    target: Dist,
    eps_corr: float,
    *,
    tol: Tolerances,
    allow_extension: bool = True,
) -> Optional[_CoreStrategy]:
    """Realize source (x) machine > target (x) machine by growing the machine."""
    if majorizes(source, target, tol=tol):
        return _CoreStrategy("direct", Dist([1]), target)
    c = catalyst_search(source, target, tol=tol)
    if c is not None:
        return _CoreStrategy("catalyst", c, tensor(target, c))
    if not allow_extension:
        return None
    witness = construct_extension_witness(source, target, eps_corr, tol=tol)
    if witness is None:
        return None
    machine = witness.machine_state()
    new_target = tensor(witness.extension.flatten(), witness.catalyst)
    return _CoreStrategy("extension", machine, new_target)


def _certificate_evidence(source: Dist, target: Dist, eps_corr: float) -> str:
    """Asymptotic extension parameters as textual evidence for a certificate."""
    try:
        cert = main_theorem_check(source, target, eps_corr)
    except Exception:
        return ""
    if not cert.feasible or cert.params is None:
        return f"; embedded check: {cert.reason}"
    return (
        f"; extension certificate: delta={float(cert.params.delta):.3e},"
        f" n={cert.params.n}, min balance={cert.min_balance:.3e},"
        f" mutual information={cert.mutual_information:.3e}"
    )


@dataclass(frozen=True)
class _RunOutcome:
    stages: tuple[tuple[str, StochasticMatrix], ...]
    out: Dist
    dims: tuple[int, int, int, int]  # (A, W, S, machine)
    machine: Dist
    gibbs_residual: float
    strategy: str


def _run_pipeline(
    p_a: Dist,
    ctx_a: ThermalContext,
    target_head: Dist,
    *,
    eps: float,
    eps_corr: float,
    w_initial: Optional[Dist] = None,
    w_final: Optional[Dist] = None,
    w_ctx: Optional[ThermalContext] = None,
    w_spec: Optional[EmbeddingSpec] = None,
    tail_init: Optional[Dist] = None,
    tail_final: Optional[Dist] = None,
    machine: Optional[Dist] = None,
    target_joint_flat: Optional[Dist] = None,
    dim_cap: int = PIPELINE_DIM_CAP,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[Optional[_RunOutcome], str]:
    """Assemble and execute the five-stage pipeline.

    Returns (outcome, detail); outcome is None when the instance cannot be
    materialized under ``dim_cap``, with the reason and any asymptotic
    evidence in ``detail``.

    Ordering of systems is A (x) W (x) S (x) machine throughout; A and W are
    embedded jointly, S keeps a trivial Hamiltonian and the machine grows as
    the core strategy requires.  ``target_head`` is the desired exact image
    on (A, W); with ``target_joint_flat`` the target is instead a correlated
    state over (A, W, machine), flattened with the machine innermost.
    """
    gamma_a = ctx_a.gibbs
    spec_a = rational_gibbs_approx(ctx_a, float(eps) / 4)
    gamma_rat = spec_a.gibbs_rational()
    if gamma_a.exact is not None and gamma_a.exact == gamma_rat.exact:
        phi = StochasticMatrix.identity(ctx_a.dim)
        phibar = phi
    else:
        phi = shrink_map(gamma_a, gamma_rat)
        phibar = shrink_map(gamma_rat, gamma_a)

    d_w = w_initial.dim if w_initial is not None else 1
    spec = spec_a.compose(w_spec) if w_spec is not None else spec_a
    big_d = spec.big_d
    d_s = tail_init.dim if tail_init is not None else 1
    sigma = machine if machine is not None else Dist([1])
    if big_d * d_s * sigma.dim > dim_cap:
        return None, f"embedded dimension {big_d * d_s * sigma.dim} exceeds cap {dim_cap}"

    p_shrunk = phi.apply(p_a)
    head0 = tensor(p_shrunk, w_initial) if w_initial is not None else p_shrunk
    x = embed(head0, spec)

    if target_joint_flat is not None:
        embed_m = _identity_kron(spec.embed_matrix(), sigma.dim)
        y = embed_m.apply(target_joint_flat)
        source = tensor(x, sigma)
        core = _find_core(source, y, eps_corr, tol=tol, allow_extension=False)
        if core is None:
            return None, "no bistochastic core found for the prescribed joint target"
        extra = core.machine
        source = tensor(source, extra)
        sigma = tensor(sigma, extra) if extra.dim > 1 else sigma
        target = core.target
    else:
        y_head = embed(target_head, spec)
        base_target = tensor(y_head, tail_final) if tail_final is not None else y_head
        base_source = tensor(x, tail_init) if tail_init is not None else x
        core = _find_core(base_source, base_target, eps_corr, tol=tol)
        if core is None:
            return None, (
                "no materializable core found"
                + _certificate_evidence(base_source, base_target, eps_corr)
            )
        sigma = core.machine
        source = tensor(base_source, sigma) if sigma.dim > 1 else base_source
        target = core.target
    if source.dim > dim_cap:
        return None, f"core dimension {source.dim} exceeds cap {dim_cap}"

    lam = bistochastic_witness(source, target, tol=tol)
    inner = d_w * d_s * sigma.dim
    stages = (
        ("shrink", _identity_kron(phi, inner)),
        ("embed", _identity_kron(spec.embed_matrix(), d_s * sigma.dim)),
        ("core", lam),
        ("unembed", _identity_kron(spec.unembed_matrix(), d_s * sigma.dim)),
        ("unshrink", _identity_kron(phibar, inner)),
    )

    pieces = [p_a]
    gamma_pieces = [gamma_a]
    if w_initial is not None:
        pieces.append(w_initial)
        gamma_pieces.append(w_ctx.gibbs)
    if tail_init is not None:
        pieces.append(tail_init)
        gamma_pieces.append(uniform(d_s))
    if sigma.dim > 1:
        pieces.append(sigma)
        gamma_pieces.append(uniform(sigma.dim))
    state = tensor_many(*pieces)
    gamma_full = tensor_many(*gamma_pieces)
    gamma_out = gamma_full
    for _, mat in stages:
        state = mat.apply(state)
        gamma_out = mat.apply(gamma_out)
    residual = trace_distance(gamma_out, gamma_full)
    return (
        _RunOutcome(
            stages, state, (ctx_a.dim, d_w, d_s, sigma.dim), sigma, residual, core.name
        ),
        "",
    )


def _basis_purity(w: Dist, index: int) -> bool:
    target = [1.0 if i == index else 0.0 for i in range(w.dim)]
    return bool(np.all(np.abs(w.probs - np.asarray(target)) <= 1e-12))


def _report_from_run(
    run: _RunOutcome,
    q_target: Dist,
    *,
    achieved_work: float,
    w_pure_index: Optional[int],
    tail_final: Optional[Dist],
    eps: float,
) -> ProtocolReport:
    d_a, d_w, d_s, d_m = run.dims
    dims = (d_a, d_w, d_s, d_m)
    out_a = _marginal(run.out, dims, (0,))
    out_m = _marginal(run.out, dims, (3,))
    joint_am = _marginal(run.out, dims, (0, 3))
    rows = joint_am.probs.reshape(d_a, d_m).tolist()
    mi = mutual_information(BipartiteDist(rows)) if d_m > 1 else 0.0
    m_exact = (
        out_m.exact is not None
        and run.machine.exact is not None
        and out_m.exact == run.machine.exact
    ) or trace_distance(out_m, run.machine) <= 1e-12
    workbit_pure = True
    if d_w > 1 and w_pure_index is not None:
        workbit_pure = _basis_purity(_marginal(run.out, dims, (1,)), w_pure_index)
    sink_error = 0.0
    if tail_final is not None:
        sink_error = trace_distance(_marginal(run.out, dims, (2,)), tail_final)
    return ProtocolReport(
        feasible=True,
        achieved_work=achieved_work,
        output_error=trace_distance(out_a, q_target),
        marginal_m_exact=m_exact,
        workbit_pure=workbit_pure,
        mutual_info_am=mi,
        pipeline=run.stages,
        gibbs_residual=run.gibbs_residual,
        sink_error=sink_error,
        detail=f"core strategy: {run.strategy}",
    )


def _certificate_report(achieved_work: float, detail: str) -> ProtocolReport:
    return ProtocolReport(
        feasible=True,
        achieved_work=achieved_work,
        output_error=math.nan,
        marginal_m_exact=False,
        workbit_pure=True,
        mutual_info_am=math.nan,
        certificate_only=True,
        detail=detail,
    )


def _mix_eps(q: Dist, gamma: Dist, eps) -> Dist:
    lam = Fraction(eps) / 2 if isinstance(eps, Rational) else float(eps) / 2
    return mix(q, gamma, lam)


def run_main_result_1(
    p: Dist,
    q: Dist,
    ctx: ThermalContext,
    eps=Fraction(1, 100),
    eps_corr: float = 1e-3,
    *,
    joint: Optional[WithJoint] = None,
    dim_cap: int = PIPELINE_DIM_CAP,
    tol: Tolerances = DEFAULT_TOL,
) -> ProtocolReport:
    """Formation p -> q via a thermal operation and a correlating machine.

    Feasible exactly when F(p) >= F(q); the output reaches q up to eps in
    trace distance while the machine marginal is exactly restored and the
    machine correlations stay below eps_corr.  With ``joint`` the target is
    a prescribed correlated state of system and machine instead.  Degrades
    to a certificate-level report when the instance cannot be materialized
    under ``dim_cap``.
    """
    if joint is not None:
        q = joint.q_am.marginal_a()
    if free_energy_alpha(p, ctx, 1.0) < free_energy_alpha(q, ctx, 1.0) - 1e-12:
        raise FreeEnergyViolation("formation needs F(p) >= F(q)")
    gamma = ctx.gibbs
    if joint is None and trace_distance(q, gamma) <= tol.tau_norm:
        # thermalization: replace the state by the Gibbs state outright
        cols = gamma.exact if gamma.exact is not None else gamma.probs.tolist()
        therm = StochasticMatrix([[v] * ctx.dim for v in cols])
        return ProtocolReport(
            feasible=True,
            achieved_work=0.0,
            output_error=trace_distance(therm.apply(p), q),
            marginal_m_exact=True,
            workbit_pure=True,
            mutual_info_am=0.0,
            pipeline=(("thermalize", therm),),
            gibbs_residual=trace_distance(therm.apply(gamma), gamma),
            detail="core strategy: thermalize",
        )
    if joint is not None:
        sigma = joint.sigma_m
        if trace_distance(joint.q_am.marginal_b(), sigma) > tol.tau_norm:
            raise DimensionMismatch("joint marginal on machine does not match sigma")
        lam = Fraction(eps) / 2 if isinstance(eps, Rational) else float(eps) / 2
        prod = tensor(gamma, sigma)
        mixed = mix(joint.q_am.flatten(), prod, lam)
        run, detail = _run_pipeline(
            p,
            ctx,
            q,
            eps=eps,
            eps_corr=eps_corr,
            machine=sigma,
            target_joint_flat=mixed,
            dim_cap=dim_cap,
            tol=tol,
        )
    else:
        q_mixed = _mix_eps(q, gamma, eps)
        run, detail = _run_pipeline(
            p, ctx, q_mixed, eps=eps, eps_corr=eps_corr, dim_cap=dim_cap, tol=tol
        )
    if run is None:
        return _certificate_report(0.0, f"free-energy condition holds; {detail}")
    return _report_from_run(
        run, q, achieved_work=0.0, w_pure_index=None, tail_final=None, eps=eps
    )


def run_work_formation(
    p: Dist,
    q: Dist,
    ctx: ThermalContext,
    delta_gap: float = 0.1,
    eps=Fraction(1, 100),
    *,
    eps_corr: float = 1e-3,
    dim_cap: int = PIPELINE_DIM_CAP,
    tol: Tolerances = DEFAULT_TOL,
) -> ProtocolReport:
    """Perform work on the system: p (x) excited -> approx q (x) ground.

    Picks the cheapest gap Delta in (F(q) - F(p), F(q) - F(p) + delta_gap)
    with rational Boltzmann weight, so that the work bit embeds exactly and
    ends in an exactly pure ground state.  achieved_work is the spent Delta.
    """
    f_p = free_energy_alpha(p, ctx, 1.0)
    f_q = free_energy_alpha(q, ctx, 1.0)
    if f_p > f_q + 1e-12:
        raise FreeEnergyViolation("performing work needs F(p) <= F(q)")
    lo = max(f_q - f_p, 0.0)
    gap, weight = rational_work_gap(lo, lo + delta_gap, ctx.beta, prefer="low")
    wb = WorkBitSpec(gap)
    w_ctx = _workbit_context(gap, weight, ctx.beta)
    w_spec = EmbeddingSpec((weight.denominator, weight.numerator))
    q_mixed = _mix_eps(q, ctx.gibbs, eps)
    run, detail = _run_pipeline(
        p,
        ctx,
        tensor(q_mixed, wb.final()),
        eps=eps,
        eps_corr=eps_corr,
        w_initial=wb.initial(),
        w_final=wb.final(),
        w_ctx=w_ctx,
        w_spec=w_spec,
        dim_cap=dim_cap,
        tol=tol,
    )
    if run is None:
        return _certificate_report(gap, f"free-energy condition holds; {detail}")
    return _report_from_run(
        run, q, achieved_work=gap, w_pure_index=0, tail_final=None, eps=eps
    )


def run_work_extraction(
    p: Dist,
    q: Dist,
    ctx: ThermalContext,
    delta_gap: float,
    eps,
    sink: SharpState,
    *,
    eps_corr: float = 1e-3,
    dim_cap: int = PIPELINE_DIM_CAP,
    tol: Tolerances = DEFAULT_TOL,
) -> ProtocolReport:
    """Extract work: p (x) ground (x) sharp sink -> q (x) excited (x) smeared.

    The gap lands just below F(p) - F(q); the max-entropy sink must satisfy
    log(n/m) > max(log 2, S_0(q||gamma) + beta (F(p) - F(q))) strictly, it
    absorbs the rank the work bit cannot.  achieved_work is the gained gap.
    """
    f_p = free_energy_alpha(p, ctx, 1.0)
    f_q = free_energy_alpha(q, ctx, 1.0)
    if f_p <= f_q:
        raise FreeEnergyViolation("extraction needs F(p) > F(q)")
    gain = f_p - f_q
    threshold = max(
        math.log(2.0), renyi_divergence(q, ctx.gibbs, 0.0) + ctx.beta * gain
    )
    if not math.log(sink.n / sink.m) > threshold:
        raise SinkTooSmall(
            f"log(n/m) = {math.log(sink.n / sink.m)} must exceed {threshold}"
        )
    lo = max(gain - delta_gap, 0.0)
    gap, weight = rational_work_gap(lo, gain, ctx.beta, prefer="high")
    wb = WorkBitSpec(gap)
    w_ctx = _workbit_context(gap, weight, ctx.beta)
    w_spec = EmbeddingSpec((weight.denominator, weight.numerator))
    tail_init = sharp_state(SharpState(sink.m, sink.n, 0))
    tail_final = sharp_state(sink)
    # ground -> excited: initial at index 0, final at index 1
    w_initial = point_mass(0, 2)
    w_final = point_mass(1, 2)
    run, detail = _run_pipeline(
        p,
        ctx,
        tensor(q, w_final),
        eps=eps,
        eps_corr=eps_corr,
        w_initial=w_initial,
        w_final=w_final,
        w_ctx=w_ctx,
        w_spec=w_spec,
        tail_init=tail_init,
        tail_final=tail_final,
        dim_cap=dim_cap,
        tol=tol,
    )
    if run is None:
        return _certificate_report(
            gap, f"free-energy and sink conditions hold; {detail}"
        )
    return _report_from_run(
        run, q, achieved_work=gap, w_pure_index=1, tail_final=tail_final, eps=eps
    )
