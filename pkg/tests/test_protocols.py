import math
from fractions import Fraction

import numpy as np
import pytest

from corrtherm import (
    BURG,
    BipartiteDist,
    Dist,
    EmbeddingSpec,
    SharpState,
    ThermalContext,
    WithJoint,
    embed,
    embedded_entropy,
    mix,
    point_mass,
    rational_gibbs_approx,
    rational_work_gap,
    renyi_entropy,
    run_main_result_1,
    run_work_extraction,
    run_work_formation,
    sharp_state,
    shrink_map,
    sink_balance,
    tensor,
    trace_distance,
    unembed,
    uniform,
)
from corrtherm.entropy import eta_bin, free_energy_alpha
from corrtherm.errors import (
    BadShape,
    CapExceeded,
    DimensionMismatch,
    FreeEnergyViolation,
    RankDeficient,
    SinkTooSmall,
)

from conftest import random_dist


class TestEmbedding:
    def test_gibbs_becomes_uniform(self):
        spec = EmbeddingSpec((3, 2, 1))
        assert embed(spec.gibbs_rational(), spec) == uniform(6)

    def test_round_trip(self):
        spec = EmbeddingSpec((2, 3))
        p = Dist([Fraction(1, 4), Fraction(3, 4)])
        assert unembed(embed(p, spec), spec) == p

    def test_matrices_agree_with_functions(self):
        spec = EmbeddingSpec((2, 1, 3))
        p = Dist([Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
        assert spec.embed_matrix().apply(p) == embed(p, spec)
        assert spec.unembed_matrix().apply(embed(p, spec)) == p

    def test_compose(self):
        a, b = EmbeddingSpec((2, 1)), EmbeddingSpec((1, 3))
        ab = a.compose(b)
        assert ab.d == (2, 6, 1, 3)
        assert ab.big_d == a.big_d * b.big_d

    def test_invalid_multiplicities(self):
        with pytest.raises(DimensionMismatch):
            EmbeddingSpec((0, 2))


class TestRationalGibbsApprox:
    def test_exact_rational_path(self):
        ctx = ThermalContext.from_rational_weights([3, 2, 1])
        spec = rational_gibbs_approx(ctx)
        assert spec.gibbs_rational() == ctx.gibbs
        assert spec.d == (3, 2, 1)

    def test_multiplicative_bound(self):
        ctx = ThermalContext((0.0, 0.37, 1.21))
        for delta in (1e-2, 1e-3):
            spec = rational_gibbs_approx(ctx, delta)
            g = spec.gibbs_rational().probs
            gamma = ctx.gibbs.probs
            assert float(np.max(1.0 - g / gamma)) < delta
            assert float(np.max(1.0 - gamma / g)) < delta

    def test_cap_exceeded(self):
        ctx = ThermalContext((0.0, 0.37))
        with pytest.raises(CapExceeded):
            rational_gibbs_approx(ctx, 1e-9, cap=100)


class TestEmbeddedEntropy:
    @pytest.mark.parametrize(
        "alpha", [0.0, 0.5, 1.0, 2.0, -1.5, math.inf, -math.inf, BURG]
    )
    def test_closed_form_matches_materialized(self, alpha):
        spec = EmbeddingSpec((3, 2, 2))
        p = Dist([Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)])
        assert embedded_entropy(p, spec, alpha) == pytest.approx(
            renyi_entropy(embed(p, spec), alpha), abs=1e-10
        )

    def test_huge_multiplicities_stay_finite(self):
        spec = EmbeddingSpec((10**12, 3 * 10**12))
        p = Dist([Fraction(1, 4), Fraction(3, 4)])
        assert embedded_entropy(p, spec, 1.0) == pytest.approx(
            math.log(4 * 10**12), abs=1e-9
        )


class TestShrinkMap:
    def test_maps_and_exact(self):
        r = Dist([Fraction(2, 3), Fraction(1, 3)])
        r_target = Dist([Fraction(7, 10), Fraction(3, 10)])
        phi = shrink_map(r, r_target)
        assert phi.exact is not None
        assert phi.apply(r) == r_target

    def test_small_displacement(self, rng):
        r = Dist([0.5, 0.3, 0.2])
        r_target = Dist([0.49, 0.31, 0.2])
        phi = shrink_map(r, r_target)
        for _ in range(10):
            x = random_dist(rng, 3)
            assert trace_distance(phi.apply(x), x) <= 0.05

    def test_needs_full_rank(self):
        with pytest.raises(RankDeficient):
            shrink_map(point_mass(0, 2), uniform(2))


class TestRationalWorkGap:
    def test_gap_in_interval_with_rational_weight(self):
        gap, frac = rational_work_gap(0.1, 0.5)
        assert 0.1 < gap < 0.5
        assert math.exp(-gap) == pytest.approx(float(frac), abs=1e-12)

    def test_prefer_low_vs_high(self):
        lo, _ = rational_work_gap(0.1, 0.5, prefer="low")
        hi, _ = rational_work_gap(0.1, 0.5, prefer="high")
        assert lo <= hi

    def test_minimal_denominator(self):
        # (log(3) - eps, log(3) + eps) forces the weight 1/3
        gap, frac = rational_work_gap(math.log(3.0) - 0.01, math.log(3.0) + 0.01)
        assert frac == Fraction(1, 3)

    def test_cap_exceeded(self):
        with pytest.raises(CapExceeded):
            rational_work_gap(0.5, 0.5 + 1e-12, cap=100)


class TestSink:
    def test_sharp_state_exact(self):
        s = sharp_state(SharpState(2, 5, Fraction(1, 10)))
        assert s.exact == (
            Fraction(9, 20),
            Fraction(9, 20),
            Fraction(1, 30),
            Fraction(1, 30),
            Fraction(1, 30),
        )

    def test_sink_balance_closed_forms(self):
        spec = SharpState(2, 8, Fraction(1, 20))
        df, df0 = sink_balance(spec)
        eps = 1 / 20
        assert df == pytest.approx(eta_bin(eps) + eps * math.log(6 / 2), abs=1e-12)
        assert df0 == pytest.approx(math.log(4.0), abs=1e-12)

    def test_bad_shapes(self):
        with pytest.raises(BadShape):
            SharpState(3, 2)
        with pytest.raises(BadShape):
            SharpState(2, 2, Fraction(1, 10))


class TestFormation:
    def test_exact_direct_run(self):
        ctx = ThermalContext.from_rational_weights([3, 2, 1])
        p = Dist([Fraction(7, 10), Fraction(1, 5), Fraction(1, 10)])
        q = mix(p, ctx.gibbs, Fraction(1, 2))
        report = run_main_result_1(p, q, ctx)
        assert report.feasible and not report.certificate_only
        assert report.gibbs_residual == 0.0
        assert report.marginal_m_exact
        assert report.output_error < 1 / 100
        assert [name for name, _ in report.pipeline] == [
            "shrink",
            "embed",
            "core",
            "unembed",
            "unshrink",
        ]

    def test_free_energy_violation(self):
        ctx = ThermalContext.from_rational_weights([2, 1])
        with pytest.raises(FreeEnergyViolation):
            run_main_result_1(ctx.gibbs, point_mass(0, 2), ctx)

    def test_thermalization_shortcut(self):
        ctx = ThermalContext.from_rational_weights([2, 1])
        p = Dist([Fraction(9, 10), Fraction(1, 10)])
        report = run_main_result_1(p, ctx.gibbs, ctx)
        assert report.feasible
        assert report.output_error == 0.0
        assert [name for name, _ in report.pipeline] == ["thermalize"]

    def test_joint_target_exact_machine_marginal(self):
        # heating a thermal qubit to maximal mixing against a correlated
        # machine, paying a work gap just above the correlated threshold
        ctx_a = ThermalContext((0.0, math.log(2.0)), weights=(1, Fraction(1, 2)))
        gap = math.log(Fraction(13, 10))
        ctx_w = ThermalContext((0.0, gap), weights=(1, Fraction(10, 13)))
        ctx = ctx_a.compose(ctx_w)
        p = tensor(ctx_a.gibbs, point_mass(1, 2))  # excited work bit
        sigma = Dist([Fraction(3, 10), Fraction(7, 10)])
        rho_am = [
            [Fraction(1, 10), Fraction(4, 10)],
            [Fraction(2, 10), Fraction(3, 10)],
        ]
        # target joint over (A, W) x M: work bit dropped to the ground state
        rows = []
        for a in range(2):
            rows.append(rho_am[a])
            rows.append([Fraction(0), Fraction(0)])
        joint = BipartiteDist(rows)
        report = run_main_result_1(
            p,
            joint.marginal_a(),
            ctx,
            eps=Fraction(1, 100),
            eps_corr=0.2,
            joint=WithJoint(joint, sigma),
        )
        assert report.feasible and not report.certificate_only
        assert report.marginal_m_exact
        assert report.gibbs_residual == 0.0
        assert report.output_error < 1 / 100
        assert report.mutual_info_am < 0.2

    def test_work_formation_pure_bit(self):
        ctx = ThermalContext((0.0, math.log(2.0)), weights=(1, Fraction(1, 2)))
        report = run_work_formation(
            ctx.gibbs, uniform(2), ctx, delta_gap=0.35, eps=Fraction(1, 50)
        )
        assert report.feasible and not report.certificate_only
        assert report.workbit_pure
        assert report.achieved_work >= math.log(1.5) - 1e-9
        assert report.output_error < 1 / 50
        assert report.marginal_m_exact

    def test_work_formation_certificate_fallback(self):
        # a gap budget too tight to realize with small witnesses degrades
        # to a certificate-level report carrying asymptotic evidence
        ctx = ThermalContext((0.0, math.log(2.0)), weights=(1, Fraction(1, 2)))
        report = run_work_formation(
            ctx.gibbs, uniform(2), ctx, delta_gap=0.05, eps=Fraction(1, 50)
        )
        assert report.certificate_only
        assert math.isnan(report.output_error)
        assert "certificate" in report.detail or "cap" in report.detail

    def test_report_json_round_trip(self):
        import json

        ctx = ThermalContext.from_rational_weights([2, 1])
        p = Dist([Fraction(9, 10), Fraction(1, 10)])
        report = run_main_result_1(p, mix(p, ctx.gibbs, Fraction(1, 2)), ctx)
        obj = json.loads(report.to_json())
        assert obj["feasible"] is True
        assert obj["stages"]


class TestExtraction:
    def setup_method(self):
        self.ctx = ThermalContext.from_rational_weights([2, 1])
        self.p = Dist([Fraction(9, 10), Fraction(1, 10)])
        self.q = self.ctx.gibbs

    def test_successful_run(self):
        report = run_work_extraction(
            self.p,
            self.q,
            self.ctx,
            delta_gap=0.2,
            eps=Fraction(1, 25),
            sink=SharpState(1, 4, Fraction(1, 100)),
        )
        assert report.feasible and not report.certificate_only
        assert report.workbit_pure
        assert report.marginal_m_exact
        gain = free_energy_alpha(self.p, self.ctx, 1.0) - free_energy_alpha(
            self.q, self.ctx, 1.0
        )
        assert 0 < report.achieved_work <= gain
        assert report.sink_error < 1e-12

    def test_direction_violation(self):
        with pytest.raises(FreeEnergyViolation):
            run_work_extraction(
                self.q,
                self.p,
                self.ctx,
                delta_gap=0.1,
                eps=Fraction(1, 25),
                sink=SharpState(1, 4, Fraction(1, 100)),
            )

    def test_sink_too_small_at_exact_threshold(self):
        # log(n/m) = log 2 exactly does not satisfy the strict inequality
        with pytest.raises(SinkTooSmall):
            run_work_extraction(
                self.p,
                self.q,
                self.ctx,
                delta_gap=0.2,
                eps=Fraction(1, 25),
                sink=SharpState(1, 2, Fraction(1, 100)),
            )
