import math
from fractions import Fraction

import numpy as np
import pytest

from corrtherm import (
    Dist,
    ThermalContext,
    WithJoint,
    WorkBitSpec,
    gibbs_preserving_witness,
    majorizes,
    min_work_formation,
    mix,
    point_mass,
    thermal_lorenz,
    thermomajorizes,
    trace_distance,
    uniform,
)
from corrtherm.errors import (
    DimensionMismatch,
    InfeasibleAtUpperBound,
    NotThermomajorized,
)
from corrtherm.thermo import WorkDirection, beta_order

from conftest import random_dist, random_rational_dist


class TestLorenzCurve:
    def test_endpoints_and_concavity(self, rng):
        ctx = ThermalContext((0.0, 0.5, 1.3))
        for _ in range(10):
            p = random_dist(rng, 3)
            curve = thermal_lorenz(p, ctx)
            assert curve.elbows[0] == (0.0, 0.0)
            assert curve.elbows[-1] == pytest.approx((1.0, 1.0))
            slopes = np.diff(curve.ys) / np.diff(curve.xs)
            assert np.all(np.diff(slopes) <= 1e-9)

    def test_beta_order_sorts_ratios(self):
        ctx = ThermalContext.from_rational_weights([4, 2, 1])
        p = Dist([Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)])
        order = beta_order(p, ctx)
        ratios = p.probs[order] / ctx.gibbs.probs[order]
        assert np.all(np.diff(ratios) <= 1e-12)

    def test_gibbs_curve_is_diagonal(self):
        ctx = ThermalContext.from_rational_weights([3, 2, 1])
        curve = thermal_lorenz(ctx.gibbs, ctx)
        assert np.allclose(curve.xs, curve.ys)


class TestThermomajorizes:
    def test_everything_beats_gibbs(self, rng):
        ctx = ThermalContext((0.0, 0.7, 1.1))
        for _ in range(10):
            p = random_dist(rng, 3)
            assert thermomajorizes(p, ctx.gibbs, ctx)

    def test_top_level_point_mass_beats_everything(self, rng):
        # the maximal element concentrates on the smallest Gibbs weight
        ctx = ThermalContext((0.0, 0.7, 1.1))
        top = point_mass(2, 3)
        for _ in range(10):
            assert thermomajorizes(top, random_dist(rng, 3), ctx)

    def test_trivial_hamiltonian_reduces_to_majorization(self, rng):
        ctx = ThermalContext.trivial(4)
        for _ in range(50):
            p, q = random_dist(rng, 4), random_dist(rng, 4)
            assert thermomajorizes(p, q, ctx) == majorizes(p, q)

    def test_partial_thermalization_feasible(self, rng):
        ctx = ThermalContext.from_rational_weights([5, 3, 1])
        for _ in range(10):
            p = random_dist(rng, 3)
            q = mix(p, ctx.gibbs, 0.4)
            assert thermomajorizes(p, q, ctx)


class TestGibbsPreservingWitness:
    def test_exact_witness(self):
        ctx = ThermalContext.from_rational_weights([2, 1])
        p = Dist([Fraction(9, 10), Fraction(1, 10)])
        q = mix(p, ctx.gibbs, Fraction(1, 2))
        lam = gibbs_preserving_witness(p, q, ctx)
        assert lam.exact is not None
        assert lam.apply(p) == q
        assert lam.apply(ctx.gibbs) == ctx.gibbs

    def test_float_witness(self, rng):
        ctx = ThermalContext((0.0, 0.4, 0.9))
        p = random_dist(rng, 3)
        q = mix(p, ctx.gibbs, 0.5)
        lam = gibbs_preserving_witness(p, q, ctx)
        assert trace_distance(lam.apply(p), q) <= 1e-8
        assert trace_distance(lam.apply(ctx.gibbs), ctx.gibbs) <= 1e-8

    def test_raises_without_thermomajorization(self):
        ctx = ThermalContext.from_rational_weights([2, 1])
        with pytest.raises(NotThermomajorized):
            gibbs_preserving_witness(ctx.gibbs, point_mass(0, 2), ctx)


class TestWorkBit:
    def test_spend_direction_states(self):
        wb = WorkBitSpec(0.3)
        assert wb.direction is WorkDirection.SPEND_EXCITED_TO_GROUND
        assert wb.initial() == point_mass(1, 2)
        assert wb.final() == point_mass(0, 2)

    def test_negative_gap_rejected(self):
        with pytest.raises(DimensionMismatch):
            WorkBitSpec(-0.1)


class TestMinWorkFormation:
    def test_zero_when_already_feasible(self):
        ctx = ThermalContext.from_rational_weights([2, 1])
        p = point_mass(0, 2)
        assert min_work_formation(p, ctx.gibbs, ctx) == 0.0
        assert min_work_formation(p, p, ctx) == 0.0

    def test_thermalization_costs_nothing(self, rng):
        ctx = ThermalContext((0.0, 0.8))
        p = random_dist(rng, 2)
        q = mix(p, ctx.gibbs, 0.9)
        assert min_work_formation(p, q, ctx) == 0.0

    def test_bisection_tightness(self):
        # heating the thermal qubit to maximal mixing costs log(3/2)
        ctx = ThermalContext((0.0, math.log(2.0)), weights=(1, Fraction(1, 2)))
        gap = min_work_formation(ctx.gibbs, uniform(2), ctx)
        assert gap == pytest.approx(math.log(1.5), abs=2e-6)
        wb = WorkBitSpec(gap + 1e-5)
        full = ctx.compose(wb.context())
        from corrtherm import tensor

        assert thermomajorizes(
            tensor(ctx.gibbs, wb.initial()), tensor(uniform(2), wb.final()), full
        )

    def test_monotone_feasibility(self):
        # a larger gap never turns a feasible formation infeasible
        ctx = ThermalContext((0.0, math.log(2.0)), weights=(1, Fraction(1, 2)))
        from corrtherm import tensor

        def feasible(delta):
            wb = WorkBitSpec(delta)
            full = ctx.compose(wb.context())
            return thermomajorizes(
                tensor(ctx.gibbs, wb.initial()),
                tensor(uniform(2), wb.final()),
                full,
            )

        flags = [feasible(d) for d in np.linspace(0.0, 1.0, 21)]
        assert flags == sorted(flags)

    def test_infeasible_at_upper_bound(self):
        # heating to maximal mixing needs log(3/2), more than the ceiling
        ctx = ThermalContext((0.0, math.log(2.0)), weights=(1, Fraction(1, 2)))
        with pytest.raises(InfeasibleAtUpperBound):
            min_work_formation(ctx.gibbs, uniform(2), ctx, delta_hi=0.1)

    def test_joint_mode_cheaper(self):
        from corrtherm import BipartiteDist

        ctx = ThermalContext((0.0, math.log(2.0)), weights=(1, Fraction(1, 2)))
        sigma = Dist([Fraction(3, 10), Fraction(7, 10)])
        joint = BipartiteDist(
            [
                [Fraction(1, 10), Fraction(4, 10)],
                [Fraction(2, 10), Fraction(3, 10)],
            ]
        )
        plain = min_work_formation(ctx.gibbs, uniform(2), ctx)
        correlated = min_work_formation(
            ctx.gibbs, uniform(2), ctx, WithJoint(joint, sigma)
        )
        assert correlated < plain - 0.1
