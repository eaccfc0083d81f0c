import math
from fractions import Fraction

import pytest

from corrtherm import (
    FIG3_P,
    FIG3_PARAMS,
    FIG3_P_PRIME,
    Dist,
    balance_limit,
    figure3_data,
    figure3_limit,
    qubit_example_states,
    qubit_min_work_correlated,
    qubit_scenario,
    renyi_entropy,
    tensor_many,
    thermomajorizes,
    trace_distance,
)
from corrtherm.config import AlphaGrid
from corrtherm.errors import OutOfRange

SMALL_GRID = AlphaGrid(geo_points=20, lin_step=0.1, dip_step=0.1)


class TestQubitScenario:
    def test_constants_consistent(self):
        s = qubit_scenario()
        assert s.gamma_a.exact == (Fraction(2, 3), Fraction(1, 3))
        assert s.rho_am.marginal_b() == s.sigma_m
        assert s.rho_a_prime().exact == (Fraction(1, 2), Fraction(1, 2))
        assert s.ctx_a.energies == pytest.approx((0.0, math.log(2.0)))

    def test_example_states_ordering(self):
        p, q, ctx = qubit_example_states(0.3)
        s = qubit_scenario()
        assert p.dim == q.dim == ctx.dim == 8
        # initial: thermal qubit (x) machine (x) excited work bit
        from corrtherm import point_mass

        assert p == tensor_many(s.gamma_a, s.sigma_m, point_mass(1, 2))
        # final: correlated joint with the work bit dropped to the ground
        # state, zeros interleaved at the excited positions
        assert q.exact[0::2] == s.rho_am.flatten().exact
        assert all(v == 0 for v in q.exact[1::2])

    def test_negative_gap_rejected(self):
        with pytest.raises(OutOfRange):
            qubit_example_states(-0.1)

    def test_feasible_at_benchmark_gap(self):
        p, q, ctx = qubit_example_states(0.26)
        assert thermomajorizes(p, q, ctx)

    def test_minimal_correlated_work(self):
        gap = qubit_min_work_correlated(resolution=1e-6)
        assert 0.24 <= gap <= 0.27
        assert gap == pytest.approx(0.251314428533, abs=1e-5)


class TestFigure3:
    def test_constants(self):
        assert FIG3_P == Dist([Fraction(91, 100), Fraction(1, 20), Fraction(1, 25)])
        assert FIG3_P_PRIME == Dist(
            [Fraction(17, 20), Fraction(7, 50), Fraction(1, 100)]
        )
        assert FIG3_PARAMS.n == 10**15

    def test_curve_positive_everywhere(self):
        curve = figure3_data(SMALL_GRID)
        assert curve.positive()

    def test_limit_overlay(self):
        for a in (-2.0, 0.5, 2.0, 5.0):
            assert figure3_limit(a) == balance_limit(FIG3_P, 3, a)

    def test_caption_entropy_ordering(self):
        # the plain entropy conditions fail on part of (0, 1/3]; the
        # crossing sits just below 1/3, around alpha = 0.315
        assert renyi_entropy(FIG3_P, 0.25) > renyi_entropy(FIG3_P_PRIME, 0.25)
        # but the Shannon entropy strictly increases
        assert renyi_entropy(FIG3_P, 1.0) < renyi_entropy(FIG3_P_PRIME, 1.0)
