import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vagueconv.errors import ContractViolation
from vagueconv.measure import SignedMeasure, cdf
from vagueconv.stepfn import (
    StepFunction,
    eval_at,
    format_scalar,
    level_excess,
    linear_combine,
    normalize_to_W,
    parse_scalar,
    total_variation_on,
)

from oracles import excess_by_midpoints
from randoms import fractions, steps, steps_in_W

box = StepFunction.indicator(0, 1)


class TestScalar:
    @pytest.mark.parametrize("text, value", [("3/6", F(1, 2)), ("-4", F(-4)), (" 7 / 2 ", F(7, 2))])
    def test_parse(self, text, value):
        assert parse_scalar(text) == value

    @pytest.mark.parametrize("text", ["1/0", "0.5", "abc", "", "1/-2"])
    def test_parse_rejects(self, text):
        with pytest.raises(ContractViolation):
            parse_scalar(text)

    def test_format_reduced(self):
        assert format_scalar(F(6, 4)) == "3/2"
        assert format_scalar(F(4, 2)) == "2"

    def test_floats_rejected(self):
        with pytest.raises(ContractViolation):
            StepFunction.constant(0.5)


class TestConstruction:
    def test_canonical_merges_equal_neighbours(self):
        f = StepFunction((F(0), F(1), F(2)), (F(0), F(1), F(1), F(0)))
        assert f.breakpoints == (0, 2)

    def test_rejects_unsorted(self):
        with pytest.raises(ContractViolation):
            StepFunction((F(1), F(0)), (F(0), F(1), F(0)))

    def test_rejects_value_count(self):
        with pytest.raises(ContractViolation):
            StepFunction((F(0),), (F(0),))

    def test_union_of_abutting_intervals(self):
        f = StepFunction.indicator_of_union([(0, 1), (1, 2)])
        assert f == StepFunction.indicator(0, 2)

    def test_json_round_trip(self):
        f = StepFunction((F(-1, 3), F(2)), (F(0), F(5, 7), F(-2)))
        assert f.to_json() == {"breakpoints": ["-1/3", "2"], "values": ["0", "5/7", "-2"]}
        assert StepFunction.from_json(f.to_json()) == f


class TestEval:
    def test_right_continuity(self):
        assert eval_at(box, 0) == 1
        assert eval_at(box, 1) == 0

    def test_escape_cdf(self):
        f = cdf(SignedMeasure.dirac(-1))
        assert f(-2) == 0
        assert f(-1) == 1


class TestLinearCombine:
    def test_self_difference(self):
        assert linear_combine(1, box, -1, box) == StepFunction.zero()
        assert linear_combine(1, box, -1, box).breakpoints == ()

    def test_overlapping_boxes(self):
        got = linear_combine(1, StepFunction.indicator(0, 2), -1, StepFunction.indicator(1, 3))
        expected = StepFunction.indicator(0, 1) - StepFunction.indicator(2, 3)
        assert got == expected
        # piecewise on the four intervals
        for x, v in [(F(-1), 0), (F(1, 2), 1), (F(3, 2), 0), (F(5, 2), -1), (F(4), 0)]:
            assert got(x) == v

    def test_zero_combination(self):
        assert linear_combine(3, StepFunction.zero(), 5, StepFunction.zero()) == StepFunction.zero()

    @settings(max_examples=60)
    @given(steps(), steps(), st.fractions(-4, 4, max_denominator=5), st.fractions(-4, 4, max_denominator=5))
    def test_pointwise_linearity(self, f, g, a, b):
        h = linear_combine(a, f, b, g)
        assert set(h.breakpoints) <= set(f.breakpoints) | set(g.breakpoints)
        rng = random.Random(hash((f, g)) & 0xFFFF)
        probes = list(f.breakpoints) + list(g.breakpoints)
        probes += [F(rng.randint(-900, 900), rng.randint(1, 97)) for _ in range(1000)]
        for x in probes:
            assert h(x) == a * f(x) + b * g(x)


class TestTotalVariation:
    def test_box(self):
        assert total_variation_on(box, -2, 2) == 2
        assert total_variation_on(box, 2, 3) == 0

    def test_dipole(self):
        f = StepFunction.indicator(0, F(1, 3), 9)
        assert total_variation_on(f, -1, 1) == 18

    def test_endpoint_convention(self):
        # jump at a excluded, jump at b included
        assert total_variation_on(box, 0, 1) == 1
        assert total_variation_on(box, -1, 0) == 1

    def test_reversed_interval(self):
        with pytest.raises(ContractViolation):
            total_variation_on(box, 1, 0)

    @given(steps(), fractions, fractions, fractions)
    def test_additive(self, f, x, y, z):
        a, b, c = sorted((x, y, z))
        assert total_variation_on(f, a, c) == total_variation_on(f, a, b) + total_variation_on(f, b, c)


class TestLevelExcess:
    def test_closed_band(self):
        assert level_excess(box, F(1, 2), F(1, 2), -10, 10) == 0

    def test_box_violates(self):
        assert level_excess(box, 0, F(1, 4), -10, 10) == 1

    def test_escape_window(self):
        f = StepFunction.indicator(-2, None, 2)
        assert level_excess(f, 2, F(1, 3), -3, 3) == 1

    @given(steps(), fractions, st.fractions(0, 4, max_denominator=6), fractions, fractions)
    def test_matches_midpoint_oracle(self, f, c, eps, l, r):
        l, r = min(l, r), max(l, r)
        assert level_excess(f, c, eps, l, r) == excess_by_midpoints(f, c, eps, l, r)

    @given(steps(), fractions, st.fractions(0, 4, max_denominator=6), st.fractions(0, 4, max_denominator=6),
           fractions, fractions, st.fractions(0, 3, max_denominator=4))
    def test_monotone_and_bounded(self, f, c, e1, e2, l, r, grow):
        l, r = min(l, r), max(l, r)
        e1, e2 = min(e1, e2), max(e1, e2)
        small = level_excess(f, c, e1, l, r)
        assert level_excess(f, c, e2, l, r) <= small
        assert small <= level_excess(f, c, e1, l - grow, r + grow)
        assert small <= r - l


class TestNormalize:
    @given(steps_in_W())
    def test_identity_on_W(self, f):
        assert normalize_to_W(f) == f

    def test_constant(self):
        assert normalize_to_W(StepFunction.constant(7)) == StepFunction.zero()

    def test_shifted_box(self):
        assert normalize_to_W(box.shift(3)) == box
