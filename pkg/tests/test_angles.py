"""Exact angle arithmetic: examples, parsing, and orbit invariants."""

from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicorn.angles import (
    Angle,
    angle_map,
    arc_length,
    count_periodic_angles,
    cyclic_arc_contains,
    fixed_angles,
    orbit_info,
    period_type,
)


def brute_orbit(t: Fraction, d: int):
    """Independent oracle: iterate with plain Fractions until first repeat."""
    seen = {}
    orbit = []
    x = t % 1
    while x not in seen:
        seen[x] = len(orbit)
        orbit.append(x)
        x = (-d * x) % 1
    start = seen[x]
    return start, len(orbit) - start, orbit[start:]


angles_st = st.builds(
    Angle,
    st.integers(min_value=0, max_value=400),
    st.integers(min_value=1, max_value=400),
)
degrees_st = st.integers(min_value=2, max_value=5)


class TestAngle:
    def test_reduction_mod_one(self):
        assert Angle(10, 4) == Angle(1, 2)
        assert Angle(-1, 3) == Angle(2, 3)
        assert Angle(7, 7) == Angle(0, 1)

    def test_order(self):
        assert Angle(1, 3) < Angle(1, 2) < Angle(2, 3)

    def test_parse(self):
        assert Angle.parse("3/7") == Angle(3, 7)
        assert Angle.parse("0") == Angle(0, 1)
        assert Angle.parse("10/4") == Angle(1, 2)

    @pytest.mark.parametrize("bad", ["0.5", "1/2.0", "-1/3", "1 / 2", "", "1//2"])
    def test_parse_rejects_inexact(self, bad):
        with pytest.raises(ValueError):
            Angle.parse(bad)

    def test_str_roundtrip(self):
        for a in (Angle(3, 7), Angle(0, 1), Angle(5, 12)):
            assert Angle.parse(str(a)) == a

    def test_conjugate_and_rotate(self):
        assert Angle(3, 7).conjugate() == Angle(4, 7)
        assert Angle(3, 7).rotated(1, 3) == Angle(16, 21)
        assert Angle(3, 7).reflected_across(Angle(3, 7)) == Angle(3, 7)


class TestAngleMap:
    def test_examples(self):
        assert angle_map(Angle(1, 7), 2) == Angle(5, 7)
        assert angle_map(Angle(0, 1), 5) == Angle(0, 1)
        assert angle_map(Angle(1, 3), 2) == Angle(1, 3)

    def test_degree_validation(self):
        with pytest.raises(ValueError):
            angle_map(Angle(1, 3), 1)

    @given(angles_st, degrees_st)
    def test_matches_fraction_oracle(self, t, d):
        assert angle_map(t, d).fraction == (-d * t.fraction) % 1

    @given(st.integers(min_value=1, max_value=120), degrees_st)
    def test_bijection_on_coprime_denominators(self, q, d):
        if gcd(q, d) != 1:
            q = q * d + 1  # force coprimality
        angles = [Angle(p, q) for p in range(q)]
        images = {angle_map(a, d) for a in angles}
        assert images == set(angles)


class TestOrbitInfo:
    def test_period_six_cycle(self):
        info = orbit_info(Angle(1, 7), 2)
        assert info.preperiod == 0 and info.period == 6
        assert info.cycle == tuple(
            Angle(n, 7) for n in (1, 5, 4, 6, 2, 3)
        )

    def test_preperiodic_half(self):
        info = orbit_info(Angle(1, 2), 2)
        assert (info.preperiod, info.period) == (1, 1)
        assert info.cycle == (Angle(0, 1),)

    def test_period_three(self):
        info = orbit_info(Angle(1, 9), 2)
        assert (info.preperiod, info.period) == (0, 3)
        assert info.cycle == (Angle(1, 9), Angle(7, 9), Angle(4, 9))

    @given(angles_st, degrees_st)
    @settings(max_examples=60)
    def test_against_brute_oracle(self, t, d):
        info = orbit_info(t, d)
        pre, per, cycle = brute_orbit(t.fraction, d)
        assert (info.preperiod, info.period) == (pre, per)
        assert [a.fraction for a in info.cycle] == cycle

    @given(angles_st, degrees_st)
    @settings(max_examples=60)
    def test_shift_invariants(self, t, d):
        info = orbit_info(t, d)
        shifted = orbit_info(angle_map(t, d), d)
        assert shifted.period == info.period
        if info.preperiod > 0:
            assert shifted.preperiod == info.preperiod - 1


class TestPeriodType:
    @pytest.mark.parametrize(
        "t, d, tag, k",
        [
            (Angle(1, 7), 2, "twice_odd", 3),
            (Angle(1, 15), 2, "four_fold", 1),
            (Angle(2, 5), 4, "fixed", 1),
            (Angle(1, 9), 2, "odd", 3),
            (Angle(1, 2), 2, "preperiodic", 0),
        ],
    )
    def test_examples(self, t, d, tag, k):
        pt = period_type(t, d)
        assert pt.tag == tag
        if tag in ("twice_odd", "four_fold", "odd"):
            assert pt.k == k

    def test_fixed_angles_are_exactly_j_over_d_plus_1(self):
        for d in (2, 3, 4):
            fixed = {a for a in fixed_angles(d)}
            assert fixed == {Angle(j, d + 1) for j in range(d + 1)}
            for a in fixed:
                assert angle_map(a, d) == a
            # No other angle with a small denominator is fixed.
            for q in range(1, 40):
                for p in range(q):
                    a = Angle(p, q)
                    if angle_map(a, d) == a:
                        assert a in fixed


class TestCounts:
    def test_examples(self):
        assert count_periodic_angles(1, 2) == 3
        assert count_periodic_angles(2, 2) == 0
        assert count_periodic_angles(3, 2) == 6

    @given(st.integers(min_value=1, max_value=10), degrees_st)
    def test_mobius_sum(self, n, d):
        total = sum(
            count_periodic_angles(m, d) for m in range(1, n + 1) if n % m == 0
        )
        assert total == abs((-d) ** n - 1)

    def test_counts_match_enumeration(self):
        # All angles of period dividing 6 for d = 2 live at denominators | 63.
        per = {}
        for p in range(63):
            info = orbit_info(Angle(p, 63), 2)
            if info.preperiod == 0:
                per[info.period] = per.get(info.period, 0) + 1
        for n, count in per.items():
            assert count == count_periodic_angles(n, 2)


class TestCyclicArc:
    def test_contains_conventions(self):
        a, b = Angle(1, 7), Angle(6, 7)
        assert cyclic_arc_contains(a, b, Angle(1, 2))
        assert not cyclic_arc_contains(a, b, Angle(1, 7))  # endpoints excluded
        assert not cyclic_arc_contains(a, b, Angle(0, 1))
        # Wrap-around arc.
        assert cyclic_arc_contains(b, a, Angle(0, 1))
        assert not cyclic_arc_contains(b, a, Angle(1, 2))

    def test_arc_length(self):
        assert arc_length(Angle(3, 7), Angle(4, 7)) == Fraction(1, 7)
        assert arc_length(Angle(4, 7), Angle(3, 7)) == Fraction(6, 7)

    @given(angles_st, angles_st, angles_st)
    def test_complement_partition(self, a, b, x):
        if a == b:
            return
        inside = cyclic_arc_contains(a, b, x)
        outside = cyclic_arc_contains(b, a, x)
        on_edge = x in (a, b)
        assert inside + outside + on_edge == 1
