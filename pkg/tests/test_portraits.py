"""Candidate portraits, the validity axioms, and their exhaustive structure."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicorn.angles import Angle, angle_map, orbit_info
from multicorn.errors import FixedAngle, NotDisjoint, WrongPeriodClass
from multicorn.portraits import (
    OrbitPortrait,
    characteristic_arc,
    generate_candidate,
    reflection_invariance_check,
    unlinked,
    validate,
    wake_index,
)


def A(p, q):
    return Angle(p, q)


def fs(*angles):
    return frozenset(angles)


class TestGenerateCandidate:
    def test_root_pair_3_7(self):
        P = generate_candidate(A(3, 7), 2)
        assert P.cycles == (
            fs(A(3, 7), A(4, 7)),
            fs(A(1, 7), A(6, 7)),
            fs(A(2, 7), A(5, 7)),
        )

    def test_seed_1_7(self):
        P = generate_candidate(A(1, 7), 2)
        assert P.cycles == (
            fs(A(1, 7), A(6, 7)),
            fs(A(5, 7), A(2, 7)),
            fs(A(4, 7), A(3, 7)),
        )

    def test_k_equals_one_degree_three(self):
        P = generate_candidate(A(1, 8), 3)
        assert P.cycles == (fs(A(1, 8), A(5, 8)),)

    @pytest.mark.parametrize("t, d", [(A(0, 1), 2), (A(1, 9), 2), (A(1, 15), 2),
                                      (A(1, 2), 2)])
    def test_wrong_period_class(self, t, d):
        with pytest.raises(WrongPeriodClass):
            generate_candidate(t, d)


class TestUnlinked:
    def test_examples(self):
        assert unlinked(fs(A(3, 7), A(4, 7)), fs(A(1, 7), A(6, 7)))
        assert not unlinked(fs(A(1, 7), A(4, 7)), fs(A(2, 7), A(6, 7)))
        assert unlinked(fs(A(1, 5), A(2, 5)), fs(A(3, 5)))  # singletons never link

    def test_not_disjoint(self):
        with pytest.raises(NotDisjoint):
            unlinked(fs(A(1, 3), A(1, 7)), fs(A(1, 3)))

    @given(st.sets(st.integers(min_value=0, max_value=62), min_size=2, max_size=4),
           st.sets(st.integers(min_value=0, max_value=62), min_size=2, max_size=4))
    @settings(max_examples=150)
    def test_symmetric(self, ps, qs):
        a = fs(*(A(p, 63) for p in ps))
        b = fs(*(A(q, 63) for q in qs))
        if a & b:
            return
        assert unlinked(a, b) == unlinked(b, a)


class TestCharacteristicArc:
    def test_unique_shortest_for_root_seed(self):
        arc, tie = characteristic_arc(generate_candidate(A(3, 7), 2))
        assert not tie and arc == (A(3, 7), A(4, 7))

    def test_same_arc_for_conjugate_seed(self):
        # The shortest complementary arc ignores which angle seeded the orbit.
        arc, tie = characteristic_arc(generate_candidate(A(1, 7), 2))
        assert not tie and arc == (A(3, 7), A(4, 7))

    def test_antipodal_tie(self):
        arc, tie = characteristic_arc(generate_candidate(A(1, 8), 3))
        assert tie and arc is None

    def test_matches_enumeration_oracle(self):
        # Enumerate all complementary arcs by hand for the 3/7 portrait.
        P = generate_candidate(A(3, 7), 2)
        lengths = []
        for member in P.cycles:
            pts = sorted(member)
            for i, lo in enumerate(pts):
                hi = pts[(i + 1) % len(pts)]
                lengths.append((hi.fraction - lo.fraction) % 1)
        assert min(lengths) == Fraction(1, 7)
        assert lengths.count(Fraction(1, 7)) == 1


class TestValidate:
    def test_valid_root_seed(self):
        P = generate_candidate(A(3, 7), 2)
        v = validate(P, A(3, 7))
        assert v.valid and v.failure_reason == "none"
        assert v.characteristic_arc == (A(3, 7), A(4, 7))

    def test_mismatch_for_non_root_seed(self):
        P = generate_candidate(A(1, 7), 2)
        v = validate(P, A(1, 7))
        assert not v.valid and v.failure_reason == "CharacteristicArcMismatch"
        assert v.characteristic_arc == (A(3, 7), A(4, 7))

    def test_tie(self):
        P = generate_candidate(A(1, 8), 3)
        v = validate(P, A(1, 8))
        assert not v.valid and v.failure_reason == "CharacteristicArcTie"

    def test_linked_cycle_rejected(self):
        # Denominator-63 orbits are linked: every seed in this cycle fails.
        P = generate_candidate(A(1, 63), 2)
        v = validate(P, A(1, 63))
        assert not v.valid and v.failure_reason == "Linked"

    def test_swap_symmetry_of_verdict(self):
        # The verdict never depends on which characteristic angle seeds it.
        for p in range(1, 63):
            t = A(p, 63)
            info = orbit_info(t, 2)
            if info.preperiod or info.period != 6:
                continue
            partner = t
            for _ in range(3):
                partner = angle_map(partner, 2)
            v1 = validate(generate_candidate(t, 2), t)
            v2 = validate(generate_candidate(partner, 2), partner)
            assert v1.valid == v2.valid

    def test_exhaustive_period_six_structure(self):
        # For d = 2 exactly three candidate pairs are valid: the rotations
        # of {3/7, 4/7} by thirds, one per period-3 hyperbolic component.
        valid_angles = set()
        for p in range(1, 63):
            t = A(p, 63)
            info = orbit_info(t, 2)
            if info.preperiod or info.period != 6:
                continue
            if validate(generate_candidate(t, 2), t).valid:
                valid_angles.add(t)
        expected = {A(3, 7), A(4, 7), A(16, 21), A(19, 21), A(2, 21), A(5, 21)}
        assert valid_angles == expected

    def test_at_most_one_valid_pair_per_cycle(self):
        seen = set()
        for p in range(1, 63):
            t = A(p, 63)
            info = orbit_info(t, 2)
            if t in seen or info.preperiod or info.period != 6:
                continue
            seen.update(info.cycle)
            valid = [a for a in info.cycle
                     if validate(generate_candidate(a, 2), a).valid]
            assert len(valid) in (0, 2)  # one pair or nothing


class TestReflectionInvariance:
    def test_root_portrait_not_invariant(self):
        P = generate_candidate(A(3, 7), 2)
        assert reflection_invariance_check(P, A(3, 7)) is False

    def test_single_fixed_pair_invariant(self):
        P = OrbitPortrait(degree=2, cycles=(frozenset({A(1, 3)}),))
        assert reflection_invariance_check(P, A(1, 3)) is True

    def test_pair_containing_reflection_axis(self):
        P = OrbitPortrait(degree=2, cycles=(frozenset({A(1, 5)}),))
        assert reflection_invariance_check(P, A(1, 5)) is True

    def test_no_valid_portrait_is_invariant(self):
        # The combinatorial heart of the non-landing argument: a valid
        # portrait with k > 1 never survives the reflection.
        for t in (A(3, 7), A(16, 21), A(2, 21)):
            P = generate_candidate(t, 2)
            assert validate(P, t).valid
            assert not reflection_invariance_check(P, t)


class TestWakeIndex:
    def test_examples(self):
        assert wake_index(A(3, 7), 2) == (1, False)
        assert wake_index(A(1, 2), 2) == (1, True)
        assert wake_index(A(1, 9), 2) == (0, False)

    def test_fixed_angle_raises(self):
        with pytest.raises(FixedAngle):
            wake_index(A(1, 3), 2)
        with pytest.raises(FixedAngle):
            wake_index(A(0, 1), 4)

    @given(st.integers(min_value=0, max_value=500),
           st.integers(min_value=1, max_value=500),
           st.integers(min_value=2, max_value=5))
    @settings(max_examples=80)
    def test_sector_bounds(self, p, q, d):
        t = Angle(p, q)
        if (t.num * (d + 1)) % t.den == 0:
            return
        j, _ = wake_index(t, d)
        assert Fraction(j, d + 1) < t.fraction < Fraction(j + 1, d + 1)
