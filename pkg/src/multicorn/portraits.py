"""Candidate orbit portraits and the formal-portrait validity check.

An orbit portrait records which external rays co-land along a periodic
orbit: a cycle of finite angle sets, each mapped to the next by the angle
map.  For an angle t of exact period 2k (k odd) under t -> -d*t, the
candidate portrait pairs t with its half-period image.  Validity of this
candidate against the formal orbit portrait axioms decides whether the
parameter ray at angle t accumulates on the root arc of an odd-period
hyperbolic component.

The five axioms checked here:

  P1  every cycle member is finite and nonempty;
  P2  the angle map sends each member bijectively onto the next (cyclically);
  P3  every angle involved has exact period 2k;
  P4  the members are pairwise unlinked on the circle;
  P5  there is a unique shortest complementary arc among all members, its
      length is below 1/d, and its endpoints are exactly t and its
      half-period partner.

All checks are exact; no floating point is used in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .angles import (
    Angle,
    angle_map,
    arc_length,
    cyclic_arc_contains,
    orbit_info,
    period_type,
)
from .errors import FixedAngle, NotDisjoint, WrongPeriodClass

__all__ = [
    "OrbitPortrait",
    "PortraitVerdict",
    "ComponentAngles",
    "generate_candidate",
    "unlinked",
    "characteristic_arc",
    "validate",
    "reflection_invariance_check",
    "wake_index",
]


@dataclass(frozen=True)
class OrbitPortrait:
    """An indexed family of finite angle sets under the degree-d angle map."""

    degree: int
    cycles: tuple[frozenset[Angle], ...]

    def all_angles(self) -> frozenset[Angle]:
        out: frozenset[Angle] = frozenset()
        for a in self.cycles:
            out |= a
        return out

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "cycles": [sorted(str(a) for a in cyc) for cyc in self.cycles],
        }


@dataclass(frozen=True)
class PortraitVerdict:
    """Outcome of the formal-portrait validity check.

    ``failure_reason`` is "none" exactly when ``valid`` is true.  The
    characteristic arc is reported whenever a unique shortest complementary
    arc exists, even for invalid portraits.
    """

    valid: bool
    failure_reason: str  # none | NotBijective | PeriodMismatch | Linked |
    #                      CharacteristicArcMismatch | CharacteristicArcTie |
    #                      ArcTooLong
    characteristic_arc: Optional[tuple[Angle, Angle]] = None

    def to_json_dict(self) -> dict:
        arc = None
        if self.characteristic_arc is not None:
            arc = [str(self.characteristic_arc[0]), str(self.characteristic_arc[1])]
        return {
            "valid": self.valid,
            "failure_reason": self.failure_reason,
            "characteristic_arc": arc,
        }


@dataclass(frozen=True)
class ComponentAngles:
    """Ray angles attached to the boundary of one odd-period component.

    Only the angles directly derivable from a classified ray are populated:
    a root-arc verdict supplies the two root angles, a co-root verdict
    supplies one co-root angle.  When fully populated the angles interlace
    as root < coroots < root within an arc shorter than 1/d.
    """

    k: int
    coroot_angles: frozenset[Angle] = frozenset()
    root_angles: Optional[tuple[Angle, Angle]] = None


def generate_candidate(t: Angle, d: int) -> OrbitPortrait:
    """Candidate portrait seeded by an angle of exact period 2k, k odd.

    The first member pairs t with its image under k steps of the angle map;
    subsequent members are forward images.  Raises
    :class:`WrongPeriodClass` for any other period class.
    """
    pt = period_type(t, d)
    if pt.tag != "twice_odd":
        raise WrongPeriodClass(
            f"angle {t} has period class {pt.tag}; need exact period 2k with k odd"
        )
    k = pt.k
    partner = t
    for _ in range(k):
        partner = angle_map(partner, d)
    cycles = [frozenset((t, partner))]
    for _ in range(k - 1):
        cycles.append(frozenset(angle_map(a, d) for a in cycles[-1]))
    return OrbitPortrait(degree=d, cycles=tuple(cycles))


def unlinked(a: frozenset[Angle], b: frozenset[Angle]) -> bool:
    """True iff b lies entirely in one complementary arc of a.

    For disjoint finite sets this relation is symmetric: it says the two
    sets do not cross on the circle.
    """
    if a & b:
        raise NotDisjoint(f"angle sets overlap: {sorted(map(str, a & b))}")
    if len(a) <= 1 or len(b) <= 1:
        return True
    pts = sorted(a)
    # Complementary arcs of `a` run between cyclically consecutive points.
    for i, lo in enumerate(pts):
        hi = pts[(i + 1) % len(pts)]
        if all(cyclic_arc_contains(lo, hi, x) for x in b):
            return True
    return False


def _complementary_arcs(
    portrait: OrbitPortrait,
) -> list[tuple[Fraction, Angle, Angle]]:
    arcs = []
    for member in portrait.cycles:
        pts = sorted(member)
        for i, lo in enumerate(pts):
            hi = pts[(i + 1) % len(pts)]
            arcs.append((arc_length(lo, hi), lo, hi))
    return arcs


def characteristic_arc(
    portrait: OrbitPortrait,
) -> tuple[Optional[tuple[Angle, Angle]], bool]:
    """Shortest complementary arc over all members, with a tie flag.

    Returns ``(arc, tie)`` where ``arc`` is the (start, end) pair of the
    unique shortest arc, or None if the minimum is attained more than once.
    A tie is reported, never raised: portraits whose shortest arc is not
    distinguished simply fail validation.
    """
    arcs = _complementary_arcs(portrait)
    if not arcs:
        return None, False
    shortest = min(length for length, _, _ in arcs)
    winners = [(lo, hi) for length, lo, hi in arcs if length == shortest]
    if len(winners) > 1:
        return None, True
    return winners[0], False


def validate(portrait: OrbitPortrait, t: Angle) -> PortraitVerdict:
    """Check the candidate portrait against the formal-portrait axioms.

    ``t`` is the seed angle; validity requires the distinguished shortest
    arc to be bounded by t and its half-period partner (axiom P5), on top
    of the structural axioms P1-P4.
    """
    d = portrait.degree
    k = len(portrait.cycles)

    # P1: finite and nonempty.
    if any(len(member) == 0 for member in portrait.cycles):
        return PortraitVerdict(False, "NotBijective")

    # P2: the angle map is a bijection member -> next member.
    for i, member in enumerate(portrait.cycles):
        nxt = portrait.cycles[(i + 1) % k]
        image = frozenset(angle_map(a, d) for a in member)
        if image != nxt or len(image) != len(member):
            return PortraitVerdict(False, "NotBijective")

    # P3: every angle has exact period 2k.
    for member in portrait.cycles:
        for a in member:
            info = orbit_info(a, d)
            if info.preperiod != 0 or info.period != 2 * k:
                return PortraitVerdict(False, "PeriodMismatch")

    # P4: pairwise unlinked.
    for i in range(k):
        for j in range(i + 1, k):
            if portrait.cycles[i] & portrait.cycles[j]:
                return PortraitVerdict(False, "Linked")
            if not unlinked(portrait.cycles[i], portrait.cycles[j]):
                return PortraitVerdict(False, "Linked")

    # P5: unique shortest arc, short enough, bounded by the seed pair.
    arc, tie = characteristic_arc(portrait)
    if tie or arc is None:
        return PortraitVerdict(False, "CharacteristicArcTie")
    if arc_length(arc[0], arc[1]) >= Fraction(1, d):
        return PortraitVerdict(False, "ArcTooLong", characteristic_arc=arc)
    partner = t
    for _ in range(k):
        partner = angle_map(partner, d)
    if {arc[0], arc[1]} != {t, partner}:
        return PortraitVerdict(False, "CharacteristicArcMismatch", characteristic_arc=arc)
    return PortraitVerdict(True, "none", characteristic_arc=arc)


def reflection_invariance_check(portrait: OrbitPortrait, t: Angle) -> bool:
    """Is the co-landing pairing preserved by s -> 2t - s (mod 1)?

    The reflection fixing the angle t maps each member set to its mirror;
    the pairing is invariant iff every mirrored member is again a member.
    For valid portraits of period > 1 this always fails, which is the
    combinatorial obstruction forcing rays at such angles to oscillate.
    """
    members = set(portrait.cycles)
    for member in portrait.cycles:
        mirrored = frozenset(a.reflected_across(t) for a in member)
        if mirrored not in members:
            return False
    return True


def wake_index(t: Angle, d: int) -> tuple[int, bool]:
    """Index j of the fixed-angle sector j/(d+1) < t < (j+1)/(d+1).

    Also reports whether t sits at the midpoint of its sector, i.e.
    2t = (2j+1)/(d+1) mod 1, the degenerate configuration in the
    reflection analysis.  Raises :class:`FixedAngle` at sector endpoints.
    """
    if (t.num * (d + 1)) % t.den == 0:
        raise FixedAngle(f"angle {t} is a fixed angle j/{d + 1}")
    j = (t.num * (d + 1)) // t.den
    two_t = Fraction(2 * t.num, t.den) % 1
    midpoint = two_t == Fraction(2 * j + 1, d + 1) % 1
    return j, midpoint
