"""Exact arithmetic on angles in Q/Z under the map t -> -d*t (mod 1).

Angles of external rays are rational numbers modulo 1.  Everything in this
module is exact: angles are stored as reduced fractions with arbitrary
precision integers, and orbit/period computations use exact equality.  No
floating point enters any decision.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from math import gcd

__all__ = [
    "Angle",
    "AngleOrbitInfo",
    "PeriodType",
    "angle_map",
    "orbit_info",
    "period_type",
    "count_periodic_angles",
    "fixed_angles",
    "cyclic_arc_contains",
    "arc_length",
]

_ANGLE_RE = re.compile(r"^(\d+)/(\d+)$")


@total_ordering
@dataclass(frozen=True)
class Angle:
    """A rational angle in [0, 1), stored as a reduced fraction.

    Construction normalises mod 1 and reduces eagerly, so equality of values
    is equality of the (num, den) fields.
    """

    num: int
    den: int

    def __init__(self, num: int, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("angle denominator must be nonzero")
        if den < 0:
            num, den = -num, -den
        num %= den
        g = gcd(num, den)
        object.__setattr__(self, "num", num // g)
        object.__setattr__(self, "den", den // g)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Angle":
        return cls(q.numerator, q.denominator)

    @classmethod
    def parse(cls, text: str) -> "Angle":
        """Parse the exact text form "p/q" (or "0").

        Decimal input is rejected: silently rounding an angle would change
        its orbit, so only exact fractions are accepted.
        """
        if text == "0":
            return cls(0, 1)
        m = _ANGLE_RE.match(text)
        if m is None:
            raise ValueError(
                f"invalid angle {text!r}: expected 'p/q' with integers p, q (or '0')"
            )
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return "0" if self.num == 0 else f"{self.num}/{self.den}"

    def __repr__(self) -> str:
        return f"Angle({self.num}, {self.den})"

    def __lt__(self, other: "Angle") -> bool:
        return self.num * other.den < other.num * self.den

    def conjugate(self) -> "Angle":
        """The angle 1 - t: image under complex conjugation of the plane."""
        return Angle(self.den - self.num, self.den)

    def rotated(self, j: int, order: int) -> "Angle":
        """The angle t + j/order (mod 1)."""
        return Angle(self.num * order + j * self.den, self.den * order)

    def reflected_across(self, t: "Angle") -> "Angle":
        """The angle 2t - self (mod 1)."""
        return Angle(2 * t.num * self.den - self.num * t.den, t.den * self.den)


@dataclass(frozen=True)
class AngleOrbitInfo:
    """Exact preperiod, minimal period and cycle of an angle's orbit."""

    preperiod: int
    period: int
    cycle: tuple[Angle, ...]
    tail: tuple[Angle, ...] = field(default=())

    @property
    def is_periodic(self) -> bool:
        return self.preperiod == 0


@dataclass(frozen=True)
class PeriodType:
    """Period class of an angle: the case split of the ray classification.

    Exactly one tag applies, determined by (preperiod, period) alone:
    preperiodic beats everything, then period 1 is ``fixed``, odd period > 1
    is ``odd``, period = 2k with k odd is ``twice_odd``, period = 4k is
    ``four_fold``.
    """

    tag: str  # "fixed" | "odd" | "twice_odd" | "four_fold" | "preperiodic"
    k: int = 0
    preperiod: int = 0
    period: int = 0

    @classmethod
    def from_orbit(cls, info: AngleOrbitInfo) -> "PeriodType":
        n = info.period
        if info.preperiod > 0:
            return cls("preperiodic", preperiod=info.preperiod, period=n)
        if n == 1:
            return cls("fixed", k=1, period=1)
        if n % 2 == 1:
            return cls("odd", k=n, period=n)
        if n % 4 == 2:
            return cls("twice_odd", k=n // 2, period=n)
        return cls("four_fold", k=n // 4, period=n)


def angle_map(t: Angle, d: int) -> Angle:
    """One step of the angle map t -> -d*t (mod 1).

    This is the action of the degree-d antiholomorphic polynomial on
    external angles.
    """
    if d < 2:
        raise ValueError(f"degree must be >= 2, got {d}")
    return Angle(-d * t.num, t.den)


def orbit_info(t: Angle, d: int) -> AngleOrbitInfo:
    """Exact preperiod and minimal period under the angle map.

    Iterates with exact arithmetic until the first repeat.  The cycle is
    listed starting from the first periodic point reached.
    """
    seen: dict[Angle, int] = {}
    orbit: list[Angle] = []
    x = t
    while x not in seen:
        seen[x] = len(orbit)
        orbit.append(x)
        x = angle_map(x, d)
    start = seen[x]
    return AngleOrbitInfo(
        preperiod=start,
        period=len(orbit) - start,
        cycle=tuple(orbit[start:]),
        tail=tuple(orbit[:start]),
    )


def period_type(t: Angle, d: int) -> PeriodType:
    return PeriodType.from_orbit(orbit_info(t, d))


def _mobius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def count_periodic_angles(n: int, d: int) -> int:
    """Number of angles of exact period n under the angle map.

    The n-th iterate of the map is multiplication by (-d)^n, which fixes
    exactly ``|(-d)^n - 1|`` angles; Moebius inversion over divisors isolates
    the exact-period count.
    """
    if n < 1:
        raise ValueError("period must be >= 1")
    total = 0
    for m in range(1, n + 1):
        if n % m == 0:
            total += _mobius(n // m) * abs((-d) ** m - 1)
    return total


def fixed_angles(d: int) -> tuple[Angle, ...]:
    """The d+1 fixed angles j/(d+1) (since -d = 1 mod (d+1))."""
    return tuple(Angle(j, d + 1) for j in range(d + 1))


def cyclic_arc_contains(a: Angle, b: Angle, x: Angle) -> bool:
    """Membership of x in the counterclockwise open arc from a to b.

    The single convention used everywhere: the arc runs from a
    counterclockwise (increasing angle mod 1) to b, endpoints excluded.
    When a == b the arc is the full circle minus the point a.
    """
    if a == b:
        return x != a
    if a < b:
        return a < x < b
    return x > a or x < b


def arc_length(a: Angle, b: Angle) -> Fraction:
    """Length of the counterclockwise arc from a to b, in [0, 1)."""
    return (b.fraction - a.fraction) % 1
