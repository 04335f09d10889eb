"""Decision procedure mapping a rational angle to the fate of its ray.

Every rational angle receives exactly one verdict, determined by its period
class under t -> -d*t and, in the twice-odd case, by validity of the
candidate orbit portrait:

  fixed angle         -> lands at a single boundary point of a period-1 arc
  odd period k > 1    -> oscillates along a co-root arc of period k
  period 4k           -> lands at an even parabolic of ray period 4k
  period 2k, k odd    -> oscillates along the root arc of a period-k
                         component when the candidate portrait is valid,
                         otherwise lands at an even parabolic of ray
                         period 2k
  strictly preperiodic-> lands at a Misiurewicz parameter

The classifier is purely combinatorial: it certifies the verdict tag and
its evidence, and leaves locating landing points to the numeric modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .angles import Angle, AngleOrbitInfo, PeriodType, orbit_info, period_type
from .errors import FixedAngle
from .portraits import (
    OrbitPortrait,
    PortraitVerdict,
    generate_candidate,
    reflection_invariance_check,
    validate,
    wake_index,
)

__all__ = ["RayClassification", "classify", "classification_report"]

LANDS_ON_ARC_POINT = "LandsOnArcPoint"
LANDS_EVEN_PARABOLIC = "LandsEvenParabolic"
WIGGLES_CO_ROOT = "WigglesCoRoot"
WIGGLES_ROOT = "WigglesRoot"
LANDS_MISIUREWICZ = "LandsMisiurewicz"


@dataclass(frozen=True)
class RayClassification:
    """Verdict for one parameter ray, with its combinatorial evidence."""

    angle: Angle
    degree: int
    tag: str
    component_period: int = 0  # odd k for arc verdicts
    ray_period: int = 0  # period of the angle itself (0 if preperiodic)
    preperiod: int = 0
    orbit: Optional[AngleOrbitInfo] = None
    ptype: Optional[PeriodType] = None
    portrait: Optional[OrbitPortrait] = None
    verdict: Optional[PortraitVerdict] = None

    @property
    def wiggles(self) -> bool:
        return self.tag in (WIGGLES_CO_ROOT, WIGGLES_ROOT)

    def to_json_dict(self) -> dict:
        out = {
            "angle": str(self.angle),
            "degree": self.degree,
            "class": self.tag,
            "preperiod": self.preperiod,
            "period": self.orbit.period if self.orbit else 0,
            "component_period": self.component_period,
            "ray_period": self.ray_period,
            "portrait": self.portrait.to_json_dict() if self.portrait else None,
            "characteristic_arc": None,
            "failure_reason": None,
        }
        if self.verdict is not None:
            v = self.verdict.to_json_dict()
            out["characteristic_arc"] = v["characteristic_arc"]
            out["failure_reason"] = v["failure_reason"]
        return out


def classify(t: Angle, d: int) -> RayClassification:
    """Total, deterministic verdict for the parameter ray at angle t."""
    info = orbit_info(t, d)
    pt = PeriodType.from_orbit(info)
    common = dict(angle=t, degree=d, orbit=info, ptype=pt)

    if pt.tag == "preperiodic":
        return RayClassification(
            tag=LANDS_MISIUREWICZ,
            preperiod=info.preperiod,
            ray_period=info.period,
            **common,
        )
    if pt.tag == "fixed":
        return RayClassification(
            tag=LANDS_ON_ARC_POINT, component_period=1, ray_period=1, **common
        )
    if pt.tag == "odd":
        return RayClassification(
            tag=WIGGLES_CO_ROOT,
            component_period=pt.k,
            ray_period=info.period,
            **common,
        )
    if pt.tag == "four_fold":
        return RayClassification(
            tag=LANDS_EVEN_PARABOLIC,
            component_period=info.period,
            ray_period=info.period,
            **common,
        )

    # twice_odd: the portrait decides root arc vs even-parabolic landing.
    portrait = generate_candidate(t, d)
    verdict = validate(portrait, t)
    if verdict.valid:
        return RayClassification(
            tag=WIGGLES_ROOT,
            component_period=pt.k,
            ray_period=info.period,
            portrait=portrait,
            verdict=verdict,
            **common,
        )
    # Any failure (including a tie) means the ray lands at an even
    # parabolic on the boundary of a component of period 2k.
    return RayClassification(
        tag=LANDS_EVEN_PARABOLIC,
        component_period=info.period,
        ray_period=info.period,
        portrait=portrait,
        verdict=verdict,
        **common,
    )


def classification_report(t: Angle, d: int) -> dict:
    """Classification plus the full evidence trail, as a JSON-ready dict."""
    cls = classify(t, d)
    report = cls.to_json_dict()
    report["orbit_cycle"] = [str(a) for a in cls.orbit.cycle]
    report["orbit_tail"] = [str(a) for a in cls.orbit.tail]
    report["period_class"] = cls.ptype.tag

    try:
        j, midpoint = wake_index(t, d)
        report["wake_index"] = j
        report["wake_midpoint"] = midpoint
    except FixedAngle:
        report["wake_index"] = None
        report["wake_midpoint"] = None
        # Fixed angles are the rotation orbit of the zero angle.
        report["symmetry_note"] = f"fixed angle: rotation by exp(2*pi*i/{d + 1})"

    if cls.portrait is not None:
        report["reflection_invariant"] = reflection_invariance_check(cls.portrait, t)
    else:
        report["reflection_invariant"] = None
    return report
