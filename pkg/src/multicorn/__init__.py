"""Combinatorics and numerics of parameter rays of the multicorns.

The multicorn of degree d is the connectedness locus of the unicritical
antiholomorphic family f_c(z) = conj(z)^d + c.  This package decides,
for every rational external angle, whether the corresponding parameter
ray lands or oscillates along an arc of parabolic parameters, and backs
the combinatorial verdicts with floating-point evidence: ray tracing,
parabolic Fatou coordinates and Ecalle heights, cylinder projections,
gate-transit statistics, fixed-point indices, and escape-time images.
"""

__version__ = "0.1.0"

from .angles import (
    Angle,
    AngleOrbitInfo,
    PeriodType,
    angle_map,
    count_periodic_angles,
    fixed_angles,
    orbit_info,
    period_type,
)
from .classifier import RayClassification, classification_report, classify
from .dynamics import (
    Period1ArcPoint,
    RayTrace,
    SecondIterate,
    StepPolicy,
    bottcher,
    cusp_angles,
    escape_coordinate,
    find_center,
    green_potential,
    iterate,
    multicorn_membership,
    period1_arc_point,
    second_iterate,
    trace_dynamical_ray,
    trace_parameter_ray,
)
from .fatou import (
    FatouChart,
    GateStats,
    HeightInterval,
    ParabolicData,
    UndecoratedCertificate,
    arc_point_with_height,
    critical_ecalle_height,
    fatou_chart,
    fatou_coordinate,
    fixed_point_index,
    gate_transit,
    normalize_equator,
    parabolic_data,
    project_julia_to_cylinder,
    project_ray_to_cylinder,
    refine_parabolic_parameter,
    undecorated_certificate,
    wiggle_metric,
)
from .portraits import (
    OrbitPortrait,
    PortraitVerdict,
    characteristic_arc,
    generate_candidate,
    reflection_invariance_check,
    unlinked,
    validate,
    wake_index,
)
from .render import RenderConfig, overlay, render_julia, render_multicorn
