"""Parabolic Fatou coordinates, Ecalle heights, and cylinder projections.

For a non-cusp parabolic parameter of odd period k, the return map
F = f^(2k) = P^(k) fixes the characteristic parabolic point z0 with
multiplier 1 and expands as F(z0+w) = z0 + w + a w^2 + b w^3 + ...  In the
linearizing frame u = -1/(a w) the map becomes u -> u + 1 + A/u + B/u^2 with
A = 1 - b/a^2, and the Abel (Fatou) coordinate has the asymptotics

    psi(u) = u - A log u + D/u + O(log u / u^2),   D = B - A^2 + A/2.

Charts evaluate psi by pushing points deep along the orbit (forward for the
attracting petal, backward via Newton inverse steps for the repelling
petal), applying the asymptotic expansion there, and subtracting the step
count.  Correctness is checked by the translation equation and verified by
Richardson-style depth doubling.

The antiholomorphic half-return f^(k) descends to zeta -> conj(zeta) + 1/2
on the cylinder, which forces a distinguished horizontal line (the
equator).  Raw charts are shifted vertically so the equator sits on the
real axis; the imaginary part of the normalised coordinate is the Ecalle
height, the quantity all downstream measurements use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .angles import Angle
from .dynamics import (
    RayTrace,
    StepPolicy,
    f_map,
    p_map,
    p_prime,
    default_escape_radius,
    period1_arc_point,
    trace_dynamical_ray,
)
from .errors import (
    CuspDetected,
    HeightOutOfRange,
    InconsistentKappa,
    NoConvergence,
    NoTransit,
    NotParabolic,
    OtherFixedPointEnclosed,
    OutsidePetal,
    QuadratureNotConverged,
    RayMissesPetal,
    TailTooShort,
)

__all__ = [
    "ParabolicData",
    "FatouChart",
    "HeightInterval",
    "GateStats",
    "UndecoratedCertificate",
    "parabolic_data",
    "refine_parabolic_parameter",
    "fatou_chart",
    "fatou_coordinate",
    "normalize_equator",
    "petal_samples",
    "critical_ecalle_height",
    "arc_point_with_height",
    "project_ray_to_cylinder",
    "project_julia_to_cylinder",
    "undecorated_certificate",
    "gate_transit",
    "fixed_point_index",
    "wiggle_metric",
]


# ---------------------------------------------------------------------------
# Parabolic data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParabolicData:
    """Local data of the parabolic return map at the characteristic point."""

    c: complex
    degree: int
    k: int
    z0: complex
    q: int  # petal count flag: 1 simple, 2 cusp
    a: complex  # quadratic coefficient of F at z0
    b: complex  # cubic coefficient
    c4: complex  # quartic coefficient
    multiplier: complex

    @property
    def sigma(self) -> complex:
        """Natural length scale of the petals."""
        return -1.0 / self.a

    @property
    def log_coeff(self) -> complex:
        """Coefficient of the logarithmic term of the Abel coordinate."""
        return 1.0 - self.b / self.a**2

    @property
    def inv_coeff(self) -> complex:
        """Coefficient of the 1/u correction of the Abel coordinate."""
        a, b, c4 = self.a, self.b, self.c4
        A = 1.0 - b / a**2
        B = c4 / a**3 - 2.0 * b / a**2 + 1.0
        return B - A**2 + A / 2.0


def _return_map(z, c: complex, d: int, k: int):
    for _ in range(k):
        z = p_map(z, c, d)
    return z


def _return_map_with_deriv(z, c: complex, d: int, k: int):
    dz = np.ones_like(np.asarray(z, dtype=complex))
    w = z
    for _ in range(k):
        dz = dz * p_prime(w, c, d)
        w = p_map(w, c, d)
    return w, dz


def _half_return(z, c: complex, d: int, k: int):
    for _ in range(k):
        z = f_map(z, c, d)
    return z


def _taylor_coeffs(c: complex, d: int, k: int, z0: complex,
                   radius: float = 0.02, nodes: int = 64) -> np.ndarray:
    """First few Taylor coefficients of F at z0 by circle finite differences."""
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = z0 + radius * np.exp(1j * theta)
    vals = _return_map(ring, c, d, k)
    hat = np.fft.fft(vals) / nodes
    coeffs = np.array([hat[m] / radius**m for m in range(6)])
    return coeffs


def _settle_seed(c: complex, d: int, k: int, settle: int = 2048) -> complex:
    """Orbit point of slowest motion of the critical value under the return map.

    Inside the parabolic basin the orbit creeps into the parabolic point;
    just outside, the slowest point sits in the gate bottleneck.  Either
    way it seeds the Newton refinement of the parabolic point well.
    """
    z = complex(c)
    best, best_step = z, np.inf
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(settle):
            z_next = _return_map(z, c, d, k)
            if not np.isfinite(z_next) or abs(z_next) > 1e6:
                break
            step = abs(z_next - z)
            if step < best_step:
                best, best_step = z_next, step
            z = z_next
    return best


def parabolic_data(
    c: complex,
    k: int,
    d: int,
    z_seed: Optional[complex] = None,
    fixed_tol: float = 1e-8,
    cusp_tol: float = 1e-4,
    settle: int = 2048,
) -> ParabolicData:
    """Locate and expand the characteristic parabolic point of f_c.

    Without a seed, the critical value is iterated under the return map;
    its orbit converges to the parabolic point on the boundary of the
    characteristic Fatou component.  The point is then refined by complex
    Newton on F'(z) = 1 (the fixed-point equation itself has a double
    root, its derivative a simple one away from cusps).

    Raises NotParabolic when no multiplier-1 fixed point of the k-th
    antiholomorphic iterate is found within tolerance, CuspDetected when
    the quadratic coefficient vanishes (double petal, q = 2).
    """
    c = complex(c)
    z = _settle_seed(c, d, k, settle) if z_seed is None else complex(z_seed)

    # Newton on F'(z) - 1 = 0 with derivative F''(z) from circle samples.
    for _ in range(80):
        coeffs = _taylor_coeffs(c, d, k, z, radius=0.01)
        g = coeffs[1] - 1.0
        dg = 2.0 * coeffs[2]
        if abs(dg) < 1e-12:
            break  # cusp-like: F'' ~ 0, stop refining through it
        step = g / dg
        z = z - step
        if abs(step) < 1e-14 * max(1.0, abs(z)):
            break

    coeffs = _taylor_coeffs(c, d, k, z)
    z0 = complex(z)
    mult = complex(coeffs[1])
    fixed_residual = abs(complex(coeffs[0]) - z0)
    half_residual = abs(_half_return(z0, c, d, k) - z0)
    if fixed_residual > fixed_tol or half_residual > 10 * fixed_tol or abs(mult - 1.0) > 1e-6:
        raise NotParabolic(
            f"no parabolic point of period {k} near c={c}: "
            f"|F(z)-z|={fixed_residual:.2e}, |f^k(z)-z|={half_residual:.2e}, "
            f"multiplier={mult:.8f}"
        )
    a, b, c4 = complex(coeffs[2]), complex(coeffs[3]), complex(coeffs[4])
    if abs(a) < cusp_tol * max(1.0, math.sqrt(abs(b))):
        raise CuspDetected(
            f"quadratic coefficient {abs(a):.2e} vanishes at c={c}: double petal"
        )
    return ParabolicData(
        c=c, degree=d, k=k, z0=z0, q=1, a=a, b=b, c4=c4, multiplier=mult
    )


def refine_parabolic_parameter(
    c_seed: complex,
    k: int,
    d: int,
    z_seed: Optional[complex] = None,
    tol: float = 1e-11,
    max_iter: int = 80,
) -> complex:
    """Nearest parameter with an odd-period-k parabolic orbit.

    The parabolic locus is cut out by three real conditions on the four
    real unknowns (c, z): the fixed-point equation of the antiholomorphic
    k-th iterate and unit multiplier of the return map.  A Gauss-Newton
    iteration with minimum-norm steps converges to a nearby locus point.
    """
    c = complex(c_seed)
    z = _settle_seed(c, d, k) if z_seed is None else complex(z_seed)

    def conditions(cv: complex, zv: complex) -> np.ndarray:
        fz = _half_return(zv, cv, d, k)
        _, dF = _return_map_with_deriv(zv, cv, d, k)
        return np.array([(fz - zv).real, (fz - zv).imag, abs(dF) - 1.0])

    x = np.array([c.real, c.imag, z.real, z.imag])
    for _ in range(max_iter):
        cv, zv = complex(x[0], x[1]), complex(x[2], x[3])
        g = conditions(cv, zv)
        if np.linalg.norm(g) < tol:
            return cv
        J = np.zeros((3, 4))
        h = 1e-7 * max(1.0, np.linalg.norm(x))
        for j in range(4):
            xp = x.copy()
            xp[j] += h
            J[:, j] = (conditions(complex(xp[0], xp[1]), complex(xp[2], xp[3])) - g) / h
        step, *_ = np.linalg.lstsq(J, -g, rcond=None)
        if not np.all(np.isfinite(step)):
            raise NoConvergence("singular Jacobian while refining parabolic locus")
        x = x + step
        if np.linalg.norm(step) < 1e-14 * max(1.0, np.linalg.norm(x)):
            break
    cv, zv = complex(x[0], x[1]), complex(x[2], x[3])
    if np.linalg.norm(conditions(cv, zv)) > 100 * tol:
        raise NoConvergence(f"parabolic refinement stalled near {c_seed}")
    return cv


# ---------------------------------------------------------------------------
# Fatou charts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FatouChart:
    """Numerically realised Fatou coordinate on one petal.

    ``beta`` is the vertical shift placing the equator on the real axis;
    ``x_offset`` fixes the remaining horizontal freedom by sending the
    anchor point to the imaginary axis.  ``depth`` is the |Re u| the orbit
    is pushed to before the asymptotic expansion is applied; doubling it is
    the convergence check.
    """

    direction: str  # "attracting" | "repelling"
    pdata: ParabolicData
    beta: float = 0.0
    anchor: Optional[complex] = None
    x_offset: float = 0.0
    depth: float = 6000.0
    max_steps: int = 60_000
    re_kappa: Optional[float] = None
    depth_delta: Optional[float] = None  # measured depth-doubling delta

    def u_of(self, z):
        return -1.0 / (self.pdata.a * (np.asarray(z, dtype=complex) - self.pdata.z0))

    def z_of_u(self, u):
        return self.pdata.z0 - 1.0 / (self.pdata.a * np.asarray(u, dtype=complex))


def _tune_depth(pdata: ParabolicData, direction: str,
                ladder=(300.0, 600.0, 1200.0, 2400.0, 4800.0)) -> tuple[float, float]:
    """Pick the chart depth with the smallest depth-doubling delta.

    The evaluation error is truncation-dominated at shallow depth and
    roundoff-dominated at large depth, with a parameter-dependent sweet
    spot; measuring the doubling delta on a few probe points finds it.
    Returns (depth, measured delta).
    """
    u = np.array([22.0 + 0.5j, 30.0 - 4.0j, 27.0 + 5.5j, 38.0 - 1.5j])
    if direction == "repelling":
        u = -np.conj(u)
    probes = pdata.z0 - 1.0 / (pdata.a * u)
    raw = FatouChart(direction=direction, pdata=pdata, beta=0.0)
    values = []
    for depth in ladder:
        values.append(fatou_coordinate(replace(raw, depth=depth), probes,
                                       strict=False))
    deltas = [
        float(np.nanmax(np.abs(b - a))) for a, b in zip(values, values[1:])
    ]
    best = int(np.nanargmin(deltas))
    return ladder[best + 1], deltas[best]


def _log_attracting(u):
    return np.log(u)  # principal branch: cut on the negative reals, petal on the right


def _log_repelling(u):
    # Continuous on the left half plane: cut along the positive reals.
    u = np.asarray(u, dtype=complex)
    return np.log(np.abs(u)) + 1j * (np.arctan2(-u.imag, -u.real) + np.pi)


def _psi_asymptotic(u, pdata: ParabolicData, direction: str):
    A = pdata.log_coeff
    D = pdata.inv_coeff
    logu = _log_attracting(u) if direction == "attracting" else _log_repelling(u)
    return u - A * logu + D / u


def _push_forward(z, chart: FatouChart):
    """Iterate F until Re u reaches the chart depth; returns (z, steps, ok)."""
    p = chart.pdata
    z = np.asarray(z, dtype=complex)
    steps = 0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(chart.max_steps):
            u = chart.u_of(z)
            good = np.isfinite(u) & (np.abs(z) < 1e8)
            if np.all((u.real >= chart.depth) | ~good):
                return z, steps, good & (u.real >= chart.depth)
            z = np.where(good, _return_map(z, p.c, p.degree, p.k), z)
            steps += 1
        u = chart.u_of(z)
    return z, steps, np.isfinite(u) & (u.real >= chart.depth)


def _pull_backward(z, chart: FatouChart):
    """Iterate the inverse branch of F until Re u <= -depth.

    Each backward step solves F(x) = z by Newton from the prediction
    u -> u - 1; the solution is accepted only when it lands within half a
    unit of the prediction, which pins the inverse branch by continuity.
    Returns (z, steps, ok-mask).
    """
    p = chart.pdata
    z = np.asarray(z, dtype=complex)
    ok = np.ones(z.shape, dtype=bool)
    steps = 0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(chart.max_steps):
            u = chart.u_of(z)
            if np.all((u.real <= -chart.depth) | ~ok):
                return z, steps, ok
            # All live points step together so the step count stays global;
            # the asymptotic formula absorbs extra depth exactly.
            u_pred = u - 1.0
            x = chart.z_of_u(u_pred)
            for _ in range(12):
                Fx, dFx = _return_map_with_deriv(x, p.c, p.degree, p.k)
                step = (Fx - z) / dFx
                x = x - step
                if np.nanmax(np.abs(step)) < 1e-13 * max(
                    1.0, float(np.nanmax(np.abs(x)))
                ):
                    break
            drift = np.abs(chart.u_of(x) - u_pred)
            ok &= np.isfinite(drift) & (drift < 0.45)
            z = np.where(ok, x, z)
            steps += 1
        return z, steps, ok & (chart.u_of(z).real <= -chart.depth)


def fatou_coordinate(chart: FatouChart, z, strict: bool = True):
    """Evaluate the chart's Fatou coordinate at z (scalar or array).

    Points that cannot be pushed to the asymptotic regime are NaN in array
    mode; in strict/scalar mode they raise OutsidePetal.
    """
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    if chart.direction == "attracting":
        zf, n, ok = _push_forward(zz, chart)
        sign = -1.0
    else:
        zf, n, ok = _pull_backward(zz, chart)
        sign = 1.0
    zeta = _psi_asymptotic(chart.u_of(zf), chart.pdata, chart.direction) + sign * n
    zeta = zeta + 1j * chart.beta - chart.x_offset
    zeta = np.where(ok, zeta, np.nan + 1j * np.nan)
    if strict and not np.all(ok):
        raise OutsidePetal(
            f"{int((~ok).sum())} of {ok.size} points did not reach the "
            f"{chart.direction} petal asymptotic regime"
        )
    return complex(zeta[0]) if scalar else zeta


def petal_samples(
    pdata: ParabolicData,
    direction: str,
    n: int,
    rng: Optional[np.random.Generator] = None,
    re_range: tuple[float, float] = (15.0, 40.0),
    im_range: tuple[float, float] = (-8.0, 8.0),
) -> np.ndarray:
    """Sample points of the petal, drawn uniformly in the u-rectangle."""
    if rng is None:
        rng = np.random.default_rng(0)
    re = rng.uniform(*re_range, size=n)
    im = rng.uniform(*im_range, size=n)
    u = re + 1j * im
    if direction == "repelling":
        u = -np.conj(u)  # left half plane, mirrored for symmetry of coverage
    return pdata.z0 - 1.0 / (pdata.a * u)


def normalize_equator(
    chart: FatouChart,
    samples: Optional[np.ndarray] = None,
    kappa_tol: float = 1e-5,
) -> tuple[float, complex]:
    """Vertical shift beta placing the equator on the real axis.

    Measures the constant kappa in psi(f^k(z)) = conj(psi(z)) + kappa on
    petal samples.  Applying the relation twice forces Re kappa = 1/2;
    beta = -Im(kappa)/2 cancels the imaginary part.  Raises
    InconsistentKappa when kappa varies across samples beyond tolerance
    (after Richardson extrapolation in the chart depth).
    """
    p = chart.pdata
    if samples is None:
        res = np.array([20.0, 30.0, 40.0])
        ims = np.array([-5.0, -1.5, 2.5, 6.0])
        u = (res[:, None] + 1j * ims[None, :]).ravel()
        if chart.direction == "repelling":
            u = -np.conj(u)
        samples = p.z0 - 1.0 / (p.a * u)

    ch = replace(chart, beta=0.0, x_offset=0.0)
    z1 = fatou_coordinate(ch, samples, strict=False)
    z2 = fatou_coordinate(ch, _half_return(samples, p.c, p.degree, p.k),
                          strict=False)
    kappa = z2 - np.conj(z1)
    kappa = kappa[np.isfinite(kappa)]
    if kappa.size < max(6, samples.size // 2):
        raise OutsidePetal(
            f"only {kappa.size} of {samples.size} normalisation samples "
            "reached the petal asymptotic regime"
        )
    spread = float(np.max(np.abs(kappa - kappa.mean())))
    if spread > kappa_tol:
        raise InconsistentKappa(
            f"half-return offset varies by {spread:.2e} across samples"
        )
    kappa_mean = complex(kappa.mean())
    if abs(kappa_mean.real - 0.5) > 1e-6:
        raise InconsistentKappa(
            f"Re kappa = {kappa_mean.real:.10f}, expected the forced value 1/2"
        )
    beta = -kappa_mean.imag / 2.0
    return beta, kappa_mean


def fatou_chart(
    pdata: ParabolicData,
    direction: str,
    anchor: Optional[complex] = None,
    depth: Optional[float] = None,
    kappa_tol: float = 1e-5,
) -> FatouChart:
    """Equator-normalised chart; optionally anchored horizontally.

    The anchor point (when given) is mapped onto the imaginary axis;
    heights never depend on this choice, horizontal positions do, so the
    anchor is recorded on the chart.  Without an explicit depth the chart
    is auto-tuned to the depth with the smallest doubling delta, which is
    recorded as ``depth_delta`` (the tolerance its values carry).
    """
    if depth is None:
        depth, delta = _tune_depth(pdata, direction)
    else:
        delta = None
    raw = FatouChart(direction=direction, pdata=pdata, depth=depth,
                     depth_delta=delta)
    beta, kappa = normalize_equator(raw, kappa_tol=kappa_tol)
    chart = replace(raw, beta=beta, re_kappa=float(kappa.real))
    if anchor is not None:
        zeta = fatou_coordinate(chart, anchor)
        chart = replace(chart, anchor=complex(anchor), x_offset=float(zeta.real))
    return chart


# ---------------------------------------------------------------------------
# Ecalle heights along arcs
# ---------------------------------------------------------------------------


def critical_ecalle_height(
    c: complex, k: int, d: int, pdata: Optional[ParabolicData] = None,
    depth: Optional[float] = None, kappa_tol: float = 1e-5,
) -> float:
    """Height of the critical value in the attracting cylinder."""
    if pdata is None:
        pdata = parabolic_data(c, k, d)
    chart = fatou_chart(pdata, "attracting", depth=depth, kappa_tol=kappa_tol)
    zeta = fatou_coordinate(chart, complex(c))
    return float(zeta.imag)


def arc_point_with_height(
    d: int,
    h: float,
    phi_cap: float = 0.92,
    depth: Optional[float] = 2000.0,
) -> complex:
    """Parameter on the principal period-1 arc with critical height h.

    One-dimensional root find in the arc angle; the reachable heights are
    bounded because heights blow up at the cusps, so phi is capped near
    the first cusp angle (and retreats from it where the chart loses
    consistency).  Raises HeightOutOfRange for heights beyond the
    measured window.
    """
    from scipy.optimize import brentq

    cusp = math.pi / (d + 1)

    def height_of(phi: float) -> float:
        c = period1_arc_point(d, phi).c
        return critical_ecalle_height(c, 1, d, depth=depth, kappa_tol=1e-3) - h

    cap = phi_cap * cusp
    for _ in range(8):
        try:
            f_lo, f_hi = height_of(-cap), height_of(cap)
            break
        except (InconsistentKappa, OutsidePetal, NotParabolic, CuspDetected):
            cap *= 0.85
    else:
        raise HeightOutOfRange(f"no usable bracket on the period-1 arc of degree {d}")
    if f_lo * f_hi > 0:
        raise HeightOutOfRange(
            f"height {h} outside measured window "
            f"[{min(f_lo, f_hi) + h:.4f}, {max(f_lo, f_hi) + h:.4f}]"
        )
    phi = brentq(height_of, -cap, cap, xtol=1e-12)
    return period1_arc_point(d, phi).c


# ---------------------------------------------------------------------------
# Cylinder projections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightInterval:
    """Range of Ecalle heights traversed by a projected curve."""

    l: float
    u: float

    def __post_init__(self):
        if self.l > self.u:
            raise ValueError("empty height interval")

    @property
    def length(self) -> float:
        return self.u - self.l

    def to_json_dict(self) -> dict:
        return {"l": self.l, "u": self.u}


def project_ray_to_cylinder(
    c: complex,
    k: int,
    t: Angle,
    d: int,
    pdata: Optional[ParabolicData] = None,
    r_min: Optional[float] = None,
    entry: float = 3.0,
    depth: Optional[float] = None,
    trace: Optional[RayTrace] = None,
) -> tuple[HeightInterval, np.ndarray]:
    """Heights traversed by the dynamical ray in the repelling cylinder.

    The traced ray tail is filtered to the repelling petal, pushed through
    the repelling chart, and folded by the translation invariance (the ray
    is invariant under the return map, so its projection is a closed
    curve).  Returns the height interval and the projected samples sorted
    by phase.
    """
    if pdata is None:
        pdata = parabolic_data(c, k, d)
    if r_min is None:
        # Depth in the petal grows like -log(potential)/(k log d^2); reach
        # a few fundamental domains past the entry threshold.
        r_min = 1.0 + math.exp(-(entry + 3.5) * k * math.log(d * d)) * 0.5
        r_min = max(r_min, 1.0 + 1e-13)
    if trace is None:
        trace = trace_dynamical_ray(
            c, t, d, r_min, policy=StepPolicy(mode="offset", factor=1.12, r_start=16.0)
        )
    chart = fatou_chart(pdata, "repelling", depth=depth)
    u = chart.u_of(trace.points)
    mask = (u.real <= -entry) & (np.abs(u.imag) <= np.maximum(8.0, np.abs(u.real)))
    pts = trace.points[mask]
    if pts.size < 8:
        raise RayMissesPetal(
            f"only {pts.size} ray samples inside the repelling petal "
            f"(trace status {trace.status})"
        )
    zeta = fatou_coordinate(chart, pts, strict=False)
    zeta = zeta[np.isfinite(zeta)]
    if zeta.size < 8:
        raise RayMissesPetal("repelling-chart evaluation lost the ray samples")
    order = np.argsort(zeta.real % 1.0)
    zeta = zeta[order]
    return HeightInterval(float(zeta.imag.min()), float(zeta.imag.max())), zeta


def _escape_mask(
    z: np.ndarray, c: complex, d: int, z0: complex, a: complex,
    max_iter: int, radius: float,
) -> np.ndarray:
    """Vectorised escape test with early capture into the attracting petal."""
    z = z.astype(complex).copy()
    escaped = np.zeros(z.shape, dtype=bool)
    captured = np.zeros(z.shape, dtype=bool)
    r2 = radius * radius
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(max_iter):
            active = ~escaped & ~captured
            if not np.any(active):
                break
            z[active] = p_map(z[active], c, d)
            mag2 = z.real**2 + z.imag**2
            escaped |= (~captured) & ((mag2 > r2) | ~np.isfinite(mag2))
            u = -1.0 / (a * (z - z0))
            captured |= (~escaped) & (u.real > 25.0) & (np.abs(u.imag) < np.abs(u.real))
    return escaped


def project_julia_to_cylinder(
    c: complex,
    k: int,
    d: int,
    pdata: Optional[ParabolicData] = None,
    n_probes: int = 1024,
    probe_depth: float = 250.0,
    bisections: int = 40,
    y_max: float = 6.0,
    max_iter: Optional[int] = None,
) -> tuple[float, float, dict]:
    """Height bounds of the Julia projection in the repelling cylinder.

    Probes one fundamental domain at constant phase (vertical lines in the
    linearizing frame, |Re u| near ``probe_depth``), bisecting each probe
    between the escaping equator region and the bounded region beyond the
    Julia boundary.  Returns (h, H): the infimum and supremum of |height|
    over the boundary of the basin-of-infinity component containing the
    equator, plus the sampled boundary curves.
    """
    if pdata is None:
        pdata = parabolic_data(c, k, d)
    chart = fatou_chart(pdata, "repelling", depth=max(probe_depth, 600.0))
    if max_iter is None:
        max_iter = int(probe_depth * 8) + 2000
    radius = default_escape_radius(c, d)

    xs = probe_depth + np.arange(n_probes) / n_probes  # one unit strip

    def z_at(y: np.ndarray) -> np.ndarray:
        u = -(xs) + 1j * y
        return pdata.z0 - 1.0 / (pdata.a * u)

    def heights_at(y: np.ndarray) -> np.ndarray:
        u = -(xs) + 1j * y
        zeta = _psi_asymptotic(u, pdata, "repelling") + 1j * chart.beta
        return zeta.imag

    curves = {}
    h_bounds = []
    H_bounds = []
    for side in (+1.0, -1.0):
        # Locate the equator (height 0) along each probe by secant steps.
        y_eq = np.zeros(n_probes)
        for _ in range(30):
            f0 = heights_at(y_eq)
            f1 = heights_at(y_eq + 1e-3)
            y_eq = y_eq - f0 * 1e-3 / (f1 - f0)
        if not np.all(_escape_mask(z_at(y_eq), c, d, pdata.z0, pdata.a,
                                   max_iter, radius)):
            raise NoConvergence(
                "equator samples do not escape: basin component mislocated"
            )
        lo = y_eq.copy()
        hi = y_eq + side * y_max
        # Grow the outer bound until every probe has left the basin of
        # infinity (bounded orbit beyond the Julia boundary).
        for _ in range(4):
            esc = _escape_mask(z_at(hi), c, d, pdata.z0, pdata.a, max_iter, radius)
            if not np.any(esc):
                break
            hi = np.where(esc, y_eq + 2.0 * (hi - y_eq), hi)
        for _ in range(bisections):
            mid = 0.5 * (lo + hi)
            esc = _escape_mask(z_at(mid), c, d, pdata.z0, pdata.a, max_iter, radius)
            lo = np.where(esc, mid, lo)
            hi = np.where(esc, hi, mid)
        boundary_h = heights_at(0.5 * (lo + hi))
        curves["upper" if side > 0 else "lower"] = boundary_h
        h_bounds.append(np.min(np.abs(boundary_h)))
        H_bounds.append(np.max(np.abs(boundary_h)))
    h = float(min(h_bounds))
    H = float(max(H_bounds))
    curves["phase"] = (xs - probe_depth) % 1.0
    return h, H, curves


@dataclass(frozen=True)
class UndecoratedCertificate:
    """Round sub-cylinder evidence for an undecorated boundary window."""

    c: complex
    h: float
    H: float
    floor: float

    @property
    def positive(self) -> bool:
        return self.h >= self.floor

    @property
    def modulus_lower(self) -> float:
        return 2.0 * self.h

    @property
    def modulus_upper(self) -> float:
        return 2.0 * self.H

    def to_json_dict(self) -> dict:
        return {
            "c": [self.c.real, self.c.imag],
            "h": self.h,
            "H": self.H,
            "floor": self.floor,
            "positive": self.positive,
            "modulus_bounds": [self.modulus_lower, self.modulus_upper],
        }


def undecorated_certificate(
    c: complex, d: int, floor: float = 0.02, **kwargs
) -> UndecoratedCertificate:
    """Certificate that the equator sits inside a round exterior cylinder.

    Positive when the Julia projection stays at least ``floor`` away from
    the equator; the floor is a reporting convention, not a proved bound.
    """
    pdata = parabolic_data(c, 1, d)
    h, H, _ = project_julia_to_cylinder(c, 1, d, pdata=pdata, **kwargs)
    return UndecoratedCertificate(c=complex(c), h=h, H=H, floor=floor)


# ---------------------------------------------------------------------------
# Gate transit and the fixed-point index
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateStats:
    """Transit statistics of one orbit through the perturbed gate."""

    s: float
    N: int
    phase: float

    def to_json_dict(self) -> dict:
        return {"s": self.s, "N": self.N, "phase": self.phase}


def gate_transit(
    c_out: complex,
    k: int,
    d: int,
    z_start: Optional[complex] = None,
    c_ref: Optional[complex] = None,
    gate_scale: float = 0.15,
    max_steps: int = 10_000_000,
) -> GateStats:
    """Count return-map steps until the orbit exits the gate outgoing side.

    ``c_out`` must lie outside the closed component near a non-cusp arc
    point; the gate window is the disk of radius ``gate_scale * |sigma|``
    around the reference parabolic point.  The phase is the fractional
    outgoing Fatou coordinate minus the step count (a continuous lift as
    the perturbation shrinks); the outgoing chart of the reference
    parameter stands in for the perturbed one, which is legitimate for
    small perturbations because perturbed coordinates converge to it.
    """
    if c_ref is None:
        c_ref = refine_parabolic_parameter(c_out, k, d)
    pdata = parabolic_data(c_ref, k, d)
    z0, a = pdata.z0, pdata.a
    u_gate = 1.0 / gate_scale

    z = complex(c_out) if z_start is None else complex(z_start)
    u = -1.0 / (a * (z - z0))
    if u.real <= 0:
        raise NoTransit(
            f"start point is not on the incoming side (Re u = {u.real:.3f})"
        )
    N = None
    for n in range(1, max_steps + 1):
        z = _return_map(z, complex(c_out), d, k)
        if not np.isfinite(z):
            raise NoTransit("orbit escaped before crossing the gate")
        u = -1.0 / (a * (z - z0))
        if u.real < 0 and abs(u) <= u_gate:
            N = n
            break
    if N is None:
        raise NoTransit(f"no gate crossing within {max_steps} return steps")

    chart = fatou_chart(pdata, "repelling", depth=1500.0)
    zeta = fatou_coordinate(chart, z)
    phase = float(zeta.real % 1.0) - N
    return GateStats(s=abs(complex(c_out) - complex(c_ref)), N=N, phase=phase)


def fixed_point_index(
    c: complex,
    k: int,
    d: int,
    pdata: Optional[ParabolicData] = None,
    rho: Optional[float] = None,
    nodes: int = 256,
    tol: float = 1e-4,
) -> complex:
    """Holomorphic fixed-point index of the return map at the parabolic point.

    Trapezoid quadrature of (2 pi i)^(-1) * integral of dz/(z - F(z)) on a
    circle around z0.  The multiplicity integral of (1 - F'(z))/(z - F(z))
    must come out 2 (the simple parabolic double point), otherwise the
    contour encloses extra fixed points.  Convergence is certified by
    halving the radius and doubling the node count.
    """
    if pdata is None:
        pdata = parabolic_data(c, k, d)

    def quadrature(radius: float, m: int) -> tuple[complex, complex]:
        theta = 2.0 * np.pi * np.arange(m) / m
        ring = pdata.z0 + radius * np.exp(1j * theta)
        F, dF = _return_map_with_deriv(ring, c, d, pdata.k)
        denom = ring - F
        index = np.mean(radius * np.exp(1j * theta) / denom)
        mult = np.mean(radius * np.exp(1j * theta) * (1.0 - dF) / denom)
        return complex(index), complex(mult)

    radius = 0.1 * abs(pdata.sigma) if rho is None else rho
    i1, m1 = quadrature(radius, nodes)
    i2, m2 = quadrature(radius / 2.0, nodes * 2)
    if abs(m2 - 2.0) > 0.1:
        raise OtherFixedPointEnclosed(
            f"multiplicity {m2:.3f} inside contour, expected 2"
        )
    if abs(i1 - i2) > tol:
        raise QuadratureNotConverged(
            f"index changed by {abs(i1 - i2):.2e} under contour refinement"
        )
    return i2


# ---------------------------------------------------------------------------
# Wiggle metric
# ---------------------------------------------------------------------------


def wiggle_metric(trace: RayTrace, r_cut: float, min_samples: int = 50) -> float:
    """Length-to-diameter ratio of the trace tail below potential r_cut.

    Values near 1 indicate a straight approach; oscillating rays
    accumulate length without growing their diameter.
    """
    mask = trace.potentials <= r_cut
    pts = trace.points[mask]
    if pts.size < min_samples:
        raise TailTooShort(
            f"{pts.size} tail samples below r_cut (need {min_samples})"
        )
    length = float(np.abs(np.diff(pts)).sum())
    diam = 0.0
    for i in range(pts.size - 1):
        diam = max(diam, float(np.abs(pts[i + 1 :] - pts[i]).max()))
    return length / diam if diam > 0 else 1.0
