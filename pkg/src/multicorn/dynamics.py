"""Floating-point dynamics of f_c(z) = conj(z)^d + c.

The second iterate of f_c is the holomorphic polynomial
P_c(z) = (z^d + conj(c))^d + c of degree d*d, so all exterior machinery
(escape potential, Boettcher coordinate, ray tracing) runs on P_c.  Rays of
f_c at angle t are Boettcher rays of P_c at the same angle; one application
of f_c sends angle t to -d*t (mod 1), one application of P_c sends it to
d*d*t.

Ray tracing follows the standard potential-continuation scheme: a sample at
potential g and angle t is the Newton solution of P_c^(k)(z) = T, where k
lifts the potential into a fixed working band and T is the ray point at the
lifted potential, computed from the asymptotic tangency of the Boettcher
coordinate at infinity and refined by Newton on the product formula.

The parameter map c -> phi_c(c) is only real-analytic, never holomorphic,
so parameter-ray continuation uses a two-real-dimensional Newton step with
a finite-difference Jacobian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .angles import Angle
from .errors import (
    BranchLost,
    JacobianSingular,
    NewtonDiverged,
    NoConvergence,
    NotEscaping,
)

__all__ = [
    "SecondIterate",
    "RayTrace",
    "StepPolicy",
    "Period1ArcPoint",
    "f_map",
    "p_map",
    "iterate",
    "second_iterate",
    "green_potential",
    "bottcher",
    "escape_coordinate",
    "trace_dynamical_ray",
    "trace_parameter_ray",
    "find_center",
    "period1_arc_point",
    "cusp_angles",
    "multicorn_membership",
    "default_escape_radius",
]

# Working moduli for exterior computations.
_ESCAPE_WORK = 1.0e6  # |z| beyond which the potential tail is negligible
_BAND_FLOOR = math.log(1.0e4)  # potential band floor for ray targets
_OVERFLOW = 1.0e120


def f_map(z, c, d: int):
    """One step of the antiholomorphic map z -> conj(z)^d + c."""
    return np.conj(z) ** d + c


def p_map(z, c, d: int):
    """One step of the second iterate P_c(z) = (z^d + conj(c))^d + c."""
    return (z**d + np.conj(c)) ** d + c


def p_prime(z, c, d: int):
    """Derivative of P_c: d^2 * z^(d-1) * (z^d + conj(c))^(d-1)."""
    return d * d * z ** (d - 1) * (z**d + np.conj(c)) ** (d - 1)


def iterate(z, c, d: int, n: int):
    """n-fold application of f_c.  Overflowing orbits saturate at inf."""
    w = complex(z) if np.isscalar(z) else np.asarray(z, dtype=complex)
    for _ in range(n):
        w = f_map(w, c, d)
        if np.isscalar(w) and not np.isfinite(w.real):
            return complex(np.inf, 0.0)
    return w


@dataclass(frozen=True)
class SecondIterate:
    """Coefficient form of P_c(z) = (z^d + conj(c))^d + c.

    Coefficients are indexed by descending power (np.polyval layout); only
    powers that are multiples of d are nonzero besides the constant term.
    """

    degree: int
    c: complex
    coeffs: np.ndarray

    @classmethod
    def from_param(cls, c: complex, d: int) -> "SecondIterate":
        n = d * d
        coeffs = np.zeros(n + 1, dtype=complex)
        cbar = np.conj(c)
        for j in range(d + 1):
            coeffs[n - d * j] += math.comb(d, j) * cbar ** (d - j)
        coeffs[n] += c
        return cls(degree=d, c=complex(c), coeffs=coeffs)

    def __call__(self, z):
        return np.polyval(self.coeffs, z)


def second_iterate(c: complex, d: int) -> SecondIterate:
    return SecondIterate.from_param(c, d)


def default_escape_radius(c: complex, d: int) -> float:
    """Radius guaranteeing escape once exceeded by the critical orbit."""
    return max(4.0, abs(c), 2.0 ** (1.0 / (d - 1)) + abs(c))


def multicorn_membership(
    c: complex,
    d: int,
    max_iter: int = 100_000,
    escape_radius: Optional[float] = None,
) -> Optional[int]:
    """Escape time of the critical orbit, or None when it stays bounded.

    The filled Julia set of a unicritical map is connected exactly when the
    critical orbit is bounded, so ``None`` means c is in the multicorn.
    The default iteration budget is generous because orbits near parabolic
    parameters escape very slowly.
    """
    radius = default_escape_radius(c, d) if escape_radius is None else escape_radius
    r2 = radius * radius
    z = 0.0 + 0.0j
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(max_iter):
            z = f_map(z, c, d)
            mag2 = z.real * z.real + z.imag * z.imag
            if mag2 > r2 or not np.isfinite(mag2):
                return n + 1
    return None


def green_potential(c: complex, z, d: int, max_iter: int = 20_000) -> float:
    """Escape-rate potential of P_c: lim d^(-2n) log|P_c^n(z)|.

    Returns 0.0 for orbits that stay bounded within the iteration budget.
    Once the orbit passes the working radius the remaining tail of the
    limit is below 1e-12 and iteration stops.
    """
    D = d * d
    w = complex(z)
    scale = 1.0
    for _ in range(max_iter):
        r = abs(w)
        if r > _ESCAPE_WORK:
            return scale * math.log(r)
        if not np.isfinite(r):
            return 0.0
        w = p_map(w, c, d)
        scale /= D
        if scale == 0.0:
            return 0.0
    return 0.0


def bottcher(c: complex, z: complex, d: int, max_iter: int = 4_000) -> complex:
    """Boettcher coordinate of P_c near infinity, tangent to the identity.

    Evaluated by the convergent product
    phi(z) = z * prod_m (P(z_m)/z_m^D)^(1/D^(m+1)) along the forward orbit,
    with every root taken on the principal branch.  Each factor splits as
    (1+u)^d (1+v) with u = conj(c)/z^d and v = c/(z^d+conj(c))^d; when
    either |u| or |v| reaches 1 the principal branch is no longer the
    analytic continuation from infinity and BranchLost is raised rather
    than returning a silently wrong branch.

    Raises NotEscaping when the orbit stays bounded.
    """
    D = d * d
    w = complex(z)
    log_phi = 0.0 + 0.0j
    inv = 1.0
    for _ in range(max_iter):
        r = abs(w)
        if r > _OVERFLOW:
            break
        zd = w**d
        u = np.conj(c) / zd
        denom = (zd + np.conj(c)) ** d
        v = c / denom if denom != 0 else complex(np.inf)
        if abs(u) >= 0.99 or abs(v) >= 0.99:
            if r > _ESCAPE_WORK:
                break  # tail already negligible
            if green_potential(c, z, d) == 0.0:
                raise NotEscaping(f"orbit of {z} under P_c stayed bounded")
            raise BranchLost(
                f"root branch cannot be continued from infinity at |z|={r:.3g}"
            )
        inv /= D
        correction = (d * np.log1p(u) + np.log1p(v)) * inv
        log_phi += correction
        if r > _ESCAPE_WORK and abs(correction) < 1e-18:
            break
        w = p_map(w, c, d)
    else:
        raise NotEscaping(f"orbit of {z} under P_c stayed bounded")
    return z * np.exp(log_phi)


def escape_coordinate(c: complex, d: int) -> complex:
    """The parameter-plane coordinate phi_c(c) on the multicorn exterior."""
    return bottcher(c, complex(c), d)


# ---------------------------------------------------------------------------
# Ray tracing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepPolicy:
    """Potential schedule for ray continuation.

    ``offset`` mode shrinks r-1 geometrically (dense sampling near the
    boundary, the regime where oscillating rays need resolution);
    ``exponent`` mode shrinks log r geometrically.  Rejected Newton steps
    halve the decrement and retry, up to ``max_rejects`` times per trace.
    """

    mode: str = "offset"  # "offset" | "exponent"
    factor: float = 1.1
    r_start: float = 64.0
    max_rejects: int = 60

    def next_r(self, r: float) -> float:
        if self.mode == "exponent":
            return r ** (1.0 / self.factor)
        return 1.0 + (r - 1.0) / self.factor

    @staticmethod
    def halve(r_from: float, r_to: float) -> float:
        """Intermediate level: geometric mean in potential offset."""
        return 1.0 + math.sqrt((r_from - 1.0) * (r_to - 1.0))


@dataclass
class RayTrace:
    """Sampled polyline of a dynamical or parameter ray.

    Potentials are strictly decreasing; ``status`` is "completed" or
    "aborted:<reason>" with all samples up to the failure retained.
    """

    angle: Angle
    kind: str  # "dynamical" | "parameter"
    degree: int
    potentials: np.ndarray
    points: np.ndarray
    status: str
    param: Optional[complex] = None

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def endpoint(self) -> complex:
        return complex(self.points[-1])

    def to_json_dict(self) -> dict:
        samples = [
            [float(r), float(z.real), float(z.imag)]
            for r, z in zip(self.potentials, self.points)
        ]
        out = {
            "angle": str(self.angle),
            "kind": self.kind,
            "degree": self.degree,
            "samples": samples,
            "status": self.status,
        }
        if self.param is not None:
            out["param"] = [self.param.real, self.param.imag]
        return out


def _band_depth(g: float, D: int) -> int:
    """Smallest k with D^k * g in the working band."""
    k = 0
    lifted = g
    while lifted < _BAND_FLOOR:
        lifted *= D
        k += 1
        if k > 2000:
            raise NoConvergence("potential too small to lift into band")
    return k


def _refine_target(c: complex, d: int, w: complex) -> complex:
    """Point with Boettcher coordinate w, |w| in the working band.

    Two Newton corrections on the product formula starting from the
    asymptotic identification z ~ w; the finite-difference derivative is
    adequate because phi is holomorphic and nearly the identity here.
    """
    z = w
    h = 1e-6 * abs(w)
    for _ in range(2):
        try:
            fz = bottcher(c, z, d) - w
            dphi = (bottcher(c, z + h, d) - bottcher(c, z - h, d)) / (2 * h)
        except (BranchLost, NotEscaping):
            return z
        if dphi == 0:
            return z
        z = z - fz / dphi
    return z


def _ray_target(c: complex, d: int, t: Angle, g: float) -> tuple[int, complex]:
    """Depth k and target point for the ray equation P^(k)(z) = T."""
    D = d * d
    k = _band_depth(g, D)
    lifted_g = g * (D**k)
    lifted_t = float(Angle(t.num * D**k, t.den))  # exact reduction mod 1
    w = math.exp(lifted_g) * complex(
        math.cos(2 * math.pi * lifted_t), math.sin(2 * math.pi * lifted_t)
    )
    return k, _refine_target(c, d, w)


def _orbit_k(z: complex, c: complex, d: int, k: int) -> complex:
    w = z
    for _ in range(k):
        w = p_map(w, c, d)
    return w


def _orbit_k_with_deriv(z: complex, c: complex, d: int, k: int) -> tuple[complex, complex]:
    w, dw = z, 1.0 + 0.0j
    for _ in range(k):
        dw *= p_prime(w, c, d)
        w = p_map(w, c, d)
    return w, dw


def _newton_ray_level(
    c: complex, d: int, k: int, target: complex, seed: complex,
    tol: float = 1e-12, max_iter: int = 50,
) -> Optional[complex]:
    z = seed
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            w, dw = _orbit_k_with_deriv(z, c, d, k)
            if not (np.isfinite(w) and np.isfinite(dw)) or dw == 0:
                return None
            step = (w - target) / dw
            z = z - step
            if abs(step) <= tol * max(1.0, abs(z)):
                return z
    return None


def trace_dynamical_ray(
    c: complex,
    t: Angle,
    d: int,
    r_min: float,
    policy: Optional[StepPolicy] = None,
) -> RayTrace:
    """Trace the dynamical ray of f_c at angle t down to potential r_min.

    Newton continuation level by level; a rejected level is retried at the
    halved potential decrement.  The trace aborts (keeping all samples)
    when the reject budget is exhausted.
    """
    if policy is None:
        policy = StepPolicy(mode="exponent")
    rs: list[float] = []
    zs: list[complex] = []
    status = "completed"

    r = policy.r_start
    seed = r * np.exp(2j * math.pi * float(t))
    rejects = 0
    while True:
        k, target = _ray_target(c, d, t, math.log(r))
        z = _newton_ray_level(c, d, k, target, seed)
        if z is None:
            rejects += 1
            if rejects > policy.max_rejects or not rs:
                status = "aborted:NewtonDiverged"
                break
            r = StepPolicy.halve(rs[-1], r)
            seed = zs[-1]
            continue
        rs.append(r)
        zs.append(z)
        seed = z
        if r <= r_min:
            break
        r = max(policy.next_r(r), r_min)
    return RayTrace(
        angle=t, kind="dynamical", degree=d,
        potentials=np.array(rs), points=np.array(zs, dtype=complex),
        status=status, param=complex(c),
    )


def _real_jacobian_fd(func: Callable[[complex], complex], c: complex,
                      fc: complex, h: float) -> np.ndarray:
    fx = (func(c + h) - fc) / h
    fy = (func(c + 1j * h) - fc) / h
    return np.array([[fx.real, fy.real], [fx.imag, fy.imag]])


def _newton_real_2d(
    func: Callable[[complex], complex], c0: complex,
    tol: float = 1e-11, max_iter: int = 48, fd_step: float = 1e-7,
) -> Optional[complex]:
    """Newton for a real-analytic (non-holomorphic) equation func(c) = 0.

    The map is treated as R^2 -> R^2 with a forward finite-difference
    Jacobian at relative step ``fd_step``.  Returns None on divergence or
    a singular Jacobian.
    """
    c = c0
    with np.errstate(over="ignore", invalid="ignore"):
        return _newton_real_2d_loop(func, c, tol, max_iter, fd_step)


def _newton_real_2d_loop(func, c, tol, max_iter, fd_step):
    for _ in range(max_iter):
        fc = func(c)
        if not np.isfinite(fc):
            return None
        h = fd_step * max(1.0, abs(c))
        J = _real_jacobian_fd(func, c, fc, h)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        norm = abs(J).max()
        if norm == 0 or abs(det) < 1e-14 * norm * norm:
            return None
        rhs = np.array([fc.real, fc.imag])
        dx = np.linalg.solve(J, rhs)
        c = c - complex(dx[0], dx[1])
        if math.hypot(dx[0], dx[1]) <= tol * max(1.0, abs(c)):
            return c
    return None


def trace_parameter_ray(
    t: Angle,
    d: int,
    r_min: float,
    policy: Optional[StepPolicy] = None,
) -> RayTrace:
    """Trace the parameter ray at angle t down to potential r_min.

    Solves phi_c(c) = r e^(2 pi i t) level by level via the lifted equation
    P_c^(k)(c) = T.  Because the parameter dependence is antiholomorphic in
    part, each level runs the two-real-dimensional Newton with a
    finite-difference Jacobian; the ray target is refreshed from the
    previous sample's dynamical plane.
    """
    if r_min <= 1.0:
        raise ValueError("r_min must exceed 1")
    if policy is None:
        policy = StepPolicy(mode="offset")
    rs: list[float] = []
    cs: list[complex] = []
    status = "completed"

    r = policy.r_start
    seed = policy.r_start * np.exp(2j * math.pi * float(t))
    rejects = 0
    while True:
        c_ref = cs[-1] if cs else seed
        k, target = _ray_target(c_ref, d, t, math.log(r))

        def level(c: complex, k: int = k, target: complex = target) -> complex:
            return _orbit_k(c, c, d, k) - target

        # The nominal relative step 1e-7 overshoots once the ray geometry
        # shrinks below it (e.g. near Misiurewicz tips), so cap the
        # difference step by the local continuation step size.
        fd = 1e-7 * max(1.0, abs(seed))
        if len(cs) >= 2:
            local = abs(cs[-1] - cs[-2])
            if local > 0:
                fd = max(1e-13, min(fd, 0.1 * local))
        c = _newton_real_2d(level, seed, fd_step=fd / max(1.0, abs(seed)))
        if c is None:
            rejects += 1
            if rejects > policy.max_rejects or not rs:
                status = "aborted:NewtonDiverged"
                break
            r = StepPolicy.halve(rs[-1], r)
            seed = cs[-1]
            continue
        rs.append(r)
        cs.append(c)
        seed = c
        if r <= r_min:
            break
        r = max(policy.next_r(r), r_min)
    return RayTrace(
        angle=t, kind="parameter", degree=d,
        potentials=np.array(rs), points=np.array(cs, dtype=complex),
        status=status,
    )


# ---------------------------------------------------------------------------
# Centers and the explicit period-1 parabolic arc
# ---------------------------------------------------------------------------


def find_center(d: int, k: int, seed: complex, tol: float = 1e-13) -> complex:
    """Parameter with superattracting period-k critical orbit near seed.

    Solves f_c^(k)(0) = 0; the equation is real-analytic in c, so the
    two-real-dimensional Newton step is used.  Raises NoConvergence when
    the seed is not close enough to a solution.
    """

    def crit(c: complex) -> complex:
        z = 0.0 + 0.0j
        for _ in range(k):
            z = f_map(z, c, d)
        return z

    c = _newton_real_2d(crit, complex(seed), tol=tol)
    if c is None or abs(crit(c)) > 1e-12:
        raise NoConvergence(f"no period-{k} center found near {seed}")
    return c


@dataclass(frozen=True)
class Period1ArcPoint:
    """Point of the explicit period-1 parabolic arc.

    The fixed-point equation conj(z)^d + c = z together with unit
    conjugate-derivative |d z^(d-1)| = 1 forces |z0| = d^(1/(1-d)); the arc
    is the image of phi -> (z0(phi), c(phi)) below.
    """

    degree: int
    phi: float
    z0: complex
    c: complex

    @property
    def velocity(self) -> complex:
        """dc/dphi along the arc; zero exactly at cusps."""
        rho = self.degree ** (1.0 / (1.0 - self.degree))
        d = self.degree
        return 1j * rho * np.exp(1j * self.phi) + 1j * d * rho**d * np.exp(
            -1j * d * self.phi
        )


def period1_arc_point(d: int, phi: float) -> Period1ArcPoint:
    """The period-1 parabolic parameter at arc angle phi."""
    rho = d ** (1.0 / (1.0 - d))
    z0 = rho * np.exp(1j * phi)
    c = z0 - np.conj(z0) ** d
    return Period1ArcPoint(degree=d, phi=float(phi), z0=complex(z0), c=complex(c))


def cusp_angles(d: int, tol: float = 1e-10) -> list[float]:
    """Arc angles of the d+1 cusps of the period-1 boundary.

    Cusps are the zeros of the arc speed |dc/dphi|.  Because these zeros
    are tangential, the bracketing runs on the derivative of the squared
    speed, and roots are kept only where the speed itself vanishes.
    """
    from scipy.optimize import brentq

    def speed2(phi: float) -> float:
        return abs(period1_arc_point(d, phi).velocity) ** 2

    h = 1e-6

    def dspeed2(phi: float) -> float:
        return (speed2(phi + h) - speed2(phi - h)) / (2 * h)

    n_grid = 16 * (d + 1)
    grid = np.linspace(0.0, 2 * math.pi, n_grid + 1)
    vals = [dspeed2(p) for p in grid]
    peak = max(speed2(p) for p in grid)
    roots = []
    for i in range(n_grid):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(grid[i])
        elif fa * fb < 0:
            roots.append(brentq(dspeed2, grid[i], grid[i + 1], xtol=1e-13))
    cusps = sorted(r % (2 * math.pi) for r in roots if speed2(r) < tol * peak)
    merged: list[float] = []
    for r in cusps:
        if not merged or abs(r - merged[-1]) > 1e-6:
            merged.append(r)
    return merged
