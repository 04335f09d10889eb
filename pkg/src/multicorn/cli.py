"""Command-line entry point: machine-readable reports for every subsystem.

Every sub-command emits a JSON run report on stdout (or --out), except
index-scan which emits CSV and render which writes an image.  Exit codes:
0 success, 1 numeric failure (partial report on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional

import numpy as np

from . import __version__
from .angles import Angle, orbit_info
from .classifier import classification_report, classify
from .dynamics import (
    StepPolicy,
    cusp_angles,
    find_center,
    period1_arc_point,
    trace_dynamical_ray,
    trace_parameter_ray,
)
from .errors import MulticornError
from .fatou import (
    arc_point_with_height,
    critical_ecalle_height,
    fatou_chart,
    fixed_point_index,
    gate_transit,
    parabolic_data,
    project_ray_to_cylinder,
    refine_parabolic_parameter,
    undecorated_certificate,
    wiggle_metric,
)
from .render import RenderConfig, overlay, render_julia, render_multicorn, save_image

SUBCOMMANDS = (
    "classify", "orbit", "portrait", "trace", "fatou", "cylinder",
    "undecorated", "gate", "index-scan", "wiggle-report", "render", "selftest",
)


def _angle(text: str) -> Angle:
    try:
        return Angle.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _complex_pair(text: str) -> complex:
    try:
        re, im = (float(part) for part in text.split(","))
        return complex(re, im)
    except Exception as exc:
        raise argparse.ArgumentTypeError(
            f"expected 're,im', got {text!r}"
        ) from exc


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, allow_nan=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _wrap(command: str, params: dict, results: dict, t0: float) -> dict:
    return {
        "command": command,
        "parameters": params,
        "results": results,
        "version": __version__,
        "timing_seconds": round(time.time() - t0, 6),
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="multicorn",
        description="Parameter-ray combinatorics and numerics of the multicorns",
    )
    ap.add_argument(
        "--threads", type=int,
        default=int(os.environ.get("MULTICORN_THREADS", "1")),
        help="worker cap for data-parallel stages",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="combinatorial verdict for a ray angle")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--angle", type=_angle, required=True)
    p.add_argument("--json", action="store_true", help="full evidence report")
    p.add_argument("--out")

    p = sub.add_parser("orbit", help="exact orbit of an angle under t -> -d t")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--angle", type=_angle, required=True)
    p.add_argument("--out")

    p = sub.add_parser("portrait", help="candidate orbit portrait and verdict")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--angle", type=_angle, required=True)
    p.add_argument("--out")

    p = sub.add_parser("trace", help="trace a dynamical or parameter ray")
    p.add_argument("--kind", choices=("param", "dyn"), required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--angle", type=_angle, required=True)
    p.add_argument("--param", type=_complex_pair, help="base c for dynamical rays")
    p.add_argument("--rmin", type=float, required=True)
    p.add_argument("--factor", type=float, default=1.1, help="potential step factor")
    p.add_argument("--out")

    p = sub.add_parser("fatou", help="period-1 arc point with parabolic data")
    p.add_argument("--degree", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--phi", type=float, help="arc angle")
    g.add_argument("--height", type=float, help="critical orbit height")
    p.add_argument("--out")

    p = sub.add_parser("cylinder", help="heights of a ray in the repelling cylinder")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--angle", type=_angle, required=True)
    p.add_argument("--param", type=_complex_pair,
                   help="parabolic parameter (default: located from the ray)")
    p.add_argument("--period", type=int, help="odd orbit period (default: classified)")
    p.add_argument("--out")

    p = sub.add_parser("undecorated", help="round sub-cylinder certificate")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--floor", type=float, default=0.02)
    p.add_argument("--probes", type=int, default=1024)
    p.add_argument("--out")

    p = sub.add_parser("gate", help="gate transit count near the period-1 arc")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--s", type=float, required=True, help="outward perturbation")
    p.add_argument("--out")

    p = sub.add_parser("index-scan", help="fixed-point index along the period-1 arc")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--phi-range", required=True, metavar="A:B:N")
    p.add_argument("--out")

    p = sub.add_parser("wiggle-report", help="oscillation witness bundle for a ray")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--angle", type=_angle, required=True)
    p.add_argument("--rmin", type=float, default=1 + 1e-7)
    p.add_argument("--rcut", type=float, default=1 + 1e-4)
    p.add_argument("--out")

    p = sub.add_parser("render", help="escape-time image with overlays")
    p.add_argument("target", choices=("multicorn", "julia"))
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--param", type=_complex_pair, help="c for julia renders")
    p.add_argument("--center", type=_complex_pair, default=0j)
    p.add_argument("--width", type=float, default=4.5)
    p.add_argument("--px", default="512x512")
    p.add_argument("--iter", type=int, default=512)
    p.add_argument("--palette", type=int, default=1)
    p.add_argument("--overlay", help="JSON file with traces/markers to composite")
    p.add_argument("--out", required=True)

    sub.add_parser("selftest", help="fast subset of the acceptance checks")
    return ap


# ---------------------------------------------------------------------------
# Sub-command implementations
# ---------------------------------------------------------------------------


def _cmd_classify(args) -> dict:
    if args.json:
        return classification_report(args.angle, args.degree)
    cls = classify(args.angle, args.degree)
    return cls.to_json_dict()


def _cmd_orbit(args) -> dict:
    info = orbit_info(args.angle, args.degree)
    return {
        "angle": str(args.angle),
        "degree": args.degree,
        "preperiod": info.preperiod,
        "period": info.period,
        "tail": [str(a) for a in info.tail],
        "cycle": [str(a) for a in info.cycle],
    }


def _cmd_portrait(args) -> dict:
    report = classification_report(args.angle, args.degree)
    return {
        "angle": report["angle"],
        "degree": report["degree"],
        "portrait": report["portrait"],
        "characteristic_arc": report["characteristic_arc"],
        "failure_reason": report["failure_reason"],
        "reflection_invariant": report["reflection_invariant"],
        "class": report["class"],
    }


def _cmd_trace(args) -> dict:
    policy = StepPolicy(mode="offset", factor=args.factor)
    if args.kind == "param":
        tr = trace_parameter_ray(args.angle, args.degree, args.rmin, policy)
    else:
        if args.param is None:
            raise MulticornError("dynamical traces need --param re,im")
        tr = trace_dynamical_ray(args.param, args.angle, args.degree,
                                 args.rmin, policy)
    return tr.to_json_dict()


def _cmd_fatou(args) -> dict:
    d = args.degree
    if args.phi is not None:
        point = period1_arc_point(d, args.phi)
        c = point.c
    else:
        c = arc_point_with_height(d, args.height)
        point = None
    pdata = parabolic_data(c, 1, d)
    chart = fatou_chart(pdata, "attracting", anchor=c)
    height = critical_ecalle_height(c, 1, d, pdata=pdata)
    return {
        "degree": d,
        "phi": getattr(point, "phi", None),
        "c": [c.real, c.imag],
        "z0": [pdata.z0.real, pdata.z0.imag],
        "multiplier": [pdata.multiplier.real, pdata.multiplier.imag],
        "quadratic_coeff": [pdata.a.real, pdata.a.imag],
        "critical_height": height,
        "re_kappa": chart.re_kappa,
        "equator_shift": chart.beta,
        "anchor": [chart.anchor.real, chart.anchor.imag],
        "cusp_angles": cusp_angles(d),
    }


def _resolve_arc_parameter(angle: Angle, d: int, rmin: float = 1 + 1e-6):
    """Odd period and on-arc parameter for a ray angle (traced + refined)."""
    cls = classify(angle, d)
    k = cls.component_period if cls.component_period % 2 == 1 else None
    if k is None:
        raise MulticornError(
            f"ray {angle} is classified {cls.tag}; no odd-period arc to project on"
        )
    if k == 1 and cls.tag == "LandsOnArcPoint":
        # Fixed rays land at the height-0 point of a period-1 arc.
        j = round(float(angle) * (d + 1))
        c = period1_arc_point(d, 0.0).c * np.exp(2j * np.pi * j / (d + 1))
        return k, complex(c)
    tr = trace_parameter_ray(angle, d, rmin)
    return k, refine_parabolic_parameter(tr.endpoint(), k, d)


def _cmd_cylinder(args) -> dict:
    d = args.degree
    if args.param is not None:
        if args.period is None:
            raise MulticornError("--param also needs --period")
        k, c = args.period, args.param
    else:
        k, c = _resolve_arc_parameter(args.angle, d)
    interval, samples = project_ray_to_cylinder(c, k, args.angle, d)
    return {
        "angle": str(args.angle),
        "degree": d,
        "period": k,
        "param": [c.real, c.imag],
        "heights": interval.to_json_dict(),
        "n_samples": int(samples.size),
    }


def _cmd_undecorated(args) -> dict:
    d = args.degree
    c = period1_arc_point(d, args.phi).c
    cert = undecorated_certificate(c, d, floor=args.floor, n_probes=args.probes)
    report = cert.to_json_dict()
    report["degree"] = d
    report["phi"] = args.phi
    report["round_modulus"] = float(np.pi / (2 * np.log(2)))
    return report


def _cmd_gate(args) -> dict:
    d = args.degree
    c_arc = period1_arc_point(d, 0.0).c
    stats = gate_transit(c_arc + args.s, 1, d, c_ref=c_arc)
    report = stats.to_json_dict()
    report["degree"] = d
    report["c_out"] = [(c_arc + args.s).real, (c_arc + args.s).imag]
    report["N_sqrt_s"] = stats.N * args.s**0.5
    return report


def _cmd_index_scan(args) -> str:
    d = args.degree
    try:
        a, b, n = args.phi_range.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise MulticornError(f"bad --phi-range {args.phi_range!r}: want A:B:N") from exc
    lines = ["phi,re_iota,im_iota"]
    for phi in np.linspace(a, b, n):
        c = period1_arc_point(d, float(phi)).c
        iota = fixed_point_index(c, 1, d)
        lines.append(f"{phi:.12g},{iota.real:.12g},{iota.imag:.12g}")
    return "\n".join(lines) + "\n"


def _cmd_wiggle_report(args) -> dict:
    d = args.degree
    cls = classify(args.angle, d)
    report: dict = {"classification": cls.to_json_dict()}
    if not cls.wiggles:
        report["warning"] = f"ray {args.angle} is classified as landing"
    tr = trace_parameter_ray(args.angle, d, args.rmin)
    report["trace_status"] = tr.status
    report["trace_samples"] = int(tr.points.size)
    report["endpoint"] = [tr.endpoint().real, tr.endpoint().imag]
    report["wiggle_metric"] = wiggle_metric(tr, args.rcut)
    try:
        k, c_arc = _resolve_arc_parameter(args.angle, d)
        interval, _ = project_ray_to_cylinder(c_arc, k, args.angle, d)
        report["arc_parameter"] = [c_arc.real, c_arc.imag]
        report["component_period"] = k
        report["heights"] = interval.to_json_dict()
    except MulticornError as exc:
        report["heights_error"] = str(exc)
    return report


def _load_overlay(path: str):
    with open(path) as fh:
        data = json.load(fh)
    traces = []
    markers = []
    entries = data if isinstance(data, list) else [data]
    if isinstance(data, dict) and ("traces" in data or "markers" in data):
        entries = data.get("traces", [])
        markers = [complex(x, y) for x, y in data.get("markers", [])]
    for entry in entries:
        samples = entry["samples"] if isinstance(entry, dict) else entry
        traces.append(np.array([complex(s[1], s[2]) for s in samples]))
    return traces, markers


def _cmd_render(args) -> dict:
    try:
        w, h = (int(x) for x in args.px.lower().split("x"))
    except ValueError as exc:
        raise MulticornError(f"bad --px {args.px!r}: want WxH") from exc
    cfg = RenderConfig(
        center=args.center, width=args.width, pixels=(w, h),
        max_iter=args.iter, palette=args.palette,
    )
    if args.target == "julia":
        if args.param is None:
            raise MulticornError("julia renders need --param re,im")
        img = render_julia(args.param, args.degree, cfg, threads=args.threads)
    else:
        img = render_multicorn(args.degree, cfg, threads=args.threads)
    if args.overlay:
        traces, markers = _load_overlay(args.overlay)
        img = overlay(img, cfg, traces=traces, markers=markers)
    save_image(img, args.out)
    return {
        "target": args.target,
        "degree": args.degree,
        "pixels": [w, h],
        "out": args.out,
        "palette": args.palette,
    }


def _cmd_selftest(args) -> dict:
    """Fast subset of the acceptance checks; raises on failure."""
    t0 = time.time()
    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str = ""):
        checks.append((name, bool(ok), detail))

    # Combinatorial verdicts.
    expected = {
        ("0", 2): "LandsOnArcPoint",
        ("3/7", 2): "WigglesRoot",
        ("4/7", 2): "WigglesRoot",
        ("1/7", 2): "LandsEvenParabolic",
        ("1/9", 2): "WigglesCoRoot",
        ("1/15", 2): "LandsEvenParabolic",
        ("1/2", 2): "LandsMisiurewicz",
    }
    for (text, d), tag in expected.items():
        got = classify(Angle.parse(text), d).tag
        check(f"classify {text}", got == tag, f"got {got}")

    # Center and arc anchors.
    c3 = find_center(2, 3, -1.7)
    check("period-3 center", abs(c3 - (-1.754877666246693)) < 1e-9, str(c3))
    p2 = period1_arc_point(2, 0.0)
    check("arc anchor d=2", p2.c == 0.25, str(p2.c))
    p3 = period1_arc_point(3, 0.0)
    check("arc anchor d=3", abs(p3.c - 2 * 3**-1.5) < 1e-12, str(p3.c))

    # Parabolic data and the equator normalisation at c = 1/4.
    pdata = parabolic_data(0.25, 1, 2)
    check("parabolic z0", abs(pdata.z0 - 0.5) < 1e-10, str(pdata.z0))
    check("multiplier", abs(pdata.multiplier - 1) < 1e-10)
    chart = fatou_chart(pdata, "attracting")
    check("Re kappa", abs(chart.re_kappa - 0.5) < 1e-8, str(chart.re_kappa))
    h = critical_ecalle_height(0.25, 1, 2, pdata=pdata)
    check("critical height", abs(h) < 1e-6, str(h))

    # Gate monotonicity (cheap pair).
    g1 = gate_transit(0.25 + 1e-3, 1, 2, c_ref=0.25)
    g2 = gate_transit(0.25 + 1e-4, 1, 2, c_ref=0.25)
    check("gate counts grow", g2.N > g1.N, f"{g1.N} -> {g2.N}")

    # Index stability at the arc midpoint.
    iota = fixed_point_index(0.25, 1, 2, pdata=pdata)
    check("index real", abs(iota.imag) < 1e-6, str(iota))
    check("index value", abs(iota - pdata.b / pdata.a**2) < 1e-6)

    failures = [c for c in checks if not c[1]]
    report = {
        "checks": [{"name": n, "ok": ok, "detail": det} for n, ok, det in checks],
        "failures": len(failures),
        "elapsed_seconds": round(time.time() - t0, 3),
    }
    if failures:
        raise MulticornError(json.dumps(report))
    return report


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.time()
    params = {
        k: (str(v) if isinstance(v, Angle) else
            [v.real, v.imag] if isinstance(v, complex) else v)
        for k, v in vars(args).items() if k != "command" and v is not None
    }
    handlers = {
        "classify": _cmd_classify,
        "orbit": _cmd_orbit,
        "portrait": _cmd_portrait,
        "trace": _cmd_trace,
        "fatou": _cmd_fatou,
        "cylinder": _cmd_cylinder,
        "undecorated": _cmd_undecorated,
        "gate": _cmd_gate,
        "index-scan": _cmd_index_scan,
        "wiggle-report": _cmd_wiggle_report,
        "render": _cmd_render,
        "selftest": _cmd_selftest,
    }
    try:
        result = handlers[args.command](args)
    except MulticornError as exc:
        _emit(
            _wrap(args.command, params, {"error": type(exc).__name__,
                                         "message": str(exc)}, t0),
            getattr(args, "out", None),
        )
        return 1
    if args.command == "index-scan":
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(result)
        else:
            sys.stdout.write(result)
        return 0
    # For renders --out is the image path; the report goes to stdout.
    out = None if args.command == "render" else getattr(args, "out", None)
    _emit(_wrap(args.command, params, result, t0), out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
