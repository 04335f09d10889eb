"""Escape-time images of multicorns and Julia sets with overlays.

Rendering is deterministic: a fixed config yields bit-identical images.
Binary PPM (P6) output needs no dependencies and is exactly comparable in
tests; PNG is written through Pillow when it is installed.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import RayTrace, default_escape_radius

__all__ = [
    "RenderConfig",
    "render_multicorn",
    "render_julia",
    "overlay",
    "write_ppm",
    "save_image",
    "escape_grid",
]


@dataclass(frozen=True)
class RenderConfig:
    center: complex = 0.0 + 0.0j
    width: float = 4.0
    pixels: tuple[int, int] = (512, 512)  # (columns, rows)
    max_iter: int = 512
    escape_radius: Optional[float] = None
    palette: int = 0

    def __post_init__(self):
        if self.pixels[0] <= 0 or self.pixels[1] <= 0 or self.width <= 0:
            raise ValueError("pixels and width must be positive")

    @property
    def height(self) -> float:
        w, h = self.pixels
        return self.width * h / w

    def grid(self) -> np.ndarray:
        """Complex coordinate of each pixel center, row 0 at the top."""
        w, h = self.pixels
        xs = self.center.real + self.width * (np.arange(w) + 0.5 - w / 2) / w
        ys = self.center.imag + self.height * (h / 2 - np.arange(h) - 0.5) / h
        return xs[None, :] + 1j * ys[:, None]

    def to_pixel(self, z: complex) -> tuple[float, float]:
        """Fractional pixel coordinates (col, row) of a complex point."""
        w, h = self.pixels
        col = (z.real - self.center.real) / self.width * w + w / 2 - 0.5
        row = h / 2 - (z.imag - self.center.imag) / self.height * h - 0.5
        return col, row


def _escape_rows(z0: np.ndarray, c: np.ndarray, d: int, max_iter: int,
                 radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised escape iteration of z -> conj(z)^d + c on one row block."""
    z = z0.astype(complex).copy()
    count = np.full(z.shape, -1, dtype=np.int32)
    final = np.zeros(z.shape, dtype=complex)
    alive = np.ones(z.shape, dtype=bool)
    r2 = radius * radius
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(max_iter):
            z[alive] = np.conj(z[alive]) ** d + (
                c[alive] if c.shape == z.shape else c
            )
            mag2 = z.real**2 + z.imag**2
            esc = alive & ((mag2 > r2) | ~np.isfinite(mag2))
            count[esc] = n + 1
            final[esc] = z[esc]
            alive &= ~esc
            if not alive.any():
                break
    return count, final


def escape_grid(
    z0: np.ndarray, c, d: int, max_iter: int, radius: float, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Escape counts (-1 for bounded) and final values over a grid."""
    c_arr = np.asarray(c, dtype=complex)
    if threads <= 1 or z0.shape[0] < 2 * threads:
        return _escape_rows(z0, c_arr, d, max_iter, radius)
    blocks = np.array_split(np.arange(z0.shape[0]), threads)
    counts = np.empty(z0.shape, dtype=np.int32)
    finals = np.empty(z0.shape, dtype=complex)

    def work(rows):
        cb = c_arr[rows] if c_arr.shape == z0.shape else c_arr
        counts[rows], finals[rows] = _escape_rows(z0[rows], cb, d, max_iter, radius)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, blocks))
    return counts, finals


def _smooth_value(count: np.ndarray, final: np.ndarray, d: int,
                  radius: float) -> np.ndarray:
    """Potential-smoothed iteration count on escaped pixels."""
    v = count.astype(float)
    esc = count > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.abs(final[esc])
        mag = np.where(np.isfinite(mag) & (mag > 1.0), mag, radius)
        v[esc] += 1.0 - np.log(np.log(mag) / math.log(radius)) / math.log(d)
    return v


def _apply_palette(v: np.ndarray, inside: np.ndarray, palette: int) -> np.ndarray:
    img = np.zeros(v.shape + (3,), dtype=np.uint8)
    t = np.zeros_like(v)
    esc = ~inside
    if esc.any():
        t[esc] = np.sqrt(np.maximum(v[esc], 0.0) / max(1.0, v[esc].max()))
    if palette == 0:  # grayscale ramp
        g = (255 * t).astype(np.uint8)
        img[..., 0] = img[..., 1] = img[..., 2] = g
    else:  # fixed sine palette
        img[..., 0] = (255 * (0.5 + 0.5 * np.sin(6.0 * t + 0.0))).astype(np.uint8)
        img[..., 1] = (255 * (0.5 + 0.5 * np.sin(6.0 * t + 2.1))).astype(np.uint8)
        img[..., 2] = (255 * (0.5 + 0.5 * np.sin(6.0 * t + 4.2))).astype(np.uint8)
    img[inside] = 0
    return img


def render_multicorn(d: int, config: RenderConfig, threads: int = 1) -> np.ndarray:
    """Escape-time image of the degree-d multicorn (parameter plane)."""
    cgrid = config.grid()
    radius = config.escape_radius or (
        default_escape_radius(0, d) + float(np.abs(cgrid).max())
    )
    counts, finals = escape_grid(
        np.zeros_like(cgrid), cgrid, d, config.max_iter, radius, threads
    )
    inside = counts < 0
    v = _smooth_value(counts, finals, d, radius)
    return _apply_palette(v, inside, config.palette)


def render_julia(c: complex, d: int, config: RenderConfig,
                 threads: int = 1) -> np.ndarray:
    """Escape-time image of the filled Julia set of f_c."""
    zgrid = config.grid()
    radius = config.escape_radius or default_escape_radius(c, d)
    counts, finals = escape_grid(zgrid, complex(c), d, config.max_iter, radius, threads)
    inside = counts < 0
    v = _smooth_value(counts, finals, d, radius)
    return _apply_palette(v, inside, config.palette)


def membership_grid(d: int, config: RenderConfig, threads: int = 1) -> np.ndarray:
    """Boolean inside/outside grid of the multicorn (for symmetry tests)."""
    cgrid = config.grid()
    radius = config.escape_radius or (
        default_escape_radius(0, d) + float(np.abs(cgrid).max())
    )
    counts, _ = escape_grid(
        np.zeros_like(cgrid), cgrid, d, config.max_iter, radius, threads
    )
    return counts < 0


def _splat(img: np.ndarray, col: float, row: float, color, alpha: float):
    """Bilinear splat of one sample onto up to four pixels."""
    h, w = img.shape[:2]
    c0, r0 = int(math.floor(col)), int(math.floor(row))
    fc, fr = col - c0, row - r0
    for dc, dr, wgt in (
        (0, 0, (1 - fc) * (1 - fr)),
        (1, 0, fc * (1 - fr)),
        (0, 1, (1 - fc) * fr),
        (1, 1, fc * fr),
    ):
        cc, rr = c0 + dc, r0 + dr
        if 0 <= cc < w and 0 <= rr < h and wgt > 0:
            a = min(1.0, alpha * wgt)
            img[rr, cc] = (
                (1 - a) * img[rr, cc].astype(float) + a * np.asarray(color, float)
            ).astype(np.uint8)


def overlay(
    image: np.ndarray,
    config: RenderConfig,
    traces: Sequence = (),
    markers: Sequence[complex] = (),
    color=(255, 64, 32),
    marker_color=(64, 160, 255),
) -> np.ndarray:
    """Composite ray traces, arc polylines and markers over an image.

    Traces may be RayTrace objects or bare sequences of complex points.
    Polylines are drawn anti-aliased by dense sub-pixel sampling; segments
    leaving the frame are clipped with a warning.
    """
    img = image.copy()
    h, w = img.shape[:2]
    clipped = False
    for tr in traces:
        pts = np.asarray(tr.points if isinstance(tr, RayTrace) else tr, dtype=complex)
        if pts.size < 2:
            continue
        for p, q in zip(pts[:-1], pts[1:]):
            c0, r0 = config.to_pixel(complex(p))
            c1, r1 = config.to_pixel(complex(q))
            if (
                max(c0, c1) < -1 or min(c0, c1) > w or
                max(r0, r1) < -1 or min(r0, r1) > h
            ):
                clipped = True
                continue
            n = max(2, int(2.0 * math.hypot(c1 - c0, r1 - r0)) + 1)
            for s in np.linspace(0.0, 1.0, n):
                _splat(img, c0 + s * (c1 - c0), r0 + s * (r1 - r0), color, 0.9)
    for m in markers:
        col, row = config.to_pixel(complex(m))
        if not (0 <= col < w and 0 <= row < h):
            clipped = True
            continue
        for dc in (-2, -1, 0, 1, 2):
            _splat(img, col + dc, row, marker_color, 1.0)
            _splat(img, col, row + dc, marker_color, 1.0)
    if clipped:
        warnings.warn("overlay elements outside the frame were clipped")
    return img


def write_ppm(image: np.ndarray, path: str) -> None:
    """Binary PPM (P6), always available and bit-exactly testable."""
    h, w = image.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(image.astype(np.uint8).tobytes())


def save_image(image: np.ndarray, path: str) -> None:
    """Write PPM by extension default; PNG when Pillow is present."""
    if path.endswith(".png"):
        try:
            from PIL import Image
        except ImportError as exc:
            raise RuntimeError(
                "PNG output needs Pillow; use a .ppm path instead"
            ) from exc
        Image.fromarray(image, mode="RGB").save(path)
    else:
        write_ppm(image, path)
