"""Independent checks: argument-principle zero counting, adaptive contour
quadrature and plain bisection.

Nothing here calls into the resonance solver; the solver is tested against
these routines, never the other way round.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import ModelParams, gamma_log_derivative


class ConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of panels before meeting its tolerance."""


class WindingError(RuntimeError):
    """Winding number could not be certified (zero on or too close to the contour)."""


# ---------------------------------------------------------------- contours


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def point(self, u):
        # measure from the nearer endpoint so points close to `end` keep full precision
        u = np.asarray(u, dtype=float)
        d = self.end - self.start
        return np.where(u <= 0.5, self.start + d * u, self.end - d * (1.0 - u))

    def tangent(self, u):
        return np.full_like(np.asarray(u, dtype=complex), self.end - self.start)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class Arc:
    """Circular arc, counterclockwise when theta1 > theta0."""

    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, u):
        th = self.theta0 + (self.theta1 - self.theta0) * u
        return self.center + self.radius * np.exp(1j * th)

    def tangent(self, u):
        th = self.theta0 + (self.theta1 - self.theta0) * u
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * th)

    @property
    def length(self) -> float:
        return abs(self.theta1 - self.theta0) * self.radius


Segment = "Line | Arc"


def circle(center: complex, radius: float) -> list:
    return [Arc(center, radius, 0.0, 2 * math.pi)]


def polygon(vertices: Sequence[complex]) -> list:
    vs = list(vertices)
    return [Line(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n: int):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = ((x + 1) / 2, w / 2)
    return _GL_CACHE[n]


def _panel_sums(f, seg, u0, u1, n):
    x, w = _gauss(n)
    h = (u1 - u0)[:, None]
    u = u0[:, None] + h * x[None, :]
    vals = f(seg.point(u)) * seg.tangent(u)
    return np.sum(vals * w[None, :], axis=1) * h[:, 0]


def contour_integral(
    f: Callable[[np.ndarray], np.ndarray],
    path: Sequence,
    tol: float = 1e-11,
    relative: bool = True,
    panels_per_segment: int = 64,
    max_panels: int = 400_000,
    return_error: bool = False,
):
    """Integral of ``f`` along a piecewise contour by adaptive Gauss-Legendre panels.

    Each panel is integrated with 10 and 20 nodes; panels whose difference
    exceeds their share of the tolerance are bisected.  The error target is
    ``tol * (1 + |value|)`` when ``relative`` is set, else ``tol``.
    ``f`` must accept and return complex arrays of any shape.
    """
    total_length = sum(seg.length for seg in path)
    work = []
    for seg in path:
        n0 = max(1, int(round(panels_per_segment)))
        edges = np.linspace(0.0, 1.0, n0 + 1)
        work.append((seg, edges[:-1], edges[1:]))

    value = 0j
    err_total = 0.0
    n_panels = sum(len(w[1]) for w in work)
    # estimate of |value| refined as panels are accepted
    magnitude = None
    while work:
        next_work = []
        coarse_all, fine_all = [], []
        for seg, u0, u1 in work:
            coarse = _panel_sums(f, seg, u0, u1, 10)
            fine = _panel_sums(f, seg, u0, u1, 20)
            coarse_all.append(coarse)
            fine_all.append(fine)
        if magnitude is None:
            magnitude = abs(sum(np.sum(fi) for fi in fine_all))
        target = tol * (1.0 + magnitude) if relative else tol
        for (seg, u0, u1), coarse, fine in zip(work, coarse_all, fine_all):
            err = np.abs(fine - coarse)
            share = target * seg.length * (u1 - u0) / total_length
            ok = err <= share
            value += np.sum(fine[ok])
            err_total += float(np.sum(err[ok]))
            if not np.all(ok):
                a, b = u0[~ok], u1[~ok]
                mid = 0.5 * (a + b)
                next_work.append((seg, np.concatenate([a, mid]), np.concatenate([mid, b])))
                n_panels += int(np.sum(~ok))
        if n_panels > max_panels:
            raise ConvergenceError(f"contour quadrature exceeded {max_panels} panels")
        work = next_work
        if relative:
            magnitude = max(magnitude, abs(value))
    if return_error:
        return complex(value), err_total
    return complex(value)


# ------------------------------------------------------------- rectangles


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate rectangle {self}")

    def path(self) -> list:
        return polygon(
            [
                complex(self.re_min, self.im_min),
                complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max),
                complex(self.re_min, self.im_max),
            ]
        )

    def grown(self, d: float) -> "Rectangle":
        return Rectangle(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def split(self) -> list["Rectangle"]:
        """2x2 subdivision."""
        rm = 0.5 * (self.re_min + self.re_max)
        im = 0.5 * (self.im_min + self.im_max)
        return [
            Rectangle(self.re_min, rm, self.im_min, im),
            Rectangle(rm, self.re_max, self.im_min, im),
            Rectangle(self.re_min, rm, im, self.im_max),
            Rectangle(rm, self.re_max, im, self.im_max),
        ]


@dataclass(frozen=True)
class WindingResult:
    count: int
    raw: complex
    certified: bool
    offset: float = 0.0  # how far the contour had to be pushed off zeros of Gamma


def _log_abs_gamma_over_scale(params: ModelParams, z) -> np.ndarray:
    """log(|Gamma(z)| / scale(z)) without overflow."""
    z = np.asarray(z, dtype=complex)
    y3, s, a = params.y3, params.sign, params.alpha
    shift = np.maximum(-2.0 * y3 * z.imag, 0.0)
    # Gamma * exp(-shift) with the exponential folded in
    damp = np.exp(-shift)
    g = (a - 1j * z / (4 * math.pi)) * damp + s * np.exp(2j * y3 * z - shift) / (8 * math.pi * y3)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(g)) + shift - np.log(params.scale(z))


def _boundary_samples(path, n_min: int = 1024, density: float = 64.0):
    pts = []
    for seg in path:
        n = max(n_min // len(path), int(seg.length * density))
        pts.append(seg.point(np.linspace(0.0, 1.0, n, endpoint=False)))
    return np.concatenate(pts)


def winding_integral(params: ModelParams, path, tol: float = 1e-4) -> complex:
    """(1 / 2 pi i) times the contour integral of Gamma'/Gamma."""
    val = contour_integral(
        lambda z: gamma_log_derivative(params, z), path, tol=2 * math.pi * tol, relative=False
    )
    return val / (2j * math.pi)


def winding_on_path(
    params: ModelParams,
    make_path: Callable[[float], list],
    boundary_floor: float = 1e-8,
    nudge: float = 1e-5,
    max_nudges: int = 5,
    margin: float = 0.1,
) -> WindingResult:
    """Argument-principle count for a contour family ``make_path(offset)``.

    ``make_path(0)`` is the requested contour; if Gamma comes within
    ``boundary_floor`` (relative) of zero on it, the offset is increased by
    ``nudge`` and the count retried.
    """
    offset = 0.0
    for _ in range(max_nudges + 1):
        path = make_path(offset)
        samples = _boundary_samples(path)
        if np.min(_log_abs_gamma_over_scale(params, samples)) > math.log(boundary_floor):
            try:
                raw = winding_integral(params, path)
            except ConvergenceError:
                # a zero between the samples: treat like a boundary hit
                offset += nudge
                continue
            count = int(round(raw.real))
            certified = abs(raw - count) < margin
            if not certified:
                raise WindingError(f"winding integral {raw} is not near an integer")
            return WindingResult(count, raw, certified, offset)
        offset += nudge
    raise WindingError("zero of Gamma persists on the contour after nudging")


def winding_count(params: ModelParams, rect: Rectangle, **kwargs) -> WindingResult:
    """Number of zeros of Gamma inside ``rect``, with multiplicity."""
    return winding_on_path(params, lambda d: rect.grown(d).path() if d else rect.path(), **kwargs)


def lower_half_disk_path(radius: float, eps: float = 1e-6, indent: float | None = None) -> list:
    """Counterclockwise boundary of {|z| < radius, Im z < -eps}.

    With ``indent`` the top edge detours over the origin along a circle of
    that radius, so z = 0 is enclosed as well.
    """
    x0 = math.sqrt(radius * radius - eps * eps)
    phi = math.asin(eps / radius)
    arc = Arc(0j, radius, math.pi + phi, 2 * math.pi - phi)
    if indent is None:
        return [Line(complex(x0, -eps), complex(-x0, -eps)), arc]
    psi = math.asin(eps / indent)
    xi = math.sqrt(indent * indent - eps * eps)
    return [
        Line(complex(x0, -eps), complex(xi, -eps)),
        Arc(0j, indent, -psi, math.pi + psi),
        Line(complex(-xi, -eps), complex(-x0, -eps)),
        arc,
    ]


def count_zeros_half_disk(
    params: ModelParams, radius: float, eps: float = 1e-6, include_origin: bool = False
) -> WindingResult:
    """Zeros of Gamma in {|z| < radius, Im z < -eps}, plus z = 0 when requested."""
    indent = min(1e-3, radius / 4) if include_origin else None
    return winding_on_path(
        params, lambda d: lower_half_disk_path(radius + d, eps + d, indent if indent is None else indent + d)
    )


# ----------------------------------------------------------------- bisection


def bisect(f: Callable[[float], float], lo: float, hi: float, rtol: float = 1e-14) -> float:
    """Root of a continuous real function with a sign change on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(1.0, abs(mid)) or mid in (lo, hi):
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
