"""Residues of 1/Gamma and the resonance expansions built from them.

Two expansions are provided:

* wave equation: the coefficient f_j attached to a simple resonance z_j for
  compactly supported Cauchy data (w0, w1);
* Schroedinger propagator kernel of H = -Laplacian (continuous part), split as
  free half-space kernel + residue sum over resonances with
  -pi/4 < arg z < 0 + a background integral along the ray arg z = -pi/4.

With F(z) = G_z(x) G_z(x') / Gamma(z) the rank-one part of the resolvent
kernel, the continuous part of the propagator is

    (1 / 2 pi i) int_0^inf exp(-i t z^2) [K(z) - K(-z)] 2 z dz,

and rotating the half line onto the ray picks up minus the residues inside
the sector.  ``horizontal_contour_kernel`` evaluates the same integral on a
contour that encloses no zero of Gamma and is used as the independent check.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import (
    FOUR_PI,
    BoundaryCondition,
    ModelParams,
    gamma,
    gamma_derivative,
    green_at_source,
    green_halfspace,
    resolvent_kernel,
)
from .oracle import Line, Rectangle, circle, contour_integral, winding_count
from .solver import Resonance, find_all, find_branch, find_low_pair


class SimpleZeroError(ArithmeticError):
    """Gamma' vanishes (numerically) at the requested point: not a simple zero."""


class QuadratureError(RuntimeError):
    """Estimated quadrature error above the requested tolerance."""


# ---------------------------------------------------------------- residues


def residue_gamma_inv(params: ModelParams, z_n: complex, check_tol: float = 1e-9, floor: float = 1e-10) -> complex:
    """Residue of 1/Gamma at a simple zero, i.e. 1/Gamma'(z_n)."""
    g = complex(gamma(params, z_n))
    if abs(g) > check_tol * params.scale(z_n):
        raise ValueError(f"z={z_n} is not a zero of Gamma (|Gamma|={abs(g):.3g})")
    d = complex(gamma_derivative(params, z_n))
    if abs(d) < floor / FOUR_PI:
        raise SimpleZeroError(f"Gamma'({z_n}) = {d}: double zero, use laurent_at_zero")
    return 1.0 / d


def residue_closed_form(params: ModelParams, z_n: complex) -> complex:
    """4 pi i / (1 - s exp(2 i y3 z_n)); for Dirichlet (s = +1) the textbook form."""
    return 4j * math.pi / (1.0 - params.sign * np.exp(2j * params.y3 * z_n))


def residue_contour(params: ModelParams, z_n: complex, radius: float | None = None, others=None) -> complex:
    """(1 / 2 pi i) times the integral of 1/Gamma on a small circle about z_n.

    The radius defaults to min(0.1, half the distance to the nearest other
    zero in ``others``).
    """
    if radius is None:
        radius = 0.1
        for r in others or ():
            zo = r.z if isinstance(r, Resonance) else complex(r)
            d = abs(zo - z_n)
            if d > 0:
                radius = min(radius, 0.5 * d)
    val = contour_integral(lambda z: 1.0 / gamma(params, z), circle(z_n, radius), tol=1e-13)
    return val / (2j * math.pi)


# ----------------------------------------------------------- test functions


class TestFunctionKind(enum.Enum):
    __test__ = False  # keep pytest from collecting this enum
    GAUSSIAN_BUMP = "GaussianBump"


@dataclass(frozen=True)
class TestFunction:
    """Gaussian amplitude * exp(-|x - center|^2 / (2 width^2)) restricted to a box.

    ``box`` is ((x0, x1), (y0, y1), (z0, z1)) and must sit in x3 > 0.
    """

    __test__ = False

    center: tuple[float, float, float]
    width: float
    box: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    amplitude: complex = 1.0
    kind: TestFunctionKind = TestFunctionKind.GAUSSIAN_BUMP

    def __post_init__(self):
        box = tuple((float(a), float(b)) for a, b in self.box)
        if len(box) != 3 or any(not a < b for a, b in box):
            raise ValueError(f"degenerate support box {self.box}")
        if not box[2][0] > 0.0:
            raise ValueError("support box must lie in the open half-space x3 > 0")
        if not self.width > 0.0:
            raise ValueError("width must be positive")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def diagonal(self) -> float:
        return math.sqrt(sum((b - a) ** 2 for a, b in self.box))

    def distance_to(self, point) -> float:
        """Euclidean distance from ``point`` to the support box."""
        d = [max(a - p, 0.0, p - b) for (a, b), p in zip(self.box, point)]
        return math.sqrt(sum(c * c for c in d))

    def excludes(self, point, fraction: float = 0.1) -> bool:
        """True when ``point`` is at least fraction * diagonal away from the box."""
        return self.distance_to(point) >= fraction * self.diagonal

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1)
        inside = np.ones(r2.shape, dtype=bool)
        for i, (a, b) in enumerate(self.box):
            inside &= (x[..., i] >= a) & (x[..., i] <= b)
        return np.where(inside, self.amplitude * np.exp(-0.5 * r2 / self.width**2), 0.0)

    def scaled(self, factor: complex) -> "TestFunction":
        return TestFunction(self.center, self.width, self.box, self.amplitude * factor, self.kind)


def _tensor_rule(box, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    axes, weights = [], []
    for a, b in box:
        axes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    wx, wy, wz = np.meshgrid(*weights, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
    return pts, (wx * wy * wz).ravel()


def pairing(params: ModelParams, z: complex, w: TestFunction, nodes: int = 32, tol: float = 1e-8):
    """<G_z, w> = integral of G_{z,y}(x') w(x') dx' over the support box.

    Tensor Gauss-Legendre with ``nodes`` points per axis; the error estimate is
    the change against half as many nodes.  Returns (value, error).
    """
    if w is None or w.amplitude == 0:
        return 0j, 0.0
    if not w.excludes(params.y):
        raise ValueError("support box must stay 10% of its diagonal away from the interaction point")
    vals = []
    for n in (nodes, nodes // 2):
        pts, wts = _tensor_rule(w.box, n)
        vals.append(complex(np.sum(wts * green_at_source(params, z, pts) * w(pts))))
    err = abs(vals[0] - vals[1])
    if err > tol * (1.0 + abs(vals[0])):
        raise QuadratureError(f"box quadrature error {err:.3g} above tolerance")
    return vals[0], err


def wave_coefficient_fj(
    params: ModelParams,
    z_j: complex,
    w0: TestFunction | None,
    w1: TestFunction | None,
    points,
    nodes: int = 32,
) -> np.ndarray:
    """Samples of f_j = -Res_{z_j}(i R(z) w1 + z R(z) w0) at ``points``.

    Only the rank-one part of the resolvent has a pole at z_j, so
    f_j(x) = -Res(1/Gamma) [i <G, w1> + z_j <G, w0>] G_{z_j,y}(x).
    """
    res = residue_gamma_inv(params, z_j)
    p1, _ = pairing(params, z_j, w1, nodes)
    p0, _ = pairing(params, z_j, w0, nodes)
    return -res * (1j * p1 + z_j * p0) * green_at_source(params, z_j, points)


def fj_contour_oracle(
    params: ModelParams,
    z_j: complex,
    w0: TestFunction | None,
    w1: TestFunction | None,
    x,
    radius: float = 0.05,
    n_circle: int = 64,
    nodes: int = 24,
) -> complex:
    """f_j(x) from the full resolvent kernel, integrated over a circle about z_j.

    Every term of the kernel (free half-space part included) is applied to
    the data by box quadrature at each of ``n_circle`` trapezoidal nodes on
    the circle; ``x`` must lie outside both support boxes.
    """
    x = np.asarray(x, dtype=float)
    for w in (w0, w1):
        if w is not None and w.distance_to(x) == 0.0:
            raise ValueError("sample point must lie outside the support of the data")
    theta = 2 * math.pi * np.arange(n_circle) / n_circle
    zs = z_j + radius * np.exp(1j * theta)
    total = 0j
    for z, th in zip(zs, theta):
        val = 0j
        for w, coef in ((w1, 1j), (w0, z)):
            if w is None or w.amplitude == 0:
                continue
            pts, wts = _tensor_rule(w.box, nodes)
            k = resolvent_kernel(params, z, x, pts)
            val += coef * np.sum(wts * k * w(pts))
        # dz = i r e^{i theta} dtheta
        total += val * 1j * radius * np.exp(1j * th)
    total *= 2 * math.pi / n_circle
    return -total / (2j * math.pi)


# -------------------------------------------------- Schroedinger expansion


@dataclass(frozen=True)
class ExpansionTerm:
    z_n: complex
    residue: complex
    green_x: complex
    green_xp: complex

    def value(self, t: float) -> complex:
        """Contribution -2 z_n exp(-i t z_n^2) Res G(x) G(x') to the kernel."""
        return -2.0 * self.z_n * np.exp(-1j * t * self.z_n**2) * self.residue * self.green_x * self.green_xp


@dataclass(frozen=True)
class KernelExpansion:
    free_term: complex
    residue_sum: complex
    background: complex
    total: complex
    t: float
    terms: tuple[ExpansionTerm, ...] = field(default=(), repr=False)
    ray_angle: float = -math.pi / 4
    background_error: float = 0.0
    excluded: tuple[complex, ...] = ()  # resonances dropped for sitting on the ray


def free_kernel(params: ModelParams, t: float, x, xp) -> complex:
    """exp(-i t H0)(x, x') for the Laplacian on the half-space (method of images)."""
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    xp_img = xp * np.array([1.0, 1.0, -1.0])
    pre = (4j * math.pi * t) ** -1.5
    d2 = float(np.sum((x - xp) ** 2))
    d2_img = float(np.sum((x - xp_img) ** 2))
    return complex(pre * (np.exp(1j * d2 / (4 * t)) - params.sign * np.exp(1j * d2_img / (4 * t))))


def rank_one_kernel(params: ModelParams, z, x, xp):
    """Kernel of R(z) minus the free half-space resolvent: G_z(x) G_z(x') / Gamma(z)."""
    return green_at_source(params, z, x) * green_at_source(params, z, xp) / gamma(params, z)


def residue_term(params: ModelParams, z_n: complex, x, xp) -> ExpansionTerm:
    return ExpansionTerm(
        complex(z_n),
        residue_gamma_inv(params, z_n),
        complex(green_at_source(params, z_n, x)),
        complex(green_at_source(params, z_n, xp)),
    )


def _ray_integrand(params, t, x, xp):
    def f(z):
        return np.exp(-1j * t * z * z) * (rank_one_kernel(params, z, x, xp) - rank_one_kernel(params, -z, x, xp)) * 2 * z

    return f


def _decay_length(f, direction: complex, scale: float, rel: float = 1e-17) -> float:
    """Length along ``direction`` beyond which |f| stays below rel * max|f|."""
    u = np.linspace(0.0, 4.0 * scale, 401)[1:]
    while True:
        vals = np.abs(f(u * direction))
        peak = np.max(vals)
        below = vals < rel * peak
        if below[-1] and np.all(below[np.argmax(vals):][-40:]):
            idx = np.nonzero(~below)[0]
            return float(u[idx[-1] + 1]) if len(idx) else float(u[0])
        u = u * 2.0


def background_integral(
    params: ModelParams,
    t: float,
    x,
    xp,
    angle: float = -math.pi / 4,
    tol: float = 1e-11,
    return_error: bool = False,
):
    """Ray part of the expansion.

    On z = e^{i angle} sqrt(s) this is -(1/2 pi) int_0^inf exp(-t s)
    [F(e^{-i pi/4} sqrt s) - F(-e^{-i pi/4} sqrt s)] ds at angle = -pi/4; it is
    integrated in z along the ray, which removes the square-root endpoint
    behaviour.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    f = _ray_integrand(params, t, x, xp)
    direction = complex(np.exp(1j * angle))
    decay = math.sqrt(1.0 / (t * abs(math.sin(2 * angle))))
    length = _decay_length(f, direction, max(decay, 1.0))
    val, err = contour_integral(f, [Line(0j, length * direction)], tol=tol, return_error=True)
    val /= 2j * math.pi
    err /= 2 * math.pi
    if return_error:
        return val, err
    return val


def _sector_filter(resonances, angle: float, edge: float = 1e-9):
    kept, edge_cases = [], []
    for r in resonances:
        if r.z.imag >= 0 or r.z.real <= 0:
            continue
        arg = math.atan2(r.z.imag, r.z.real)
        if abs(arg - angle) < edge:
            edge_cases.append(r.z)
        elif arg > angle:
            kept.append(r)
    return kept, edge_cases


def branch_radius(params: ModelParams, n_max: int) -> float:
    """|z| of the Re z > 0 zero on branch ``n_max`` (the truncation radius)."""
    if n_max <= 0:
        low = find_low_pair(params)
        if low is not None:
            return abs(low[0].z)
        n_max = max(n_max, 0 if params.bc is BoundaryCondition.NEUMANN else 1)
    return abs(find_branch(params, n_max)[0].z)


def convergence_time(x, xp, y, r_min: float) -> float:
    """sqrt(2)/2 (|x - y| + |x' - y|) / r_min: the expansion needs t above this."""
    if r_min <= 0:
        return math.inf
    dx = math.dist(x, y)
    dxp = math.dist(xp, y)
    return math.sqrt(2.0) / 2.0 * (dx + dxp) / r_min


def schrodinger_kernel(
    params: ModelParams,
    t: float,
    x,
    xp,
    n_max: int = 40,
    angle: float = -math.pi / 4,
    ray_tol: float = 1e-9,
    ray_nudge: float = 1e-6,
) -> KernelExpansion:
    """Resonance expansion of exp(-i t H)(x, x') restricted to the continuous spectrum."""
    if abs(params.alpha - params.critical_alpha) <= 1e-13 * (1 + abs(params.alpha)):
        raise ValueError("expansion requires a non-critical coupling (Gamma(0) != 0)")
    if not t > 0:
        raise ValueError("t must be positive")
    radius = branch_radius(params, n_max)
    res = find_all(params, radius * (1 + 1e-12))
    kept, edge = _sector_filter(res, angle, ray_tol)
    if edge:
        angle -= ray_nudge
        kept, edge = _sector_filter(res, angle, ray_tol)
        if edge:
            raise ValueError(f"resonances {edge} remain on the integration ray after nudging")
    kept.sort(key=lambda r: (abs(r.z), r.z.real < 0))
    if kept:
        t0 = convergence_time(x, xp, params.y, min(abs(r.z) for r in kept))
        if t <= t0:
            raise ValueError(f"t={t} is below the convergence time {t0:.6g}")
    terms = tuple(residue_term(params, r.z, x, xp) for r in kept)
    rsum = complex(sum(term.value(t) for term in terms))
    free = free_kernel(params, t, x, xp)
    bg, bg_err = background_integral(params, t, x, xp, angle, return_error=True)
    return KernelExpansion(free, rsum, bg, free + rsum + bg, t, terms, angle, bg_err, tuple(edge))


# ------------------------------------------------------ independent check


def _positive_eigenvalue_depth(params: ModelParams) -> float:
    """kappa > 0 with Gamma(i kappa) = 0 (a negative eigenvalue), or inf."""
    f = lambda k: float(np.real(gamma(params, 1j * k)))
    if params.bc is BoundaryCondition.DIRICHLET:
        if f(0.0) >= 0:
            return math.inf
    elif f(0.0) >= 0:
        return math.inf
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    return brentq(f, 0.0, hi, xtol=1e-14)


@dataclass(frozen=True)
class ContourKernel:
    free: complex
    rank_one: complex
    total: complex
    depth: float
    length: float
    error: float


def horizontal_contour_kernel(params: ModelParams, t: float, x, xp, depth: float | None = None) -> ContourKernel:
    """The propagator kernel from 0 -> -i d -> +inf - i d, with no zero of Gamma enclosed.

    ``depth`` d defaults to half the smallest distance from the real axis of
    any zero of Gamma (resonances with Re z >= 0 and eigenvalues alike); that
    the strip is free of zeros is certified by a winding count.
    """
    if depth is None:
        zs = [r.z for r in find_all(params, 50.0) if r.z.real >= 0 and r.z.imag < 0]
        shallow = min((-z.imag for z in zs), default=1.0)
        depth = 0.5 * min(shallow, _positive_eigenvalue_depth(params), 1.0)
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)

    def symmetric(kern):
        return lambda z: np.exp(-1j * t * z * z) * (kern(z) - kern(-z)) * 2 * z

    f_free = symmetric(lambda z: green_halfspace(params, z, x, xp))
    f_rank = symmetric(lambda z: rank_one_kernel(params, z, x, xp))
    # |exp(-i t z^2)| = exp(t d^2 - 2 t d u) on the horizontal line
    length = (40.0 + t * depth * depth + 3.0 * math.log1p(1.0 / depth)) / (2.0 * t * depth)
    corner = complex(0.0, -depth)
    path = [Line(0j, corner), Line(corner, corner + length)]
    check = winding_count(params, Rectangle(-depth, length + 1.0, -depth, depth))
    if check.count != 0:
        raise ValueError(f"strip of depth {depth} contains {check.count} zeros of Gamma")
    free, e1 = contour_integral(f_free, path, tol=1e-12, return_error=True)
    rank, e2 = contour_integral(f_rank, path, tol=1e-12, return_error=True)
    free /= 2j * math.pi
    rank /= 2j * math.pi
    return ContourKernel(free, rank, free + rank, depth, length, (e1 + e2) / (2 * math.pi))


# ----------------------------------------------- truncated resolvent decay


@dataclass(frozen=True)
class DecayReport:
    exponent: float  # fitted power of (1 + |z|)
    rate: float  # fitted exponential rate in (Im z)_-
    rate_bound: float  # T from the geometry of the box and the image point
    order: int
    delta: float
    delta_ok: bool
    exponent_ok: bool
    rate_ok: bool
    polynomial_only: bool
    n_samples: int
    n_excluded: int
    region_count: int  # resonances with Im z >= -A - delta ln(1 + |z|) among those found

    @property
    def ok(self) -> bool:
        return self.delta_ok and self.exponent_ok and self.rate_ok


def _box_corners(box):
    return np.array([[a, b, c] for a in box[0] for b in box[1] for c in box[2]], dtype=float)


def truncated_resolvent_decay(
    params: ModelParams,
    rho_box,
    z_samples,
    order: int = 0,
    A: float = 1.0,
    delta: float = 0.25,
    n_points: int = 4,
    margin: float = 1e-3,
    search_radius: float | None = None,
) -> DecayReport:
    """Growth of |1/Gamma(z)| |G_z(x) G_z(x')| over (x, x') in ``rho_box``.

    Samples with |z| below 4 pi |alpha| + 1/(2 y3), where Gamma has not yet
    reached its linear regime, are dropped when enough remain.  The log of
    the largest sampled value is fitted by c + p ln(1 + |z|) on the real
    samples; T is the smallest rate with which
    c + p ln(1 + |z|) + T (Im z)_- covers the remaining samples.  p is
    compared with order - 1 and T with
    2 max |x - y_image| over the box: G_z(x) grows like exp((Im z)_- |x - y_image|)
    because the image source is the farther one.
    """
    box = tuple((float(a), float(b)) for a, b in rho_box)
    z = np.asarray(z_samples, dtype=complex).ravel()
    radius = search_radius if search_radius is not None else float(np.max(np.abs(z))) + 1.0
    res = find_all(params, radius)
    near = np.zeros(z.shape, dtype=bool)
    for r in res:
        near |= np.abs(z - r.z) < margin
    z = z[~near]
    axes = [np.linspace(a, b, n_points) for a, b in box]
    g = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    y = np.asarray(params.y)
    far = np.linalg.norm(g - y, axis=1) > 1e-9
    g = g[far]
    logs = np.empty(len(z))
    for i, zi in enumerate(z):
        gv = np.abs(green_at_source(params, zi, g))
        logs[i] = math.log(np.max(gv) ** 2 / abs(complex(gamma(params, zi))))
    # keep the range where the linear term of Gamma dominates the constant ones
    onset = FOUR_PI * abs(params.alpha) + 1.0 / (2.0 * params.y3)
    tail = np.abs(z) >= onset
    if np.sum(tail) >= 2:
        z, logs = z[tail], logs[tail]
    neg = np.maximum(-z.imag, 0.0)
    on_axis = neg == 0.0
    polynomial_only = bool(np.all(on_axis))
    # polynomial envelope from real samples (all samples if there are fewer than two)
    fit = on_axis if np.sum(on_axis) >= 2 else np.ones(len(z), dtype=bool)
    design = np.stack([np.ones(int(np.sum(fit))), np.log1p(np.abs(z[fit]))], axis=1)
    (c, p), *_ = np.linalg.lstsq(design, logs[fit], rcond=None)
    p = float(p)
    rate = 0.0
    if not polynomial_only:
        # smallest T for which the polynomial envelope times exp(T (Im z)_-) covers every sample
        excess = logs[~on_axis] - c - p * np.log1p(np.abs(z[~on_axis]))
        rate = float(max(0.0, np.max(excess / neg[~on_axis])))
    corners = _box_corners(box)
    rate_bound = 2.0 * float(np.max(np.linalg.norm(corners - np.asarray(params.y_image), axis=1)))
    region = [r for r in res if r.z.imag >= -A - delta * math.log1p(abs(r.z))]
    return DecayReport(
        exponent=p,
        rate=rate,
        rate_bound=rate_bound,
        order=order,
        delta=delta,
        delta_ok=delta < 1.0 / (2.0 * params.y3),
        exponent_ok=p <= order - 1 + 0.2,
        rate_ok=rate <= rate_bound + 0.1,
        polynomial_only=polynomial_only,
        n_samples=len(z),
        n_excluded=int(np.sum(near)),
        region_count=len(region),
    )


def region_boundary_re(im: float, A: float, delta: float) -> float:
    """|Re z| on the curve bounding Im z >= -A - delta ln(1 + |z|), or nan if the curve has no point there."""
    s = math.expm1(-(im + A) / delta)
    if s < 0:
        return math.nan
    v = s * s - im * im
    return math.sqrt(v) if v >= 0 else math.nan
