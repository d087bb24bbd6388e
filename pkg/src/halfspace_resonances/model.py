"""Point interaction on the half-space: characteristic function, Green's
functions and the resolvent kernel.

The perturbed resolvent is a rank-one correction of the free half-space
resolvent; its only singularities come from the zeros of

    Gamma(z) = alpha - i z / (4 pi) + s exp(2 i y3 z) / (8 pi y3),

with ``s = +1`` for Dirichlet and ``s = -1`` for Neumann boundary conditions.
All functions accept numpy arrays and broadcast over ``z``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FOUR_PI = 4.0 * math.pi
EIGHT_PI = 8.0 * math.pi

# exp(x) overflows double precision a little above x = 709
_EXP_LIMIT = 700.0


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @property
    def sign(self) -> int:
        """Sign of the image term: +1 for Dirichlet, -1 for Neumann."""
        return 1 if self is BoundaryCondition.DIRICHLET else -1

    @classmethod
    def parse(cls, value: "str | BoundaryCondition") -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if key in (member.value, member.value[0], member.name.lower()):
                return member
        raise ValueError(f"unknown boundary condition {value!r}")


class CoincidentPointsError(ValueError):
    """Raised when a Green's function is evaluated at its singularity."""


class PoleError(ArithmeticError):
    """Raised when the resolvent kernel is evaluated (numerically) at a pole."""


@dataclass(frozen=True)
class ModelParams:
    """Boundary condition, coupling ``alpha`` and interaction point ``y``.

    ``y`` must lie strictly inside the half-space (``y[2] > 0``).
    """

    bc: BoundaryCondition
    alpha: float
    y: tuple[float, float, float] = field(default=(0.0, 0.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))
        y = tuple(float(c) for c in self.y)
        if len(y) != 3:
            raise ValueError("y must have three coordinates")
        if not y[2] > 0.0 or not all(map(math.isfinite, y)):
            raise ValueError(f"interaction point must satisfy y3 > 0, got {y}")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def from_height(cls, bc, alpha: float, y3: float) -> "ModelParams":
        return cls(bc, alpha, (0.0, 0.0, y3))

    @property
    def y3(self) -> float:
        return self.y[2]

    @property
    def sign(self) -> int:
        return self.bc.sign

    @property
    def y_image(self) -> tuple[float, float, float]:
        return (self.y[0], self.y[1], -self.y[2])

    @property
    def critical_alpha(self) -> float:
        """Coupling at which z = 0 is a zero of Gamma."""
        return -self.sign / (EIGHT_PI * self.y3)

    def scale(self, z=0.0):
        """Natural magnitude of the terms of Gamma, used for relative tolerances."""
        return abs(self.alpha) + np.abs(z) / FOUR_PI + 1.0 / (EIGHT_PI * self.y3)

    def with_alpha(self, alpha: float) -> "ModelParams":
        return ModelParams(self.bc, alpha, self.y)


def _check_exponent(params: ModelParams, z) -> None:
    if np.any(-2.0 * params.y3 * np.imag(z) > _EXP_LIMIT):
        raise OverflowError(
            "exp(2 i y3 z) overflows: Im z below "
            f"{-_EXP_LIMIT / (2 * params.y3):.4g}; use gamma_log_derivative instead"
        )


def gamma(params: ModelParams, z):
    """Characteristic function Gamma(z); entire in z."""
    z = np.asarray(z, dtype=complex)
    _check_exponent(params, z)
    y3 = params.y3
    out = params.alpha - 1j * z / FOUR_PI + params.sign * np.exp(2j * y3 * z) / (EIGHT_PI * y3)
    return out[()] if out.ndim == 0 else out


def gamma_derivative(params: ModelParams, z):
    """Analytic derivative Gamma'(z) = -i/(4 pi) + s i exp(2 i y3 z) / (4 pi)."""
    z = np.asarray(z, dtype=complex)
    _check_exponent(params, z)
    out = (-1j + params.sign * 1j * np.exp(2j * params.y3 * z)) / FOUR_PI
    return out[()] if out.ndim == 0 else out


def gamma_log_derivative(params: ModelParams, z):
    """Gamma'(z) / Gamma(z), evaluated without overflow anywhere in C.

    Where |exp(2 i y3 z)| > 1 numerator and denominator are divided by the
    exponential so that only exp(-2 i y3 z) (bounded by one) appears.
    """
    z = np.asarray(z, dtype=complex)
    y3, s, a = params.y3, params.sign, params.alpha
    out = np.empty(z.shape, dtype=complex)
    lower = np.imag(z) < 0
    zu = z[~lower]
    e = np.exp(2j * y3 * zu)
    out[~lower] = ((-1j + s * 1j * e) / FOUR_PI) / (a - 1j * zu / FOUR_PI + s * e / (EIGHT_PI * y3))
    zl = z[lower]
    f = np.exp(-2j * y3 * zl)
    out[lower] = ((-1j * f + s * 1j) / FOUR_PI) / (a * f - 1j * zl * f / FOUR_PI + s / (EIGHT_PI * y3))
    return out[()] if out.ndim == 0 else out


def _distance(x, xp) -> np.ndarray:
    d = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
    return np.sqrt(np.sum(d * d, axis=-1))


def _reflect(x) -> np.ndarray:
    x = np.array(x, dtype=float)
    x[..., 2] = -x[..., 2]
    return x


def _outgoing(z, r):
    return np.exp(1j * z * r) / (FOUR_PI * r)


def green_free(z, x, xp):
    """Whole-space Green's function exp(i z |x - xp|) / (4 pi |x - xp|)."""
    r = _distance(x, xp)
    if np.any(r == 0.0):
        raise CoincidentPointsError("green_free evaluated at coincident points")
    out = _outgoing(np.asarray(z, dtype=complex), r)
    return out[()] if np.ndim(out) == 0 else out


def green_halfspace(params: ModelParams, z, x, xp):
    """Half-space Green's function by the method of images.

    Dirichlet subtracts the mirror source at the reflected point, Neumann adds it.
    """
    r = _distance(x, xp)
    r_img = _distance(x, _reflect(xp))
    if np.any(r == 0.0) or np.any(r_img == 0.0):
        raise CoincidentPointsError("green_halfspace evaluated at a source or image point")
    z = np.asarray(z, dtype=complex)
    out = _outgoing(z, r) - params.sign * _outgoing(z, r_img)
    return out[()] if np.ndim(out) == 0 else out


def green_at_source(params: ModelParams, z, x):
    """G_{z,y}(x): the half-space Green's function centred at the interaction point."""
    return green_halfspace(params, z, x, params.y)


def resolvent_kernel(params: ModelParams, z, x, xp, pole_floor: float = 1e-13):
    """Kernel of (H - z^2)^{-1}: free half-space kernel plus the rank-one term."""
    g = gamma(params, z)
    if np.any(np.abs(g) < pole_floor * params.scale(z)):
        raise PoleError(f"|Gamma(z)| below pole floor at z={z}")
    free = green_halfspace(params, z, x, xp)
    rank_one = green_at_source(params, z, x) * green_at_source(params, z, xp) / g
    return free + rank_one


@dataclass(frozen=True)
class LaurentExpansion:
    """Laurent coefficients of 1/Gamma at z = 0.

    ``coefficients[i]`` multiplies ``z ** (i - order)`` for i = 0..order.
    """

    order: int
    coefficients: tuple[complex, ...]

    def partial_sum(self, z):
        z = np.asarray(z, dtype=complex)
        return sum(c * z ** (i - self.order) for i, c in enumerate(self.coefficients))


def taylor_coefficients(params: ModelParams, n_terms: int) -> np.ndarray:
    """Taylor coefficients of Gamma about z = 0."""
    y3, s = params.y3, params.sign
    a = np.empty(n_terms, dtype=complex)
    fact = 1.0
    for n in range(n_terms):
        if n:
            fact *= n
        a[n] = s * (2j * y3) ** n / (fact * EIGHT_PI * y3)
    a[0] += params.alpha
    a[1] += -1j / FOUR_PI
    return a


def _series_reciprocal(a: Sequence[complex], n: int) -> list[complex]:
    b = [1.0 / a[0]]
    for m in range(1, n):
        acc = sum(a[j] * b[m - j] for j in range(1, min(m, len(a) - 1) + 1))
        b.append(-acc / a[0])
    return b


def laurent_at_zero(params: ModelParams, tol: float = 1e-13) -> LaurentExpansion:
    """Principal part (plus constant term) of 1/Gamma at z = 0.

    At the critical coupling Gamma vanishes at the origin: to second order
    for Dirichlet (a zero-energy eigenvalue) and to first order for Neumann.
    """
    a = taylor_coefficients(params, 12)
    order = 0
    # the coefficient of z^2 is -y3 s / (4 pi) != 0, so order is at most 2
    while order < 2 and abs(a[order]) <= tol * params.scale():
        order += 1
    coeffs = _series_reciprocal(a[order:], order + 1)
    return LaurentExpansion(order, tuple(complex(c) for c in coeffs))
