"""Location and classification of every zero of Gamma in the closed lower half-plane.

Writing z = a + i b and t = 2 y3 a, the imaginary part of Gamma(z) = 0 fixes

    b = ln(s sin t / t) / (2 y3),        s = +1 Dirichlet, -1 Neumann,

so zeros off the imaginary axis only occur where s sin t > 0.  On each
admissible interval t = m pi + u, u in (0, pi), the real part reduces to

    r(u) = -8 pi alpha y3 - t cot(u) - ln(sin(u) / t) = 0,

and r is strictly increasing in u (its derivative is
[(t/sin u - cos u)^2 + sin(u)^2] / t).  Each interval therefore carries at
most one zero, found by bracketing and finished with a few complex Newton
steps on Gamma itself.  Dirichlet uses even m (m = 0 is the low-lying pair),
Neumann odd m.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import EIGHT_PI, FOUR_PI, BoundaryCondition, ModelParams, gamma, gamma_derivative


class ResonanceKind(enum.Enum):
    COMPLEX_PAIR = "ComplexPair"
    ANTIBOUND = "AntiBound"
    ZERO_EIGENVALUE = "ZeroEigenvalue"
    ZERO_RESONANCE = "ZeroResonance"
    LOW_PAIR = "LowPair"
    EXCEPTIONAL = "Exceptional"


class BracketError(RuntimeError):
    """The reduced real equation did not change sign where it must."""


class ConsistencyError(RuntimeError):
    """Solver and argument-principle counts disagree."""


@dataclass(frozen=True)
class Resonance:
    z: complex
    branch: int
    kind: ResonanceKind
    multiplicity: int = 1

    def mirrored(self) -> "Resonance":
        return Resonance(-self.z.conjugate(), self.branch, self.kind, self.multiplicity)


@dataclass(frozen=True)
class CountReport:
    R: float
    exact_count: int
    asymptotic_count: int
    oracle_count: int | None
    slack: int

    @property
    def within_slack(self) -> bool:
        return abs(self.exact_count - self.asymptotic_count) <= self.slack


ZERO_TOL = 1e-13
EXCEPTIONAL_TOL = 1e-12


# ------------------------------------------------------------ diagnostics


def gamma_residual(params: ModelParams, z: complex) -> float:
    """|Gamma(z)| relative to the natural scale of its terms."""
    return float(abs(gamma(params, z)) / params.scale(z))


def curve_imag(params: ModelParams, a):
    """Imaginary part forced by Im Gamma = 0 for a zero with real part ``a``."""
    t = 2.0 * params.y3 * np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(t == 0.0, 1.0, params.sign * np.sin(t) / np.where(t == 0.0, 1.0, t))
        return np.log(ratio) / (2.0 * params.y3)


def on_curve_error(params: ModelParams, z: complex) -> float:
    """Relative distance of Im z from the curve value at Re z."""
    b = curve_imag(params, abs(z.real))
    return float(abs(z.imag - b) / max(abs(b), 1e-300))


def g_of_a(y3: float, a, bc=BoundaryCondition.DIRICHLET):
    """s sin(2 y3 a) / (2 y3 a), with the limit value at a = 0."""
    s = BoundaryCondition.parse(bc).sign
    t = 2.0 * y3 * np.asarray(a, dtype=float)
    safe = np.where(t == 0.0, 1.0, t)
    out = np.where(t == 0.0, 1.0 * s, s * np.sin(t) / safe)
    return out[()] if out.ndim == 0 else out


def h_of_a(params: ModelParams, a):
    """exp(-8 pi alpha y3 - 2 y3 a / tan(2 y3 a)); zeros satisfy h(a) = g(a)."""
    t = 2.0 * params.y3 * np.asarray(a, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        out = np.exp(-EIGHT_PI * params.alpha * params.y3 - t / np.tan(t))
    return out[()] if out.ndim == 0 else out


def asymptotic_count(y3: float, R: float) -> int:
    return 2 * math.floor(y3 * R / math.pi - 0.25)


# ------------------------------------------------------- reduced equation


def _one_minus_x_cot(u: float) -> float:
    if u < 1e-3:
        u2 = u * u
        return u2 / 3.0 + u2 * u2 / 45.0 + 2.0 * u2**3 / 945.0
    return 1.0 - u / math.tan(u)


def _log_sinc(u: float) -> float:
    if u < 1e-3:
        u2 = u * u
        return -u2 / 6.0 - u2 * u2 / 180.0 - u2**3 / 2835.0
    return math.log(math.sin(u) / u)


def _reduced_near_zero(params: ModelParams, m: int, u: float) -> float:
    """r at u measured from the left end of the interval."""
    c = EIGHT_PI * params.alpha * params.y3
    if m == 0:
        # t = u: -c - u cot u - ln(sin u / u), written to avoid cancellation
        return -(c + 1.0) + _one_minus_x_cot(u) - _log_sinc(u)
    t = m * math.pi + u
    return -c - t / math.tan(u) - math.log(math.sin(u) / t)


def _reduced_near_pi(params: ModelParams, m: int, d: float) -> float:
    """r at u = pi - d, measured from the right end of the interval."""
    c = EIGHT_PI * params.alpha * params.y3
    t = (m + 1) * math.pi - d
    return -c + t / math.tan(d) - math.log(math.sin(d) / t)


def _root_from_end(f, sign_at_end: float) -> float:
    """Root of f on (0, pi/2] where f has sign ``sign_at_end`` near 0 and the opposite sign at pi/2."""
    hi = 0.5 * math.pi
    lo = hi
    for _ in range(1100):
        lo *= 0.5
        if lo == 0.0:
            break
        if np.sign(f(lo)) == sign_at_end:
            return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        hi = lo
    raise BracketError("reduced equation has no sign change near the interval end")


def _solve_interval(params: ModelParams, m: int) -> tuple[float, float] | None:
    """Zero of the reduced equation on interval ``m`` as (t, b), or None if absent."""
    y3 = params.y3
    c = EIGHT_PI * params.alpha * params.y3
    t_mid = (m + 0.5) * math.pi
    r_mid = -c + math.log(t_mid)
    if r_mid == 0.0:
        return t_mid, -math.log(t_mid) / (2 * y3)
    if r_mid > 0.0:
        if m == 0 and -(c + 1.0) >= 0.0:
            return None
        u = _root_from_end(lambda v: _reduced_near_zero(params, m, v), -1.0)
        t = m * math.pi + u
        log_ratio = _log_sinc(u) if m == 0 else math.log(math.sin(u) / t)
    else:
        d = _root_from_end(lambda v: _reduced_near_pi(params, m, v), 1.0)
        t = (m + 1) * math.pi - d
        log_ratio = math.log(math.sin(d) / t)
    return t, log_ratio / (2 * y3)


def newton_polish(params: ModelParams, z: complex, max_steps: int = 10) -> complex:
    """A few Newton steps on Gamma; keeps the iterate with the smallest residual."""
    best, best_res = z, abs(gamma(params, z))
    for _ in range(max_steps):
        d = gamma_derivative(params, z)
        if d == 0:
            break
        step = gamma(params, z) / d
        z = z - step
        res = abs(gamma(params, z))
        if res < best_res:
            best, best_res = z, res
        if abs(step) <= 1e-16 * max(1.0, abs(z)) or res == 0.0:
            break
    return complex(best)


def _interval_index(params: ModelParams, k: int) -> int:
    if params.bc is BoundaryCondition.DIRICHLET:
        if k < 1:
            raise ValueError("Dirichlet branch index starts at k = 1 (k = 0 is the low pair)")
        return 2 * k
    if k < 0:
        raise ValueError("Neumann branch index starts at k = 0")
    return 2 * k + 1


def branch_interval(params: ModelParams, k: int) -> tuple[float, float]:
    """Open interval of Re z holding the branch-k zero."""
    m = _interval_index(params, k)
    return m * math.pi / (2 * params.y3), (m + 1) * math.pi / (2 * params.y3)


def _pair_from_interval(params: ModelParams, m: int, k: int, kind: ResonanceKind):
    sol = _solve_interval(params, m)
    if sol is None:
        return None
    t, b = sol
    z = newton_polish(params, complex(t / (2 * params.y3), b))
    if _is_exceptional_interval(params, m):
        kind = ResonanceKind.EXCEPTIONAL
    first = Resonance(z, k, kind)
    return first, first.mirrored()


# ----------------------------------------------------------- public finders


def find_branch(params: ModelParams, k: int) -> tuple[Resonance, Resonance]:
    """The two zeros with Re z in +-(branch interval k); the one with Re z > 0 first."""
    m = _interval_index(params, k)
    pair = _pair_from_interval(params, m, k, ResonanceKind.COMPLEX_PAIR)
    if pair is None:
        raise BracketError(f"no zero found on branch {k}")
    return pair


def find_low_pair(params: ModelParams) -> tuple[Resonance, Resonance] | None:
    """Dirichlet zeros with |Re z| < pi / (2 y3); present iff alpha exceeds the critical value.

    Neumann has no zeros in that strip (-sin t / t < 0 there), so None is returned.
    """
    if params.bc is BoundaryCondition.NEUMANN:
        return None
    return _pair_from_interval(params, 0, 0, ResonanceKind.LOW_PAIR)


def _axis_function(params: ModelParams, b: float) -> float:
    # Gamma(i b) with the sign flip that makes it real
    return params.alpha + b / FOUR_PI + params.sign * math.exp(-2 * params.y3 * b) / (EIGHT_PI * params.y3)


def find_antibound(params: ModelParams) -> Resonance | None:
    """Zero on the negative imaginary axis.

    Dirichlet: exists iff alpha < -1/(8 pi y3).  Neumann: iff alpha > 1/(8 pi y3).
    """
    ac = abs(params.critical_alpha)
    if params.bc is BoundaryCondition.DIRICHLET:
        if not params.alpha < -ac:
            return None
        # f decreasing from +inf to f(0) < 0
    elif not params.alpha > ac:
        return None
    f = lambda b: _axis_function(params, b)
    hi = 0.0
    lo = -1.0
    while np.sign(f(lo)) == np.sign(f(hi)):
        lo *= 2.0
        if lo < -1e300:
            raise BracketError("antibound bracket expansion failed")
    b = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return Resonance(complex(0.0, b), 0, ResonanceKind.ANTIBOUND)


def detect_zero(params: ModelParams) -> Resonance | None:
    """z = 0 as a zero of Gamma: a double zero-energy eigenvalue (Dirichlet) or a simple zero resonance (Neumann)."""
    if abs(gamma(params, 0.0)) > ZERO_TOL * params.scale():
        return None
    if params.bc is BoundaryCondition.DIRICHLET:
        return Resonance(0j, 0, ResonanceKind.ZERO_EIGENVALUE, 2)
    return Resonance(0j, 0, ResonanceKind.ZERO_RESONANCE, 1)


def exceptional_alpha(y3: float, m: int) -> float:
    """Coupling at which interval m has its zero exactly at its midpoint t = (m + 1/2) pi."""
    return math.log((m + 0.5) * math.pi) / (EIGHT_PI * y3)


def _is_exceptional_interval(params: ModelParams, m: int) -> bool:
    a_m = exceptional_alpha(params.y3, m)
    return abs(params.alpha - a_m) <= EXCEPTIONAL_TOL * (1.0 + abs(params.alpha))


def _exceptional_index(params: ModelParams) -> int | None:
    t = math.exp(min(EIGHT_PI * params.alpha * params.y3, 700.0))
    parity = 0 if params.bc is BoundaryCondition.DIRICHLET else 1
    centre = t / math.pi - 0.5
    for m in (math.floor(centre), math.ceil(centre)):
        if m >= 0 and m % 2 == parity and _is_exceptional_interval(params, m):
            return m
    return None


def find_exceptional(params: ModelParams, check_tol: float = 1e-11) -> list[Resonance]:
    """Closed-form zeros at Re z = (m + 1/2) pi / (2 y3) when alpha sits on an exceptional line.

    The returned ``branch`` is the signed index k with Re z = (pi/2 + k pi)/(2 y3).
    """
    m = _exceptional_index(params)
    if m is None:
        return []
    t = (m + 0.5) * math.pi
    z = complex(t / (2 * params.y3), -math.log(t) / (2 * params.y3))
    if gamma_residual(params, z) > check_tol:
        raise ConsistencyError(f"closed-form exceptional zero has residual {gamma_residual(params, z):.3g}")
    r = Resonance(z, m, ResonanceKind.EXCEPTIONAL)
    return [r, Resonance(-z.conjugate(), -m - 1, ResonanceKind.EXCEPTIONAL)]


def find_all(params: ModelParams, R: float) -> list[Resonance]:
    """Every zero of Gamma with |z| < R and Im z <= 0, sorted by real part."""
    if not R > 0:
        raise ValueError("R must be positive")
    out: list[Resonance] = []
    zero = detect_zero(params)
    if zero is not None:
        out.append(zero)
    anti = find_antibound(params)
    if anti is not None and abs(anti.z) < R:
        out.append(anti)
    low = find_low_pair(params)
    if low is not None:
        out.extend(r for r in low if abs(r.z) < R)
    k = 1 if params.bc is BoundaryCondition.DIRICHLET else 0
    while branch_interval(params, k)[0] < R:
        out.extend(r for r in find_branch(params, k) if abs(r.z) < R)
        k += 1
    out.sort(key=lambda r: (r.z.real, r.z.imag))
    return out


def total_multiplicity(resonances) -> int:
    return sum(r.multiplicity for r in resonances)


def count_exact(params: ModelParams, R: float, slack: int = 4, use_oracle: bool = True) -> CountReport:
    """Solver count in |z| < R against the counting law and (optionally) the argument principle."""
    from .oracle import count_zeros_half_disk

    exact = total_multiplicity(find_all(params, R))
    oracle_count = None
    if use_oracle:
        res = count_zeros_half_disk(params, R, include_origin=detect_zero(params) is not None)
        oracle_count = res.count
        if oracle_count != exact and res.offset:
            exact = total_multiplicity(find_all(params, R + res.offset))
        if oracle_count != exact:
            raise ConsistencyError(f"solver count {exact} != argument-principle count {oracle_count} at R={R}")
    return CountReport(R, exact, asymptotic_count(params.y3, R), oracle_count, slack)
