"""Multi-branch Lambert W and its logarithmic asymptotic series.

``lambert_w`` follows the usual branch convention: the branch cut of every
branch runs along the negative real axis and values on the cut are taken
from above.  ``lambert_w_log`` accepts ``log(w)`` instead of ``w`` so that
arguments like ``exp(1e7)`` never have to be formed.

The asymptotic series is written in terms of

    L1 = log(w) + (2k+1) i pi     (odd shift, solves x e^x = -w)
    L1 = log(w) + 2k i pi         (even shift, solves x e^x = +w)
    L2 = log(L1)

as W = L1 - L2 + sum_{j>=0, m>=1} c_{j,m} L2^m / L1^(j+m) with
c_{j,m} = (-1)^j / m! * [j+m, j+1] (unsigned Stirling cycle numbers).
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

STIRLING_MAX = 64
MAX_BRANCH = 10**6


def _stirling_table(n: int) -> tuple[tuple[int, ...], ...]:
    rows = [[1] + [0] * n]
    for p in range(n):
        prev = rows[-1]
        row = [0] * (n + 1)
        for q in range(1, n + 1):
            row[q] = p * prev[q] + prev[q - 1]
        rows.append(row)
    return tuple(tuple(r) for r in rows)


_STIRLING = _stirling_table(STIRLING_MAX)


def stirling_cycle(p: int, q: int) -> int:
    """Unsigned Stirling number of the first kind: permutations of p objects with q cycles."""
    if not (0 <= p <= STIRLING_MAX and 0 <= q <= STIRLING_MAX):
        raise ValueError(f"stirling_cycle indices must lie in [0, {STIRLING_MAX}], got ({p}, {q})")
    return _STIRLING[p][q]


class SignShift(enum.Enum):
    """Which equation the series solves: x e^x = -w (odd) or x e^x = +w (even)."""

    ODD = "odd"
    EVEN = "even"

    @classmethod
    def parse(cls, value) -> "SignShift":
        return value if isinstance(value, cls) else cls(str(value).lower())


class LambertWError(ArithmeticError):
    """Iteration failed to converge or the series was used outside its validity region."""


@dataclass(frozen=True)
class WValue:
    value: complex
    residual: float  # |W e^W - w| / max(1, |w|)


@dataclass(frozen=True)
class SeriesTail:
    first_term: complex  # L2 / L1
    bound: float  # 2 |L2 / L1|^2
    ratio: float  # |L2 / L1|
    valid: bool  # ratio <= 1/2


def _check_branch(k: int) -> int:
    if int(k) != k or abs(k) > MAX_BRANCH:
        raise ValueError(f"branch index must be an integer with |k| <= {MAX_BRANCH}")
    return int(k)


def _on_cut_from_above(w: complex) -> complex:
    # -0.0 imaginary parts would select the lower side of the cut
    w = complex(w)
    return complex(w.real, 0.0) if w.imag == 0.0 else w


def _initial_guess(k: int, w: complex) -> complex:
    # branch 0 meets branch -1 at -1/e from above and branch 1 from below
    if abs(w + 1.0 / math.e) < 0.3 and (k == 0 or k == -1 and w.imag >= 0 or k == 1 and w.imag < 0):
        p = cmath.sqrt(2.0 * (math.e * w + 1.0))
        if k != 0:
            p = -p
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    if k == 0 and abs(w) < 1.0:
        # Pade approximant about 0
        return w * (1.0 + 4.0 / 3.0 * w) / (1.0 + 7.0 / 3.0 * w + 5.0 / 6.0 * w * w)
    l1 = cmath.log(w) + 2j * math.pi * k
    if l1 == 0:
        return complex(k)
    return l1 - cmath.log(l1)


def _residual(x: complex, w: complex) -> float:
    return abs(x * cmath.exp(x) - w) / max(1.0, abs(w))


def lambert_w(k: int, w: complex, tol: float = 1e-15, max_iter: int = 50) -> WValue:
    """Branch ``k`` of the Lambert W function by Halley's iteration."""
    k = _check_branch(k)
    w = _on_cut_from_above(w)
    if w == 0:
        if k == 0:
            return WValue(0j, 0.0)
        raise ValueError("W_k(0) is only finite on the principal branch")
    if k == 0 and w == -1.0 / math.e or k == -1 and w == -1.0 / math.e:
        return WValue(complex(-1.0), _residual(-1.0, w))
    if w.imag == 0.0 and -1.0 / math.e < w.real < 0.0 and k in (0, -1) or w.imag == 0.0 and w.real > 0 and k == 0:
        return _real_branch(k, w.real)

    x = _initial_guess(k, w)
    for _ in range(max_iter):
        ex = cmath.exp(x)
        f = x * ex - w
        d = ex * (x + 1.0)
        if d == 0:
            break
        step = f / (d - (x + 2.0) * f / (2.0 * x + 2.0))
        x -= step
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    else:
        raise LambertWError(f"Halley iteration for W_{k}({w}) did not converge")
    return WValue(x, _residual(x, w))


def _real_branch(k: int, w: float) -> WValue:
    """Real branches: W_0 on (-1/e, inf) and W_{-1} on (-1/e, 0)."""
    if k == 0:
        if w < 1.0:
            x = w * (1 + 4 / 3 * w) / (1 + 7 / 3 * w + 5 / 6 * w * w) if w > -0.25 else -1 + math.sqrt(2 * (math.e * w + 1))
        else:
            lw = math.log(w)
            x = lw - math.log(lw) if lw > 1 else 0.5 * lw + 0.5
    else:
        p = math.sqrt(2 * (math.e * w + 1))
        x = -1 - p - p * p / 3 if w < -0.25 else math.log(-w) - math.log(-math.log(-w))
    for _ in range(100):
        ex = math.exp(x)
        f = x * ex - w
        d = ex * (x + 1.0)
        if d == 0:
            break
        step = f / (d - (x + 2.0) * f / (2.0 * x + 2.0))
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return WValue(complex(x), _residual(x, w))


def log_heads(k: int, log_w: complex, sign_shift) -> tuple[complex, complex]:
    """L1 and L2 = log(L1) for branch ``k``."""
    shift = SignShift.parse(sign_shift)
    twist = 2 * k + 1 if shift is SignShift.ODD else 2 * k
    l1 = complex(log_w) + twist * 1j * math.pi
    if l1 == 0:
        raise LambertWError("L1 vanishes; the logarithmic series is undefined")
    return l1, cmath.log(l1)


def _log_newton(l1: complex, max_iter: int = 60) -> complex:
    # x + Log(x) = L1, started from the two-logarithm head
    x = l1 - cmath.log(l1)
    best, best_f = x, math.inf
    for _ in range(max_iter):
        f = x + cmath.log(x) - l1
        if abs(f) < best_f:
            best, best_f = x, abs(f)
        step = f / (1.0 + 1.0 / x)
        x -= step
        if abs(step) <= 4e-16 * max(1.0, abs(x)):
            return x
    # stalled at rounding level
    if best_f <= 1e-14 * max(1.0, abs(l1)):
        return best
    raise LambertWError(f"log-form Newton iteration did not converge for L1={l1}")


def lambert_w_log(k: int, log_w: complex, sign_shift, max_direct: float = 600.0) -> WValue:
    """Solution of x e^x = -w (odd) or x e^x = w (even) on branch ``k``, given log(w).

    Arguments with |log w| <= ``max_direct`` go through ``lambert_w`` with the
    explicit argument.  Larger ones are solved as x + Log(x) = L1; branches
    0 and -1 whose solutions sit on the real axis are handled separately.
    """
    k = _check_branch(k)
    shift = SignShift.parse(sign_shift)
    log_w = complex(log_w)
    if abs(log_w) <= max_direct:
        w = cmath.exp(log_w)
        return lambert_w(k, -w if shift is SignShift.ODD else w)

    lw = log_w.real
    real_arg = log_w.imag == 0.0
    if real_arg and lw < 0 and (shift is SignShift.ODD and k == 0 or shift is SignShift.EVEN and k == 0):
        # solution is -w or +w to within rounding (w underflows)
        w = math.exp(lw)
        x = -w if shift is SignShift.ODD else w
        return WValue(complex(x), 0.0)
    if real_arg and lw < 0 and shift is SignShift.ODD and k == -1:
        # x + ln(-x) = log w with x < -1
        x = lw - math.log(-lw)
        for _ in range(60):
            step = (x + math.log(-x) - lw) / (1.0 + 1.0 / x)
            x -= step
            if abs(step) <= 1e-16 * abs(x):
                break
        res = abs(math.expm1(x + math.log(-x) - lw)) * min(1.0, math.exp(lw))
        return WValue(complex(x), res)

    l1, _ = log_heads(k, log_w, shift)
    x = _log_newton(l1)
    f = x + cmath.log(x) - l1
    res = abs(cmath.exp(f) - 1.0) * min(1.0, math.exp(min(lw, 700.0)))
    return WValue(x, res)


def series_coefficient(j: int, m: int) -> float:
    return (-1) ** j / math.factorial(m) * stirling_cycle(j + m, j + 1)


def w_series(k: int, w: complex | None, sign_shift, terms: int = 12, log_w: complex | None = None) -> complex:
    """Asymptotic series for branch ``k`` truncated at j + m <= ``terms``.

    ``terms = 0`` returns the two-logarithm head L1 - L2.  Either ``w`` or
    ``log_w`` must be given.
    """
    if log_w is None:
        if w is None or w == 0:
            raise ValueError("need a nonzero w or its logarithm")
        log_w = cmath.log(complex(w))
    if terms < 0 or terms + 1 > STIRLING_MAX:
        raise ValueError(f"terms must lie in [0, {STIRLING_MAX - 1}]")
    l1, l2 = log_heads(k, log_w, sign_shift)
    if abs(l2 / l1) > 0.5:
        raise LambertWError(f"|L2/L1| = {abs(l2 / l1):.3g} exceeds 1/2; series not certified")
    total = l1 - l2
    inv = 1.0 / l1
    for n in range(1, terms + 1):
        # group terms with j + m = n
        for m in range(1, n + 1):
            j = n - m
            total += series_coefficient(j, m) * l2**m * inv**n
    return total


def remainder_bound(k: int, w: complex | None, sign_shift, log_w: complex | None = None) -> SeriesTail:
    """First term of the remainder and the tail bound 2 |L2/L1|^2."""
    if log_w is None:
        log_w = cmath.log(complex(w))
    l1, l2 = log_heads(k, log_w, sign_shift)
    q = l2 / l1
    ratio = abs(q)
    return SeriesTail(first_term=q, bound=2.0 * ratio * ratio, ratio=ratio, valid=ratio <= 0.5)


def remainder(k: int, x: complex, log_w: complex, sign_shift) -> complex:
    """R_k = W - (L1 - L2) for a computed branch value ``x``."""
    l1, l2 = log_heads(k, log_w, sign_shift)
    return complex(x) - (l1 - l2)


def lambert_w_array(k: int, w) -> np.ndarray:
    """Vectorised convenience wrapper returning the values only."""
    w = np.asarray(w, dtype=complex)
    out = np.array([lambert_w(k, v).value for v in w.ravel()], dtype=complex)
    return out.reshape(w.shape)


def truncation_tail(k: int, log_w: complex, sign_shift, terms: int, depth: int = STIRLING_MAX - 1) -> float:
    """Sum of |c_{j,m} L2^m / L1^(j+m)| over terms + 1 <= j + m <= depth.

    This is the size of what ``w_series(..., terms)`` leaves out, up to
    contributions of order |L2/L1|^depth.
    """
    l1, l2 = log_heads(k, log_w, sign_shift)
    a, b = abs(l2), abs(l1)
    total = 0.0
    for n in range(terms + 1, depth + 1):
        total += sum(abs(series_coefficient(n - m, m)) * a**m for m in range(1, n + 1)) / b**n
    return total


def _log1p_complex(u: complex) -> complex:
    if abs(u) < 1e-4:
        return u * (1 - u * (0.5 - u * (1 / 3 - u * (0.25 - u / 5))))
    return cmath.log(1.0 + u)


def remainder_exact(k: int, log_w: complex, sign_shift, max_iter: int = 50) -> complex:
    """R_k from its defining equation R = -log(1 + (R - L2) / L1).

    Substituting W = L1 - L2 + R into W + log W = L1 gives this fixed point
    directly, so R_k is obtained without the cancellation in W - (L1 - L2).
    Meaningful where |L2 / L1| is small, i.e. where the series is certified.
    """
    l1, l2 = log_heads(k, log_w, sign_shift)
    r = l2 / l1
    for _ in range(max_iter):
        f = r + _log1p_complex((r - l2) / l1)
        step = f / (1.0 + 1.0 / (l1 + r - l2))
        r -= step
        if abs(step) <= 1e-17 * max(abs(r), 1e-300) or step == 0:
            break
    return r
