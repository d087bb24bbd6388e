"""Semiclassical resonances of -h^2 Laplacian with coupling +-h^(-beta).

With c = 8 pi y3 h^(-beta) and x = +-c - 2 i y3 z / h the zero condition
becomes x e^x = -w (Dirichlet) or x e^x = w (Neumann) with w = exp(+-c),
so every resonance is

    z = (i h / (2 y3)) (W_k(-+w) -+ c)

for some Lambert branch k.  This module builds those roots, polishes them on
the scaled characteristic function, cross-checks them against the unscaled
solver and evaluates the band and parabola inequalities satisfied by the
roots in a window eps <= |z| <= 1/eps.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import lambertw as lw
from .model import EIGHT_PI, FOUR_PI, BoundaryCondition, ModelParams
from .solver import find_antibound, find_branch, find_low_pair


class CouplingSign(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def value_sign(self) -> int:
        return 1 if self is CouplingSign.PLUS else -1

    @classmethod
    def parse(cls, value) -> "CouplingSign":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"+": "plus", "+1": "plus", "1": "plus", "-": "minus", "-1": "minus"}
        return cls(aliases.get(key, key))


class SemiclassicalError(ValueError):
    """Branch outside the region where the logarithmic series is certified."""


@dataclass(frozen=True)
class SemiclassicalParams:
    h: float
    beta: float
    sign: CouplingSign
    bc: BoundaryCondition = BoundaryCondition.DIRICHLET
    y3: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sign", CouplingSign.parse(self.sign))
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))
        if not 0.0 < self.h <= 1.0:
            raise ValueError("h must lie in (0, 1]")
        if not self.beta > 0.0:
            raise ValueError("beta must be positive")
        if not self.y3 > 0.0:
            raise ValueError("y3 must be positive")

    @property
    def coupling(self) -> float:
        """Unscaled coupling +-h^(-beta)."""
        return self.sign.value_sign * self.h ** (-self.beta)

    @property
    def c(self) -> float:
        """8 pi y3 h^(-beta), the logarithm of w up to sign."""
        return EIGHT_PI * self.y3 * self.h ** (-self.beta)

    @property
    def log_w(self) -> float:
        return self.sign.value_sign * self.c

    @property
    def shift(self) -> lw.SignShift:
        return lw.SignShift.ODD if self.bc is BoundaryCondition.DIRICHLET else lw.SignShift.EVEN

    def unscaled(self) -> ModelParams:
        """Model whose zeros are z / h."""
        return ModelParams.from_height(self.bc, self.coupling, self.y3)

    def scale(self, z) -> float:
        return self.h ** (-self.beta) + np.abs(z) / (FOUR_PI * self.h) + 1.0 / (EIGHT_PI * self.y3)


def gamma_scaled(p: SemiclassicalParams, z):
    """+-h^(-beta) - i z / (4 pi h) +- exp(2 i y3 z / h) / (8 pi y3)."""
    z = np.asarray(z, dtype=complex)
    e = np.exp(2j * p.y3 * z / p.h)
    out = p.coupling - 1j * z / (FOUR_PI * p.h) + p.bc.sign * e / (EIGHT_PI * p.y3)
    return out[()] if out.ndim == 0 else out


def gamma_scaled_derivative(p: SemiclassicalParams, z):
    z = np.asarray(z, dtype=complex)
    e = np.exp(2j * p.y3 * z / p.h)
    out = (-1j + p.bc.sign * 1j * e) / (FOUR_PI * p.h)
    return out[()] if out.ndim == 0 else out


def scaled_residual(p: SemiclassicalParams, z: complex) -> float:
    return float(abs(gamma_scaled(p, z)) / p.scale(z))


def _polish(p: SemiclassicalParams, z: complex, steps: int = 3) -> complex:
    best, best_res = z, abs(gamma_scaled(p, z))
    for _ in range(steps):
        z = z - gamma_scaled(p, z) / gamma_scaled_derivative(p, z)
        res = abs(gamma_scaled(p, z))
        if res < best_res:
            best, best_res = z, res
    return complex(best)


def _is_axis_branch(p: SemiclassicalParams, k: int) -> bool:
    """Branches whose Lambert value is real: eigenvalue and antibound solutions."""
    if p.shift is lw.SignShift.ODD:
        return k in (0, -1) and p.log_w < -1.0
    return k == 0


def series_tail(p: SemiclassicalParams, k: int) -> lw.SeriesTail:
    return lw.remainder_bound(k, None, p.shift, log_w=p.log_w)


def resonance_wk(p: SemiclassicalParams, k: int, polish: bool = True, strict: bool = True) -> complex:
    """Resonance attached to Lambert branch ``k``.

    With ``strict`` the branch must lie where the logarithmic series is
    certified (|L2/L1| <= 1/2) and must not be one of the real-axis branches.
    """
    if strict:
        if _is_axis_branch(p, k):
            raise SemiclassicalError(f"branch {k} gives a root on the imaginary axis")
        if not series_tail(p, k).valid:
            raise SemiclassicalError(f"branch {k}: |L2/L1| > 1/2, series not certified")
    x = lw.lambert_w_log(k, p.log_w, p.shift).value
    z = 0.5j * p.h / p.y3 * (x - p.log_w)
    return _polish(p, z) if polish else z


def check_branch_window(p: SemiclassicalParams, k: int, z: complex, eps: float) -> bool:
    """eps/2 <= |k| pi h / y3 <= 2/eps whenever eps <= |z| <= 1/eps (true otherwise)."""
    if not eps <= abs(z) <= 1.0 / eps:
        return True
    s = abs(k) * math.pi * p.h / p.y3
    return eps / 2.0 <= s <= 2.0 / eps


def direct_root(p: SemiclassicalParams, z: complex) -> complex:
    """The same resonance found by the unscaled solver at coupling +-h^(-beta)."""
    params = p.unscaled()
    zeta = z / p.h
    if zeta.real == 0.0:
        anti = find_antibound(params)
        if anti is None:
            raise SemiclassicalError("no antibound state in the unscaled model")
        return anti.z * p.h
    t = 2.0 * p.y3 * abs(zeta.real)
    m = int(math.floor(t / math.pi))
    if p.bc is BoundaryCondition.DIRICHLET:
        if m % 2:
            raise SemiclassicalError(f"root lies in a Dirichlet gap interval (m={m})")
        pair = find_low_pair(params) if m == 0 else find_branch(params, m // 2)
    else:
        if m % 2 == 0:
            raise SemiclassicalError(f"root lies in a Neumann gap interval (m={m})")
        pair = find_branch(params, (m - 1) // 2)
    if pair is None:
        raise SemiclassicalError("unscaled solver found no zero on the matching interval")
    cands = [r.z * p.h for r in pair]
    return min(cands, key=lambda c: abs(c - z))


# ------------------------------------------------------------ inequalities


@dataclass(frozen=True)
class BandCheck:
    z: complex
    branch: int
    value: float  # the quantity bounded by the inequality
    lower: float
    upper: float
    lower_ok: bool
    upper_ok: bool
    slack: float  # deviation from the predicted curve

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def _check(z, k, value, lower, upper, slack) -> BandCheck:
    return BandCheck(complex(z), int(k), float(value), float(lower), float(upper), bool(lower <= value), bool(value <= upper), float(slack))


def band_check(p: SemiclassicalParams, z: complex, k: int, eps: float) -> BandCheck:
    """0 <= -Im z - (h / 2 y3) ln(2 y3 |Re z| / h) <= (72 pi^2 / y3) eps^-2 h^(3 - 2 beta)."""
    centre = p.h / (2 * p.y3) * math.log(2 * p.y3 * abs(z.real) / p.h)
    value = -z.imag - centre
    upper = 72 * math.pi**2 / p.y3 * eps**-2 * p.h ** (3 - 2 * p.beta)
    return _check(z, k, value, 0.0, upper, value)


def mirror_index(p: SemiclassicalParams, k: int) -> int:
    """Nonnegative index n that the curvature constant is written in."""
    if p.bc is BoundaryCondition.DIRICHLET:
        if p.sign is CouplingSign.PLUS:
            return k  # (2k+1)^2 is already mirror symmetric
        return k if k >= 0 else -k - 1
    return abs(k)


def parabola_curvature(p: SemiclassicalParams, k: int, as_printed: bool = False) -> float:
    """Coefficient C with Im z ~ -C (Re z)^2 for branch k.

    ``as_printed`` applies 2 y3 L / (h k^2 pi^2) in the Neumann plus case, which
    is off by (2k)^2 / k^2 = 4 from the leading-order root; the default uses
    the consistent value.
    """
    L = math.log(p.c)
    n = mirror_index(p, k)
    h, y3 = p.h, p.y3
    if p.bc is BoundaryCondition.DIRICHLET:
        if p.sign is CouplingSign.PLUS:
            return 2 * y3 * L / (h * (2 * n + 1) ** 2 * math.pi**2)
        return y3 * L / (2 * n * n * math.pi**2 * h)
    if p.sign is CouplingSign.PLUS:
        q = n if as_printed else 2 * n
        return 2 * y3 * L / (h * q * q * math.pi**2)
    return 2 * y3 * L / ((2 * n - 1) ** 2 * math.pi**2 * h)


def parabola_bound(p: SemiclassicalParams, eps: float, envelope: bool = False) -> float:
    L = math.log(p.c)
    h, y3, b = p.h, p.y3, p.beta
    minus_dirichlet = p.bc is BoundaryCondition.DIRICHLET and p.sign is CouplingSign.MINUS
    minus_neumann_env = p.bc is BoundaryCondition.NEUMANN and p.sign is CouplingSign.MINUS and envelope
    big = 24.0 if minus_dirichlet or minus_neumann_env else 96.0
    last = 2.0 if p.bc is BoundaryCondition.DIRICHLET else 4.0
    return (1 + big * eps**-4) / (4 * math.pi * y3 * y3) * h ** (b + 1) * L + eps**-2 * h ** (2 * b - 1) / (last * math.pi**2 * y3)


def envelope_curvatures(p: SemiclassicalParams, eps: float) -> tuple[float, float]:
    """(upper, lower) k-free curvature constants, to be multiplied by h ln(c)."""
    y3 = p.y3
    if p.bc is BoundaryCondition.DIRICHLET:
        if p.sign is CouplingSign.PLUS:
            return eps**2 / (32 * y3), 8 / (eps**2 * y3)
        return eps**2 / (8 * y3), 2 / (eps**2 * y3)
    if p.sign is CouplingSign.PLUS:
        return eps**2 / (2 * y3), 8 / (eps**2 * y3)
    return eps**2 / (32 * y3), 8 / (eps**2 * y3)


def parabola_check(p: SemiclassicalParams, z: complex, k: int, eps: float, as_printed: bool = False) -> BandCheck:
    """|Im z + C_k (Re z)^2| <= B."""
    value = z.imag + parabola_curvature(p, k, as_printed) * z.real**2
    bound = parabola_bound(p, eps)
    return _check(z, k, value, -bound, bound, abs(value))


def envelope_check(p: SemiclassicalParams, z: complex, k: int, eps: float) -> tuple[BandCheck, BandCheck]:
    """The two k-free sandwich inequalities implied by the parabola bound."""
    up, lo = envelope_curvatures(p, eps)
    hl = p.h * math.log(p.c)
    bound = parabola_bound(p, eps, envelope=True)
    v_up = z.imag + up * hl * z.real**2
    v_lo = z.imag + lo * hl * z.real**2
    return (
        _check(z, k, v_up, -math.inf, bound, v_up),
        _check(z, k, v_lo, -bound, math.inf, v_lo),
    )


# ----------------------------------------------------------------- sweeps


@dataclass
class WindowRoots:
    """All Lambert-branch resonances with eps <= |z| <= 1/eps."""

    params: SemiclassicalParams
    eps: float
    roots: list[tuple[int, complex]] = field(default_factory=list)
    axis_roots: list[tuple[int, complex]] = field(default_factory=list)
    branch_range: tuple[int, int] = (0, 0)


def window_roots(p: SemiclassicalParams, eps: float, margin: float = 2.0) -> WindowRoots:
    """Scan branches |k| pi h / y3 <= 2 margin / eps and keep lower half-plane roots in the window.

    The scan reaches ``margin`` times beyond the branch range that can hold
    window roots, so the window is covered without assuming that range.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    kmax = int(math.ceil(2 * margin * p.y3 / (eps * math.pi * p.h))) + 2
    out = WindowRoots(p, eps, branch_range=(-kmax - 1, kmax))
    for k in range(-kmax - 1, kmax + 1):
        z = resonance_wk(p, k, strict=False)
        if not eps <= abs(z) <= 1.0 / eps or z.imag >= 0:
            continue
        if _is_axis_branch(p, k) or z.real == 0.0:
            out.axis_roots.append((k, z))
        else:
            out.roots.append((k, z))
    return out


@dataclass
class SweepReport:
    params: SemiclassicalParams
    eps: float
    checks: list[BandCheck]
    n_roots: int
    max_slack: float
    max_direct_diff: float
    max_residual: float
    window_ok: bool
    tail_ok: bool
    axis_roots: int

    @property
    def all_pass(self) -> bool:
        return all(c.ok for c in self.checks) and self.window_ok and self.tail_ok


def _sweep(p: SemiclassicalParams, eps: float, check_fn, direct: bool) -> SweepReport:
    wr = window_roots(p, eps)
    checks: list[BandCheck] = []
    max_diff = 0.0
    max_res = 0.0
    window_ok = True
    tail_ok = True
    for k, z in wr.roots:
        checks.extend(check_fn(p, z, k))
        max_res = max(max_res, scaled_residual(p, z))
        window_ok &= check_branch_window(p, k, z, eps)
        tail = series_tail(p, k)
        rem = lw.remainder_exact(k, p.log_w, p.shift)
        tail_ok &= tail.valid and abs(rem - tail.first_term) <= tail.bound
        if direct:
            zd = direct_root(p, z)
            max_diff = max(max_diff, abs(zd - z) / abs(z))
    max_slack = max((c.slack for c in checks), default=0.0)
    return SweepReport(p, eps, checks, len(wr.roots), max_slack, max_diff, max_res, window_ok, tail_ok, len(wr.axis_roots))


def verify_band_beta_lt1(p: SemiclassicalParams, eps: float, direct: bool = True) -> SweepReport:
    """Band inequality for 0 < beta < 1 on every window root."""
    if not 0 < p.beta < 1:
        raise ValueError("the band inequality concerns 0 < beta < 1")
    return _sweep(p, eps, lambda q, z, k: [band_check(q, z, k, eps)], direct)


def verify_parabola_beta_gt1(
    p: SemiclassicalParams, eps: float, envelope: bool = False, direct: bool = True, as_printed: bool = False
) -> SweepReport:
    """Parabola inequality (or its two k-free envelopes) for beta > 1 on every window root."""
    if not p.beta > 1:
        raise ValueError("the parabola inequality concerns beta > 1")
    if envelope:
        fn = lambda q, z, k: list(envelope_check(q, z, k, eps))
    else:
        fn = lambda q, z, k: [parabola_check(q, z, k, eps, as_printed)]
    return _sweep(p, eps, fn, direct)


SWEEP_H = (1e-1, 1e-2, 1e-3)
SWEEP_BETA = (0.5, 1.5, 2.0)
SWEEP_EPS = (0.25, 0.5)


def sweep(
    bc=BoundaryCondition.DIRICHLET,
    sign=CouplingSign.PLUS,
    y3: float = 1.0,
    hs=SWEEP_H,
    betas=SWEEP_BETA,
    epss=SWEEP_EPS,
    direct: bool = True,
) -> list[SweepReport]:
    """Run the appropriate inequality over a grid of (h, beta, eps)."""
    out = []
    for beta in betas:
        for eps in epss:
            for h in hs:
                p = SemiclassicalParams(h, beta, sign, bc, y3)
                if beta < 1:
                    out.append(verify_band_beta_lt1(p, eps, direct))
                else:
                    out.append(verify_parabola_beta_gt1(p, eps, direct=direct))
    return out
