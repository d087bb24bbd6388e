"""The ten acceptance criteria, each reporting one PASS/FAIL line."""

import cmath
import json
import math
import time

import numpy as np
import pytest

import test_properties as props
from halfspace_resonances import lambertw as lw
from halfspace_resonances.cli import main, parse_alpha
from halfspace_resonances.expansion import (
    horizontal_contour_kernel,
    residue_closed_form,
    residue_contour,
    residue_gamma_inv,
    schrodinger_kernel,
)
from halfspace_resonances.model import BoundaryCondition, ModelParams, gamma
from halfspace_resonances.oracle import count_zeros_half_disk
from halfspace_resonances.semiclassical import (
    SWEEP_BETA,
    SWEEP_EPS,
    SWEEP_H,
    SemiclassicalParams,
    sweep,
    verify_band_beta_lt1,
    verify_parabola_beta_gt1,
)
from halfspace_resonances.solver import (
    ResonanceKind,
    count_exact,
    detect_zero,
    find_all,
    find_antibound,
    gamma_residual,
    on_curve_error,
    total_multiplicity,
)

D = BoundaryCondition.DIRICHLET
N = BoundaryCondition.NEUMANN
P0 = ModelParams.from_height(D, 0.0, 1.0)


def test_figure_data(tmp_path, criterion):
    out = tmp_path / "fig1.dat"
    t0 = time.perf_counter()
    code = main(["fig1", "--bc", "dirichlet", "--alpha", "0", "--y3", "1", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    data = np.loadtxt(out)
    zs = data[:, 0] + 1j * data[:, 1]
    resid = max(gamma_residual(P0, z) for z in zs)
    curve = max(on_curve_error(P0, z) for z in zs)
    side = json.loads((tmp_path / "fig1.dat.json").read_text())
    ok = (
        code == 0
        and data.shape == (100, 2)
        and bool(np.all(data[:, 0] > math.pi))
        and side["rows"] == 100
        and resid <= 1e-12
        and curve <= 1e-10
        and elapsed < 5.0
    )
    criterion(1, ok, f"{len(zs)} rows, max |Gamma|/scale {resid:.2e}, on-curve {curve:.2e}, {elapsed:.2f} s")
    assert ok


def test_oracle_equivalence(criterion):
    rng = np.random.default_rng(20240611)
    t0 = time.perf_counter()
    mismatches = []
    for _ in range(20):
        bc = D if rng.uniform() < 0.5 else N
        alpha = float(rng.uniform(-2.0, 2.0))
        y3 = float(rng.uniform(0.2, 5.0))
        p = ModelParams.from_height(bc, alpha, y3)
        solver = total_multiplicity(find_all(p, 30.0))
        oracle = count_zeros_half_disk(p, 30.0).count
        if solver != oracle:
            mismatches.append((bc.value, alpha, y3, solver, oracle))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60.0
    criterion(2, ok, f"20 random configurations, {len(mismatches)} mismatches, {elapsed:.1f} s")
    assert ok, mismatches


def test_counting_law(criterion):
    lines, ok = [], True
    for R in (50, 100, 200, 400):
        rep = count_exact(P0, R)
        law = 2 * math.floor(R / math.pi - 0.25)
        ok &= abs(rep.exact_count - law) <= 4 and rep.exact_count == rep.oracle_count
        lines.append(f"R={R}: {rep.exact_count} vs {law}")
    ratio = count_exact(P0, 400).exact_count / (2 * 400 / math.pi)
    ok &= abs(ratio - 1) <= 0.02
    criterion(3, ok, "; ".join(lines) + f"; ratio at 400 = {ratio:.4f}")
    assert ok


def _axis_root_exists(p: ModelParams) -> bool:
    # Gamma is real on the imaginary axis; look for a sign change below the origin
    b = -np.geomspace(1e-6, 60.0, 20000)
    v = np.real(gamma(p, 1j * b))
    return bool(np.any(np.sign(v[1:]) != np.sign(v[:-1])))


def test_threshold_behaviour(criterion):
    ok, notes = True, []
    for bc in (D, N):
        for y3 in (0.5, 1.0, 3.0):
            crit = (-1 if bc is D else 1) / (8 * math.pi * y3)
            step = 0.1 * abs(crit)
            for j in range(-5, 6):
                alpha = crit + j * step
                p = ModelParams.from_height(bc, alpha, y3)
                expected = j < 0 if bc is D else j > 0
                ab = find_antibound(p)
                found = ab is not None
                if found:
                    assert ab.kind is ResonanceKind.ANTIBOUND
                    found = abs(complex(gamma(p, ab.z))) <= 1e-12 * p.scale(ab.z)
                ok &= found == expected and (j == 0 or _axis_root_exists(p) == expected)
            zero = detect_zero(ModelParams.from_height(bc, crit, y3))
            kind, mult = (ResonanceKind.ZERO_EIGENVALUE, 2) if bc is D else (ResonanceKind.ZERO_RESONANCE, 1)
            ok &= zero is not None and zero.kind is kind and zero.multiplicity == mult
        notes.append(f"{bc.value}: zero {kind.value} x{mult}")
    criterion(4, ok, "11-point sweeps at y3 in {0.5, 1, 3}; " + ", ".join(notes))
    assert ok


def test_exceptional_lines(criterion):
    worst, ok = 0.0, True
    for bc, ks in ((D, (0, 2)), (N, (1, 3))):
        for y3 in (0.5, 1.0, 2.0):
            for k in ks:
                alpha = parse_alpha(f"lnpi2k:{k}", bc, y3)
                p = ModelParams.from_height(bc, alpha, y3)
                t = math.pi / 2 + k * math.pi
                z = complex(t / (2 * y3), -math.log(t) / (2 * y3))
                r = gamma_residual(p, z)
                worst = max(worst, r)
                found = [x.z for x in find_all(p, abs(z) + 1) if x.kind is ResonanceKind.EXCEPTIONAL]
                ok &= r <= 1e-11 and any(abs(w - z) <= 1e-12 * abs(z) for w in found)
    criterion(5, ok, f"max |Gamma|/scale {worst:.2e} on the closed-form points")
    assert ok


def test_lambert_engine(criterion):
    rng = np.random.default_rng(5)
    mags = 10.0 ** rng.uniform(-6, 12, 200)
    ws = mags * np.exp(1j * rng.uniform(-math.pi, math.pi, 200))
    worst = 0.0
    for k in range(-50, 51):
        for w in ws:
            x = lw.lambert_w(k, complex(w)).value
            worst = max(worst, abs(x * cmath.exp(x) - w) / max(1.0, abs(w)))
    tails = []
    for bc in (D, N):
        for sign in ("plus", "minus"):
            tails += [r.tail_ok for r in sweep(bc, sign, direct=False)]
    n_grid = len(SWEEP_H) * len(SWEEP_BETA) * len(SWEEP_EPS) * 4
    ok = worst <= 1e-13 and all(tails) and len(tails) == n_grid
    criterion(6, ok, f"max scaled residual {worst:.2e} over 101 branches x 200 points; tail bound held on {sum(tails)}/{n_grid} sweep cells")
    assert ok


def test_semiclassical_bounds(criterion):
    ok, slack, diff = True, 0.0, 0.0
    limit = 72 * math.pi**2 * 0.5**-2 * 1e-6
    for bc in (D, N):
        for sign in ("plus", "minus"):
            band = verify_band_beta_lt1(SemiclassicalParams(1e-3, 0.5, sign, bc), 0.5)
            par = verify_parabola_beta_gt1(SemiclassicalParams(1e-3, 2.0, sign, bc), 0.5)
            ok &= band.all_pass and par.all_pass and band.max_slack <= limit
            slack = max(slack, band.max_slack)
            diff = max(diff, band.max_direct_diff, par.max_direct_diff)
    ok &= diff <= 1e-9
    criterion(7, ok, f"band slack {slack:.2e} <= {limit:.2e}; Lambert vs direct roots {diff:.1e} relative")
    assert ok


def test_residue_identity(criterion):
    res = sorted(find_all(P0, 100.0), key=lambda r: abs(r.z))[:50]
    ident = cont = 0.0
    for r in res:
        a = residue_gamma_inv(P0, r.z)
        ident = max(ident, abs(a - residue_closed_form(P0, r.z)) / abs(a))
        cont = max(cont, abs(residue_contour(P0, r.z, others=res) - a) / abs(a))
    ok = len(res) == 50 and ident <= 1e-10 and cont <= 1e-8
    criterion(8, ok, f"50 resonances: closed form {ident:.1e}, contour {cont:.1e} relative")
    assert ok


def test_schrodinger_expansion(criterion):
    x, xp = (0.0, 0.0, 1.5), (0.0, 0.0, 2.0)
    t0 = time.perf_counter()
    base = schrodinger_kernel(P0, 2.0, x, xp, n_max=40)
    oracle = horizontal_contour_kernel(P0, 2.0, x, xp)
    more = schrodinger_kernel(P0, 2.0, x, xp, n_max=60)
    tilted = schrodinger_kernel(P0, 2.0, x, xp, n_max=40, angle=-math.pi / 4 + 1e-6)
    elapsed = time.perf_counter() - t0
    agree = abs(base.total - oracle.total) / abs(oracle.total)
    stable = max(abs(more.total - base.total), abs(tilted.total - base.total))
    ok = agree <= 1e-6 and stable <= 1e-8 and elapsed < 120.0
    criterion(9, ok, f"vs contour quadrature {agree:.1e} relative; n_max/ray stability {stable:.1e}; {elapsed:.1f} s")
    assert ok


PROPERTY_SUITES = [
    ("conjugate-pair symmetry", props.test_conjugate_pair_symmetry),
    ("Dirichlet trace", props.test_dirichlet_trace_vanishes),
    ("kernel symmetry", props.test_kernel_symmetry),
    ("f_j linearity", props.test_fj_linearity),
    ("winding additivity", props.test_winding_additivity),
]


def test_property_suites(criterion):
    failed = []
    for name, prop in PROPERTY_SUITES:
        try:
            prop()
        except Exception as exc:  # any falsifying example fails the suite
            failed.append(f"{name}: {type(exc).__name__}")
    ok = not failed
    criterion(10, ok, f"{len(PROPERTY_SUITES) - len(failed)}/{len(PROPERTY_SUITES)} property suites passed" + ("; " + ", ".join(failed) if failed else ""))
    assert ok, failed
