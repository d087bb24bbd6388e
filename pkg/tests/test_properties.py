"""Property-based checks of the structural identities."""

import cmath
import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from halfspace_resonances import lambertw as lw
from halfspace_resonances.expansion import TestFunction, wave_coefficient_fj
from halfspace_resonances.model import BoundaryCondition, ModelParams, gamma, green_halfspace, resolvent_kernel
from halfspace_resonances.oracle import Rectangle, winding_count
from halfspace_resonances.solver import find_branch

D = BoundaryCondition.DIRICHLET

bcs = st.sampled_from(list(BoundaryCondition))
alphas = st.floats(-2.0, 2.0)
heights = st.floats(0.2, 5.0)
coords = st.floats(-3.0, 3.0)
positive = st.floats(0.05, 4.0)
zs = st.complex_numbers(max_magnitude=40.0, allow_nan=False, allow_infinity=False).filter(lambda z: z.imag > -8)
points = st.tuples(coords, coords, positive)

FAST = settings(max_examples=200, deadline=None)
SLOW = settings(max_examples=25, deadline=None)


@FAST
@given(bcs, alphas, heights, zs)
def test_conjugate_pair_symmetry(bc, alpha, y3, z):
    p = ModelParams.from_height(bc, alpha, y3)
    a = complex(gamma(p, -z.conjugate()))
    b = complex(gamma(p, z)).conjugate()
    assert abs(a - b) <= 1e-13 * p.scale(z)


@FAST
@given(alphas, heights, zs, coords, coords, points)
def test_dirichlet_trace_vanishes(alpha, y3, z, x1, x2, xp):
    p = ModelParams.from_height(D, alpha, y3)
    x = (x1, x2, 0.0)
    # scale: size of the free Green function between the two points
    scale = math.exp(max(0.0, -z.imag) * math.dist(x, xp)) / (4 * math.pi * math.dist(x, xp))
    assert abs(green_halfspace(p, z, x, xp)) <= 1e-14 * scale
    assume(math.dist(xp, p.y) > 1e-3 and abs(complex(gamma(p, z))) > 1e-8 * p.scale(z))
    assert abs(resolvent_kernel(p, z, x, xp)) <= 1e-14 * scale


@FAST
@given(bcs, alphas, heights, zs, points, points)
def test_kernel_symmetry(bc, alpha, y3, z, x, xp):
    p = ModelParams.from_height(bc, alpha, y3)
    assume(math.dist(x, xp) > 1e-3 and math.dist(x, p.y) > 1e-3 and math.dist(xp, p.y) > 1e-3)
    assume(abs(complex(gamma(p, z))) > 1e-8 * p.scale(z))
    a = resolvent_kernel(p, z, x, xp)
    b = resolvent_kernel(p, z, xp, x)
    assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300)


W1 = TestFunction((1.0, 0.5, 2.5), 0.3, ((0.5, 1.5), (0.0, 1.0), (2.0, 3.0)))
W0 = TestFunction((0.5, 0.5, 2.0), 0.4, ((0.0, 1.0), (0.0, 1.0), (1.7, 2.5)))
SAMPLE = np.array([[2.0, 2.0, 1.0], [-1.0, 0.0, 0.5], [0.0, 3.0, 4.0]])
scalars = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)


@SLOW
@given(bcs, alphas, st.integers(1, 6), scalars, scalars)
def test_fj_linearity(bc, alpha, k, a, b):
    p = ModelParams.from_height(bc, alpha, 1.0)
    z_j = find_branch(p, k)[0].z
    f0 = wave_coefficient_fj(p, z_j, W0, None, SAMPLE)
    f1 = wave_coefficient_fj(p, z_j, None, W1, SAMPLE)
    both = wave_coefficient_fj(p, z_j, W0.scaled(a), W1.scaled(b), SAMPLE)
    scale = abs(a) * np.abs(f0) + abs(b) * np.abs(f1) + 1e-300
    assert np.all(np.abs(both - (a * f0 + b * f1)) <= 1e-12 * scale)


@SLOW
@given(bcs, alphas, st.floats(0.5, 2.0), st.floats(-15.0, 10.0), st.floats(1.0, 8.0), st.floats(0.1, 0.9), st.floats(0.1, 0.9))
def test_winding_additivity(bc, alpha, y3, re_min, width, fx, fy):
    p = ModelParams.from_height(bc, alpha, y3)
    rect = Rectangle(re_min, re_min + width, -4.0, -1e-3)
    xs = re_min + fx * width
    ys = -4.0 + fy * (4.0 - 1e-3)
    parts = [
        Rectangle(re_min, xs, -4.0, ys),
        Rectangle(xs, re_min + width, -4.0, ys),
        Rectangle(re_min, xs, ys, -1e-3),
        Rectangle(xs, re_min + width, ys, -1e-3),
    ]
    whole = winding_count(p, rect)
    assert whole.count == sum(winding_count(p, r).count for r in parts)


branches = st.integers(-50, 50)
ws = st.complex_numbers(min_magnitude=1e-8, max_magnitude=1e12, allow_nan=False, allow_infinity=False)


@FAST
@given(branches, ws)
def test_lambert_residual(k, w):
    assume(k != 0 or abs(w + 1 / math.e) > 1e-6)
    x = lw.lambert_w(k, w).value
    assert abs(x * cmath.exp(x) - w) <= 1e-13 * max(1.0, abs(w))


@FAST
@given(st.integers(-30, 30), st.floats(5.0, 1e8), st.sampled_from(["odd", "even"]))
def test_series_tail_bound(k, log_w, shift):
    tail = lw.remainder_bound(k, None, shift, log_w=log_w)
    assume(tail.valid)
    r = lw.remainder_exact(k, log_w, shift)
    assert abs(r - tail.first_term) <= tail.bound
