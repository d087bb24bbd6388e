import math

import numpy as np
import pytest

from halfspace_resonances.model import BoundaryCondition, ModelParams, gamma_derivative, gamma_log_derivative
from halfspace_resonances.oracle import (
    Arc,
    ConvergenceError,
    Line,
    Rectangle,
    WindingError,
    bisect,
    circle,
    contour_integral,
    count_zeros_half_disk,
    lower_half_disk_path,
    polygon,
    winding_count,
    winding_integral,
)
from halfspace_resonances.solver import find_branch, h_of_a, g_of_a, branch_interval

D = BoundaryCondition.DIRICHLET
P0 = ModelParams.from_height(D, 0.0, 1.0)


def test_unit_circle_integral():
    assert contour_integral(lambda z: 1 / z, circle(0j, 1.0)) == pytest.approx(2j * math.pi, abs=1e-12)
    assert abs(contour_integral(lambda z: z**3, circle(0.2j, 2.0))) < 1e-11


def test_contour_pieces():
    seg = Line(0j, 3 + 4j)
    assert seg.length == 5
    arc = Arc(1j, 2.0, 0.0, math.pi)
    assert arc.length == pytest.approx(2 * math.pi)
    assert arc.point(1.0) == pytest.approx(1j - 2)
    sq = polygon([0, 1, 1 + 1j, 1j])
    assert contour_integral(lambda z: np.ones_like(z), sq) == pytest.approx(0, abs=1e-14)
    # open path integrals of an entire function depend only on endpoints
    assert contour_integral(lambda z: 2 * z, [seg]) == pytest.approx((3 + 4j) ** 2)


def test_error_estimate_and_budget():
    val, err = contour_integral(lambda z: np.exp(z), [Line(0j, 1 + 0j)], return_error=True)
    assert val == pytest.approx(math.e - 1, rel=1e-14)
    assert err < 1e-12
    with pytest.raises(ConvergenceError):
        contour_integral(lambda z: np.exp(1j * 1e4 * z * z), [Line(0j, 10 + 0j)], tol=1e-14, max_panels=200)


def test_winding_example_rectangle():
    res = winding_count(P0, Rectangle(math.pi, 3 * math.pi / 2, -3.0, -1e-6))
    assert res.count == 1 and res.certified
    assert abs(res.raw - 1) < 0.05


def test_empty_upper_region():
    assert winding_count(P0, Rectangle(0.5, 20.0, 0.1, 5.0)).count == 0


def test_subdivision_additivity():
    rect = Rectangle(-12.0, 12.0, -4.0, -1e-6)
    whole = winding_count(P0, rect).count
    assert whole == sum(winding_count(P0, r).count for r in rect.split())
    assert whole == 8  # low pair plus three branches on each side


def test_residue_integral_matches_derivative():
    z = find_branch(P0, 1)[0].z
    from halfspace_resonances.model import gamma

    val = contour_integral(lambda s: 1 / gamma(P0, s), circle(z, 0.1), tol=1e-13) / (2j * math.pi)
    assert val == pytest.approx(1 / gamma_derivative(P0, z), rel=1e-10)


def test_log_derivative_integral_counts():
    path = Rectangle(3.0, 4.5, -2.0, -0.5).path()
    assert winding_integral(P0, path) == pytest.approx(1.0, abs=1e-4)
    val = contour_integral(lambda z: gamma_log_derivative(P0, z), path, relative=False, tol=1e-10)
    assert val == pytest.approx(2j * math.pi, abs=1e-8)


def test_boundary_zero_is_nudged():
    z = find_branch(P0, 1)[0].z
    rect = Rectangle(z.real, z.real + 1.0, -3.0, -0.1)  # left edge through the zero
    res = winding_count(P0, rect)
    assert res.offset > 0
    assert res.count == 1


def test_persistent_boundary_zero_raises():
    z = find_branch(P0, 1)[0].z
    rect = Rectangle(z.real, z.real + 1.0, -3.0, -0.1)
    with pytest.raises(WindingError):
        winding_count(P0, rect, max_nudges=0)


def test_half_disk():
    assert count_zeros_half_disk(P0, 30.0).count == 20
    path = lower_half_disk_path(5.0, 1e-6, indent=1e-3)
    assert contour_integral(lambda z: 1 / z, path) == pytest.approx(2j * math.pi, abs=1e-10)
    crit = ModelParams.from_height(D, -1 / (8 * math.pi), 1.0)
    # double zero at the origin plus branches 1 and 2 on both sides
    assert count_zeros_half_disk(crit, 10.0, include_origin=True).count == 2 + 4


def test_bisect():
    assert bisect(lambda x: x, -1.0, 1.0) == 0.0
    assert bisect(lambda x: x**3 - 2, 0.0, 2.0) == pytest.approx(2 ** (1 / 3), rel=1e-14)
    with pytest.raises(ValueError):
        bisect(lambda x: x * x + 1, -1.0, 1.0)


def test_bisect_reproduces_branch_real_part():
    # the real part of a branch zero is where the two curve functions cross
    lo, hi = branch_interval(P0, 1)
    f = lambda a: h_of_a(P0, a) - g_of_a(1.0, a)
    eps = 1e-9 * (hi - lo)
    a = bisect(f, lo + eps, hi - eps)
    assert a == pytest.approx(find_branch(P0, 1)[0].z.real, rel=1e-12)


def test_rectangle_validation():
    with pytest.raises(ValueError):
        Rectangle(1.0, 0.0, -1.0, 0.0)
    assert len(Rectangle(0, 1, -1, 0).split()) == 4
