import math

import numpy as np
import pytest

from halfspace_resonances.model import (
    BoundaryCondition,
    CoincidentPointsError,
    ModelParams,
    PoleError,
    gamma,
    gamma_derivative,
    gamma_log_derivative,
    green_at_source,
    green_free,
    green_halfspace,
    laurent_at_zero,
    resolvent_kernel,
    taylor_coefficients,
)

D = BoundaryCondition.DIRICHLET
N = BoundaryCondition.NEUMANN


def test_boundary_condition_parse_and_sign():
    assert BoundaryCondition.parse("Dirichlet") is D
    assert BoundaryCondition.parse("n") is N
    assert D.sign == 1 and N.sign == -1
    with pytest.raises(ValueError):
        BoundaryCondition.parse("robin")


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(D, 0.0, (0, 0, 0))
    with pytest.raises(ValueError):
        ModelParams(D, 0.0, (0, 0, -1))
    with pytest.raises(ValueError):
        ModelParams(D, math.inf)
    p = ModelParams.from_height("neumann", 0.5, 2.0)
    assert p.y == (0.0, 0.0, 2.0) and p.y_image == (0.0, 0.0, -2.0)
    assert p.with_alpha(1.0).alpha == 1.0


def test_gamma_at_zero_and_critical_coupling():
    for bc in (D, N):
        p = ModelParams.from_height(bc, 0.0, 1.5)
        pc = p.with_alpha(p.critical_alpha)
        assert abs(gamma(pc, 0.0)) < 1e-16
    assert ModelParams.from_height(D, 0, 1).critical_alpha == pytest.approx(-1 / (8 * math.pi))


def test_gamma_broadcasts():
    p = ModelParams.from_height(D, 0.3, 1.0)
    z = np.array([[1 - 1j, 2 + 0.5j], [0.0, -3j]])
    g = gamma(p, z)
    assert g.shape == z.shape
    assert g[0, 0] == pytest.approx(gamma(p, 1 - 1j))


def test_gamma_overflow_guard():
    p = ModelParams.from_height(D, 0.0, 1.0)
    with pytest.raises(OverflowError):
        gamma(p, -400j)
    # the log-derivative stays finite there
    assert np.isfinite(gamma_log_derivative(p, 5 - 400j))


def test_derivative_matches_finite_difference():
    p = ModelParams.from_height(N, -0.4, 0.7)
    z = 1.3 - 0.8j
    h = 1e-6
    fd = (gamma(p, z + h) - gamma(p, z - h)) / (2 * h)
    assert abs(fd - gamma_derivative(p, z)) < 1e-9
    assert gamma_log_derivative(p, z) == pytest.approx(gamma_derivative(p, z) / gamma(p, z), rel=1e-13)


def test_green_functions():
    x = np.array([0.3, -0.2, 1.1])
    xp = np.array([0.0, 0.5, 2.0])
    z = 1.7 - 0.2j
    r = np.linalg.norm(x - xp)
    assert green_free(z, x, xp) == pytest.approx(np.exp(1j * z * r) / (4 * math.pi * r))
    p = ModelParams(D, 0.0, tuple(xp))
    with pytest.raises(CoincidentPointsError):
        green_free(z, x, x)
    with pytest.raises(CoincidentPointsError):
        green_at_source(p, z, xp)
    # Dirichlet trace vanishes, Neumann normal derivative vanishes
    xb = np.array([0.4, 0.1, 0.0])
    assert abs(green_halfspace(p, z, xb, xp)) < 1e-16
    pn = ModelParams(N, 0.0, tuple(xp))
    h = 1e-6
    up = green_halfspace(pn, z, xb + [0, 0, h], xp)
    assert abs(up - green_halfspace(pn, z, xb - [0, 0, h], xp)) < 1e-12


def test_resolvent_kernel_pole_and_symmetry():
    p = ModelParams.from_height(D, 0.0, 1.0)
    z_res = 3.7943155892362563 - 1.031138864799142j
    x, xp = (0.1, 0.2, 0.5), (-0.3, 0.4, 2.0)
    with pytest.raises(PoleError):
        resolvent_kernel(p, z_res, x, xp)
    z = 2.0 + 0.3j
    assert resolvent_kernel(p, z, x, xp) == pytest.approx(resolvent_kernel(p, z, xp, x), rel=1e-14)


def test_taylor_coefficients():
    p = ModelParams.from_height(D, 0.2, 1.3)
    a = taylor_coefficients(p, 20)
    z = 0.3 - 0.1j
    assert np.polyval(a[::-1], z) == pytest.approx(gamma(p, z), rel=1e-14)


def test_laurent_orders_at_zero():
    # double zero for Dirichlet at the critical coupling, simple for Neumann
    pd = ModelParams.from_height(D, -1 / (8 * math.pi * 1.2), 1.2)
    pn = ModelParams.from_height(N, 1 / (8 * math.pi * 1.2), 1.2)
    assert laurent_at_zero(pd).order == 2
    assert laurent_at_zero(pn).order == 1
    assert laurent_at_zero(pd.with_alpha(0.1)).order == 0
    for p in (pd, pn):
        lau = laurent_at_zero(p)
        # principal part plus constant leaves an O(z) error
        errs = [abs(lau.partial_sum(z) - 1 / gamma(p, z)) for z in (1e-2 * (1 - 1j), 1e-3 * (1 - 1j))]
        assert errs[1] < errs[0] / 8
    # leading coefficient of the Dirichlet double pole is -4 pi / y3
    assert laurent_at_zero(pd).coefficients[0] == pytest.approx(-4 * math.pi / 1.2)
