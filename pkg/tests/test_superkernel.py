import math

import numpy as np
import pytest

from susyrmt.grassmann import DysonParams
from susyrmt.jets import Jet
from susyrmt.superkernel import (ContractError, DivergenceError, DomainError, SingularityError, TruncationError,
                                 direct_integral, fermionic_pair, finite_part_integral, g_const, g_gaussian_ratio,
                                 is_constants, is_super_pair, operator_symmetry_check, ordinary_is_closed,
                                 ordinary_is_numeric, sekiguchi_apply, sekiguchi_jet, sekiguchi_symbolic,
                                 w1_quadrature_check, vandermonde_closed_form, vandermonde_derivative,
                                 wick_covariance_check)


@pytest.mark.parametrize("beta", [1, 2, 4])
@pytest.mark.parametrize("R", [[0.8], [0.6, 1.9]])
def test_ordinary_ingham_siegel_quadrature(beta, R):
    n = 3.0
    num = ordinary_is_numeric(R, n, beta, eps=0.2)
    assert num == pytest.approx(ordinary_is_closed(R, n, beta), rel=1e-6)


def test_ordinary_ingham_siegel_vanishes_off_cone():
    assert ordinary_is_closed([0.5, -1.0], 3, 2) == 0
    assert abs(ordinary_is_numeric([0.5, -1.0], 3, 2, eps=0.1)) < 1e-8


def test_ordinary_ingham_siegel_accepts_matrices():
    R = np.diag([0.7, 1.3]).astype(complex)
    assert ordinary_is_closed(R, 3, 2) == pytest.approx(ordinary_is_closed([0.7, 1.3], 3, 2))
    with pytest.raises(DomainError):
        ordinary_is_closed(np.diag([1.0, 2.0, 3.0]), 4, 4)


def test_ordinary_ingham_siegel_needs_large_n():
    with pytest.raises(DomainError):
        ordinary_is_closed([1.0, 2.0], 0.5, 2)


def test_gaussian_constant_ratio():
    for beta in (1, 2, 4):
        for n in (2, 3, 4):
            assert g_const(n, beta) == pytest.approx(g_gaussian_ratio(n, beta), rel=1e-12)


def test_is_constants_report_parameters():
    c = is_constants(DysonParams(2, 3))
    assert c.meta["N"] == 3 and np.isfinite(abs(c.w1))


@pytest.mark.parametrize("n,power,value", [(2, 2, -2), (3, 2, -48), (2, 4, 24), (1, 2, 1)])
def test_vandermonde_values(n, power, value):
    assert vandermonde_derivative(n, power) == value
    assert vandermonde_closed_form(n, power) == value


@pytest.mark.parametrize("k2", [1, 2, 3])
@pytest.mark.parametrize("bp", [1, 2, 4])
def test_det_power_relation(k2, bp):
    for L in range(0, 4):
        assert sekiguchi_symbolic(k2, bp, L) == 0


def test_hciz_is_an_eigenfunction():
    y = np.array([0.7, -0.4])
    B = 0.3

    def phi(xs):
        x1, x2 = xs
        num = (1j * (y[0] * x1 + y[1] * x2)).exp() - (1j * (y[0] * x2 + y[1] * x1)).exp()
        return num / (1j * (y[0] - y[1]) * (x1 - x2))

    x0 = [0.5, 1.7]
    lhs = sekiguchi_apply(phi, B, 2, beta=2, x=x0)
    xs = [Jet.variable(complex(v), a, 2, 3) for a, v in enumerate(x0)]
    assert lhs == pytest.approx(np.prod(1j * (y + B)) * phi(xs).value, rel=1e-12)


def test_operator_symmetry():
    def f(xs):
        return (-(xs[0] * xs[0] + xs[1] * xs[1]) * 0.5 + (xs[0] + xs[1]) * 0.3).exp()

    def g(xs):
        return (-(xs[0] * xs[0] + xs[1] * xs[1]) * 0.7).exp() * (xs[0] * xs[1] + 1)

    lhs, rhs = operator_symmetry_check(f, g)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_wick_covariance():
    def g(ys):
        return (-(ys[0] * ys[0] + ys[1] * ys[1]) * 0.5 + ys[0] * ys[1] * 0.3).exp()

    assert wick_covariance_check(g, math.pi / 3, 0.2, [0.4, 1.1]) < 1e-12


def test_divided_difference_limit():
    def h(xs):
        return (-(xs[0] * xs[0] + xs[1] * xs[1]) * 0.5 + xs[0] * xs[1]).exp()

    at = sekiguchi_apply(h, 0.0, 2, beta=4, x=[0.0, 0.0], power=2)
    near = sekiguchi_apply(h, 0.0, 2, beta=4, x=[0.0, 1e-4], power=2)
    assert at == pytest.approx(near, rel=1e-5)


def test_coincident_points_need_divided_difference():
    u = Jet.variable(0.0, 0, 2, 4)
    v = Jet.variable(0.0, 1, 2, 4)
    with pytest.raises(SingularityError):
        sekiguchi_jet((u * v).exp(), 0.0, [0.0, 0.0], 1.0, divided_difference=False)


@pytest.mark.parametrize("N", [1, 2])
def test_w1_constant_by_quadrature(N):
    lhs, rhs = w1_quadrature_check(N)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_finite_part_of_power():
    # FP int_0^1 t^{-3/2} dt = -2 and FP int_0^1 t^{-1} dt = 0
    one = lambda t: np.ones_like(t)
    assert finite_part_integral(one, -1.5, 1.0) == pytest.approx(-2.0, abs=1e-10)
    assert abs(finite_part_integral(one, -1.0, 1.0)) < 1e-10


def test_finite_part_equals_ordinary_integral_when_convergent():
    phi = lambda t: np.exp(-t)
    assert finite_part_integral(phi, 0.5, np.inf) == pytest.approx(math.gamma(1.5), rel=1e-9)


def test_direct_integral_reports_divergence():
    with pytest.raises(DivergenceError) as info:
        direct_integral(lambda t: np.exp(-t), -1.5, 5.0, where="test")
    rep = info.value.report.to_dict()
    assert rep["recommendation"] == "finite_part" and rep["where"] == "test"


def test_fermionic_pair_beta2_is_a_derivative():
    p = DysonParams(2, 3)
    # test = exp(a r): second derivative a^2
    val = fermionic_pair(lambda xs: (xs[0] * 0.7).exp(), p)
    assert val / fermionic_pair(lambda xs: (xs[0] * 1.0).exp(), p) == pytest.approx(0.49)


def test_fermionic_pair_beta4_requires_antisymmetry():
    p = DysonParams(4, 1)
    with pytest.raises(ContractError):
        fermionic_pair(lambda xs: (xs[0] + xs[1]) * 1.0 + 1.0, p)


def test_fermionic_pair_truncation_guard():
    p = DysonParams(2, 4)
    jet = Jet.variable(0.0, 0, 1, 1)
    with pytest.raises(TruncationError):
        fermionic_pair(jet, p)


def test_super_pair_modes():
    p = DysonParams(2, 2)
    test = lambda xs: (xs[0] * 0.5).exp()
    b = lambda t: np.exp(-t)
    direct = is_super_pair(test, p, "direct", bosonic=b)
    fp = is_super_pair(test, p, "finite_part", bosonic=b)
    assert direct == pytest.approx(fp, rel=1e-8)
    with pytest.raises(ValueError):
        is_super_pair(test, p, "other")
