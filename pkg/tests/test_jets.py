import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from susyrmt.jets import Jet, antisymmetric_quotient, taylor_coefficients

small = st.floats(-1.5, 1.5, allow_nan=False)


def var1(x0, order=6):
    return Jet.variable(complex(x0), 0, 1, order)


@given(small, small)
def test_exp_is_a_homomorphism(a, b):
    x = var1(0.0)
    lhs = (x * a + x * x * b).exp()
    rhs = (x * a).exp() * (x * x * b).exp()
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


@given(st.floats(0.3, 3.0))
def test_reciprocal_and_log(x0):
    x = var1(x0)
    assert np.allclose((x * x.reciprocal()).coeffs, Jet.constant(1.0, 1, 6).coeffs, atol=1e-12)
    assert np.allclose(x.log().exp().coeffs, x.coeffs, atol=1e-10)


def test_taylor_coefficients_of_sin():
    x = var1(0.4, 7)
    s = ((x * 1j).exp() - (x * -1j).exp()) / 2j
    for k in range(8):
        expect = math.sin(0.4 + k * math.pi / 2) / math.factorial(k)
        assert s.coefficient(k) == pytest.approx(expect, abs=1e-14)


def test_fractional_power_matches_binomial_series():
    x = var1(2.0, 5)
    y = x ** 0.5
    for k in range(6):
        ref = math.comb(1, 0) if k == 0 else np.prod([0.5 - j for j in range(k)]) / math.factorial(k)
        assert y.coefficient(k) == pytest.approx(ref * 2.0 ** (0.5 - k), rel=1e-12)


def test_two_variable_derivatives():
    u = Jet.variable(0.3, 0, 2, 4)
    v = Jet.variable(-0.2, 1, 2, 4)
    f = (u * v).exp()
    # d^2/du dv exp(uv) = (1 + uv) exp(uv)
    assert f.derivative_at_base(1, 1) == pytest.approx((1 - 0.06) * math.exp(-0.06))
    assert f.diff(0).diff(1).value == pytest.approx(f.derivative_at_base(1, 1))


def test_truncate_zeroes_high_degrees():
    u = Jet.variable(0.0, 0, 2, 4)
    v = Jet.variable(0.0, 1, 2, 4)
    t = ((u + v) ** 4).truncate(3)
    assert t.order == 3 and np.allclose(t.coeffs, 0)


def test_antisymmetric_quotient_exact():
    u = Jet.variable(0.0, 0, 2, 5)
    v = Jet.variable(0.0, 1, 2, 5)
    q = antisymmetric_quotient((u * u * u) - (v * v * v))
    ref = (u * u + u * v + v * v).truncate(4)
    assert np.allclose(q.coeffs, ref.coeffs)


def test_antisymmetric_quotient_rejects_symmetric():
    u = Jet.variable(0.0, 0, 2, 3)
    v = Jet.variable(0.0, 1, 2, 3)
    with pytest.raises(ValueError):
        antisymmetric_quotient(u + v)


def test_mismatched_structures_raise():
    with pytest.raises(ValueError):
        var1(0.0, 3) + var1(0.0, 4)


def test_batched_jets_broadcast():
    x = Jet.variable(np.linspace(0, 1, 5), 0, 1, 3)
    y = x.exp()
    assert y.batch_shape == (5,)
    assert np.allclose(y.coefficient(2), np.exp(np.linspace(0, 1, 5)) / 2)


def test_circle_coefficients():
    c = taylor_coefficients(np.exp, 0.5, 8)
    assert np.allclose(c, [1 / math.factorial(k) for k in range(8)], atol=1e-14)
