import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from susyrmt.grassmann import (DysonParams, GeneratorPairs, GrassmannElement, GrassmannError, QQi, SuperMatrix,
                               build_dyadic_K, circularity_residual, conjugate, dual_B_symmetry_residual,
                               duality_residual, dyadic_K_symmetry_residual, random_element, random_graded,
                               random_u11, superdeterminant, supertrace, symbolic_vectors,
                               u11_cayley_hamilton_residual)

seeds = st.integers(0, 10_000)


def gens(n):
    return [GrassmannElement.generator(i, n) for i in range(n)]


def test_generators_anticommute_and_square_to_zero():
    a, b, c = gens(3)
    assert (a * b + b * a).is_zero()
    assert (a * a).is_zero()
    assert (a * b * c) == -(b * a * c)


def test_exact_arithmetic_stays_rational():
    a, b = gens(2)
    x = (1 + a * b) * QQi(Fraction(1, 3), 2)
    y = x.inverse()
    assert (x * y - 1).is_zero()
    assert isinstance(next(iter(y.terms.values())), QQi)


@given(seeds)
def test_multiplication_is_associative(seed):
    rng = random.Random(seed)
    x, y, z = (random_element(4, seed % 2 if i else 0, rng) for i in range(3))
    assert ((x * y) * z - x * (y * z)).is_zero()


@given(seeds)
def test_even_elements_commute(seed):
    rng = random.Random(seed)
    x, y = random_element(4, 0, rng), random_element(4, 0, rng)
    assert (x * y - y * x).is_zero()


def test_star_is_order_preserving():
    pairs = GeneratorPairs.from_pairs(2, [(0, 1)])
    g, gs = gens(2)
    # (g g*)* = g* (-g) = g g*
    assert conjugate(g * gs, pairs) == g * gs
    assert conjugate(conjugate(g, pairs), pairs) == -g


def test_star_needs_complete_pairing():
    with pytest.raises(GrassmannError):
        GeneratorPairs.from_pairs(3, [(0, 1)])


def test_inverse_of_nilpotent_raises():
    a, b = gens(2)
    with pytest.raises((GrassmannError, ZeroDivisionError, ValueError)):
        (a * b).inverse()


@pytest.mark.parametrize("beta,N", [(1, 2), (1, 3), (2, 1), (2, 3), (4, 1), (4, 2)])
def test_duality_is_exact(beta, N):
    p = DysonParams(beta, N)
    v = symbolic_vectors(p, seed=7)
    for m in (1, 2, 3):
        assert duality_residual(v, p, m).is_zero()


@pytest.mark.parametrize("beta,N", [(1, 2), (2, 2), (4, 2)])
def test_dyadic_and_dual_symmetries(beta, N):
    v = symbolic_vectors(DysonParams(beta, N), seed=3)
    assert dyadic_K_symmetry_residual(v).is_zero()
    assert dual_B_symmetry_residual(v).is_zero()


def test_dyadic_matrix_shape():
    v = symbolic_vectors(DysonParams(4, 2), seed=1)
    K = build_dyadic_K(v)
    assert K.shape == (4, 4)


def test_params_validation():
    with pytest.raises(ValueError):
        DysonParams(3, 2)
    with pytest.raises(ValueError):
        DysonParams(1, 1, k=1)  # needs N >= 2 for beta = 1


@given(seeds)
def test_supertrace_circularity(seed):
    rng = random.Random(seed)
    V1 = random_graded((2, 1), (1, 2), 4, rng)
    V2 = random_graded((1, 2), (2, 1), 4, rng)
    assert circularity_residual(V1, V2).is_zero()


@given(seeds)
def test_u11_cayley_hamilton(seed):
    M, _ = random_u11(random.Random(seed))
    assert u11_cayley_hamilton_residual(M).is_zero()


@given(seeds)
def test_sdet_is_multiplicative(seed):
    rng = random.Random(seed)
    A = random_graded((1, 1), (1, 1), 4, rng)
    B = random_graded((1, 1), (1, 1), 4, rng)
    assert (superdeterminant(A @ B) - superdeterminant(A) * superdeterminant(B)).is_zero()


def test_supertrace_of_identity():
    I = SuperMatrix.identity(2, 3, 2)
    assert supertrace(I) == GrassmannElement.scalar(-1, 2)
