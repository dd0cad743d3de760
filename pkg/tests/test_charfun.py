import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from susyrmt.charfun import (Component, DiagSuperPoint, EnsembleSpec, admissible_psi, cayley_hamilton_variant,
                             charfun_for, gaussian_charfun, jet_evaluate, mc_charfun_estimate, mixture_charfun,
                             newton_elementary, numeric_gaussian_fourier, power_sums)
from susyrmt.jets import Jet


def random_hermitian(beta, N, rng):
    if beta == 4:
        A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        B = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        A = (A + A.conj().T) / 2
        B = (B - B.T) / 2
        return np.block([[A, B], [-B.conj(), A.conj()]]) / 3
    A = rng.standard_normal((N, N)) + (1j * rng.standard_normal((N, N)) if beta == 2 else 0)
    return (A + A.conj().T) / 6


@pytest.mark.parametrize("beta,N", [(1, 2), (2, 3), (4, 2)])
def test_gaussian_form_matches_fourier_quadrature(beta, N, rng):
    f = gaussian_charfun(0.8, 0.3, beta=beta)
    K = random_hermitian(beta, N, rng)
    assert f.on_matrix(K) == pytest.approx(numeric_gaussian_fourier(beta, N, 0.8, K, 0.3), rel=1e-9)


def test_gaussian_form_matches_sampling(rng):
    ens = EnsembleSpec.gaussian(2, 3, 1.0, 0.5)
    K = random_hermitian(2, 3, rng)
    est, err = mc_charfun_estimate(ens, K, 100_000, seed=4)
    assert abs(est - charfun_for(ens).on_matrix(K)) < 4 * err


def test_power_sums_weights():
    p = power_sums(4, [2.0], [1.0, 3.0], 2)
    assert p == [2 * 2 - 1 - 3, 2 * 4 - 1 - 9]
    p1 = power_sums(1, [1.0, 2.0], [0.5], 1)
    assert p1 == [1 + 2 - 2 * 0.5]


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_newton_identities(xs):
    pw = [sum(x ** m for x in xs) for m in range(1, 4)]
    assert newton_elementary(pw, 3) == pytest.approx(xs[0] * xs[1] * xs[2], abs=1e-9)


def test_cayley_hamilton_variant_agrees_on_ordinary_matrices(rng):
    f = gaussian_charfun(1.0, beta=2)
    g = cayley_hamilton_variant(f, 3)
    for _ in range(4):
        K = random_hermitian(2, 3, rng)
        assert g.on_matrix(K) == pytest.approx(f.on_matrix(K), rel=1e-12)
    # but not on a superpoint with an extra fermionic direction
    pt = power_sums(2, [0.4, 0.3, 0.2, 0.6], [0.9], g.max_power)
    assert abs(complex(g(pt)) - complex(f(pt[:2]))) > 1e-6


def test_mixture_is_not_factorizing_and_reduces():
    m = mixture_charfun([Component(0.5, 1.0), Component(0.5, 2.0)], beta=2)
    assert not m.factorizes
    single = mixture_charfun([Component(1.0, 1.0)], beta=2)
    assert single.factorizes


@pytest.mark.parametrize("bad", [[Component(0.5, 1.0)], [Component(-0.5, 1.0), Component(1.5, 1.0)]])
def test_mixture_validation(bad):
    with pytest.raises(ValueError):
        mixture_charfun(bad, beta=2)


def test_ensemble_json_roundtrip():
    e = EnsembleSpec.mixture(2, 3, [(0.3, 1.0, 0.0), (0.7, 0.5, 1.0)])
    assert EnsembleSpec.from_json(e.to_json(), 2, 3) == e
    assert e.kind == "gaussian_mixture" and not e.is_even


def test_ensemble_rejects_bad_weights():
    with pytest.raises(ValueError):
        EnsembleSpec.mixture(2, 3, [(0.3, 1.0), (0.3, 1.0)])


def test_wick_admissibility():
    f = gaussian_charfun(1.0, beta=2)
    assert admissible_psi(f, math.pi / 2)
    assert admissible_psi(f, math.pi / 3)
    assert not admissible_psi(f, 0.0)


def test_jet_evaluate_derivatives():
    f = gaussian_charfun(1.0, beta=2)
    pt = DiagSuperPoint((0.7,), (0.0,), psi=math.pi / 2)
    jet = jet_evaluate(f, pt, 4)
    # Phi0 = exp(-(r1^2 - u^2)/2) with u = i d  ->  exp(-r1^2/2) exp(-d^2/2)
    assert jet.coefficient(2) == pytest.approx(-0.5 * math.exp(-0.49 / 2))
    assert isinstance(jet, Jet)


def test_cayley_hamilton_variant_needs_enough_power_sums():
    g = cayley_hamilton_variant(gaussian_charfun(1.0, beta=2), 3)
    with pytest.raises(ValueError):
        g([0.1, 0.2])
