"""Ingham-Siegel integrals, the Sekiguchi-type operator and their constants.

Conventions
-----------
Matrices of ``Herm(beta, m)`` are handled in the ``gamma2*m`` dimensional
complex representation, so ``tr`` and ``det`` below are taken there.  The
ordinary Ingham-Siegel integral is

    I(R) = int exp(-i tr R S^+) det^{-n/gamma1} S^+ d[S],   S^+ = S + i eps,

which does not depend on ``eps`` once ``eps > 0``.

Distributional pairings in the fermionic eigenvalues are computed on Taylor
jets (see :mod:`susyrmt.jets`); a derivative of a delta function paired with
a test function is a single jet coefficient.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .grassmann import DysonParams
from .jets import Jet, antisymmetric_quotient, taylor_coefficients


class DomainError(ValueError):
    """Parameters outside the range where a formula is defined."""


class QuadratureError(ArithmeticError):
    """A quadrature did not reach its tolerance."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SingularityError(ArithmeticError):
    pass


class TruncationError(ValueError):
    pass


class ContractError(ValueError):
    pass


def _gammas(beta: int) -> tuple[int, int]:
    if beta not in (1, 2, 4):
        raise DomainError("beta must be 1, 2 or 4")
    g2 = 2 if beta == 4 else 1
    return 2 * g2 // beta, g2


# ---------------------------------------------------------------------------
# constants

def lambda_exponent(n: float, m: int, beta: int) -> float:
    g1, g2 = _gammas(beta)
    return (n - m) / g1 - (g1 - g2) / 2


def kappa_exponent(N: int, beta: int) -> float:
    g1, g2 = _gammas(beta)
    return N / g1 + (g2 - g1) / 2


def G_const(n_minus_m: float, m: int, beta: int) -> float:
    """Normalization of the ordinary Ingham-Siegel integral."""
    _, g2 = _gammas(beta)
    n = n_minus_m + m
    out = (g2 / math.pi) ** (beta * m * (n - m + 1) / 2 - m)
    for j in range(1, m + 1):
        jj = n - m + j
        out *= 2 * math.pi ** (beta * jj / 2) / math.gamma(beta * jj / 2)
    return out


def g_const(n: int, beta: float) -> float:
    """``g_n^{(beta)}``: volume ratio of the eigenvalue decomposition of Herm(beta, n)."""
    out = 1.0 / math.factorial(n)
    for j in range(1, n + 1):
        out *= math.pi ** (beta * (j - 1) / 2) * math.gamma(beta / 2) / math.gamma(beta * j / 2)
    return out


def g_gaussian_ratio(n: int, beta: float) -> float:
    """Independent evaluation of :func:`g_const` as a ratio of two Gaussian integrals.

    The numerator is the Gaussian integral over the full matrix space, the
    denominator the same integral over eigenvalues (a Mehta integral).
    """
    g2 = 2 if beta == 4 else 1
    c3 = g2 ** (-n * (2 * n - 1) / 2) * 2 ** (-beta * n * (n - 1) / 4) * math.pi ** (n / 2 + beta * n * (n - 1) / 4)
    if beta == 1:
        c4 = 2 ** (-n * (n - 5) / 4) * math.prod(math.gamma(j / 2 + 1) for j in range(1, n + 1))
    elif beta == 2:
        c4 = 2 ** (-n * (n - 1) / 2) * math.pi ** (n / 2) * math.prod(math.gamma(j + 1) for j in range(1, n + 1))
    elif beta == 4:
        c4 = 2 ** (-n * (2 * n - 0.5)) * math.pi ** (n / 2) * math.prod(math.gamma(2 * j + 1) for j in range(1, n + 1))
    else:
        raise DomainError("beta must be 1, 2 or 4")
    return c3 / c4


@dataclass(frozen=True)
class ISConstants:
    lam: float
    kappa: float
    G: float
    g: float
    w1: complex
    w2: complex
    W: complex
    C: complex
    meta: dict = field(default_factory=dict)


def is_constants(p: DysonParams, psi: float = math.pi / 2) -> ISConstants:
    """All normalization constants for the supersymmetric Ingham-Siegel integral of ``p``."""
    beta, N = p.beta, p.N
    g1, g2, gt = p.gamma1, p.gamma2, p.gamma_tilde
    k1, k2 = p.k1, p.k2
    if N < k1:
        raise DomainError(f"need N >= gamma1*k = {k1}")
    bp = 4 / beta
    lam = lambda_exponent(N + k1, k1, beta)
    G = G_const(N, k1, beta)
    g = g_const(k2, bp)
    base = (2 * math.pi / g1) ** k2 * (math.pi / g1) ** (2 * k2 * (k2 - 1) / beta)
    ph = np.exp(-1j * psi * N)
    prod_ab = math.prod(a / g1 + (b - 1) / g2 for b in range(1, k2 + 1) for a in range(1, N + 1))
    w1 = base * (1j ** N * ph) ** k2 / g * prod_ab
    gam = math.prod(math.gamma(N + 1 + 2 * j / beta) / math.gamma(1 + 2 * j / beta) for j in range(k2))
    fac = math.factorial(N - k1) * g1 ** N
    w2 = (-1) ** (k1 * k2) / g * base * ((-1j) ** N * ph / fac) ** k2 * gam
    W = (gt / (2 * math.pi)) ** (k1 * k2) * base * ((-np.exp(-1j * psi)) ** N / fac) ** k2 * G / g * gam
    C = (-np.exp(-1j * psi) / g1) ** (k2 * N) * (-gt / (2 * math.pi)) ** (k1 * k2) * base * G / g
    return ISConstants(lam, kappa_exponent(N, beta), G, g, complex(w1), complex(w2), complex(W), complex(C),
                       {"beta": beta, "N": N, "k": p.k, "psi": psi})


# ---------------------------------------------------------------------------
# ordinary Ingham-Siegel integral

def _distinct_eigenvalues(R, beta: int) -> np.ndarray:
    R = np.asarray(R)
    if R.ndim <= 1:
        return np.atleast_1d(R).astype(float)
    if R.shape[0] != R.shape[1] or not np.allclose(R, R.conj().T):
        raise DomainError("R must be a hermitian matrix")
    ev = np.linalg.eigvalsh(R)
    if beta == 4:
        if R.shape[0] % 2:
            raise DomainError("beta=4 matrices are given in the 2m x 2m complex representation")
        ev = ev[::2]
    return ev


def _check_n(n: float, m: int, beta: int) -> None:
    if n < m - 1 + 2 / beta - 1e-12:
        raise DomainError(f"need n >= m - 1 + 2/beta = {m - 1 + 2 / beta}")


def ordinary_is_closed(R, n: float, beta: int, eps: float | None = None) -> complex:
    """Closed form ``i^{-beta m n / 2} G det^lambda R Theta(R)``.

    ``R`` is a hermitian matrix (``2m x 2m`` for beta=4) or a vector of its
    distinct eigenvalues.  ``eps`` is accepted for symmetry with the numeric
    routine; the value does not depend on it.
    """
    ev = _distinct_eigenvalues(R, beta)
    m = len(ev)
    _check_n(n, m, beta)
    if np.any(ev <= 0):
        return 0j
    _, g2 = _gammas(beta)
    lam = lambda_exponent(n, m, beta)
    det = float(np.prod(ev)) ** g2
    return complex(1j ** (-beta * m * n / 2) * G_const(n - m, m, beta) * det ** lam)


def _fourier_power(k: float, nu: float, eps: float, tol: float, limit: int) -> tuple[complex, float]:
    """``int exp(-i k (s + i eps)) (s + i eps)^{-nu} ds`` by QAWF on the half line."""
    if k == 0:
        raise DomainError("zero frequency: the integral is not absolutely defined")

    def g(s):
        return (s + 1j * eps) ** (-nu)

    even = lambda s, part: (g(s) + g(-s)).real if part == 0 else (g(s) + g(-s)).imag
    odd = lambda s, part: (g(s) - g(-s)).real if part == 0 else (g(s) - g(-s)).imag
    w = abs(k)
    vals, errs = [], []
    for fn, weight in ((even, "cos"), (odd, "sin")):
        for part in (0, 1):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, e = integrate.quad(fn, 0, np.inf, args=(part,), weight=weight, wvar=w,
                                      limlst=limit, epsabs=tol * 1e-3)
            vals.append(v)
            errs.append(e)
    c = complex(vals[0], vals[1])
    s = complex(vals[2], vals[3])
    # exp(-i k s) = cos(|k| s) -/+ i sin(|k| s)
    val = c - 1j * np.sign(k) * s
    return val * math.exp(k * eps), float(sum(errs)) * math.exp(k * eps)


def ordinary_is_numeric(R, n: float, beta: int, eps: float = 0.1, quad_params: dict | None = None) -> complex:
    """Direct quadrature of the ordinary Ingham-Siegel integral for ``m <= 2``.

    For ``m = 2`` the off-diagonal entry (``beta`` real components) is
    integrated in closed form for fixed diagonal, which leaves a product of two
    one-dimensional oscillatory integrals; those are done by QAWF.
    """
    qp = {"tol": 1e-6, "limit": 200, "rtol": 1e-3}
    qp.update(quad_params or {})
    ev = _distinct_eigenvalues(R, beta)
    m = len(ev)
    if m > 2:
        raise DomainError("numeric quadrature is limited to m <= 2")
    if eps <= 0:
        raise DomainError("eps must be positive")
    _check_n(n, m, beta)
    _, g2 = _gammas(beta)
    nu = beta * n / 2
    if m == 1:
        val, err = _fourier_power(g2 * ev[0], nu, eps, qp["tol"], qp["limit"])
    else:
        d = beta
        C = math.pi ** (d / 2) * special.gamma(nu - d / 2) / special.gamma(nu)
        pref = C * np.exp(-1j * math.pi * d / 2)
        a, ea = _fourier_power(g2 * ev[0], nu - d / 2, eps, qp["tol"], qp["limit"])
        b, eb = _fourier_power(g2 * ev[1], nu - d / 2, eps, qp["tol"], qp["limit"])
        val = pref * a * b
        err = abs(pref) * (abs(a) * eb + abs(b) * ea + ea * eb)
    scale = max(abs(val), 1.0)
    if not np.isfinite(err) or err > qp["rtol"] * scale:
        raise QuadratureError("oscillatory quadrature did not converge",
                              {"value": complex(val), "error": err, "eigenvalues": ev.tolist(), "n": n, "beta": beta})
    return complex(val)


# ---------------------------------------------------------------------------
# Sekiguchi-type operator

def _beta_prime(beta: int | None, beta_prime: float | None) -> float:
    if beta_prime is not None:
        return beta_prime
    _gammas(beta)
    return 4 / beta


def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i + 1:
            j = seen[i] - 1
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def _vandermonde(xs: Sequence) -> object:
    out = 1
    for a in range(len(xs)):
        for b in range(a + 1, len(xs)):
            out = out * (xs[a] - xs[b])
    return out


def sekiguchi_numerator(f: Jet, B: complex, xs: Sequence[Jet], beta_prime: float) -> Jet:
    """``Delta(x) * D(B) f`` for a jet ``f`` in ``k2`` variables.

    ``xs`` are the coordinate jets (base point plus offset).  The ``c/x`` term
    is multiplied through by the monomial prefactor, so the result is regular
    at ``x = 0``.
    """
    k2 = f.nvar
    total = None
    for perm in itertools.permutations(range(1, k2 + 1)):
        g = f
        for a, b in enumerate(perm):
            lower = g.order - 1
            x = xs[a].truncate(lower)
            c = (k2 - b) * beta_prime / 2
            new = (g.diff(a) + 1j * B * g.truncate(lower)) * x ** (k2 - b)
            if c:
                new = new + g.truncate(lower) * x ** (k2 - b - 1) * c
            g = new
        g = g * _perm_sign(perm)
        total = g if total is None else total + g
    return total


def sekiguchi_jet(f: Jet, B: complex, base: Sequence[float], beta_prime: float,
                  divided_difference: bool = True) -> Jet:
    """Apply ``D(B)`` to the jet ``f`` of a symmetric function expanded at ``base``.

    At distinct base coordinates the Vandermonde is inverted as a jet.  At a
    coincident pair (``k2 = 2``) the antisymmetric numerator is divided
    exactly (divided difference).  The result has order ``f.order - k2``.
    """
    k2 = f.nvar
    if len(base) != k2:
        raise ValueError("base point has the wrong dimension")
    if f.order < k2:
        raise TruncationError(f"jet order {f.order} is below the operator order {k2}")
    shape = f.batch_shape
    coincident = k2 == 2 and abs(base[0] - base[1]) <= 1e-12
    if coincident and not divided_difference:
        raise SingularityError("coincident coordinates require divided-difference mode")
    if k2 == 2:
        # D = (d1 + iB)(d2 + iB) - (beta'/2) (d1 - d2) / (x1 - x2)
        n = f.order
        d1, d2 = f.diff(0), f.diff(1)
        main = d1.diff(1) + 1j * B * (d1 + d2).truncate(n - 2) - B * B * f.truncate(n - 2)
        anti = d1 - d2
        if coincident:
            q = antisymmetric_quotient(anti, tol=1e-7)
        else:
            x1 = Jet.variable(np.full(shape, base[0], dtype=complex), 0, 2, n - 1)
            x2 = Jet.variable(np.full(shape, base[1], dtype=complex), 1, 2, n - 1)
            q = (anti / (x1 - x2)).truncate(n - 2)
        return main - q * (beta_prime / 2)
    xs = [Jet.variable(np.full(shape, base[a], dtype=complex), a, k2, f.order) for a in range(k2)]
    num = sekiguchi_numerator(f, B, xs, beta_prime)
    if k2 == 1:
        return num
    delta0 = _vandermonde([complex(b) for b in base])
    if abs(delta0) > 1e-12:
        vand = _vandermonde([x.truncate(num.order) for x in xs])
        return num / vand
    if not divided_difference:
        raise SingularityError("coincident coordinates require divided-difference mode")
    if k2 != 2 or abs(base[0] - base[1]) > 1e-12:
        raise SingularityError("divided differences are implemented for a coincident pair only")
    return antisymmetric_quotient(num, tol=1e-7)


def sekiguchi_apply(f: Callable, B: complex, k2: int, beta: int | None = None, x: Sequence[float] | None = None,
                    power: int = 1, beta_prime: float | None = None, divided_difference: bool = True) -> complex:
    """Value of ``D(B)^power f`` at ``x``.

    ``f`` maps a list of ``k2`` coordinate jets to a jet.  ``beta`` is the
    Dyson index of the ensemble; the operator acts on ``Herm(4/beta, k2)``
    unless ``beta_prime`` is given directly.
    """
    bp = _beta_prime(beta, beta_prime)
    x = list(x) if x is not None else [0.0] * k2
    order = k2 * power + (k2 - 1) * power  # spare orders absorb the Vandermonde division
    xs = [Jet.variable(complex(x[a]), a, k2, order) for a in range(k2)]
    g = f(xs)
    for _ in range(power):
        g = sekiguchi_jet(g, B, x, bp, divided_difference)
    return complex(g.value)


def sekiguchi_symbolic(k2: int, beta_prime, L: int) -> object:
    """Residual of the det-power relation ``D prod x^L = prod_b (L + (b-1) beta'/2) prod x^{L-1}``.

    Computed exactly with sympy at ``B = 0``; returns a sympy expression
    that simplifies to zero when the relation holds.
    """
    import sympy as sp

    xs = sp.symbols(f"x1:{k2 + 1}")
    bp = sp.nsimplify(beta_prime)
    f = sp.Mul(*[x ** L for x in xs])
    total = 0
    for perm in itertools.permutations(range(1, k2 + 1)):
        g = f
        for a, b in enumerate(perm):
            c = (k2 - b) * bp / 2
            g = xs[a] ** (k2 - b) * sp.diff(g, xs[a]) + c * xs[a] ** (k2 - b - 1) * g
        total += _perm_sign(perm) * g
    vand = sp.Mul(*[xs[a] - xs[b] for a in range(k2) for b in range(a + 1, k2)])
    target = sp.Mul(*[L + (b - 1) * bp / 2 for b in range(1, k2 + 1)]) * sp.Mul(*[x ** (L - 1) for x in xs])
    return sp.cancel(sp.expand(total) / vand - target)


def operator_symmetry_check(f: Callable, g: Callable, k2: int = 2, beta_prime: float = 2.0, B: float = 0.0,
                            half_width: float = 6.0, nodes: int = 80) -> tuple[complex, complex]:
    """Both sides of ``<f, i^k2 D g> = <i^k2 D f, g>`` with weight ``|Delta|^beta'``.

    ``f`` and ``g`` map coordinate jets to jets.  The integrals run over a
    tensor Gauss-Legendre grid; ``Delta * D`` is evaluated without the
    division, so the diagonal is harmless.
    """
    if k2 != 2:
        raise DomainError("the numeric symmetry check is implemented for k2 = 2")
    t, w = np.polynomial.legendre.leggauss(nodes)
    t, w = t * half_width, w * half_width
    X1, X2 = np.meshgrid(t, t, indexing="ij")
    W = np.outer(w, w)
    xs = [Jet.variable(X1.astype(complex), 0, 2, 2), Jet.variable(X2.astype(complex), 1, 2, 2)]
    fj, gj = f(xs), g(xs)
    Df = sekiguchi_numerator(fj, B, xs, beta_prime).value
    Dg = sekiguchi_numerator(gj, B, xs, beta_prime).value
    delta = X1 - X2
    # |Delta|^beta' / Delta, regular for beta' >= 1
    weight = np.sign(delta) * np.abs(delta) ** (beta_prime - 1)
    ph = 1j ** k2
    lhs = np.sum(W * np.conj(fj.value) * ph * Dg * weight)
    rhs = np.sum(W * np.conj(ph * Df) * gj.value * weight)
    return complex(lhs), complex(rhs)


def wick_covariance_check(g: Callable, psi: float, eps: float, base: Sequence[float], k2: int = 2,
                          beta: int = 4, gamma1: int | None = None) -> float:
    """``|D_r(i e^{i psi} gamma1 eps) f - e^{i k2 psi} [D_y(i gamma1 eps) g](e^{i psi} r)|`` with ``f(r) = g(e^{i psi} r)``."""
    bp = 4 / beta
    g1 = gamma1 if gamma1 is not None else _gammas(beta)[0]
    ph = np.exp(1j * psi)
    order = 2 * k2
    rs = [Jet.variable(complex(base[a]), a, k2, order) for a in range(k2)]
    lhs = sekiguchi_jet(g([ph * r for r in rs]), 1j * ph * g1 * eps, list(base), bp).value
    ybase = [ph * b for b in base]
    ys = [Jet.variable(complex(ybase[a]), a, k2, order) for a in range(k2)]
    rhs = np.exp(1j * k2 * psi) * sekiguchi_jet(g(ys), 1j * g1 * eps, ybase, bp).value
    return float(abs(lhs - rhs) / max(abs(rhs), 1e-300))


# ---------------------------------------------------------------------------
# Vandermonde identities

def vandermonde_derivative(n: int, power: int) -> int:
    """``prod_j d^{(power/2)(n-1)}/dx_j^{...} Delta_n(x)^power`` by exact differentiation."""
    import sympy as sp

    if n < 1:
        raise DomainError("n must be positive")
    if power not in (2, 4):
        raise DomainError("power must be 2 or 4")
    xs = sp.symbols(f"x1:{n + 1}")
    vand = sp.Mul(*[xs[a] - xs[b] for a in range(n) for b in range(a + 1, n)])
    poly = sp.Poly(vand ** power, *xs) if n > 1 else sp.Poly(sp.Integer(1), sp.Symbol("x"))
    if n == 1:
        return 1
    order = (power // 2) * (n - 1)
    for x in xs:
        poly = poly.diff(x) if order == 1 else _diff_n(poly, x, order)
    return int(poly.as_expr())


def _diff_n(poly, x, order):
    for _ in range(order):
        poly = poly.diff(x)
    return poly


def vandermonde_closed_form(n: int, power: int) -> int:
    if power == 2:
        return (-1) ** (n * (n - 1) // 2) * math.factorial(n) * math.factorial(n - 1) ** n
    if power == 4:
        return math.factorial(n) * math.factorial(2 * n - 2) ** n * math.prod(2 * j + 1 for j in range(n))
    raise DomainError("power must be 2 or 4")


# ---------------------------------------------------------------------------
# finite-part integrals

@dataclass
class DivergenceReport:
    """Evidence that a boundary integral does not converge pointwise."""

    cutoffs: list
    estimates: list
    growth: float
    exponent: float | None = None
    recommendation: str = "finite_part"
    where: str = ""

    def to_dict(self) -> dict:
        return {"cutoffs": list(self.cutoffs), "estimates": [repr(complex(e)) for e in self.estimates],
                "growth": self.growth, "exponent": self.exponent, "recommendation": self.recommendation,
                "where": self.where}


class DivergenceError(ArithmeticError):
    def __init__(self, report: DivergenceReport):
        super().__init__(f"integral diverges at the lower boundary ({report.where}); use finite_part")
        self.report = report


def _quad_complex(fn, a, b, **kw) -> complex:
    kw.setdefault("limit", 200)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(lambda t: complex(fn(t)).real, a, b, **kw)[0]
        im = integrate.quad(lambda t: complex(fn(t)).imag, a, b, **kw)[0]
    return complex(re, im)


def finite_part_integral(phi: Callable, alpha: float, upper: float = np.inf, split: float = 0.25,
                         radius: float | None = None, terms: int = 40) -> complex:
    """Hadamard finite part of ``int_0^upper t^alpha phi(t) dt``.

    ``phi`` must be analytic on the disc of radius ``radius`` (default
    ``2*split``) and vectorized over complex arguments.  On ``[0, split]`` the
    Taylor series is integrated term by term, with ``t^{-1}`` contributing
    ``log(split)``; the remainder is ordinary adaptive quadrature.
    """
    split = min(split, upper / 2)
    radius = radius if radius is not None else 2 * split
    c = taylor_coefficients(lambda z: np.asarray(phi(z), dtype=complex), radius, terms, points=2 * terms)
    head = 0j
    for j, cj in enumerate(c):
        e = alpha + j + 1
        head += cj * (math.log(split) if abs(e) < 1e-12 else split ** e / e)
    tail = _quad_complex(lambda t: t ** alpha * phi(t), split, upper)
    return head + tail


def direct_integral(phi: Callable, alpha: float, upper: float = np.inf, cutoffs=(1e-2, 1e-3, 1e-4),
                    rtol: float = 1e-3, where: str = "") -> complex:
    """``int_0^upper t^alpha phi(t) dt`` with a divergence test under shrinking cutoffs."""
    est = [_quad_complex(lambda t: t ** alpha * phi(t), d, upper) for d in cutoffs]
    growth = abs(est[-1] - est[-2]) / max(abs(est[-1]), 1e-300)
    if growth > rtol:
        raise DivergenceError(DivergenceReport(list(cutoffs), est, float(growth), alpha, where=where))
    return est[-1]


# ---------------------------------------------------------------------------
# supersymmetric Ingham-Siegel pairings

def fermionic_order(p: DysonParams) -> int:
    """Derivative order of the delta function in each fermionic eigenvalue."""
    return {1: p.N - 2, 2: p.N - 1, 4: p.N - p.k}[p.beta]


def fermionic_constant(p: DysonParams, psi: float = math.pi / 2) -> complex:
    """Prefactor of the delta-derivative form of the fermionic part."""
    k, N = p.k, p.N
    ph = np.exp(-1j * psi * N)
    if p.beta == 1:
        return complex(2.0 ** (-k * (k - 2)) * (2 * math.pi * ph / math.factorial(N - 2)) ** k)
    if p.beta == 2:
        return complex((-1) ** (k * (k + 1) // 2) * 2.0 ** (-k * (k - 1))
                       * (2 * math.pi * ph / math.factorial(N - 1)) ** k)
    return complex(2.0 ** (-k * (k - 2)) * (2 * math.pi * ph / math.factorial(N - k)) ** (2 * k)
                   * 4 ** k * math.factorial(k) / math.pi ** k)


def _test_jet(test, k2: int, order: int) -> Jet:
    if isinstance(test, Jet):
        jet = test
    else:
        jet = test([Jet.variable(0j, a, k2, order) for a in range(k2)])
    if jet.nvar != k2:
        raise ContractError(f"test jet must have {k2} variables")
    if jet.order < order:
        raise TruncationError(f"test jet has order {jet.order}, need {order}")
    return jet


def fermionic_pair(test, p: DysonParams, psi: float = math.pi / 2) -> complex:
    """Pair the fermionic part of the Ingham-Siegel distribution with a test function.

    ``test`` maps the list of fermionic coordinate jets (expanded at 0) to a
    jet, or is such a jet already.  For beta in {1, 2} the pairing is the
    constant times ``prod_j d^n test / d r2_j^n`` at 0.  For beta = 4 (``k=1``)
    the distribution ``det(e^{i psi} r2) (4 e^{-2 i psi} D)^N delta delta / (e^{i psi} Delta)``
    is paired by moving ``D`` onto the test; ``test`` must be antisymmetric.
    """
    N = p.N
    if p.beta in (1, 2):
        n = fermionic_order(p)
        if n < 0:
            raise DomainError("N too small for this beta")
        jet = _test_jet(test, p.k2, n * p.k2)
        return fermionic_constant(p, psi) * complex(np.asarray(jet.derivative_at_base(*([n] * p.k2))))
    if p.k != 1:
        raise DomainError("the beta=4 pairing is implemented for k = 1")
    order = 3 * N + 1
    jet = _test_jet(test, 2, order)
    jet = jet.truncate(order)
    ph = np.exp(1j * psi)
    r = [Jet.variable(0j, a, 2, order) for a in range(2)]
    sym = jet + jet.swap()
    if np.max(np.abs(sym.coeffs)) > 1e-9 * max(np.max(np.abs(jet.coeffs)), 1.0):
        raise ContractError("the beta=4 test function must be antisymmetric in r12, r22")
    h = antisymmetric_quotient(jet * (ph * r[0]) * (ph * r[1]), tol=1e-7) * (1 / ph)
    for _ in range(N):
        h = sekiguchi_jet(h, 0.0, [0.0, 0.0], 1.0)
    return complex((4 * np.exp(-2j * psi)) ** N / math.factorial(2 * N + 1) * h.value)


def bosonic_pair(bosonic: Callable, p: DysonParams, mode: str = "direct", upper: float = np.inf) -> complex:
    """``int Theta(r1) det^kappa r1 bosonic(r1) d[r1]`` with direct or finite-part treatment at 0.

    For two bosonic eigenvalues (beta = 1) ``bosonic`` must factorize as
    ``b(r11) * b(r21)`` and is passed as the single-variable ``b``.
    """
    if mode not in ("direct", "finite_part"):
        raise ValueError("mode must be 'direct' or 'finite_part'")
    kap = kappa_exponent(p.N, p.beta)
    g2 = p.gamma2
    alpha = g2 * kap
    fn = finite_part_integral if mode == "finite_part" else direct_integral
    one = fn(bosonic, alpha, upper)
    return one ** p.k1


def is_super_pair(test, p: DysonParams, mode: str = "direct", psi: float = math.pi / 2,
                  bosonic: Callable | None = None) -> complex:
    """Pairing of the supersymmetric Ingham-Siegel distribution with a test function.

    The fermionic part is always included.  When ``bosonic`` is given, the
    factor ``int Theta(r1) det^kappa r1 bosonic d[r1]`` is multiplied in and
    ``mode`` selects direct integration (with a divergence test) or the
    Hadamard finite part at ``r1 = 0``.
    """
    if mode not in ("direct", "finite_part"):
        raise ValueError("mode must be 'direct' or 'finite_part'")
    val = fermionic_pair(test, p, psi)
    if bosonic is not None:
        val *= bosonic_pair(bosonic, p, mode)
    return val


def w1_quadrature_check(N: int, psi: float = math.pi / 2, eps: float = 0.1, width: float = 1.0,
                       sigma_max: float = 14.0, nodes: int = 400) -> tuple[complex, complex]:
    """Numeric left side and ``w1 f(0)`` for ``k2 = 1``, beta = 2, Gaussian ``f``.

    Left side: ``int dsigma (e^{-i psi} sigma + i eps)^N int dr f(r) r^N e^{i r sigma}``.
    The inner transform is done by Gauss-Hermite-free adaptive quadrature on
    a Gauss-Legendre sigma grid.
    """
    f = lambda r: np.exp(-r * r / (2 * width ** 2))
    s, w = np.polynomial.legendre.leggauss(nodes)
    s, w = s * sigma_max / width, w * sigma_max / width
    rmax = 12 * width
    inner = np.array([_quad_complex(lambda r, sg=sg: f(r) * r ** N * np.exp(1j * r * sg), -rmax, rmax,
                                    epsabs=1e-13, epsrel=1e-12) for sg in s])
    lhs = np.sum(w * (np.exp(-1j * psi) * s + 1j * eps) ** N * inner)
    w1 = is_constants(DysonParams(2, N, 1), psi).w1
    return complex(lhs), complex(w1 * f(0.0))
