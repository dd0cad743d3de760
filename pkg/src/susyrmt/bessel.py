"""Berezinians, ordinary matrix Bessel functions and the k=1 supermatrix Bessel functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from .charfun import DiagSuperPoint
from .superkernel import DomainError, SingularityError


@dataclass(frozen=True)
class BerezinianValue:
    value: complex
    structure: str  # "ratio_form" or "determinant_form"


def berezinian(s1, s2, beta: int, psi: float = 0.0, structure: str = "ratio_form") -> BerezinianValue:
    if structure == "ratio_form":
        return BerezinianValue(berezinian_ratio(s1, s2, beta, psi), structure)
    if structure == "determinant_form":
        k = _shapes(s1, s2, beta)[2]
        return BerezinianValue(determinant_sign(beta, k) * berezinian_det(s1, s2, beta, psi), structure)
    raise ValueError("structure must be ratio_form or determinant_form")


def _vand(x) -> complex:
    x = np.asarray(x, dtype=complex)
    out = 1 + 0j
    for a in range(len(x)):
        for b in range(a + 1, len(x)):
            out *= x[a] - x[b]
    return out


def _shapes(s1, s2, beta: int) -> tuple[np.ndarray, np.ndarray, int]:
    s1 = np.atleast_1d(np.asarray(s1, dtype=complex))
    s2 = np.atleast_1d(np.asarray(s2, dtype=complex))
    if beta == 1:
        k = len(s2)
        ok = len(s1) == 2 * k
    elif beta == 2:
        k = len(s1)
        ok = len(s2) == k
    elif beta == 4:
        k = len(s1)
        ok = len(s2) == 2 * k
    else:
        raise DomainError("beta must be 1, 2 or 4")
    if not ok or k < 1:
        raise DomainError(f"eigenvalue counts ({len(s1)}, {len(s2)}) do not fit beta={beta}")
    return s1, s2, k


def _differences(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a[:, None] - b[None, :]
    if np.any(np.abs(d) < 1e-14 * max(1.0, float(np.max(np.abs(d))))):
        raise SingularityError("a bosonic eigenvalue coincides with a rotated fermionic one")
    return d


def berezinian_ratio(s1, s2, beta: int, psi: float = 0.0) -> complex:
    """``Delta^beta(s1) Delta^{4/beta}(e^{i psi} s2) / V^2``."""
    s1, s2, _ = _shapes(s1, s2, beta)
    u = np.exp(1j * psi) * s2
    V = np.prod(_differences(s1, u))
    return complex(_vand(s1) ** beta * _vand(u) ** (4 // beta) / V ** 2)


def berezinian_det(s1, s2, beta: int, psi: float = 0.0, dps: int = 40) -> complex:
    """Determinant form of the Berezinian.

    beta=2: squared Cauchy determinant (equal to the ratio).  beta=1: the
    determinant of the mixed first/second-order Cauchy kernel with block
    column ordering, which equals ``(-1)^{k(k-1)/2}`` times the ratio.  beta=4
    is the beta=1 form with the two sets of arguments exchanged.

    The determinant is expanded in ``dps``-digit arithmetic because nearly
    coincident points make it cancel heavily.
    """
    s1, s2, k = _shapes(s1, s2, beta)
    _differences(s1, np.exp(1j * psi) * s2)
    with mpmath.workdps(dps):
        ph = mpmath.expjpi(mpmath.mpf(psi) / mpmath.pi)
        a = [mpmath.mpc(v) for v in s1]
        b = [ph * mpmath.mpc(v) for v in s2]
        if beta == 2:
            M = mpmath.matrix([[1 / (x - y) for y in b] for x in a])
            return complex(mpmath.det(M) ** 2)
        if beta == 4:
            a, b = b, a
        M = mpmath.matrix([[1 / (x - y) for y in b] + [1 / (x - y) ** 2 for y in b] for x in a])
        return complex(mpmath.det(M))


def determinant_sign(beta: int, k: int) -> int:
    """Sign relating ratio and determinant forms: ``ratio = sign * det``."""
    return 1 if beta == 2 else (-1) ** (k * (k - 1) // 2)


# ---------------------------------------------------------------------------
# ordinary matrix Bessel functions

def hciz_2x2(y, x) -> complex:
    """Closed form of the U(2) average of ``exp(i tr y U x U^dagger)``."""
    y1, y2 = y
    x1, x2 = x
    if abs(y1 - y2) < 1e-12 or abs(x1 - x2) < 1e-12:
        raise SingularityError("degenerate arguments; use matrix_bessel_numeric")
    num = np.exp(1j * (y1 * x1 + y2 * x2)) - np.exp(1j * (y1 * x2 + y2 * x1))
    return complex(num / (1j * (y1 - y2) * (x1 - x2)))


def matrix_bessel_numeric(beta: int, y, x, nodes: int = 256) -> complex:
    """Haar average of ``exp(i tr y U x U^-1)`` over O(2), U(2) or USp(2) for size-2 arguments.

    The trace counts each distinct eigenvalue once.  For size 2 the
    integrand depends on one angle through ``t = cos^2 theta``, whose Haar
    weight is ``(sin theta cos theta)^{beta-1}``; the angle is integrated by
    Gauss-Legendre with ``nodes`` points.  Size 1 returns the plane wave.
    """
    if beta not in (1, 2, 4):
        raise DomainError("beta must be 1, 2 or 4")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if y.shape != x.shape or len(y) > 2:
        raise DomainError("arguments must have equal size <= 2")
    if len(y) == 1:
        return complex(np.exp(1j * y[0] * x[0]))
    g, w = np.polynomial.legendre.leggauss(nodes)
    th = (g + 1) * math.pi / 4
    w = w * math.pi / 4
    weight = (np.sin(th) * np.cos(th)) ** (beta - 1)
    t = np.cos(th) ** 2
    phase = (y[0] * x[0] + y[1] * x[1]) * t + (y[0] * x[1] + y[1] * x[0]) * (1 - t)
    return complex(np.sum(w * weight * np.exp(1j * phase)) / np.sum(w * weight))


# ---------------------------------------------------------------------------
# supermatrix Bessel functions for k = 1

def super_bessel_u11(r: DiagSuperPoint, x: float, J: float) -> complex:
    """U(1/1) Bessel function in the source variables ``x - J, x + J``.

    ``r`` carries one bosonic and one fermionic eigenvalue together with the
    Wick angle and the regulator ``eps``.
    """
    (r1,), (r2,) = r.r1, r.r2
    u = np.exp(1j * r.psi) * r2
    if abs(r1 - u) < 1e-14:
        raise SingularityError("Berezinian pole at r1 = e^{i psi} r2")
    str_r = r1 - u
    plane = np.exp(-1j * r1 * (x - J)) * np.exp(1j * u * (x + J))
    # 1 / sqrt(B(r) B(x-J, x+J)) = (r1 - u) * (-2 J)
    return complex(1j * np.exp(-r.eps * str_r) / (2 * math.pi) * plane * str_r * (-2 * J))


def super_bessel_uosp21(r: DiagSuperPoint, x: complex, J: complex) -> complex:
    """UOSp(2/1) Bessel function: two bosonic eigenvalues, one fermionic."""
    r11, r21 = r.r1
    (r2,) = r.r2
    u = np.exp(1j * r.psi) * r2
    str_r = r11 + r21 - 2 * u
    xm = x - 1j * r.eps
    return complex(-2 * J / math.pi * np.exp(-1j * str_r * (xm + J))
                   * (1j * str_r + J * (r11 - u) * (r21 - u)))


def u11_normalization_check(x: float, J: float, rmax: float = 12.0) -> tuple[complex, complex]:
    """Gaussian test of the U(1/1) kernel normalization at ``psi = pi/2``.

    Returns ``(1 - int f phi B dr1 dr2, exp(-Str x^2 / 2))`` for
    ``f = exp(-Str r^2 / 2)`` with the signed Berezinian; the first entry is
    the eigenvalue side including the boundary term ``f(0) = 1``.
    """
    def part(th, rho, k):
        r1 = rho * math.cos(th)
        u = 1j * rho * math.sin(th)
        # phi * B = -(i J / pi) exp(...) / (r1 - u); rho / (r1 - u) has unit modulus
        val = math.exp(-rho * rho / 2) * (-1j * J / math.pi) \
            * np.exp(-1j * r1 * (x - J) + 1j * u * (x + J)) * rho / (r1 - u)
        return val.real if k == 0 else val.imag

    re = integrate.dblquad(lambda th, rho: part(th, rho, 0), 0, rmax, 0, 2 * math.pi, epsabs=1e-11)[0]
    im = integrate.dblquad(lambda th, rho: part(th, rho, 1), 0, rmax, 0, 2 * math.pi, epsabs=1e-11)[0]
    str_x2 = (x - J) ** 2 - (x + J) ** 2
    return 1 - complex(re, im), complex(math.exp(-str_x2 / 2))
