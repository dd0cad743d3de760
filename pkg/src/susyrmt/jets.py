"""Truncated multivariate Taylor polynomials (jets) over numpy batches.

A :class:`Jet` stores Taylor coefficients of a function of ``nvar`` small
offsets around a base point, truncated at total degree ``order``.  The
coefficient array has shape ``batch + (order + 1,) * nvar``; entries whose
multi-index exceeds the total degree are kept at zero.  Coefficients are the
plain Taylor coefficients (no factorials), so ``c[a, b]`` multiplies
``du1**a * du2**b``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable

import numpy as np


@lru_cache(maxsize=None)
def _mask(nvar: int, order: int) -> np.ndarray:
    grids = np.indices((order + 1,) * nvar).sum(axis=0)
    return grids <= order


@lru_cache(maxsize=None)
def _indices(nvar: int, order: int) -> tuple:
    return tuple(idx for idx in itertools.product(range(order + 1), repeat=nvar)
                 if sum(idx) <= order)


class Jet:
    """Batched truncated Taylor polynomial in ``nvar`` variables."""

    __array_priority__ = 1000

    def __init__(self, coeffs, nvar: int, order: int):
        self.coeffs = np.asarray(coeffs)
        self.nvar = nvar
        self.order = order

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, nvar: int, order: int) -> "Jet":
        value = np.asarray(value)
        c = np.zeros(value.shape + (order + 1,) * nvar, dtype=np.result_type(value, float))
        c[(Ellipsis,) + (0,) * nvar] = value
        return cls(c, nvar, order)

    @classmethod
    def variable(cls, value, index: int, nvar: int, order: int) -> "Jet":
        """Jet of ``value + d_index``."""
        j = cls.constant(value, nvar, order)
        if order >= 1:
            pos = [0] * nvar
            pos[index] = 1
            j.coeffs[(Ellipsis,) + tuple(pos)] = 1.0
        return j

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[: self.coeffs.ndim - self.nvar]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[(Ellipsis,) + (0,) * self.nvar]

    def coefficient(self, *idx: int) -> np.ndarray:
        if sum(idx) > self.order:
            return np.zeros(self.batch_shape)
        return self.coeffs[(Ellipsis,) + tuple(idx)]

    def derivative_at_base(self, *idx: int) -> np.ndarray:
        """Partial derivative of multi-order ``idx`` at the base point."""
        fac = math.prod(math.factorial(i) for i in idx)
        return fac * self.coefficient(*idx)

    # helpers --------------------------------------------------------------
    def _like(self, coeffs) -> "Jet":
        return Jet(coeffs, self.nvar, self.order)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.nvar != self.nvar or other.order != self.order:
                raise ValueError("jets with different structure")
            return other
        return Jet.constant(other, self.nvar, self.order)

    def _expand(self, arr):
        arr = np.asarray(arr)
        return arr.reshape(arr.shape + (1,) * self.nvar)

    def truncate(self, order: int) -> "Jet":
        sl = (Ellipsis,) + (slice(0, order + 1),) * self.nvar
        c = self.coeffs[sl] * _mask(self.nvar, order)
        return Jet(c, self.nvar, order)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            return self._like(self.coeffs + self._coerce(other).coeffs)
        c = np.array(np.broadcast_to(self.coeffs, np.broadcast_shapes(
            self.coeffs.shape, np.shape(other) + (1,) * self.nvar)),
            dtype=np.result_type(self.coeffs, other))
        c[(Ellipsis,) + (0,) * self.nvar] += other
        return self._like(c)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._like(self.coeffs * self._expand(other))
        other = self._coerce(other)
        return self._like(_mul(self.coeffs, other.coeffs, self.nvar, self.order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self._like(self.coeffs / self._expand(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(np.ones(self.batch_shape), self.nvar, self.order)
            base = self
            while p:
                if p & 1:
                    out = out * base
                p >>= 1
                if p:
                    base = base * base
            return out
        if isinstance(p, (int, np.integer)):
            return (self ** (-p)).reciprocal()
        c0 = self.value
        derivs = [c0 ** p]
        for k in range(1, self.order + 1):
            derivs.append(derivs[-1] * (p - k + 1) / c0)
        return self.compose(derivs)

    # elementary functions ---------------------------------------------------
    def compose(self, derivs) -> "Jet":
        """Apply f given ``derivs[k] = f^(k)(base value)``."""
        nil = self - self.value
        out = Jet.constant(derivs[0], self.nvar, self.order)
        term = Jet.constant(np.ones(self.batch_shape), self.nvar, self.order)
        for k in range(1, self.order + 1):
            term = term * nil
            out = out + term * (np.asarray(derivs[k]) / math.factorial(k))
        return out

    def reciprocal(self) -> "Jet":
        c0 = self.value
        derivs = [1.0 / c0]
        for k in range(1, self.order + 1):
            derivs.append(-k * derivs[-1] / c0)
        return self.compose(derivs)

    def exp(self) -> "Jet":
        e = np.exp(self.value)
        return self.compose([e] * (self.order + 1))

    def log(self) -> "Jet":
        c0 = self.value
        derivs = [np.log(c0)]
        for k in range(1, self.order + 1):
            derivs.append((-1) ** (k - 1) * math.factorial(k - 1) / c0 ** k)
        return self.compose(derivs)

    def diff(self, index: int) -> "Jet":
        """Partial derivative in variable ``index``; order drops by one."""
        n = self.order
        c = np.moveaxis(self.coeffs, self.coeffs.ndim - self.nvar + index, -1)
        c = c[..., 1:] * np.arange(1, n + 1)
        c = np.moveaxis(c, -1, self.coeffs.ndim - self.nvar + index)
        sl = (Ellipsis,) + (slice(0, n),) * self.nvar
        c = c[sl] * _mask(self.nvar, n - 1)
        return Jet(c, self.nvar, n - 1)

    def conj(self) -> "Jet":
        return self._like(np.conj(self.coeffs))

    def swap(self, i: int = 0, j: int = 1) -> "Jet":
        ax = self.coeffs.ndim - self.nvar
        return self._like(np.swapaxes(self.coeffs, ax + i, ax + j))


def _mul(a, b, nvar, order):
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape, dtype=np.result_type(a, b))
    if nvar == 1:
        for i in range(order + 1):
            out[..., i:] += a[..., i:i + 1] * b[..., : order + 1 - i]
        return out
    for idx in _indices(nvar, order):
        lhs = a[(Ellipsis,) + idx]
        lhs = lhs.reshape(lhs.shape + (1,) * nvar)
        dst = (Ellipsis,) + tuple(slice(i, None) for i in idx)
        src = (Ellipsis,) + tuple(slice(0, order + 1 - i) for i in idx)
        out[dst] += lhs * b[src]
    return out * _mask(nvar, order)


def exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def log(x):
    return x.log() if isinstance(x, Jet) else np.log(x)


def antisymmetric_quotient(jet: Jet, tol: float = 1e-9) -> Jet:
    """Exact quotient ``g(u1, u2) / (u1 - u2)`` of an antisymmetric 2-variable jet.

    The result has order ``jet.order - 1`` and is symmetric.  Raises
    ``ValueError`` when ``g`` has a symmetric component above ``tol``.
    """
    if jet.nvar != 2:
        raise ValueError("antisymmetric quotient needs a 2-variable jet")
    c = jet.coeffs
    sym = c + np.swapaxes(c, -1, -2)
    scale = max(np.max(np.abs(c)), 1.0)
    if np.max(np.abs(sym)) > tol * scale:
        raise ValueError("jet is not antisymmetric in its two variables")
    n = jet.order
    q = np.zeros(jet.batch_shape + (n, n), dtype=c.dtype)
    for d in range(1, n + 1):
        # homogeneous degree d: g = sum_a c[a, d-a] u1^a u2^(d-a)
        acc = 0.0
        for a in range(d):
            acc = acc - c[..., a, d - a]
            q[..., a, d - 1 - a] = acc
    return Jet(q, 2, n - 1)


def taylor_coefficients(fn: Callable[[np.ndarray], np.ndarray], radius: float,
                        count: int, points: int = 64) -> np.ndarray:
    """Taylor coefficients of an entire function from samples on a circle.

    ``fn`` maps complex points (last axis) to values with the same trailing
    axis.  Returns coefficients ``0..count-1`` along the last axis.
    """
    theta = 2 * np.pi * np.arange(points) / points
    z = radius * np.exp(1j * theta)
    vals = fn(z)
    coeffs = np.fft.fft(vals, axis=-1) / points
    return coeffs[..., :count] / radius ** np.arange(count)
