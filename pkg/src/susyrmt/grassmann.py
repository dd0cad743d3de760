"""Finite Grassmann algebras, supermatrices and the ordinary/superspace duality.

Elements are sparse maps ``bitmask -> coefficient``.  Bit ``i`` set in a mask
means generator ``g_i`` is a factor; monomials are stored in increasing
generator order.  Coefficients are either exact Gaussian rationals
(:class:`QQi`) or Python complex numbers.

Complex conjugation acts on the algebra as the order-preserving "star"
of the second kind: generators come in pairs ``(g, g*)`` registered through
:class:`GeneratorPairs`, with ``g -> g*`` and ``g* -> -g``.  With this choice
``v^dagger v = Str v v^dagger`` holds for a single supervector, and that is the
convention used throughout.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

MAX_EXACT_GENERATORS = 16


class GrassmannError(ValueError):
    """Raised for dimension mismatches and singular operations."""


# ---------------------------------------------------------------------------
# exact complex rationals

class QQi:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "QQi":
        if isinstance(x, QQi):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x, 0)

    def __add__(self, o):
        o = QQi.coerce(o)
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = QQi.coerce(o)
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return QQi.coerce(o) - self

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __mul__(self, o):
        o = QQi.coerce(o)
        return QQi(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = QQi.coerce(o)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        return QQi((self.re * o.re + self.im * o.im) / den,
                   (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, o):
        return QQi.coerce(o) / self

    def conjugate(self):
        return QQi(self.re, -self.im)

    def __eq__(self, o):
        try:
            o = QQi.coerce(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def _coef(x, exact: bool):
    return QQi.coerce(x) if exact else complex(x)


# ---------------------------------------------------------------------------
# signs

_SIGN_CACHE: dict = {}


def _sign(a: int, b: int) -> int:
    """Sign of reordering ``mono(a) * mono(b)`` into increasing order."""
    key = (a, b)
    s = _SIGN_CACHE.get(key)
    if s is None:
        swaps = 0
        bb = b
        while bb:
            low = bb & -bb
            j = low.bit_length() - 1
            swaps += (a >> (j + 1)).bit_count()
            bb ^= low
        s = -1 if swaps & 1 else 1
        if len(_SIGN_CACHE) < 4_000_000:
            _SIGN_CACHE[key] = s
    return s


# ---------------------------------------------------------------------------

class GrassmannElement:
    """Element of the Grassmann algebra on ``n`` generators."""

    __slots__ = ("n", "terms", "exact")

    def __init__(self, n: int, terms: dict | None = None, exact: bool = True):
        if exact and n > MAX_EXACT_GENERATORS:
            raise GrassmannError(f"exact mode supports at most {MAX_EXACT_GENERATORS} generators")
        self.n = n
        self.exact = exact
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # constructors
    @classmethod
    def scalar(cls, value, n: int, exact: bool = True) -> "GrassmannElement":
        return cls(n, {0: _coef(value, exact)}, exact)

    @classmethod
    def generator(cls, i: int, n: int, exact: bool = True) -> "GrassmannElement":
        if not 0 <= i < n:
            raise GrassmannError("generator index out of range")
        return cls(n, {1 << i: _coef(1, exact)}, exact)

    @classmethod
    def zero(cls, n: int, exact: bool = True) -> "GrassmannElement":
        return cls(n, {}, exact)

    # structure
    def _check(self, other: "GrassmannElement"):
        if other.n != self.n:
            raise GrassmannError("elements live on different generator spaces")

    def _lift(self, other) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            self._check(other)
            return other
        return GrassmannElement.scalar(other, self.n, self.exact)

    @property
    def body(self):
        return self.terms.get(0, _coef(0, self.exact))

    def soul(self) -> "GrassmannElement":
        return GrassmannElement(self.n, {m: c for m, c in self.terms.items() if m}, self.exact)

    def degrees(self) -> set:
        return {m.bit_count() for m in self.terms}

    def is_even(self) -> bool:
        return all(m.bit_count() % 2 == 0 for m in self.terms)

    def is_odd(self) -> bool:
        return all(m.bit_count() % 2 == 1 for m in self.terms)

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact or tol == 0.0:
            return not self.terms
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    # arithmetic
    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t[m] + c if m in t else c
        return GrassmannElement(self.n, t, self.exact)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.n, {m: -c for m, c in self.terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, GrassmannElement):
            c = _coef(other, self.exact)
            return GrassmannElement(self.n, {m: v * c for m, v in self.terms.items()}, self.exact)
        return multiply(self, other)

    def __rmul__(self, other):
        # scalars commute with everything
        return self * other

    def __eq__(self, other):
        if not isinstance(other, GrassmannElement):
            other = GrassmannElement.scalar(other, self.n, self.exact)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def inverse(self) -> "GrassmannElement":
        """Inverse of an element with invertible body (geometric series in the soul)."""
        b = self.body
        if not b:
            raise GrassmannError("element has zero body and is not invertible")
        binv = _coef(1, self.exact) / b
        nil = self.soul() * binv
        out = GrassmannElement.scalar(1, self.n, self.exact)
        term = GrassmannElement.scalar(1, self.n, self.exact)
        for _ in range(self.n // 2 + 1):
            term = -(term * nil)
            if term.is_zero():
                break
            out = out + term
        return out * binv

    def __truediv__(self, other):
        if isinstance(other, GrassmannElement):
            return self * other.inverse()
        return self * (_coef(1, self.exact) / _coef(other, self.exact))

    def __pow__(self, k: int):
        out = GrassmannElement.scalar(1, self.n, self.exact)
        for _ in range(k):
            out = out * self
        return out

    def to_float(self) -> "GrassmannElement":
        return GrassmannElement(self.n, {m: complex(c) for m, c in self.terms.items()}, False)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda x: (x.bit_count(), x)):
            gens = "".join(f"g{i}" for i in range(self.n) if m >> i & 1)
            parts.append(f"{self.terms[m]!r}{'*' + gens if gens else ''}")
        return " + ".join(parts)


def multiply(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    """Graded product ``a * b``."""
    if not isinstance(a, GrassmannElement) or not isinstance(b, GrassmannElement):
        raise TypeError("multiply expects two GrassmannElement operands")
    if a.n != b.n:
        raise GrassmannError("elements live on different generator spaces")
    out: dict = {}
    bt = list(b.terms.items())
    for ma, ca in a.terms.items():
        for mb, cb in bt:
            if ma & mb:
                continue
            m = ma | mb
            v = ca * cb
            if _sign(ma, mb) < 0:
                v = -v
            if m in out:
                out[m] = out[m] + v
            else:
                out[m] = v
    return GrassmannElement(a.n, out, a.exact and b.exact)


# ---------------------------------------------------------------------------
# conjugation

@dataclass(frozen=True)
class GeneratorPairs:
    """Pairing ``g_i <-> g_j*`` used by complex conjugation of the algebra."""

    n: int
    star: tuple  # star[i] = index of the partner generator
    is_starred: tuple  # True for the g* member of each pair

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "GeneratorPairs":
        star = [-1] * n
        flag = [False] * n
        for g, gs in pairs:
            star[g], star[gs] = gs, g
            flag[gs] = True
        if -1 in star:
            raise GrassmannError("every generator needs a conjugation partner")
        return cls(n, tuple(star), tuple(flag))


def conjugate(x: GrassmannElement, pairs: GeneratorPairs) -> GrassmannElement:
    """Order-preserving star: ``(ab)* = a* b*``, ``g -> g*``, ``g* -> -g``."""
    out: dict = {}
    for m, c in x.terms.items():
        gens = [i for i in range(x.n) if m >> i & 1]
        sign = -1 if sum(pairs.is_starred[i] for i in gens) % 2 else 1
        new, perm_sign = _ordered_mask([pairs.star[i] for i in gens])
        coeff = c.conjugate()
        v = coeff if sign * perm_sign > 0 else -coeff
        out[new] = out[new] + v if new in out else v
    return GrassmannElement(x.n, out, x.exact)


def _ordered_mask(indices: Sequence[int]) -> tuple[int, int]:
    """Mask and permutation sign of the product g_{i1} g_{i2} ... ."""
    mask = 0
    sign = 1
    for j in indices:
        if mask >> j & 1:
            return 0, 0
        sign *= _sign(mask, 1 << j)
        mask |= 1 << j
    return mask, sign


# ---------------------------------------------------------------------------
# supermatrices

def _parity(entry: GrassmannElement) -> int | None:
    if entry.is_zero():
        return None
    if entry.is_even():
        return 0
    if entry.is_odd():
        return 1
    return -1


@dataclass
class SuperMatrix:
    """Graded matrix; rows split ``(rb | rf)`` and columns ``(cb | cf)``.

    Entry ``(i, j)`` has parity ``row_parity(i) + col_parity(j)`` mod 2.
    """

    entries: list
    row_dims: tuple
    col_dims: tuple
    n: int = field(init=False)
    exact: bool = field(init=False)

    def __post_init__(self):
        rows = sum(self.row_dims)
        cols = sum(self.col_dims)
        if len(self.entries) != rows or any(len(r) != cols for r in self.entries):
            raise GrassmannError("entries do not match the declared block dimensions")
        sample = self.entries[0][0] if rows and cols else None
        self.n = sample.n if sample is not None else 0
        self.exact = sample.exact if sample is not None else True

    # construction
    @classmethod
    def from_blocks(cls, A, B, C, D) -> "SuperMatrix":
        top = [list(ra) + list(rb) for ra, rb in zip(A, B)] if A else [list(rb) for rb in B]
        bot = [list(rc) + list(rd) for rc, rd in zip(C, D)] if C else [list(rd) for rd in D]
        rb = len(A) if A else len(B)
        rf = len(C) if C else len(D)
        cb = len(A[0]) if A and A[0] else (len(C[0]) if C and C[0] else 0)
        cf = len(B[0]) if B and B[0] else (len(D[0]) if D and D[0] else 0)
        return cls(top + bot, (rb, rf), (cb, cf))

    @classmethod
    def identity(cls, p: int, q: int, n: int, exact: bool = True) -> "SuperMatrix":
        d = p + q
        e = [[GrassmannElement.scalar(1 if i == j else 0, n, exact) for j in range(d)] for i in range(d)]
        return cls(e, (p, q), (p, q))

    @classmethod
    def diag(cls, boson: Sequence, fermion: Sequence, n: int, exact: bool = True) -> "SuperMatrix":
        vals = list(boson) + list(fermion)
        d = len(vals)
        e = [[(v if isinstance(v, GrassmannElement) else GrassmannElement.scalar(v, n, exact))
              if i == j else GrassmannElement.zero(n, exact) for j, v in enumerate(vals)]
             for i in range(d)]
        return cls(e, (len(boson), len(fermion)), (len(boson), len(fermion)))

    @property
    def shape(self):
        return sum(self.row_dims), sum(self.col_dims)

    def row_parity(self, i):
        return 0 if i < self.row_dims[0] else 1

    def col_parity(self, j):
        return 0 if j < self.col_dims[0] else 1

    def is_square(self):
        return self.row_dims == self.col_dims

    def check_grading(self) -> bool:
        """True when every entry has the parity its block demands."""
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                par = _parity(e)
                if par is None:
                    continue
                if par != (self.row_parity(i) + self.col_parity(j)) % 2:
                    return False
        return True

    def block(self, which: str):
        rb, cb = self.row_dims[0], self.col_dims[0]
        rows = slice(0, rb) if which[0] == "B" else slice(rb, None)
        cols = slice(0, cb) if which[1] == "B" else slice(cb, None)
        return [r[cols] for r in self.entries[rows]]

    # arithmetic
    def __matmul__(self, other: "SuperMatrix") -> "SuperMatrix":
        if self.col_dims != other.row_dims:
            raise GrassmannError("incompatible graded shapes")
        rows, inner = self.shape
        cols = other.shape[1]
        out = []
        for i in range(rows):
            row = []
            for j in range(cols):
                acc = GrassmannElement.zero(self.n, self.exact)
                for k in range(inner):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return SuperMatrix(out, self.row_dims, other.col_dims)

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def _zip(self, other, fn):
        if self.row_dims != other.row_dims or self.col_dims != other.col_dims:
            raise GrassmannError("shape mismatch")
        return SuperMatrix([[fn(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
                           self.row_dims, self.col_dims)

    def scale(self, c) -> "SuperMatrix":
        return self.map(lambda e: e * c)

    def map(self, fn) -> "SuperMatrix":
        return SuperMatrix([[fn(e) for e in r] for r in self.entries], self.row_dims, self.col_dims)

    def transpose(self) -> "SuperMatrix":
        """Plain entrywise transpose (no grading signs)."""
        rows, cols = self.shape
        return SuperMatrix([[self.entries[i][j] for i in range(rows)] for j in range(cols)],
                           self.col_dims, self.row_dims)

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def power(self, m: int) -> "SuperMatrix":
        out = self
        for _ in range(m - 1):
            out = out @ self
        return out

    def inverse(self) -> "SuperMatrix":
        """Block inverse for a square supermatrix with invertible bodies."""
        if not self.is_square():
            raise GrassmannError("inverse needs a square supermatrix")
        p, q = self.row_dims
        A, B, C, D = (self.block(w) for w in ("BB", "BF", "FB", "FF"))
        n, ex = self.n, self.exact
        Dinv = _mat_inverse(D, n, ex) if q else []
        S = _mat_sub(A, _mat_mul(_mat_mul(B, Dinv, n, ex), C, n, ex)) if p else []
        Sinv = _mat_inverse(S, n, ex) if p else []
        TL = Sinv
        TR = _mat_neg(_mat_mul(_mat_mul(Sinv, B, n, ex), Dinv, n, ex)) if p and q else [[] for _ in range(p)]
        BL = _mat_neg(_mat_mul(_mat_mul(Dinv, C, n, ex), Sinv, n, ex)) if p and q else [[] for _ in range(q)]
        BR = _mat_add(Dinv, _mat_mul(_mat_mul(_mat_mul(_mat_mul(Dinv, C, n, ex), Sinv, n, ex), B, n, ex), Dinv, n, ex)) \
            if p and q else Dinv
        rows = [list(a) + list(b) for a, b in zip(TL, TR)] + [list(a) + list(b) for a, b in zip(BL, BR)]
        return SuperMatrix(rows, (p, q), (p, q))


def _mat_mul(X, Y, n, exact):
    if not X or not Y:
        return [[GrassmannElement.zero(n, exact) for _ in range(len(Y[0]) if Y else 0)] for _ in X]
    return [[sum((X[i][k] * Y[k][j] for k in range(len(Y))), GrassmannElement.zero(n, exact))
             for j in range(len(Y[0]))] for i in range(len(X))]


def _mat_add(X, Y):
    return [[a + b for a, b in zip(r, s)] for r, s in zip(X, Y)]


def _mat_sub(X, Y):
    return [[a - b for a, b in zip(r, s)] for r, s in zip(X, Y)]


def _mat_neg(X):
    return [[-a for a in r] for r in X]


def _det_even(M, n, exact) -> GrassmannElement:
    """Leibniz determinant of a matrix with mutually commuting (even) entries."""
    d = len(M)
    if d == 0:
        return GrassmannElement.scalar(1, n, exact)
    total = GrassmannElement.zero(n, exact)
    for perm in itertools.permutations(range(d)):
        inv = sum(1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j])
        term = GrassmannElement.scalar(-1 if inv % 2 else 1, n, exact)
        for i, j in enumerate(perm):
            term = term * M[i][j]
        total = total + term
    return total


def _mat_inverse(M, n, exact):
    d = len(M)
    det = _det_even(M, n, exact)
    if not det.body:
        raise GrassmannError("block has a singular body")
    dinv = det.inverse()
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            minor = [[M[a][b] for b in range(d) if b != i] for a in range(d) if a != j]
            cof = _det_even(minor, n, exact)
            row.append(cof * dinv * (1 if (i + j) % 2 == 0 else -1))
        out.append(row)
    return out


def supertrace(M: SuperMatrix) -> GrassmannElement:
    """``tr(BB) - tr(FF)``."""
    if not M.is_square():
        raise GrassmannError("supertrace needs a square supermatrix")
    p = M.row_dims[0]
    total = GrassmannElement.zero(M.n, M.exact)
    for i in range(sum(M.row_dims)):
        total = total + M.entries[i][i] if i < p else total - M.entries[i][i]
    return total


def superdeterminant(M: SuperMatrix) -> GrassmannElement:
    """``det(A - B D^-1 C) / det D``."""
    if not M.is_square():
        raise GrassmannError("superdeterminant needs a square supermatrix")
    p, q = M.row_dims
    n, ex = M.n, M.exact
    A, B, C, D = (M.block(w) for w in ("BB", "BF", "FB", "FF"))
    if q:
        detD = _det_even(D, n, ex)
        if not detD.body:
            raise GrassmannError("fermion-fermion block has a singular body")
        Dinv = _mat_inverse(D, n, ex)
    else:
        detD = GrassmannElement.scalar(1, n, ex)
        Dinv = []
    S = _mat_sub(A, _mat_mul(_mat_mul(B, Dinv, n, ex), C, n, ex)) if (p and q) else A
    return _det_even(S, n, ex) * detD.inverse()


def trace(M: SuperMatrix) -> GrassmannElement:
    total = GrassmannElement.zero(M.n, M.exact)
    for i in range(min(M.shape)):
        total = total + M.entries[i][i]
    return total


# ---------------------------------------------------------------------------
# Dyson parameters

@dataclass(frozen=True)
class DysonParams:
    beta: int
    N: int
    k: int = 1

    def __post_init__(self):
        if self.beta not in (1, 2, 4):
            raise ValueError("beta must be 1, 2 or 4")
        if self.k < 1 or self.N < 1:
            raise ValueError("N and k must be positive")
        if self.N < self.k1:
            raise ValueError(f"need N >= gamma1*k = {self.k1}")

    @property
    def gamma2(self) -> int:
        return 2 if self.beta == 4 else 1

    @property
    def gamma1(self) -> int:
        return 2 * self.gamma2 // self.beta

    @property
    def gamma_tilde(self) -> int:
        return self.gamma1 * self.gamma2

    @property
    def k1(self) -> int:
        return self.gamma1 * self.k

    @property
    def k2(self) -> int:
        return self.gamma2 * self.k

    @property
    def k_tilde(self) -> int:
        return self.gamma_tilde * self.k

    @property
    def kappa(self) -> float:
        return self.N / self.gamma1 + (self.gamma2 - self.gamma1) / 2


# ---------------------------------------------------------------------------
# dyadic construction

@dataclass
class SuperVectors:
    """Commuting vectors ``z_p`` and Grassmann vectors ``zeta_p, zeta*_p``.

    ``z`` is a list of ``k`` lists of length ``gamma2*N``; ``zeta`` and
    ``zeta_star`` hold elements of the same shape.
    """

    params: DysonParams
    z: list
    zeta: list
    zeta_star: list
    pairs: GeneratorPairs
    n: int
    exact: bool = True


def symbolic_vectors(p: DysonParams, seed: int = 0, exact: bool = True,
                     zero: bool = False) -> SuperVectors:
    """Random Gaussian-integer ``z`` and one fresh generator per Grassmann component."""
    dim = p.gamma2 * p.N
    n = 2 * dim * p.k
    rng = random.Random(seed)
    zvals = [[0 if zero else complex(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(dim)]
             for _ in range(p.k)]
    zeta, zeta_star, pairs = [], [], []
    idx = 0
    for _ in range(p.k):
        a, b = [], []
        for _ in range(dim):
            a.append(idx)
            b.append(idx + 1)
            pairs.append((idx, idx + 1))
            idx += 2
        zeta.append(a)
        zeta_star.append(b)
    def gen(i):
        return GrassmannElement.zero(n, exact) if zero else GrassmannElement.generator(i, n, exact)
    return SuperVectors(p, zvals, [[gen(i) for i in a] for a in zeta],
                        [[gen(i) for i in b] for b in zeta_star],
                        GeneratorPairs.from_pairs(n, pairs), n, exact)


def _Y(p: DysonParams):
    """The matrix Y of the dyadic construction as nested lists of ints."""
    N = p.N
    if p.beta == 1:
        return [[1 if i == j else 0 for j in range(N)] for i in range(N)]
    if p.beta == 2:
        return [[0] * N for _ in range(N)]
    # Y_s^T (x) 1_N with Y_s = [[0, 1], [-1, 0]]
    Y = [[0] * (2 * N) for _ in range(2 * N)]
    for i in range(N):
        Y[i][N + i] = -1
        Y[N + i][i] = 1
    return Y


def _apply(Y, vec, n, exact):
    out = []
    for row in Y:
        acc = GrassmannElement.zero(n, exact)
        for c, v in zip(row, vec):
            if c:
                acc = acc + (v * c if isinstance(v, GrassmannElement) else GrassmannElement.scalar(v * c, n, exact))
        out.append(acc)
    return out


def _lift_vec(vec, n, exact):
    return [v if isinstance(v, GrassmannElement) else GrassmannElement.scalar(v, n, exact) for v in vec]


def _vdagger_columns(v: SuperVectors):
    p = v.params
    Y = _Y(p)
    n, ex = v.n, v.exact
    cols_b = [_lift_vec(z, n, ex) for z in v.z]
    cols_b += [_apply(Y, [complex(c).conjugate() for c in z], n, ex) for z in v.z]
    cols_f = [list(z) for z in v.zeta]
    cols_f += [_apply(Y, zs, n, ex) for zs in v.zeta_star]
    return cols_b, cols_f


def _v_rows(v: SuperVectors):
    p = v.params
    Y = _Y(p)
    n, ex = v.n, v.exact
    rows_b = [_lift_vec([complex(c).conjugate() for c in z], n, ex) for z in v.z]
    rows_b += [_apply(Y, z, n, ex) for z in v.z]
    rows_f = [[-e for e in zs] for zs in v.zeta_star]
    rows_f += [_apply(Y, z, n, ex) for z in v.zeta]
    return rows_b, rows_f


def build_vdagger(v: SuperVectors) -> SuperMatrix:
    """``V^dagger``: ``gamma2 N`` commuting rows, ``2k | 2k`` columns."""
    cols_b, cols_f = _vdagger_columns(v)
    cols = cols_b + cols_f
    dim = len(cols[0])
    return SuperMatrix([[c[i] for c in cols] for i in range(dim)], (dim, 0), (len(cols_b), len(cols_f)))


def build_v(v: SuperVectors) -> SuperMatrix:
    """``V``: ``2k | 2k`` rows, ``gamma2 N`` commuting columns."""
    rows_b, rows_f = _v_rows(v)
    dim = len(rows_b[0])
    return SuperMatrix(rows_b + rows_f, (len(rows_b), len(rows_f)), (dim, 0))


def _check_vectors(v: SuperVectors):
    p = v.params
    dim = p.gamma2 * p.N
    if len(v.z) != p.k or len(v.zeta) != p.k or len(v.zeta_star) != p.k:
        raise GrassmannError(f"expected {p.k} vectors of each kind")
    for group in (v.z, v.zeta, v.zeta_star):
        if any(len(vec) != dim for vec in group):
            raise GrassmannError(f"vectors must have dimension gamma2*N = {dim}")


def build_dyadic_K(v: SuperVectors, p: DysonParams | None = None) -> SuperMatrix:
    """``K = V^dagger V / gamma_tilde`` as an ordinary matrix with even entries."""
    if p is not None and p != v.params:
        raise GrassmannError("vectors were built for different parameters")
    _check_vectors(v)
    K = build_vdagger(v) @ build_v(v)
    return K.scale(Fraction(1, v.params.gamma_tilde) if v.exact else 1 / v.params.gamma_tilde)


def build_dual_B(v: SuperVectors, p: DysonParams | None = None) -> SuperMatrix:
    """``B = V V^dagger / gamma_tilde``; for beta=2 the zero blocks are projected out."""
    if p is not None and p != v.params:
        raise GrassmannError("vectors were built for different parameters")
    _check_vectors(v)
    B = (build_v(v) @ build_vdagger(v))
    B = B.scale(Fraction(1, v.params.gamma_tilde) if v.exact else 1 / v.params.gamma_tilde)
    if v.params.beta == 2:
        k = v.params.k
        keep = list(range(k)) + list(range(2 * k, 3 * k))
        B = SuperMatrix([[B.entries[i][j] for j in keep] for i in keep], (k, k), (k, k))
    return B


def project_K(K: SuperMatrix, beta: int) -> SuperMatrix:
    """The symmetry image of ``K``: ``K^T``, ``K`` or ``(Y_s x 1) K^T (Y_s^T x 1)``."""
    if beta == 2:
        return K
    KT = K.transpose()
    if beta == 1:
        return KT
    d = K.shape[0]
    N = d // 2
    out = [[None] * d for _ in range(d)]
    # (Y_s x 1) maps e_{N+i} -> e_i and e_i -> -e_{N+i}
    def ys(i):
        return (i + N, 1) if i < N else (i - N, -1)
    for i in range(d):
        si, ci = ys(i)
        for j in range(d):
            sj, cj = ys(j)
            out[i][j] = KT.entries[si][sj] * (ci * cj)
    return SuperMatrix(out, K.row_dims, K.col_dims)


def _ytilde(beta: int, k: int):
    """Odd symmetry matrix acting on the ``4k`` rows of ``B``."""
    d = 4 * k
    Y = [[0] * d for _ in range(d)]
    I = range(k)
    if beta == 1:
        for i in I:
            Y[i][k + i] = 1
            Y[k + i][i] = 1
            Y[2 * k + i][3 * k + i] = 1   # Y_s (x) 1_k on the fermion block
            Y[3 * k + i][2 * k + i] = -1
    elif beta == 4:
        for i in I:
            Y[i][k + i] = 1
            Y[k + i][i] = -1
            Y[2 * k + i][3 * k + i] = 1
            Y[3 * k + i][2 * k + i] = 1
    else:
        raise ValueError("odd symmetry applies to beta 1 and 4")
    return Y


def _const_sandwich(Y, M: SuperMatrix) -> SuperMatrix:
    """``Y M Y^T`` for an integer matrix ``Y``."""
    d = M.shape[0]
    n, ex = M.n, M.exact
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = GrassmannElement.zero(n, ex)
            for a in range(d):
                if not Y[i][a]:
                    continue
                for b in range(d):
                    if Y[j][b]:
                        acc = acc + M.entries[a][b] * (Y[i][a] * Y[j][b])
            row.append(acc)
        out.append(row)
    return SuperMatrix(out, M.row_dims, M.col_dims)


def conj_matrix(M: SuperMatrix, pairs: GeneratorPairs) -> SuperMatrix:
    return M.map(lambda e: conjugate(e, pairs))


def supertranspose(M: SuperMatrix) -> SuperMatrix:
    """``[[A, B], [C, D]] -> [[A^T, C^T], [-B^T, D^T]]``."""
    A, B, C, D = (M.block(w) for w in ("BB", "BF", "FB", "FF"))
    T = lambda X: [list(r) for r in zip(*X)] if X and X[0] else []
    p, q = M.col_dims
    r, s = M.row_dims
    def tr(X, rows, cols):
        t = T(X)
        return t if t else [[] for _ in range(rows)] if rows else []
    TA, TC = tr(A, p, r), tr(C, p, s)
    TB = [[-e for e in row] for row in tr(B, q, r)]
    TD = tr(D, q, s)
    top = [list(a) + list(c) for a, c in zip(TA, TC)] if p else []
    bot = [list(b) + list(d) for b, d in zip(TB, TD)] if q else []
    return SuperMatrix(top + bot, M.col_dims, M.row_dims)


def superadjoint(M: SuperMatrix, pairs: GeneratorPairs) -> SuperMatrix:
    return conj_matrix(supertranspose(M), pairs)


def dual_B_symmetry_residual(v: SuperVectors) -> SuperMatrix:
    """``B^dagger - B`` for beta=2, ``B* - Ytilde B Ytilde^T`` otherwise."""
    B = build_dual_B(v)
    if v.params.beta == 2:
        return superadjoint(B, v.pairs) - B
    return conj_matrix(B, v.pairs) - _const_sandwich(_ytilde(v.params.beta, v.params.k), B)


def dyadic_K_symmetry_residual(v: SuperVectors) -> SuperMatrix:
    K = build_dyadic_K(v)
    return K - project_K(K, v.params.beta)


def duality_residual(v: SuperVectors, p: DysonParams | None = None, m: int = 1) -> GrassmannElement:
    """``tr (V^dagger V)^m - Str (V V^dagger)^m``; identically zero."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if p is not None and p != v.params:
        raise GrassmannError("vectors were built for different parameters")
    _check_vectors(v)
    Vd, V = build_vdagger(v), build_v(v)
    lhs = _trace_power(Vd @ V, m)
    rhs_mat = V @ Vd
    rhs = _trace_power(rhs_mat, m, graded=True)
    return lhs - rhs


def _trace_power(M: SuperMatrix, m: int, graded: bool = False) -> GrassmannElement:
    """(S)tr of ``M^m`` computing only the diagonal of the last product."""
    if m == 1:
        P, Q = M, None
    else:
        h = m // 2
        P = M.power(h)
        Q = M.power(m - h) if m - h != h else P
    d = M.shape[0]
    p = M.row_dims[0]
    total = GrassmannElement.zero(M.n, M.exact)
    for i in range(d):
        if Q is None:
            e = M.entries[i][i]
        else:
            e = GrassmannElement.zero(M.n, M.exact)
            for k in range(d):
                a, b = P.entries[i][k], Q.entries[k][i]
                if a.terms and b.terms:
                    e = e + a * b
        total = total + e if (not graded or i < p) else total - e
    return total


# ---------------------------------------------------------------------------
# random graded objects

def random_element(n: int, parity: int, rng: random.Random, exact: bool = True,
                   body: bool = True, density: float = 0.5) -> GrassmannElement:
    """Random element of fixed parity with small Gaussian-rational coefficients."""
    terms = {}
    for m in range(1 << n):
        if m.bit_count() % 2 != parity:
            continue
        if m == 0:
            if body:
                terms[0] = _coef(complex(rng.randint(1, 5) * rng.choice((-1, 1)), rng.randint(-3, 3)), exact)
            continue
        if rng.random() < density:
            c = complex(rng.randint(-4, 4), rng.randint(-4, 4))
            if exact:
                terms[m] = QQi(Fraction(int(c.real), rng.randint(1, 3)), int(c.imag))
            else:
                terms[m] = c
    return GrassmannElement(n, terms, exact)


def random_graded(row_dims, col_dims, n: int, rng: random.Random, exact: bool = True,
                  body: bool = True) -> SuperMatrix:
    rows, cols = sum(row_dims), sum(col_dims)
    e = []
    for i in range(rows):
        ri = 0 if i < row_dims[0] else 1
        e.append([random_element(n, (ri + (0 if j < col_dims[0] else 1)) % 2, rng, exact, body)
                  for j in range(cols)])
    return SuperMatrix(e, tuple(row_dims), tuple(col_dims))


def circularity_residual(V1: SuperMatrix, V2: SuperMatrix) -> GrassmannElement:
    """``Str(V1 V2) - Str(V2 V1)`` for graded rectangles of compatible shapes."""
    return supertrace(V1 @ V2) - supertrace(V2 @ V1)


# ---------------------------------------------------------------------------
# U(1/1) Cayley-Hamilton

def u11_cayley_hamilton_residual(M: SuperMatrix) -> SuperMatrix:
    """Residual of ``s^2 - (Str s^2/Str s) s - 1/4 (Str^2 s - Str^2 s^2 / Str^2 s)``."""
    if M.row_dims != (1, 1) or M.col_dims != (1, 1):
        raise GrassmannError("U(1/1) Cayley-Hamilton needs a 1|1 supermatrix")
    s1 = supertrace(M)
    if not s1.body:
        raise GrassmannError("Str M has zero body")
    M2 = M @ M
    s2 = supertrace(M2)
    inv = s1.inverse()
    c = (s1 * s1 - s2 * s2 * inv * inv) * (Fraction(1, 4) if M.exact else 0.25)
    lin = M.map(lambda e: s2 * inv * e)
    I = SuperMatrix.identity(1, 1, M.n, M.exact).map(lambda e: e * c)
    return M2 - lin - I


def random_u11(rng: random.Random, exact: bool = True) -> tuple[SuperMatrix, GeneratorPairs]:
    """Self-adjoint 1|1 supermatrix ``[[a, eta], [eta*, b]]`` with a soul on the diagonal."""
    n = 4
    pairs = GeneratorPairs.from_pairs(n, [(0, 1), (2, 3)])
    g = [GrassmannElement.generator(i, n, exact) for i in range(n)]
    def rat():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    def num(x):
        return QQi.coerce(x) if exact else complex(x)
    a = GrassmannElement.scalar(num(rat() + 3), n, exact) + g[0] * g[1] * num(complex(0, 1)) * num(rat())
    b = GrassmannElement.scalar(num(rat() - 7), n, exact)
    cre, cim = rat(), rat()
    coef = QQi(cre, cim) if exact else complex(float(cre), float(cim))
    eta = g[0] * coef + g[2]
    eta_s = conjugate(eta, pairs)
    return SuperMatrix([[a, eta], [eta_s, b]], (1, 1), (1, 1)), pairs
