"""Characteristic functions of invariant ensembles as functions of power sums.

A representation ``Phi0`` is stored as a function of ``p_m = Str sigma^m``.
On a diagonal super-point the power sums are

    p_m = gamma2 * sum_j r1_j**m - gamma1 * sum_j (e^{i psi} r2_j)**m

so that for beta=1 (one bosonic pair, one fermionic eigenvalue) ``p_1`` is
``r11 + r21 - 2 e^{i psi} r2``; for beta=4 the bosonic eigenvalue is Kramers
doubled.  Restricted to ordinary matrices ``p_m`` is the trace of the
``gamma2*N`` dimensional complex representation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .jets import Jet, exp as jexp


# ---------------------------------------------------------------------------
# ensembles

@dataclass(frozen=True)
class Component:
    w: float
    variance: float
    shift: float = 0.0


@dataclass(frozen=True)
class EnsembleSpec:
    """Gaussian, shifted Gaussian or Gaussian mixture ensemble on Herm(beta, N).

    A component with variance ``v2`` has density ``exp(-tr (H - c)^2 / (2 gamma2 v2))``
    in the ``gamma2 N`` dimensional representation, so diagonal entries have
    variance ``v2``.
    """

    beta: int
    N: int
    components: tuple

    def __post_init__(self):
        if self.beta not in (1, 2, 4):
            raise ValueError("beta must be 1, 2 or 4")
        if self.N < 1:
            raise ValueError("N must be positive")
        if not self.components:
            raise ValueError("an ensemble needs at least one component")
        if any(c.w < 0 for c in self.components):
            raise ValueError("mixture weights must be nonnegative")
        if any(c.variance <= 0 for c in self.components):
            raise ValueError("variances must be positive")
        if not math.isclose(sum(c.w for c in self.components), 1.0, rel_tol=1e-9):
            raise ValueError("mixture weights must sum to 1")

    @property
    def kind(self) -> str:
        if len(self.components) > 1:
            return "gaussian_mixture"
        return "shifted_gaussian" if self.components[0].shift else "gaussian"

    @property
    def is_even(self) -> bool:
        return all(c.shift == 0 for c in self.components)

    @classmethod
    def gaussian(cls, beta: int, N: int, variance: float = 1.0, shift: float = 0.0) -> "EnsembleSpec":
        return cls(beta, N, (Component(1.0, variance, shift),))

    @classmethod
    def mixture(cls, beta: int, N: int, components: Sequence) -> "EnsembleSpec":
        comps = tuple(c if isinstance(c, Component) else Component(*c) for c in components)
        return cls(beta, N, comps)

    @classmethod
    def from_dict(cls, d: dict, beta: int, N: int) -> "EnsembleSpec":
        kind = d.get("type", "gaussian")
        if kind in ("gaussian", "shifted_gaussian"):
            return cls.gaussian(beta, N, float(d.get("variance", 1.0)), float(d.get("shift", 0.0)))
        if kind == "mixture":
            comps = [Component(float(c["w"]), float(c.get("variance", 1.0)), float(c.get("shift", 0.0)))
                     for c in d["components"]]
            return cls.mixture(beta, N, comps)
        raise ValueError(f"unsupported ensemble type {kind!r}")

    def to_dict(self) -> dict:
        if len(self.components) == 1:
            c = self.components[0]
            return {"type": "gaussian", "variance": c.variance, "shift": c.shift}
        return {"type": "mixture",
                "components": [{"w": c.w, "variance": c.variance, "shift": c.shift} for c in self.components]}

    @classmethod
    def from_json(cls, text: str, beta: int, N: int) -> "EnsembleSpec":
        return cls.from_dict(json.loads(text), beta, N)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------
# representations

@dataclass
class CharFunRepr:
    """``Phi0`` as a function of the power sums ``(p_1, ..., p_M)``."""

    evaluator: Callable[[Sequence], object]
    max_power: int
    label: str
    beta: int
    factor: Callable | None = None  # scalar Phi_hat for factorizing forms
    meta: dict = field(default_factory=dict)

    def __call__(self, powers: Sequence):
        return self.evaluator(powers)

    @property
    def factorizes(self) -> bool:
        return self.factor is not None

    def on_matrix(self, K: np.ndarray) -> complex:
        """Value at an ordinary matrix (trace in the complex representation)."""
        ev = np.linalg.eigvalsh(K)
        return complex(self([np.sum(ev ** m) for m in range(1, self.max_power + 1)]))


def gamma_pair(beta: int) -> tuple[int, int]:
    g2 = 2 if beta == 4 else 1
    return 2 * g2 // beta, g2


def gaussian_coefficient(beta: int, v2: float) -> float:
    """``a`` in ``exp(i c p1 - a p2)``: ``gamma2 * v2 / 2``."""
    return gamma_pair(beta)[1] * v2 / 2


def _gauss_eval(a: float, c: float):
    def ev(p):
        return jexp(1j * c * p[0] - a * p[1])
    return ev


def _gauss_factor(a: float, c: float):
    def fac(z):
        return jexp(1j * c * z - a * z * z)
    return fac


def gaussian_charfun(v2: float, c: float = 0.0, p=None, beta: int | None = None) -> CharFunRepr:
    """``Phi0(p) = exp(i c p_1 - a p_2)``."""
    if v2 <= 0:
        raise ValueError("variance must be positive")
    beta = beta if beta is not None else p.beta
    a = gaussian_coefficient(beta, v2)
    return CharFunRepr(_gauss_eval(a, c), 2, f"gaussian(v2={v2},c={c})", beta,
                       factor=_gauss_factor(a, c), meta={"a": a, "c": c, "v2": v2})


def mixture_charfun(components: Sequence, p=None, beta: int | None = None) -> CharFunRepr:
    """Weighted sum of Gaussian representations; not factorizing for distinct components."""
    comps = [c if isinstance(c, Component) else Component(*c) for c in components]
    if not comps:
        raise ValueError("empty mixture")
    if any(c.w < 0 for c in comps):
        raise ValueError("negative mixture weight")
    if not math.isclose(sum(c.w for c in comps), 1.0, rel_tol=1e-9):
        raise ValueError("mixture weights must sum to 1")
    beta = beta if beta is not None else p.beta
    if len(comps) == 1:
        return gaussian_charfun(comps[0].variance, comps[0].shift, beta=beta)
    parts = [(c.w, _gauss_eval(gaussian_coefficient(beta, c.variance), c.shift)) for c in comps]

    def ev(pw):
        total = 0
        for w, f in parts:
            total = total + w * f(pw)
        return total
    return CharFunRepr(ev, 2, "mixture(" + ";".join(f"{c.w},{c.variance},{c.shift}" for c in comps) + ")",
                       beta, meta={"components": comps})


def charfun_for(ens: EnsembleSpec) -> CharFunRepr:
    return mixture_charfun(ens.components, beta=ens.beta)


def newton_elementary(powers: Sequence, j: int):
    """Elementary symmetric polynomial ``e_j`` from power sums by Newton's identities."""
    e = [1]
    for n in range(1, j + 1):
        acc = 0
        for i in range(1, n + 1):
            term = e[n - i] * powers[i - 1]
            acc = acc + term if i % 2 == 1 else acc - term
        e.append(acc * (1.0 / n))
    return e[j]


def cayley_hamilton_variant(f0: CharFunRepr, N: int, lam: float = 0.3) -> CharFunRepr:
    """``f0 * exp(lam * e_{gamma2 N + 1}(p))``.

    ``e_{gamma2 N + 1}`` vanishes on every ordinary matrix of Herm(beta, N) but
    not on supermatrices, so this is a different extension of the same
    characteristic function.
    """
    _, g2 = gamma_pair(f0.beta)
    order = g2 * N + 1

    def wrapped(p):
        if len(p) < order:
            raise ValueError(f"need {order} power sums")
        return f0(p[: f0.max_power]) * jexp(lam * newton_elementary(p, order))
    return CharFunRepr(wrapped, max(order, f0.max_power), f"{f0.label}*exp({lam}*e_{order})", f0.beta,
                       meta={"base": f0.label, "lam": lam})


# ---------------------------------------------------------------------------
# super-points and jets

@dataclass(frozen=True)
class DiagSuperPoint:
    r1: tuple
    r2: tuple
    psi: float = math.pi / 2
    eps: float = 0.0


def power_sums(beta: int, r1, u, count: int) -> list:
    """Power sums with fermionic entries already rotated, ``u = e^{i psi} r2``."""
    g1, g2 = gamma_pair(beta)
    out = []
    for m in range(1, count + 1):
        s = 0
        for x in r1:
            s = s + g2 * x ** m
        for y in u:
            s = s - g1 * y ** m
        out.append(s)
    return out


def jet_evaluate(f: CharFunRepr, pt: DiagSuperPoint, order: int, beta: int | None = None) -> Jet:
    """Taylor jet of ``r2 -> Phi0(r1, r2)`` at the given ``r2`` up to total ``order``."""
    beta = beta if beta is not None else f.beta
    k2 = len(pt.r2)
    ph = np.exp(1j * pt.psi)
    # the jet variable is the r2 offset d, and u = e^{i psi} (r2 + d)
    u = [Jet.constant(complex(ph * r), k2, order) + ph * (Jet.variable(0.0, i, k2, order))
         for i, r in enumerate(pt.r2)]
    try:
        val = f(power_sums(beta, [complex(x) for x in pt.r1], u, f.max_power))
    except (FloatingPointError, ZeroDivisionError) as exc:
        raise ArithmeticError(f"representation not smooth at {pt}") from exc
    if not isinstance(val, Jet):
        val = Jet.constant(val, k2, order)
    if not np.all(np.isfinite(val.coeffs)):
        raise ArithmeticError(f"representation not smooth at {pt}")
    return val


def admissible_psi(f: CharFunRepr, psi: float, probe: Sequence[float] = (1.0, 2.0, 4.0, 8.0)) -> bool:
    """Heuristic: ``|Phi0|`` must not grow along the rotated fermionic axis."""
    g1, _ = gamma_pair(f.beta)
    ph = np.exp(1j * psi)
    nb = 2 if f.beta == 1 else 1
    nf = 2 if f.beta == 4 else 1
    vals = []
    for t in probe:
        pw = power_sums(f.beta, [0.0] * nb, [ph * t] * nf, f.max_power)
        vals.append(abs(complex(f(pw))))
    return vals[-1] <= max(vals[0], 1.0) * (1 + 1e-9)


# ---------------------------------------------------------------------------
# oracles on ordinary matrices

def numeric_gaussian_fourier(beta: int, N: int, v2: float, K: np.ndarray, c: float = 0.0) -> complex:
    """Fourier transform of the Gaussian density by 1-D quadrature per real coordinate.

    ``Phi(K) = E exp(i tr H K)`` with ``H`` from :class:`EnsembleSpec` conventions.
    Each independent real coordinate ``h`` of ``H`` enters ``tr HK`` linearly and
    carries its own Gaussian weight, so the transform is a product of 1-D
    integrals, each done numerically.
    """
    coords = _real_coordinates(beta, N)
    g2 = 2 if beta == 4 else 1
    total = 1.0 + 0.0j
    for basis, norm in coords:
        # tr(H^2) contribution of this coordinate is norm * h^2
        freq = float(np.real(np.trace(basis @ K)))
        var = g2 * v2 / norm
        def integrand(h, part):
            w = np.exp(-h * h / (2 * var)) / math.sqrt(2 * math.pi * var)
            ang = freq * h
            return w * (math.cos(ang) if part == 0 else math.sin(ang))
        re = integrate.quad(integrand, -np.inf, np.inf, args=(0,), epsabs=1e-13)[0]
        im = integrate.quad(integrand, -np.inf, np.inf, args=(1,), epsabs=1e-13)[0]
        total *= complex(re, im)
    return total * np.exp(1j * c * np.real(np.trace(K)))


def _real_coordinates(beta: int, N: int):
    """Orthogonal real basis of Herm(beta, N) in the complex representation."""
    out = []
    if beta in (1, 2):
        for i in range(N):
            E = np.zeros((N, N), complex)
            E[i, i] = 1
            out.append((E, 1.0))
        for i in range(N):
            for j in range(i + 1, N):
                E = np.zeros((N, N), complex)
                E[i, j] = E[j, i] = 1
                out.append((E, 2.0))
                if beta == 2:
                    F = np.zeros((N, N), complex)
                    F[i, j], F[j, i] = 1j, -1j
                    out.append((F, 2.0))
        return out
    # quaternion self-dual in the 2N complex representation [[A, B], [-B*, A*]]
    def embed(A, B):
        return np.block([[A, B], [-B.conj(), A.conj()]])
    Z = np.zeros((N, N), complex)
    for i in range(N):
        A = Z.copy(); A[i, i] = 1
        out.append((embed(A, Z), 2.0))
    for i in range(N):
        for j in range(i + 1, N):
            for unit in (1, 1j):
                A = Z.copy(); A[i, j] = unit; A[j, i] = np.conj(unit)
                out.append((embed(A, Z), 4.0))
            for unit in (1, 1j):
                B = Z.copy(); B[i, j] = unit; B[j, i] = -unit
                out.append((embed(Z, B), 4.0))
    return out


def mc_charfun_estimate(ens: EnsembleSpec, K: np.ndarray, samples: int, seed: int = 0) -> tuple[complex, float]:
    """Monte Carlo ``E exp(i tr H K)`` with its standard error."""
    if samples < 100:
        raise ValueError("need at least 100 samples")
    from .ensembles import sample_matrices
    H = sample_matrices(ens, samples, seed)
    vals = np.exp(1j * np.einsum("sij,ji->s", H, K))
    est = complex(vals.mean())
    err = float(np.sqrt((np.var(vals.real) + np.var(vals.imag)) / samples))
    return est, err
