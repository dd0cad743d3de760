"""Level densities, resolvents and beta=2 correlation functions from the eigenvalue integrals.

Every routine reduces to a bosonic quadrature of a fermionic Taylor
coefficient.  The fermionic eigenvalues enter only through a jet in the
offset ``d`` with ``u = e^{i psi} d``; a derivative of the delta function
in ``r2`` is the matching coefficient of that jet.

Densities carry the raw mass in ``meta["raw_mass"]``.  With
``normalize=True`` (the default) the values are rescaled by one constant
so the mass equals ``N``; the constant is kept in ``meta["normalization"]``
and can be handed to the resolvent routines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .charfun import CharFunRepr, EnsembleSpec, admissible_psi, charfun_for, power_sums
from .ensembles import DensityCurve, chi2_against, mc_density, sample, sample_matrices
from .grassmann import DysonParams
from .jets import Jet
from .superkernel import (ContractError, DivergenceError, DivergenceReport, DomainError, SingularityError,
                          sekiguchi_jet)

GL_NODES = 20


class PreconditionError(ValueError):
    pass


@dataclass
class ResolventCurve:
    grid: np.ndarray
    values: np.ndarray
    eps: float
    L: int = -1
    meta: dict = field(default_factory=dict)


@dataclass
class DiscrepancyReport:
    """Outcome of running both bosonic modes on one configuration."""

    direct: dict
    finite_part: dict
    max_discrepancy: float | None
    agree: bool
    arbiter: dict | None = None

    def to_dict(self) -> dict:
        return {"direct": self.direct, "finite_part": self.finite_part,
                "max_discrepancy": self.max_discrepancy, "agree": self.agree, "arbiter": self.arbiter}


# ---------------------------------------------------------------------------
# quadrature helpers

def _gl(q: int = GL_NODES):
    g, w = np.polynomial.legendre.leggauss(q)
    return (g + 1) / 2, w / 2


def panel_nodes(lo: float, hi: float, width: float, q: int = GL_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes on ``[lo, hi]``; zero is always a panel edge."""
    cuts = [lo, hi] if not lo < 0 < hi else [lo, 0.0, hi]
    xs, ws = [], []
    g, w = _gl(q)
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(1, math.ceil((b - a) / width))
        edges = np.linspace(a, b, n + 1)
        h = np.diff(edges)
        xs.append((edges[:-1, None] + h[:, None] * g).ravel())
        ws.append((h[:, None] * w).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _n_bosonic(beta: int) -> int:
    return 2 if beta == 1 else 1


def _n_fermionic(beta: int) -> int:
    return 2 if beta == 4 else 1


def decay_radius(f: CharFunRepr, tol: float = 1e-17, step: float = 0.25, limit: float = 200.0) -> float:
    """Smallest bosonic radius beyond which ``|Phi0|`` stays below ``tol * |Phi0(0)|``."""
    nb, nf = _n_bosonic(f.beta), _n_fermionic(f.beta)
    ref = abs(complex(f(power_sums(f.beta, [0.0] * nb, [0.0] * nf, f.max_power))))
    if ref == 0:
        raise DomainError("Phi0 vanishes at the origin")
    r = step
    while r < limit:
        probes = [[r] + [0.0] * (nb - 1), [-r] + [0.0] * (nb - 1), [r] * nb, [-r] * nb]
        if all(abs(complex(f(power_sums(f.beta, pr, [0.0] * nf, f.max_power)))) < tol * ref for pr in probes):
            return r
        r += step
    raise DomainError("Phi0 does not decay along the bosonic axis")


def _curvature(f: CharFunRepr, L: float) -> float:
    """Effective Gaussian rate ``a`` with ``|Phi0| ~ exp(-a r^2)``."""
    return 37.0 / (L * L)


def _check_psi(f: CharFunRepr, psi: float) -> None:
    if not admissible_psi(f, psi):
        raise DomainError(f"Wick angle {psi} is not admissible for {f.label}")


def _normalize(grid, values, N, f, compute, normalize, meta, h_max: float = 0.5) -> np.ndarray:
    """Mass by the trapezoid rule, extended outward until the tails are negligible.

    For smooth, rapidly decaying densities the trapezoid rule on a uniform
    grid converges spectrally.  Coarse or non-uniform grids are replaced by
    an auxiliary uniform grid of spacing 0.25 for this purpose only.
    """
    vals = values.real
    meta["imag_residual"] = float(np.max(np.abs(values.imag))) if len(values) else 0.0
    uniform = len(grid) > 2 and np.allclose(np.diff(grid), grid[1] - grid[0])
    if not normalize and not (uniform and grid[1] - grid[0] <= h_max):
        # an auxiliary grid would cost more than the curve itself
        meta.update(raw_mass=None, mass_method=None, normalization=1.0)
        return vals
    if uniform and grid[1] - grid[0] <= h_max:
        xs, ys = list(grid), list(vals)
        h = grid[1] - grid[0]
    else:
        h = 0.25
        lo = math.floor(min(grid.min(), -1.0) / h) * h
        hi = math.ceil(max(grid.max(), 1.0) / h) * h
        xs = list(np.arange(lo, hi + h / 2, h))
        ys = list(compute(np.asarray(xs)).real)
    peak = max(abs(y) for y in ys)
    if peak == 0:
        raise DomainError("density vanishes identically; cannot normalize")
    for side in (0, -1):
        steps = 0
        while abs(ys[side]) > 1e-10 * peak:
            x_new = xs[0] - h if side == 0 else xs[-1] + h
            y_new = float(compute(np.array([x_new]))[0].real)
            if side == 0:
                xs.insert(0, x_new)
                ys.insert(0, y_new)
            else:
                xs.append(x_new)
                ys.append(y_new)
            steps += 1
            if steps > 400:
                raise DomainError("density tails do not decay; cannot normalize")
    mass = float(np.trapezoid(ys, xs))
    meta["mass_method"] = f"trapezoid h={h:.4g} on [{xs[0]:.4g}, {xs[-1]:.4g}]"
    meta["raw_mass"] = mass
    if not normalize:
        meta["normalization"] = 1.0
        return vals
    const = N / mass
    meta["normalization"] = const
    return vals * const


# ---------------------------------------------------------------------------
# beta = 2

def _beta2_integral(f: CharFunRepr, N: int, x_bos: float, x_ferm: float, psi: float, eps: float,
                    lower: float, upper: float) -> complex:
    """``int dr1 e^{-i psi (N-1)} [d^{N-1}] Phi0 e^{-i r1 x_bos + i u x_ferm} e^{-eps (r1 - u)} P``.

    ``P = r1^N / (r1 - u)`` truncated below ``u^N``, which is exact at the
    extracted order and regular at ``r1 = 0``.
    """
    width = min(1.0, math.pi / (abs(x_bos) + abs(x_ferm) + 1.0))
    r, w = panel_nodes(lower, upper, width)
    n = N - 1
    ph = np.exp(1j * psi)
    d = Jet.variable(np.zeros(r.shape, complex), 0, 1, n)
    u = d * ph
    phi = f(power_sums(2, [r], [u], f.max_power))
    if not isinstance(phi, Jet):
        phi = Jet.constant(np.broadcast_to(phi, r.shape).astype(complex), 1, n)
    poly = Jet.constant(np.zeros(r.shape, complex), 1, n)
    upow = Jet.constant(np.ones(r.shape, complex), 1, n)
    for j in range(N):
        poly = poly + upow * r ** (n - j)
        upow = upow * u
    h = phi * (u * (1j * x_ferm + eps)).exp() * poly
    coef = h.coefficient(n) * np.exp(-1j * r * x_bos - eps * r)
    return complex(np.exp(-1j * psi * n) * np.sum(w * coef))


def density_beta2(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, eps: float = 0.0,
                  normalize: bool = True) -> DensityCurve:
    """Level density for beta = 2 from the fermionic (N-1)-th derivative and a bosonic line integral."""
    if p.beta != 2 or p.k != 1:
        raise DomainError("density_beta2 needs beta=2, k=1")
    _check_psi(f, psi)
    N = p.N
    L = decay_radius(f)
    grid = np.asarray(grid, dtype=float)

    def compute(xs):
        return np.array([_beta2_integral(f, N, x, x, psi, 0.0, -L, L) for x in xs]) / (2 * math.pi)

    raw = compute(grid)
    meta = {"beta": 2, "N": N, "psi": psi, "eps": eps, "mode": "direct", "charfun": f.label}
    vals = _normalize(grid, raw, N, f, compute, normalize, meta)
    return DensityCurve(grid, vals, float(N), meta)


def resolvent_beta2(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2,
                    eps: float = 0.1) -> ResolventCurve:
    """``R^(x - i eps)`` for beta = 2 (Theta(r1) half line, regulator kept)."""
    if p.beta != 2 or p.k != 1:
        raise DomainError("resolvent_beta2 needs beta=2, k=1")
    if eps <= 0:
        raise DomainError("eps must be positive")
    L = decay_radius(f)
    grid = np.asarray(grid, dtype=float)
    vals = np.array([1j * _beta2_integral(f, p.N, x, x, psi, eps, 0.0, L) for x in grid])
    return ResolventCurve(grid, vals, eps, -1, {"beta": 2, "N": p.N, "psi": psi})


def fundamental_kernel(f: CharFunRepr, N: int, x_m: float, x_n: float, psi: float = math.pi / 2) -> complex:
    """Kernel whose determinants give the beta=2 correlation functions (factorizing ``Phi0`` only)."""
    if not f.factorizes:
        raise ContractError("the determinantal kernel needs a factorizing characteristic function")
    if f.beta != 2:
        raise DomainError("the fundamental kernel is a beta=2 object")
    L = decay_radius(f)
    return _beta2_integral(f, N, x_m, x_n, psi, 0.0, -L, L) / (2 * math.pi)


def kpoint_beta2(f: CharFunRepr, N: int, points: Sequence[float], psi: float = math.pi / 2) -> float:
    """Highest-order determinant part of the k-point function, ``k <= 3``."""
    pts = [float(x) for x in points]
    k = len(pts)
    if not 1 <= k <= 3:
        raise DomainError("k must be 1, 2 or 3")
    for a in range(k):
        for b in range(a + 1, k):
            if abs(pts[a] - pts[b]) < 1e-9:
                raise SingularityError("coincident points: the determinant carries a self term there")
    K = np.array([[fundamental_kernel(f, N, xa, xb, psi) for xb in pts] for xa in pts])
    val = np.linalg.det(K)
    return float(val.real)


# ---------------------------------------------------------------------------
# beta = 1

def _beta1_psi(f, N, x, s, psi, rho, t):
    """Integrand in triangle coordinates ``r11 = s rho``, ``r21 = s rho t`` without ``t^alpha``.

    Includes the factor 2 for the mirror triangle, the Jacobian, ``|Delta|``,
    ``rho^{2 kappa}`` and the Wick phase of the fermionic pairing.  Broadcasts
    over ``rho`` and (possibly complex) ``t``.
    """
    n = N - 2
    kap = (N - 1) / 2
    r11 = s * rho
    r21 = s * rho * t
    shape = np.broadcast_shapes(np.shape(rho), np.shape(t))
    ph = np.exp(1j * psi)
    d = Jet.variable(np.zeros(shape, complex), 0, 1, n)
    u = d * ph
    phi = f(power_sums(1, [r11, r21], [u], f.max_power))
    S = u * (-2.0) + (r11 + r21)
    h = phi * (S * (-1j * x)).exp() * S
    # Taylor coefficients of 1/((r11-u)^2 (r21-u)^2) in d, with r21^{-b-2} = (s rho)^{-b-2} t^{-b-2}
    G = 0
    for c in range(n + 1):
        w = 0
        for a in range(n - c + 1):
            b = n - c - a
            w = w + (a + 1) * (b + 1) * ph ** (a + b) * r11 ** (-a - 2) * (s * rho) ** (-b - 2) * t ** (N - b - 2)
        G = G + w * h.coefficient(c)
    return 2 * rho ** (2 * kap + 2) * (1 - t) * G * np.exp(-1j * psi * n)


def _beta1_t_integral(f, N, x, s, psi, rho, mode, a_eff, cutoff=None):
    """t-integral ``int_0^1 t^alpha Psi dt`` for each rho, finite part or with a lower cutoff."""
    al = (N - 1) / 2 - N
    rho = np.asarray(rho, dtype=float)[:, None]
    scale = 1.0 + 2 * abs(x) + 2 * math.sqrt(a_eff) * rho
    R = np.minimum(0.5, 1.0 / (rho * scale))
    g, w = _gl(16)
    out = np.zeros(rho.shape[0], complex)
    if mode == "finite_part":
        M, P = 32, 64
        theta = 2 * np.pi * np.arange(P) / P
        vals = _beta1_psi(f, N, x, s, psi, rho, R * np.exp(1j * theta)[None, :])
        c = np.fft.fft(vals, axis=-1)[:, :M] / P / R ** np.arange(M)
        j = np.arange(M)
        e = al + j + 1
        safe = np.where(np.abs(e) < 1e-12, 1.0, e)
        head = np.where(np.abs(e) < 1e-12, c * np.log(R), c * R ** e / safe)
        out += head.sum(axis=1)
        lo = R
    else:
        lo = np.full_like(R, cutoff)
    # log-spaced nodes on [lo, tau], uniform panels on [tau, 1]
    tau = np.minimum(1.0, 10 * R)
    tau = np.maximum(tau, lo)
    nl = 40 if mode == "finite_part" else 80
    gl, wl = _gl(nl)
    y = gl[None, :]
    tt = lo * (tau / lo) ** y
    dt = np.log(tau / lo) * tt * wl[None, :]
    out += np.sum(dt * tt ** al * _beta1_psi(f, N, x, s, psi, rho, tt), axis=1)
    phase = float(np.max(rho)) * (abs(x) + 1 + 2 * math.sqrt(a_eff) * float(np.max(rho)))
    panels = max(2, math.ceil(phase / 2.0))
    xi = ((np.arange(panels)[:, None] + g[None, :]) / panels).ravel()
    wx = np.tile(w, panels) / panels
    tt = tau + (1 - tau) * xi[None, :]
    out += np.sum((1 - tau) * wx[None, :] * tt ** al * _beta1_psi(f, N, x, s, psi, rho, tt), axis=1)
    return out


def _beta1_wedge(f, N, x, s, psi, mode, L, cutoff=None):
    a_eff = _curvature(f, L)
    width = min(0.75, math.pi / (2 * abs(x) + 1.0))
    rho, w = panel_nodes(0.0, L, width)
    total = 0j
    chunk = 64
    for i in range(0, len(rho), chunk):
        total += np.sum(w[i:i + chunk] * _beta1_t_integral(f, N, x, s, psi, rho[i:i + chunk], mode, a_eff, cutoff))
    # det r1^kappa on the negative wedge: (e^{i pi kappa})^2
    return total * (s ** (N - 1))


def _direct_probe(wedge: Callable[[float], complex], where: str, cutoffs=(1e-3, 1e-4, 1e-5),
                  rtol=1e-8) -> complex:
    """Raise unless the truncated integral settles as the cutoff shrinks geometrically.

    A bounded integrand changes by a factor ``cutoff ratio`` per step, a
    logarithmic or power divergence by a factor of order one or more.
    """
    est = [wedge(c) for c in cutoffs]
    d1, d2 = abs(est[1] - est[0]), abs(est[2] - est[1])
    growth = d2 / max(d1, 1e-300)
    if growth > 0.3 and d2 > rtol * max(abs(est[2]), 1e-300):
        raise DivergenceError(DivergenceReport(list(cutoffs), est, float(growth), None, where=where))
    return est[-1]


def density_beta1(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, eps: float = 0.0,
                  mode: str = "finite_part", normalize: bool = True) -> DensityCurve:
    """Level density for beta = 1 over the two wedges of the bosonic eigenvalue plane.

    ``mode="direct"`` integrates with a shrinking cutoff at ``det r1 = 0`` and
    raises :class:`DivergenceError` when the estimate does not settle.
    ``mode="finite_part"`` takes the Hadamard finite part there.
    """
    if p.beta != 1 or p.k != 1:
        raise DomainError("density_beta1 needs beta=1, k=1")
    if p.N < 2:
        raise DomainError("beta=1 needs N >= 2")
    if mode not in ("direct", "finite_part"):
        raise ValueError("mode must be 'direct' or 'finite_part'")
    _check_psi(f, psi)
    N = p.N
    L = decay_radius(f)
    grid = np.asarray(grid, dtype=float)
    if N % 2:
        warnings.warn("beta=1 with odd N: the finite-part density is known to disagree with sampling",
                      RuntimeWarning)

    def at(x, cutoff=None):
        return -(_beta1_wedge(f, N, x, 1, psi, mode, L, cutoff)
                 + _beta1_wedge(f, N, x, -1, psi, mode, L, cutoff)) / (2 * math.pi)

    if mode == "direct":
        _direct_probe(lambda c: at(float(grid[len(grid) // 2]), c), "beta=1 density, det r1 -> 0")

        def compute(xs):
            return np.array([at(x, 1e-4) for x in xs])
    else:
        def compute(xs):
            return np.array([at(x) for x in xs])

    raw = compute(grid)
    meta = {"beta": 1, "N": N, "psi": psi, "eps": eps, "mode": mode, "charfun": f.label,
            "odd_N_flag": bool(N % 2)}
    vals = _normalize(grid, raw, N, f, compute, normalize, meta)
    return DensityCurve(grid, vals, float(N), meta)


def resolvent_beta1(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, eps: float = 0.1,
                    mode: str = "finite_part", normalization: float = 1.0) -> ResolventCurve:
    """``R^(x - i eps)`` for beta = 1 from the positive wedge only."""
    if p.beta != 1 or p.k != 1:
        raise DomainError("resolvent_beta1 needs beta=1, k=1")
    if eps <= 0:
        raise DomainError("eps must be positive")
    _check_psi(f, psi)
    L = decay_radius(f)
    grid = np.asarray(grid, dtype=float)

    def at(x, cutoff=None):
        return -1j * _beta1_wedge(f, p.N, x - 1j * eps, 1, psi, mode, L, cutoff)

    if mode == "direct":
        _direct_probe(lambda c: at(float(grid[0]), c), "beta=1 resolvent, det r1 -> 0")
        vals = np.array([at(x, 1e-8) for x in grid])
    else:
        vals = np.array([at(x) for x in grid])
    return ResolventCurve(grid, vals * normalization, eps, -1,
                          {"beta": 1, "N": p.N, "psi": psi, "mode": mode, "normalization": normalization})


# ---------------------------------------------------------------------------
# beta = 4

def _beta4_integrand(f, N, x, psi, r):
    """``r^{2N+1} (4 e^{-2 i psi})^N / (2N+1)! [D^N h](0)`` for bosonic values ``r`` (complex allowed)."""
    order = 2 * N
    ph = np.exp(1j * psi)
    r = np.asarray(r)
    z = np.zeros(r.shape, complex)
    u1 = Jet.variable(z, 0, 2, order) * ph
    u2 = Jet.variable(z, 1, 2, order) * ph
    phi = f(power_sums(4, [r], [u1, u2], f.max_power))
    S = (u1 + u2) * (-1.0) + 2 * r
    den = ((u1 * (-1.0) + r) * (u2 * (-1.0) + r)) ** 2
    h = phi * (S * (-1j * x)).exp() * S * u1 * u2 / den
    for _ in range(N):
        h = sekiguchi_jet(h, 0.0, [0.0, 0.0], 1.0)
    return r ** (2 * N + 1) * (4 * np.exp(-2j * psi)) ** N / math.factorial(2 * N + 1) * h.value


def _beta4_half_line(f, N, x, psi, L, sign, mode, cutoff=None, split=None):
    """``int_0^L`` (sign=+1) or ``int_{-L}^0`` (sign=-1) of the beta=4 integrand.

    The integrand has at most a simple pole at ``r1 = 0``.  In finite-part
    mode ``r * integrand`` is expanded on a circle of radius ``split`` and
    the ``1/r`` part is integrated with the Hadamard prescription.
    """
    width = min(0.5, math.pi / (2 * abs(x) + 1.0))
    if mode == "finite_part":
        # keep the circle small enough for the plane wave to be resolved by M terms
        split = split or min(0.25, 1.0 / (2 * abs(x) + 1.0))
        M, P = 24, 48
        z = split * np.exp(2j * np.pi * np.arange(P) / P)
        g = z * _beta4_integrand(f, N, x, psi, sign * z)
        c = np.fft.fft(g)[:M] / P / split ** np.arange(M)
        j = np.arange(1, M)
        head = c[0] * math.log(split) + np.sum(c[1:] * split ** j / j)
        r, w = panel_nodes(split, L, width)
    else:
        head = 0.0
        r, w = panel_nodes(cutoff, L, width)
    return head + np.sum(w * _beta4_integrand(f, N, x, psi, sign * r))


def _beta4_k1(p: DysonParams, name: str) -> None:
    if p.beta != 4 or p.k != 1:
        raise DomainError(f"{name} needs beta=4, k=1")


def density_beta4(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, eps: float = 0.0,
                  mode: str = "direct", normalize: bool = True) -> DensityCurve:
    """Level density for beta = 4 via ``N`` applications of the k=2 radial operator.

    Any simple pole at ``r1 = 0`` cancels between the half lines: ``direct``
    takes the symmetric principal value, ``finite_part`` adds the two
    Hadamard parts.  Both must agree.
    """
    _beta4_k1(p, "density_beta4")
    if mode not in ("direct", "finite_part"):
        raise ValueError("mode must be 'direct' or 'finite_part'")
    _check_psi(f, psi)
    N = p.N
    L = decay_radius(f)
    grid = np.asarray(grid, dtype=float)

    def at(x, cutoff=None):
        tot = (_beta4_half_line(f, N, x, psi, L, 1, mode, cutoff)
               + _beta4_half_line(f, N, x, psi, L, -1, mode, cutoff))
        return -2 / math.pi * tot

    if mode == "direct":
        _direct_probe(lambda c: at(float(grid[len(grid) // 2]), c), "beta=4 density, r1 -> 0",
                      cutoffs=(1e-4, 1e-6, 1e-8))

        def compute(xs):
            return np.array([at(x, 0.0) for x in xs])
    else:
        def compute(xs):
            return np.array([at(x) for x in xs])

    raw = compute(grid)
    meta = {"beta": 4, "N": N, "psi": psi, "eps": eps, "mode": mode, "charfun": f.label}
    vals = _normalize(grid, raw, N, f, compute, normalize, meta)
    return DensityCurve(grid, vals, float(N), meta)


def resolvent_beta4(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, eps: float = 0.1,
                    mode: str = "finite_part", normalization: float = 1.0) -> ResolventCurve:
    """``R^(x - i eps)`` for beta = 4 from the positive half line."""
    _beta4_k1(p, "resolvent_beta4")
    if eps <= 0:
        raise DomainError("eps must be positive")
    _check_psi(f, psi)
    L = decay_radius(f)
    grid = np.asarray(grid, dtype=float)

    def at(x, cutoff=None):
        return -4j * _beta4_half_line(f, p.N, x - 1j * eps, psi, L, 1, mode, cutoff)

    if mode == "direct":
        _direct_probe(lambda c: at(float(grid[0]), c), "beta=4 resolvent, r1 -> 0", cutoffs=(1e-4, 1e-6, 1e-8))
        vals = np.array([at(x, 1e-8) for x in grid])
    else:
        vals = np.array([at(x) for x in grid])
    return ResolventCurve(grid, vals * normalization, eps, -1,
                          {"beta": 4, "N": p.N, "psi": psi, "mode": mode, "normalization": normalization})


# ---------------------------------------------------------------------------
# dispatch, extrapolation, checks

def density(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, eps: float = 0.0,
            mode: str | None = None, normalize: bool = True) -> DensityCurve:
    if p.beta == 2:
        return density_beta2(f, p, grid, psi, eps, normalize)
    if p.beta == 1:
        return density_beta1(f, p, grid, psi, eps, mode or "finite_part", normalize)
    return density_beta4(f, p, grid, psi, eps, mode or "direct", normalize)


def resolvent(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, eps: float = 0.1,
              mode: str | None = None, normalization: float = 1.0) -> ResolventCurve:
    if p.beta == 2:
        out = resolvent_beta2(f, p, grid, psi, eps)
        out.values = out.values * normalization
        return out
    if p.beta == 1:
        return resolvent_beta1(f, p, grid, psi, eps, mode or "finite_part", normalization)
    return resolvent_beta4(f, p, grid, psi, eps, mode or "finite_part", normalization)


def richardson(f: CharFunRepr, p: DysonParams, grid, eps_list: Sequence[float] = (0.2, 0.1, 0.05),
               psi: float = math.pi / 2, mode: str | None = None, normalization: float = 1.0) -> ResolventCurve:
    """Polynomial extrapolation of the resolvent to ``eps -> 0``.

    ``meta["consistency"]`` is ``max |last - previous extrapolant| / peak``.
    """
    eps_list = sorted(eps_list, reverse=True)
    if len(eps_list) < 2:
        raise ValueError("need at least two regulators")
    curves = np.array([resolvent(f, p, grid, psi, e, mode, normalization).values for e in eps_list])
    e = np.asarray(eps_list)
    # Neville table at eps = 0
    T = [curves[i] for i in range(len(e))]
    prev = None
    for m in range(1, len(e)):
        prev = T[-1]
        T = [(e[i] * T[i + 1] - e[i + m] * T[i]) / (e[i] - e[i + m]) for i in range(len(T) - 1)]
        # the Neville step is exact for polynomials in eps of degree m
    best = T[0]
    peak = float(np.max(np.abs(best))) or 1.0
    consistency = float(np.max(np.abs(best - prev)) / peak)
    return ResolventCurve(np.asarray(grid, float), best, 0.0, -1,
                          {"beta": p.beta, "N": p.N, "eps_list": list(eps_list), "consistency": consistency})


def compare_modes(f: CharFunRepr, p: DysonParams, grid, psi: float = math.pi / 2, tol: float = 1e-6,
                  ensemble: EnsembleSpec | None = None, arbiter_samples: int = 0, bins: int = 60,
                  seed: int = 0) -> DiscrepancyReport:
    """Run both bosonic modes; on disagreement attach a sampled histogram as arbiter.

    Arbitration needs ``ensemble`` and ``arbiter_samples > 0``; each curve
    that exists gets a chi-square against the histogram.
    """
    results = {}
    curves = {}
    for mode in ("direct", "finite_part"):
        try:
            c = density(f, p, grid, psi, mode=mode)
            curves[mode] = c
            results[mode] = {"status": "ok", "raw_mass": c.meta["raw_mass"]}
        except DivergenceError as exc:
            results[mode] = {"status": "divergent", "report": exc.report.to_dict()}
    gap = None
    if len(curves) == 2:
        a, b = curves["direct"].values, curves["finite_part"].values
        gap = float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))
    agree = gap is not None and gap < tol
    arbiter = None
    if not agree and arbiter_samples > 0 and ensemble is not None:
        grid = np.asarray(grid, float)
        hist = mc_density(sample(ensemble, arbiter_samples, seed), bins=bins,
                          range=(float(grid[0]), float(grid[-1])))
        arbiter = {m: chi2_against(c.grid, c.values, hist) for m, c in curves.items()}
    return DiscrepancyReport(results["direct"], results["finite_part"], gap, agree, arbiter)


def wick_independence_check(f: CharFunRepr, p: DysonParams, grid, psis: Sequence[float],
                            mode: str | None = None) -> float:
    """Largest relative spread of the raw density over admissible Wick angles."""
    bad = [ps for ps in psis if not admissible_psi(f, ps)]
    if bad:
        raise DomainError(f"inadmissible Wick angles {bad}")
    curves = [density(f, p, grid, ps, mode=mode, normalize=False).values for ps in psis]
    peak = max(float(np.max(np.abs(c))) for c in curves)
    return max(float(np.max(np.abs(c - curves[0]))) for c in curves[1:]) / peak


def representation_independence_check(f_a: CharFunRepr, f_b: CharFunRepr, p: DysonParams, grid,
                                      psi: float = math.pi / 2, check_precondition: bool = True,
                                      trials: int = 5, seed: int = 0, mode: str | None = None) -> float:
    """Relative gap between densities of two representations of the same ``Phi0``.

    The precondition is that both agree on ordinary hermitian matrices;
    it is checked on random matrices of the ordinary class.
    """
    if check_precondition:
        rng = np.random.default_rng(seed)
        dim = 2 * p.N if p.beta == 4 else p.N
        for _ in range(trials):
            A = rng.standard_normal((dim, dim)) + (1j * rng.standard_normal((dim, dim)) if p.beta != 1 else 0)
            K = (A + A.conj().T) / (2 * math.sqrt(dim))
            va, vb = f_a.on_matrix(K), f_b.on_matrix(K)
            if abs(va - vb) > 1e-10 * max(1.0, abs(va)):
                raise PreconditionError("the representations differ on ordinary matrices")
    a = density(f_a, p, grid, psi, mode=mode, normalize=False).values
    b = density(f_b, p, grid, psi, mode=mode, normalize=False).values
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))


def generating_function_beta2(f: CharFunRepr, N: int, x: float, J: float, eps: float,
                              psi: float = math.pi / 2) -> complex:
    """``Z(x - i eps, J)`` for beta = 2, k = 1; the boundary term contributes 1."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    L = decay_radius(f)
    return 1 + 2 * J * 1j * _beta2_integral(f, N, x - J, x + J, psi, eps, 0.0, L)


def zk_consistency(ens: EnsembleSpec, x: float, J: float, eps: float, samples: int = 200_000,
                   seed: int = 0, max_stderr: float = 0.01, psi: float = math.pi / 2) -> dict:
    """Compare the beta=2 generating function with its sampled average."""
    if ens.beta != 2:
        raise DomainError("generating-function check is implemented for beta=2")
    f = charfun_for(ens)
    formula = generating_function_beta2(f, ens.N, x, J, eps, psi)
    H = sample_matrices(ens, samples, seed)
    lam = np.linalg.eigvalsh(H)
    z = x - 1j * eps
    vals = np.prod((lam - z - J) / (lam - z + J), axis=1)
    mean = complex(np.mean(vals))
    err = float(np.std(vals) / math.sqrt(samples))
    if err > max_stderr:
        raise ValueError(f"sampling error {err:.3g} exceeds {max_stderr}; increase samples")
    gap = abs(formula - mean)
    return {"formula": formula, "mc": mean, "stderr": err, "gap": gap, "pass": gap <= 3 * err}
