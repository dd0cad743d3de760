"""Monte Carlo samplers and orthogonal-polynomial oracles."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, stats

from .charfun import EnsembleSpec

CHUNK = 50_000


@dataclass
class SampleBatch:
    """Eigenvalues of i.i.d. draws; beta=4 spectra hold one value per Kramers doublet."""

    beta: int
    N: int
    eigenvalues: np.ndarray  # (samples, N)
    seed: int
    label: str
    components: np.ndarray | None = None
    streams: int = 1

    @property
    def n_samples(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def degeneracy(self) -> float:
        """The inverse averaged degeneracy ``d``: 1/2 for beta=4."""
        return 0.5 if self.beta == 4 else 1.0


@dataclass
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    normalization: float
    meta: dict = field(default_factory=dict)
    stderr: np.ndarray | None = None

    def mass(self) -> float:
        return float(np.trapezoid(self.values, self.grid))

    def to_csv(self, path) -> None:
        write_curve_csv(path, self.grid, self.values)


def write_curve_csv(path, x, y, header=("x", "density")) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for a, b in zip(np.asarray(x), np.asarray(y)):
            fh.write(f"{a:.17g},{b:.17g}\n")


def read_curve_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


# ---------------------------------------------------------------------------
# sampling

def _base_matrices(beta: int, N: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-variance-diagonal GOE / GUE / GSE draws (GSE as 2N x 2N complex)."""
    if beta == 1:
        A = rng.standard_normal((n, N, N))
        return (A + A.transpose(0, 2, 1)) / 2
    if beta == 2:
        A = rng.standard_normal((n, N, N)) + 1j * rng.standard_normal((n, N, N))
        return (A + A.conj().transpose(0, 2, 1)) / 2
    A = rng.standard_normal((n, N, N)) + 1j * rng.standard_normal((n, N, N))
    B = rng.standard_normal((n, N, N)) + 1j * rng.standard_normal((n, N, N))
    Z = np.block([[A, B], [-B.conj(), A.conj()]])
    return (Z + Z.conj().transpose(0, 2, 1)) / 2


def _stream_sizes(n: int, streams: int) -> list[int]:
    base, extra = divmod(n, streams)
    return [base + (1 if i < extra else 0) for i in range(streams)]


def _draw(ens: EnsembleSpec, n: int, rng: np.random.Generator, eig: bool):
    comps = ens.components
    if len(comps) > 1:
        which = rng.choice(len(comps), size=n, p=[c.w for c in comps])
    else:
        which = np.zeros(n, dtype=int)
    H = _base_matrices(ens.beta, ens.N, n, rng)
    scale = np.sqrt(np.array([c.variance for c in comps]))[which]
    shift = np.array([c.shift for c in comps])[which]
    H = H * scale[:, None, None]
    d = H.shape[-1]
    H[:, np.arange(d), np.arange(d)] += shift[:, None]
    if not eig:
        return H, which
    ev = np.linalg.eigvalsh(H)
    if ens.beta == 4:
        ev = ev[:, ::2]
    return ev, which


def _stream(seq: np.random.SeedSequence) -> np.random.Generator:
    # counter-based bit generator: streams are independent keys, not jumped states
    return np.random.Generator(np.random.Philox(seq))


def sample(ens: EnsembleSpec, n_samples: int, seed: int = 0, streams: int = 8) -> SampleBatch:
    """Draw ``n_samples`` spectra using ``streams`` independent seeded substreams.

    The result depends only on ``(seed, streams)``.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    children = np.random.SeedSequence(seed).spawn(streams)
    evs, labels = [], []
    for child, size in zip(children, _stream_sizes(n_samples, streams)):
        rng = _stream(child)
        done = 0
        while done < size:
            m = min(CHUNK, size - done)
            ev, which = _draw(ens, m, rng, eig=True)
            evs.append(ev)
            labels.append(which)
            done += m
    return SampleBatch(ens.beta, ens.N, np.concatenate(evs), seed, ens.kind,
                       np.concatenate(labels), streams)


def sample_matrices(ens: EnsembleSpec, n_samples: int, seed: int = 0) -> np.ndarray:
    rng = _stream(np.random.SeedSequence(seed))
    return _draw(ens, n_samples, rng, eig=False)[0]


# ---------------------------------------------------------------------------
# estimators

def mc_density(batch: SampleBatch, bins: int = 60, range: tuple = (-6.0, 6.0)) -> DensityCurve:
    """Histogram estimate of the level density with per-bin standard errors."""
    if batch.n_samples == 0:
        raise ValueError("empty batch")
    edges = np.linspace(range[0], range[1], bins + 1)
    width = np.diff(edges)
    ev = batch.eigenvalues
    idx = np.digitize(ev, edges) - 1
    inside = (idx >= 0) & (idx < bins)
    counts = np.zeros(bins)
    sq = np.zeros(bins)
    # per-sample bin counts give the correct variance for correlated eigenvalues
    for start in np.arange(0, batch.n_samples, CHUNK):
        blk = idx[start:start + CHUNK]
        ok = inside[start:start + CHUNK]
        rows = np.repeat(np.arange(blk.shape[0]), blk.shape[1])[ok.ravel()]
        per = np.zeros((blk.shape[0], bins))
        np.add.at(per, (rows, blk.ravel()[ok.ravel()]), 1.0)
        counts += per.sum(axis=0)
        sq += (per ** 2).sum(axis=0)
    n = batch.n_samples
    mean = counts / n
    var = np.maximum(sq / n - mean ** 2, 0.0)
    centers = (edges[:-1] + edges[1:]) / 2
    curve = DensityCurve(centers, mean / width, float(batch.N),
                         {"beta": batch.beta, "N": batch.N, "samples": n, "seed": batch.seed,
                          "bins": bins, "range": list(range), "ensemble": batch.label},
                         np.sqrt(var / n) / width)
    curve.meta["edges"] = edges.tolist()
    curve.meta["bin_var"] = var.tolist()
    return curve


def mc_resolvent(batch: SampleBatch, x, eps: float, L: int = -1) -> tuple[np.ndarray, np.ndarray]:
    """MC average of ``sum_levels 1/(x + L i eps - lambda)`` and its standard error."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if L not in (-1, 1):
        raise ValueError("L must be +1 or -1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = x + L * 1j * eps
    mean = np.zeros(x.shape, complex)
    sq = np.zeros(x.shape)
    n = batch.n_samples
    for start in range(0, n, CHUNK):
        ev = batch.eigenvalues[start:start + CHUNK]
        vals = (1.0 / (z[None, :, None] - ev[:, None, :])).sum(axis=-1)
        mean += vals.sum(axis=0)
        sq += (np.abs(vals) ** 2).sum(axis=0)
    mean /= n
    var = np.maximum(sq / n - np.abs(mean) ** 2, 0.0)
    return mean, np.sqrt(var / n)


def mc_r2(batch: SampleBatch, x1: float, x2: float, binwidth: float) -> tuple[float, float]:
    """Two-point function as a product of two traces, self terms included."""
    h = binwidth / 2
    if abs(x1 - x2) < binwidth:
        warnings.warn("overlapping bins: estimate is dominated by the self term", RuntimeWarning)
    ev = batch.eigenvalues
    n1 = (np.abs(ev - x1) < h).sum(axis=1)
    n2 = (np.abs(ev - x2) < h).sum(axis=1)
    prod = n1 * n2 / binwidth ** 2
    return float(prod.mean()), float(prod.std(ddof=1) / math.sqrt(len(prod)))


# ---------------------------------------------------------------------------
# Hermite oracle for the unitary case

def hermite_functions(N: int, s: np.ndarray) -> np.ndarray:
    """Orthonormal harmonic-oscillator functions ``psi_0 .. psi_{N-1}`` at ``s``."""
    s = np.asarray(s, dtype=float)
    out = np.zeros((N,) + s.shape)
    out[0] = np.pi ** -0.25 * np.exp(-s * s / 2)
    if N > 1:
        out[1] = math.sqrt(2) * s * out[0]
    for j in range(2, N):
        out[j] = math.sqrt(2 / j) * s * out[j - 1] - math.sqrt((j - 1) / j) * out[j - 2]
    return out


def hermite_kernel(N: int, v2: float, x, y) -> np.ndarray:
    """GUE correlation kernel for eigenvalue weight ``exp(-x^2 / (2 v2))``."""
    sc = math.sqrt(2 * v2)
    px = hermite_functions(N, np.asarray(x) / sc)
    py = hermite_functions(N, np.asarray(y) / sc)
    return (px * py).sum(axis=0) / sc


def hermite_kernel_density(N: int, v2: float, grid, shift: float = 0.0) -> DensityCurve:
    grid = np.asarray(grid, dtype=float)
    vals = hermite_kernel(N, v2, grid - shift, grid - shift)
    return DensityCurve(grid, vals, float(N), {"beta": 2, "N": N, "v2": v2, "method": "hermite"})


def hermite_r2(N: int, v2: float, x1, x2):
    """Determinantal two-point function (no self term)."""
    k11 = hermite_kernel(N, v2, x1, x1)
    k22 = hermite_kernel(N, v2, x2, x2)
    k12 = hermite_kernel(N, v2, x1, x2)
    return k11 * k22 - k12 ** 2


def hermite_stieltjes(N: int, v2: float, z: complex) -> complex:
    """``int R_1(t) / (z - t) dt`` for the Hermite density by adaptive quadrature."""
    from scipy import integrate
    lim = 12 * math.sqrt(v2) + math.sqrt(4 * N * v2)
    def part(t, k):
        val = hermite_kernel(N, v2, t, t) / (z - t)
        return val.real if k == 0 else val.imag
    pts = [z.real] if abs(z.real) < lim else None
    re = integrate.quad(part, -lim, lim, args=(0,), points=pts, limit=400, epsabs=1e-12)[0]
    im = integrate.quad(part, -lim, lim, args=(1,), points=pts, limit=400, epsabs=1e-12)[0]
    return complex(re, im)


# ---------------------------------------------------------------------------
# comparison statistics

def chi2_against(curve_x, curve_y, hist: DensityCurve, min_expected: float = 5.0) -> dict:
    """Chi-square of histogram counts against a formula curve integrated over bins."""
    edges = np.asarray(hist.meta["edges"])
    n = hist.meta["samples"]
    var = np.asarray(hist.meta["bin_var"])
    width = np.diff(edges)
    spline = interpolate.CubicSpline(curve_x, curve_y)
    expected = np.array([spline.integrate(a, b) for a, b in zip(edges[:-1], edges[1:])])
    observed = hist.values * width
    # rare bins almost never hold two levels: the binomial variance under the model
    # is exact there and avoids the downward bias of the sampled variance
    rare = expected < 0.01
    var = np.where(rare, np.clip(expected, 0, 1) * (1 - np.clip(expected, 0, 1)), var)
    use = (expected * n >= min_expected) & (var > 0)
    chi2 = float(np.sum((observed[use] - expected[use]) ** 2 / (var[use] / n)))
    dof = int(use.sum())
    crit = float(stats.chi2.ppf(0.99, dof)) if dof else 0.0
    return {"chi2": chi2, "dof": dof, "critical_99": crit, "pass": bool(chi2 <= crit),
            "p_value": float(stats.chi2.sf(chi2, dof)) if dof else 1.0}
