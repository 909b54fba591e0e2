"""Shared numerical utilities: compensated sums, RNG streams, samplers, CIs."""
from __future__ import annotations

import math

import numpy as np


def fdot(w: np.ndarray, v: np.ndarray) -> float:
    """Compensated dot product sum_i w_i v_i (exact rounding via math.fsum)."""
    return math.fsum(np.asarray(w, dtype=float) * np.asarray(v, dtype=float))


def fsum(v: np.ndarray) -> float:
    return math.fsum(np.asarray(v, dtype=float))


def stream(seed: int, *path: int) -> np.random.Generator:
    """Counter-based RNG stream addressed by (seed, *path).

    Streams for distinct paths are statistically independent; the scheme is
    deterministic, so rerunning with the same seed reproduces every draw.
    """
    key = np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(key))


class AliasSampler:
    """Vose alias method: exact O(1) categorical sampling from a fixed pmf."""

    def __init__(self, probs: np.ndarray):
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a nonempty 1-d array")
        if np.any(p < 0) or not np.isfinite(p).all():
            raise ValueError("probs must be finite and nonnegative")
        total = p.sum()
        if total <= 0:
            raise ValueError("probs must have positive mass")
        n = p.size
        scaled = p * (n / total)
        self.n = n
        self.prob = np.ones(n)
        self.alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        scaled = scaled.copy()
        while small and large:
            s = small.pop()
            l = large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] = (scaled[l] + scaled[s]) - 1.0
            (small if scaled[l] < 1.0 else large).append(l)
        # leftovers are 1 up to rounding
        for i in small + large:
            self.prob[i] = 1.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.integers(0, self.n, size=size)
        keep = rng.random(size) < self.prob[idx]
        return np.where(keep, idx, self.alias[idx])


def wilson_interval(successes: int, trials: int, z: float = 3.0) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion at z standard errors."""
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def bootstrap_ci(values: np.ndarray, statistic, n_boot: int, rng: np.random.Generator,
                 level: float = 0.99) -> tuple[float, float]:
    """Percentile bootstrap CI for statistic(values)."""
    values = np.asarray(values)
    n = values.shape[0]
    stats = np.empty(n_boot)
    for b in range(n_boot):
        idx = rng.integers(0, n, size=n)
        stats[b] = statistic(values[idx])
    lo = (1.0 - level) / 2.0
    return float(np.quantile(stats, lo)), float(np.quantile(stats, 1.0 - lo))


def golden_section_max(fun, lo: float, hi: float, iters: int = 200) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal fun on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
        if b - a < 1e-15 * max(1.0, abs(a)):
            break
    x = (a + b) / 2.0
    return x, fun(x)


def gaussian_abs_moment(r: float) -> float:
    """E|g|^r for a standard Gaussian g: 2^{r/2} Gamma((r+1)/2) / sqrt(pi)."""
    return 2.0 ** (r / 2.0) * math.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)


def xlogx_dev(z) -> np.ndarray:
    """phi(1+z) = (1+z) log(1+z) - z elementwise, for z >= -1.

    phi is the nonnegative Bregman integrand of x log x; entropies computed
    as mu-averages of phi never suffer the catastrophic cancellation of the
    textbook mu(f log f) - mu(f) log mu(f) near constant f.  Near z = 0 the
    alternating series sum_{k>=2} (-z)^k / (k(k-1)) is used.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    near = np.abs(z) <= 0.0625
    zt = z[near]
    acc = np.zeros_like(zt)
    term = zt * zt
    sign = 1.0
    for k in range(2, 14):
        acc += sign * term / (k * (k - 1.0))
        term = term * zt
        sign = -sign
    out[near] = acc
    zr = z[~near]
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (1.0 + zr) * np.log1p(zr) - zr
    val[zr == -1.0] = 1.0
    out[~near] = val
    return out


def pow_dev(z, p: float) -> np.ndarray:
    """psi_p(1+z) = (1+z)^p - 1 - p z elementwise, for z >= -1 and p in (1, 2].

    The nonnegative Bregman integrand of x^p; same cancellation-free role for
    the defect mu(f^p) - mu(f)^p as xlogx_dev plays for the entropy.  Near
    z = 0 the binomial series sum_{k>=2} C(p,k) z^k is used.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    near = np.abs(z) <= 0.0625
    zt = z[near]
    acc = np.zeros_like(zt)
    term = zt * zt
    coeff = p * (p - 1.0) / 2.0
    for k in range(2, 14):
        acc += coeff * term
        term = term * zt
        coeff = coeff * (p - k) / (k + 1.0)
    out[near] = acc
    zr = z[~near]
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.expm1(p * np.log1p(zr)) - p * zr
    out[~near] = val
    return out
