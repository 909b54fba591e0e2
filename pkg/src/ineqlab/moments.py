"""Moment-inequality verification: exact on enumerable chains, MC elsewhere.

Under a Beckner-constant growth profile alpha_p >= a (p-1)^s the deviation
moments of any observable obey, for r >= 2,

    ||(f - mu f)_+||_r^2 <= (1 - 2^{-(s+1)}) (r^{s+1}/a) kappa(s) ||Gamma_+(f)||_{r/2}
    ||(mu f - f)_+||_r^2 <= same with Gamma_+(-f)
    ||f - mu f||_r^2     <= (r^{s+1} kappa(s) / a) ||Gamma(f)||_{r/2}

with kappa(s) = (1 - e^{-(s+1)/2})^{-1}.  s = 0 is the modified
log-Sobolev regime, s = 1 the Poincare regime.  On the symmetric group the
s = 0 profile with a = (n+2)/(2n(n-1)) specializes to

    ||f - Ef||_r <= D sqrt(r) || (sum_{ij} (f(s) - f(s t_ij))^2 / (n+2))^{1/2} ||_r

with D = sqrt(sqrt(e)/(sqrt(e)-1)), and for suprema of Hoeffding statistics
Z = sup_a sum_k a_{k sigma(k)},

    ||(Z - EZ)_+||_r <= 4 D sqrt(r) A + 10 D^2 r B_r,
    P(Z >= EZ + 4e D sqrt(r) A + 10e D^2 r B_r) <= e^{2-r}.

Sampling from tabulated measures uses the exact alias method; no MCMC is
involved anywhere, so Monte Carlo tails carry no mixing bias.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dirichlet import Kernel, carre_du_champ, gamma_plus
from .finite_space import lr_norm, mean
from .models import ModelBundle, build_interchange
from .util import AliasSampler, stream, wilson_interval

KAPPA0 = 1.0 / (1.0 - math.exp(-0.5))          # sqrt(e)/(sqrt(e)-1)
D_SYMMETRIC_GROUP = math.sqrt(KAPPA0)
D_POISSON = math.sqrt(3.0 * KAPPA0)


def kappa(s: float) -> float:
    """kappa(s) = (1 - e^{-(s+1)/2})^{-1}, decreasing in s >= 0."""
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    return 1.0 / (1.0 - math.exp(-(s + 1.0) / 2.0))


@dataclass(frozen=True)
class BecknerRegime:
    """Growth profile alpha_p >= a (p-1)^s for the Beckner constants.

    The profile is an input, never inferred: callers pass either a
    literature-predicted value (model metadata) or an estimator output, and
    provenance records which.  A profile valid only for p >= p_floor > 1
    restricts the admissible moment orders to r <= p_floor/(p_floor - 1).
    """

    a: float
    s: float
    p_floor: float | None = None
    provenance: str = ""

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("a must be positive")
        if self.s < 0:
            raise ValueError("s must be >= 0")
        if self.s > 1:
            warnings.warn("s > 1 is outside the informative range [0, 1]",
                          stacklevel=2)
        if self.p_floor is not None and not (1.0 < self.p_floor <= 2.0):
            raise ValueError("p_floor must lie in (1, 2]")

    @property
    def max_r(self) -> float:
        if self.p_floor is None:
            return math.inf
        return self.p_floor / (self.p_floor - 1.0)

    def check_r(self, r: float) -> None:
        if r < 2.0:
            raise ValueError(f"moment order r must be >= 2, got {r}")
        if r > self.max_r:
            raise ValueError(
                f"r = {r} rejected: a Beckner profile restricted to p >= "
                f"{self.p_floor} only yields moment bounds for "
                f"2 <= r <= p_floor/(p_floor-1) = {self.max_r:.6g}")

    def to_json(self) -> dict:
        return {"a": self.a, "s": self.s, "p_floor": self.p_floor,
                "provenance": self.provenance}


@dataclass
class MomentCheckReport:
    """Per-r left/right sides of a moment inequality and their margins.

    sides maps a side name ("upper", "lower", "two") to (lhs, rhs) lists;
    margin[i] is the worst rhs - lhs across sides at r_values[i].  Exact
    reports have sample_count 0; Monte Carlo ones record per-side standard
    errors in stderr.
    """

    r_values: list[float]
    sides: dict[str, tuple[list[float], list[float]]]
    margin: list[float]
    method: str
    sample_count: int = 0
    seed: int | None = None
    regime: dict | None = None
    stderr: dict | None = None

    @property
    def min_margin(self) -> float:
        return min(self.margin)

    def to_json(self) -> dict:
        return {"r_values": list(self.r_values),
                "sides": {k: {"lhs": list(l), "rhs": list(r)}
                          for k, (l, r) in self.sides.items()},
                "margin": list(self.margin), "method": self.method,
                "sample_count": self.sample_count, "seed": self.seed,
                "regime": self.regime, "stderr": self.stderr}


def _assemble(r_values, sides, method, sample_count=0, seed=None, regime=None,
              stderr=None) -> MomentCheckReport:
    margins = []
    for i in range(len(r_values)):
        margins.append(min(rhs[i] - lhs[i] for lhs, rhs in sides.values()))
    return MomentCheckReport(r_values=list(r_values), sides=sides, margin=margins,
                             method=method, sample_count=sample_count, seed=seed,
                             regime=regime, stderr=stderr)


def check_onesided_moments(kernel: Kernel, f: Sequence[float], regime: BecknerRegime,
                           r_values: Sequence[float]) -> MomentCheckReport:
    """Exact two-line check of the one-sided moment bounds on a finite chain.

    "upper" compares ||(f - mu f)_+||_r^2 against the Gamma_+(f) bound,
    "lower" the mirrored inequality with Gamma_+(-f).
    """
    space = kernel.space
    v = space.field_check(f)
    for r in r_values:
        regime.check_r(r)
    m = mean(space, v)
    gp = gamma_plus(kernel, v)
    gm = gamma_plus(kernel, -v)
    pref = (1.0 - 2.0 ** (-(regime.s + 1.0))) * kappa(regime.s) / regime.a
    up_l, up_r, lo_l, lo_r = [], [], [], []
    for r in r_values:
        rs = pref * r ** (regime.s + 1.0)
        up_l.append(lr_norm(space, np.maximum(v - m, 0.0), r) ** 2)
        up_r.append(rs * lr_norm(space, gp, r / 2.0))
        lo_l.append(lr_norm(space, np.maximum(m - v, 0.0), r) ** 2)
        lo_r.append(rs * lr_norm(space, gm, r / 2.0))
    return _assemble(r_values, {"upper": (up_l, up_r), "lower": (lo_l, lo_r)},
                     "exact", regime=regime.to_json())


def check_twosided_moments(kernel: Kernel, f: Sequence[float], regime: BecknerRegime,
                           r_values: Sequence[float]) -> MomentCheckReport:
    """Exact check of ||f - mu f||_r^2 <= (r^{s+1} kappa(s)/a) ||Gamma(f)||_{r/2}."""
    space = kernel.space
    v = space.field_check(f)
    for r in r_values:
        regime.check_r(r)
    m = mean(space, v)
    gam = carre_du_champ(kernel, v, v)
    two_l, two_r = [], []
    for r in r_values:
        two_l.append(lr_norm(space, v - m, r) ** 2)
        two_r.append(kappa(regime.s) / regime.a * r ** (regime.s + 1.0)
                     * lr_norm(space, gam, r / 2.0))
    return _assemble(r_values, {"two": (two_l, two_r)}, "exact",
                     regime=regime.to_json())


# ---------------------------------------------------------------------------
# symmetric group
# ---------------------------------------------------------------------------

def _as_field(bundle: ModelBundle, f) -> np.ndarray:
    if callable(f):
        return np.array([float(f(s)) for s in bundle.space.labels])
    return bundle.space.field_check(f)


def symmetric_group_moment_check(n: int, f, r_values: Sequence[float],
                                 bundle: ModelBundle | None = None) -> MomentCheckReport:
    """Exact check of the random-transposition moment inequalities on S_n.

    Compares ||f - Ef||_r (and the one-sided variant) against
    D sqrt(r) || ((1/(n+2)) sum_{i,j} (f(s) - f(s t_ij))^2 )^{1/2} ||_r
    over all n! permutations; the inner sum runs over ordered pairs.
    """
    if not (2 <= n <= 6):
        raise ValueError("n must lie in [2, 6]")
    for r in r_values:
        if r < 2:
            raise ValueError("moment orders must be >= 2")
    if bundle is None:
        bundle = build_interchange(n)
    space = bundle.space
    v = _as_field(bundle, f)
    labels = space.labels
    index = {s: k for k, s in enumerate(labels)}
    nstates = len(labels)
    v_sq = np.zeros(nstates)     # sum over ordered (i,j) of (f - f.tau)^2
    v_sq_plus = np.zeros(nstates)
    for k, sigma in enumerate(labels):
        for i, j in itertools.combinations(range(n), 2):
            swapped = list(sigma)
            swapped[i], swapped[j] = swapped[j], swapped[i]
            d = v[k] - v[index[tuple(swapped)]]
            v_sq[k] += 2.0 * d * d
            if d > 0:
                v_sq_plus[k] += 2.0 * d * d
    m = mean(space, v)
    two_l, two_r, up_l, up_r = [], [], [], []
    for r in r_values:
        scale = D_SYMMETRIC_GROUP * math.sqrt(r)
        two_l.append(lr_norm(space, v - m, r))
        two_r.append(scale * lr_norm(space, np.sqrt(v_sq / (n + 2.0)), r))
        up_l.append(lr_norm(space, np.maximum(v - m, 0.0), r))
        up_r.append(scale * lr_norm(space, np.sqrt(v_sq_plus / (n + 2.0)), r))
    return _assemble(r_values, {"two": (two_l, two_r), "upper": (up_l, up_r)},
                     "exact")


def hoeffding_statistic(a: np.ndarray) -> Callable[[tuple], float]:
    """sigma -> sum_k a[k, sigma(k)]."""
    a = np.asarray(a, dtype=float)

    def f(sigma):
        return float(a[np.arange(len(sigma)), list(sigma)].sum())
    return f


@dataclass
class HoeffdingBound:
    """The supremum-of-Hoeffding-statistics moment bound and its ingredients."""

    r: float
    bound: float
    A: float
    B_r: float
    tail_threshold: float      # deviation at which the tail is <= e^{2-r}
    tail_level: float
    method: str
    stderr_A: float = 0.0
    stderr_B: float = 0.0
    sample_count: int = 0
    seed: int | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _hoeffding_ingredients(mats: np.ndarray, perms: np.ndarray):
    """Per-permutation sup-statistics: Z, S = sup_a l2 row pick, M = sup max."""
    # mats: (m, n, n); perms: (k, n)
    k, n = perms.shape
    rows = np.arange(n)
    picks = mats[:, rows[None, :], perms]          # (m, k, n)
    Z = picks.sum(axis=2).max(axis=0)              # (k,)
    S = np.sqrt((picks ** 2).sum(axis=2)).max(axis=0)
    M = np.abs(picks).max(axis=(0, 2))
    return Z, S, M


def hoeffding_supremum_bound(matrices: Sequence[np.ndarray], r: float, n: int,
                             samples: int = 200_000, seed: int = 0) -> HoeffdingBound:
    """Moment bound 4 D sqrt(r) A + 10 D^2 r B_r for Z = sup_a sum_k a_{k sigma(k)}.

    A = E sup_a sqrt(sum_k a_{k sigma(k)}^2) and
    B_r = || max_k sup_a |a_{k sigma(k)}| ||_r are evaluated exactly for
    n <= 6 and by Monte Carlo (with recorded standard errors) otherwise.
    The tail threshold 4e D sqrt(r) A + 10e D^2 r B_r bounds the upper tail
    at level e^{2-r}.
    """
    if not matrices:
        raise ValueError("at least one matrix required")
    if r < 2:
        raise ValueError("r must be >= 2")
    mats = np.stack([np.asarray(a, dtype=float) for a in matrices])
    if mats.shape[1:] != (n, n):
        raise ValueError(f"matrices must be {n} x {n}")
    D = D_SYMMETRIC_GROUP
    if n <= 6:
        perms = np.array(list(itertools.permutations(range(n))))
        _, S, M = _hoeffding_ingredients(mats, perms)
        A = float(S.mean())
        B_r = float((M ** r).mean() ** (1.0 / r))
        method, se_A, se_B, used = "exact", 0.0, 0.0, 0
    else:
        rng = stream(seed, 0x40EF)
        perms = np.stack([rng.permutation(n) for _ in range(samples)])
        _, S, M = _hoeffding_ingredients(mats, perms)
        A = float(S.mean())
        se_A = float(S.std(ddof=1) / math.sqrt(samples))
        mr = M ** r
        B_r = float(mr.mean() ** (1.0 / r))
        se_B = float(mr.std(ddof=1) / math.sqrt(samples))
        method, used = "monte_carlo", samples
    bound = 4.0 * D * math.sqrt(r) * A + 10.0 * D * D * r * B_r
    threshold = math.e * bound
    return HoeffdingBound(r=r, bound=bound, A=A, B_r=B_r,
                          tail_threshold=threshold,
                          tail_level=math.exp(2.0 - r), method=method,
                          stderr_A=se_A, stderr_B=se_B, sample_count=used,
                          seed=seed if method == "monte_carlo" else None)


def sampling_without_replacement_matrices(vectors: Sequence[Sequence[float]],
                                          m: int) -> list[np.ndarray]:
    """Matrices a^x with a^x[i, j] = x_j for i < m and 0 otherwise, encoding
    Z = sup_x sum_{k <= m} x_{I_k} for samples without replacement."""
    out = []
    for x in vectors:
        x = np.asarray(x, dtype=float)
        a = np.zeros((x.size, x.size))
        a[:m, :] = x[None, :]
        out.append(a)
    return out


# ---------------------------------------------------------------------------
# Monte Carlo tail comparison
# ---------------------------------------------------------------------------

@dataclass
class TailReport:
    t_grid: list[float]
    empirical: list[float]
    ci_low: list[float]
    ci_high: list[float]
    bound: list[float]
    dominates: list[bool]
    mean_estimate: float
    sample_count: int
    seed: int

    @property
    def all_dominated(self) -> bool:
        return all(self.dominates)

    def to_json(self) -> dict:
        return dict(self.__dict__, all_dominated=self.all_dominated)

    def rows(self):
        for i, t in enumerate(self.t_grid):
            yield {"t": t, "empirical": self.empirical[i],
                   "ci_low": self.ci_low[i], "ci_high": self.ci_high[i],
                   "bound": self.bound[i], "dominates": self.dominates[i]}


def sample_states(bundle: ModelBundle, size: int, rng: np.random.Generator) -> np.ndarray:
    """Exact categorical draws of state indices from the stationary measure."""
    return AliasSampler(bundle.space.mu).sample(rng, size)


def monte_carlo_tail_compare(bundle: ModelBundle, f, bound_fn: Callable[[float], float],
                             t_grid: Sequence[float], samples: int = 100_000,
                             seed: int = 0, z: float = 3.0) -> TailReport:
    """Empirical upper tail P(f - Ef >= t) with Wilson CIs vs an analytic bound.

    Sampling is exact from the tabulated stationary measure (alias method).
    dominates[i] records bound(t) >= upper CI; a bound above 1 is fine (the
    comparison is still recorded) since moment bounds may be vacuous at
    small t.
    """
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    v = _as_field(bundle, f)
    exact_mean = mean(bundle.space, v)
    rng = stream(seed, 0x7A11)
    idx = sample_states(bundle, samples, rng)
    dev = v[idx] - exact_mean
    emp, lo, hi, bnd, dom = [], [], [], [], []
    for t in t_grid:
        hits = int((dev >= t).sum())
        p = hits / samples
        l, h = wilson_interval(hits, samples, z=z)
        b = float(bound_fn(t))
        emp.append(p)
        lo.append(l)
        hi.append(h)
        bnd.append(b)
        dom.append(b >= h)
    return TailReport(t_grid=list(t_grid), empirical=emp, ci_low=lo, ci_high=hi,
                      bound=bnd, dominates=dom, mean_estimate=exact_mean,
                      sample_count=samples, seed=seed)


def chebyshev_tail_from_moments(t: float, moment_fn: Callable[[float], float],
                                r_grid: Sequence[float]) -> float:
    """min over r of (||(f-Ef)_+||_r / t)^r, the L_r Chebyshev bound."""
    if t <= 0:
        return 1.0
    best = 1.0
    for r in r_grid:
        m = moment_fn(r)
        if m < t:
            best = min(best, (m / t) ** r)
    return best


def glauber_tail_moment_bound(kernel: Kernel, f, rho0: float) -> Callable[[float], float]:
    """r -> K sqrt(r) || sqrt(Gamma_+(f)) ||_r with K = sqrt(3 kappa(0) / rho0),
    the one-sided moment bound for Glauber dynamics at modified log-Sobolev
    constant rho0."""
    space = kernel.space
    v = space.field_check(_as_field_kernel(kernel, f))
    gp = gamma_plus(kernel, v)
    K = math.sqrt(3.0 * KAPPA0 / rho0)

    def moment(r: float) -> float:
        return K * math.sqrt(r) * lr_norm(space, np.sqrt(gp), r)
    return moment


def _as_field_kernel(kernel: Kernel, f):
    if callable(f):
        return np.array([float(f(s)) for s in kernel.space.labels])
    return f
