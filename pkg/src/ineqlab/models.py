"""Constructors for the finite models the estimators are exercised on.

Each constructor returns a ModelBundle: a FiniteSpace + reversible Kernel
pair, the literature's predicted constant bounds as checkable metadata, and
the model parameters echoed back.  Every kernel passes detailed balance by
construction; state enumeration orders are canonical (lexicographic) so
serialized bundles are byte-stable across runs.

Models: Glauber dynamics on product spaces (single-site conditional
resampling), the Ising measure, the hardcore (weighted independent set)
model, the random-transposition interchange process on S_n, multislices,
zero-range processes, and the Dobrushin/exponential-random-graph parameter
calculators.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .constants import (OptimizerOptions, VerificationReport, optimal_beckner_p,
                        optimal_lsi, optimal_mlsi, optimal_poincare)
from .dirichlet import Kernel, ReducibleKernelError, dirichlet_form
from .finite_space import FiniteSpace, entropy
from .util import fsum

MAX_SUPPORT = 100_000


@dataclass(frozen=True)
class PredictedBound:
    """A constant bound predicted for a model, with its literature citation.

    When per_p is set the bound for beckner_p at parameter p is value * p.
    checkable=False marks predictions involving an unspecified universal
    constant; they are reported but excluded from pass/fail checks.
    """

    kind: str                  # poincare | mlsi | lsi | beckner_p | dobrushin_alpha | dobrushin_beta
    relation: str              # "lower" | "upper"
    value: float
    citation: str
    per_p: bool = False
    checkable: bool = True

    def at(self, p: float | None = None) -> float:
        return self.value * p if self.per_p else self.value

    def to_json(self) -> dict:
        return {"kind": self.kind, "relation": self.relation, "value": self.value,
                "citation": self.citation, "per_p": self.per_p,
                "checkable": self.checkable}


@dataclass
class ModelBundle:
    name: str
    space: FiniteSpace
    kernel: Kernel
    predicted: list[PredictedBound] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        kj = self.kernel.to_json()
        return {"model": self.name, "space": kj["space"], "rates": kj["rates"],
                "predicted": [b.to_json() for b in self.predicted],
                "metadata": _jsonable(self.metadata)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# product spaces and Glauber dynamics
# ---------------------------------------------------------------------------

@dataclass
class ProductSpec:
    """A finite product space with either factorized or joint base measure.

    alphabets[i] lists the values coordinate i may take.  Exactly one of
    marginals (per-site distributions; the measure is their product) or
    joint (a map from full configurations to probabilities; its keys are
    the support) must be given.
    """

    alphabets: list[list]
    marginals: list[list[float]] | None = None
    joint: dict[tuple, float] | None = None

    def __post_init__(self):
        if (self.marginals is None) == (self.joint is None):
            raise ValueError("give exactly one of marginals or joint")
        if self.marginals is not None:
            if len(self.marginals) != self.site_count:
                raise ValueError("one marginal per site required")
            for a, m in zip(self.alphabets, self.marginals):
                if len(a) != len(m):
                    raise ValueError("marginal length must match alphabet")
                if any(x <= 0 for x in m):
                    raise ValueError("marginal probabilities must be positive")
                if abs(fsum(np.array(m, dtype=float)) - 1.0) > 1e-9:
                    raise ValueError("marginals must sum to 1")
        else:
            self.joint = {tuple(k): float(v) for k, v in self.joint.items()}
            if any(v <= 0 for v in self.joint.values()):
                raise ValueError("joint probabilities must be positive")
            total = fsum(np.array(list(self.joint.values())))
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"joint sums to {total}, not 1")

    @property
    def site_count(self) -> int:
        return len(self.alphabets)

    def is_product(self) -> bool:
        return self.marginals is not None

    def support(self) -> list[tuple]:
        if self.marginals is not None:
            return sorted(itertools.product(*self.alphabets))
        return sorted(self.joint.keys())

    def prob(self, state: tuple) -> float:
        if self.marginals is not None:
            out = 1.0
            for i, v in enumerate(state):
                out *= self.marginals[i][self.alphabets[i].index(v)]
            return out
        return self.joint.get(tuple(state), 0.0)


def build_glauber(spec: ProductSpec) -> ModelBundle:
    """Single-site conditional-resampling dynamics on a product spec.

    From x, coordinate i is resampled from the conditional law of the
    measure given the other coordinates; the rate to x-with-site-i-set-to-v
    is exactly that conditional probability.  The kernel is reversible by
    construction.  Raises if single-site moves do not connect the support.
    """
    states = spec.support()
    if len(states) > MAX_SUPPORT:
        raise ValueError(f"support of size {len(states)} exceeds {MAX_SUPPORT}")
    index = {s: k for k, s in enumerate(states)}
    mu = np.array([spec.prob(s) for s in states])
    mu = mu / fsum(mu)
    space = FiniteSpace(states, mu)
    triples = []
    n_sites = spec.site_count
    for a, x in enumerate(states):
        for i in range(n_sites):
            neighbor_idx = []
            weights = []
            for v in spec.alphabets[i]:
                y = x[:i] + (v,) + x[i + 1:]
                b = index.get(y)
                if b is not None:
                    neighbor_idx.append(b)
                    weights.append(mu[b])
            norm = math.fsum(weights)
            for b, w in zip(neighbor_idx, weights):
                if b != a:
                    triples.append((a, b, w / norm))
    kernel = Kernel(space, triples)
    kernel.require_irreducible()
    predicted = []
    if spec.is_product():
        predicted.append(PredictedBound(
            "mlsi", "lower", 1.0,
            "entropy tensorization for product measures (Ledoux)"))
        predicted.append(PredictedBound(
            "beckner_p", "lower", 1.0 / 6.0,
            "mLSI-to-Beckner conversion at rho_0 >= 1"))
    return ModelBundle(name="glauber", space=space, kernel=kernel,
                       predicted=predicted,
                       metadata={"site_count": n_sites,
                                 "product_measure": spec.is_product()})


def dobrushin_parameters(spec: ProductSpec) -> tuple[float, float, list[PredictedBound]]:
    """Dobrushin interdependence parameters (alpha, beta) of a product spec.

    alpha = 1 - ||A||_{l2->l2} where A_ij is the worst-case total-variation
    sensitivity of the conditional law at site i to the value at site j.
    beta is the minimum over proper subsets J, sites i not in J, and support
    configurations z of P(X_i = z_i | X_J = z_J).  Both are computed by
    exhaustive enumeration.  When alpha, beta > 0 the approximate
    tensorization bounds rho_0 >= alpha^2 beta and
    rho_1 >= log(2) alpha^2 beta / (2 log(1/beta)) are attached.
    """
    states = spec.support()
    n = spec.site_count
    mu = np.array([spec.prob(s) for s in states])
    mu = mu / fsum(mu)

    # conditional law at site i given the rest: group support by x_{-i}
    def cond_groups(i):
        groups: dict[tuple, list[int]] = {}
        for k, s in enumerate(states):
            key = s[:i] + s[i + 1:]
            groups.setdefault(key, []).append(k)
        out = {}
        for key, idxs in groups.items():
            tot = math.fsum(mu[k] for k in idxs)
            out[key] = {states[k][i]: mu[k] / tot for k in idxs}
        return out

    conds = [cond_groups(i) for i in range(n)]
    A = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            worst = 0.0
            keys = list(conds[i].keys())
            by_rest = {}
            for key in keys:
                # key is x_{-i}; drop coordinate j (position j if j < i else j-1)
                pos = j if j < i else j - 1
                rest = key[:pos] + key[pos + 1:]
                by_rest.setdefault(rest, []).append(key)
            for rest, kk in by_rest.items():
                for k1, k2 in itertools.combinations(kk, 2):
                    d1, d2 = conds[i][k1], conds[i][k2]
                    vals = set(d1) | set(d2)
                    tv = 0.5 * sum(abs(d1.get(v, 0.0) - d2.get(v, 0.0)) for v in vals)
                    worst = max(worst, tv)
            A[i, j] = worst
    alpha = 1.0 - float(np.linalg.norm(A, 2))

    beta = 1.0
    sites = list(range(n))
    for r in range(n):
        for J in itertools.combinations(sites, r):
            Jset = set(J)
            groups: dict[tuple, list[int]] = {}
            for k, s in enumerate(states):
                key = tuple(s[j] for j in J)
                groups.setdefault(key, []).append(k)
            for key, idxs in groups.items():
                tot = math.fsum(mu[k] for k in idxs)
                for i in sites:
                    if i in Jset:
                        continue
                    mass: dict = {}
                    for k in idxs:
                        v = states[k][i]
                        mass[v] = mass.get(v, 0.0) + mu[k]
                    beta = min(beta, min(mass.values()) / tot)

    predicted = []
    if alpha > 0 and beta > 0:
        predicted.append(PredictedBound(
            "mlsi", "lower", alpha * alpha * beta,
            "approximate entropy tensorization under the Dobrushin condition "
            "(Marton; Sambale-Sinulis)"))
        if beta < 1.0:
            predicted.append(PredictedBound(
                "lsi", "lower",
                math.log(2.0) * alpha * alpha * beta / (2.0 * math.log(1.0 / beta)),
                "approximate tensorization (Sambale-Sinulis)"))
    return alpha, beta, predicted


# ---------------------------------------------------------------------------
# Ising
# ---------------------------------------------------------------------------

def build_ising(J: Sequence[Sequence[float]], h: Sequence[float]) -> ModelBundle:
    """Ising measure exp(1/2 sum J_ij e_i e_j - sum h_i e_i)/Z on {-1,+1}^n
    with its Glauber dynamics.  Exact 2^n tabulation; n is capped at 20.
    """
    J = np.asarray(J, dtype=float)
    h = np.asarray(h, dtype=float)
    n = h.size
    if J.shape != (n, n):
        raise ValueError("J must be n x n with n = len(h)")
    if not np.allclose(J, J.T):
        raise ValueError("J must be symmetric")
    if np.any(np.diag(J) != 0.0):
        raise ValueError("J must have zero diagonal")
    if n > 20:
        raise ValueError("n > 20: exact 2^n tabulation refused")
    configs = sorted(itertools.product((-1, 1), repeat=n))
    energies = np.array([0.5 * float(e @ J @ e) - float(h @ e)
                         for e in (np.array(c) for c in configs)])
    energies -= energies.max()
    weights = np.exp(energies)
    Z = fsum(weights)
    joint = {c: float(w / Z) for c, w in zip(configs, weights)}
    spec = ProductSpec(alphabets=[[-1, 1]] * n, joint=joint)
    bundle = build_glauber(spec)
    bundle.name = "ising"
    coupling = float(np.abs(J).sum(axis=1).max())
    bundle.predicted = [PredictedBound(
        "dobrushin_alpha", "lower", 1.0 - coupling,
        "row-sum bound on the Dobrushin matrix for Ising (Goetze-Sambale-Sinulis)")]
    bundle.predicted.append(PredictedBound(
        "dobrushin_beta", "lower", math.exp(-float(np.abs(h).max(initial=0.0))),
        "beta >= c exp(-||h||_inf), universal c unspecified", checkable=False))
    if coupling == 0.0:
        bundle.predicted.append(PredictedBound(
            "mlsi", "lower", 1.0,
            "entropy tensorization for product measures (Ledoux)"))
        bundle.predicted.append(PredictedBound(
            "beckner_p", "lower", 1.0 / 6.0,
            "mLSI-to-Beckner conversion at rho_0 >= 1"))
    bundle.metadata.update({"J": J.tolist(), "h": h.tolist(),
                            "log_Z_shifted": math.log(Z)})
    return bundle


# ---------------------------------------------------------------------------
# hardcore model
# ---------------------------------------------------------------------------

def _independent_sets(n_vertices: int, edges: list[tuple[int, int]]) -> list[tuple]:
    nbr = [0] * n_vertices
    for u, v in edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    out = []

    def rec(i: int, occupied: int, word: tuple):
        if i == n_vertices:
            out.append(word)
            return
        rec(i + 1, occupied, word + (0,))
        if not (nbr[i] & occupied):
            rec(i + 1, occupied | (1 << i), word + (1,))
        if len(out) > MAX_SUPPORT:
            raise ValueError("too many admissible configurations")

    rec(0, 0, ())
    return sorted(out)


def build_hardcore(n_vertices: int, edges: Sequence[Sequence[int]], eta: float) -> ModelBundle:
    """Weighted independent-set measure eta^{#occupied}/Z with its Glauber
    dynamics (free site turns on at rate eta/(1+eta), occupied site turns
    off at rate 1/(1+eta); blocked sites are frozen at 0).
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    edges = [(min(int(u), int(v)), max(int(u), int(v))) for u, v in edges]
    if any(u == v for u, v in edges):
        raise ValueError("simple graph required")
    admissible = _independent_sets(n_vertices, edges)
    weights = np.array([eta ** sum(c) for c in admissible])
    Z = fsum(weights)
    joint = {c: float(w / Z) for c, w in zip(admissible, weights)}
    spec = ProductSpec(alphabets=[[0, 1]] * n_vertices, joint=joint)
    bundle = build_glauber(spec)
    bundle.name = "hardcore"
    degree = np.zeros(n_vertices, dtype=int)
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    delta = int(degree.max(initial=0))
    bundle.predicted = []
    if eta * delta < 1.0:
        bundle.predicted.append(PredictedBound(
            "mlsi", "lower", conforti_bound(eta, delta),
            "independent-set Glauber under eta*Delta < 1 (Conforti), "
            "rescaled by the 1+eta rate normalization"))
    bundle.metadata.update({"n_vertices": n_vertices, "edges": edges, "eta": eta,
                            "max_degree": delta, "Z": float(Z),
                            "n_admissible": len(admissible)})
    return bundle


def conforti_bound(eta: float, max_degree: int) -> float:
    """Lower bound on the modified log-Sobolev constant of hardcore Glauber,
    (1 - eta(Delta-1) + 2 min(eta, 1 - eta Delta)) / (1 + eta), valid for
    eta * Delta < 1."""
    if eta * max_degree >= 1.0:
        raise ValueError("requires eta * max_degree < 1")
    return (1.0 - eta * (max_degree - 1) + 2.0 * min(eta, 1.0 - eta * max_degree)) / (1.0 + eta)


def star_edges(n_rays: int) -> list[tuple[int, int]]:
    return [(0, i) for i in range(1, n_rays + 1)]


@dataclass
class GapReport:
    """Analytic vs computed quantities for the hardcore star's rho0/rho1 gap."""

    n: int
    eta: float
    Z: float
    p_full: float                  # mass of the all-rays-occupied configuration
    ent_analytic: float            # p log(1/p)
    energy_analytic: float         # p n / (1 + eta)
    ent_module: float
    energy_module: float
    rho1_test_function_bound: float   # n / ((1+eta) log(1/p))
    rho1_upper_eta_form: float        # 1 / ((1+eta) log(1/eta))
    rho0_conforti: float
    rho1_est: float | None = None
    rho0_est: float | None = None

    def to_json(self) -> dict:
        return _jsonable(self.__dict__)


def hardcore_star_gap(n: int, eta: float, optimize: bool = False,
                      opts: OptimizerOptions = OptimizerOptions()) -> GapReport:
    """The star graph's log-Sobolev gap: the indicator of the all-rays
    configuration certifies rho_1 <= n/((1+eta) log(1/p)) <= 1/((1+eta) log(1/eta)),
    while rho_0 stays above the degree-based lower bound.

    Analytic entropy and energy of the indicator are cross-checked against
    the module computations to 1e-10; a mismatch raises.
    """
    if eta * n >= 1.0:
        raise ValueError("requires eta * Delta < 1 with Delta = n")
    bundle = build_hardcore(n + 1, star_edges(n), eta)
    Z = eta + (1.0 + eta) ** n
    full = (0,) + (1,) * n
    p = eta ** n / Z
    ent_analytic = p * math.log(1.0 / p)
    energy_analytic = p * n / (1.0 + eta)

    f = np.zeros(bundle.space.n_states)
    f[bundle.space.index_of(full)] = 1.0
    ent_module = entropy(bundle.space, f)
    energy_module = dirichlet_form(bundle.kernel, f, f)
    if abs(ent_module - ent_analytic) > 1e-10 * max(1.0, ent_analytic):
        raise AssertionError(
            f"entropy mismatch: module {ent_module!r} vs analytic {ent_analytic!r}")
    if abs(energy_module - energy_analytic) > 1e-10 * max(1.0, energy_analytic):
        raise AssertionError(
            f"energy mismatch: module {energy_module!r} vs analytic {energy_analytic!r}")

    report = GapReport(
        n=n, eta=eta, Z=Z, p_full=p,
        ent_analytic=ent_analytic, energy_analytic=energy_analytic,
        ent_module=ent_module, energy_module=energy_module,
        rho1_test_function_bound=n / ((1.0 + eta) * math.log(1.0 / p)),
        rho1_upper_eta_form=1.0 / ((1.0 + eta) * math.log(1.0 / eta)),
        rho0_conforti=conforti_bound(eta, n))
    if optimize:
        report.rho1_est = optimal_lsi(bundle.kernel, opts).value
        report.rho0_est = optimal_mlsi(bundle.kernel, opts).value
    return report


# ---------------------------------------------------------------------------
# symmetric group: interchange process and multislices
# ---------------------------------------------------------------------------

def transposition_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def apply_transposition(sigma: tuple, i: int, j: int) -> tuple:
    out = list(sigma)
    out[i], out[j] = out[j], out[i]
    return tuple(out)


def build_interchange(n: int) -> ModelBundle:
    """Random transpositions on S_n: each unordered pair of positions is
    swapped at rate 2/(n(n-1)); the uniform measure is stationary."""
    if not (2 <= n <= 6):
        raise ValueError("n must lie in [2, 6] (n! states)")
    states = sorted(itertools.permutations(range(n)))
    index = {s: k for k, s in enumerate(states)}
    rate = 2.0 / (n * (n - 1))
    triples = []
    for a, sigma in enumerate(states):
        for i, j in transposition_pairs(n):
            b = index[apply_transposition(sigma, i, j)]
            triples.append((a, b, rate))
    space = FiniteSpace(states, np.full(len(states), 1.0 / len(states)))
    kernel = Kernel(space, triples)
    predicted = [
        PredictedBound("mlsi", "lower", 1.0 / (n - 1),
                       "random transpositions (Gao-Quastel; Bobkov-Tetali)"),
        PredictedBound("beckner_p", "lower", (n + 2.0) / (2.0 * n * (n - 1)),
                       "random transpositions (Bobkov-Tetali)", per_p=True),
        PredictedBound("poincare", "lower", (n + 2.0) / (n * (n - 1.0)),
                       "random transpositions spectral gap (Diaconis-Shahshahani)"),
    ]
    return ModelBundle(name="interchange", space=space, kernel=kernel,
                       predicted=predicted, metadata={"n": n})


def build_multislice(n: int, kappa: Sequence[int]) -> ModelBundle:
    """Uniform measure on words in {0..l-1}^n with value i appearing
    kappa[i] times, under the pair-swap dynamics at rate 2/(n(n-1)) per
    unordered position pair (the interchange process projected through
    coordinate labels)."""
    kappa = [int(k) for k in kappa]
    if any(k <= 0 for k in kappa):
        raise ValueError("composition parts must be positive")
    if sum(kappa) != n:
        raise ValueError(f"composition must sum to n = {n}")
    word = tuple(v for v, k in enumerate(kappa) for _ in range(k))
    states = sorted(set(itertools.permutations(word)))
    if len(states) > MAX_SUPPORT:
        raise ValueError("multislice too large")
    index = {s: k for k, s in enumerate(states)}
    rate = 2.0 / (n * (n - 1))
    triples = []
    for a, x in enumerate(states):
        for i, j in transposition_pairs(n):
            if x[i] != x[j]:
                b = index[apply_transposition(x, i, j)]
                triples.append((a, b, rate))
    space = FiniteSpace(states, np.full(len(states), 1.0 / len(states)))
    kernel = Kernel(space, triples)
    predicted = [
        PredictedBound("mlsi", "lower", 1.0 / (n - 1),
                       "projection of the random-transposition bound "
                       "(Gao-Quastel; Bobkov-Tetali)"),
        PredictedBound("beckner_p", "lower", (n + 2.0) / (2.0 * n * (n - 1)),
                       "projection of the random-transposition bound (Bobkov-Tetali)",
                       per_p=True),
    ]
    return ModelBundle(name="multislice", space=space, kernel=kernel,
                       predicted=predicted, metadata={"n": n, "kappa": kappa})


# ---------------------------------------------------------------------------
# zero-range processes
# ---------------------------------------------------------------------------

def _compositions(m: int, n: int):
    if n == 1:
        yield (m,)
        return
    for head in range(m, -1, -1):
        for tail in _compositions(m - head, n - 1):
            yield (head,) + tail


def build_zero_range(m: int, n: int, rates: Sequence[Sequence[float]] | str,
                     p: Sequence[float]) -> ModelBundle:
    """Zero-range process: m particles on n sites; a particle leaves site i
    at rate rates[i][x_i] and lands on site j with probability p[j].

    rates may be the string "linear" for rates[i][l] = l (independent
    walkers).  The stationary measure prod_i p_i^{x_i} / (rates_i(1) ...
    rates_i(x_i)) / Z is tabulated exactly on the simplex of occupation
    vectors.  When the rate increments stay in [delta, Delta] the bounds
    rho_0 >= delta^2/(2 Delta) and alpha_p >= delta^2/(12 Delta) attach.
    """
    if n < 2:
        raise ValueError("n >= 2 sites required: with one site there are no moves")
    if m < 1:
        raise ValueError("at least one particle required")
    if rates == "linear":
        lam = [[float(l) for l in range(m + 1)] for _ in range(n)]
    else:
        lam = [[float(x) for x in row] for row in rates]
        if len(lam) != n or any(len(row) != m + 1 for row in lam):
            raise ValueError("rates must be n rows of m+1 values")
    for row in lam:
        if row[0] != 0.0:
            raise ValueError("rates[i][0] must be 0")
        if any(x <= 0 for x in row[1:]):
            raise ValueError("rates[i][l] must be positive for l >= 1")
    p = np.asarray(p, dtype=float)
    if p.shape != (n,) or np.any(p <= 0) or abs(fsum(p) - 1.0) > 1e-9:
        raise ValueError("p must be a positive probability vector of length n")

    states = sorted(_compositions(m, n))
    if len(states) > MAX_SUPPORT:
        raise ValueError("occupation simplex too large")
    index = {s: k for k, s in enumerate(states)}
    logw = np.empty(len(states))
    for k, x in enumerate(states):
        lw = 0.0
        for i, xi in enumerate(x):
            lw += xi * math.log(p[i])
            for l in range(1, xi + 1):
                lw -= math.log(lam[i][l])
        logw[k] = lw
    logw -= logw.max()
    w = np.exp(logw)
    mu = w / fsum(w)
    space = FiniteSpace(states, mu)

    triples = []
    for a, x in enumerate(states):
        for i in range(n):
            if x[i] == 0:
                continue
            for j in range(n):
                if j == i:
                    continue
                y = list(x)
                y[i] -= 1
                y[j] += 1
                b = index[tuple(y)]
                triples.append((a, b, lam[i][x[i]] * p[j]))
    kernel = Kernel(space, triples)

    increments = [row[l + 1] - row[l] for row in lam for l in range(m)]
    delta, Delta = min(increments), max(increments)
    predicted = []
    if delta > 0:
        predicted.append(PredictedBound(
            "mlsi", "lower", delta * delta / (2.0 * Delta),
            "zero-range with uniformly increasing rates (Hermon-Salez)"))
        predicted.append(PredictedBound(
            "beckner_p", "lower", delta * delta / (12.0 * Delta),
            "mLSI-to-Beckner conversion of the Hermon-Salez bound"))
    return ModelBundle(name="zero_range", space=space, kernel=kernel,
                       predicted=predicted,
                       metadata={"m": m, "n": n, "delta": delta, "Delta": Delta,
                                 "p": p.tolist()})


# ---------------------------------------------------------------------------
# exponential random graphs: parameter calculator
# ---------------------------------------------------------------------------

@dataclass
class ErgDeltaReport:
    delta: float
    predicted: list[PredictedBound]

    def to_json(self) -> dict:
        return {"delta": self.delta,
                "predicted": [b.to_json() for b in self.predicted]}


def erg_graph_delta(gammas: Sequence[float],
                    subgraph_edge_counts: Sequence[int]) -> ErgDeltaReport:
    """delta = 1/2 sum_{i>=2} |gamma_i| |E_i| (|E_i| - 1) for an exponential
    random graph with weights gamma on subgraphs with the given edge counts
    (the first subgraph is the single edge by convention).  delta < 1 yields
    the Dobrushin-regime predictions alpha >= 1 - delta and
    beta >= c exp(-2|gamma_1|) with c unspecified."""
    gammas = [float(g) for g in gammas]
    counts = [int(c) for c in subgraph_edge_counts]
    if len(gammas) != len(counts):
        raise ValueError("one edge count per gamma required")
    if counts and counts[0] != 1:
        raise ValueError("first subgraph must be the single edge (|E_1| = 1)")
    if any(c <= 1 for c in counts[1:]):
        raise ValueError("higher subgraphs must have at least 2 edges")
    delta = 0.5 * sum(abs(g) * e * (e - 1.0) for g, e in zip(gammas[1:], counts[1:]))
    predicted = []
    if delta < 1.0:
        predicted.append(PredictedBound(
            "dobrushin_alpha", "lower", 1.0 - delta,
            "exponential random graphs in the sub-critical regime (Sambale-Sinulis)"))
        predicted.append(PredictedBound(
            "dobrushin_beta", "lower",
            math.exp(-2.0 * abs(gammas[0])) if gammas else 1.0,
            "beta >= c exp(-2|gamma_1|), universal c unspecified", checkable=False))
    return ErgDeltaReport(delta=delta, predicted=predicted)


def build_erg(gammas: Sequence[float], subgraphs: Sequence[Sequence[Sequence[int]]],
              n_vertices: int) -> ModelBundle:
    """Exact exponential-random-graph measure on graphs over n_vertices <= 5
    (state count 2^{n(n-1)/2}), via build_glauber on the edge indicators.

    subgraphs[i] is an edge list on vertices {0, .., k-1}; the Hamiltonian is
    n^2 sum_i gamma_i N_i(x) / n^{|V_i|} with N_i the injective homomorphism
    count.
    """
    if n_vertices > 5:
        raise ValueError("exact ERG tabulation limited to n <= 5 vertices")
    pairs = list(itertools.combinations(range(n_vertices), 2))
    pair_idx = {e: k for k, e in enumerate(pairs)}
    m = len(pairs)
    subgraph_data = []
    for sg in subgraphs:
        edges = [(min(u, v), max(u, v)) for u, v in sg]
        verts = sorted({v for e in edges for v in e})
        subgraph_data.append((edges, len(verts)))
    configs = sorted(itertools.product((0, 1), repeat=m))
    energies = np.empty(len(configs))
    for k, x in enumerate(configs):
        adj = np.zeros((n_vertices, n_vertices), dtype=bool)
        for e, bit in zip(pairs, x):
            if bit:
                adj[e[0], e[1]] = adj[e[1], e[0]] = True
        ham = 0.0
        for gamma, (edges, nv) in zip(gammas, subgraph_data):
            count = 0
            for im in itertools.permutations(range(n_vertices), nv):
                if all(adj[im[u], im[v]] for u, v in edges):
                    count += 1
            ham += gamma * count / float(n_vertices ** nv)
        energies[k] = -(n_vertices ** 2) * ham
    energies -= energies.min()
    weights = np.exp(-energies)
    Z = fsum(weights)
    joint = {c: float(w / Z) for c, w in zip(configs, weights)}
    spec = ProductSpec(alphabets=[[0, 1]] * m, joint=joint)
    bundle = build_glauber(spec)
    bundle.name = "erg"
    edge_counts = [len(sg) for sg, _ in subgraph_data]
    bundle.predicted = erg_graph_delta(list(gammas), edge_counts).predicted
    bundle.metadata.update({"n_vertices": n_vertices, "gammas": list(gammas),
                            "edge_counts": edge_counts})
    return bundle


# ---------------------------------------------------------------------------
# generic Metropolis kernel on a neighborhood relation
# ---------------------------------------------------------------------------

def metropolis_kernel(space: FiniteSpace, neighbor_pairs: Sequence[Sequence[int]],
                      normalization: float = 1.0) -> Kernel:
    """Metropolis rates normalization * min(1, mu(y)/mu(x)) on a symmetric
    neighbor relation; reversible for any normalization > 0.

    The normalization is a free parameter (single-coordinate-move chains
    are often run at 1/(2kn); the choice rescales every constant linearly).
    """
    if normalization <= 0:
        raise ValueError("normalization must be positive")
    mu = space.mu
    triples = []
    seen = set()
    for a, b in neighbor_pairs:
        a, b = int(a), int(b)
        if a == b or (a, b) in seen:
            continue
        seen.add((a, b))
        seen.add((b, a))
        triples.append((a, b, normalization * min(1.0, mu[b] / mu[a])))
        triples.append((b, a, normalization * min(1.0, mu[a] / mu[b])))
    return Kernel(space, triples)


# ---------------------------------------------------------------------------
# prediction checking and the JSON model registry
# ---------------------------------------------------------------------------

def check_predictions(bundle: ModelBundle, opts: OptimizerOptions = OptimizerOptions(),
                      p_grid: Sequence[float] = (1.2, 2.0)) -> VerificationReport:
    """Verify every checkable predicted bound against estimator output.

    Lower bounds must sit below the (upper-biased) estimates within slack;
    estimator tightness is what is being exercised for upper bounds.
    """
    report = VerificationReport()
    report.constants["model"] = bundle.name
    for bound in bundle.predicted:
        if not bound.checkable:
            continue
        if bound.kind == "poincare":
            est = optimal_poincare(bundle.kernel).value
        elif bound.kind == "mlsi":
            est = optimal_mlsi(bundle.kernel, opts).value
        elif bound.kind == "lsi":
            est = optimal_lsi(bundle.kernel, opts).value
        elif bound.kind == "beckner_p":
            for p in p_grid:
                est = optimal_beckner_p(bundle.kernel, p, opts).value
                if bound.relation == "lower":
                    report.add(f"{bundle.name}:beckner_{p}>= {bound.at(p):.6g}",
                               est, bound.at(p), citation=bound.citation)
            continue
        else:
            continue
        if bound.relation == "lower":
            report.add(f"{bundle.name}:{bound.kind}>={bound.value:.6g}",
                       est, bound.value, citation=bound.citation)
        else:
            # upper bounds flip roles: bound must exceed estimate minus slack
            report.add(f"{bundle.name}:{bound.kind}<={bound.value:.6g}",
                       bound.value, est, citation=bound.citation)
    return report


def two_point_bundle(p1: float = 0.5) -> ModelBundle:
    space = FiniteSpace(["0", "1"], [1.0 - p1, p1])
    kernel = Kernel(space, [(0, 1, 2.0 * p1), (1, 0, 2.0 * (1.0 - p1))])
    return ModelBundle(name="two_point", space=space, kernel=kernel,
                       metadata={"p1": p1})


def model_from_json(spec: dict) -> ModelBundle:
    """Build a bundle from {"model": name, "params": {...}}."""
    name = spec.get("model")
    params = spec.get("params", {})
    if name == "glauber":
        joint = params.get("joint")
        if joint is not None:
            # JSON form: list of [configuration, probability] pairs
            joint = {tuple(k): float(v) for k, v in joint}
            pspec = ProductSpec(alphabets=params["alphabets"], joint=joint)
        else:
            pspec = ProductSpec(alphabets=params["alphabets"],
                                marginals=params["marginals"])
        return build_glauber(pspec)
    if name == "ising":
        return build_ising(params["J"], params["h"])
    if name == "hardcore":
        return build_hardcore(params["n_vertices"], params["edges"], params["eta"])
    if name == "interchange":
        return build_interchange(params["n"])
    if name == "multislice":
        return build_multislice(params["n"], params["kappa"])
    if name == "zero_range":
        return build_zero_range(params["m"], params["n"], params.get("rates", "linear"),
                                params["p"])
    if name == "erg":
        return build_erg(params["gammas"], params["subgraphs"], params["n_vertices"])
    if name == "two_point":
        return two_point_bundle(params.get("p1", 0.5))
    if name == "random_chain":
        from .dirichlet import random_reversible_kernel
        kernel = random_reversible_kernel(params["n"], params.get("seed", 0),
                                          params.get("extra_edges", 2))
        return ModelBundle(name="random_chain", space=kernel.space, kernel=kernel,
                           metadata=params)
    raise ValueError(f"unknown model {name!r}")


MODEL_NAMES = ("glauber", "ising", "hardcore", "interchange", "multislice",
               "zero_range", "erg", "two_point", "random_chain")
