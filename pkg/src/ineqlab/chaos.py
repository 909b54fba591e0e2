"""Partition norms of d-tensors and the higher-order tail calculators.

For a partition P = {B_1, .., B_k} of the axis set {1, .., d}, the partition
norm of a d-indexed array A is

    ||A||_P = sup { sum_i a_i prod_l x^l_{i_{B_l}} : ||x^l||_2 <= 1 },

the supremum running over one unit vector per block, each indexed by the
block's multi-index.  The single-block norm is the flattened Euclidean
norm; {1}{2} on a matrix is the spectral norm.  Mixed cases are computed by
multi-start alternating maximization (a certified lower bound; the
Frobenius norm is the accompanying crude upper bound).

Moments of decoupled Gaussian chaos obey, up to a constant depending only
on the order,

    || <A, G_1 x .. x G_d> ||_r  <=  C_d sum_P r^{|P|/2} ||A||_P,

and combining with a subgaussian-type moment profile for a measure yields
tail bounds for functions with bounded higher-order discrete derivatives
and for tetrahedral polynomials.  Universal constants are never invented
here: every bound-returning function takes them as parameters, and the
calibration helpers compute the smallest constant valid on a seeded family.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .finite_space import lr_norm, mean
from .models import ModelBundle
from .util import stream

MAX_ORDER = 4
_AXIS_LETTERS = "abcdefgh"


@dataclass(frozen=True)
class IndexedTensor:
    """Dense real array over [n]^d, 1 <= d <= 4."""

    order: int
    dim: int
    entries: np.ndarray = field(repr=False)

    def __init__(self, entries: np.ndarray):
        arr = np.asarray(entries, dtype=float)
        if arr.ndim < 1 or arr.ndim > MAX_ORDER:
            raise ValueError(f"order must lie in [1, {MAX_ORDER}]")
        dims = set(arr.shape)
        if len(dims) != 1:
            raise ValueError("all axes must have equal length")
        if not np.isfinite(arr).all():
            raise ValueError("entries must be finite")
        object.__setattr__(self, "order", arr.ndim)
        object.__setattr__(self, "dim", arr.shape[0])
        object.__setattr__(self, "entries", arr)

    def to_json(self) -> dict:
        return {"order": self.order, "dim": self.dim,
                "entries": self.entries.ravel().tolist()}

    @classmethod
    def from_json(cls, obj: dict | str) -> "IndexedTensor":
        if isinstance(obj, str):
            obj = json.loads(obj)
        d, n = int(obj["order"]), int(obj["dim"])
        arr = np.asarray(obj["entries"], dtype=float).reshape((n,) * d)
        return cls(arr)


Partition = tuple[tuple[int, ...], ...]


def canonical_partition(blocks: Sequence[Sequence[int]]) -> Partition:
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))


def validate_partition(part: Partition, d: int) -> Partition:
    part = canonical_partition(part)
    flat = [i for b in part for i in b]
    if not part or any(len(b) == 0 for b in part):
        raise ValueError("blocks must be nonempty")
    if sorted(flat) != list(range(1, d + 1)):
        raise ValueError(f"blocks must partition {{1..{d}}}, got {part}")
    return part


def enumerate_partitions(d: int) -> list[Partition]:
    """All set partitions of {1..d}, Bell(d) many (1, 2, 5, 15)."""
    if not (1 <= d <= MAX_ORDER):
        raise ValueError(f"d must lie in [1, {MAX_ORDER}]")
    parts: list[list[list[int]]] = [[[1]]]
    for item in range(2, d + 1):
        grown = []
        for p in parts:
            for i in range(len(p)):
                q = [list(b) for b in p]
                q[i].append(item)
                grown.append(q)
            grown.append([list(b) for b in p] + [[item]])
        parts = grown
    return [canonical_partition(p) for p in parts]


@dataclass(frozen=True)
class PartitionNormResult:
    value: float
    method: str                 # "frobenius" | "svd" | "alternating"
    certified_lower_bound: bool  # alternating maximization certifies >= only
    frobenius_upper: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class AltMaxOptions:
    n_starts: int = 64
    max_sweeps: int = 500
    tol: float = 1e-10
    seed: int = 0
    method: str = "auto"        # "auto" | "alternating"


def partition_norm(A: IndexedTensor, part: Sequence[Sequence[int]],
                   opts: AltMaxOptions = AltMaxOptions()) -> PartitionNormResult:
    """||A||_P: exact closed forms where they exist, alternating maximization
    otherwise (with the Frobenius norm recorded as an upper bound)."""
    part = validate_partition(tuple(tuple(b) for b in part), A.order)
    fro = float(np.linalg.norm(A.entries.ravel()))
    if opts.method == "auto":
        if len(part) == 1:
            return PartitionNormResult(fro, "frobenius", False, fro)
        if A.order == 2 and len(part) == 2:
            s = float(np.linalg.svd(A.entries, compute_uv=False)[0])
            return PartitionNormResult(s, "svd", False, fro)
    value = _alternating_maximization(A.entries, part, opts)
    return PartitionNormResult(value, "alternating", True, fro)


def _block_shapes(part: Partition, n: int) -> list[tuple[int, ...]]:
    return [(n,) * len(b) for b in part]


def _contract_all_but(A: np.ndarray, part: Partition, vecs: list[np.ndarray],
                      skip: int) -> np.ndarray:
    """Contract A with every block vector except block `skip`."""
    subs_A = "".join(_AXIS_LETTERS[i - 1] for b in part for i in b)
    # reorder A axes to the concatenated block order once per call
    perm = [i - 1 for b in part for i in b]
    operands = [A.transpose(perm)]
    subs = [subs_A]
    pos = 0
    out_sub = ""
    for l, b in enumerate(part):
        block_sub = subs_A[pos:pos + len(b)]
        pos += len(b)
        if l == skip:
            out_sub = block_sub
        else:
            operands.append(vecs[l])
            subs.append(block_sub)
    expr = ",".join(subs) + "->" + out_sub
    return np.einsum(expr, *operands)


def _alternating_maximization(A: np.ndarray, part: Partition,
                              opts: AltMaxOptions) -> float:
    n = A.shape[0]
    shapes = _block_shapes(part, n)
    k = len(part)

    def run(start_vecs):
        vecs = [v / np.linalg.norm(v.ravel()) for v in start_vecs]
        best = -math.inf
        flat_count = 0
        for _ in range(opts.max_sweeps):
            for l in range(k):
                t = _contract_all_but(A, part, vecs, l)
                norm = float(np.linalg.norm(t.ravel()))
                if norm == 0.0:
                    return 0.0, vecs
                vecs[l] = t / norm
            val = norm
            if val <= best * (1.0 + opts.tol):
                flat_count += 1
                if flat_count >= 3:
                    best = max(best, val)
                    break
            else:
                flat_count = 0
            best = max(best, val)
        return best, vecs

    candidates = []
    # deterministic warm start: dominant singular vectors of each unfolding
    warm = []
    for l, b in enumerate(part):
        axes = [i - 1 for i in b]
        rest = [i for i in range(A.ndim) if i not in axes]
        mat = A.transpose(axes + rest).reshape(n ** len(b), -1)
        try:
            u, _, _ = np.linalg.svd(mat, full_matrices=False)
            warm.append(u[:, 0].reshape(shapes[l]))
        except np.linalg.LinAlgError:
            warm.append(np.ones(shapes[l]))
    candidates.append(warm)
    for s in range(opts.n_starts):
        rng = stream(opts.seed, 0xA17, s)
        candidates.append([rng.standard_normal(shape) for shape in shapes])

    best_val = 0.0
    best_key = None
    for cand in candidates:
        val, vecs = run(cand)
        key = tuple(np.round(np.concatenate([v.ravel() for v in vecs]), 12))
        if val > best_val + 1e-15 or (abs(val - best_val) <= 1e-15
                                      and (best_key is None or key < best_key)):
            best_val, best_key = val, key
    return float(best_val)


# ---------------------------------------------------------------------------
# Gaussian chaos
# ---------------------------------------------------------------------------

def all_partition_norms(A: IndexedTensor,
                        opts: AltMaxOptions = AltMaxOptions()) -> dict[Partition, float]:
    return {part: partition_norm(A, part, opts).value
            for part in enumerate_partitions(A.order)}


def chaos_moment_bound(A: IndexedTensor, r: float, C_k: float,
                       norms: Mapping[Partition, float] | None = None) -> float:
    """C_k sum over partitions P of r^{|P|/2} ||A||_P: the decoupled Gaussian
    chaos moment envelope.  C_k is caller-supplied (calibrate it; the true
    universal constant is existential)."""
    if r < 2:
        raise ValueError("r must be >= 2")
    if C_k <= 0:
        raise ValueError("C_k must be positive")
    if norms is None:
        norms = all_partition_norms(A)
    return C_k * sum(r ** (len(p) / 2.0) * norms[p] for p in enumerate_partitions(A.order))


def sample_chaos(A: IndexedTensor, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Draws of <A, G_1 x .. x G_d> with independent standard Gaussian vectors."""
    d, n = A.order, A.dim
    gs = [rng.standard_normal((samples, n)) for _ in range(d)]
    subs = ",".join(f"s{_AXIS_LETTERS[i]}" for i in range(d))
    expr = f"{subs},{''.join(_AXIS_LETTERS[:d])}->s"
    return np.einsum(expr, *gs, A.entries)


@dataclass
class ChaosCalibration:
    constant: float
    order: int
    r_values: list[float]
    n_tensors: int
    samples: int
    family_seed: int
    mc_seed: int
    worst_case: dict

    def to_json(self) -> dict:
        return dict(self.__dict__)


def calibrate_chaos_constant(order: int, dim: int, n_tensors: int,
                             r_values: Sequence[float], samples: int = 100_000,
                             family_seed: int = 0, mc_seed: int = 1,
                             opts: AltMaxOptions = AltMaxOptions()) -> ChaosCalibration:
    """Smallest C making the chaos moment envelope dominate MC moment
    estimates (upper CI) across a seeded Gaussian tensor family."""
    worst = {"ratio": 0.0}
    for t in range(n_tensors):
        rng_t = stream(family_seed, 0xCA1, t)
        A = IndexedTensor(rng_t.standard_normal((dim,) * order))
        norms = all_partition_norms(A, opts)
        draws = sample_chaos(A, samples, stream(mc_seed, 0xCA2, t))
        absd = np.abs(draws)
        for r in r_values:
            powed = absd ** r
            m = float(powed.mean())
            se = float(powed.std(ddof=1) / math.sqrt(samples))
            upper = (m + 3.0 * se) ** (1.0 / r)
            envelope = sum(r ** (len(p) / 2.0) * norms[p]
                           for p in enumerate_partitions(order))
            ratio = upper / envelope
            if ratio > worst["ratio"]:
                worst = {"ratio": ratio, "tensor": t, "r": r,
                         "mc_upper": upper, "envelope": envelope}
    return ChaosCalibration(constant=worst["ratio"], order=order,
                            r_values=list(r_values), n_tensors=n_tensors,
                            samples=samples, family_seed=family_seed,
                            mc_seed=mc_seed, worst_case=worst)


# ---------------------------------------------------------------------------
# tail calculators
# ---------------------------------------------------------------------------

@dataclass
class TailParameters:
    """Inputs of the higher-order tail bound for a d-times differentiable f.

    Requires the moment profile ||g - Eg||_r <= M r^gamma || |Dg| ||_r on the
    gradient class.  expected_tensors[k-1] is E D^k f for k < d; top_order
    is the order-d tensor itself when constant (tetrahedral case) or a
    mapping partition -> sup-norm value otherwise.
    """

    M: float
    gamma: float
    expected_tensors: list[IndexedTensor]
    top_order: IndexedTensor | Mapping[Partition, float]

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("M must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    @property
    def d(self) -> int:
        if isinstance(self.top_order, IndexedTensor):
            return self.top_order.order
        return max(len([i for b in p for i in b]) for p in self.top_order)


def _eta_term(t: float, scale: float, exponent_den: float) -> float:
    if scale == 0.0:
        return math.inf
    if exponent_den <= 0:
        raise ValueError("degenerate exponent: require (2 gamma - 1) k + |P| > 0")
    return (t / scale) ** (2.0 / exponent_den)


def higher_order_tail(params: TailParameters, t: float, C_d_prime: float) -> float:
    """2 exp(-eta_f(t) / C'_d) with

    eta_f(t) = min over the top order d and partitions P of
               (t / (M^d sup||D^d f||_P))^{2 / ((2 gamma - 1) d + |P|)}
           and over k < d, P in P_k of
               (t / (M^k ||E D^k f||_P))^{2 / ((2 gamma - 1) k + |P|)}.

    At gamma = 1/2 and d = 2 this is the Hanson-Wright shape
    min(t^2 / ||H||_HS^2, t / ||H||_op) up to the first-order term.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if C_d_prime <= 0:
        raise ValueError("C_d_prime must be positive")
    d = params.d
    eta = math.inf
    if isinstance(params.top_order, IndexedTensor):
        norms = all_partition_norms(params.top_order)
        top = {p: norms[p] for p in norms}
    else:
        top = {validate_partition(p, d): v for p, v in params.top_order.items()}
    for p, nv in top.items():
        eta = min(eta, _eta_term(t, params.M ** d * nv,
                                 (2.0 * params.gamma - 1.0) * d + len(p)))
    for k, tensor in enumerate(params.expected_tensors, start=1):
        if k >= d:
            break
        if tensor is None:
            continue
        norms = all_partition_norms(tensor)
        for p, nv in norms.items():
            eta = min(eta, _eta_term(t, params.M ** k * nv,
                                     (2.0 * params.gamma - 1.0) * k + len(p)))
    if math.isinf(eta):
        return 0.0
    return 2.0 * math.exp(-eta / C_d_prime)


def polynomial_tail_bound(rho0: float, expected_gradients: Sequence[IndexedTensor],
                          t: float, C_d: float) -> float:
    """Tail bound for tetrahedral polynomials of degree d under a modified
    log-Sobolev constant rho0:

    2 exp(-(1/C_d) min_{1<=k<=d} min_{P in P_k}
          ((rho0^{k/2} t) / ||E grad^k f||_P)^{2/|P|}).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if rho0 <= 0 or C_d <= 0:
        raise ValueError("rho0 and C_d must be positive")
    eta = math.inf
    for k, tensor in enumerate(expected_gradients, start=1):
        if tensor is None:
            continue
        norms = all_partition_norms(tensor)
        for p, nv in norms.items():
            if nv == 0.0:
                continue
            eta = min(eta, (rho0 ** (k / 2.0) * t / nv) ** (2.0 / len(p)))
    if math.isinf(eta):
        return 0.0
    return 2.0 * math.exp(-eta / C_d)


def triangle_count_tail_bound(n: int, rho0: float, edge_prob: float,
                              cherry_prob: float, t: float, C: float) -> float:
    """Specialized triangle-count tail for exchangeable random graphs: with
    A = P(edge), B = P(cherry),

    2 exp(-(1/C) min( t^2 / (n^3 (rho0^-3 + rho0^-2 A^2) + n^4 rho0^-1 B^2),
                      t / (sqrt(n) rho0^-3/2 + n rho0^-1 A),
                      t^{2/3} / rho0^-1 )).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    inv = 1.0 / rho0
    variance_proxy = n ** 3 * (inv ** 3 + inv ** 2 * edge_prob ** 2) \
        + n ** 4 * inv * cherry_prob ** 2
    linear_proxy = math.sqrt(n) * inv ** 1.5 + n * inv * edge_prob
    eta = min(t * t / variance_proxy, t / linear_proxy, t ** (2.0 / 3.0) / inv)
    return 2.0 * math.exp(-eta / C)


# ---------------------------------------------------------------------------
# discrete gradients on binary product spaces
# ---------------------------------------------------------------------------

class CubeGradients:
    """Oriented-edge discrete derivatives on a full binary product space.

    For site i with alphabet {lo, hi} (lexicographic order), D_i f(x) =
    f(x with site i = hi) - f(x with site i = lo); the value does not depend
    on x_i, D_i D_i f = 0, and on {-1,+1}^n the operator equals twice the
    usual partial derivative of the multilinear representation.
    """

    def __init__(self, bundle: ModelBundle):
        labels = bundle.space.labels
        self.space = bundle.space
        n_sites = len(labels[0])
        alphabets = [sorted({x[i] for x in labels}) for i in range(n_sites)]
        if any(len(a) != 2 for a in alphabets):
            raise ValueError("binary alphabets required")
        if len(labels) != 2 ** n_sites:
            raise ValueError("full product support required")
        self.n_sites = n_sites
        index = {x: k for k, x in enumerate(labels)}
        self.hi_idx = np.empty((n_sites, len(labels)), dtype=np.int64)
        self.lo_idx = np.empty((n_sites, len(labels)), dtype=np.int64)
        for i in range(n_sites):
            lo, hi = alphabets[i]
            for k, x in enumerate(labels):
                self.hi_idx[i, k] = index[x[:i] + (hi,) + x[i + 1:]]
                self.lo_idx[i, k] = index[x[:i] + (lo,) + x[i + 1:]]

    def apply(self, f: np.ndarray, site: int) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return f[self.hi_idx[site]] - f[self.lo_idx[site]]

    def derivative_field(self, f: np.ndarray, sites: Sequence[int]) -> np.ndarray:
        out = np.asarray(f, dtype=float)
        for s in sites:
            out = self.apply(out, s)
        return out

    def tensor_field(self, f: np.ndarray, order: int) -> np.ndarray:
        """All order-k derivatives: array of shape (n,)*k + (n_states,)."""
        n = self.n_sites
        out = np.zeros((n,) * order + (len(self.space.labels),))
        for sites in itertools.product(range(n), repeat=order):
            if len(set(sites)) < len(sites):
                continue  # repeated site: derivative vanishes
            out[sites] = self.derivative_field(f, sites)
        return out

    def expected_tensor(self, f: np.ndarray, order: int) -> IndexedTensor:
        field_all = self.tensor_field(f, order)
        return IndexedTensor(field_all @ self.space.mu)

    def constant_tensor(self, f: np.ndarray, order: int,
                        tol: float = 1e-10) -> IndexedTensor:
        """The order-k derivative tensor when it is state-independent
        (degree-k tetrahedral polynomials); raises otherwise."""
        field_all = self.tensor_field(f, order)
        spread = np.abs(field_all - field_all[..., :1]).max()
        if spread > tol:
            raise ValueError(
                f"order-{order} derivative varies across states (spread {spread:.3e})")
        return IndexedTensor(field_all[..., 0])


def moment_decomposition_bound(bundle: ModelBundle, f, K: float, r: float, d: int,
                               C: float, C_k: float = 1.0) -> dict:
    """Assembled moment bound for an observable on an enumerable binary
    product model:

        sum_{k<d} (C^k K^k / r^{k/2}) * ChaosEnvelope_r(E D^k f)
        + (C^d K^d / r^{d/2}) * ChaosEnvelope_r(D^d f)

    where ChaosEnvelope is chaos_moment_bound with constant C_k and the top
    tensor must be state-independent (tetrahedral f of degree <= d).
    Returns the bound, the per-order terms, and the exact ||f - Ef||_r for
    comparison.
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    grads = CubeGradients(bundle)
    v = bundle.space.field_check(
        np.array([float(f(s)) for s in bundle.space.labels]) if callable(f) else f)
    terms = []
    for k in range(1, d):
        tensor = grads.expected_tensor(v, k)
        terms.append((C * K) ** k / r ** (k / 2.0)
                     * chaos_moment_bound(tensor, r, C_k))
    top = grads.constant_tensor(v, d)
    terms.append((C * K) ** d / r ** (d / 2.0) * chaos_moment_bound(top, r, C_k))
    exact = lr_norm(bundle.space, v - mean(bundle.space, v), r)
    return {"bound": float(sum(terms)), "terms": [float(x) for x in terms],
            "exact_moment": float(exact), "r": r, "d": d, "K": K, "C": C,
            "C_k": C_k}


def calibrate_decomposition_constant(bundle: ModelBundle, observables: Sequence,
                                     K: float, d: int, r_values: Sequence[float],
                                     C_k: float = 1.0) -> float:
    """Smallest chain constant C making the decomposition bound dominate the
    exact moments for every observable and r in the family (bisection; the
    bound is increasing in C)."""
    def valid(C):
        for f in observables:
            for r in r_values:
                res = moment_decomposition_bound(bundle, f, K, r, d, C, C_k)
                if res["bound"] < res["exact_moment"]:
                    return False
        return True

    lo, hi = 0.0, 1.0
    for _ in range(60):
        if valid(hi):
            break
        hi *= 2.0
    else:
        raise RuntimeError("calibration failed to bracket")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if valid(mid):
            hi = mid
        else:
            lo = mid
    return hi
