"""Reversible jump kernels and their quadratic machinery.

A kernel is a nonnegative rate matrix Q over a FiniteSpace (diagonal
ignored) in detailed balance with mu:  Q[x,y] mu(x) = Q[y,x] mu(y).
On top of it live

    dirichlet_form(f, g) = 1/2 sum_{x,y} (f(y)-f(x)) (g(y)-g(x)) Q[x,y] mu(x)
    carre_du_champ(f, g)(x) = 1/2 sum_y (f(y)-f(x)) (g(y)-g(x)) Q[x,y]
    gamma_plus(f)(x) = sum_y (f(x)-f(y))_+^2 Q[x,y]
    generator_apply(f)(x) = sum_y (f(y)-f(x)) Q[x,y]

Storage is a dense matrix up to DENSE_LIMIT states and a coordinate list
above (the symmetric-group and hardcore constructions produce thousands of
states where density would waste memory).  All operations work off a
symmetrized edge list, so both storage modes share one code path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .finite_space import DimensionMismatch, FiniteSpace
from .util import fdot

DENSE_LIMIT = 2000
DB_REL_TOL = 1e-10
DB_FLOOR = 1e-30


class DetailedBalanceError(ValueError):
    def __init__(self, violations):
        self.violations = violations
        worst = max(v[2] for v in violations)
        super().__init__(
            f"{len(violations)} detailed-balance violations, worst magnitude {worst:.3e}")


class ReducibleKernelError(ValueError):
    def __init__(self, components):
        self.components = components
        super().__init__(
            f"kernel support graph is disconnected: {len(components)} components "
            f"of sizes {sorted(len(c) for c in components)}")


class Kernel:
    """Rate matrix in detailed balance with the space's measure.

    Parameters
    ----------
    space : FiniteSpace
    rates : dense (n, n) array, or iterable of (i, j, q) coordinate triples
        with integer state indices.  Diagonal entries are discarded.
    validate : check detailed balance at construction (default).  Pass
        False to build an imbalanced kernel on purpose, e.g. to inspect it
        with check_detailed_balance.
    """

    def __init__(self, space: FiniteSpace, rates, validate: bool = True):
        self.space = space
        n = space.n_states
        if isinstance(rates, np.ndarray) and rates.ndim == 2:
            if rates.shape != (n, n):
                raise DimensionMismatch(f"rate matrix {rates.shape} vs {n} states")
            mat = np.array(rates, dtype=float)
            np.fill_diagonal(mat, 0.0)
            ii, jj = np.nonzero(mat)
            qq = mat[ii, jj]
        else:
            triples = [(int(i), int(j), float(q)) for i, j, q in rates]
            ii = np.array([t[0] for t in triples], dtype=np.int64)
            jj = np.array([t[1] for t in triples], dtype=np.int64)
            qq = np.array([t[2] for t in triples], dtype=float)
            keep = (ii != jj) & (qq != 0.0)
            ii, jj, qq = ii[keep], jj[keep], qq[keep]
            if ii.size and (ii.min() < 0 or jj.min() < 0 or ii.max() >= n or jj.max() >= n):
                raise DimensionMismatch("coordinate index out of range")
        if qq.size and (not np.isfinite(qq).all() or np.any(qq < 0)):
            raise ValueError("rates must be finite and nonnegative")
        # collapse duplicate coordinates deterministically
        coo = sp.coo_matrix((qq, (ii, jj)), shape=(n, n))
        csr = coo.tocsr()
        csr.sum_duplicates()
        self._csr = csr
        coo = csr.tocoo()
        self._i = coo.row.astype(np.int64)
        self._j = coo.col.astype(np.int64)
        self._q = coo.data.astype(float)
        self._dense = csr.toarray() if n <= DENSE_LIMIT else None
        # symmetrized edge weights w_{xy} = (Q[x,y] mu(x) + Q[y,x] mu(y)) / 2,
        # one entry per unordered pair; equals Q[x,y] mu(x) under detailed balance
        mu = space.mu
        if self._i.size:
            key = np.minimum(self._i, self._j) * n + np.maximum(self._i, self._j)
            uniq, inv = np.unique(key, return_inverse=True)
            wsum = np.bincount(inv, weights=0.5 * self._q * mu[self._i],
                               minlength=uniq.size)
            self.edge_i = (uniq // n).astype(np.int64)
            self.edge_j = (uniq % n).astype(np.int64)
            self.edge_w = wsum
        else:
            self.edge_i = np.zeros(0, dtype=np.int64)
            self.edge_j = np.zeros(0, dtype=np.int64)
            self.edge_w = np.zeros(0)
        if validate:
            violations = check_detailed_balance(self)
            if violations:
                raise DetailedBalanceError(violations)

    # -- structure ---------------------------------------------------------

    @property
    def n_states(self) -> int:
        return self.space.n_states

    def rate_matrix(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        return self._csr.toarray()

    def rate_csr(self) -> sp.csr_matrix:
        return self._csr

    def scaled(self, c: float) -> "Kernel":
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return Kernel(self.space,
                      zip(self._i, self._j, self._q * c), validate=False)

    def is_irreducible(self) -> bool:
        return len(self.components()) == 1

    def components(self) -> list[list[int]]:
        n = self.n_states
        adj = sp.coo_matrix((np.ones(self.edge_i.size), (self.edge_i, self.edge_j)),
                            shape=(n, n))
        ncomp, assignment = connected_components(adj, directed=False)
        return [[int(x) for x in np.nonzero(assignment == c)[0]] for c in range(ncomp)]

    def require_irreducible(self) -> None:
        comps = self.components()
        if len(comps) > 1:
            raise ReducibleKernelError(comps)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        order = np.lexsort((self._j, self._i))
        return {"space": self.space.to_json(),
                "rates": [[int(self._i[k]), int(self._j[k]), float(self._q[k])]
                          for k in order]}

    @classmethod
    def from_json(cls, obj: dict | str) -> "Kernel":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(FiniteSpace.from_json(obj["space"]), obj["rates"])


def check_detailed_balance(kernel: Kernel) -> list[tuple[int, int, float]]:
    """All pairs (x, y) with |Q_xy mu_x - Q_yx mu_y| beyond relative tolerance.

    The tolerance is relative, |d| <= DB_REL_TOL * max(fluxes, DB_FLOOR),
    because model constructors produce rates spanning many orders of
    magnitude.
    """
    mu = kernel.space.mu
    flux = {}
    for i, j, q in zip(kernel._i, kernel._j, kernel._q):
        flux[(int(i), int(j))] = q * mu[i]
    violations = []
    seen = set()
    for (i, j), fij in flux.items():
        if (j, i) in seen:
            continue
        seen.add((i, j))
        fji = flux.get((j, i), 0.0)
        diff = abs(fij - fji)
        if diff > DB_REL_TOL * max(fij, fji, DB_FLOOR):
            violations.append((i, j, diff))
    violations.sort()
    return violations


def dirichlet_form(kernel: Kernel, f: Sequence[float], g: Sequence[float]) -> float:
    """The energy 1/2 sum_{x,y} (f(y)-f(x))(g(y)-g(x)) Q[x,y] mu(x).

    Via detailed balance this equals sum over unordered edges of
    w_xy (f(x)-f(y))(g(x)-g(y)) with w_xy = Q[x,y] mu(x)."""
    vf = kernel.space.field_check(f)
    vg = kernel.space.field_check(g)
    df = vf[kernel.edge_i] - vf[kernel.edge_j]
    dg = vg[kernel.edge_i] - vg[kernel.edge_j]
    return fdot(kernel.edge_w, df * dg)


def dirichlet_form_oneside(kernel: Kernel, f: Sequence[float], g: Sequence[float]) -> float:
    """Evaluation through the one-sided route
    sum_{x,y} (f(x)-f(y))_+ (g(x)-g(y)) Q[x,y] mu(x),
    which agrees with dirichlet_form under detailed balance."""
    vf = kernel.space.field_check(f)
    vg = kernel.space.field_check(g)
    mu = kernel.space.mu
    df = vf[kernel._i] - vf[kernel._j]
    dg = vg[kernel._i] - vg[kernel._j]
    return fdot(np.maximum(df, 0.0) * dg, kernel._q * mu[kernel._i])


def carre_du_champ(kernel: Kernel, f: Sequence[float], g: Sequence[float]) -> np.ndarray:
    """Pointwise field whose mu-average is the Dirichlet form."""
    vf = kernel.space.field_check(f)
    vg = kernel.space.field_check(g)
    df = vf[kernel._j] - vf[kernel._i]
    dg = vg[kernel._j] - vg[kernel._i]
    out = np.zeros(kernel.n_states)
    np.add.at(out, kernel._i, 0.5 * df * dg * kernel._q)
    return out


def gamma_plus(kernel: Kernel, f: Sequence[float]) -> np.ndarray:
    """One-sided square gradient sum_y (f(x)-f(y))_+^2 Q[x,y], per state x."""
    vf = kernel.space.field_check(f)
    drop = np.maximum(vf[kernel._i] - vf[kernel._j], 0.0)
    out = np.zeros(kernel.n_states)
    np.add.at(out, kernel._i, drop * drop * kernel._q)
    return out


def generator_apply(kernel: Kernel, f: Sequence[float]) -> np.ndarray:
    """Lf(x) = sum_y (f(y)-f(x)) Q[x,y]."""
    vf = kernel.space.field_check(f)
    df = vf[kernel._j] - vf[kernel._i]
    out = np.zeros(kernel.n_states)
    np.add.at(out, kernel._i, df * kernel._q)
    return out


def random_reversible_kernel(n: int, seed: int, extra_edges: int = 0) -> Kernel:
    """Seeded random irreducible reversible chain on n states.

    mu is a random point in the simplex interior; rates come from a random
    symmetric flux matrix B (a spanning path plus extra random edges) via
    Q[x,y] = B[x,y] / mu(x), which satisfies detailed balance by design.
    """
    from .util import stream

    rng = stream(seed, 0xD1CE)
    mu = rng.uniform(0.2, 1.0, size=n)
    mu /= mu.sum()
    space = FiniteSpace([f"s{i}" for i in range(n)], mu)
    flux = np.zeros((n, n))
    for i in range(n - 1):
        flux[i, i + 1] = flux[i + 1, i] = rng.uniform(0.2, 1.0)
    for _ in range(extra_edges):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            b = rng.uniform(0.2, 1.0)
            flux[i, j] += b
            flux[j, i] += b
    rates = flux / mu[:, None]
    return Kernel(space, rates)


def stationarity_residual(kernel: Kernel) -> float:
    """max_y |sum_x mu(x) L[x,y]|: zero iff mu is invariant for the kernel."""
    mu = kernel.space.mu
    flow_in = np.zeros(kernel.n_states)
    np.add.at(flow_in, kernel._j, mu[kernel._i] * kernel._q)
    out_rate = np.zeros(kernel.n_states)
    np.add.at(out_rate, kernel._i, kernel._q)
    return float(np.abs(flow_in - mu * out_rate).max(initial=0.0))
