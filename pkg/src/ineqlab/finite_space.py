"""Finite probability spaces and the scalar functionals all inequalities use.

A space is a finite set of states with a strictly positive probability
vector mu.  Observables are plain float arrays with one entry per state;
every functional here reduces to a weighted sum, computed with compensated
summation because the constant estimators downstream divide differences of
nearly equal quantities.

Functionals:
    mean(f)        = sum_x f(x) mu(x)
    variance(f)    = mu(f^2) - mu(f)^2
    entropy(f)     = mu(f log f) - mu(f) log mu(f),        f >= 0
    p_defect(f, p) = mu(f^p) - mu(f)^p,                    f >= 0, p in (1,2]
    lr_norm(f, r)  = mu(|f|^r)^(1/r),                      r >= 1
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .util import fdot, pow_dev, xlogx_dev

MIN_WEIGHT = 1e-15
WEIGHT_SUM_TOL = 1e-12
LOG_CLAMP = 1e-300


class DimensionMismatch(ValueError):
    """Observable length does not match the state count."""


def _canonical_label(label: Any) -> Any:
    """JSON round-trips lists; state labels are hashable, so use tuples."""
    if isinstance(label, list):
        return tuple(_canonical_label(x) for x in label)
    return label


@dataclass(frozen=True)
class FiniteSpace:
    """A finite state set with a strictly positive probability vector."""

    labels: tuple
    mu: np.ndarray = field(repr=False)

    def __init__(self, labels: Sequence[Any], mu: Sequence[float]):
        labels = tuple(_canonical_label(l) for l in labels)
        w = np.asarray(mu, dtype=float).copy()
        if w.ndim != 1 or len(labels) != w.size:
            raise DimensionMismatch(
                f"{len(labels)} labels vs {w.size} weights")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be pairwise distinct")
        if not np.isfinite(w).all() or np.any(w < MIN_WEIGHT):
            raise ValueError(
                f"weights must be finite and >= {MIN_WEIGHT} (strict positivity)")
        total = math.fsum(w)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1 within {WEIGHT_SUM_TOL}")
        w.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mu", w)

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def index_of(self, label: Any) -> int:
        return self.labels.index(_canonical_label(label))

    def field_check(self, f: Sequence[float]) -> np.ndarray:
        v = np.asarray(f, dtype=float)
        if v.shape != (self.n_states,):
            raise DimensionMismatch(
                f"observable has shape {v.shape}, expected ({self.n_states},)")
        return v

    def to_json(self) -> dict:
        return {"labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
                "mu": self.mu.tolist()}

    @classmethod
    def from_json(cls, obj: dict | str) -> "FiniteSpace":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["labels"], obj["mu"])


def mean(space: FiniteSpace, f: Sequence[float]) -> float:
    v = space.field_check(f)
    return fdot(space.mu, v)


def variance(space: FiniteSpace, f: Sequence[float]) -> float:
    v = space.field_check(f)
    m = fdot(space.mu, v)
    # centered form: nonnegative even when mu(f^2) and mu(f)^2 nearly cancel
    return fdot(space.mu, (v - m) ** 2)


def covariance(space: FiniteSpace, f: Sequence[float], g: Sequence[float]) -> float:
    vf = space.field_check(f)
    vg = space.field_check(g)
    mf = fdot(space.mu, vf)
    mg = fdot(space.mu, vg)
    return fdot(space.mu, (vf - mf) * (vg - mg))


def entropy(space: FiniteSpace, f: Sequence[float], relaxed: bool = False) -> float:
    """mu(f log f) - mu(f) log mu(f) for f >= 0, with 0 log 0 = 0.

    Entries in (0, 1e-300) are rejected unless relaxed=True (they carry no
    information at double precision but signal a caller bug).  Internally the
    entropy is the mu-average of the nonnegative Bregman integrand
    m * phi(f/m), phi(x) = x log x - x + 1, which is exact at f = 0 by
    continuity and free of the cancellation the textbook formula suffers
    for near-constant f.
    """
    v = space.field_check(f)
    if np.any(v < 0):
        raise ValueError("entropy requires a nonnegative observable")
    if not relaxed and np.any((v > 0) & (v < LOG_CLAMP)):
        raise ValueError(
            "entries below 1e-300 rejected (pass relaxed=True to accept)")
    m = fdot(space.mu, v)
    if m == 0.0:
        return 0.0
    return m * fdot(space.mu, xlogx_dev(v / m - 1.0))


def p_defect(space: FiniteSpace, f: Sequence[float], p: float) -> float:
    """mu(f^p) - mu(f)^p for f >= 0 and p in (1, 2].

    Computed as m^p times the mu-average of the Bregman integrand
    psi_p(f/m), cancellation-free near constant f (at p = 2 it reduces to
    the centered variance).
    """
    if not (1.0 < p <= 2.0):
        raise ValueError(f"p must lie in (1, 2], got {p}")
    v = space.field_check(f)
    if np.any(v < 0):
        raise ValueError("p_defect requires a nonnegative observable")
    m = fdot(space.mu, v)
    if m == 0.0:
        return 0.0
    return m ** p * fdot(space.mu, pow_dev(v / m - 1.0, p))


def lr_norm(space: FiniteSpace, f: Sequence[float], r: float) -> float:
    """The L_r(mu) norm mu(|f|^r)^(1/r), r >= 1."""
    if r < 1.0:
        raise ValueError(f"r must be >= 1, got {r}")
    v = np.abs(space.field_check(f))
    top = float(v.max(initial=0.0))
    if top == 0.0:
        return 0.0
    # factor out the max so v**r cannot overflow for large r
    return top * fdot(space.mu, (v / top) ** r) ** (1.0 / r)


def uniform_space(n: int, prefix: str = "s") -> FiniteSpace:
    return FiniteSpace([f"{prefix}{i}" for i in range(n)], np.full(n, 1.0 / n))


def two_point_space(p1: float = 0.5) -> FiniteSpace:
    return FiniteSpace(["0", "1"], [1.0 - p1, p1])
