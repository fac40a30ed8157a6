"""Coarse-graining over elements, states and updates, and the search for maximal grains."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import MAX_ELEMENTS, set_partitions
from .errors import CeeError
from .metrics import Metric
from .parallel import pmap
from .states import check_state
from .system import PhiMode, find_complexes
from .tpm import Tpm

GRAIN_TOL = 1e-9
STATIONARY_TOL = 1e-12
STATIONARY_MAX_ITER = 100_000


@dataclass(frozen=True)
class CoarseGraining:
    """Macro element k is 1 when at least ``thresholds[k]`` of ``groups[k]`` are 1."""

    groups: tuple[tuple[int, ...], ...]
    thresholds: tuple[int, ...]
    stride: int = 1

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(tuple(g) for g in self.groups))
        object.__setattr__(self, "thresholds", tuple(self.thresholds))
        if len(self.groups) != len(self.thresholds):
            raise CeeError("bad-grain", "one threshold per group is required")
        for g, t in zip(self.groups, self.thresholds):
            if not g:
                raise CeeError("bad-grain", "empty group")
            if not 1 <= t <= len(g):
                raise CeeError("bad-grain", f"threshold {t} makes the map on {list(g)} non-surjective")
        if not isinstance(self.stride, (int, np.integer)) or self.stride < 1:
            raise CeeError("bad-grain", f"stride must be a positive integer, got {self.stride!r}")

    @property
    def n_micro(self) -> int:
        return sum(len(g) for g in self.groups)

    def check(self, n: int) -> None:
        flat = sorted(e for g in self.groups for e in g)
        if flat != list(range(n)):
            raise CeeError("bad-grain", f"groups {self.groups} do not partition {n} elements")

    def macro_state(self, micro: int) -> int:
        out = 0
        for k, (g, t) in enumerate(zip(self.groups, self.thresholds)):
            if sum((micro >> e) & 1 for e in g) >= t:
                out |= 1 << k
        return out

    @classmethod
    def trivial(cls, n: int) -> "CoarseGraining":
        return cls(tuple((i,) for i in range(n)), (1,) * n, 1)

    def to_dict(self) -> dict:
        return {"groups": [list(g) for g in self.groups], "thresholds": list(self.thresholds), "stride": int(self.stride)}

    @classmethod
    def from_dict(cls, d: dict) -> "CoarseGraining":
        try:
            return cls(tuple(tuple(int(e) for e in g) for g in d["groups"]), tuple(d["thresholds"]), int(d["stride"]))
        except (KeyError, TypeError) as exc:
            raise CeeError("bad-grain", f"malformed grain spec: {exc}") from None


def temporal_grain(tpm: Tpm, k: int) -> Tpm:
    """k-step TPM."""
    if k < 1:
        raise CeeError("bad-grain", f"stride must be >= 1, got {k}")
    if k == 1:
        return tpm
    return Tpm(tpm.n, np.linalg.matrix_power(tpm.matrix, k), tpm.labels)


def stationary_distribution(tpm: Tpm, tol: float = STATIONARY_TOL, max_iter: int = STATIONARY_MAX_ITER) -> np.ndarray:
    # the lazy chain has the same stationary distribution and is aperiodic
    lazy = 0.5 * (tpm.matrix + np.eye(tpm.dim))
    pi = np.full(tpm.dim, 1.0 / tpm.dim)
    for _ in range(max_iter):
        nxt = pi @ lazy
        if np.abs(nxt - pi).max() < tol:
            return nxt / nxt.sum()
        pi = nxt
    return pi / pi.sum()


def coarse_grain(tpm: Tpm, grain: CoarseGraining, stationary_weights: Optional[Sequence[float]] = None) -> Tpm:
    """Macro TPM: weighted average over the micro states of each macro state."""
    grain.check(tpm.n)
    t = temporal_grain(tpm, grain.stride)
    k = len(grain.groups)
    macro = np.array([grain.macro_state(s) for s in range(tpm.dim)])
    w = np.full(tpm.dim, 1.0) if stationary_weights is None else np.asarray(stationary_weights, dtype=float)
    if w.shape != (tpm.dim,) or np.any(w < 0):
        raise CeeError("bad-weights", "weights must be a non-negative vector over micro states")
    totals = np.zeros(1 << k)
    np.add.at(totals, macro, w)
    if np.any(totals <= 0):
        empty = int(np.argmin(totals > 0))
        raise CeeError("zero-weight-macro-state", f"macro state {empty} has no weight")
    frac = w / totals[macro]
    cols = np.zeros((tpm.dim, 1 << k))
    np.add.at(cols.T, macro, t.matrix.T)
    m = np.zeros((1 << k, 1 << k))
    np.add.at(m, macro, frac[:, None] * cols)
    return Tpm(k, m)


def enumerate_grains(n: int, strides: Sequence[int]):
    """Every grain of `n` micro elements in canonical order."""
    for blocks in set_partitions(range(n)):
        for thresholds in itertools.product(*[range(1, len(b) + 1) for b in blocks]):
            for k in strides:
                yield CoarseGraining(tuple(tuple(b) for b in blocks), thresholds, k)


@dataclass(frozen=True)
class GrainBudget:
    max_elements: int = 8
    max_grains: int = 20_000
    strides: tuple[int, ...] = (1, 2, 4)


@dataclass
class GrainSearchResult:
    maximal: list[tuple[CoarseGraining, float]]
    evaluated: list[tuple[CoarseGraining, float]] = field(default_factory=list)
    partial: bool = False

    @property
    def max_phi(self) -> float:
        return self.maximal[0][1] if self.maximal else 0.0


def _grain_phi(args) -> float:
    tpm, state, grain, metric, mode = args
    macro = coarse_grain(tpm, grain)
    search = find_complexes(macro, grain.macro_state(state), metric=metric, mode=mode)
    return max((c.big_phi for c in search.complexes), default=0.0)


def grain_search(
    tpm: Tpm,
    state: int,
    budget: GrainBudget = GrainBudget(),
    *,
    metric: Metric = "emd",
    mode: PhiMode = "mip",
) -> GrainSearchResult:
    """Evaluate every grain within `budget`; return all within GRAIN_TOL of the best.

    Each grain scores the largest complex phi of its macro TPM, with the
    current state mapped through the grain.
    """
    check_state(state, tpm.n)
    if tpm.n > min(budget.max_elements, MAX_ELEMENTS):
        raise CeeError("too-many-elements", f"{tpm.n} micro elements exceeds the search bound {budget.max_elements}")
    grains = list(itertools.islice(enumerate_grains(tpm.n, budget.strides), budget.max_grains + 1))
    partial = len(grains) > budget.max_grains
    grains = grains[: budget.max_grains]
    phis = pmap(_grain_phi, [(tpm, state, g, metric, mode) for g in grains])
    evaluated = list(zip(grains, phis))
    if not evaluated:
        return GrainSearchResult([], [], partial)
    best = max(phis)
    order = sorted(range(len(evaluated)), key=lambda i: (-round(phis[i], 9), i))
    maximal = [evaluated[i] for i in order if phis[i] >= best - GRAIN_TOL]
    return GrainSearchResult(maximal, evaluated, partial)
