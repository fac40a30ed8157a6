"""Tensor products of TPMs and approximate factorization into independent groups."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import CeeError
from .states import elements, full_mask, popcount
from .tpm import Tpm

MAX_ELEMENTS = 12
DEFAULT_EPSILON = 1e-6
NOISY_EPSILON = 0.05


def tensor_product(t1: Tpm, t2: Tpm, *, max_elements: int = MAX_ELEMENTS) -> Tpm:
    """Independent composition; t1's elements occupy the low bits."""
    n = t1.n + t2.n
    if n > max_elements:
        raise CeeError("too-many-elements", f"{n} elements exceeds the limit of {max_elements}")
    labels = None
    if t1.labels is not None and t2.labels is not None:
        labels = t1.labels + t2.labels
    return Tpm(n, np.kron(t2.matrix, t1.matrix), labels)


def check_partition(groups: Sequence[int], n: int) -> list[int]:
    seen = 0
    for g in groups:
        if g == 0 or g & seen or g & ~full_mask(n):
            raise CeeError("not-a-partition", f"groups {list(groups)} do not partition {n} elements")
        seen |= g
    if seen != full_mask(n):
        raise CeeError("not-a-partition", f"groups {list(groups)} do not cover {n} elements")
    return list(groups)


def _group_index(n: int, group: int) -> np.ndarray:
    """Packed group state of every full state."""
    s = np.arange(1 << n)
    out = np.zeros_like(s)
    for t, e in enumerate(elements(group)):
        out |= ((s >> e) & 1) << t
    return out


def group_marginal(tpm: Tpm, group: int) -> Tpm:
    """TPM of `group` alone, other groups' current states averaged uniformly."""
    k = popcount(group)
    gidx = _group_index(tpm.n, group)
    # sum over successors sharing the group's next state
    cols = np.zeros((tpm.dim, 1 << k))
    np.add.at(cols.T, gidx, tpm.matrix.T)
    m = np.zeros((1 << k, 1 << k))
    np.add.at(m, gidx, cols)
    m /= (tpm.dim >> k)
    return Tpm(k, m)


def product_matrix(tpm: Tpm, groups: Sequence[int]) -> np.ndarray:
    out = np.ones((tpm.dim, tpm.dim))
    for g in groups:
        gidx = _group_index(tpm.n, g)
        out *= group_marginal(tpm, g).matrix[np.ix_(gidx, gidx)]
    return out


def product_residual(tpm: Tpm, groups: Sequence[int]) -> float:
    """Max over rows of the total-variation distance to the product of group marginals."""
    groups = check_partition(groups, tpm.n)
    if len(groups) == 1:
        return 0.0
    tv = 0.5 * np.abs(tpm.matrix - product_matrix(tpm, groups)).sum(axis=1)
    return float(tv.max())


@dataclass(frozen=True, eq=False)
class Factorization:
    groups: tuple[int, ...]
    factors: tuple[Tpm, ...]
    residual: float
    split_residual: Optional[float] = None  # best 2-way split when nothing splits

    @property
    def entangled(self) -> bool:
        return len(self.groups) == 1 and self.split_residual is not None


def _sorted(groups) -> tuple[int, ...]:
    return tuple(sorted(groups, key=lambda g: (g & -g, g)))


def pair_dependent(tpm: Tpm, i: int, j: int, epsilon: float) -> bool:
    """Whether elements i and j fail the two-group product test on their joint marginal."""
    pair = group_marginal(tpm, (1 << i) | (1 << j))
    return product_residual(pair, [1, 2]) > epsilon


def _components(n: int, edges: list[tuple[int, int]]) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, int] = {}
    for e in range(n):
        comps[find(e)] = comps.get(find(e), 0) | (1 << e)
    return list(comps.values())


def best_split_residual(tpm: Tpm, max_elements: int = 10) -> Optional[float]:
    if tpm.n < 2 or tpm.n > max_elements:
        return None
    low = 1
    return min(
        product_residual(tpm, [a, full_mask(tpm.n) & ~a])
        for a in range(1, full_mask(tpm.n))
        if a & low
    )


def factorize(tpm: Tpm, epsilon: float = DEFAULT_EPSILON) -> Factorization:
    """Split elements into groups whose marginal TPMs reproduce `tpm` within `epsilon`.

    Groups start as connected components of the pairwise dependency graph;
    while the product residual exceeds `epsilon`, the pair of groups whose
    merge lowers it most is merged.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    n = tpm.n
    if n == 0:
        return Factorization((), (), 0.0)
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if pair_dependent(tpm, i, j, epsilon)]
    groups = list(_sorted(_components(n, edges)))
    residual = product_residual(tpm, groups)
    while residual > epsilon and len(groups) > 1:
        best = None
        for a, b in itertools.combinations(range(len(groups)), 2):
            merged = [g for k, g in enumerate(groups) if k not in (a, b)] + [groups[a] | groups[b]]
            r = product_residual(tpm, merged)
            if best is None or r < best[0]:
                best = (r, merged)
        residual, groups = best[0], list(_sorted(best[1]))
    split = best_split_residual(tpm) if len(groups) == 1 else None
    factors = tuple(group_marginal(tpm, g) for g in groups)
    return Factorization(tuple(groups), factors, residual, split)


def set_partitions(items: Sequence[int]):
    """All set partitions of `items` as lists of lists, in restricted-growth order."""
    items = list(items)
    if not items:
        yield []
        return
    n = len(items)
    codes = [0] * n

    def rec(i, top):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(top + 1)]
            for item, c in zip(items, codes):
                blocks[c].append(item)
            yield blocks
            return
        for c in range(top + 2):
            codes[i] = c
            yield from rec(i + 1, max(top, c))

    codes[0] = 0
    yield from rec(1, 0)
