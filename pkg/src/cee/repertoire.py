"""Cause and effect repertoires under the factorized-element convention.

Effect repertoires are products of single-purview-element distributions;
cause repertoires are normalized products of single-mechanism-element
likelihoods under a uniform prior. Elements that are not conditioned on are
averaged out uniformly. Both derive from ``Tpm.node`` only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import UnreachableStateError
from .states import check_mask, check_state, elements, expand
from .tpm import Tpm

Direction = Literal["cause", "effect"]
DIRECTIONS: tuple[Direction, ...] = ("cause", "effect")

# (mechanism element, purview element) links whose dependency is noised.
Severed = frozenset[tuple[int, int]]


@dataclass(frozen=True, eq=False)
class Repertoire:
    purview: int
    probs: np.ndarray
    direction: Direction = "effect"

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __eq__(self, other):
        if not isinstance(other, Repertoire):
            return NotImplemented
        return self.purview == other.purview and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.purview, self.probs.tobytes()))


def check_direction(direction: str) -> Direction:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be 'cause' or 'effect', got {direction!r}")
    return direction  # type: ignore[return-value]


def average_out(values: np.ndarray, n: int, keep: int) -> np.ndarray:
    """Average `values` (indexed by full state) over every element not in `keep`.

    The result is still indexed by full state, constant along averaged bits.
    """
    if n == 0:
        return values.copy()
    a = values.reshape((2,) * n)  # axis n-1-k holds element k
    axes = tuple(n - 1 - k for k in range(n) if not (keep >> k) & 1)
    if not axes:
        return values.copy()
    a = np.broadcast_to(a.mean(axis=axes, keepdims=True), (2,) * n)
    return a.reshape(-1)


def _effect_element(tpm: Tpm, j: int, cond: int, state: int) -> float:
    idx = np.arange(tpm.dim)
    rows = (idx & cond) == (state & cond)
    return float(tpm.node[rows, j].mean())


def _product(factors: list[np.ndarray]) -> np.ndarray:
    # factors ordered by ascending element, lowest element is the least-significant bit
    out = np.ones(1)
    for f in factors:
        out = np.kron(f, out)
    return out


def _effect(tpm: Tpm, mechanism: int, state: int, purview: int, severed: Iterable[tuple[int, int]], background: int):
    cut: dict[int, int] = {}
    for i, j in severed:
        cut[j] = cut.get(j, 0) | (1 << i)
    factors = []
    for j in elements(purview):
        cond = (mechanism & ~cut.get(j, 0)) | background
        p1 = _effect_element(tpm, j, cond, state)
        factors.append(np.array([1.0 - p1, p1]))
    return _product(factors)


def _cause(tpm: Tpm, mechanism: int, state: int, purview: int, severed: Iterable[tuple[int, int]]):
    cut: dict[int, int] = {}
    for i, j in severed:
        cut[i] = cut.get(i, 0) | (1 << j)
    pstates = np.array([expand(z, purview) for z in range(1 << bin(purview).count("1"))], dtype=int)
    like = np.ones(len(pstates))
    for i in elements(mechanism):
        on = tpm.node[:, i] if (state >> i) & 1 else 1.0 - tpm.node[:, i]
        like = like * average_out(on, tpm.n, purview & ~cut.get(i, 0))[pstates]
    total = like.sum()
    if total <= 0.0:
        raise UnreachableStateError(f"mechanism {elements(mechanism)} cannot be in state {state}")
    return like / total


def _check(tpm: Tpm, mechanism: int, state: int, purview: int):
    check_mask(mechanism, tpm.n)
    check_mask(purview, tpm.n)
    check_state(state, tpm.n)


def effect_repertoire(tpm: Tpm, mechanism: int, state: int, purview: int, *, background: int = 0) -> Repertoire:
    """Distribution over the purview's next states given the mechanism's current state.

    `state` is a full system state index; only the bits of `mechanism` (and of
    `background`, which is frozen at its current value) are read.
    """
    _check(tpm, mechanism, state, purview)
    return Repertoire(purview, _effect(tpm, mechanism, state, purview, (), background), "effect")


def cause_repertoire(tpm: Tpm, mechanism: int, state: int, purview: int) -> Repertoire:
    """Distribution over the purview's previous states given the mechanism's current state.

    Raises UnreachableStateError when no past purview state can produce the
    mechanism state.
    """
    _check(tpm, mechanism, state, purview)
    return Repertoire(purview, _cause(tpm, mechanism, state, purview, ()), "cause")


def unconstrained_repertoire(
    tpm: Tpm, purview: int, direction: Direction, *, state: int = 0, background: int = 0
) -> Repertoire:
    check_direction(direction)
    if direction == "cause":
        return cause_repertoire(tpm, 0, state, purview)
    return effect_repertoire(tpm, 0, state, purview, background=background)


def repertoire(
    tpm: Tpm,
    direction: Direction,
    mechanism: int,
    state: int,
    purview: int,
    severed: Iterable[tuple[int, int]] = (),
    *,
    background: int = 0,
) -> Repertoire:
    """Repertoire with the `severed` mechanism-purview links noised."""
    check_direction(direction)
    _check(tpm, mechanism, state, purview)
    if direction == "effect":
        probs = _effect(tpm, mechanism, state, purview, severed, background)
    else:
        probs = _cause(tpm, mechanism, state, purview, severed)
    return Repertoire(purview, probs, direction)
