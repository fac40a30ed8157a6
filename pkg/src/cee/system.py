"""System-level integrated information, complexes and cause-effect structures.

Candidate systems are evaluated with elements outside the candidate frozen at
their current state for effects and averaged out uniformly for causes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import UnreachableStateError
from .mechanism import PHI_TOL, TIE_TOL, Distinction, distinction
from .metrics import Metric, distance
from .repertoire import average_out, repertoire
from .states import check_mask, check_state, compress, elements, full_mask, popcount, submasks
from .tpm import Tpm, tpm_from_node

PhiMode = Literal["mip", "sum-distinctions"]
PHI_MODES: tuple[PhiMode, ...] = ("mip", "sum-distinctions")
MAX_RELATIONS_ORDER = 3


@dataclass(frozen=True)
class SystemCut:
    """Connections from `source` to `target` are noised.

    For a single-element system source == target and the self-connection is cut.
    ``bidirectional`` also noises target -> source.
    """

    source: int
    target: int
    bidirectional: bool = False

    def severed(self, direction: str) -> frozenset:
        links = {(i, j) for i in elements(self.source) for j in elements(self.target)}
        if self.bidirectional:
            links |= {(i, j) for i in elements(self.target) for j in elements(self.source)}
        if direction == "cause":
            # cause links run from past purview element j to current mechanism element i
            links = {(j, i) for i, j in links}
        return frozenset(links)


def system_cuts(subset: int, bidirectional: bool = False) -> list[SystemCut]:
    if popcount(subset) == 1:
        return [SystemCut(subset, subset, bidirectional)]
    out = []
    low = subset & -subset
    for a in submasks(subset):
        if a == 0 or a == subset:
            continue
        if bidirectional and not a & low:
            continue
        out.append(SystemCut(a, subset & ~a, bidirectional))
    return out


def _cut_normalization(cut: SystemCut, subset: int) -> int:
    if cut.source == cut.target:
        return 1
    return min(popcount(cut.source), popcount(subset & ~cut.source))


@dataclass(frozen=True)
class SystemPhi:
    subset: int
    big_phi: float
    cut: Optional[SystemCut]
    cause_distance: float = 0.0
    effect_distance: float = 0.0


def _mip_distances(tpm: Tpm, subset: int, state: int, cut: SystemCut, intact: dict, metric: Metric):
    background = full_mask(tpm.n) & ~subset
    out = {}
    for direction in ("cause", "effect"):
        cut_rep = repertoire(tpm, direction, subset, state, subset, cut.severed(direction), background=background)
        out[direction] = distance(intact[direction].probs, cut_rep.probs, metric)
    return out["cause"], out["effect"]


def cut_tpm(tpm: Tpm, cut: SystemCut) -> Tpm:
    """TPM with the cut connections replaced by uniform noise (factorized form)."""
    node = np.array(tpm.node)
    everything = full_mask(tpm.n)
    for j in elements(cut.target):
        node[:, j] = average_out(tpm.node[:, j], tpm.n, everything & ~cut.source)
    if cut.bidirectional and cut.source != cut.target:
        for j in elements(cut.source):
            node[:, j] = average_out(tpm.node[:, j], tpm.n, everything & ~cut.target)
    return tpm_from_node(node)


def _distinction_phis(tpm: Tpm, subset: int, state: int, metric: Metric) -> dict[int, float]:
    background = full_mask(tpm.n) & ~subset
    out = {}
    for m in submasks(subset):
        if m:
            d = distinction(tpm, m, state, metric=metric, candidates=subset, background=background)
            out[m] = 0.0 if d is None else d.phi
    return out


def system_phi(
    tpm: Tpm,
    subset: int,
    state: int,
    *,
    metric: Metric = "emd",
    mode: PhiMode = "mip",
    bidirectional: bool = False,
) -> SystemPhi:
    """Integrated information of `subset` in `state` under its minimum system cut.

    mode="mip": min over cuts of the smaller of the cause and effect distances
    between intact and cut whole-subset repertoires, divided by the smaller
    part's size in bits. mode="sum-distinctions": the summed change in
    distinction phi, with the same normalization.
    """
    check_mask(subset, tpm.n)
    check_state(state, tpm.n)
    if subset == 0:
        raise ValueError("subset must be non-empty")
    if mode not in PHI_MODES:
        raise ValueError(f"unknown phi mode {mode!r}")
    cuts = system_cuts(subset, bidirectional)
    scored = []
    if mode == "mip":
        background = full_mask(tpm.n) & ~subset
        try:
            intact = {
                d: repertoire(tpm, d, subset, state, subset, background=background) for d in ("cause", "effect")
            }
        except UnreachableStateError:
            return SystemPhi(subset, 0.0, None)
        for cut in cuts:
            dc, de = _mip_distances(tpm, subset, state, cut, intact, metric)
            scored.append((min(dc, de) / _cut_normalization(cut, subset), cut, dc, de))
    else:
        base = _distinction_phis(tpm, subset, state, metric)
        for cut in cuts:
            after = _distinction_phis(cut_tpm(tpm, cut), subset, state, metric)
            loss = sum(abs(base[m] - after[m]) for m in base)
            scored.append((loss / _cut_normalization(cut, subset), cut, 0.0, 0.0))
    lowest = min(s[0] for s in scored)
    value, cut, dc, de = next(s for s in scored if s[0] <= lowest + TIE_TOL)
    return SystemPhi(subset, value, cut, dc, de)


@dataclass(frozen=True)
class Complex:
    elements: int
    big_phi: float
    state: int  # packed over `elements`, little-endian
    cut: Optional[SystemCut]
    exclusive: bool = False


def phi_order(item_phi: float, mask: int):
    """Sort key: descending phi (ties at 1e-9 resolution), then ascending mask."""
    return (-round(item_phi, 9), mask)


def is_local_maximum(phis: dict[int, float], subset: int) -> bool:
    value = phis[subset]
    for other, v in phis.items():
        if other != subset and (other & subset in (other, subset)) and v > value + TIE_TOL:
            return False
    return True


@dataclass
class ComplexSearch:
    phis: dict[int, SystemPhi]
    complexes: list[Complex] = field(default_factory=list)

    @property
    def exclusive(self) -> list[Complex]:
        return [c for c in self.complexes if c.exclusive]


def find_complexes(
    tpm: Tpm,
    state: int,
    *,
    metric: Metric = "emd",
    mode: PhiMode = "mip",
) -> ComplexSearch:
    """Evaluate every non-empty subset; complexes are local maxima with positive phi.

    All local maxima are returned, sorted by descending phi; ``exclusive`` marks
    the greedy non-overlapping selection taken in that order.
    """
    check_state(state, tpm.n)
    results = {s: system_phi(tpm, s, state, metric=metric, mode=mode) for s in range(1, 1 << tpm.n)}
    phis = {s: r.big_phi for s, r in results.items()}
    maxima = [s for s in phis if phis[s] > PHI_TOL and is_local_maximum(phis, s)]
    maxima.sort(key=lambda s: phi_order(phis[s], s))
    taken = 0
    out = []
    for s in maxima:
        exclusive = not (s & taken)
        if exclusive:
            taken |= s
        out.append(Complex(s, phis[s], compress(state, s), results[s].cut, exclusive))
    return ComplexSearch(results, out)


@dataclass(frozen=True)
class Relation:
    members: tuple[int, ...]  # indices into CauseEffectStructure.distinctions
    mechanisms: tuple[int, ...]
    faces: tuple[str, ...]
    overlap: int


@dataclass
class CauseEffectStructure:
    subset: int
    distinctions: list[Distinction]
    reducible: list[int]
    relations: list[Relation]

    @property
    def sum_phi(self) -> float:
        return sum(d.phi for d in self.distinctions)


def relations(distinctions: list[Distinction], order: int = 2) -> list[Relation]:
    """Purview overlaps among 2..`order` distinctions, over every cause/effect face choice."""
    if not 2 <= order <= MAX_RELATIONS_ORDER:
        raise ValueError(f"relations order must be in [2, {MAX_RELATIONS_ORDER}], got {order}")
    out = []
    for k in range(2, order + 1):
        for members in itertools.combinations(range(len(distinctions)), k):
            for faces in itertools.product(("cause", "effect"), repeat=k):
                overlap = full_mask(64)
                for idx, face in zip(members, faces):
                    overlap &= getattr(distinctions[idx], face).purview
                if overlap:
                    mechs = tuple(distinctions[i].mechanism for i in members)
                    out.append(Relation(members, mechs, faces, overlap))
    return out


def cause_effect_structure(
    tpm: Tpm,
    subset: int,
    state: int,
    *,
    metric: Metric = "emd",
    relations_order: int = 2,
) -> CauseEffectStructure:
    """Distinctions of every non-empty mechanism within `subset`, plus their relations."""
    check_mask(subset, tpm.n)
    check_state(state, tpm.n)
    background = full_mask(tpm.n) & ~subset
    found, reducible = [], []
    for m in submasks(subset):
        if not m:
            continue
        d = distinction(tpm, m, state, metric=metric, candidates=subset, background=background)
        if d is None:
            reducible.append(m)
        else:
            found.append(d)
    return CauseEffectStructure(subset, found, reducible, relations(found, relations_order))
