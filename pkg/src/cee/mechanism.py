"""Mechanism-level integrated information: cuts, small phi, core purviews, distinctions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import UnreachableStateError
from .metrics import Metric, distance
from .repertoire import Direction, Repertoire, check_direction, repertoire
from .states import check_mask, elements, full_mask, popcount, submasks
from .tpm import Tpm

# Values closer than this are ties; the canonically first candidate wins.
TIE_TOL = 1e-10
# phi at or below this counts as reducible.
PHI_TOL = 1e-10


@dataclass(frozen=True)
class MechanismCut:
    """Bipartition (m1 x p1) | (m2 x p2); the cross links are severed."""

    mechanism: int
    purview: int
    part1: tuple[int, int]
    part2: tuple[int, int]
    severed: frozenset

    @classmethod
    def from_parts(cls, mechanism: int, purview: int, m1: int, p1: int) -> "MechanismCut":
        m2, p2 = mechanism & ~m1, purview & ~p1
        severed = frozenset(
            [(i, j) for i in elements(m1) for j in elements(p2)]
            + [(i, j) for i in elements(m2) for j in elements(p1)]
        )
        return cls(mechanism, purview, (m1, p1), (m2, p2), severed)


def admissible_cuts(mechanism: int, purview: int) -> list[MechanismCut]:
    """Non-null bipartition cuts in canonical order, one per distinct severed set."""
    seen = set()
    out = []
    for m1 in submasks(mechanism):
        for p1 in submasks(purview):
            cut = MechanismCut.from_parts(mechanism, purview, m1, p1)
            if not cut.severed or cut.severed in seen:
                continue
            seen.add(cut.severed)
            out.append(cut)
    return out


def apply_cut(
    tpm: Tpm,
    mechanism: int,
    state: int,
    purview: int,
    direction: Direction,
    cut: MechanismCut | Iterable[tuple[int, int]],
    *,
    background: int = 0,
) -> Repertoire:
    severed = cut.severed if isinstance(cut, MechanismCut) else frozenset(cut)
    for i, j in severed:
        if not ((mechanism >> i) & 1 and (purview >> j) & 1):
            raise ValueError(f"severed link ({i}, {j}) is outside mechanism x purview")
    return repertoire(tpm, direction, mechanism, state, purview, severed, background=background)


@dataclass(frozen=True, eq=False)
class PhiResult:
    phi: float
    cut: Optional[MechanismCut]
    repertoire: Optional[Repertoire]
    cut_repertoire: Optional[Repertoire]


def small_phi(
    tpm: Tpm,
    mechanism: int,
    state: int,
    purview: int,
    direction: Direction,
    *,
    metric: Metric = "emd",
    background: int = 0,
) -> PhiResult:
    """Minimum distance between the intact repertoire and each admissible cut."""
    check_direction(direction)
    check_mask(mechanism, tpm.n)
    check_mask(purview, tpm.n)
    try:
        intact = repertoire(tpm, direction, mechanism, state, purview, background=background)
    except UnreachableStateError:
        return PhiResult(0.0, None, None, None)
    scored = []
    for cut in admissible_cuts(mechanism, purview):
        cut_rep = repertoire(tpm, direction, mechanism, state, purview, cut.severed, background=background)
        scored.append((distance(intact.probs, cut_rep.probs, metric), cut, cut_rep))
    if not scored:
        return PhiResult(0.0, None, intact, None)
    lowest = min(d for d, _, _ in scored)
    d, cut, cut_rep = next(item for item in scored if item[0] <= lowest + TIE_TOL)
    return PhiResult(d, cut, intact, cut_rep)


@dataclass(frozen=True, eq=False)
class Mice:
    """Core cause or core effect of a mechanism."""

    direction: Direction
    mechanism: int
    purview: int
    phi: float
    repertoire: Repertoire
    cut: MechanismCut


def candidate_purviews(candidates: int) -> list[int]:
    return sorted((p for p in submasks(candidates) if p), key=lambda p: (popcount(p), p))


def core_purview(
    tpm: Tpm,
    mechanism: int,
    state: int,
    direction: Direction,
    *,
    metric: Metric = "emd",
    candidates: Optional[int] = None,
    background: int = 0,
) -> Optional[Mice]:
    """Purview maximizing small phi; None when every purview is reducible.

    Ties go to the smaller purview, then the lower mask.
    """
    if candidates is None:
        candidates = full_mask(tpm.n)
    scored = [
        (purview, small_phi(tpm, mechanism, state, purview, direction, metric=metric, background=background))
        for purview in candidate_purviews(candidates)
    ]
    highest = max((r.phi for _, r in scored), default=0.0)
    if highest <= PHI_TOL:
        return None
    purview, r = next(item for item in scored if item[1].phi >= highest - TIE_TOL)
    return Mice(direction, mechanism, purview, r.phi, r.repertoire, r.cut)


@dataclass(frozen=True, eq=False)
class Distinction:
    mechanism: int
    cause: Mice
    effect: Mice

    @property
    def phi(self) -> float:
        return min(self.cause.phi, self.effect.phi)


def distinction(
    tpm: Tpm,
    mechanism: int,
    state: int,
    *,
    metric: Metric = "emd",
    candidates: Optional[int] = None,
    background: int = 0,
) -> Optional[Distinction]:
    """Core cause and core effect of `mechanism`, or None if either side is reducible."""
    if mechanism == 0:
        raise ValueError("mechanism must be non-empty")
    kw = dict(metric=metric, candidates=candidates, background=background)
    cause = core_purview(tpm, mechanism, state, "cause", **kw)
    if cause is None:
        return None
    effect = core_purview(tpm, mechanism, state, "effect", **kw)
    if effect is None:
        return None
    return Distinction(mechanism, cause, effect)
