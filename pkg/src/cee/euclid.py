"""Lattice particles in imaginary time: paths, the kinetic-action information
ledger, empirical TPMs, and the work/physicality and entropy-area bookkeeping.

Natural units: hbar = 1, lattice spacing = 1.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import CeeError
from .tpm import Tpm, validate_tpm

LN2 = math.log(2.0)
_SNAP = 1e-12


@dataclass(frozen=True)
class SimConfig:
    num_particles: int = 2
    lattice_size: int = 8
    steps: int = 1000
    d_tau: float = 1.0
    mass: Union[float, tuple[float, ...]] = 1.0
    hop_prob: float = 0.5
    coupling: float = 0.0
    seed: int = 0
    area_tn: int = 0
    dims: int = 1

    def __post_init__(self):
        if isinstance(self.mass, (list, tuple)):
            object.__setattr__(self, "mass", tuple(float(m) for m in self.mass))
        self.validate()

    def validate(self) -> None:
        def bad(msg):
            raise CeeError("bad-config", msg)

        for name in ("num_particles", "steps"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                bad(f"{name} must be an integer >= 1, got {v!r}")
        if not isinstance(self.lattice_size, int) or self.lattice_size < 2:
            bad(f"lattice_size must be an integer >= 2, got {self.lattice_size!r}")
        if self.dims not in (1, 2):
            bad(f"dims must be 1 (ring) or 2 (torus), got {self.dims!r}")
        if not self.d_tau > 0:
            bad(f"d_tau must be positive, got {self.d_tau!r}")
        if not 0.0 <= self.hop_prob <= 1.0:
            bad(f"hop_prob must lie in [0, 1], got {self.hop_prob!r}")
        if not self.coupling >= 0:
            bad(f"coupling must be non-negative, got {self.coupling!r}")
        if not isinstance(self.area_tn, int) or self.area_tn < 0:
            bad(f"area_tn must be a non-negative integer, got {self.area_tn!r}")
        masses = self.masses
        if len(masses) != self.num_particles or any(not m > 0 for m in masses):
            bad(f"need one positive mass per particle, got {self.mass!r}")

    @property
    def masses(self) -> tuple[float, ...]:
        if isinstance(self.mass, tuple):
            return self.mass
        return (float(self.mass),) * self.num_particles

    @property
    def num_sites(self) -> int:
        return self.lattice_size**self.dims

    def hop_action(self, particle: int) -> float:
        """Kinetic Euclidean action of one unit hop: (m/2)(a/d_tau)^2 d_tau."""
        return 0.5 * self.masses[particle] / self.d_tau

    def to_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.mass, tuple):
            d["mass"] = list(self.mass)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise CeeError("bad-config", f"unknown fields {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    """Site sequence of every particle, shape (num_particles, steps + 1)."""

    paths: np.ndarray
    lattice_size: int
    dims: int = 1

    def __post_init__(self):
        p = np.array(self.paths, dtype=np.int64)
        p.setflags(write=False)
        object.__setattr__(self, "paths", p)

    def coords(self, site):
        L = self.lattice_size
        if self.dims == 1:
            return (site,)
        return (site % L, site // L)


class InfoBits(NamedTuple):
    bits: float
    events: int


def info_bits(s_e0: float) -> InfoBits:
    """Acquired information S_E0 / (hbar ln 2) and the completed spin-event count.

    Values within 1e-12 (relative) of an integer are snapped to it, so that
    an action of exactly k ln 2 always yields k events despite rounding.
    """
    if s_e0 < 0:
        raise CeeError("negative-action", f"action must be non-negative, got {s_e0}")
    bits = s_e0 / LN2
    nearest = round(bits)
    if abs(bits - nearest) <= _SNAP * max(1.0, abs(bits)):
        bits = float(nearest)
    return InfoBits(bits, int(math.floor(bits)))


@dataclass
class ActionLedger:
    s_e0: float = 0.0
    events: list[tuple[int, int, int]] = field(default_factory=list)  # (step, particle, site)

    @property
    def information(self) -> float:
        return info_bits(self.s_e0).bits

    @property
    def bits(self) -> int:
        return len(self.events)

    def to_dict(self) -> dict:
        return {"s_e0": self.s_e0, "bits": self.bits, "information": self.information,
                "events": [list(e) for e in self.events]}


def _moves(dims: int) -> np.ndarray:
    if dims == 1:
        return np.array([[1], [-1]])
    return np.array([[1, 0], [-1, 0], [0, 1], [0, -1]])


def _free_walk(config: SimConfig, start: np.ndarray, draws: np.ndarray):
    """Uncoupled walk, vectorized; equal move weights make the choice floor(u * moves)."""
    L, dims = config.lattice_size, config.dims
    moves = _moves(dims)
    hopped = draws[:, :, 0] < config.hop_prob
    choice = np.minimum((draws[:, :, 1] * len(moves)).astype(np.int64), len(moves) - 1)
    delta = moves[choice] * hopped[:, :, None]  # (steps, P, dims)
    coords = np.stack([start % L, start // L], axis=-1)[:, :dims]
    walk = (coords[None, :, :] + np.cumsum(delta, axis=0)) % L
    walk = np.concatenate([coords[None], walk], axis=0)
    sites = walk[:, :, 0] + (walk[:, :, 1] * L if dims == 2 else 0)
    return sites.T.copy(), hopped


def _coupled_walk(config: SimConfig, start: np.ndarray, draws: np.ndarray):
    L, dims, P, g = config.lattice_size, config.dims, config.num_particles, config.coupling
    moves = [tuple(m) for m in _moves(dims).tolist()]
    u_hop = draws[:, :, 0].tolist()
    u_dir = draws[:, :, 1].tolist()
    hop_prob = config.hop_prob
    pos = [tuple((int(x) % L, int(x) // L)[:dims]) for x in start]
    paths = np.empty((P, config.steps + 1), dtype=np.int64)
    paths[:, 0] = start
    hopped = np.zeros((config.steps, P), dtype=bool)

    def dist(a, b):
        total = 0
        for x, y in zip(a, b):
            d = (x - y) % L
            total += d if d <= L - d else L - d
        return total

    for t in range(config.steps):
        uh, ud = u_hop[t], u_dir[t]
        for p in range(P):
            if uh[p] >= hop_prob:
                continue
            here = pos[p]
            target = None
            best = None
            for q in range(P):
                if q != p:
                    d = dist(here, pos[q])
                    if best is None or d < best:
                        best, target = d, pos[q]
            cands = [tuple((x + d) % L for x, d in zip(here, mv)) for mv in moves]
            weights = [1.0 + g if dist(c, target) < best else 1.0 for c in cands]
            total = sum(weights)
            acc = 0.0
            choice = len(moves) - 1
            for k, w in enumerate(weights):
                acc += w / total
                if ud[p] < acc:
                    choice = k
                    break
            pos[p] = cands[choice]
            hopped[t, p] = True
        for p in range(P):
            paths[p, t + 1] = pos[p][0] + (pos[p][1] * L if dims == 2 else 0)
    return paths, hopped


def _ledger(config: SimConfig, paths: np.ndarray, hopped: np.ndarray) -> ActionLedger:
    """Action and spin events from hop flags, in (step, particle) order.

    The action is rebuilt from integer hop counts at every hop so that it
    carries no accumulated summation error.
    """
    steps, P = hopped.shape
    flat = hopped.reshape(-1)
    if not flat.any():
        return ActionLedger()
    # per-particle cumulative hop counts after each (step, particle) slot
    slots = np.zeros((steps * P, P), dtype=np.int64)
    slots[np.arange(steps * P), np.tile(np.arange(P), steps)] = flat
    counts = np.cumsum(slots, axis=0)
    action = np.array([config.hop_action(p) for p in range(P)])
    s = counts @ action
    bits = s / LN2
    nearest = np.rint(bits)
    snap = np.abs(bits - nearest) <= _SNAP * np.maximum(1.0, np.abs(bits))
    due = np.floor(np.where(snap, nearest, bits)).astype(np.int64)
    new = np.diff(np.concatenate([[0], due]))
    events = []
    for k in np.nonzero(new > 0)[0]:
        t, p = divmod(int(k), P)
        events.extend([(t + 1, p, int(paths[p, t + 1]))] * int(new[k]))
    return ActionLedger(float(s[-1]), events)


def simulate(config: SimConfig) -> tuple[TrajectoryEnsemble, ActionLedger]:
    """Seeded lattice walk in imaginary time.

    Each step, particles move in index order. A particle hops with
    probability `hop_prob`; moves that shorten the distance to its nearest
    other particle are weighted (1 + coupling) against 1 for the rest. Every
    hop adds its kinetic action to the ledger, and a spin event is logged at
    the particle's new site whenever the action crosses a multiple of ln 2.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    start = rng.integers(0, config.num_sites, size=config.num_particles)
    draws = rng.random((config.steps, config.num_particles, 2))
    if config.coupling > 0 and config.num_particles > 1:
        paths, hopped = _coupled_walk(config, start, draws)
    else:
        paths, hopped = _free_walk(config, start, draws)
    return TrajectoryEnsemble(paths, config.lattice_size, config.dims), _ledger(config, paths, hopped)


class HalfRingEncoder:
    """One bit per particle: 1 when its first coordinate lies in the upper half."""

    def __init__(self, num_particles: int, lattice_size: int, dims: int = 1):
        self.n_bits = num_particles
        self.lattice_size = lattice_size
        self.dims = dims

    def encode_paths(self, paths: np.ndarray) -> np.ndarray:
        x = paths % self.lattice_size
        bits = (2 * x >= self.lattice_size).astype(np.int64)
        weights = 1 << np.arange(paths.shape[0], dtype=np.int64)
        return (bits * weights[:, None]).sum(axis=0)

    def __call__(self, sites: Sequence[int]) -> int:
        return int(self.encode_paths(np.asarray(sites, dtype=np.int64)[:, None])[0])


Encoder = Callable[[Sequence[int]], int]


def empirical_tpm(
    ensemble: TrajectoryEnsemble,
    encoder: Optional[Encoder] = None,
    smoothing: float = 1.0,
    n_bits: Optional[int] = None,
) -> Tpm:
    """Laplace-smoothed transition frequencies of the encoded configurations.

    Rows with no observations and no smoothing fall back to uniform.
    """
    if smoothing < 0:
        raise CeeError("bad-smoothing", f"smoothing must be non-negative, got {smoothing}")
    paths = ensemble.paths
    if encoder is None:
        encoder = HalfRingEncoder(paths.shape[0], ensemble.lattice_size, ensemble.dims)
    n = n_bits if n_bits is not None else getattr(encoder, "n_bits", None)
    if n is None:
        raise CeeError("bad-encoder", "encoder has no n_bits; pass n_bits explicitly")
    dim = 1 << n
    if hasattr(encoder, "encode_paths"):
        states = np.asarray(encoder.encode_paths(paths))
    else:
        states = np.array([encoder(tuple(int(s) for s in paths[:, t])) for t in range(paths.shape[1])], dtype=object)
    for t, s in enumerate(states):
        if s is None or not isinstance(s, (int, np.integer)) or not 0 <= s < dim:
            raise CeeError("encoder-not-total", f"configuration at step {t} encoded as {s!r}")
    states = states.astype(np.int64)
    counts = np.zeros((dim, dim))
    np.add.at(counts, (states[:-1], states[1:]), 1.0)
    counts += smoothing
    sums = counts.sum(axis=1, keepdims=True)
    empty = sums[:, 0] == 0
    counts[empty] = 1.0
    sums[empty] = dim
    return validate_tpm(counts / sums, n)


Regime = Literal["lorentzian", "euclidean"]


class Physicality(NamedTuple):
    work: float
    physical: bool


def physicality(regime: Regime, s_equals_m: bool, k_b_t: float) -> Physicality:
    """Work needed to read out an event, and whether that read-out costs anything physical.

    Euclidean: always zero. Lorentzian: k_B T when the measured and measuring
    systems differ, zero when they coincide.
    """
    if k_b_t < 0:
        raise CeeError("negative-temperature", f"k_B T must be non-negative, got {k_b_t}")
    if regime == "euclidean":
        work = 0.0
    elif regime == "lorentzian":
        work = 0.0 if s_equals_m else float(k_b_t)
    else:
        raise CeeError("bad-regime", f"regime must be 'lorentzian' or 'euclidean', got {regime!r}")
    return Physicality(work, work > 0)


def hologram_entropy(area_tn: int) -> float:
    """Boundary entropy in bits: one bit per unit of discretized area."""
    if not isinstance(area_tn, (int, np.integer)) or area_tn < 0:
        raise CeeError("bad-area", f"area must be a non-negative integer, got {area_tn!r}")
    return float(area_tn)


def trajectory_to_dict(config: SimConfig, ensemble: TrajectoryEnsemble, ledger: ActionLedger) -> dict:
    return {"config": config.to_dict(), "paths": ensemble.paths.tolist(), "ledger": ledger.to_dict()}


def trajectory_from_dict(d: dict) -> tuple[SimConfig, TrajectoryEnsemble, ActionLedger]:
    try:
        config = SimConfig.from_dict(d["config"])
        ensemble = TrajectoryEnsemble(np.array(d["paths"]), config.lattice_size, config.dims)
        led = d["ledger"]
        ledger = ActionLedger(float(led["s_e0"]), [tuple(e) for e in led["events"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise CeeError("bad-trajectory-file", str(exc)) from None
    return config, ensemble, ledger
