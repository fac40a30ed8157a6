"""State-by-state transition probability matrices over binary elements."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import CeeError
from .states import elements

INPUT_ROW_TOL = 1e-6
INTERNAL_ROW_TOL = 1e-9
CONVENTION = "little-endian"
_TPM_FILE_KEYS = {"n", "convention", "tpm", "labels"}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Tpm:
    """Row-stochastic one-step matrix: ``matrix[s, s'] = p(next = s' | current = s)``.

    Construct through :func:`validate_tpm` unless the matrix is known to be valid.
    """

    n: int
    matrix: np.ndarray
    labels: Optional[tuple[str, ...]] = None
    node: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        dim = 1 << self.n
        if m.shape != (dim, dim):
            raise CeeError("dimension-mismatch", f"expected {dim}x{dim}, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        # node[s, j] = p(element j is 1 next | current state s)
        bit = (np.arange(dim)[:, None] >> np.arange(self.n)[None, :]) & 1
        object.__setattr__(self, "node", _frozen(np.clip(m @ bit, 0.0, 1.0)))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return 1 << self.n

    def __eq__(self, other):
        if not isinstance(other, Tpm):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.n, self.matrix.tobytes()))

    def allclose(self, other: "Tpm", atol: float = 1e-12) -> bool:
        return self.n == other.n and np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)


def validate_tpm(raw, n: int, labels: Optional[Sequence[str]] = None) -> Tpm:
    """Check and wrap a raw matrix.

    Rows within ``INPUT_ROW_TOL`` of summing to one are renormalized; anything
    further off is rejected.
    """
    try:
        m = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise CeeError("not-numeric", str(exc)) from None
    dim = 1 << n
    if m.ndim != 2 or m.shape != (dim, dim):
        raise CeeError("dimension-mismatch", f"expected {dim}x{dim} for n={n}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise CeeError("not-finite", "matrix has NaN or infinite entries")
    if np.any(m < 0):
        r, c = np.argwhere(m < 0)[0]
        raise CeeError("negative-entry", f"entry [{r}][{c}] = {m[r, c]}")
    if np.any(m > 1 + INPUT_ROW_TOL):
        r, c = np.argwhere(m > 1 + INPUT_ROW_TOL)[0]
        raise CeeError("entry-above-one", f"entry [{r}][{c}] = {m[r, c]}")
    sums = m.sum(axis=1)
    bad = np.abs(sums - 1.0) > INPUT_ROW_TOL
    if np.any(bad):
        r = int(np.argmax(bad))
        raise CeeError("row-not-stochastic", f"row {r} sums to {sums[r]:.12g}")
    m = m / sums[:, None]
    if labels is not None and len(labels) != n:
        raise CeeError("label-count", f"{len(labels)} labels for {n} elements")
    return Tpm(n, m, None if labels is None else tuple(labels))


def tpm_from_node(node: np.ndarray) -> Tpm:
    """Conditionally independent state-by-state TPM from per-element marginals.

    ``node[s, j]`` is ``p(element j is 1 next | s)``.
    """
    node = np.asarray(node, dtype=float)
    dim, n = node.shape
    nxt = np.arange(dim)
    m = np.ones((dim, dim))
    for j in range(n):
        on = ((nxt >> j) & 1).astype(bool)
        m *= np.where(on[None, :], node[:, j : j + 1], 1.0 - node[:, j : j + 1])
    return Tpm(n, m)


def tpm_from_functions(n: int, update) -> Tpm:
    """Deterministic TPM where ``update(bits) -> next bits``."""
    dim = 1 << n
    m = np.zeros((dim, dim))
    for s in range(dim):
        bits = tuple((s >> i) & 1 for i in range(n))
        nxt = update(bits)
        m[s, sum(int(b) << i for i, b in enumerate(nxt))] = 1.0
    return Tpm(n, m)


def identity_tpm(n: int = 1) -> Tpm:
    return Tpm(n, np.eye(1 << n))


def not_tpm() -> Tpm:
    return Tpm(1, np.array([[0.0, 1.0], [1.0, 0.0]]))


def noise_tpm(n: int = 1) -> Tpm:
    dim = 1 << n
    return Tpm(n, np.full((dim, dim), 1.0 / dim))


def random_tpm(n: int, rng: np.random.Generator, deterministic_fraction: float = 0.0) -> Tpm:
    """Dirichlet rows; a fraction of rows can be made deterministic."""
    dim = 1 << n
    m = rng.dirichlet(np.ones(dim), size=dim)
    for s in range(dim):
        if rng.random() < deterministic_fraction:
            m[s] = 0.0
            m[s, rng.integers(dim)] = 1.0
    return Tpm(n, m)


def reorder_elements(tpm: Tpm, perm: Sequence[int]) -> Tpm:
    """Relabel elements: old element ``i`` becomes new element ``perm[i]``."""
    n = tpm.n
    if sorted(perm) != list(range(n)):
        raise CeeError("bad-permutation", f"{perm!r} is not a permutation of {n} elements")
    dim = tpm.dim
    new_of_old = np.zeros(dim, dtype=int)
    for s in range(dim):
        t = 0
        for i in range(n):
            t |= ((s >> i) & 1) << perm[i]
        new_of_old[s] = t
    m = np.zeros((dim, dim))
    m[np.ix_(new_of_old, new_of_old)] = tpm.matrix
    labels = None
    if tpm.labels is not None:
        labels = [""] * n
        for i in range(n):
            labels[perm[i]] = tpm.labels[i]
    return Tpm(n, m, None if labels is None else tuple(labels))


def permute_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for e in elements(mask):
        out |= 1 << perm[e]
    return out


def tpm_to_dict(tpm: Tpm) -> dict:
    d = {"n": tpm.n, "convention": CONVENTION, "tpm": tpm.matrix.tolist()}
    if tpm.labels is not None:
        d["labels"] = list(tpm.labels)
    return d


def tpm_from_dict(d) -> Tpm:
    if not isinstance(d, dict):
        raise CeeError("bad-tpm-file", "top level must be a JSON object")
    unknown = set(d) - _TPM_FILE_KEYS
    if unknown:
        raise CeeError("bad-tpm-file", f"unknown fields {sorted(unknown)}")
    for key in ("n", "convention", "tpm"):
        if key not in d:
            raise CeeError("bad-tpm-file", f"missing field {key!r}")
    if d["convention"] != CONVENTION:
        raise CeeError("unknown-convention", f"{d['convention']!r} (only {CONVENTION!r} is supported)")
    n = d["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise CeeError("bad-tpm-file", f"n must be a non-negative integer, got {n!r}")
    return validate_tpm(d["tpm"], n, d.get("labels"))


def load_tpm(path) -> Tpm:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CeeError("bad-json", str(exc)) from None
    return tpm_from_dict(d)
