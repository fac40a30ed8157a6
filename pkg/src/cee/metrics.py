"""Distances between repertoires over binary state spaces."""
from __future__ import annotations

import os
from functools import lru_cache
from typing import Literal

import numpy as np

# POT probes every array backend on import; none of them is needed here.
for _backend in ("TENSORFLOW", "PYTORCH", "JAX", "CUPY"):
    os.environ.setdefault(f"POT_BACKEND_DISABLE_{_backend}", "1")

import ot  # noqa: E402

Metric = Literal["emd", "id"]
METRICS: tuple[Metric, ...] = ("emd", "id")


@lru_cache(maxsize=None)
def hamming_matrix(num_bits: int) -> np.ndarray:
    s = np.arange(1 << num_bits)
    x = s[:, None] ^ s[None, :]
    d = np.zeros_like(x)
    for b in range(num_bits):
        d += (x >> b) & 1
    m = np.ascontiguousarray(d, dtype=float)
    m.setflags(write=False)
    return m


def emd(p: np.ndarray, q: np.ndarray) -> float:
    """Earth mover's distance with the Hamming ground metric on {0,1}^k."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    size = p.shape[0]
    num_bits = size.bit_length() - 1
    if size != 1 << num_bits:
        raise ValueError(f"state space of size {size} is not a power of two")
    if size == 1:
        return 0.0
    if size == 2:
        return abs(float(p[0] - q[0]))
    # the LP requires non-negative, equal masses to machine precision
    p = np.clip(p, 0.0, None)
    q = np.clip(q, 0.0, None)
    return float(ot.emd2(p / p.sum(), q / q.sum(), hamming_matrix(num_bits)))


def intrinsic_difference(p: np.ndarray, q: np.ndarray) -> float:
    """max_s p(s) log2(p(s)/q(s)); infinite if q misses support of p."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    support = p > 0
    if np.any(q[support] <= 0):
        return float("inf")
    terms = p[support] * np.log2(p[support] / q[support])
    return max(0.0, float(terms.max())) if terms.size else 0.0


def distance(p: np.ndarray, q: np.ndarray, metric: Metric = "emd") -> float:
    """Distance from the intact repertoire `p` to the cut repertoire `q`."""
    if metric == "emd":
        return emd(p, q)
    if metric == "id":
        return intrinsic_difference(p, q)
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
