"""Binary system states and element subsets.

States are little-endian integers: element 0 is the least-significant bit.
Element subsets (mechanisms, purviews, candidate systems) are bitmasks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import CeeError


def full_mask(n: int) -> int:
    return (1 << n) - 1


def check_mask(mask: int, n: int) -> int:
    if mask < 0 or mask > full_mask(n):
        raise CeeError("mask-out-of-range", f"mask {mask:#b} out of range for {n} elements")
    return mask


def check_state(state: int, n: int) -> int:
    if state < 0 or state >= (1 << n):
        raise CeeError("state-out-of-range", f"state index {state} out of range for {n} elements")
    return state


def elements(mask: int) -> list[int]:
    """Element indices in `mask`, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(elems: Sequence[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise CeeError("bad-state", f"non-binary value {b!r} at element {i}")
        idx |= b << i
    return idx


def index_to_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(n))


def submasks(mask: int) -> Iterator[int]:
    """All submasks of `mask` in ascending numeric order, including 0 and mask."""
    elems = elements(mask)
    for k in range(1 << len(elems)):
        yield mask_of([e for t, e in enumerate(elems) if (k >> t) & 1])


def compress(state: int, mask: int) -> int:
    """Project `state` onto the elements of `mask`, packed little-endian."""
    out = 0
    for t, e in enumerate(elements(mask)):
        out |= ((state >> e) & 1) << t
    return out


def expand(packed: int, mask: int) -> int:
    """Inverse of `compress`: scatter packed bits onto the elements of `mask`."""
    out = 0
    for t, e in enumerate(elements(mask)):
        out |= ((packed >> t) & 1) << e
    return out


def format_mask(mask: int) -> str:
    return "{" + ",".join(str(e) for e in elements(mask)) + "}"


@dataclass(frozen=True)
class SystemState:
    """A binary assignment to `n` elements."""

    index: int
    n: int

    def __post_init__(self):
        check_state(self.index, self.n)

    @property
    def bits(self) -> tuple[int, ...]:
        return index_to_bits(self.index, self.n)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "SystemState":
        return cls(bits_to_index(bits), len(bits))

    @classmethod
    def parse(cls, text: str, n: int) -> "SystemState":
        """Parse a bit string listing element 0 first, e.g. "101"."""
        text = text.strip()
        if len(text) != n or any(c not in "01" for c in text):
            raise CeeError("bad-state", f"state {text!r} must be {n} characters of 0/1 (element 0 first)")
        return cls.from_bits([int(c) for c in text])

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)
