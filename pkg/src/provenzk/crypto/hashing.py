"""Byte-level SHA-256 and the algebraic sponge over F_P.

The sponge has width 3 (rate 2, capacity 1). Its initial state is
``(0, 0, len(inputs))`` and every absorbed pair is followed by one call of the
permutation, so an empty input still runs the permutation once. The same
constants and schedule are replayed gate-by-gate by the circuit gadget.
"""

from __future__ import annotations

import functools
import hashlib
import struct
from typing import Iterable

from ..field import P, FieldElement

WIDTH = 3
RATE = 2
ROUNDS = 57
MDS = ((2, 1, 1), (1, 2, 1), (1, 1, 2))


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def u32be(n: int) -> bytes:
    return struct.pack(">I", n)


@functools.lru_cache(maxsize=None)
def round_constants() -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(int.from_bytes(sha256(b"FFS-RC" + u32be(i) + u32be(j)), "big") % P
              for j in range(WIDTH))
        for i in range(ROUNDS)
    )


def permute(state: list[int]) -> list[int]:
    s0, s1, s2 = state
    for c0, c1, c2 in round_constants():
        s0 = pow(s0 + c0, 5, P)
        s1 = pow(s1 + c1, 5, P)
        s2 = pow(s2 + c2, 5, P)
        t = s0 + s1 + s2
        s0, s1, s2 = (s0 + t) % P, (s1 + t) % P, (s2 + t) % P
    return [s0, s1, s2]


def sponge_hash(inputs: Iterable) -> FieldElement:
    items = [int(v) % P for v in inputs]
    state = [0, 0, len(items) % P]
    chunks = [items[i:i + RATE] for i in range(0, len(items), RATE)] or [[]]
    for chunk in chunks:
        for lane, v in enumerate(chunk):
            state[lane] = (state[lane] + v) % P
        state = permute(state)
    return FieldElement(state[0])
