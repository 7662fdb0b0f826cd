"""Proof objects and their binary encoding.

Layout (lengths little-endian)::

    "FFSP" | version u16 | t u16 | circuit_id 32B | publics_hash 32B
    t x repetition:
        c0 c1 c2 (32B each)
        n_out u32 | output shares, party-major, 32B each (3 * n_out)
        challenge u8
        2 x opened view:  key 32B | seed 32B | n_vals u32 | values 32B each
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from ..errors import ProofFormatError
from ..field import P

MAGIC = b"FFSP"
VERSION = 1
ELEM = 32


@dataclass(frozen=True)
class OpenedView:
    key: bytes
    seed: bytes
    values: bytes  # gate-ordered share / mul-output values, 32B big-endian each

    @property
    def n_values(self) -> int:
        return len(self.values) // ELEM

    def view_bytes(self) -> bytes:
        return self.seed + self.values


@dataclass(frozen=True)
class Repetition:
    commitments: tuple[bytes, bytes, bytes]
    outputs: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    challenge: int
    opened: tuple[OpenedView, OpenedView]

    @property
    def opened_parties(self) -> tuple[int, int]:
        return self.challenge, (self.challenge + 1) % 3


@dataclass(frozen=True)
class Proof:
    circuit_id: bytes
    publics_hash: bytes
    repetitions: tuple[Repetition, ...]

    @property
    def t(self) -> int:
        return len(self.repetitions)

    def to_bytes(self) -> bytes:
        out = [MAGIC, struct.pack("<HH", VERSION, self.t), self.circuit_id, self.publics_hash]
        for rep in self.repetitions:
            out.extend(rep.commitments)
            n_out = len(rep.outputs[0])
            out.append(struct.pack("<I", n_out))
            for party in rep.outputs:
                out.append(b"".join(v.to_bytes(ELEM, "big") for v in party))
            out.append(bytes([rep.challenge]))
            for view in rep.opened:
                out.append(view.key + view.seed + struct.pack("<I", view.n_values))
                out.append(view.values)
        return b"".join(out)

    def __len__(self):
        return len(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> Proof:
        r = _Reader(data)
        if r.take(4) != MAGIC:
            raise ProofFormatError("bad magic")
        version, t = struct.unpack("<HH", r.take(4))
        if version != VERSION:
            raise ProofFormatError(f"unsupported proof version {version}")
        if t == 0:
            raise ProofFormatError("proof has no repetitions")
        circuit_id, publics_hash = r.take(32), r.take(32)
        reps = []
        for _ in range(t):
            commitments = (r.take(32), r.take(32), r.take(32))
            (n_out,) = struct.unpack("<I", r.take(4))
            outputs = tuple(tuple(r.element() for _ in range(n_out)) for _ in range(3))
            challenge = r.take(1)[0]
            if challenge > 2:
                raise ProofFormatError("challenge out of range")
            views = []
            for _ in range(2):
                key, seed = r.take(32), r.take(32)
                (n_vals,) = struct.unpack("<I", r.take(4))
                values = r.take(n_vals * ELEM)
                views.append(OpenedView(key, seed, values))
            reps.append(Repetition(commitments, outputs, challenge, tuple(views)))
        if not r.done():
            raise ProofFormatError("trailing bytes after proof")
        return cls(circuit_id, publics_hash, tuple(reps))


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ProofFormatError("truncated proof")
        chunk = bytes(self.data[self.pos:self.pos + n])
        self.pos += n
        return chunk

    def element(self) -> int:
        v = int.from_bytes(self.take(ELEM), "big")
        if v >= P:
            raise ProofFormatError("non-canonical field element")
        return v

    def done(self) -> bool:
        return self.pos == len(self.data)
