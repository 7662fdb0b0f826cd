"""Gate-level arithmetic circuits over F_P.

A circuit is an ordered list of operations over numbered wires. Every
operation that produces a value allocates the next wire index, so the list is
topologically ordered by construction. Operations:

    input c            private input (supplied by the prover)
    public c           public input (bound to a label)
    add a b c          c = a + b
    mul a b c          c = a * b
    addc a k c         c = a + k
    mulc a k c         c = k * a
    hint kind a k c    c = advice computed from a (bit / quotient / remainder / inverse)
    assert a           a must equal zero

Hints are private inputs whose honest value is a fixed function of an earlier
wire; the constraints that follow them are what make them binding.
"""

from __future__ import annotations

import functools
import hashlib
import re
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import ArityMismatch, BuilderError, CircuitFormatError, UnsatisfiedConstraint
from ..field import P, FieldElement

INPUT, PUBLIC, ADD, MUL, ADDC, MULC, ASSERT, HINT = range(8)

OP_NAMES = {INPUT: "input", PUBLIC: "public", ADD: "add", MUL: "mul", ADDC: "addc",
            MULC: "mulc", ASSERT: "assert", HINT: "hint"}

HINT_KINDS = ("bit", "quo", "rem", "inv")

FORMAT_HEADER = "provenzk-circuit 1"

_LABEL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


def hint_value(kind: str, v: int, k: int) -> int:
    if kind == "bit":
        return (v >> k) & 1
    if kind == "quo":
        return v // k
    if kind == "rem":
        return v % k
    if kind == "inv":
        return pow(v, -1, P) if v else 0
    raise BuilderError(f"unknown hint kind {kind!r}")


class Wire:
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index

    def __repr__(self):
        return f"Wire({self.index})"

    def __eq__(self, other):
        return isinstance(other, Wire) and other.index == self.index

    def __hash__(self):
        return hash(("wire", self.index))


def _const(v) -> int:
    return int(v) % P


class PublicInputs:
    """Ordered, labelled public values."""

    def __init__(self, items: Iterable[tuple[str, object]]):
        pairs = [(str(label), FieldElement(v)) for label, v in items]
        labels = [lbl for lbl, _ in pairs]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate public label")
        self._items = tuple(pairs)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self._items)

    @property
    def values(self) -> tuple[FieldElement, ...]:
        return tuple(v for _, v in self._items)

    def items(self):
        return self._items

    def __getitem__(self, label: str) -> FieldElement:
        for lbl, v in self._items:
            if lbl == label:
                return v
        raise KeyError(label)

    def __contains__(self, label):
        return label in self.labels

    def __len__(self):
        return len(self._items)

    def __eq__(self, other):
        return isinstance(other, PublicInputs) and self._items == other._items

    def __repr__(self):
        return "PublicInputs(" + ", ".join(f"{l}={v.value}" for l, v in self._items) + ")"

    def replace(self, label: str, value) -> PublicInputs:
        if label not in self:
            raise KeyError(label)
        return PublicInputs((lbl, value if lbl == label else v) for lbl, v in self._items)

    def to_bytes(self) -> bytes:
        out = [struct.pack(">H", len(self._items))]
        for lbl, v in self._items:
            raw = lbl.encode()
            out.append(struct.pack(">H", len(raw)) + raw + v.to_bytes())
        return b"".join(out)

    def digest(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()

    def to_text(self) -> str:
        return "".join(f"{lbl} {v.hex()}\n" for lbl, v in self._items)

    @classmethod
    def from_text(cls, text: str) -> PublicInputs:
        items = []
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise CircuitFormatError(f"publics line {n}: expected '<label> <hex>'")
            try:
                value = int(parts[1], 16)
            except ValueError:
                raise CircuitFormatError(f"publics line {n}: bad hex value") from None
            if value >= P:
                raise CircuitFormatError(f"publics line {n}: value not canonical")
            items.append((parts[0], value))
        return cls(items)


@dataclass(frozen=True)
class Witness:
    """Total assignment of wire index to field value (stored as canonical ints)."""

    values: tuple[int, ...]

    def __getitem__(self, wire) -> FieldElement:
        idx = wire.index if isinstance(wire, Wire) else wire
        return FieldElement(self.values[idx])

    def __len__(self):
        return len(self.values)


class Circuit:
    """Finalized, immutable circuit. Construct via :class:`CircuitBuilder` or :meth:`parse`."""

    def __init__(self, n_wires: int, ops: Sequence[tuple], labels: Sequence[tuple[str, int]]):
        self.n_wires = n_wires
        self.ops = tuple(ops)
        self.public_labels = tuple(labels)
        self.input_wires = tuple(op[1] for op in self.ops if op[0] == INPUT)
        self.public_wires = tuple(w for _, w in self.public_labels)
        counts = [0] * 8
        for op in self.ops:
            counts[op[0]] += 1
        self.n_inputs = counts[INPUT]
        self.n_mul = counts[MUL]
        self.n_assert = counts[ASSERT]
        self.n_hint = counts[HINT]
        self.n_gates = len(self.ops) - counts[INPUT] - counts[PUBLIC]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.public_labels)

    @functools.cached_property
    def text(self) -> str:
        lines = [FORMAT_HEADER, f"modulus {P:x}", f"wires {self.n_wires}"]
        for op in self.ops:
            code = op[0]
            if code in (INPUT, PUBLIC):
                lines.append(f"{OP_NAMES[code]} {op[1]}")
            elif code in (ADD, MUL):
                lines.append(f"{OP_NAMES[code]} {op[1]} {op[2]} {op[3]}")
            elif code in (ADDC, MULC):
                lines.append(f"{OP_NAMES[code]} {op[1]} {op[2]:x} {op[3]}")
            elif code == ASSERT:
                lines.append(f"assert {op[1]}")
            else:
                lines.append(f"hint {op[1]} {op[2]} {op[3]:x} {op[4]}")
        for lbl, w in self.public_labels:
            lines.append(f"label {w} {lbl}")
        lines.append("end")
        return "\n".join(lines) + "\n"

    def serialize(self) -> bytes:
        return self.text.encode()

    @functools.cached_property
    def circuit_id(self) -> bytes:
        return hashlib.sha256(self.serialize()).digest()

    @property
    def circuit_id_hex(self) -> str:
        return self.circuit_id.hex()

    def stats(self) -> dict:
        return {"wires": self.n_wires, "gates": self.n_gates, "mul_gates": self.n_mul,
                "asserts": self.n_assert, "hints": self.n_hint, "inputs": self.n_inputs,
                "publics": len(self.public_labels)}

    def __eq__(self, other):
        return isinstance(other, Circuit) and self.circuit_id == other.circuit_id

    def __hash__(self):
        return hash(self.circuit_id)

    def __repr__(self):
        return f"Circuit(id={self.circuit_id_hex[:16]}, gates={self.n_gates}, mul={self.n_mul})"

    @classmethod
    def parse(cls, data: bytes | str) -> Circuit:
        text = data.decode() if isinstance(data, bytes) else data
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if len(lines) < 4 or lines[0] != FORMAT_HEADER:
            raise CircuitFormatError("missing circuit header")
        if lines[1] != f"modulus {P:x}":
            raise CircuitFormatError("field modulus mismatch")
        try:
            n_wires = int(lines[2].split()[1]) if lines[2].startswith("wires ") else -1
        except (IndexError, ValueError):
            raise CircuitFormatError("bad wire count") from None
        if n_wires < 0:
            raise CircuitFormatError("bad wire count")
        ops, labels, public_set = [], [], []
        nxt = 0
        ended = False

        def wire(tok, lineno):
            if not tok.isdigit():
                raise CircuitFormatError(f"line {lineno}: bad wire {tok!r}")
            w = int(tok)
            if w >= nxt:
                raise CircuitFormatError(f"line {lineno}: wire {w} read before definition")
            return w

        def const(tok, lineno):
            if not re.fullmatch(r"[0-9a-f]+", tok):
                raise CircuitFormatError(f"line {lineno}: bad constant {tok!r}")
            v = int(tok, 16)
            if v >= P:
                raise CircuitFormatError(f"line {lineno}: constant not canonical")
            return v

        def out(tok, lineno):
            if tok != str(nxt):
                raise CircuitFormatError(f"line {lineno}: expected output wire {nxt}")
            return nxt

        for lineno, line in enumerate(lines[3:], 4):
            if ended:
                raise CircuitFormatError(f"line {lineno}: content after end")
            parts = line.split(" ")
            kind = parts[0]
            if kind in ("input", "public") and len(parts) == 2:
                ops.append((INPUT if kind == "input" else PUBLIC, out(parts[1], lineno)))
                if kind == "public":
                    public_set.append(nxt)
                nxt += 1
            elif kind in ("add", "mul") and len(parts) == 4:
                a, b = wire(parts[1], lineno), wire(parts[2], lineno)
                ops.append((ADD if kind == "add" else MUL, a, b, out(parts[3], lineno)))
                nxt += 1
            elif kind in ("addc", "mulc") and len(parts) == 4:
                a, k = wire(parts[1], lineno), const(parts[2], lineno)
                ops.append((ADDC if kind == "addc" else MULC, a, k, out(parts[3], lineno)))
                nxt += 1
            elif kind == "assert" and len(parts) == 2:
                ops.append((ASSERT, wire(parts[1], lineno)))
            elif kind == "hint" and len(parts) == 5 and parts[1] in HINT_KINDS:
                a, k = wire(parts[2], lineno), const(parts[3], lineno)
                if parts[1] in ("quo", "rem") and k == 0:
                    raise CircuitFormatError(f"line {lineno}: zero divisor")
                ops.append((HINT, parts[1], a, k, out(parts[4], lineno)))
                nxt += 1
            elif kind == "label" and len(parts) == 3:
                w = int(parts[1]) if parts[1].isdigit() else -1
                if w not in public_set or not _LABEL_RE.match(parts[2]):
                    raise CircuitFormatError(f"line {lineno}: bad label entry")
                labels.append((parts[2], w))
            elif kind == "end" and len(parts) == 1:
                ended = True
            else:
                raise CircuitFormatError(f"line {lineno}: unrecognised entry {line!r}")
        if not ended:
            raise CircuitFormatError("missing end marker")
        if nxt != n_wires:
            raise CircuitFormatError(f"header declares {n_wires} wires, found {nxt}")
        if [w for _, w in labels] != public_set or len({l for l, _ in labels}) != len(labels):
            raise CircuitFormatError("label table must name every public wire once, in order")
        circuit = cls(n_wires, ops, labels)
        if circuit.text != text:
            raise CircuitFormatError("circuit text is not in canonical form")
        return circuit


class CircuitBuilder:
    """Allocates wires and emits gates; integer operands are folded as constants."""

    def __init__(self):
        self._ops: list[tuple] = []
        self._n = 0
        self._labels: list[tuple[str, int]] = []
        self._finalized = False

    @property
    def n_mul(self) -> int:
        return sum(1 for op in self._ops if op[0] == MUL)

    @property
    def n_ops(self) -> int:
        return len(self._ops)

    def count(self, code: int) -> int:
        return sum(1 for op in self._ops if op[0] == code)

    def _alloc(self) -> int:
        if self._finalized:
            raise BuilderError("builder already finalized")
        w = self._n
        self._n += 1
        return w

    def _idx(self, w) -> int:
        if not isinstance(w, Wire):
            raise BuilderError(f"expected a wire, got {w!r}")
        if not 0 <= w.index < self._n:
            raise BuilderError(f"wire {w.index} has not been allocated")
        return w.index

    def _check(self, v):
        if isinstance(v, Wire):
            self._idx(v)
            return v
        if isinstance(v, (int, FieldElement)):
            return _const(v)
        raise BuilderError(f"operand must be a Wire or a constant, got {type(v).__name__}")

    def input(self) -> Wire:
        w = self._alloc()
        self._ops.append((INPUT, w))
        return Wire(w)

    def inputs(self, n: int) -> list[Wire]:
        return [self.input() for _ in range(n)]

    def public(self, label: str) -> Wire:
        if not _LABEL_RE.match(label):
            raise BuilderError(f"invalid public label {label!r}")
        if any(lbl == label for lbl, _ in self._labels):
            raise BuilderError(f"duplicate public label {label!r}")
        w = self._alloc()
        self._ops.append((PUBLIC, w))
        self._labels.append((label, w))
        return Wire(w)

    def hint(self, kind: str, src: Wire, k: int = 0) -> Wire:
        if kind not in HINT_KINDS:
            raise BuilderError(f"unknown hint kind {kind!r}")
        a = self._idx(src)
        if kind in ("quo", "rem") and k == 0:
            raise BuilderError("zero divisor in hint")
        w = self._alloc()
        self._ops.append((HINT, kind, a, int(k) % P, w))
        return Wire(w)

    def add(self, a, b):
        a, b = self._check(a), self._check(b)
        if isinstance(a, int) and isinstance(b, int):
            return (a + b) % P
        if isinstance(a, int):
            a, b = b, a
        if isinstance(b, int):
            if b == 0:
                return a
            w = self._alloc()
            self._ops.append((ADDC, a.index, b, w))
            return Wire(w)
        w = self._alloc()
        self._ops.append((ADD, a.index, b.index, w))
        return Wire(w)

    def mul(self, a, b):
        a, b = self._check(a), self._check(b)
        if isinstance(a, int) and isinstance(b, int):
            return a * b % P
        if isinstance(a, int):
            a, b = b, a
        if isinstance(b, int):
            if b == 0:
                return 0
            if b == 1:
                return a
            w = self._alloc()
            self._ops.append((MULC, a.index, b, w))
            return Wire(w)
        w = self._alloc()
        self._ops.append((MUL, a.index, b.index, w))
        return Wire(w)

    def neg(self, a):
        return self.mul(a, P - 1)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def sum(self, values: Iterable):
        acc = 0
        for v in values:
            acc = self.add(acc, v)
        return acc

    def assert_zero(self, a) -> None:
        a = self._check(a)
        if isinstance(a, int):
            if a != 0:
                raise BuilderError(f"constant {a} asserted to be zero")
            return
        self._ops.append((ASSERT, a.index))

    def assert_equal(self, a, b) -> None:
        self.assert_zero(self.sub(a, b))

    def finalize(self) -> Circuit:
        self._finalized = True
        return Circuit(self._n, self._ops, self._labels)


def eval_witness(circuit: Circuit, private_inputs: Sequence, publics: PublicInputs) -> Witness:
    """Forward-evaluate every gate; raises on any violated assertion."""
    if len(private_inputs) != circuit.n_inputs:
        raise ArityMismatch(f"circuit takes {circuit.n_inputs} private inputs, "
                            f"got {len(private_inputs)}")
    if publics.labels != circuit.labels:
        raise ArityMismatch(f"public layout {publics.labels} != circuit {circuit.labels}")
    values = [0] * circuit.n_wires
    priv = iter([int(v) % P for v in private_inputs])
    pub = iter([v.value for v in publics.values])
    for idx, op in enumerate(circuit.ops):
        code = op[0]
        if code == ADD:
            values[op[3]] = (values[op[1]] + values[op[2]]) % P
        elif code == MUL:
            values[op[3]] = values[op[1]] * values[op[2]] % P
        elif code == ADDC:
            values[op[3]] = (values[op[1]] + op[2]) % P
        elif code == MULC:
            values[op[3]] = values[op[1]] * op[2] % P
        elif code == ASSERT:
            if values[op[1]]:
                raise UnsatisfiedConstraint(idx)
        elif code == HINT:
            values[op[4]] = hint_value(op[1], values[op[2]], op[3])
        elif code == INPUT:
            values[op[1]] = next(priv)
        else:
            values[op[1]] = next(pub)
    return Witness(tuple(values))


def check_witness(circuit: Circuit, witness: Witness, publics: PublicInputs) -> int | None:
    """Index of the first gate the full assignment violates, or ``None`` if it satisfies all."""
    v = witness.values
    if len(v) != circuit.n_wires or publics.labels != circuit.labels:
        return -1
    pub = iter([x.value for x in publics.values])
    for idx, op in enumerate(circuit.ops):
        code = op[0]
        if code == ADD:
            ok = v[op[3]] == (v[op[1]] + v[op[2]]) % P
        elif code == MUL:
            ok = v[op[3]] == v[op[1]] * v[op[2]] % P
        elif code == ADDC:
            ok = v[op[3]] == (v[op[1]] + op[2]) % P
        elif code == MULC:
            ok = v[op[3]] == v[op[1]] * op[2] % P
        elif code == ASSERT:
            ok = v[op[1]] == 0
        elif code == PUBLIC:
            ok = v[op[1]] == next(pub)
        else:
            ok = 0 <= v[op[-1]] < P
        if not ok:
            return idx
    return None
