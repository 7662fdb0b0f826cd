"""Library of statement functions.

Each function is written once against a small arithmetic backend so the
same code drives both the native integer evaluation and circuit
construction. Native arithmetic is exact over the integers; the circuit
backend works over F_P and realizes the average as a range-checked
Euclidean division.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from ..circuit.gadgets import gadget_divmod
from ..circuit.ir import CircuitBuilder
from ..errors import ConfigError, GadgetError, ShapeMismatch
from ..field import P

PRIMITIVES = ("dot_product", "weighted_sum", "average_dot_products")
FUNCTION_NAMES = PRIMITIVES + ("compose",)
ARG_NAMES = {
    "dot_product": ("a", "b"),
    "weighted_sum": ("weights", "values"),
    "average_dot_products": ("matrix", "vector"),
}
RESULT_LABELS = {
    "dot_product": ("y",),
    "weighted_sum": ("y",),
    "average_dot_products": ("q", "r"),
}
QUOTIENT_BITS = 128
_QOFF = 1 << (QUOTIENT_BITS - 1)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


@dataclass(frozen=True)
class Operand:
    """A numeric argument: a shape plus row-major values (ints or wires)."""

    shape: tuple[int, ...]
    values: tuple

    @classmethod
    def vector(cls, values) -> Operand:
        values = tuple(values)
        return cls((len(values),), values)


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    args: tuple[tuple[str, object], ...] = ()
    steps: tuple[tuple[str, FunctionSpec], ...] = ()

    def arg(self, key):
        return dict(self.args)[key]

    def canonical(self) -> dict:
        if self.name == "compose":
            return {"name": "compose",
                    "steps": [dict(step.canonical(), **{"as": alias}) for alias, step in self.steps]}
        return {"name": self.name, "args": {k: v for k, v in self.args}}

    def canonical_json(self) -> str:
        return canonical_json(self.canonical())

    @property
    def function_id(self) -> bytes:
        return hashlib.sha256(self.canonical_json().encode()).digest()

    @property
    def result_labels(self) -> tuple[str, ...]:
        if self.name == "compose":
            return RESULT_LABELS[self.steps[-1][1].name]
        return RESULT_LABELS[self.name]

    @classmethod
    def from_dict(cls, d, path: str = "function") -> FunctionSpec:
        if not isinstance(d, dict):
            raise ConfigError(path, "must be an object")
        name = d.get("name")
        if name not in FUNCTION_NAMES:
            raise ConfigError(f"{path}.name", f"unknown function {name!r}")
        if name == "compose":
            steps = d.get("steps")
            if not isinstance(steps, list) or not steps:
                raise ConfigError(f"{path}.steps", "must be a non-empty list")
            parsed = []
            for i, st in enumerate(steps):
                spath = f"{path}.steps[{i}]"
                if not isinstance(st, dict) or st.get("name") not in PRIMITIVES:
                    raise ConfigError(f"{spath}.name", "compose steps must be library primitives")
                alias = st.get("as", f"step{i}")
                if not isinstance(alias, str) or not alias:
                    raise ConfigError(f"{spath}.as", "must be a non-empty string")
                if alias in [a for a, _ in parsed]:
                    raise ConfigError(f"{spath}.as", f"duplicate step name {alias!r}")
                parsed.append((alias, cls._primitive(st, spath)))
            return cls("compose", steps=tuple(parsed))
        return cls._primitive(d, path)

    @classmethod
    def _primitive(cls, d: dict, path: str) -> FunctionSpec:
        name = d["name"]
        args = d.get("args")
        if not isinstance(args, dict):
            raise ConfigError(f"{path}.args", "must be an object")
        expected = ARG_NAMES[name]
        extra = set(args) - set(expected)
        if extra:
            raise ConfigError(f"{path}.args", f"unexpected argument {sorted(extra)[0]!r}")
        out = []
        for key in expected:
            if key not in args:
                raise ConfigError(f"{path}.args.{key}", "missing")
            out.append((key, _check_ref(args[key], f"{path}.args.{key}",
                                        allow_const=(key == "weights"))))
        return cls(name, tuple(out))

    def references(self, path: str = "function") -> list[tuple[str, str]]:
        """(config path, name) for every external name this spec reads."""
        if self.name == "compose":
            refs, seen = [], set()
            for i, (alias, step) in enumerate(self.steps):
                refs.extend((p, n) for p, n in step.references(f"{path}.steps[{i}]")
                            if n not in seen)
                seen.add(alias)
            return refs
        refs = []
        for key, ref in self.args:
            for item in (ref if isinstance(ref, list) else [ref]):
                if isinstance(item, str):
                    refs.append((f"{path}.args.{key}", item))
        return refs


def _check_ref(v, path, allow_const):
    if isinstance(v, str) and v:
        return v
    if isinstance(v, list) and v:
        if all(isinstance(x, str) and x for x in v):
            return list(v)
        if allow_const and all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            return list(v)
    kinds = "a name, a list of names, or a list of integers" if allow_const else \
        "a name or a list of names"
    raise ConfigError(path, f"must be {kinds}")


# --- arithmetic backends ----------------------------------------------------

class NativeOps:
    def mul(self, a, b):
        return a * b

    def sum(self, xs):
        return sum(xs)

    def const(self, c):
        return c

    def average(self, total, m):
        q, r = divmod(total, m)
        return q, r


class CircuitOps:
    def __init__(self, builder: CircuitBuilder):
        self.b = builder

    def mul(self, a, b):
        return self.b.mul(a, b)

    def sum(self, xs):
        return self.b.sum(xs)

    def const(self, c):
        return c % P

    def average(self, total, m):
        shifted = self.b.add(total, m * _QOFF)
        q, r = gadget_divmod(self.b, shifted, m, QUOTIENT_BITS)
        return self.b.sub(q, _QOFF), r


def _dot(ops, a: Operand, b: Operand):
    if len(a.values) != len(b.values):
        raise ShapeMismatch(f"dot product of lengths {len(a.values)} and {len(b.values)}")
    return ops.sum(ops.mul(x, y) for x, y in zip(a.values, b.values))


def _apply(ops, spec: FunctionSpec, resolve) -> tuple:
    if spec.name == "dot_product":
        return (_dot(ops, resolve(spec.arg("a")), resolve(spec.arg("b"))),)
    if spec.name == "weighted_sum":
        w = spec.arg("weights")
        if isinstance(w, list) and all(isinstance(x, int) for x in w):
            weights = Operand.vector(ops.const(x) for x in w)
        else:
            weights = resolve(w)
        return (_dot(ops, weights, resolve(spec.arg("values"))),)
    if spec.name == "average_dot_products":
        mat, vec = resolve(spec.arg("matrix")), resolve(spec.arg("vector"))
        if len(mat.shape) != 2:
            raise ShapeMismatch(f"matrix argument must be 2-D, got shape {mat.shape}")
        rows, cols = mat.shape
        if len(vec.values) != cols:
            raise ShapeMismatch(f"vector of length {len(vec.values)} against {cols} columns")
        dots = [_dot(ops, Operand.vector(mat.values[i * cols:(i + 1) * cols]), vec)
                for i in range(rows)]
        return ops.average(ops.sum(dots), rows)
    raise ConfigError("function.name", f"not a primitive: {spec.name}")


def evaluate(ops, spec: FunctionSpec, env: dict[str, Operand]) -> tuple:
    """Run ``spec`` over named operands using the given backend."""
    env = dict(env)

    def resolve(ref) -> Operand:
        if isinstance(ref, list):
            if all(isinstance(x, int) for x in ref):
                return Operand.vector(ops.const(x) for x in ref)
            parts = [resolve(r) for r in ref]
            return Operand.vector(v for p in parts for v in p.values)
        if ref not in env:
            raise ShapeMismatch(f"no numeric operand named {ref!r}")
        return env[ref]

    if spec.name != "compose":
        return _apply(ops, spec, resolve)
    result: tuple = ()
    for alias, step in spec.steps:
        result = _apply(ops, step, resolve)
        env[alias] = Operand.vector(result)
    return result


def native_eval(spec: FunctionSpec, data: dict[str, Operand | list]) -> tuple[int, ...]:
    """Exact integer evaluation. ``data`` maps names to operands or nested lists."""
    env = {}
    for name, v in data.items():
        env[name] = v if isinstance(v, Operand) else _operand_from_nested(v)
    return tuple(evaluate(NativeOps(), spec, env))


def _operand_from_nested(values) -> Operand:
    shape = []
    probe = values
    while isinstance(probe, list):
        shape.append(len(probe))
        probe = probe[0] if probe else None
    flat = []

    def walk(v, depth):
        if depth == len(shape):
            flat.append(v)
            return
        if not isinstance(v, list) or len(v) != shape[depth]:
            raise ShapeMismatch("ragged nested array")
        for x in v:
            walk(x, depth + 1)

    walk(values, 0)
    if math.prod(shape) != len(flat):
        raise ShapeMismatch("ragged nested array")
    return Operand(tuple(shape), tuple(flat))


def check_result_range(spec: FunctionSpec, result: tuple[int, ...]) -> None:
    """Reject native results the circuit cannot reproduce without wrap-around."""
    labels = spec.result_labels
    for label, v in zip(labels, result):
        if label == "q" and not -_QOFF <= v < _QOFF:
            raise GadgetError(f"average quotient {v} outside the {QUOTIENT_BITS}-bit signed range")
        if abs(v) >= P // 2:
            raise GadgetError(f"result {label}={v} exceeds half the field modulus")
