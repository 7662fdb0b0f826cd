"""Declarative statement configuration and data encoding.

Data arrays are flattened row-major and concatenated in config order. Each
array contributes its element count followed by its elements; a string
element contributes its UTF-8 byte length followed by 31-byte big-endian
chunks. The resulting field vector is what the authority signs (via the
sponge hash) and what the circuit re-hashes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from pathlib import Path
from typing import Any

from ..errors import ConfigError, QuantizationError
from ..field import P, FieldElement

CONFIG_VERSION = 1
DEFAULT_PRECISION = 2
KINDS = ("int", "double", "string")
STRING_CHUNK = 31
QUANT_LIMIT = 1 << 63


def quantize(value, precision: int) -> FieldElement:
    """round(value * 10^precision), half away from zero; negatives map to P - |n|."""
    return FieldElement(quantize_int(value, precision))


def quantize_int(value, precision: int) -> int:
    if precision < 0:
        raise QuantizationError("precision must be non-negative")
    try:
        d = Decimal(str(value)) if not isinstance(value, Decimal) else value
        n = (d.scaleb(precision)).quantize(Decimal(1), rounding=ROUND_HALF_UP)
    except InvalidOperation:
        raise QuantizationError(f"cannot quantize {value!r}") from None
    if not n.is_finite() or abs(n) >= QUANT_LIMIT:
        raise QuantizationError(f"{value!r} at precision {precision} exceeds 2^63")
    return int(n)


def pack_string(s: str) -> list[int]:
    raw = s.encode("utf-8")
    return [len(raw)] + [int.from_bytes(raw[i:i + STRING_CHUNK], "big")
                         for i in range(0, len(raw), STRING_CHUNK)]


def _flatten(values, shape, path):
    if not shape:
        return [values]
    if not isinstance(values, list) or len(values) != shape[0]:
        raise ConfigError(path, f"expected {shape[0]} entries at this level")
    out = []
    for i, v in enumerate(values):
        out.extend(_flatten(v, shape[1:], f"{path}[{i}]"))
    return out


def _infer_shape(values) -> list[int]:
    shape = []
    while isinstance(values, list):
        shape.append(len(values))
        values = values[0] if values else None
    return shape


@dataclass(frozen=True)
class DataArray:
    name: str
    kind: str
    shape: tuple[int, ...]
    elements: tuple  # flattened raw values (int, float/str-decimal, or str)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def quantized(self, precision: int) -> list[int]:
        """Signed integers for numeric kinds."""
        if self.kind == "int":
            return list(self.elements)
        if self.kind == "double":
            return [quantize_int(v, precision) for v in self.elements]
        raise ConfigError(f"data.{self.name}", "string arrays have no numeric value")

    def encode(self, precision: int) -> list[int]:
        """Field encoding of the elements (no array-length prefix)."""
        if self.kind == "string":
            out = []
            for s in self.elements:
                out.extend(pack_string(s))
            return out
        return [v % P for v in self.quantized(precision)]

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "shape": list(self.shape),
                "values": _nest(list(self.elements), list(self.shape))}


def _nest(flat, shape):
    if not shape:
        return flat[0]
    if len(shape) == 1:
        return flat
    step = math.prod(shape[1:])
    return [_nest(flat[i * step:(i + 1) * step], shape[1:]) for i in range(shape[0])]


@dataclass(frozen=True)
class Authority:
    secret_key: bytes | None = None
    public_key: bytes | None = None
    signature: bytes | None = None


@dataclass(frozen=True)
class CircuitConfig:
    data: tuple[DataArray, ...]
    authority: Authority
    function: dict
    precision: int = DEFAULT_PRECISION
    version: int = CONFIG_VERSION
    signature_in_circuit: bool = False
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def array(self, name: str) -> DataArray:
        for arr in self.data:
            if arr.name == name:
                return arr
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.data)

    def encoded_data(self) -> list[int]:
        """Full field vector fed to the sponge: per array, count then elements."""
        out = []
        for arr in self.data:
            out.append(arr.size)
            out.extend(arr.encode(self.precision))
        return out

    @classmethod
    def from_dict(cls, d: dict, base_dir: str | Path | None = None, *,
                  require_authority: bool = True) -> CircuitConfig:
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be an object")
        version = d.get("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigError("version", f"unsupported version {version!r}")
        precision = d.get("precision", DEFAULT_PRECISION)
        if not isinstance(precision, int) or isinstance(precision, bool) or precision < 0:
            raise ConfigError("precision", "must be a non-negative integer")
        data = tuple(_parse_array(a, f"data[{i}]") for i, a in
                     enumerate(_require_list(d.get("data"), "data")))
        names = [a.name for a in data]
        if len(set(names)) != len(names):
            raise ConfigError("data", "array names must be unique")
        authority = _parse_authority(d.get("authority", {}), Path(base_dir or "."),
                                     require_authority)
        function = d.get("function")
        if not isinstance(function, dict) or "name" not in function:
            raise ConfigError("function", "must be an object with a name")
        options = d.get("options", {})
        if not isinstance(options, dict):
            raise ConfigError("options", "must be an object")
        in_circuit = options.get("signature_in_circuit", False)
        if not isinstance(in_circuit, bool):
            raise ConfigError("options.signature_in_circuit", "must be a boolean")
        return cls(data, authority, function, precision, version, in_circuit, d)


def load_config(path: str | Path, *, require_authority: bool = True) -> CircuitConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    return CircuitConfig.from_dict(raw, base_dir=path.parent,
                                   require_authority=require_authority)


def _require_list(v, path) -> list:
    if not isinstance(v, list) or not v:
        raise ConfigError(path, "must be a non-empty list")
    return v


def _parse_array(a: Any, path: str) -> DataArray:
    if not isinstance(a, dict):
        raise ConfigError(path, "must be an object")
    name = a.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError(f"{path}.name", "must be a non-empty string")
    kind = a.get("kind", "int")
    if kind not in KINDS:
        raise ConfigError(f"{path}.kind", f"must be one of {KINDS}")
    values = a.get("values")
    if values is None:
        raise ConfigError(f"{path}.values", "missing")
    shape = a.get("shape", _infer_shape(values))
    if not isinstance(shape, list) or not shape or \
            any(not isinstance(s, int) or isinstance(s, bool) or s < 1 for s in shape):
        raise ConfigError(f"{path}.shape", "must be a non-empty list of positive integers")
    flat = _flatten(values, shape, f"{path}.values")
    for i, v in enumerate(flat):
        vpath = f"{path}.values[{i}]"
        if kind == "int":
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(vpath, "expected an integer")
            if abs(v) >= QUANT_LIMIT:
                raise ConfigError(vpath, "integer magnitude must be below 2^63")
        elif kind == "double":
            if isinstance(v, bool) or not isinstance(v, (int, float, str)):
                raise ConfigError(vpath, "expected a number")
        elif not isinstance(v, str):
            raise ConfigError(vpath, "expected a string")
    return DataArray(name, kind, tuple(shape), tuple(flat))


def _read_hex_or_file(spec: dict, key: str, file_key: str, base: Path, path: str):
    if key in spec:
        try:
            return bytes.fromhex(spec[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{path}.{key}", "must be hex") from None
    if file_key in spec:
        p = base / spec[file_key]
        try:
            return p.read_bytes()
        except OSError as exc:
            raise ConfigError(f"{path}.{file_key}", f"cannot read {p}: {exc}") from None
    return None


def _parse_authority(a: Any, base: Path, required: bool = True) -> Authority:
    if not isinstance(a, dict):
        raise ConfigError("authority", "must be an object")
    sk = _read_hex_or_file(a, "private_key", "keyfile", base, "authority")
    pk = _read_hex_or_file(a, "public_key", "public_keyfile", base, "authority")
    sig = _read_hex_or_file(a, "signature", "signature_file", base, "authority")
    if required and sk is None and (pk is None or sig is None):
        raise ConfigError("authority", "need a private key, or a public key plus signature")
    return Authority(sk, pk, sig)
