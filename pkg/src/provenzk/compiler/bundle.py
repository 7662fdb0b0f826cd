"""Self-contained artifact bundle: the directory handed from compiler to prover."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from ..circuit.ir import Circuit, PublicInputs, Witness, eval_witness
from ..crypto.signatures import SchnorrSignature, schnorr_verify
from ..curve import CurvePoint
from ..errors import (
    CircuitFormatError,
    ConfigError,
    InvalidPoint,
    ManifestMismatch,
    SignatureInvalid,
)
from ..field import P
from .functions import FunctionSpec

BUNDLE_FORMAT = "provenzk-bundle 1"
CIRCUIT_FILE = "circuit.txt"
PUBLICS_FILE = "publics.txt"
WITNESS_FILE = "witness.txt"
SIGNATURE_FILE = "signature.bin"
MANIFEST_FILE = "manifest.txt"
_MANIFEST_KEYS = ("format", "circuit_id", "function_id", "function", "authority_public_key",
                  "result_labels", "native_result", "precision", "data_layout",
                  "signature_in_circuit", "wires", "gates", "mul_gates", "asserts",
                  "publics_sha256", "witness_sha256")


def _hex(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


def witness_text(values) -> str:
    return "".join(f"{int(v) % P:064x}\n" for v in values)


def parse_witness_text(text: str) -> tuple[int, ...]:
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            v = int(line, 16)
        except ValueError:
            raise CircuitFormatError(f"witness line {n}: bad hex value") from None
        if v >= P:
            raise CircuitFormatError(f"witness line {n}: value not canonical")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class ArtifactBundle:
    circuit: Circuit
    publics: PublicInputs
    private_inputs: tuple[int, ...]
    signature: SchnorrSignature
    function: FunctionSpec
    authority: CurvePoint
    native_result: tuple[int, ...]
    data_layout: tuple[str, ...]
    precision: int
    signature_in_circuit: bool = False

    @property
    def circuit_id(self) -> bytes:
        return self.circuit.circuit_id

    @property
    def function_id(self) -> bytes:
        return self.function.function_id

    @property
    def h_w(self):
        return self.publics["H_w"]

    def witness(self) -> Witness:
        return eval_witness(self.circuit, self.private_inputs, self.publics)

    def manifest(self) -> dict[str, str]:
        publics_text = self.publics.to_text().encode()
        stats = self.circuit.stats()
        return {
            "format": BUNDLE_FORMAT,
            "circuit_id": self.circuit_id.hex(),
            "function_id": self.function_id.hex(),
            "function": self.function.canonical_json(),
            "authority_public_key": self.authority.to_bytes().hex(),
            "result_labels": ",".join(self.function.result_labels),
            "native_result": ",".join(str(v) for v in self.native_result),
            "precision": str(self.precision),
            "data_layout": ";".join(self.data_layout),
            "signature_in_circuit": "yes" if self.signature_in_circuit else "no",
            "wires": str(stats["wires"]),
            "gates": str(stats["gates"]),
            "mul_gates": str(stats["mul_gates"]),
            "asserts": str(stats["asserts"]),
            "publics_sha256": _hex(publics_text),
            "witness_sha256": _hex(witness_text(self.private_inputs).encode()),
        }

    def files(self) -> dict[str, bytes]:
        manifest = "".join(f"{k}: {v}\n" for k, v in self.manifest().items())
        return {
            CIRCUIT_FILE: self.circuit.serialize(),
            PUBLICS_FILE: self.publics.to_text().encode(),
            WITNESS_FILE: witness_text(self.private_inputs).encode(),
            SIGNATURE_FILE: self.signature.to_bytes(),
            MANIFEST_FILE: manifest.encode(),
        }

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        for name, data in self.files().items():
            (path / name).write_bytes(data)
        return path


def parse_manifest(text: str) -> dict[str, str]:
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition(": ")
        if not sep or key in out:
            raise ManifestMismatch(f"manifest line {n} malformed")
        out[key] = value
    missing = [k for k in _MANIFEST_KEYS if k not in out]
    if missing:
        raise ManifestMismatch(f"manifest lacks {missing[0]}")
    if out["format"] != BUNDLE_FORMAT:
        raise ManifestMismatch(f"unsupported bundle format {out['format']!r}")
    return out


def load_bundle(path: str | Path) -> ArtifactBundle:
    """Read a bundle directory and re-validate every cross-reference."""
    path = Path(path)
    try:
        raw = {name: (path / name).read_bytes() for name in
               (CIRCUIT_FILE, PUBLICS_FILE, WITNESS_FILE, SIGNATURE_FILE, MANIFEST_FILE)}
    except OSError as exc:
        raise ManifestMismatch(f"incomplete bundle: {exc}") from None
    m = parse_manifest(raw[MANIFEST_FILE].decode())

    if hashlib.sha256(raw[CIRCUIT_FILE]).hexdigest() != m["circuit_id"]:
        raise ManifestMismatch("circuit file does not match manifest circuit_id")
    try:
        circuit = Circuit.parse(raw[CIRCUIT_FILE])
    except CircuitFormatError as exc:
        raise ManifestMismatch(f"circuit file unreadable: {exc}") from None
    try:
        function = FunctionSpec.from_dict(json.loads(m["function"]))
    except (ValueError, ConfigError) as exc:
        raise ManifestMismatch(f"function entry unreadable: {exc}") from None
    if function.function_id.hex() != m["function_id"]:
        raise ManifestMismatch("function_id does not match function entry")
    for fname, key in ((PUBLICS_FILE, "publics_sha256"), (WITNESS_FILE, "witness_sha256")):
        if _hex(raw[fname]) != m[key]:
            raise ManifestMismatch(f"{fname} does not match manifest")
    try:
        publics = PublicInputs.from_text(raw[PUBLICS_FILE].decode())
        private = parse_witness_text(raw[WITNESS_FILE].decode())
        authority = CurvePoint.from_bytes(bytes.fromhex(m["authority_public_key"]))
    except (CircuitFormatError, InvalidPoint, ValueError) as exc:
        raise ManifestMismatch(str(exc)) from None
    if publics.labels != circuit.labels:
        raise ManifestMismatch("public labels do not match the circuit")
    if (publics["pk_x"], publics["pk_y"]) != (authority.x, authority.y):
        raise ManifestMismatch("public key inputs disagree with manifest authority")

    try:
        signature = SchnorrSignature.from_bytes(raw[SIGNATURE_FILE])
    except ValueError as exc:
        raise SignatureInvalid(f"signature file unreadable: {exc}") from None
    if not schnorr_verify(authority, signature, publics["H_w"]):
        raise SignatureInvalid("signature does not verify over H_w")

    bundle = ArtifactBundle(
        circuit=circuit, publics=publics, private_inputs=private, signature=signature,
        function=function, authority=authority,
        native_result=tuple(int(v) for v in m["native_result"].split(",")),
        data_layout=tuple(m["data_layout"].split(";")),
        precision=int(m["precision"]),
        signature_in_circuit=m["signature_in_circuit"] == "yes")
    if bundle.files() != raw:
        raise ManifestMismatch("bundle does not re-emit byte-identically")
    return bundle
