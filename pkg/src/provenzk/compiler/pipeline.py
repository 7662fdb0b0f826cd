"""Config to circuit: provenance check plus statement check over one witness."""

from __future__ import annotations

from ..circuit.gadgets import gadget_schnorr_verify, gadget_sponge
from ..circuit.ir import CircuitBuilder, PublicInputs, eval_witness
from ..crypto.hashing import sponge_hash
from ..crypto.signatures import KeyPair, SchnorrSignature, schnorr_sign, schnorr_verify
from ..curve import CurvePoint
from ..errors import ConfigError, GadgetError, InvalidPoint, SignatureInvalid
from ..field import P, FieldElement
from .bundle import ArtifactBundle
from .config import CircuitConfig
from .functions import CircuitOps, FunctionSpec, Operand, check_result_range, evaluate, native_eval


def data_digest(cfg: CircuitConfig) -> FieldElement:
    """H_w: sponge hash of the flattened, quantized data."""
    return sponge_hash(cfg.encoded_data())


def sign_data(cfg: CircuitConfig, kp: KeyPair) -> tuple[FieldElement, SchnorrSignature]:
    h_w = data_digest(cfg)
    return h_w, schnorr_sign(kp, h_w)


def _authority(cfg: CircuitConfig, h_w: FieldElement) -> tuple[CurvePoint, SchnorrSignature]:
    a = cfg.authority
    try:
        if a.secret_key is not None:
            kp = KeyPair.from_secret_bytes(a.secret_key)
            if a.public_key is not None and CurvePoint.from_bytes(a.public_key) != kp.pk:
                raise ConfigError("authority.public_key", "does not match the private key")
            return kp.pk, schnorr_sign(kp, h_w)
        pk = CurvePoint.from_bytes(a.public_key)
        sig = SchnorrSignature.from_bytes(a.signature)
    except InvalidPoint as exc:
        raise ConfigError("authority.public_key", str(exc)) from None
    except ValueError as exc:
        raise ConfigError("authority", str(exc)) from None
    if not schnorr_verify(pk, sig, h_w):
        raise SignatureInvalid("supplied signature does not cover this data")
    return pk, sig


def _function_spec(cfg: CircuitConfig) -> FunctionSpec:
    spec = FunctionSpec.from_dict(cfg.function)
    kinds = {a.name: a.kind for a in cfg.data}
    for path, name in spec.references():
        if name not in kinds:
            raise ConfigError(path, f"unknown data array {name!r}")
        if kinds[name] == "string":
            raise ConfigError(path, f"string array {name!r} cannot be a numeric argument")
    return spec


def native_operands(cfg: CircuitConfig) -> dict[str, Operand]:
    return {a.name: Operand(a.shape, tuple(a.quantized(cfg.precision)))
            for a in cfg.data if a.kind != "string"}


def compile_config(cfg: CircuitConfig) -> ArtifactBundle:
    spec = _function_spec(cfg)
    result = native_eval(spec, native_operands(cfg))
    check_result_range(spec, result)

    h_w = data_digest(cfg)
    pk, sig = _authority(cfg, h_w)
    if cfg.signature_in_circuit and sig.s.value >= P:
        raise GadgetError("signature scalar exceeds the circuit field; re-sign the data")

    b = CircuitBuilder()
    h_pub = b.public("H_w")
    y_pubs = [b.public(label) for label in spec.result_labels]
    pk_x, pk_y = b.public("pk_x"), b.public("pk_y")

    private: list[int] = []
    flat_wires: list = []
    env: dict[str, Operand] = {}
    for arr in cfg.data:
        encoded = arr.encode(cfg.precision)
        wires = b.inputs(len(encoded))
        private.extend(encoded)
        flat_wires.append(arr.size)
        flat_wires.extend(wires)
        if arr.kind != "string":
            env[arr.name] = Operand(arr.shape, tuple(wires))

    b.assert_equal(gadget_sponge(b, flat_wires), h_pub)
    outputs = evaluate(CircuitOps(b), spec, env)
    for out, pub in zip(outputs, y_pubs):
        b.assert_equal(out, pub)
    if cfg.signature_in_circuit:
        e_w, s_w = b.input(), b.input()
        private.extend([sig.e.value, sig.s.value])
        gadget_schnorr_verify(b, pk_x, pk_y, e_w, s_w, h_pub)
    circuit = b.finalize()

    publics = PublicInputs([("H_w", h_w)]
                           + [(lbl, v) for lbl, v in zip(spec.result_labels, result)]
                           + [("pk_x", pk.x), ("pk_y", pk.y)])
    eval_witness(circuit, private, publics)

    layout = tuple(f"{a.name}:{a.kind}:{'x'.join(map(str, a.shape))}" for a in cfg.data)
    return ArtifactBundle(circuit, publics, tuple(private), sig, spec, pk, result, layout,
                          cfg.precision, cfg.signature_in_circuit)


