from .hashing import sha256, sponge_hash
from .signatures import (
    EcdsaSignature,
    KeyPair,
    SchnorrSignature,
    ecdsa_sign,
    ecdsa_verify,
    schnorr_sign,
    schnorr_verify,
)

__all__ = [
    "EcdsaSignature",
    "KeyPair",
    "SchnorrSignature",
    "ecdsa_sign",
    "ecdsa_verify",
    "schnorr_sign",
    "schnorr_verify",
    "sha256",
    "sponge_hash",
]
