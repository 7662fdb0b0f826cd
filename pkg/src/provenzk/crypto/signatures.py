"""Schnorr and ECDSA over the embedded curve, with deterministic nonces."""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass

from ..curve import G, CurvePoint, _require_on_curve, double_scalar_mul, scalar_mul
from ..errors import InvalidPoint
from ..field import Q, FieldElement, Scalar
from .hashing import sha256, sponge_hash, u32be

SIGNATURE_SIZE = 64


@dataclass(frozen=True)
class KeyPair:
    sk: Scalar
    pk: CurvePoint

    @classmethod
    def from_secret(cls, sk) -> KeyPair:
        sk = Scalar(sk)
        if sk.value == 0:
            raise ValueError("secret key must be nonzero")
        return cls(sk, scalar_mul(sk, G))

    @classmethod
    def generate(cls, seed=None) -> KeyPair:
        """Fresh key pair; a ``seed`` makes generation reproducible (test mode)."""
        if seed is None:
            return cls.from_secret(secrets.randbelow(Q - 1) + 1)
        return cls.from_secret(random.Random(seed).randrange(1, Q))

    def secret_bytes(self) -> bytes:
        return self.sk.to_bytes()

    def public_bytes(self) -> bytes:
        return self.pk.to_bytes()

    @classmethod
    def from_secret_bytes(cls, data: bytes) -> KeyPair:
        return cls.from_secret(Scalar.from_bytes(data))


def derive_nonce(sk: Scalar, msg_bytes: bytes) -> int:
    """k = sha256(sk || msg || "FFS-NONCE") mod Q; a counter suffix retries k = 0."""
    base = sk.to_bytes() + msg_bytes + b"FFS-NONCE"
    k = int.from_bytes(sha256(base), "big") % Q
    ctr = 0
    while k == 0:
        ctr += 1
        k = int.from_bytes(sha256(base + u32be(ctr)), "big") % Q
    return k


@dataclass(frozen=True)
class SchnorrSignature:
    e: FieldElement
    s: Scalar

    def to_bytes(self) -> bytes:
        return self.e.to_bytes() + self.s.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> SchnorrSignature:
        if len(data) != SIGNATURE_SIZE:
            raise ValueError(f"signature must be {SIGNATURE_SIZE} bytes")
        return cls(FieldElement.from_bytes(data[:32]), Scalar.from_bytes(data[32:]))


def schnorr_challenge(R: CurvePoint, pk: CurvePoint, msg) -> FieldElement:
    return sponge_hash([R.x, R.y, pk.x, pk.y, FieldElement(msg)])


def schnorr_sign(kp: KeyPair, msg) -> SchnorrSignature:
    msg = FieldElement(msg)
    k = derive_nonce(kp.sk, msg.to_bytes())
    R = scalar_mul(k, G)
    e = schnorr_challenge(R, kp.pk, msg)
    s = (k - e.value * kp.sk.value) % Q
    return SchnorrSignature(e, Scalar(s))


def schnorr_verify(pk: CurvePoint, sig: SchnorrSignature, msg) -> bool:
    _require_on_curve(pk)
    if pk.infinity:
        raise InvalidPoint("public key cannot be the identity")
    R = double_scalar_mul(sig.s, G, sig.e.value, pk)
    if R.infinity:
        return False
    return schnorr_challenge(R, pk, msg) == sig.e


@dataclass(frozen=True)
class EcdsaSignature:
    r: Scalar
    s: Scalar

    def to_bytes(self) -> bytes:
        return self.r.to_bytes() + self.s.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> EcdsaSignature:
        if len(data) != SIGNATURE_SIZE:
            raise ValueError(f"signature must be {SIGNATURE_SIZE} bytes")
        return cls(Scalar.from_bytes(data[:32]), Scalar.from_bytes(data[32:]))


def digest_scalar(digest: bytes) -> int:
    return int.from_bytes(digest, "big") % Q


def ecdsa_sign(kp: KeyPair, digest: bytes) -> EcdsaSignature:
    if len(digest) != 32:
        raise ValueError("digest must be 32 bytes")
    h = digest_scalar(digest)
    d = kp.sk.value
    ctr = 0
    while True:
        # retries feed a fresh counter into the nonce derivation
        k = derive_nonce(kp.sk, digest if ctr == 0 else digest + u32be(ctr))
        x1 = scalar_mul(k, G).x.value
        r = x1 % Q
        s = pow(k, -1, Q) * (h + d * r) % Q
        if r and s:
            return EcdsaSignature(Scalar(r), Scalar(s))
        ctr += 1


def ecdsa_verify(pk: CurvePoint, digest: bytes, sig: EcdsaSignature) -> bool:
    _require_on_curve(pk)
    if pk.infinity:
        raise InvalidPoint("public key cannot be the identity")
    r, s = sig.r.value, sig.s.value
    if not (0 < r < Q and 0 < s < Q):
        return False
    h = digest_scalar(digest)
    w = pow(s, -1, Q)
    u1 = h * w % Q
    u2 = r * w % Q
    X = double_scalar_mul(u1, G, u2, pk)
    if X.infinity:
        return False
    return r == X.x.value % Q
