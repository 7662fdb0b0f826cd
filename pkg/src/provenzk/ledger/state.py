"""Ledger records and canonical encodings."""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass

GENESIS = bytes(32)


def canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode()


def b64(data: bytes) -> str:
    return base64.b64encode(data).decode()


def unb64(text: str) -> bytes:
    return base64.b64decode(text.encode(), validate=True)


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


@dataclass(frozen=True)
class ProviderRecord:
    token_id: int
    owner: str
    public_key: bytes  # encoded curve point
    data_classes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"token_id": self.token_id, "owner": self.owner,
                "public_key": b64(self.public_key), "data_classes": list(self.data_classes)}

    @classmethod
    def from_dict(cls, d) -> ProviderRecord:
        return cls(d["token_id"], d["owner"], unb64(d["public_key"]), tuple(d["data_classes"]))


@dataclass(frozen=True)
class Policy:
    data_class: str
    expiry: int
    max_uses: int
    allowed_function_ids: tuple[str, ...]  # hex digests, sorted

    @classmethod
    def make(cls, data_class: str, expiry: int, max_uses: int, allowed_function_ids) -> Policy:
        ids = tuple(sorted({f.hex() if isinstance(f, bytes) else str(f)
                            for f in allowed_function_ids}))
        return cls(str(data_class), int(expiry), int(max_uses), ids)

    def to_dict(self) -> dict:
        return {"data_class": self.data_class, "expiry": self.expiry,
                "max_uses": self.max_uses, "allowed_function_ids": list(self.allowed_function_ids)}

    @classmethod
    def from_dict(cls, d) -> Policy:
        return cls.make(d["data_class"], d["expiry"], d["max_uses"], d["allowed_function_ids"])


@dataclass(frozen=True)
class AccessToken:
    token_id: int
    minter: str
    analyst: str
    policy: Policy
    uses: int = 0
    revoked: bool = False

    def to_dict(self) -> dict:
        return {"token_id": self.token_id, "minter": self.minter, "analyst": self.analyst,
                "policy": self.policy.to_dict(), "uses": self.uses, "revoked": self.revoked}

    @classmethod
    def from_dict(cls, d) -> AccessToken:
        return cls(d["token_id"], d["minter"], d["analyst"], Policy.from_dict(d["policy"]),
                   d["uses"], d["revoked"])


@dataclass(frozen=True)
class VerifierEntry:
    function_id: str
    circuit_id: str
    circuit_text: str

    def to_dict(self) -> dict:
        return {"function_id": self.function_id, "circuit_id": self.circuit_id,
                "circuit": self.circuit_text}

    @classmethod
    def from_dict(cls, d) -> VerifierEntry:
        return cls(d["function_id"], d["circuit_id"], d["circuit"])


@dataclass(frozen=True)
class AuditEntry:
    index: int
    timestamp: int
    action: str
    actor: str
    payload_hash: bytes
    outcome: str
    detail: str
    entry_hash: bytes

    def body(self) -> dict:
        return {"index": self.index, "timestamp": self.timestamp, "action": self.action,
                "actor": self.actor, "payload_hash": self.payload_hash.hex(),
                "outcome": self.outcome, "detail": self.detail}

    def expected_hash(self, prev: bytes) -> bytes:
        return sha256(prev + canonical(self.body()))

    def to_dict(self) -> dict:
        return dict(self.body(), entry_hash=self.entry_hash.hex())

    @classmethod
    def from_dict(cls, d) -> AuditEntry:
        return cls(d["index"], d["timestamp"], d["action"], d["actor"],
                   bytes.fromhex(d["payload_hash"]), d["outcome"], d["detail"],
                   bytes.fromhex(d["entry_hash"]))


@dataclass(frozen=True)
class AccessDecision:
    granted: bool
    reason: str | None = None

    def __bool__(self):
        return self.granted

    def __str__(self):
        return "grant" if self.granted else f"deny: {self.reason}"


@dataclass(frozen=True)
class SubmissionResult:
    status: str  # Accepted | PreCheckFailed | VerifierRejected | UnknownFunction | UnknownProvider
    reason: str = ""

    @property
    def accepted(self) -> bool:
        return self.status == "Accepted"

    def __bool__(self):
        return self.accepted

    def __str__(self):
        return self.status + (f": {self.reason}" if self.reason else "")


def chain_valid(entries, head: bytes | None = None, length: int | None = None,
                payload_hashes=None) -> bool:
    """Recompute the audit chain from genesis.

    ``head``/``length`` pin the anchored tip; ``payload_hashes`` (one per
    transaction) binds each entry to the transaction that produced it.
    """
    prev = GENESIS
    for i, entry in enumerate(entries):
        if entry.index != i or entry.expected_hash(prev) != entry.entry_hash:
            return False
        prev = entry.entry_hash
    if head is not None and prev != head:
        return False
    if length is not None and len(entries) != length:
        return False
    if payload_hashes is not None:
        if len(payload_hashes) != len(entries):
            return False
        if any(e.payload_hash != h for e, h in zip(entries, payload_hashes)):
            return False
    return True
