"""Single-writer ledger state machine.

Every public operation is encoded as a canonical transaction, appended to the
transaction log, and applied. Each transaction yields exactly one audit entry,
including refused ones; a refusal is audited first and then raised.
"""

from __future__ import annotations

import dataclasses
import json
import struct
import threading
from pathlib import Path

from ..circuit.ir import Circuit, PublicInputs
from ..crypto.signatures import SchnorrSignature, schnorr_verify
from ..curve import CurvePoint
from ..errors import (
    CircuitFormatError,
    CircuitIdMismatch,
    DuplicateFunction,
    InvalidKey,
    InvalidPoint,
    LedgerError,
    LedgerFormatError,
    NotOwner,
    NotProvider,
    UnknownToken,
)
from ..zkproof import verify
from .state import (
    GENESIS,
    AccessDecision,
    AccessToken,
    AuditEntry,
    Policy,
    ProviderRecord,
    SubmissionResult,
    VerifierEntry,
    b64,
    canonical,
    chain_valid,
    sha256,
    unb64,
)

SNAPSHOT_HEADER = "provenzk-ledger-snapshot 1"
TX_TYPES = ("register_provider", "update_provider_key", "mint_access_token", "check_access",
            "register_verifier", "submit_proof", "revoke")


def encode_record(tx: dict) -> bytes:
    body = canonical(tx)
    return struct.pack("<I", len(body)) + body


def decode_records(data: bytes) -> list[dict]:
    out, pos = [], 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise LedgerFormatError("truncated length prefix in transaction log")
        (n,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + n > len(data):
            raise LedgerFormatError("truncated transaction record")
        try:
            tx = json.loads(data[pos:pos + n])
        except ValueError:
            raise LedgerFormatError("transaction record is not valid JSON") from None
        if not isinstance(tx, dict) or tx.get("type") not in TX_TYPES:
            raise LedgerFormatError("unknown transaction type")
        if canonical(tx) != data[pos:pos + n]:
            raise LedgerFormatError("transaction record is not canonical")
        out.append(tx)
        pos += n
    return out


def _decode_key(raw: bytes) -> CurvePoint:
    try:
        pt = CurvePoint.from_bytes(raw)
    except InvalidPoint as exc:
        raise InvalidKey(str(exc)) from None
    if pt.infinity:
        raise InvalidKey("public key cannot be the identity")
    return pt


class Ledger:
    """Deterministic ledger; pass ``path`` to persist the transaction log."""

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self.path = Path(path) if path is not None else None
        self._reset()
        if self.path is not None and self.path.exists():
            self._apply_all(decode_records(self.path.read_bytes()))

    def _apply_all(self, records) -> None:
        for tx in records:
            try:
                self._run(tx)
            except LedgerError:
                pass

    def _reset(self):
        self._providers: dict[int, ProviderRecord] = {}
        self._tokens: dict[int, AccessToken] = {}
        self._verifiers: dict[str, VerifierEntry] = {}
        self._circuits: dict[str, Circuit] = {}
        self._audit: list[AuditEntry] = []
        self._head = GENESIS
        self._next_provider = 1
        self._next_token = 1
        self._records: list[dict] = []
        self._tx_hashes: list[bytes] = []

    # --- read side ---------------------------------------------------------

    @property
    def providers(self) -> dict[int, ProviderRecord]:
        return dict(self._providers)

    @property
    def tokens(self) -> dict[int, AccessToken]:
        return dict(self._tokens)

    @property
    def verifiers(self) -> dict[str, VerifierEntry]:
        return dict(self._verifiers)

    @property
    def audit(self) -> tuple[AuditEntry, ...]:
        return tuple(self._audit)

    @property
    def audit_head(self) -> bytes:
        return self._head

    @property
    def transactions(self) -> tuple[dict, ...]:
        return tuple(self._records)

    def provider(self, token_id: int) -> ProviderRecord:
        return self._providers[token_id]

    def token(self, token_id: int) -> AccessToken:
        return self._tokens[token_id]

    def state_dict(self) -> dict:
        return {
            "providers": [p.to_dict() for _, p in sorted(self._providers.items())],
            "tokens": [t.to_dict() for _, t in sorted(self._tokens.items())],
            "verifiers": [{"function_id": v.function_id, "circuit_id": v.circuit_id}
                          for _, v in sorted(self._verifiers.items())],
            "next_provider": self._next_provider,
            "next_token": self._next_token,
            "audit_length": len(self._audit),
            "audit_head": self._head.hex(),
        }

    @property
    def state_hash(self) -> bytes:
        return sha256(canonical(self.state_dict()))

    # --- transaction plumbing ---------------------------------------------

    def _submit(self, tx: dict):
        with self._lock:
            if self.path is not None:
                with open(self.path, "ab") as fh:
                    fh.write(encode_record(tx))
            return self._run(tx)

    def _run(self, tx: dict):
        self._records.append(tx)
        payload_hash = sha256(canonical(tx))
        self._tx_hashes.append(payload_hash)
        handler = getattr(self, "_tx_" + tx["type"])
        try:
            result, outcome, detail = handler(tx)
        except LedgerError as exc:
            self._append_audit(tx, payload_hash, f"Error:{exc.reason}", str(exc))
            raise
        self._append_audit(tx, payload_hash, outcome, detail)
        return result

    def _append_audit(self, tx, payload_hash, outcome, detail):
        body = AuditEntry(len(self._audit), int(tx["ts"]), tx["type"], str(tx["actor"]),
                          payload_hash, outcome, detail, b"")
        entry = dataclasses.replace(body, entry_hash=body.expected_hash(self._head))
        self._audit.append(entry)
        self._head = entry.entry_hash

    @classmethod
    def replay(cls, records) -> Ledger:
        """Rebuild state from transaction records (dicts or raw log bytes)."""
        if isinstance(records, (bytes, bytearray)):
            records = decode_records(bytes(records))
        ledger = cls()
        ledger._apply_all(records)
        return ledger

    # --- operations ----------------------------------------------------------

    def register_provider(self, actor: str, public_key, data_classes, *, ts: int = 0) -> int:
        raw = public_key.to_bytes() if isinstance(public_key, CurvePoint) else bytes(public_key)
        return self._submit({"type": "register_provider", "ts": ts, "actor": actor,
                             "public_key": b64(raw), "data_classes": sorted(set(data_classes))})

    def _tx_register_provider(self, tx):
        raw = unb64(tx["public_key"])
        _decode_key(raw)
        tid = self._next_provider
        self._next_provider += 1
        self._providers[tid] = ProviderRecord(tid, tx["actor"], raw, tuple(tx["data_classes"]))
        return tid, "Ok", f"provider {tid}"

    def update_provider_key(self, actor: str, token_id: int, new_key, *, ts: int = 0) -> None:
        raw = new_key.to_bytes() if isinstance(new_key, CurvePoint) else bytes(new_key)
        self._submit({"type": "update_provider_key", "ts": ts, "actor": actor,
                      "token_id": token_id, "public_key": b64(raw)})

    def _tx_update_provider_key(self, tx):
        rec = self._providers.get(tx["token_id"])
        if rec is None:
            raise UnknownToken(f"no provider token {tx['token_id']}")
        if rec.owner != tx["actor"]:
            raise NotOwner(f"{tx['actor']} does not own provider token {rec.token_id}")
        raw = unb64(tx["public_key"])
        _decode_key(raw)
        self._providers[rec.token_id] = ProviderRecord(rec.token_id, rec.owner, raw,
                                                       rec.data_classes)
        return None, "Ok", f"provider {rec.token_id}"

    def mint_access_token(self, actor: str, analyst: str, policy: Policy, *, ts: int = 0) -> int:
        return self._submit({"type": "mint_access_token", "ts": ts, "actor": actor,
                             "analyst": analyst, "policy": policy.to_dict()})

    def _tx_mint_access_token(self, tx):
        policy = Policy.from_dict(tx["policy"])
        if not any(p.owner == tx["actor"] and policy.data_class in p.data_classes
                   for p in self._providers.values()):
            raise NotProvider(f"{tx['actor']} provides no data of class {policy.data_class!r}")
        tid = self._next_token
        self._next_token += 1
        self._tokens[tid] = AccessToken(tid, tx["actor"], tx["analyst"], policy)
        return tid, "Ok", f"token {tid}"

    def check_access(self, actor: str, token_id: int, data_class: str, function_id,
                     now: int) -> AccessDecision:
        fid = function_id.hex() if isinstance(function_id, bytes) else str(function_id)
        return self._submit({"type": "check_access", "ts": now, "actor": actor,
                             "token_id": token_id, "data_class": data_class,
                             "function_id": fid})

    def _tx_check_access(self, tx):
        decision = self._decide(tx)
        if decision.granted:
            tok = self._tokens[tx["token_id"]]
            self._tokens[tok.token_id] = AccessToken(tok.token_id, tok.minter, tok.analyst,
                                                     tok.policy, tok.uses + 1, tok.revoked)
            return decision, "Grant", f"uses {tok.uses + 1}/{tok.policy.max_uses}"
        return decision, f"Deny:{decision.reason}", ""

    def _decide(self, tx) -> AccessDecision:
        tok = self._tokens.get(tx["token_id"])
        if tok is None:
            return AccessDecision(False, "UnknownToken")
        if tok.revoked:
            return AccessDecision(False, "Revoked")
        if tok.analyst != tx["actor"]:
            return AccessDecision(False, "NotHolder")
        if tok.policy.data_class != tx["data_class"]:
            return AccessDecision(False, "WrongDataClass")
        if tx["ts"] >= tok.policy.expiry:
            return AccessDecision(False, "Expired")
        if tok.uses >= tok.policy.max_uses:
            return AccessDecision(False, "Exhausted")
        if tx["function_id"] not in tok.policy.allowed_function_ids:
            return AccessDecision(False, "FunctionNotAllowed")
        return AccessDecision(True)

    def revoke(self, actor: str, token_id: int, *, ts: int = 0) -> None:
        self._submit({"type": "revoke", "ts": ts, "actor": actor, "token_id": token_id})

    def _tx_revoke(self, tx):
        tok = self._tokens.get(tx["token_id"])
        if tok is None:
            raise UnknownToken(f"no access token {tx['token_id']}")
        if tok.minter != tx["actor"]:
            raise NotOwner(f"{tx['actor']} did not mint token {tok.token_id}")
        self._tokens[tok.token_id] = AccessToken(tok.token_id, tok.minter, tok.analyst,
                                                 tok.policy, tok.uses, True)
        return None, "Ok", f"token {tok.token_id}"

    def register_verifier(self, actor: str, function_id, circuit_id, circuit, *,
                          ts: int = 0) -> None:
        text = circuit.text if isinstance(circuit, Circuit) else (
            circuit.decode() if isinstance(circuit, bytes) else str(circuit))
        self._submit({"type": "register_verifier", "ts": ts, "actor": actor,
                      "function_id": _hexid(function_id), "circuit_id": _hexid(circuit_id),
                      "circuit": text})

    def _tx_register_verifier(self, tx):
        fid, cid = tx["function_id"], tx["circuit_id"]
        if fid in self._verifiers:
            raise DuplicateFunction(f"function {fid[:16]} already has a verifier")
        if sha256(tx["circuit"].encode()).hex() != cid:
            raise CircuitIdMismatch("circuit does not hash to the claimed circuit_id")
        try:
            circuit = Circuit.parse(tx["circuit"])
        except CircuitFormatError as exc:
            raise CircuitIdMismatch(f"circuit unreadable: {exc}") from None
        self._verifiers[fid] = VerifierEntry(fid, cid, tx["circuit"])
        self._circuits[fid] = circuit
        return None, "Ok", f"function {fid[:16]}"

    def submit_proof(self, actor: str, function_id, provider_id: int, publics: PublicInputs,
                     signature, proof, *, ts: int = 0) -> SubmissionResult:
        sig = signature.to_bytes() if isinstance(signature, SchnorrSignature) else bytes(signature)
        prf = proof if isinstance(proof, (bytes, bytearray)) else proof.to_bytes()
        pub_text = publics.to_text() if isinstance(publics, PublicInputs) else str(publics)
        return self._submit({"type": "submit_proof", "ts": ts, "actor": actor,
                             "function_id": _hexid(function_id), "provider_id": provider_id,
                             "publics": pub_text, "signature": b64(sig), "proof": b64(bytes(prf))})

    def _tx_submit_proof(self, tx):
        result, pub_hash = self._evaluate_submission(tx)
        detail = f"publics {pub_hash}" if pub_hash else ""
        outcome = result.status + (f":{result.reason}" if result.reason else "")
        return result, outcome, detail

    def _evaluate_submission(self, tx) -> tuple[SubmissionResult, str]:
        try:
            publics = PublicInputs.from_text(tx["publics"])
        except (CircuitFormatError, ValueError):
            return SubmissionResult("PreCheckFailed", "MalformedPublics"), ""
        pub_hash = publics.digest().hex()
        rec = self._providers.get(tx["provider_id"])
        if rec is None:
            return SubmissionResult("UnknownProvider"), pub_hash
        circuit = self._circuits.get(tx["function_id"])
        if circuit is None:
            return SubmissionResult("UnknownFunction"), pub_hash
        if not {"H_w", "pk_x", "pk_y"} <= set(publics.labels):
            return SubmissionResult("PreCheckFailed", "MissingPublics"), pub_hash
        key = CurvePoint.from_bytes(rec.public_key)
        if (publics["pk_x"], publics["pk_y"]) != (key.x, key.y):
            return SubmissionResult("PreCheckFailed", "KeyMismatch"), pub_hash
        try:
            sig = SchnorrSignature.from_bytes(unb64(tx["signature"]))
        except ValueError:
            return SubmissionResult("PreCheckFailed", "MalformedSignature"), pub_hash
        if not schnorr_verify(key, sig, publics["H_w"]):
            return SubmissionResult("PreCheckFailed", "SignatureInvalid"), pub_hash
        verdict = verify(circuit, publics, unb64(tx["proof"]))
        if not verdict:
            return SubmissionResult("VerifierRejected", verdict.reason), pub_hash
        return SubmissionResult("Accepted"), pub_hash

    # --- snapshots -----------------------------------------------------------

    def export_snapshot(self) -> str:
        body = dict(self.state_dict(),
                    verifiers=[v.to_dict() for _, v in sorted(self._verifiers.items())],
                    audit=[e.to_dict() for e in self._audit],
                    tx_hashes=[h.hex() for h in self._tx_hashes])
        return f"{SNAPSHOT_HEADER}\nstate_hash {self.state_hash.hex()}\n{canonical(body).decode()}\n"

    @classmethod
    def import_snapshot(cls, text: str) -> Ledger:
        lines = text.split("\n")
        if len(lines) < 3 or lines[0] != SNAPSHOT_HEADER or not lines[1].startswith("state_hash "):
            raise LedgerFormatError("not a ledger snapshot")
        try:
            body = json.loads(lines[2])
            led = cls()
            led._providers = {d["token_id"]: ProviderRecord.from_dict(d) for d in body["providers"]}
            led._tokens = {d["token_id"]: AccessToken.from_dict(d) for d in body["tokens"]}
            led._verifiers = {d["function_id"]: VerifierEntry.from_dict(d)
                              for d in body["verifiers"]}
            led._circuits = {fid: Circuit.parse(v.circuit_text)
                             for fid, v in led._verifiers.items()}
            led._audit = [AuditEntry.from_dict(d) for d in body["audit"]]
            led._tx_hashes = [bytes.fromhex(h) for h in body["tx_hashes"]]
            led._head = bytes.fromhex(body["audit_head"])
            led._next_provider = body["next_provider"]
            led._next_token = body["next_token"]
        except (KeyError, TypeError, ValueError, CircuitFormatError) as exc:
            raise LedgerFormatError(f"snapshot body unreadable: {exc}") from None
        if led.state_hash.hex() != lines[1].split(" ", 1)[1]:
            raise LedgerFormatError("snapshot state_hash does not match its body")
        if body["audit_length"] != len(led._audit) or not verify_audit_chain(led):
            raise LedgerFormatError("snapshot audit chain is inconsistent")
        return led


def _hexid(v) -> str:
    return v.hex() if isinstance(v, (bytes, bytearray)) else str(v)


def verify_audit_chain(ledger: Ledger) -> bool:
    """Recompute every entry hash from genesis and check it against the anchored
    head, the entry count, and the transaction each entry records."""
    return chain_valid(ledger._audit, ledger._head, len(ledger._tx_hashes), ledger._tx_hashes)
