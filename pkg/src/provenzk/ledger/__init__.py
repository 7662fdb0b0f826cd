from .core import Ledger, decode_records, encode_record, verify_audit_chain
from .state import (
    AccessDecision,
    AccessToken,
    AuditEntry,
    Policy,
    ProviderRecord,
    SubmissionResult,
    VerifierEntry,
)

__all__ = [
    "AccessDecision",
    "AccessToken",
    "AuditEntry",
    "Ledger",
    "Policy",
    "ProviderRecord",
    "SubmissionResult",
    "VerifierEntry",
    "decode_records",
    "encode_record",
    "verify_audit_chain",
]
