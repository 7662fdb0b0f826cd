"""Exception hierarchy shared across the package."""


class ProvenZKError(Exception):
    """Base class for every domain error raised by this package."""


class DivisionByZero(ProvenZKError, ZeroDivisionError):
    pass


class InvalidPoint(ProvenZKError, ValueError):
    pass


class BuilderError(ProvenZKError):
    pass


class GadgetError(ProvenZKError):
    pass


class CircuitFormatError(ProvenZKError, ValueError):
    pass


class ArityMismatch(ProvenZKError, ValueError):
    pass


class UnsatisfiedConstraint(ProvenZKError):
    def __init__(self, gate_index, message=None):
        self.gate_index = gate_index
        super().__init__(message or f"constraint violated at gate {gate_index}")


class QuantizationError(ProvenZKError, ValueError):
    pass


class ConfigError(ProvenZKError, ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class ShapeMismatch(ProvenZKError, ValueError):
    pass


class ManifestMismatch(ProvenZKError):
    pass


class SignatureInvalid(ProvenZKError):
    pass


class UnsatisfiedWitness(ProvenZKError):
    pass


class ProofFormatError(ProvenZKError, ValueError):
    pass


class LedgerError(ProvenZKError):
    """A transaction was refused; the refusal itself is recorded in the audit log."""

    reason = "LedgerError"


class NotOwner(LedgerError):
    reason = "NotOwner"


class UnknownToken(LedgerError):
    reason = "UnknownToken"


class NotProvider(LedgerError):
    reason = "NotProvider"


class DuplicateFunction(LedgerError):
    reason = "DuplicateFunction"


class CircuitIdMismatch(LedgerError):
    reason = "CircuitIdMismatch"


class InvalidKey(LedgerError):
    reason = "InvalidPoint"


class LedgerFormatError(ProvenZKError, ValueError):
    pass
