"""Zero-knowledge proofs of data provenance and statements over signed data."""

__version__ = "0.1.0"
