from .mpc import (
    CLI_KAPPA,
    DEFAULT_KAPPA,
    SoundnessTarget,
    Verdict,
    fiat_shamir,
    prove,
    reps_for_soundness,
    verify,
)
from .proof import OpenedView, Proof, Repetition

__all__ = [
    "CLI_KAPPA",
    "DEFAULT_KAPPA",
    "OpenedView",
    "Proof",
    "Repetition",
    "SoundnessTarget",
    "Verdict",
    "fiat_shamir",
    "prove",
    "reps_for_soundness",
    "verify",
]
