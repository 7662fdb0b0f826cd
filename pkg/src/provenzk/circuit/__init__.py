from .gadgets import (
    gadget_bits,
    gadget_divmod,
    gadget_permutation,
    gadget_schnorr_verify,
    gadget_sponge,
)
from .ir import (
    Circuit,
    CircuitBuilder,
    PublicInputs,
    Wire,
    Witness,
    check_witness,
    eval_witness,
)

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "PublicInputs",
    "Wire",
    "Witness",
    "check_witness",
    "eval_witness",
    "gadget_bits",
    "gadget_divmod",
    "gadget_permutation",
    "gadget_schnorr_verify",
    "gadget_sponge",
]
