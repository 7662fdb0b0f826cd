"""Shared builders for test configs and bundles."""

from __future__ import annotations

import random

from provenzk.compiler import CircuitConfig, compile_config
from provenzk.crypto import KeyPair

AUTHORITY = KeyPair.generate(seed=20240501)


def avg_config(rows=4, cols=8, seed=0, kp=AUTHORITY, bits=16, **extra) -> dict:
    rng = random.Random(seed)
    return dict({
        "version": 1,
        "data": [
            {"name": "matrix", "kind": "int", "shape": [rows, cols],
             "values": [[rng.randrange(1 << bits) for _ in range(cols)] for _ in range(rows)]},
            {"name": "vector", "kind": "int", "shape": [cols],
             "values": [rng.randrange(1 << bits) for _ in range(cols)]},
        ],
        "authority": {"private_key": kp.secret_bytes().hex()},
        "function": {"name": "average_dot_products",
                     "args": {"matrix": "matrix", "vector": "vector"}},
    }, **extra)


def compile_dict(d: dict, base_dir=None):
    return compile_config(CircuitConfig.from_dict(d, base_dir=base_dir))


def small_bundle(seed=0, rows=2, cols=3):
    return compile_dict(avg_config(rows, cols, seed=seed))


def product_circuit():
    """x * y == z with x, y private and z public."""
    from provenzk.circuit import CircuitBuilder

    b = CircuitBuilder()
    x, y = b.inputs(2)
    z = b.public("z")
    b.assert_equal(b.mul(x, y), z)
    return b.finalize()


def cheating_proof(t: int, rng: random.Random):
    """A proof for the false claim x*y == z, forged by shifting one party's product share.

    The prover picks the cheating party uniformly; the shift is exactly what makes
    the output shares sum to zero, so only the gate-consistency check can catch it.
    """
    from provenzk.circuit import PublicInputs, Witness
    from provenzk.field import P
    from provenzk.zkproof.mpc import _build_proof

    circuit = product_circuit()
    x, y = rng.randrange(1, P), rng.randrange(1, P)
    z = (x * y + rng.randrange(1, P)) % P
    publics = PublicInputs([("z", z)])
    values = [0] * circuit.n_wires
    values[0], values[1] = x, y
    delta = (z - x * y) % P
    tamper = (rng.randrange(3), 0, delta)
    proof = _build_proof(circuit, Witness(tuple(values)), publics, t,
                         seed=rng.getrandbits(64), tamper=tamper)
    return circuit, publics, proof
