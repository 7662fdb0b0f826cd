"""Three-party MPC-in-the-head prover and verifier over the gate IR.

Each repetition additively shares every private value (inputs and hints)
among three simulated parties, evaluates the circuit share-wise, commits to
each party's view and opens two of them as chosen by the Fiat-Shamir
challenge. A multiplication gate is evaluated by party i as

    z_i = x_i y_i + x_{i+1} y_i + x_i y_{i+1} + r_i - r_{i+1}    (indices mod 3)

with r_i drawn from party i's seeded tape, so any two opened views can be
checked for consistency without revealing the third.
"""

from __future__ import annotations

import hashlib
import secrets
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from ..circuit.ir import (ADD, ADDC, ASSERT, HINT, INPUT, MUL, MULC, Circuit,
                          PublicInputs, Witness, check_witness)
from ..errors import ProofFormatError, UnsatisfiedWitness
from ..field import P
from .proof import ELEM, OpenedView, Proof, Repetition

DEFAULT_KAPPA = 40
CLI_KAPPA = 80

REJECT_REASONS = ("HeaderMismatch", "CommitmentMismatch", "GateInconsistency",
                  "OutputMismatch", "ChallengeMismatch", "MalformedProof")


def reps_for_soundness(kappa: int) -> int:
    """Smallest t with (2/3)^t <= 2^-kappa, computed exactly as 2^(t+kappa) <= 3^t."""
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    t = 1
    while (1 << (t + kappa)) > 3 ** t:
        t += 1
    return t


@dataclass(frozen=True)
class SoundnessTarget:
    kappa: int = DEFAULT_KAPPA

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be at least 1")

    @property
    def repetitions(self) -> int:
        return reps_for_soundness(self.kappa)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.accepted

    def __str__(self):
        return "accept" if self.accepted else f"reject: {self.reason}" + (
            f" ({self.detail})" if self.detail else "")


ACCEPT = Verdict(True)


def _reject(reason: str, detail: str = "") -> Verdict:
    return Verdict(False, reason, detail)


# --- randomness -------------------------------------------------------------

def _stream(seed: bytes, tag: bytes, n: int) -> list[int]:
    """n field elements from SHAKE-256; 48-byte samples keep the mod-P bias negligible."""
    if n == 0:
        return []
    raw = hashlib.shake_256(tag + seed).digest(48 * n)
    fb = int.from_bytes
    return [fb(raw[i:i + 48], "big") % P for i in range(0, 48 * n, 48)]


def _master_secret(seed) -> bytes:
    if seed is None:
        return secrets.token_bytes(32)
    if isinstance(seed, int):
        seed = seed.to_bytes((seed.bit_length() + 8) // 8, "big", signed=True)
    elif isinstance(seed, str):
        seed = seed.encode()
    return hashlib.sha256(b"FFS-PRNG" + bytes(seed)).digest()


def _rep_material(master: bytes, rep: int) -> tuple[list[bytes], list[bytes]]:
    seeds, keys = [], []
    for party in range(3):
        tag = struct.pack(">IB", rep, party)
        seeds.append(hashlib.sha256(master + b"seed" + tag).digest())
        keys.append(hashlib.sha256(master + b"key" + tag).digest())
    return seeds, keys


def _pack(values) -> bytes:
    return b"".join(v.to_bytes(ELEM, "big") for v in values)


def _unpack(data: bytes) -> list[int]:
    fb = int.from_bytes
    out = [fb(data[i:i + ELEM], "big") for i in range(0, len(data), ELEM)]
    for v in out:
        if v >= P:
            raise ProofFormatError("non-canonical field element in view")
    return out


def commit(key: bytes, view_bytes: bytes) -> bytes:
    return hashlib.sha256(key + view_bytes).digest()


# --- Fiat-Shamir ------------------------------------------------------------

def fiat_shamir(circuit_id: bytes, publics: PublicInputs, commitments: Sequence,
                output_shares: Sequence) -> list[int]:
    h = hashlib.sha256(b"FFS-CH")
    h.update(circuit_id)
    h.update(publics.to_bytes())
    for triple in commitments:
        for c in triple:
            h.update(c)
    for triple in output_shares:
        for party in triple:
            h.update(_pack(party))
    seed = h.digest()
    return [int.from_bytes(hashlib.sha256(seed + struct.pack(">I", j)).digest(), "big") % 3
            for j in range(len(commitments))]


# --- share-wise simulation ----------------------------------------------------

def _simulate(circuit: Circuit, wit: Sequence[int], pub_vals: Sequence[int],
              seeds: list[bytes], tamper=None):
    """Run all three parties; returns (view values per party, output shares per party).

    ``tamper`` = (party, mul_index, delta) adds delta to one party's output of one
    multiplication gate. It exists only to model a cheating prover in tests.
    """
    n_sh = circuit.n_inputs + circuit.n_hint
    W = circuit.n_wires
    r0, r1, r2 = (_stream(s, b"FFS-R", circuit.n_mul) for s in seeds)
    a0, a1 = (_stream(s, b"FFS-S", n_sh) for s in seeds[:2])
    w0, w1, w2 = [0] * W, [0] * W, [0] * W
    v0, v1, v2 = [], [], []
    o0, o1, o2 = [], [], []
    t_party, t_gate, t_delta = tamper if tamper else (-1, -1, 0)
    si = mi = pi = 0
    for op in circuit.ops:
        code = op[0]
        if code == MUL:
            a, b, c = op[1], op[2], op[3]
            x0, x1, x2 = w0[a], w1[a], w2[a]
            y0, y1, y2 = w0[b], w1[b], w2[b]
            q0, q1, q2 = r0[mi], r1[mi], r2[mi]
            z0 = (x0 * y0 + x1 * y0 + x0 * y1 + q0 - q1) % P
            z1 = (x1 * y1 + x2 * y1 + x1 * y2 + q1 - q2) % P
            z2 = (x2 * y2 + x0 * y2 + x2 * y0 + q2 - q0) % P
            if mi == t_gate:
                if t_party == 0:
                    z0 = (z0 + t_delta) % P
                elif t_party == 1:
                    z1 = (z1 + t_delta) % P
                else:
                    z2 = (z2 + t_delta) % P
            w0[c], w1[c], w2[c] = z0, z1, z2
            v0.append(z0)
            v1.append(z1)
            v2.append(z2)
            mi += 1
        elif code == ADD:
            a, b, c = op[1], op[2], op[3]
            w0[c] = (w0[a] + w0[b]) % P
            w1[c] = (w1[a] + w1[b]) % P
            w2[c] = (w2[a] + w2[b]) % P
        elif code == ADDC:
            a, c = op[1], op[3]
            w0[c] = (w0[a] + op[2]) % P
            w1[c] = w1[a]
            w2[c] = w2[a]
        elif code == MULC:
            a, k, c = op[1], op[2], op[3]
            w0[c] = w0[a] * k % P
            w1[c] = w1[a] * k % P
            w2[c] = w2[a] * k % P
        elif code == ASSERT:
            a = op[1]
            o0.append(w0[a])
            o1.append(w1[a])
            o2.append(w2[a])
        elif code == INPUT or code == HINT:
            c = op[-1]
            s0, s1 = a0[si], a1[si]
            s2 = (wit[c] - s0 - s1) % P
            w0[c], w1[c], w2[c] = s0, s1, s2
            v0.append(s0)
            v1.append(s1)
            v2.append(s2)
            si += 1
        else:
            c = op[1]
            w0[c], w1[c], w2[c] = pub_vals[pi], 0, 0
            pi += 1
    return (v0, v1, v2), (tuple(o0), tuple(o1), tuple(o2))


def _prove_repetition(circuit, wit, pub_vals, master, rep, tamper=None):
    seeds, keys = _rep_material(master, rep)
    views, outputs = _simulate(circuit, wit, pub_vals, seeds, tamper)
    packed = [_pack(v) for v in views]
    commitments = tuple(commit(keys[i], seeds[i] + packed[i]) for i in range(3))
    return commitments, outputs, seeds, keys, packed


_WORKER = {}


def _worker_init(circuit_text, wit, pub_vals, master):
    _WORKER["args"] = (Circuit.parse(circuit_text), wit, pub_vals, master)


def _worker_rep(rep):
    circuit, wit, pub_vals, master = _WORKER["args"]
    return _prove_repetition(circuit, wit, pub_vals, master, rep)


def _assemble(circuit: Circuit, publics: PublicInputs, reps_data) -> Proof:
    commitments = [d[0] for d in reps_data]
    outputs = [d[1] for d in reps_data]
    challenges = fiat_shamir(circuit.circuit_id, publics, commitments, outputs)
    reps = []
    for (comms, outs, seeds, keys, packed), e in zip(reps_data, challenges):
        f = (e + 1) % 3
        opened = (OpenedView(keys[e], seeds[e], packed[e]),
                  OpenedView(keys[f], seeds[f], packed[f]))
        reps.append(Repetition(comms, outs, e, opened))
    return Proof(circuit.circuit_id, publics.digest(), tuple(reps))


def _build_proof(circuit: Circuit, witness: Witness, publics: PublicInputs, t: int,
                 seed=None, workers: int = 1, tamper=None) -> Proof:
    master = _master_secret(seed)
    wit = witness.values
    pub_vals = [v.value for v in publics.values]
    if workers > 1 and t > 1 and tamper is None:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                                 initargs=(circuit.text, wit, pub_vals, master)) as pool:
            reps_data = list(pool.map(_worker_rep, range(t)))
    else:
        reps_data = [_prove_repetition(circuit, wit, pub_vals, master, j,
                                       tamper(j) if callable(tamper) else tamper)
                     for j in range(t)]
    return _assemble(circuit, publics, reps_data)


def prove(circuit: Circuit, witness: Witness, publics: PublicInputs,
          target: SoundnessTarget | int = SoundnessTarget(), *, seed=None,
          workers: int = 1) -> Proof:
    """Prove knowledge of a satisfying witness.

    ``target`` is a :class:`SoundnessTarget` or an explicit repetition count.
    ``seed`` makes all prover randomness reproducible; omit it outside tests.
    """
    bad = check_witness(circuit, witness, publics)
    if bad is not None:
        raise UnsatisfiedWitness(f"witness violates gate {bad}; refusing to prove")
    t = target.repetitions if isinstance(target, SoundnessTarget) else int(target)
    if not 1 <= t <= 0xFFFF:
        raise ValueError("repetition count out of range")
    return _build_proof(circuit, witness, publics, t, seed=seed, workers=workers)


# --- verification -------------------------------------------------------------

def _replay(circuit: Circuit, pub_vals, e: int, vals_e: list[int], vals_f: list[int],
            seed_e: bytes, seed_f: bytes):
    """Re-execute opened parties e and f = e+1; returns (outputs_e, outputs_f) or a reason."""
    re_ = _stream(seed_e, b"FFS-R", circuit.n_mul)
    rf = _stream(seed_f, b"FFS-R", circuit.n_mul)
    W = circuit.n_wires
    we, wf = [0] * W, [0] * W
    oe, of = [], []
    lead_e = e == 0
    lead_f = e == 2
    vi = mi = pi = 0
    for op in circuit.ops:
        code = op[0]
        if code == MUL:
            a, b, c = op[1], op[2], op[3]
            xe, xf, ye, yf = we[a], wf[a], we[b], wf[b]
            z = (xe * ye + xf * ye + xe * yf + re_[mi] - rf[mi]) % P
            if z != vals_e[vi]:
                return f"mul gate {mi} inconsistent"
            we[c] = z
            wf[c] = vals_f[vi]
            vi += 1
            mi += 1
        elif code == ADD:
            a, b, c = op[1], op[2], op[3]
            we[c] = (we[a] + we[b]) % P
            wf[c] = (wf[a] + wf[b]) % P
        elif code == ADDC:
            a, c = op[1], op[3]
            we[c] = (we[a] + op[2]) % P if lead_e else we[a]
            wf[c] = (wf[a] + op[2]) % P if lead_f else wf[a]
        elif code == MULC:
            a, k, c = op[1], op[2], op[3]
            we[c] = we[a] * k % P
            wf[c] = wf[a] * k % P
        elif code == ASSERT:
            oe.append(we[op[1]])
            of.append(wf[op[1]])
        elif code == INPUT or code == HINT:
            c = op[-1]
            we[c] = vals_e[vi]
            wf[c] = vals_f[vi]
            vi += 1
        else:
            c = op[1]
            we[c] = pub_vals[pi] if lead_e else 0
            wf[c] = pub_vals[pi] if lead_f else 0
            pi += 1
    return tuple(oe), tuple(of)


def verify(circuit: Circuit, publics: PublicInputs, proof: Proof | bytes) -> Verdict:
    """Accept or reject with a structured reason; never raises on hostile input."""
    if isinstance(proof, (bytes, bytearray)):
        try:
            proof = Proof.from_bytes(bytes(proof))
        except ProofFormatError as exc:
            return _reject("MalformedProof", str(exc))
    if proof.circuit_id != circuit.circuit_id:
        return _reject("HeaderMismatch", "proof is bound to a different circuit")
    if publics.labels != circuit.labels or proof.publics_hash != publics.digest():
        return _reject("HeaderMismatch", "proof is bound to different public inputs")
    n_vals = circuit.n_inputs + circuit.n_hint + circuit.n_mul
    for j, rep in enumerate(proof.repetitions):
        if any(len(o) != circuit.n_assert for o in rep.outputs):
            return _reject("MalformedProof", f"repetition {j}: wrong output share count")
        if any(v.n_values != n_vals or len(v.values) != n_vals * ELEM for v in rep.opened):
            return _reject("MalformedProof", f"repetition {j}: wrong view length")
    challenges = fiat_shamir(circuit.circuit_id, publics,
                             [r.commitments for r in proof.repetitions],
                             [r.outputs for r in proof.repetitions])
    for j, (rep, ch) in enumerate(zip(proof.repetitions, challenges)):
        if rep.challenge != ch:
            return _reject("ChallengeMismatch", f"repetition {j}")
    pub_vals = [v.value for v in publics.values]
    for j, rep in enumerate(proof.repetitions):
        e, f = rep.opened_parties
        view_e, view_f = rep.opened
        if commit(view_e.key, view_e.view_bytes()) != rep.commitments[e] or \
                commit(view_f.key, view_f.view_bytes()) != rep.commitments[f]:
            return _reject("CommitmentMismatch", f"repetition {j}")
        try:
            vals_e, vals_f = _unpack(view_e.values), _unpack(view_f.values)
        except ProofFormatError as exc:
            return _reject("MalformedProof", f"repetition {j}: {exc}")
        result = _replay(circuit, pub_vals, e, vals_e, vals_f, view_e.seed, view_f.seed)
        if isinstance(result, str):
            return _reject("GateInconsistency", f"repetition {j}: {result}")
        out_e, out_f = result
        if out_e != rep.outputs[e] or out_f != rep.outputs[f]:
            return _reject("OutputMismatch", f"repetition {j}: opened output shares differ")
        for k, (s0, s1, s2) in enumerate(zip(*rep.outputs)):
            if (s0 + s1 + s2) % P:
                return _reject("OutputMismatch", f"repetition {j}: assertion {k} nonzero")
    return ACCEPT
