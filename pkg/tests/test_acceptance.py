"""Acceptance suite: one recorded PASS/FAIL line per headline criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline, or
``python3 tests/test_acceptance.py``. Tolerances are pinned below.
"""

from __future__ import annotations

import copy
import hashlib
import random
import time

import pytest
from scipy.stats import spearmanr

import oracles
from helpers import AUTHORITY, avg_config, cheating_proof, compile_dict
from ledger_model import random_workload
from provenzk.bench import DEFAULT_SIZES, parse_report, run_bench, write_report
from provenzk.compiler import CircuitConfig, compile_config, sign_data
from provenzk.crypto import (
    EcdsaSignature,
    KeyPair,
    SchnorrSignature,
    ecdsa_sign,
    ecdsa_verify,
    schnorr_sign,
    schnorr_verify,
)
from provenzk.crypto.signatures import derive_nonce
from provenzk.circuit import eval_witness
from provenzk.curve import G
from provenzk.errors import UnsatisfiedConstraint, UnsatisfiedWitness
from provenzk.field import P, Q, FieldElement, Scalar
from provenzk.ledger import Ledger, verify_audit_chain
from provenzk.zkproof import SoundnessTarget, prove, reps_for_soundness, verify

E2E_KAPPA = 40
E2E_REPS = 69
E2E_SECONDS = 300.0
BINDING_TRIALS = 100
ORACLE_CONFIGS = 100
SOUNDNESS_TRIALS = 3000
SOUNDNESS_BANDS = {1: (0.60, 0.73), 4: (0.14, 0.26)}
SIG_ROUNDTRIPS = 1000
SIG_FORGERIES = 10000
LEDGER_TXS = 500
MUTATIONS = 100
POLICY_STEPS = 10000


def _pubs(publics) -> dict:
    return {label: v.value for label, v in publics.items()}


def _provider_ledger(bundle):
    led = Ledger()
    pid = led.register_provider("hospital", bundle.authority, ["health"], ts=1)
    led.register_verifier("admin", bundle.function_id, bundle.circuit_id, bundle.circuit, ts=2)
    return led, pid


@pytest.fixture(scope="module")
def e2e():
    start = time.perf_counter()
    kp = KeyPair.generate()
    cfg_dict = avg_config(4, 8, seed=1, kp=kp)
    # the authority signs; the analyst compiles from the public key and signature only
    h_w, sig = sign_data(CircuitConfig.from_dict(cfg_dict), kp)
    cfg_dict["authority"] = {"public_key": kp.public_bytes().hex(),
                             "signature": sig.to_bytes().hex()}
    bundle = compile_config(CircuitConfig.from_dict(cfg_dict))
    proof = prove(bundle.circuit, bundle.witness(), bundle.publics, SoundnessTarget(E2E_KAPPA))
    led, pid = _provider_ledger(bundle)
    res = led.submit_proof("analyst", bundle.function_id, pid, bundle.publics,
                           bundle.signature, proof.to_bytes(), ts=3)
    elapsed = time.perf_counter() - start
    return dict(bundle=bundle, proof=proof, result=res, elapsed=elapsed, h_w=h_w)


# 1 ----------------------------------------------------------------------

def test_end_to_end_completeness(e2e, acceptance):
    bundle, proof, res = e2e["bundle"], e2e["proof"], e2e["result"]
    ok = (res.accepted and proof.t == E2E_REPS and e2e["elapsed"] < E2E_SECONDS
          and bundle.h_w == e2e["h_w"] and bundle.circuit.n_inputs == 4 * 8 + 8)
    acceptance("end-to-end completeness", ok,
               f"status={res.status} t={proof.t} wall={e2e['elapsed']:.1f}s "
               f"(limit {E2E_SECONDS:.0f}s)")
    assert ok


# 2 ----------------------------------------------------------------------

def _flip_one(d: dict, rng: random.Random) -> dict:
    d = copy.deepcopy(d)
    arrays = d["data"]
    cells = [(a, i, j) for a in range(len(arrays))
             for i, row in enumerate(arrays[a]["values"])
             for j in (range(len(row)) if isinstance(row, list) else [None])]
    a, i, j = rng.choice(cells)
    vals = arrays[a]["values"]
    delta = rng.randrange(1, 1 << 16)
    if j is None:
        vals[i] = (vals[i] + delta) % (1 << 16)
    else:
        vals[i][j] = (vals[i][j] + delta) % (1 << 16)
    return d


def test_provenance_binding(acceptance):
    base = avg_config(4, 8, seed=2)
    signed = compile_dict(base)
    led, pid = _provider_ledger(signed)
    rng = random.Random(2024)
    caught = 0
    outcomes = {}
    for trial in range(BINDING_TRIALS):
        flipped = compile_dict(_flip_one(base, rng))
        assert flipped.circuit_id == signed.circuit_id and flipped.h_w != signed.h_w
        if trial % 2 == 0:
            # keep the signed digest and claim, swap in the altered data
            try:
                eval_witness(signed.circuit, flipped.private_inputs, signed.publics)
            except UnsatisfiedConstraint:
                caught += 1
                outcomes["witness failure"] = outcomes.get("witness failure", 0) + 1
        else:
            # honest proof over the altered data, presented with the old signature
            try:
                proof = prove(flipped.circuit, flipped.witness(), flipped.publics, 2,
                              seed=trial)
            except UnsatisfiedWitness:
                caught += 1
                continue
            res = led.submit_proof("analyst", flipped.function_id, pid, flipped.publics,
                                   signed.signature, proof, ts=10 + trial)
            key = f"{res.status}:{res.reason}"
            outcomes[key] = outcomes.get(key, 0) + 1
            caught += res.status == "PreCheckFailed"
    ok = caught == BINDING_TRIALS
    acceptance("provenance binding", ok, f"{caught}/{BINDING_TRIALS} rejected {outcomes}")
    assert ok


# 3 ----------------------------------------------------------------------

def test_statement_binding(e2e, acceptance):
    rng = random.Random(3)
    bundle, proof = e2e["bundle"], e2e["proof"]
    raw = proof.to_bytes()
    dot = compile_dict({
        "data": [{"name": "a", "kind": "int", "values": [3, 1, 4, 1, 5]},
                 {"name": "b", "kind": "int", "values": [9, 2, 6, 5, 3]}],
        "authority": {"private_key": AUTHORITY.secret_bytes().hex()},
        "function": {"name": "dot_product", "args": {"a": "a", "b": "b"}},
    })
    dot_proof = prove(dot.circuit, dot.witness(), dot.publics, SoundnessTarget(E2E_KAPPA),
                      seed=3).to_bytes()
    assert verify(bundle.circuit, bundle.publics, raw)
    assert verify(dot.circuit, dot.publics, dot_proof)
    led, pid = _provider_ledger(bundle)

    rejected = 0
    for trial in range(BINDING_TRIALS):
        delta = rng.choice([1, P - 1, rng.randrange(1, P)])
        if trial % 2 == 0:
            label = rng.choice(["q", "r"])
            forged = bundle.publics.replace(label, bundle.publics[label].value + delta)
            if trial % 4 == 0:
                res = led.submit_proof("analyst", bundle.function_id, pid, forged,
                                       bundle.signature, raw, ts=5)
                rejected += res.status == "VerifierRejected"
            else:
                rejected += not verify(bundle.circuit, forged, raw)
        else:
            forged = dot.publics.replace("y", dot.publics["y"].value + delta)
            rejected += not verify(dot.circuit, forged, dot_proof)
    ok = rejected == BINDING_TRIALS
    acceptance("statement binding", ok, f"{rejected}/{BINDING_TRIALS} altered claims rejected")
    assert ok


# 4 ----------------------------------------------------------------------

def _int_array(rng, name, shape, lo=-(1 << 15), hi=(1 << 15) - 1):
    if len(shape) == 1:
        values = [rng.randint(lo, hi) for _ in range(shape[0])]
    else:
        values = [[rng.randint(lo, hi) for _ in range(shape[1])] for _ in range(shape[0])]
    return {"name": name, "kind": "int", "values": values}


def _double_array(rng, name, n):
    return {"name": name, "kind": "double",
            "values": [round(rng.uniform(-300, 300), rng.randint(0, 3)) for _ in range(n)]}


def _random_function(kind: str, rng: random.Random):
    n = rng.randint(1, 6)
    if kind == "dot_product":
        data = [_int_array(rng, "a", [n]), _int_array(rng, "b", [n])]
        fn = {"name": kind, "args": {"a": "a", "b": "b"}}
    elif kind == "weighted_sum":
        data = [_double_array(rng, "v", n)]
        if rng.random() < 0.5:
            weights = [rng.randint(-50, 50) for _ in range(n)]
        else:
            data.append(_double_array(rng, "w", n))
            weights = "w"
        fn = {"name": kind, "args": {"weights": weights, "values": "v"}}
    elif kind == "average_dot_products":
        rows = rng.randint(1, 5)
        data = [_int_array(rng, "m", [rows, n]), _int_array(rng, "x", [n])]
        fn = {"name": kind, "args": {"matrix": "m", "vector": "x"}}
    else:
        data = [_int_array(rng, "a", [n]), _int_array(rng, "b", [n]),
                _int_array(rng, "c", [2], -100, 100)]
        first = {"name": "dot_product", "args": {"a": "a", "b": "b"}, "as": "s"}
        if rng.random() < 0.5:
            second = {"name": "weighted_sum",
                      "args": {"weights": [rng.randint(-9, 9) for _ in range(3)],
                               "values": ["s", "c"]}}
        else:
            second = {"name": "dot_product", "args": {"a": ["s", "b"], "b": ["c", "a"]}}
            data[2] = _int_array(rng, "c", [1], -100, 100)
        fn = {"name": "compose", "steps": [first, second]}
    return {"precision": rng.randint(0, 2), "data": data,
            "authority": {"private_key": AUTHORITY.secret_bytes().hex()}, "function": fn}


def _oracle_data(d: dict) -> dict:
    out = {}
    for arr in d["data"]:
        if arr["kind"] == "double":
            out[arr["name"]] = [oracles.quantize(v, d["precision"]) for v in arr["values"]]
        else:
            out[arr["name"]] = arr["values"]
    return out


@pytest.mark.parametrize("kind", ["dot_product", "weighted_sum", "average_dot_products",
                                  "compose"])
def test_oracle_equivalence(kind, acceptance):
    rng = random.Random(f"oracle-{kind}")
    agree = 0
    for _ in range(ORACLE_CONFIGS):
        d = _random_function(kind, rng)
        expected = oracles.brute_eval(d["function"], _oracle_data(d))
        bundle = compile_dict(d)
        pubs = _pubs(bundle.publics)
        labels = [lbl for lbl in bundle.publics.labels if lbl not in ("H_w", "pk_x", "pk_y")]
        claimed = tuple(pubs[lbl] for lbl in labels)
        holds, _ = oracles.interpret_circuit(bundle.circuit.text, bundle.private_inputs, pubs)
        wrong = dict(pubs, **{labels[0]: pubs[labels[0]] + 1})
        refutes, _ = oracles.interpret_circuit(bundle.circuit.text, bundle.private_inputs, wrong)
        agree += (holds and not refutes and bundle.native_result == expected
                  and claimed == tuple(v % P for v in expected))
    ok = agree == ORACLE_CONFIGS
    acceptance(f"oracle equivalence ({kind})", ok, f"{agree}/{ORACLE_CONFIGS} configs agree")
    assert ok


# 5 ----------------------------------------------------------------------

@pytest.mark.parametrize("t", sorted(SOUNDNESS_BANDS))
def test_soundness_rate(t, acceptance):
    lo, hi = SOUNDNESS_BANDS[t]
    rng = random.Random(5000 + t)
    wins = 0
    for _ in range(SOUNDNESS_TRIALS):
        c, pub, proof = cheating_proof(t, rng)
        wins += bool(verify(c, pub, proof))
    rate = wins / SOUNDNESS_TRIALS
    ok = lo <= rate <= hi
    acceptance(f"soundness rate t={t}", ok,
               f"accepted {rate:.4f} over {SOUNDNESS_TRIALS} (band [{lo}, {hi}], "
               f"target {(2 / 3) ** t:.4f})")
    assert ok


# 6 ----------------------------------------------------------------------

def test_reps_for_soundness(acceptance):
    got = {k: reps_for_soundness(k) for k in (40, 80)}
    ok = got == {40: 69, 80: 137}
    acceptance("reps_for_soundness", ok, f"kappa=40 -> {got[40]}, kappa=80 -> {got[80]}")
    assert ok


# 7 ----------------------------------------------------------------------

def _ecdsa_by_steps(pk, digest, sig) -> bool:
    r, s = sig.r.value, sig.s.value
    if not (0 < r < Q and 0 < s < Q):
        return False
    h = int.from_bytes(digest, "big") % Q
    w = oracles.egcd_inverse(s, Q)
    u1, u2 = h * w % Q, r * w % Q
    X = oracles.ec_add(oracles.ec_mul(u1, (G.x.value, G.y.value)),
                       oracles.ec_mul(u2, (pk.x.value, pk.y.value)))
    return X is not None and X[0] % Q == r


def test_signature_suites(acceptance):
    rng = random.Random(7)
    keys = [KeyPair.generate(seed=700 + i) for i in range(8)]

    schnorr_ok = ecdsa_ok = 0
    for _ in range(SIG_ROUNDTRIPS):
        kp = rng.choice(keys)
        m = rng.randrange(P)
        sig = schnorr_sign(kp, m)
        schnorr_ok += schnorr_verify(kp.pk, SchnorrSignature.from_bytes(sig.to_bytes()), m)
        digest = rng.randbytes(32)
        sig = ecdsa_sign(kp, digest)
        ecdsa_ok += ecdsa_verify(kp.pk, digest, EcdsaSignature.from_bytes(sig.to_bytes()))

    # forgeries: random signatures, plus valid ones moved to another message or key
    accepted = 0
    kp = keys[0]
    for i in range(SIG_FORGERIES):
        m = rng.randrange(P)
        digest = rng.randbytes(32)
        mode = i % 4
        if mode < 2:
            s_forged = SchnorrSignature(FieldElement(rng.randrange(P)), Scalar(rng.randrange(Q)))
            e_forged = EcdsaSignature(Scalar(rng.randrange(1, Q)), Scalar(rng.randrange(1, Q)))
            target_pk = kp.pk if mode == 0 else rng.choice(keys).pk
        else:
            signer = rng.choice(keys[1:])
            s_forged = schnorr_sign(signer, (m + 1) % P if mode == 2 else m)
            e_forged = ecdsa_sign(signer, hashlib.sha256(digest).digest() if mode == 2
                                  else digest)
            target_pk = signer.pk if mode == 2 else kp.pk
        accepted += schnorr_verify(target_pk, s_forged, m)
        accepted += ecdsa_verify(target_pk, digest, e_forged)

    # the library's verdict must equal the step-by-step u1/u2 procedure
    mirror = 0
    for i in range(50):
        digest = hashlib.sha256(i.to_bytes(4, "big")).digest()
        sig = ecdsa_sign(kp, digest)
        k = derive_nonce(kp.sk, digest)
        r_ok = sig.r.value == oracles.ec_mul(k, (G.x.value, G.y.value))[0] % Q
        bad = EcdsaSignature(sig.r, Scalar(sig.s.value % (Q - 1) + 1))
        good_agrees = _ecdsa_by_steps(kp.pk, digest, sig) is ecdsa_verify(kp.pk, digest, sig)
        bad_agrees = _ecdsa_by_steps(kp.pk, digest, bad) == ecdsa_verify(kp.pk, digest, bad)
        mirror += r_ok and good_agrees and ecdsa_verify(kp.pk, digest, sig) and bad_agrees

    ok = (schnorr_ok == ecdsa_ok == SIG_ROUNDTRIPS and accepted == 0 and mirror == 50)
    acceptance("signature suites", ok,
               f"schnorr {schnorr_ok}/{SIG_ROUNDTRIPS}, ecdsa {ecdsa_ok}/{SIG_ROUNDTRIPS} "
               f"roundtrips; {accepted} of {2 * SIG_FORGERIES} forgeries accepted; "
               f"u1/u2 mirror {mirror}/50")
    assert ok


# 8 ----------------------------------------------------------------------

def test_ledger_determinism(tmp_path, acceptance):
    path = tmp_path / "ledger.log"
    led = Ledger(path)
    bundle = compile_dict(avg_config(2, 3, seed=8))
    proof = prove(bundle.circuit, bundle.witness(), bundle.publics, 2, seed=8)
    pid = led.register_provider("hospital", bundle.authority, ["health"], ts=0)
    led.register_verifier("admin", bundle.function_id, bundle.circuit_id, bundle.circuit, ts=0)
    led.submit_proof("ana", bundle.function_id, pid, bundle.publics, bundle.signature, proof)
    led.submit_proof("ana", bundle.function_id, pid, bundle.publics.replace("q", 0),
                     bundle.signature, proof)
    random_workload(led, LEDGER_TXS - len(led.transactions), seed=8)
    n_tx = len(led.transactions)

    from_file = Ledger(path)
    from_records = Ledger.replay(path.read_bytes())
    replay_ok = (n_tx == LEDGER_TXS and from_file.state_hash == led.state_hash
                 == from_records.state_hash and from_file.audit == led.audit)

    rng = random.Random(88)
    detected = 0
    entries = led._audit
    for _ in range(MUTATIONS):
        i = rng.randrange(len(entries))
        orig = entries[i]
        field = rng.choice(["index", "timestamp", "action", "actor", "payload_hash",
                            "outcome", "detail", "entry_hash"])
        value = getattr(orig, field)
        if isinstance(value, int):
            new = value + rng.randint(1, 5)
        elif isinstance(value, bytes):
            pos = rng.randrange(len(value))
            new = value[:pos] + bytes([value[pos] ^ (1 << rng.randrange(8))]) + value[pos + 1:]
        else:
            new = value + rng.choice(["x", "!", " "])
        entries[i] = orig.__class__(**dict(orig.__dict__, **{field: new}))
        detected += not verify_audit_chain(led)
        entries[i] = orig
    intact = verify_audit_chain(led)

    ok = replay_ok and detected == MUTATIONS and intact
    acceptance("ledger determinism", ok,
               f"{n_tx}-tx replay {'matches' if replay_ok else 'DIFFERS'}; "
               f"{detected}/{MUTATIONS} mutations detected")
    assert ok


# 9 ----------------------------------------------------------------------

def test_policy_enforcement(acceptance):
    grants, violations, disagreements = random_workload(Ledger(), POLICY_STEPS, seed=9)
    ok = violations == 0 and disagreements == 0 and grants > 0
    acceptance("policy enforcement", ok,
               f"{POLICY_STEPS} steps, {grants} grants, {violations} violations, "
               f"{disagreements} model disagreements")
    assert ok


# 10 ---------------------------------------------------------------------

def test_bench_harness(tmp_path, acceptance):
    rows = run_bench(DEFAULT_SIZES)
    paths = write_report(rows, tmp_path / "bench")
    gates = [r.gates for r in rows]
    rho = spearmanr([r.N for r in rows], [r.prove_ms for r in rows]).statistic
    ok = ([r.N for r in rows] == [64, 256, 1024, 4096]
          and all(a < b for a, b in zip(gates, gates[1:])) and rho > 0
          and parse_report(paths["csv"].read_text()) == rows
          and paths["png"].read_bytes()[:4] == b"\x89PNG")
    acceptance("bench harness", ok,
               f"gates {gates}; spearman(N, prove_ms) = {rho:.2f}; "
               f"prove_ms {[round(r.prove_ms) for r in rows]}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-s", "-q"]))
