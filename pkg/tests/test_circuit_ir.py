import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from provenzk.circuit import (
    Circuit,
    CircuitBuilder,
    PublicInputs,
    Wire,
    Witness,
    check_witness,
    eval_witness,
)
from provenzk.errors import ArityMismatch, BuilderError, CircuitFormatError, UnsatisfiedConstraint
from provenzk.field import P


def test_empty_circuit_has_stable_id():
    c1, c2 = CircuitBuilder().finalize(), CircuitBuilder().finalize()
    assert c1.n_gates == 0 and c1.n_wires == 0
    assert c1.circuit_id == c2.circuit_id
    assert eval_witness(c1, [], PublicInputs([])).values == ()


def test_x_times_y_plus_5():
    b = CircuitBuilder()
    x, y = b.inputs(2)
    out = b.add(b.mul(x, y), 5)
    c = b.finalize()
    w = eval_witness(c, [3, 4], PublicInputs([]))
    assert w[out] == 17


def test_serialization_roundtrip_preserves_id():
    b = CircuitBuilder()
    x = b.input()
    z = b.public("z")
    b.assert_equal(b.mul(b.add(x, 3), b.mul(x, 7)), z)
    b.hint("bit", x, 2)
    c = b.finalize()
    again = Circuit.parse(c.serialize())
    assert again.circuit_id == c.circuit_id
    assert again.text == c.text
    assert again.labels == ("z",)
    assert c.stats()["mul_gates"] == 1


def test_reading_unallocated_wire_fails():
    b = CircuitBuilder()
    b.input()
    with pytest.raises(BuilderError):
        b.add(Wire(5), 1)
    with pytest.raises(BuilderError):
        b.assert_zero(3)


def test_duplicate_public_label_rejected():
    b = CircuitBuilder()
    b.public("y")
    with pytest.raises(BuilderError):
        b.public("y")


def test_constant_folding_emits_nothing():
    b = CircuitBuilder()
    assert b.add(2, 3) == 5
    assert b.mul(4, P - 1) == P - 4
    b.assert_zero(0)
    assert b.finalize().n_gates == 0


def test_eval_witness_errors():
    b = CircuitBuilder()
    x = b.input()
    y = b.public("y")
    b.assert_equal(b.mul(x, x), y)
    c = b.finalize()
    with pytest.raises(ArityMismatch):
        eval_witness(c, [], PublicInputs([("y", 9)]))
    with pytest.raises(ArityMismatch):
        eval_witness(c, [3], PublicInputs([("z", 9)]))
    with pytest.raises(UnsatisfiedConstraint) as exc:
        eval_witness(c, [3], PublicInputs([("y", 10)]))
    assert c.ops[exc.value.gate_index][0] == 6  # the assert gate
    assert eval_witness(c, [3], PublicInputs([("y", 9)]))


def test_dot_product_with_tampered_y_fails():
    b = CircuitBuilder()
    xs, ys = b.inputs(3), b.inputs(3)
    y = b.public("y")
    b.assert_equal(b.sum(b.mul(u, v) for u, v in zip(xs, ys)), y)
    c = b.finalize()
    eval_witness(c, [1, 2, 3, 4, 5, 6], PublicInputs([("y", 32)]))
    with pytest.raises(UnsatisfiedConstraint):
        eval_witness(c, [1, 2, 3, 4, 5, 6], PublicInputs([("y", 33)]))


def test_check_witness_finds_first_bad_gate():
    b = CircuitBuilder()
    x = b.input()
    y = b.mul(x, x)
    b.assert_zero(b.add(y, P - 4))
    c = b.finalize()
    w = eval_witness(c, [2], PublicInputs([]))
    assert check_witness(c, w, PublicInputs([])) is None
    bad = list(w.values)
    bad[y.index] = 5
    assert check_witness(c, Witness(tuple(bad)), PublicInputs([])) == 1
    assert check_witness(c, Witness(tuple(bad[:-1])), PublicInputs([])) == -1


@pytest.mark.parametrize("mutate", [
    lambda t: t.replace("provenzk-circuit 1", "provenzk-circuit 2"),
    lambda t: t.replace("end\n", ""),
    lambda t: t.replace("mul 0 0 2", "mul 0 5 2"),
    lambda t: t.replace("mul 0 0 2", "mul 0 0 0"),
    lambda t: t.replace("mul 0 0 2", "mul 0 0 3"),
    lambda t: t.replace("label 1 y", "label 0 y"),
    lambda t: t.replace("label 1 y", "label 1 9y"),
    lambda t: t.replace("mul", "div"),
    lambda t: t + "extra\n",
    lambda t: t.replace("wires 5", "wires 9"),
])
def test_parse_rejects_malformed(mutate):
    b = CircuitBuilder()
    x = b.input()
    y = b.public("y")
    b.assert_equal(b.mul(x, x), y)
    text = b.finalize().text
    bad = mutate(text)
    assert bad != text
    with pytest.raises(CircuitFormatError):
        Circuit.parse(bad)


def test_public_inputs_encoding():
    pub = PublicInputs([("H_w", 5), ("y", P - 1)])
    assert PublicInputs.from_text(pub.to_text()) == pub
    assert pub.replace("y", 3)["y"] == 3
    assert pub.digest() != pub.replace("y", 3).digest()
    with pytest.raises(ValueError):
        PublicInputs([("a", 1), ("a", 2)])
    with pytest.raises(CircuitFormatError):
        PublicInputs.from_text(f"y {P:x}\n")


# --- fuzz against the independent interpreter -------------------------------

def random_circuit(rng: random.Random, max_gates=50):
    b = CircuitBuilder()
    n_in = rng.randint(1, 4)
    pool = list(b.inputs(n_in))
    pubs = []
    for i in range(rng.randint(0, 2)):
        w = b.public(f"p{i}")
        pool.append(w)
        pubs.append(f"p{i}")
    asserted = []
    base = len(pool)
    for _ in range(rng.randint(1, max_gates)):
        if b.n_ops - base + len(asserted) >= max_gates - 1:
            break
        kind = rng.choice(["add", "mul", "addc", "mulc", "sub", "assert", "hint"])
        a, c = rng.choice(pool), rng.choice(pool)
        if kind == "add":
            pool.append(b.add(a, c))
        elif kind == "mul":
            pool.append(b.mul(a, c))
        elif kind == "addc":
            pool.append(b.add(a, rng.randrange(P)))
        elif kind == "mulc":
            pool.append(b.mul(a, rng.randrange(2, P)))
        elif kind == "sub":
            pool.append(b.sub(a, c))
        elif kind == "hint":
            pool.append(b.hint(rng.choice(["bit", "quo", "rem", "inv"]), a, rng.randint(1, 9)))
        else:
            asserted.append(a)
    for a in asserted:
        if isinstance(a, Wire):
            b.assert_zero(a)
    return b.finalize(), n_in, pubs


@pytest.mark.parametrize("seed", range(100))
def test_eval_matches_naive_interpreter(seed):
    rng = random.Random(seed)
    c, n_in, labels = random_circuit(rng)
    assert c.n_gates <= 50
    private = [rng.choice([0, 1, rng.randrange(P)]) for _ in range(n_in)]
    pub_vals = {lbl: rng.randrange(P) for lbl in labels}
    publics = PublicInputs([(lbl, pub_vals[lbl]) for lbl in labels])
    ok, wires = oracles.interpret_circuit(c.text, private, pub_vals)
    if ok:
        w = eval_witness(c, private, publics)
        assert dict(enumerate(w.values)) == wires
        assert check_witness(c, w, publics) is None
    else:
        with pytest.raises(UnsatisfiedConstraint):
            eval_witness(c, private, publics)


@pytest.mark.parametrize("seed", range(40))
def test_circuit_id_changes_under_mutation(seed):
    rng = random.Random(1000 + seed)
    c, _, _ = random_circuit(rng)
    ops = list(c.ops)
    labels = list(c.public_labels)
    choice = rng.choice(["gate", "const", "label"] if labels else ["gate", "const"])
    if choice == "label":
        lbl, w = labels[0]
        labels[0] = (lbl + "x", w)
    else:
        const_idx = [i for i, op in enumerate(ops) if op[0] in (4, 5)]
        if choice == "const" and const_idx:
            i = rng.choice(const_idx)
            op = ops[i]
            ops[i] = (op[0], op[1], (op[2] + 1) % P, op[3])
        else:
            ops.append((6, 0))
    mutated = Circuit(c.n_wires, ops, labels)
    assert mutated.circuit_id != c.circuit_id


@given(st.lists(st.integers(min_value=0, max_value=P - 1), min_size=1, max_size=6))
@settings(max_examples=40)
def test_parse_is_inverse_of_serialize(consts):
    b = CircuitBuilder()
    x = b.input()
    acc = x
    for k in consts:
        acc = b.mul(b.add(acc, k), x)
    b.assert_zero(b.sub(acc, acc))
    c = b.finalize()
    assert Circuit.parse(c.text).text == c.text
