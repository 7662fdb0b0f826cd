"""Reusable constraint patterns: bit decomposition, Euclidean division, the
sponge permutation, and in-circuit Schnorr verification over Grumpkin.

Every gadget accepts wires or integer constants; constant sub-expressions are
evaluated at build time and emit no gates.
"""

from __future__ import annotations

import functools

from ..crypto.hashing import RATE, round_constants, sha256
from ..curve import B, G, _affine_add, _mul_ints
from ..errors import GadgetError
from ..field import P, sqrt
from .ir import CircuitBuilder, Wire

MAX_BITS = 253
SCALAR_BITS = 254


def _bits(b: CircuitBuilder, x, n: int) -> list:
    if isinstance(x, int):
        if x >= 1 << n:
            raise GadgetError(f"constant {x} does not fit in {n} bits")
        return [(x >> i) & 1 for i in range(n)]
    bits = []
    acc = 0
    for i in range(n):
        bit = b.hint("bit", x, i)
        b.assert_zero(b.mul(bit, b.add(bit, P - 1)))
        acc = b.add(acc, b.mul(bit, 1 << i))
        bits.append(bit)
    b.assert_equal(acc, x)
    return bits


def gadget_bits(b: CircuitBuilder, x, n: int) -> list:
    """LSB-first boolean wires with sum(b_i 2^i) = x; unsatisfiable when x >= 2^n."""
    if not 1 <= n <= MAX_BITS:
        raise GadgetError(f"bit width {n} outside [1, {MAX_BITS}]")
    return _bits(b, x, n)


def gadget_divmod(b: CircuitBuilder, total, m: int, bits: int):
    """Quotient and remainder of ``total`` by the public constant ``m``.

    Enforces total = q*m + r with q < 2^bits and 0 <= r < m.
    """
    if m < 1:
        raise GadgetError("divisor must be at least 1")
    if bits < 1 or bits + m.bit_length() > MAX_BITS - 1:
        raise GadgetError(f"quotient width {bits} too large for divisor {m}")
    if isinstance(total, int):
        q, r = divmod(total, m)
        if q >= 1 << bits:
            raise GadgetError("constant quotient out of range")
        return q, r
    q = b.hint("quo", total, m)
    r = b.hint("rem", total, m)
    b.assert_equal(b.add(b.mul(q, m), r), total)
    gadget_bits(b, q, bits)
    if m == 1:
        b.assert_zero(r)
    else:
        k = (m - 1).bit_length()
        gadget_bits(b, r, k)
        gadget_bits(b, b.sub(m - 1, r), k)
    return q, r


def _pow5(b: CircuitBuilder, x):
    x2 = b.mul(x, x)
    x4 = b.mul(x2, x2)
    return b.mul(x4, x)


def gadget_permutation(b: CircuitBuilder, state: list) -> list:
    s0, s1, s2 = state
    for c0, c1, c2 in round_constants():
        s0 = _pow5(b, b.add(s0, c0))
        s1 = _pow5(b, b.add(s1, c1))
        s2 = _pow5(b, b.add(s2, c2))
        t = b.add(b.add(s0, s1), s2)
        s0, s1, s2 = b.add(s0, t), b.add(s1, t), b.add(s2, t)
    return [s0, s1, s2]


def gadget_sponge(b: CircuitBuilder, inputs: list):
    """In-circuit replica of :func:`provenzk.crypto.sponge_hash`."""
    state = [0, 0, len(inputs) % P]
    chunks = [inputs[i:i + RATE] for i in range(0, len(inputs), RATE)] or [[]]
    for chunk in chunks:
        for lane, v in enumerate(chunk):
            state[lane] = b.add(state[lane], v)
        state = gadget_permutation(b, state)
    return state[0]


# --- elliptic curve -------------------------------------------------------

def _is_const(pt) -> bool:
    return isinstance(pt[0], int) and isinstance(pt[1], int)


def _guarded_inverse(b: CircuitBuilder, den):
    inv = b.hint("inv", den)
    b.assert_zero(b.add(b.mul(den, inv), P - 1))
    return inv


def ec_double(b: CircuitBuilder, pt):
    if _is_const(pt):
        r = _affine_add(pt, pt)
        if r is None:
            raise GadgetError("doubling a 2-torsion constant")
        return r
    x, y = pt
    xx = b.mul(x, x)
    inv = _guarded_inverse(b, b.mul(y, 2))
    lam = b.mul(b.mul(xx, 3), inv)
    x3 = b.sub(b.mul(lam, lam), b.mul(x, 2))
    y3 = b.sub(b.mul(lam, b.sub(x, x3)), y)
    return x3, y3


def ec_add(b: CircuitBuilder, p1, p2):
    """Incomplete affine addition; unsatisfiable when x1 == x2."""
    if _is_const(p1) and _is_const(p2):
        if p1[0] == p2[0]:
            raise GadgetError("incomplete addition on equal x-coordinates")
        return _affine_add(p1, p2)
    (x1, y1), (x2, y2) = p1, p2
    inv = _guarded_inverse(b, b.sub(x2, x1))
    lam = b.mul(b.sub(y2, y1), inv)
    x3 = b.sub(b.sub(b.mul(lam, lam), x1), x2)
    y3 = b.sub(b.mul(lam, b.sub(x1, x3)), y1)
    return x3, y3


def ec_select(b: CircuitBuilder, bit, if_one, if_zero):
    return tuple(b.add(z, b.mul(bit, b.sub(o, z))) for o, z in zip(if_one, if_zero))


@functools.lru_cache(maxsize=None)
def offset_point() -> tuple[int, int]:
    """Fixed point of unknown discrete log that seeds double-and-add."""
    x = int.from_bytes(sha256(b"FFS-OFFSET"), "big") % P
    while True:
        y = sqrt(x * x * x + B)
        if y is not None:
            return x, (y if y % 2 == 0 else P - y)
        x += 1


def gadget_double_scalar_mul(b: CircuitBuilder, bits1: list, pt1, bits2: list, pt2):
    """sum(bits1) * pt1 + sum(bits2) * pt2 starting from the offset point."""
    if len(bits1) != len(bits2):
        raise GadgetError("scalar decompositions must have equal width")
    n = len(bits1)
    acc = offset_point()
    for i in range(n - 1, -1, -1):
        acc = ec_double(b, acc)
        acc = ec_select(b, bits1[i], ec_add(b, acc, pt1), acc)
        acc = ec_select(b, bits2[i], ec_add(b, acc, pt2), acc)
    shifted = _mul_ints(1 << n, offset_point())
    return ec_add(b, acc, (shifted[0], (P - shifted[1]) % P))


def gadget_on_curve(b: CircuitBuilder, x, y) -> None:
    b.assert_zero(b.sub(b.sub(b.mul(y, y), b.mul(b.mul(x, x), x)), B))


def gadget_schnorr_verify(b: CircuitBuilder, pk_x, pk_y, e, s, msg) -> None:
    """Constrain (e, s) to be a valid Schnorr signature on ``msg`` under (pk_x, pk_y)."""
    for name, w in (("e", e), ("s", s)):
        if not isinstance(w, Wire):
            raise GadgetError(f"signature component {name} must be a wire")
    gadget_on_curve(b, pk_x, pk_y)
    s_bits = _bits(b, s, SCALAR_BITS)
    e_bits = _bits(b, e, SCALAR_BITS)
    gx, gy = G.x.value, G.y.value
    rx, ry = gadget_double_scalar_mul(b, s_bits, (gx, gy), e_bits, (pk_x, pk_y))
    b.assert_equal(gadget_sponge(b, [rx, ry, pk_x, pk_y, msg]), e)
