"""Grumpkin group arithmetic: ``y^2 = x^3 + B`` over F_P with ``B = -17``.

Affine points are the public type. Scalar multiplication runs internally in
Jacobian coordinates on plain ints to avoid one inversion per step.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import InvalidPoint
from .field import P, Q, FieldElement, sqrt

B = P - 17

POINT_SIZE = 65
_TAG_AFFINE = 0x04
_TAG_INFINITY = 0x00


@dataclass(frozen=True)
class CurvePoint:
    x: FieldElement = FieldElement(0)
    y: FieldElement = FieldElement(0)
    infinity: bool = False

    @classmethod
    def at_infinity(cls) -> CurvePoint:
        return cls(FieldElement(0), FieldElement(0), True)

    @classmethod
    def from_ints(cls, x: int, y: int) -> CurvePoint:
        return cls(FieldElement(x), FieldElement(y))

    def is_on_curve(self) -> bool:
        if self.infinity:
            return True
        x, y = self.x.value, self.y.value
        return (y * y - x * x * x - B) % P == 0

    def __neg__(self) -> CurvePoint:
        if self.infinity:
            return self
        return CurvePoint(self.x, -self.y)

    def __add__(self, other: CurvePoint) -> CurvePoint:
        return point_add(self, other)

    def __sub__(self, other: CurvePoint) -> CurvePoint:
        return point_add(self, -other)

    def __rmul__(self, k) -> CurvePoint:
        return scalar_mul(k, self)

    def to_bytes(self) -> bytes:
        if self.infinity:
            return bytes([_TAG_INFINITY])
        return bytes([_TAG_AFFINE]) + self.x.to_bytes() + self.y.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> CurvePoint:
        if data == bytes([_TAG_INFINITY]):
            return cls.at_infinity()
        if len(data) != POINT_SIZE or data[0] != _TAG_AFFINE:
            raise InvalidPoint("point encoding must be 0x00 or 0x04||x||y")
        try:
            pt = cls(FieldElement.from_bytes(data[1:33]), FieldElement.from_bytes(data[33:]))
        except ValueError as exc:
            raise InvalidPoint(str(exc)) from None
        if not pt.is_on_curve():
            raise InvalidPoint("decoded point is not on the curve")
        return pt

    def __repr__(self):
        if self.infinity:
            return "CurvePoint(infinity)"
        return f"CurvePoint(x={self.x.hex()}, y={self.y.hex()})"


INFINITY = CurvePoint.at_infinity()


def _require_on_curve(pt: CurvePoint) -> None:
    if not isinstance(pt, CurvePoint) or not pt.is_on_curve():
        raise InvalidPoint(f"{pt!r} is not on the curve")


def _affine_add(p1, p2):
    """Affine addition on int pairs; ``None`` is the identity."""
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        if (y1 + y2) % P == 0:
            return None
        lam = 3 * x1 * x1 * pow(2 * y1, -1, P) % P
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, P) % P
    x3 = (lam * lam - x1 - x2) % P
    return x3, (lam * (x1 - x3) - y1) % P


def point_add(a: CurvePoint, b: CurvePoint) -> CurvePoint:
    _require_on_curve(a)
    _require_on_curve(b)
    r = _affine_add(None if a.infinity else (a.x.value, a.y.value),
                    None if b.infinity else (b.x.value, b.y.value))
    return INFINITY if r is None else CurvePoint.from_ints(*r)


# Jacobian coordinates (X, Y, Z) with x = X/Z^2, y = Y/Z^3; Z == 0 is infinity.

def _jdouble(X, Y, Z):
    if Z == 0 or Y == 0:
        return 0, 1, 0
    A = X * X % P
    Bq = Y * Y % P
    C = Bq * Bq % P
    D = 2 * ((X + Bq) * (X + Bq) - A - C) % P
    E = 3 * A % P
    X3 = (E * E - 2 * D) % P
    Y3 = (E * (D - X3) - 8 * C) % P
    Z3 = 2 * Y * Z % P
    return X3, Y3, Z3


def _jadd(X1, Y1, Z1, X2, Y2, Z2):
    if Z1 == 0:
        return X2, Y2, Z2
    if Z2 == 0:
        return X1, Y1, Z1
    Z1Z1 = Z1 * Z1 % P
    Z2Z2 = Z2 * Z2 % P
    U1 = X1 * Z2Z2 % P
    U2 = X2 * Z1Z1 % P
    S1 = Y1 * Z2 * Z2Z2 % P
    S2 = Y2 * Z1 * Z1Z1 % P
    if U1 == U2:
        if S1 == S2:
            return _jdouble(X1, Y1, Z1)
        return 0, 1, 0
    H = (U2 - U1) % P
    R = (S2 - S1) % P
    HH = H * H % P
    HHH = H * HH % P
    V = U1 * HH % P
    X3 = (R * R - HHH - 2 * V) % P
    Y3 = (R * (V - X3) - S1 * HHH) % P
    Z3 = Z1 * Z2 * H % P
    return X3, Y3, Z3


def _to_affine(X, Y, Z):
    if Z == 0:
        return None
    zi = pow(Z, -1, P)
    zi2 = zi * zi % P
    return X * zi2 % P, Y * zi2 * zi % P


def _mul_ints(k: int, pt):
    """k * pt for an int pair ``pt``; returns an int pair or ``None``."""
    if pt is None or k == 0:
        return None
    X, Y, Z = 0, 1, 0
    px, py = pt
    for bit in bin(k)[2:]:
        X, Y, Z = _jdouble(X, Y, Z)
        if bit == "1":
            X, Y, Z = _jadd(X, Y, Z, px, py, 1)
    return _to_affine(X, Y, Z)


def _double_mul_ints(k1: int, p1, k2: int, p2):
    """k1*p1 + k2*p2 by interleaved double-and-add (Shamir's trick)."""
    sum12 = _affine_add(p1, p2)
    X, Y, Z = 0, 1, 0
    n = max(k1.bit_length(), k2.bit_length())
    for i in range(n - 1, -1, -1):
        X, Y, Z = _jdouble(X, Y, Z)
        b1 = (k1 >> i) & 1
        b2 = (k2 >> i) & 1
        addend = sum12 if b1 and b2 else p1 if b1 else p2 if b2 else None
        if addend is not None:
            X, Y, Z = _jadd(X, Y, Z, addend[0], addend[1], 1)
    return _to_affine(X, Y, Z)


def scalar_mul(k, pt: CurvePoint) -> CurvePoint:
    """Double-and-add over the bits of ``k`` (reduced mod Q)."""
    _require_on_curve(pt)
    k = int(k) % Q
    r = _mul_ints(k, None if pt.infinity else (pt.x.value, pt.y.value))
    return INFINITY if r is None else CurvePoint.from_ints(*r)


def double_scalar_mul(k1, p1: CurvePoint, k2, p2: CurvePoint) -> CurvePoint:
    _require_on_curve(p1)
    _require_on_curve(p2)
    r = _double_mul_ints(int(k1) % Q, None if p1.infinity else (p1.x.value, p1.y.value),
                         int(k2) % Q, None if p2.infinity else (p2.x.value, p2.y.value))
    return INFINITY if r is None else CurvePoint.from_ints(*r)


@functools.lru_cache(maxsize=None)
def derive_generator() -> CurvePoint:
    """First x = 1, 2, ... with x^3 + B square; the even root is taken."""
    x = 1
    while True:
        y = sqrt(x * x * x + B)
        if y is not None:
            if y % 2:
                y = P - y
            return CurvePoint.from_ints(x, y)
        x += 1


def check_group_order() -> bool:
    """True iff Q times the derived generator is the identity (unreduced multiply)."""
    g = derive_generator()
    return _mul_ints(Q, (g.x.value, g.y.value)) is None


G = derive_generator()
