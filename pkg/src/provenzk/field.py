"""Prime-field residues for the circuit field and the embedded-curve scalar field.

The circuit field modulus ``P`` is the BN254 scalar-field prime. The embedded
curve (Grumpkin, ``y^2 = x^3 - 17`` over F_P) has prime order ``Q``, which is
the BN254 base-field prime. Hot paths elsewhere in the package operate on
plain ``int`` residues; the classes here are the typed public surface.
"""

from __future__ import annotations

from .errors import DivisionByZero

P = 21888242871839275222246405745257275088548364400416034343698204186575808495617
Q = 21888242871839275222246405745257275088696311157297823662689037894645226208583

ENCODED_SIZE = 32


class _Residue:
    __slots__ = ("value",)
    MODULUS: int = 0

    def __init__(self, value=0):
        if isinstance(value, _Residue):
            value = value.value
        object.__setattr__(self, "value", int(value) % self.MODULUS)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other.value
        if isinstance(other, int) and not isinstance(other, _Residue):
            return other % self.MODULUS
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return type(self)(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-self.value)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * type(self)(o).inv()

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inv() ** (-exponent)
        return type(self)(pow(self.value, exponent, self.MODULUS))

    def inv(self):
        if self.value == 0:
            raise DivisionByZero(f"inverse of zero in {type(self).__name__}")
        return type(self)(pow(self.value, -1, self.MODULUS))

    def __eq__(self, other):
        if isinstance(other, type(self)):
            return self.value == other.value
        if isinstance(other, int) and not isinstance(other, _Residue):
            return self.value == other % self.MODULUS
        return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, self.value))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{type(self).__name__}({self.value})"

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(ENCODED_SIZE, "big")

    @classmethod
    def from_bytes(cls, data: bytes):
        if len(data) != ENCODED_SIZE:
            raise ValueError(f"expected {ENCODED_SIZE} bytes, got {len(data)}")
        v = int.from_bytes(data, "big")
        if v >= cls.MODULUS:
            raise ValueError("non-canonical encoding")
        return cls(v)

    def hex(self) -> str:
        return format(self.value, "x")


class FieldElement(_Residue):
    """Element of the circuit field F_P."""

    __slots__ = ()
    MODULUS = P

    def signed(self) -> int:
        """Centered representative in (-P/2, P/2]."""
        return self.value - P if self.value > P // 2 else self.value


class Scalar(_Residue):
    """Element of Z_Q, the scalar ring of the embedded curve group."""

    __slots__ = ()
    MODULUS = Q


FieldDigest = FieldElement


def is_square(a: int) -> bool:
    a %= P
    return a == 0 or pow(a, (P - 1) // 2, P) == 1


def sqrt(a: int) -> int | None:
    """Tonelli-Shanks square root in F_P; ``None`` for non-residues."""
    a %= P
    if a == 0:
        return 0
    if not is_square(a):
        return None
    s, q = 0, P - 1
    while q % 2 == 0:
        s += 1
        q //= 2
    z = 2
    while is_square(z):
        z += 1
    m, c, t, r = s, pow(z, q, P), pow(a, q, P), pow(a, (q + 1) // 2, P)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % P
            i += 1
        b = pow(c, 1 << (m - i - 1), P)
        m, c = i, b * b % P
        t, r = t * c % P, r * b % P
    return r
