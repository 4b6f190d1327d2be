"""Exact coefficient fields: prime fields F_p and the rationals.

Polynomials store raw coefficient values (``int`` residues for F_p,
``Fraction`` for Q) and go through the owning :class:`FieldDescriptor` for
arithmetic.  :class:`Scalar` wraps a value together with its field for the
public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, FieldMismatch

MAX_PRIME = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    """Either ``prime`` (with modulus ``p``) or ``rational`` (``p == 0``)."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind == "prime":
            if not (2 <= self.p < MAX_PRIME) or not is_prime(self.p):
                raise ValueError(f"modulus {self.p} is not a prime below 2^31")
        elif self.kind == "rational":
            if self.p != 0:
                raise ValueError("rational field has characteristic 0")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "prime"

    def __str__(self):
        return f"F_{self.p}" if self.kind == "prime" else "Q"

    # raw-value arithmetic, used in the hot loops of poly/groebner

    def norm(self, v):
        if self.p:
            return v % self.p
        return v if isinstance(v, Fraction) else Fraction(v)

    def coerce(self, v):
        """Bring an int, Fraction or Scalar into this field's raw form."""
        if isinstance(v, Scalar):
            if v.field != self:
                raise FieldMismatch(f"{v.field} value used in {self}")
            return v.value
        if isinstance(v, Fraction):
            if self.p:
                return self.div(v.numerator % self.p, v.denominator % self.p)
            return v
        if isinstance(v, int):
            return self.norm(v)
        raise TypeError(f"cannot coerce {type(v).__name__} into {self}")

    def inv(self, v):
        if not v:
            raise DivisionByZero(f"inverse of zero in {self}")
        if self.p:
            return pow(v, -1, self.p)
        return 1 / v

    def div(self, a, b):
        return self.norm(a * self.inv(b))

    def zero(self):
        return 0 if self.p else Fraction(0)

    def one(self):
        return 1 if self.p else Fraction(1)

    def format(self, v) -> str:
        """Print a raw value; F_p residues are shown in the symmetric range."""
        if self.p:
            if self.p > 2 and v > self.p // 2:
                return str(v - self.p)
            return str(v)
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"

    def signed(self, v):
        """Split ``v`` into (negative?, magnitude) for printing."""
        if self.p:
            if self.p > 2 and v > self.p // 2:
                return True, self.p - v
            return False, v
        return (v < 0), abs(v)


def GF(p: int) -> FieldDescriptor:
    return FieldDescriptor("prime", p)


QQ = FieldDescriptor("rational")


@dataclass(frozen=True)
class Scalar:
    field: FieldDescriptor
    value: object

    @classmethod
    def of(cls, field: FieldDescriptor, v) -> "Scalar":
        return cls(field, field.coerce(v))

    def _check(self, other):
        if not isinstance(other, Scalar):
            return Scalar.of(self.field, other)
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        o = self._check(other)
        return Scalar(self.field, self.field.norm(self.value + o.value))

    def __sub__(self, other):
        o = self._check(other)
        return Scalar(self.field, self.field.norm(self.value - o.value))

    def __mul__(self, other):
        o = self._check(other)
        return Scalar(self.field, self.field.norm(self.value * o.value))

    def __truediv__(self, other):
        o = self._check(other)
        return Scalar(self.field, self.field.div(self.value, o.value))

    def __neg__(self):
        return Scalar(self.field, self.field.norm(-self.value))

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self.field.p:
            return Scalar(self.field, pow(self.value, n, self.field.p))
        return Scalar(self.field, self.value**n)

    def __bool__(self):
        return bool(self.value)

    def inverse(self) -> "Scalar":
        return Scalar(self.field, self.field.inv(self.value))

    def __str__(self):
        return self.field.format(self.value)


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def scalar_inverse(a: Scalar) -> Scalar:
    return a.inverse()
