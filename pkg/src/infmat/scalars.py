"""Exact scalar fields: the rationals and prime fields GF(p), p odd.

Matrices store raw field values (``Fraction`` for the rationals, ``int``
residues in ``[0, p)`` for prime fields) and route all arithmetic through
the owning :class:`Field`.  :class:`Scalar` is a thin tagged wrapper for
callers who want operator syntax on single values.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, FieldMismatch, ParseError

_ZERO, _ONE = Fraction(0), Fraction(1)
_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


class Field:
    """Abstract exact field.  Subclasses are immutable and hashable."""

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def coerce(self, x):
        """Map an int, Fraction, numeric string or :class:`Scalar` into the field."""
        raise NotImplementedError

    def add(self, x, y):
        raise NotImplementedError

    def sub(self, x, y):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def scalar(self, x) -> Scalar:
        return Scalar(self, self.coerce(x))

    def random_element(self, rng, bound: int = 5, nonzero: bool = False):
        """Uniform integer in ``[-bound, bound]`` mapped into the field."""
        while True:
            v = self.coerce(rng.randint(-bound, bound))
            if not (nonzero and v == 0):
                return v

    @staticmethod
    def from_json(obj) -> Field:
        kind = obj.get("type") if isinstance(obj, dict) else None
        if kind == "Q":
            return QQ
        if kind == "GF":
            return GF(int(obj["p"]))
        raise ParseError(f"unknown field description: {obj!r}")


@dataclass(frozen=True)
class Rationals(Field):
    def __repr__(self):
        return "QQ"

    def zero(self):
        return _ZERO

    def one(self):
        return _ONE

    def coerce(self, x):
        if isinstance(x, Scalar):
            self._check(x)
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, float):
            raise TypeError("floating point values are not exact field elements")
        return Fraction(x)

    def _check(self, s):
        if s.field != self:
            raise FieldMismatch(f"{s.field!r} value used in {self!r}")

    # Fraction arithmetic normalizes through gcd every time; zeros and unit
    # signs (most basis entries) are cheap to short-circuit.
    def add(self, x, y):
        if not x:
            return y
        if not y:
            return x
        return x + y

    def sub(self, x, y):
        if not y:
            return x
        return x - y

    def mul(self, x, y):
        if y.denominator == 1:
            n = y.numerator
            if n == 1:
                return x
            if n == -1:
                return -x
        if x.denominator == 1:
            n = x.numerator
            if n == 1:
                return y
            if n == -1:
                return -y
        return x * y

    def neg(self, x):
        return -x

    def inv(self, x):
        if x == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / x

    def parse(self, text):
        m = _RATIONAL_RE.match(str(text))
        if not m:
            raise ParseError(f"not a rational: {text!r}")
        num, den = m.groups()
        if den is not None and int(den) == 0:
            raise ParseError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den) if den else 1)

    def format(self, x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def to_json(self):
        return {"type": "Q"}


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    def __post_init__(self):
        # char 2 is excluded: skew/symmetric splitting needs 1/2
        if not _is_prime(self.p) or self.p < 3:
            raise ValueError(f"modulus must be an odd prime, got {self.p}")

    def __repr__(self):
        return f"GF({self.p})"

    def zero(self):
        return 0

    def one(self):
        return 1

    def coerce(self, x):
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldMismatch(f"{x.field!r} value used in {self!r}")
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DivisionByZero(f"{x} has no image in {self!r}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, float):
            raise TypeError("floating point values are not exact field elements")
        return int(x) % self.p

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return x * y % self.p

    def neg(self, x):
        return -x % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise DivisionByZero("inverse of zero")
        return pow(x, -1, self.p)

    def parse(self, text):
        m = _RATIONAL_RE.match(str(text))
        if not m:
            raise ParseError(f"not a residue: {text!r}")
        num, den = m.groups()
        if den is not None:
            return self.coerce(Fraction(int(num), int(den)))
        return int(num) % self.p

    def format(self, x):
        return str(int(x) % self.p)

    def to_json(self):
        return {"type": "GF", "p": self.p}


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field."""

    field: Field
    value: object

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return Scalar(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.value, self._other(other)))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"Scalar({self.field!r}, {self})"


def scalar_arith(op: str, x: Scalar, y: Scalar | None = None) -> Scalar:
    """Apply one of ``add, sub, mul, inv, neg`` exactly."""
    if op in ("inv", "neg"):
        return x.inverse() if op == "inv" else -x
    if y is None:
        raise TypeError(f"{op} needs two operands")
    if x.field != y.field:
        raise FieldMismatch(f"{x.field!r} vs {y.field!r}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")
