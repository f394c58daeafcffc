"""Exact arithmetic on dyadic rationals num / 2^exp.

Every coordinate in this package (breakpoints, interval endpoints, values of
piecewise-linear maps) is a dyadic rational.  Composing maps multiplies
power-of-2 slopes and stacks affine pieces, so numerators grow without bound;
they are arbitrary-precision ints.  Values are immutable and canonical: the
exponent is zero, or the numerator is odd.

Division is deliberately absent.  Dyadics are closed under +, -, * and
multiplication by powers of 2 (``mul_pow2``), and nothing here needs more;
a general quotient would leave the dyadics.
"""

from __future__ import annotations

from .errors import ResourceLimitError
from .varint import append_svarint, append_uvarint, read_svarint, read_uvarint

# Exponent depth guard: a deeper exponent is a runaway computation, not data.
MAX_EXPONENT = 1 << 32


def _canonical(num: int, exp: int) -> tuple[int, int]:
    if num == 0:
        return 0, 0
    if exp > 0 and not num & 1:
        tz = (num & -num).bit_length() - 1
        k = tz if tz < exp else exp
        num >>= k
        exp -= k
    if exp >= MAX_EXPONENT:
        raise ResourceLimitError(f"dyadic exponent {exp} exceeds 2^32")
    return num, exp


class Dyadic:
    """Immutable dyadic rational ``num / 2**exp`` in canonical form."""

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        if not isinstance(num, int) or not isinstance(exp, int):
            raise TypeError("Dyadic takes int numerator and exponent")
        if exp < 0:
            num <<= -exp
            exp = 0
        self.num, self.exp = _canonical(num, exp)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        e1, e2 = self.exp, other.exp
        if e1 == e2:
            return _make(self.num + other.num, e1)
        if e1 > e2:
            return _make(self.num + (other.num << (e1 - e2)), e1)
        return _make((self.num << (e2 - e1)) + other.num, e2)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        e1, e2 = self.exp, other.exp
        if e1 == e2:
            return _make(self.num - other.num, e1)
        if e1 > e2:
            return _make(self.num - (other.num << (e1 - e2)), e1)
        return _make((self.num << (e2 - e1)) - other.num, e2)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        return _make(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __neg__(self):
        d = Dyadic.__new__(Dyadic)
        d.num, d.exp = -self.num, self.exp
        return d

    def mul_pow2(self, k: int) -> "Dyadic":
        """Exact value * 2^k."""
        if k >= 0:
            d = Dyadic.__new__(Dyadic)
            if self.exp >= k:
                d.num, d.exp = self.num, self.exp - k
            else:
                d.num, d.exp = self.num << (k - self.exp), 0
            return d
        return _make(self.num, self.exp - k)

    def half(self) -> "Dyadic":
        return _make(self.num, self.exp + 1)

    # -- order and structure -------------------------------------------------

    def __eq__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __lt__(self, other):
        if type(other) is not Dyadic:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        e1, e2 = self.exp, other.exp
        if e1 == e2:
            return self.num < other.num
        if e1 > e2:
            return self.num < other.num << (e1 - e2)
        return self.num << (e2 - e1) < other.num

    def __le__(self, other):
        other2 = other if type(other) is Dyadic else _coerce(other)
        if other2 is NotImplemented:
            return NotImplemented
        return not Dyadic.__lt__(other2, self)

    def __gt__(self, other):
        other2 = other if type(other) is Dyadic else _coerce(other)
        if other2 is NotImplemented:
            return NotImplemented
        return Dyadic.__lt__(other2, self)

    def __ge__(self, other):
        other2 = other if type(other) is Dyadic else _coerce(other)
        if other2 is NotImplemented:
            return NotImplemented
        return not Dyadic.__lt__(self, other2)

    def __hash__(self):
        return hash((self.num, self.exp))

    def __bool__(self):
        return self.num != 0

    def floor(self) -> int:
        """Greatest integer <= value (arithmetic shift handles negatives)."""
        return self.num >> self.exp

    def ceil(self) -> int:
        return -((-self.num) >> self.exp)

    def is_integer(self) -> bool:
        return self.exp == 0

    def two_adic(self) -> tuple[int, int]:
        """Return (odd, k) with value = odd * 2^k; value must be nonzero."""
        if self.num == 0:
            raise ValueError("two_adic of zero is undefined")
        if self.exp:
            return self.num, -self.exp
        tz = (self.num & -self.num).bit_length() - 1
        return self.num >> tz, tz

    # -- serialization -------------------------------------------------------

    def append_to(self, buf: bytearray) -> None:
        append_svarint(buf, self.num)
        append_uvarint(buf, self.exp)

    @classmethod
    def read_from(cls, data: bytes, pos: int) -> tuple["Dyadic", int]:
        num, pos = read_svarint(data, pos)
        exp, pos = read_uvarint(data, pos)
        return cls(num, exp), pos

    # -- display -------------------------------------------------------------

    def __repr__(self):
        return f"Dyadic({self.num}, {self.exp})"

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{1 << self.exp}"


def _make(num: int, exp: int) -> "Dyadic":
    """Internal fast constructor; canonicalizes without type checks."""
    d = Dyadic.__new__(Dyadic)
    if num == 0:
        d.num, d.exp = 0, 0
        return d
    if exp > 0 and not num & 1:
        tz = (num & -num).bit_length() - 1
        k = tz if tz < exp else exp
        num >>= k
        exp -= k
    if exp >= MAX_EXPONENT:
        raise ResourceLimitError(f"dyadic exponent {exp} exceeds 2^32")
    d.num, d.exp = num, exp
    return d


def _coerce(value) -> "Dyadic":
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int):
        d = Dyadic.__new__(Dyadic)
        d.num, d.exp = value, 0
        return d
    return NotImplemented


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, 1)
