"""Exact monomial labels ``±q^e`` for a parameter ``q`` of fixed order.

A :class:`ParamOrder` is either ``Finite(N)`` (``q`` a primitive ``N``-th root
of unity) or ``Generic`` (``q`` of infinite order).  Under ``Finite(N)`` every
label lives in the cyclic group of order ``M = lcm(2, N)`` generated by
``zeta_M``, with ``q -> zeta_M^(M/N)`` and ``-1 -> zeta_M^(M/2)``; a label is
stored as its residue mod ``M`` so that equality is a single comparison.
Under ``Generic`` a label is the literal pair ``(sign, exp)``.

Internally labels are encoded as plain ints ("codes") so that the reflection
oracle can work on them without object overhead:

* finite order: ``code = k mod M``
* generic: ``code = 2*exp + s`` with ``s = 1`` for a minus sign
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import total_ordering

__all__ = [
    "ParamOrder",
    "Finite",
    "GENERIC",
    "Label",
    "LabelError",
    "parse_label",
    "parse_order",
    "INFINITE",
]

INFINITE = None  # returned by multiplicative_order for elements of infinite order


class LabelError(ValueError):
    """Raised for malformed labels or mixed parameter orders."""


@total_ordering
@dataclass(frozen=True)
class ParamOrder:
    """Order of the parameter ``q``; ``n is None`` means generic."""

    n: int | None = None

    def __post_init__(self):
        if self.n is not None and self.n < 1:
            raise LabelError(f"order must be positive, got {self.n}")

    @property
    def is_generic(self) -> bool:
        return self.n is None

    @property
    def modulus(self) -> int | None:
        """Size ``lcm(2, N)`` of the finite label group, ``None`` when generic."""
        if self.n is None:
            return None
        return self.n if self.n % 2 == 0 else 2 * self.n

    def _sort_key(self):
        return (1, 0) if self.n is None else (0, self.n)

    def __lt__(self, other):
        return self._sort_key() < other._sort_key()

    def __str__(self):
        return "generic" if self.n is None else str(self.n)

    # -- raw code arithmetic -------------------------------------------------

    def code(self, sign: int, exp: int) -> int:
        if sign not in (1, -1):
            raise LabelError(f"sign must be +1 or -1, got {sign}")
        if self.n is None:
            return 2 * exp + (sign < 0)
        m = self.modulus
        return (exp * (m // self.n) + (m // 2 if sign < 0 else 0)) % m

    def decode(self, code: int) -> tuple[int, int]:
        """Return the display pair ``(sign, exp)`` of a code.

        For finite order this is the representative with ``|exp|`` minimal,
        ties broken toward ``+`` sign and then toward a positive exponent.
        """
        if self.n is None:
            return (-1 if code & 1 else 1), code >> 1
        m, n = self.modulus, self.n
        step = m // n
        best = None
        for sign, shift in ((1, 0), (-1, m // 2)):
            r = (code - shift) % m
            if r % step:
                continue
            e = (r // step) % n
            for cand in (e, e - n):
                key = (abs(cand), sign < 0, cand < 0)
                if best is None or key < best[0]:
                    best = (key, sign, cand)
        return best[1], best[2]

    def one(self) -> int:
        return 0

    def minus_one(self) -> int:
        return 1 if self.n is None else self.modulus // 2

    def mul(self, a: int, b: int) -> int:
        if self.n is None:
            return 2 * ((a >> 1) + (b >> 1)) + ((a ^ b) & 1)
        return (a + b) % self.modulus

    def inv(self, a: int) -> int:
        if self.n is None:
            return 2 * (-(a >> 1)) + (a & 1)
        return (-a) % self.modulus

    def pow(self, a: int, m: int) -> int:
        if self.n is None:
            return 2 * ((a >> 1) * m) + ((a & 1) & (m & 1))
        return (a * m) % self.modulus

    def order_of(self, a: int) -> int | None:
        if self.n is None:
            if a >> 1:
                return INFINITE
            return 2 if a & 1 else 1
        m = self.modulus
        return m // math.gcd(a, m)

    def qnumber_zero(self, a: int, m: int) -> bool:
        """``(m)_a == 0`` where ``(m)_a = 1 + a + ... + a^(m-1)``."""
        if m == 0:
            return True
        if a == 0:
            return False
        d = self.order_of(a)
        return d is not INFINITE and m % d == 0


def Finite(n: int) -> ParamOrder:
    return ParamOrder(n)


GENERIC = ParamOrder(None)


@total_ordering
class Label:
    """A normalized label ``±q^e`` bound to a :class:`ParamOrder`."""

    __slots__ = ("order", "code")

    def __init__(self, sign: int = 1, exp: int = 0, order: ParamOrder = GENERIC):
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "code", order.code(sign, exp))

    @classmethod
    def from_code(cls, order: ParamOrder, code: int) -> "Label":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "order", order)
        object.__setattr__(obj, "code", code)
        return obj

    @classmethod
    def one(cls, order: ParamOrder) -> "Label":
        return cls(1, 0, order)

    @classmethod
    def minus_one(cls, order: ParamOrder) -> "Label":
        return cls(-1, 0, order)

    def __setattr__(self, name, value):
        raise AttributeError("Label is immutable")

    @property
    def sign(self) -> int:
        return self.order.decode(self.code)[0]

    @property
    def exp(self) -> int:
        return self.order.decode(self.code)[1]

    def _check(self, other: "Label"):
        if not isinstance(other, Label):
            return NotImplemented
        if other.order != self.order:
            raise LabelError(f"order mismatch: {self.order} vs {other.order}")

    def __mul__(self, other: "Label") -> "Label":
        self._check(other)
        return Label.from_code(self.order, self.order.mul(self.code, other.code))

    def __truediv__(self, other: "Label") -> "Label":
        self._check(other)
        o = self.order
        return Label.from_code(o, o.mul(self.code, o.inv(other.code)))

    def __pow__(self, m: int) -> "Label":
        return Label.from_code(self.order, self.order.pow(self.code, m))

    def __neg__(self) -> "Label":
        o = self.order
        return Label.from_code(o, o.mul(self.code, o.minus_one()))

    def inverse(self) -> "Label":
        return Label.from_code(self.order, self.order.inv(self.code))

    def is_one(self) -> bool:
        return self.code == 0

    def is_minus_one(self) -> bool:
        return self.code == self.order.minus_one()

    def multiplicative_order(self) -> int | None:
        """Least ``d >= 1`` with ``self**d == 1``, or ``None`` if infinite."""
        return self.order.order_of(self.code)

    def qnumber_is_zero(self, m: int) -> bool:
        if m < 0:
            raise LabelError("q-number index must be non-negative")
        return self.order.qnumber_zero(self.code, m)

    def __eq__(self, other):
        if not isinstance(other, Label):
            return NotImplemented
        return self.order == other.order and self.code == other.code

    def __lt__(self, other):
        if not isinstance(other, Label):
            return NotImplemented
        return (self.order, self.code) < (other.order, other.code)

    def __hash__(self):
        return hash((self.order, self.code))

    def __str__(self):
        return format_label(*self.order.decode(self.code))

    def __repr__(self):
        return f"Label({self}, order={self.order})"


def format_label(sign: int, exp: int) -> str:
    if exp == 0:
        return "1" if sign > 0 else "-1"
    body = "q" if exp == 1 else f"q^{exp}"
    return body if sign > 0 else "-" + body


_LABEL_RE = re.compile(r"^\s*(-)?\s*(?:(1)|q(?:\s*\^\s*([+-]?\d+))?)\s*$")


def parse_label(text: str, order: ParamOrder) -> Label:
    """Parse ``1 | -1 | q | -q | q^<int> | -q^<int>``."""
    m = _LABEL_RE.match(text)
    if not m:
        raise LabelError(f"bad label {text!r}")
    sign = -1 if m.group(1) else 1
    if m.group(2):
        return Label(sign, 0, order)
    exp = int(m.group(3)) if m.group(3) is not None else 1
    return Label(sign, exp, order)


def parse_order(text: str) -> ParamOrder:
    text = text.strip()
    if text == "generic":
        return GENERIC
    try:
        n = int(text)
    except ValueError:
        raise LabelError(f"bad parameter order {text!r}") from None
    if n < 3:
        raise LabelError(f"parameter order must be >= 3 or generic, got {n}")
    return ParamOrder(n)
