"""Parameter constraints such as ``q in R_4`` or ``q^2, q^3 != 1``.

A constraint is a conjunction of clauses, each of one of two kinds:

* membership ``q in R_a | R_b`` (or ``q notin R_a``), meaning the
  multiplicative order of ``q`` is (not) one of the listed values; the
  left side may be any monomial, as in ``-q^2 in R_3``;
* a relation ``X = Y`` or ``X != Y`` between monomials ``±q^e``.  The left
  side may be a comma separated list, ``q^2, q^3 != 1`` meaning both.

Clauses are separated by ``;`` or by a sentence period.  A constraint that
says nothing beyond ``q != 1`` picks up the standing convention
``q in R_3`` (see :data:`STANDING_ORDER`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .labels import GENERIC, Label, LabelError, ParamOrder

__all__ = [
    "Constraint",
    "ConstraintError",
    "STANDING_ORDER",
    "parse_constraint",
]

STANDING_ORDER = 3


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class _Member:
    orders: frozenset
    negate: bool = False
    mono: tuple = (1, 1)

    def holds(self, q: Label) -> bool:
        return (_mono(q, self.mono).multiplicative_order() in self.orders) != self.negate

    def __str__(self):
        from .labels import format_label

        rs = " | ".join(f"R_{k}" for k in sorted(self.orders))
        return f"{format_label(*self.mono)} {'notin' if self.negate else 'in'} {rs}"


@dataclass(frozen=True)
class _Relation:
    lhs: tuple  # (sign, exp)
    equal: bool
    rhs: tuple

    def holds(self, q: Label) -> bool:
        a = _mono(q, self.lhs)
        b = _mono(q, self.rhs)
        return (a == b) == self.equal

    def __str__(self):
        from .labels import format_label

        return f"{format_label(*self.lhs)} {'=' if self.equal else '!='} {format_label(*self.rhs)}"


def _mono(q: Label, se) -> Label:
    sign, exp = se
    v = q ** exp
    return -v if sign < 0 else v


_TERM = re.compile(r"^([+-]?)\s*(?:(1)|q(?:\^([+-]?\d+))?)$")


def _term(text: str):
    m = _TERM.match(text.strip())
    if not m:
        raise ConstraintError(f"bad monomial {text.strip()!r}")
    sign = -1 if m.group(1) == "-" else 1
    if m.group(2):
        return sign, 0
    return sign, int(m.group(3)) if m.group(3) else 1


def _normalize(text: str) -> str:
    t = text
    for a, b in (
        ("\\not=", "!="), ("\\neq", "!="), ("\\ne ", "!= "), ("≠", "!="),
        ("\\notin", " notin "), ("∉", " notin "), ("\\in", " in "), ("∈", " in "),
        ("\\cup", "|"), ("∪", "|"), ("\\", " "),
    ):
        t = t.replace(a, b)
    t = re.sub(r"[${}()]", "", t)
    t = re.sub(r"\s*\^\s*", "^", t)
    return t


_RSET = re.compile(r"^R_(\d+)$")


def _parse_clause(piece: str):
    piece = piece.strip().strip(",").strip()
    if not piece:
        return []
    m = re.match(r"^(.+?)\s+(notin|in)\s+(.+)$", piece)
    if m:
        orders = set()
        for part in re.split(r"\||\bU\b|\bcup\b|\bor\b", m.group(3)):
            rm = _RSET.match(part.strip())
            if not rm:
                raise ConstraintError(f"bad root-of-unity set {part.strip()!r}")
            orders.add(int(rm.group(1)))
        return [_Member(frozenset(orders), m.group(2) == "notin", _term(m.group(1)))]
    m = re.match(r"^(.+?)\s*(!=|=)\s*(.+)$", piece)
    if not m:
        raise ConstraintError(f"cannot read clause {piece!r}")
    rhs = _term(m.group(3))
    return [_Relation(_term(x), m.group(2) == "=", rhs) for x in m.group(1).split(",")]


@dataclass(frozen=True)
class Constraint:
    """A parsed parameter constraint; ``text`` keeps the original wording."""

    text: str
    clauses: tuple
    standing: bool = False

    def holds(self, q: Label) -> bool:
        """True when the value ``q`` satisfies every clause (and ``q != 1``)."""
        if q.is_one():
            return False
        if self.standing and q.multiplicative_order() != STANDING_ORDER:
            return False
        return all(c.holds(q) for c in self.clauses)

    def admits(self, order: ParamOrder) -> bool:
        """Does the primitive parameter of ``order`` satisfy the constraint?"""
        return self.holds(Label(1, 1, order))

    def smallest_order(self, limit: int = 64) -> int | None:
        for n in range(3, limit + 1):
            if self.admits(ParamOrder(n)):
                return n
        return None

    def values(self, order: ParamOrder, max_exp: int = 6) -> Iterator[Label]:
        """All admissible values of ``q`` in the label group of ``order``.

        Under generic order the candidates are ``±q^k`` with ``|k| <= max_exp``.
        """
        if order.n is not None:
            cands = (Label.from_code(order, c) for c in range(order.modulus))
        else:
            cands = (Label(s, k, GENERIC) for k in range(-max_exp, max_exp + 1) for s in (1, -1))
        for q in cands:
            if self.holds(q):
                yield q

    def __str__(self):
        return self.text


def parse_constraint(text: str) -> Constraint:
    """Parse the constraint grammar described in the module docstring."""
    norm = _normalize(text or "")
    clauses = []
    # a period ends a sentence unless it sits between digits
    for piece in re.split(r";|\.(?!\d)", norm):
        try:
            clauses.extend(_parse_clause(piece))
        except LabelError as exc:  # pragma: no cover - defensive
            raise ConstraintError(str(exc)) from None
    trivial = _Relation((1, 1), False, (1, 0))
    standing = all(c == trivial for c in clauses)
    return Constraint(text or "", tuple(clauses), standing)
