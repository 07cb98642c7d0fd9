"""Parameter-constrained GDD patterns and the bundled catalog files.

A pattern is stored as a GDD of generic order whose labels are read as
monomials in a symbol ``q``; :meth:`CatalogEntry.instantiate` substitutes a
concrete value for ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable

from .constraints import Constraint, parse_constraint
from .fileformat import Entry, parse_gdd_file
from .gdd import GDD
from .labels import GENERIC, Label, ParamOrder

__all__ = ["CatalogEntry", "entries_from_file", "bundled", "instantiate"]


def instantiate(pattern: GDD, q: Label) -> GDD | None:
    """Substitute ``q`` into a generic-order pattern.

    Returns None when an edge of the pattern would collapse to label 1, since
    the result would no longer have the pattern's shape.
    """
    if not pattern.order.is_generic:
        raise ValueError("patterns are stored with generic order")
    order = q.order

    def sub(code):
        sign, exp = GENERIC.decode(code)
        v = q ** exp
        return (-v if sign < 0 else v).code

    n = pattern.n
    qt = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if pattern.qt[i][j]:
                c = sub(pattern.qt[i][j])
                if c == 0:
                    return None
                qt[i][j] = qt[j][i] = c
    return GDD(order, [sub(d) for d in pattern.diag], qt)


@dataclass(frozen=True)
class CatalogEntry:
    tag: str
    pattern: GDD
    constraint: Constraint
    section: str = ""

    def instantiate(self, q: Label) -> GDD | None:
        if not self.constraint.holds(q):
            return None
        return instantiate(self.pattern, q)

    def at_order(self, order: ParamOrder) -> GDD | None:
        """Instance at the primitive parameter of ``order``, None if inadmissible."""
        return self.instantiate(Label(1, 1, order))

    def degenerate_at(self, order: ParamOrder) -> bool:
        """True when a label other than ``±1`` collapses to ``±1`` at ``order``."""
        g = self.at_order(order)
        if g is None:
            return True
        pat = self.pattern
        m1 = GENERIC.minus_one()
        pairs = list(zip(pat.diag, g.diag))
        pairs += [(pat.qt[i][j], g.qt[i][j]) for i in range(pat.n) for j in range(i + 1, pat.n) if pat.qt[i][j]]
        return any(a not in (0, m1) and b in (0, order.minus_one()) for a, b in pairs)

    def admissible_at(self, order: ParamOrder) -> bool:
        """Constraint holds at the primitive parameter and no label collapses."""
        return self.constraint.admits(order) and not self.degenerate_at(order)

    def smallest_order(self, limit: int = 64) -> int | None:
        """Smallest admissible order at which the pattern keeps its labels apart.

        Orders where some ``q^e`` label turns into ``±1`` are skipped (so
        ``q^2, q^3 != 1`` gives 5, not 4); if every admissible order up to
        ``limit`` is degenerate the smallest admissible one is returned.
        """
        first = None
        for n in range(3, limit + 1):
            o = ParamOrder(n)
            if not self.constraint.admits(o):
                continue
            if first is None:
                first = n
            if not self.degenerate_at(o):
                return n
        return first


def entries_from_file(entries: Iterable[Entry], section: str = "") -> list[CatalogEntry]:
    out = []
    for e in entries:
        if not e.gdd.order.is_generic:
            raise ValueError(f"catalog entry {e.tag!r} must use order = generic")
        out.append(CatalogEntry(e.tag, e.gdd, parse_constraint(e.constraint or ""), section))
    return out


@lru_cache(maxsize=None)
def bundled(name: str) -> tuple[CatalogEntry, ...]:
    """Load a catalog shipped in ``gddkit/data`` (e.g. ``"lemma_exceptions"``)."""
    text = resources.files("gddkit.data").joinpath(f"{name}.gdd").read_text()
    return tuple(entries_from_file(parse_gdd_file(text), name))
