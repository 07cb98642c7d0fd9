"""Bank of non-arithmetic filters for small GDDs.

Each filter has a hypothesis on the shape and labels of a GDD; when the
hypothesis holds the GDD is declared non-arithmetic unless it matches one of
the filter's exception patterns (stored as data in
``gddkit/data/lemma_exceptions.gdd``) or, where the filter allows it, is
classical.  Filters are pruning aids: the reflection oracle stays the final
authority, and the test-suite checks the bank against it.

Rank-4 shapes with a degree-3 vertex use these roles:

* star: ``center`` and three ``leaves``;
* triangle with tail: tail ``a``, hub ``b`` (degree 3), triangle ``c``, ``d``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .catalog import bundled
from .chains import chain_places, is_classical
from .gdd import GDD, ShapeKind

__all__ = [
    "FilterOutcome",
    "FilterVerdict",
    "FilterConfig",
    "LEMMAS",
    "filter_bank",
    "first_rejection",
    "lemma_tags",
    "exception_index",
]

LEMMAS = ("L2.20", "L2.56", "L2.59", "L2.60", "L2.61", "L2.77", "L2.78", "L2.79",
          "L2.80", "L2.81", "L2.82", "L2.90")


class FilterOutcome(str, Enum):
    REJECTS = "rejects-non-arithmetic"
    EXCEPTION = "exception-matched"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class FilterVerdict:
    lemma: str
    outcome: FilterOutcome
    exception: str | None = None
    detail: str = ""

    def __str__(self):
        s = f"{self.lemma}: {self.outcome.value}"
        if self.exception:
            s += f" ({self.exception})"
        return s


@dataclass(frozen=True)
class FilterConfig:
    """``l278_reading`` picks the grouping of the two-vertex clause of L2.78.

    * ``"grouped"``: ``(q22 != -1 and qt32 q22 != 1) or (q33 != -1 and qt32 q33 != 1)``
    * ``"inner-or"``: ``q22 != -1 and (qt32 q22 != 1 or q33 != -1) and qt32 q33 != 1``
    """

    l278_reading: str = "grouped"
    enabled: frozenset = frozenset(LEMMAS)

    def __post_init__(self):
        if self.l278_reading not in ("grouped", "inner-or"):
            raise ValueError(f"unknown reading {self.l278_reading!r}")


DEFAULT_CONFIG = FilterConfig()


# -- exception lookup ----------------------------------------------------------------


@lru_cache(maxsize=32)
def exception_index(order, max_exp: int = 0) -> dict:
    """Canonical form -> exception tags, over every admissible value of q."""
    index: dict = {}
    for entry in bundled("lemma_exceptions"):
        for q in entry.constraint.values(order, max_exp=max_exp):
            g = entry.instantiate(q)
            if g is not None:
                index.setdefault(g.canonical_form(), set()).add(entry.tag)
    return {k: tuple(sorted(v)) for k, v in index.items()}


def _exp_bound(g: GDD) -> int:
    if g.order.n is not None:
        return 0
    codes = list(g.diag) + [c for row in g.qt for c in row if c]
    return max([abs(c >> 1) for c in codes] + [1])


def lemma_tags(g: GDD, lemma: str | None = None) -> list[str]:
    """Exception tags of ``lemma`` (e.g. ``"2.20"``) matched by ``g``; all tags if None."""
    tags = exception_index(g.order, _exp_bound(g)).get(g.canonical_form(), ())
    if lemma is None:
        return list(tags)
    return [t for t in tags if t.startswith(lemma.lstrip("L") + "(")]


# -- shape roles ----------------------------------------------------------------------


def _star(g: GDD):
    if g.n != 4 or g.edge_count != 3:
        return None
    degs = [g.degree(i) for i in range(4)]
    if sorted(degs) != [1, 1, 1, 3]:
        return None
    c = degs.index(3)
    return c, [v for v in range(4) if v != c]


def _triangle_tail(g: GDD):
    if g.n != 4 or g.edge_count != 4:
        return None
    degs = [g.degree(i) for i in range(4)]
    if sorted(degs) != [1, 2, 2, 3]:
        return None
    a, b = degs.index(1), degs.index(3)
    c, d = [v for v in range(4) if degs[v] == 2]
    return a, b, c, d


# -- hypotheses --------------------------------------------------------------------------
# Each returns a description when the hypothesis holds, else None.


def _h220(g, o, cfg):
    if g.n != 4 or g.shape().kind is not ShapeKind.CHAIN:
        return None
    bad = [p.vertex for p in chain_places(g) if not p.holds]
    return f"simple chain conditions fail at {len(bad)} places" if len(bad) >= 2 else None


def _h256(g, o, cfg):
    s = _star(g)
    # all labels +-1 is the degenerate parameter q = -1, outside the hypothesis
    if all(c in (0, o.minus_one()) for row in g.qt for c in row) and all(d in (0, o.minus_one()) for d in g.diag):
        return None
    if s and all(g.diag[v] == o.minus_one() for v in s[1]):
        return "star whose three leaves are labelled -1"
    return None


def _h259(g, o, cfg):
    if not (_star(g) or _triangle_tail(g)):
        return None
    m1 = o.minus_one()
    for i, j in itertools.combinations(range(4), 2):
        if g.qt[i][j] == m1 and g.diag[i] == m1 and g.diag[j] == m1:
            return f"contains the edge ({i + 1},{j + 1}) with labels -1, -1, -1"
    return None


def _h260(g, o, cfg):
    t = _triangle_tail(g)
    if not t:
        return None
    a, b, c, d = t
    if g.diag[b] != o.minus_one():
        return None
    if o.mul(g.qt[a][b], g.qt[b][c]) and o.mul(g.qt[a][b], g.qt[b][d]):
        return "hub -1 with both tail products != 1"
    return None


def _h261(g, o, cfg):
    if not _star(g):
        return None
    codes = list(g.diag) + [c for row in g.qt for c in row if c]
    if any(o.order_of(c) not in (2, 3) for c in codes):
        return "star with a label outside R_2 and R_3"
    return None


def _h277(g, o, cfg):
    if g.n != 4:
        return None
    shape = g.shape()
    if shape.kind is not ShapeKind.CHAIN:
        return None
    if all(p.holds for p in chain_places(g, shape.walk)):
        return None
    for end in (shape.walk[0], shape.walk[-1]):
        h = g.delete_vertex(end)
        if all(p.holds for p in chain_places(h)):
            return f"semi-classical shape with root {end + 1}"
    return None


def _h278(g, o, cfg):
    if g.n != 4:
        return None
    shape = g.shape()
    if shape.kind is not ShapeKind.CHAIN:
        return None
    checks = chain_places(g, shape.walk)
    if sum(not p.holds for p in checks) != 1:
        return None
    m1 = o.minus_one()
    for walk in (shape.walk, shape.walk[::-1]):
        v2, v3 = walk[1], walk[2]
        q22, q33, e = g.diag[v2], g.diag[v3], g.qt[v2][v3]
        a = q22 != m1
        b = o.mul(e, q22) != 0
        c = q33 != m1
        d = o.mul(e, q33) != 0
        ok = (a and b) or (c and d) if cfg.l278_reading == "grouped" else (a and (b or c) and d)
        if ok:
            return "one failing place and the two-vertex clause holds"
    return None


def _h279(g, o, cfg):
    if g.n != 4 or not g.connected():
        return None
    shape = g.shape()
    ends = None
    if shape.kind is ShapeKind.CHAIN:
        ends = {shape.walk[0], shape.walk[-1]}
    m1 = o.minus_one()
    for i in range(4):
        if g.diag[i] == m1 or (ends is not None and i not in ends):
            continue
        for j in g.neighbors(i):
            if o.mul(g.diag[i], g.qt[i][j]):
                return f"vertex {i + 1} with q_ii qt_ij != 1 towards {j + 1}"
    return None


def _h280(g, o, cfg):
    m1 = o.minus_one()
    t = _triangle_tail(g)
    if t:
        _, _, c, d = t
        if g.diag[c] == g.diag[d] != m1:
            return "triangle vertices with equal labels != -1"
        return None
    s = _star(g)
    if s:
        for x, y in itertools.combinations(s[1], 2):
            if g.diag[x] == g.diag[y] != m1:
                return "two leaves with equal labels != -1"
    return None


def _h281(g, o, cfg):
    t = _triangle_tail(g)
    if t and all(d == o.minus_one() for d in g.diag) and o.n != 4:
        return "triangle with tail, all labels -1, q not in R_4"
    return None


def _h282(g, o, cfg):
    m1 = o.minus_one()
    t = _triangle_tail(g)
    if t:
        a, b, c, d = t
        if g.diag[b] == m1 and (o.mul(g.qt[a][b], g.qt[b][c]) or o.mul(g.qt[a][b], g.qt[b][d])):
            return "hub -1 with a tail product != 1"
        return None
    s = _star(g)
    if s:
        ctr, leaves = s
        if g.diag[ctr] != m1:
            return None
        for x in leaves:
            y, z = [v for v in leaves if v != x]
            if g.diag[y] == m1 and g.diag[z] == m1:
                if o.mul(g.qt[x][ctr], g.qt[y][ctr]) or o.mul(g.qt[x][ctr], g.qt[z][ctr]):
                    return "star with -1 centre and two -1 leaves"
    return None


def _h290(g, o, cfg):
    if g.n < 5 or not g.connected() or g.shape().kind is ShapeKind.CHAIN:
        return None
    for v in range(g.n):
        h = g.delete_vertex(v)
        s = h.shape()
        if s.kind is ShapeKind.CHAIN and all(p.holds for p in chain_places(h, s.walk)):
            return None
    return "no vertex deletion is a connected simple chain"


# lemma -> (hypothesis, exception tag prefix or None, classical GDDs exempt)
_BANK = {
    "L2.20": (_h220, "2.20", False),
    "L2.56": (_h256, None, False),
    "L2.59": (_h259, "2.59", True),
    "L2.60": (_h260, None, False),
    "L2.61": (_h261, None, True),
    "L2.77": (_h277, "2.77", True),
    "L2.78": (_h278, "2.78", False),
    "L2.79": (_h279, "2.79", True),
    "L2.80": (_h280, None, True),
    "L2.81": (_h281, None, True),
    "L2.82": (_h282, "2.82", True),
    "L2.90": (_h290, None, False),
}


def filter_bank(g: GDD, config: FilterConfig = DEFAULT_CONFIG) -> list[FilterVerdict]:
    """Run every enabled filter on ``g``."""
    out = []
    o = g.order
    classical = None
    for lemma in LEMMAS:
        if lemma not in config.enabled:
            continue
        hyp, prefix, exempt = _BANK[lemma]
        why = hyp(g, o, config)
        if why is None:
            out.append(FilterVerdict(lemma, FilterOutcome.NOT_APPLICABLE))
            continue
        if prefix:
            tags = lemma_tags(g, prefix)
            if tags:
                out.append(FilterVerdict(lemma, FilterOutcome.EXCEPTION, ", ".join(tags), why))
                continue
        # an exception listed under another lemma is still a known arithmetic GDD
        tags = lemma_tags(g)
        if tags:
            out.append(FilterVerdict(lemma, FilterOutcome.EXCEPTION, ", ".join(tags), why))
            continue
        if exempt:
            if classical is None:
                classical = is_classical(g)
            if classical:
                out.append(FilterVerdict(lemma, FilterOutcome.EXCEPTION, "classical", why))
                continue
        out.append(FilterVerdict(lemma, FilterOutcome.REJECTS, None, why))
    return out


def first_rejection(g: GDD, config: FilterConfig = DEFAULT_CONFIG) -> FilterVerdict | None:
    for v in filter_bank(g, config):
        if v.outcome is FilterOutcome.REJECTS:
            return v
    return None
