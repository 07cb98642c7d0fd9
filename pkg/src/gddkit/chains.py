"""Chain taxonomy: simple chains, classical types, semi- and quasi-classical.

Along a chain walk ``v_1 .. v_n`` the simple chain conditions are

* at an end ``v``:  ``(q_vv * qt - 1)(q_vv + 1) = 0`` with ``qt`` its edge,
* at an interior vertex either ``q_ii = -1`` with ``qt_left * qt_right = 1``
  (called ppe2 below) or ``q_ii * qt_left = q_ii * qt_right = 1`` (ppe3).

``C(n, q, marks)`` is the simple chain whose edge into vertex ``i`` equals
``q`` exactly when ``i`` is marked, where vertex 1 uses the virtual edge
``1 / (q_11^2 qt_12)``.  Vertex labels follow from the conditions: ppe3
when both incident edges agree, otherwise ``-1``.

The seven classical types glue a head onto the right end of such a chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .gdd import GDD, GDDError, ShapeKind
from .labels import GENERIC, Label, LabelError, ParamOrder

__all__ = [
    "ChainVerdict",
    "PlaceCheck",
    "ClassicalMatch",
    "ChainClass",
    "Head",
    "ContinueResult",
    "chain_places",
    "failing_places",
    "is_simple_chain",
    "make_simple_chain",
    "classical_template",
    "classify_classical",
    "is_classical",
    "is_semi_classical",
    "is_quasi_classical",
    "continue_on",
    "TYPE_CONDITIONS",
]


class ChainVerdict(str, Enum):
    SIMPLE_CHAIN = "simple-chain"
    NOT_SIMPLE = "not-simple"
    CLASSICAL = "classical"
    SEMI_CLASSICAL = "semi-classical"
    QUASI_CLASSICAL = "quasi-classical"
    NOT_CLASSIFIED = "not-classified"


@dataclass(frozen=True)
class PlaceCheck:
    """Outcome of the simple chain condition at one vertex (0-based)."""

    vertex: int
    condition: str  # "end", "ppe2" or "ppe3"; "none" when nothing holds
    holds: bool


@dataclass(frozen=True, order=True)
class ClassicalMatch:
    type: int
    q: Label
    marks: tuple[int, ...]

    def __str__(self):
        marks = ",".join(map(str, self.marks)) or "-"
        return f"Type {self.type} (q={self.q}, marks={marks})"


@dataclass(frozen=True)
class ChainClass:
    verdict: ChainVerdict
    witnesses: tuple = ()
    matches: tuple = ()
    root: int | None = None
    notes: tuple = ()

    def __bool__(self):
        return self.verdict not in (ChainVerdict.NOT_CLASSIFIED, ChainVerdict.NOT_SIMPLE)


# -- simple chain conditions -----------------------------------------------------


def _place(order: ParamOrder, g: GDD, walk: Sequence[int], k: int) -> PlaceCheck:
    v = walk[k]
    qvv = g.diag[v]
    m1 = order.minus_one()
    nbrs = [walk[k - 1]] if k > 0 else []
    if k + 1 < len(walk):
        nbrs.append(walk[k + 1])
    if len(nbrs) <= 1:
        if not nbrs or qvv == m1 or order.mul(qvv, g.qt[v][nbrs[0]]) == 0:
            return PlaceCheck(v, "end", True)
        return PlaceCheck(v, "end", False)
    a, b = g.qt[v][nbrs[0]], g.qt[v][nbrs[1]]
    if order.mul(qvv, a) == 0 and order.mul(qvv, b) == 0:
        return PlaceCheck(v, "ppe3", True)
    if qvv == m1 and order.mul(a, b) == 0:
        return PlaceCheck(v, "ppe2", True)
    return PlaceCheck(v, "none", False)


def chain_places(g: GDD, walk: Sequence[int] | None = None) -> list[PlaceCheck]:
    """Simple chain checks for every vertex along ``walk`` (default: the chain walk)."""
    if walk is None:
        shape = g.shape()
        if shape.kind is not ShapeKind.CHAIN:
            raise GDDError(f"not a chain: {shape}")
        walk = shape.walk
    return [_place(g.order, g, walk, k) for k in range(len(walk))]


def failing_places(g: GDD) -> list[int]:
    return [p.vertex for p in chain_places(g) if not p.holds]


def is_simple_chain(g: GDD) -> ChainClass:
    checks = tuple(chain_places(g))
    ok = all(p.holds for p in checks)
    return ChainClass(ChainVerdict.SIMPLE_CHAIN if ok else ChainVerdict.NOT_SIMPLE, checks)


def _simple(g: GDD) -> bool:
    shape = g.shape()
    return shape.kind is ShapeKind.CHAIN and all(p.holds for p in chain_places(g, shape.walk))


# -- constructors ----------------------------------------------------------------


def _chain_codes(order: ParamOrder, n: int, q: int, marks: Iterable[int]):
    """Vertex and edge codes of C(n, q, marks); edge k joins vertices k, k+1."""
    marks = set(marks)
    qi = order.inv(q)
    e = [q if i in marks else qi for i in range(1, n + 1)] + [qi]
    diag = [order.inv(e[k]) if e[k] == e[k + 1] else order.minus_one() for k in range(n)]
    return diag, e[1:n]


def make_simple_chain(n: int, q: Label, marks: Iterable[int] = ()) -> GDD:
    """Build ``C(n, q, marks)`` with 1-based marks."""
    marks = tuple(sorted(set(marks)))
    if n < 1:
        raise GDDError("rank must be at least 1")
    if any(not 1 <= m <= n for m in marks):
        raise GDDError(f"marks must lie in 1..{n}: {marks}")
    if q.is_one():
        raise LabelError("the chain parameter must differ from 1")
    if q.is_minus_one() and not marks:
        raise LabelError("the unmarked chain needs q != -1")
    diag, edges = _chain_codes(q.order, n, q.code, marks)
    qt = [[0] * n for _ in range(n)]
    for k, c in enumerate(edges):
        qt[k][k + 1] = qt[k + 1][k] = c
    return GDD(q.order, diag, qt)


def _order_is(k):
    return lambda q: q.multiplicative_order() == k


def _square_not_one(q):
    return not (q ** 2).is_one()


# Side conditions on q for each classical type.
TYPE_CONDITIONS: dict[int, Callable[[Label], bool]] = {
    1: _square_not_one,
    2: _square_not_one,
    3: _square_not_one,
    4: _order_is(3),
    5: lambda q: not q.is_one(),
    6: _square_not_one,
    7: lambda q: not q.is_one(),
}


def classical_template(t: int, n: int, q: Label, marks: Iterable[int] = ()) -> GDD | None:
    """The Type ``t`` GDD of rank ``n``, or None if the side conditions fail.

    Types 1-4 glue one head vertex to ``C(n-1, p, marks)``, types 5 and 6 two
    head vertices to ``C(n-2, q, marks)``; Type 7 is ``C(n, q^-1, marks)``.
    """
    marks = tuple(sorted(set(marks)))
    o = q.order
    if not TYPE_CONDITIONS[t](q):
        return None
    if t == 7:
        if any(not 1 <= m <= n for m in marks):
            return None
        p = q.inverse()
        if p.is_minus_one() and not marks:
            return None
        return make_simple_chain(n, p, marks)
    m = n - 1 if t <= 4 else n - 2
    if m < 1 or any(not 1 <= k <= m for k in marks):
        return None
    heads = {
        1: (q, q ** -2, q ** 2),
        2: (q ** 2, q ** -2, q),
        3: (q ** -2, q ** 2, -(q.inverse())),
        4: (-(q.inverse()), -q, q),
    }
    if t <= 4:
        p, edge, vertex = heads[t]
        if p.is_one() or edge.is_one():
            return None
        diag, edges = _chain_codes(o, m, p.code, marks)
        diag = diag + [vertex.code]
        edges = edges + [edge.code]
        qt = [[0] * n for _ in range(n)]
        for k, c in enumerate(edges):
            qt[k][k + 1] = qt[k + 1][k] = c
        return GDD(o, diag, qt)
    diag, edges = _chain_codes(o, m, q.code, marks)
    qt = [[0] * n for _ in range(n)]
    for k, c in enumerate(edges):
        qt[k][k + 1] = qt[k + 1][k] = c
    qi = q.inverse().code
    a, b = m, m + 1
    qt[m - 1][a] = qt[a][m - 1] = qi
    qt[m - 1][b] = qt[b][m - 1] = qi
    if t == 5:
        diag = diag + [q.code, q.code]
    else:
        diag = diag + [o.minus_one(), o.minus_one()]
        qt[a][b] = qt[b][a] = (q ** 2).code
    return GDD(o, diag, qt)


def _parameter_values(order: ParamOrder, max_exp: int):
    if order.n is not None:
        return [Label.from_code(order, c) for c in range(order.modulus)]
    return [Label(s, k, GENERIC) for k in range(-max_exp, max_exp + 1) for s in (1, -1)]


@lru_cache(maxsize=64)
def _classical_index(order: ParamOrder, n: int, max_exp: int) -> dict:
    index: dict = {}
    for t in range(1, 8):
        top = n if t == 7 else (n - 1 if t <= 4 else n - 2)
        if top < 1:
            continue
        for q in _parameter_values(order, max_exp):
            for r in range(top + 1):
                for marks in itertools.combinations(range(1, top + 1), r):
                    g = classical_template(t, n, q, marks)
                    if g is None:
                        continue
                    index.setdefault(g.canonical_form(), []).append(ClassicalMatch(t, q, marks))
    return index


def _max_exp(g: GDD) -> int:
    if g.order.n is not None:
        return 0
    codes = list(g.diag) + [c for row in g.qt for c in row if c]
    return max([abs(c >> 1) for c in codes] + [1])


def classify_classical(g: GDD) -> ChainClass:
    """Match ``g`` up to relabeling against the Type 1-7 templates."""
    if not g.connected():
        return ChainClass(ChainVerdict.NOT_CLASSIFIED, notes=("disconnected",))
    matches = _classical_index(g.order, g.n, _max_exp(g)).get(g.canonical_form())
    if not matches:
        return ChainClass(ChainVerdict.NOT_CLASSIFIED)
    types = {m.type for m in matches}
    notes = ()
    if 2 in types and 3 in types:
        notes = ("matches both Type 2 and Type 3",)
    return ChainClass(ChainVerdict.CLASSICAL, matches=tuple(sorted(matches)), notes=notes)


def is_classical(g: GDD) -> bool:
    return classify_classical(g).verdict is ChainVerdict.CLASSICAL


# -- semi- and quasi-classical -------------------------------------------------------


def _default_oracle(g: GDD) -> bool:
    from .weyl import is_arithmetic

    return is_arithmetic(g)


def _designated(g: GDD, good: Callable[[GDD], bool], arithmetic: Callable[[GDD], bool]) -> ChainClass:
    kind = ChainVerdict.SEMI_CLASSICAL if good is _simple else ChainVerdict.QUASI_CLASSICAL
    if not g.connected() or g.n < 2:
        return ChainClass(ChainVerdict.NOT_CLASSIFIED, notes=("needs a connected GDD of rank >= 2",))
    if is_classical(g):
        return ChainClass(ChainVerdict.NOT_CLASSIFIED, notes=("classical",))
    shape = g.shape()
    if shape.kind is ShapeKind.CHAIN:
        candidates = sorted({shape.walk[0], shape.walk[-1]})
        hits = [v for v in candidates if good(g.delete_vertex(v))]
    else:
        hits = [v for v in range(g.n) if (h := g.delete_vertex(v)).connected() and good(h)]
        if len(hits) < 2:
            hits = []
    if not hits:
        return ChainClass(ChainVerdict.NOT_CLASSIFIED, notes=("no designated deletion",))
    if not arithmetic(g):
        return ChainClass(ChainVerdict.NOT_CLASSIFIED, notes=("not arithmetic",))
    root = hits[0] if len(hits) == 1 or shape.kind is not ShapeKind.CHAIN else None
    notes = ()
    if shape.kind is ShapeKind.CHAIN and g.n == 4 and good is _simple:
        from .filters import lemma_tags

        listed = lemma_tags(g, "2.77")
        notes = (f"listed as {', '.join(listed)}",) if listed else ("not in the rank-4 list",)
    return ChainClass(kind, witnesses=tuple(hits), root=root, notes=notes)


def is_semi_classical(g: GDD, arithmetic: Callable[[GDD], bool] = _default_oracle) -> ChainClass:
    """Non-classical arithmetic GDD with a deletion that is a simple chain.

    For a chain the deleted end vertex is reported as ``root``; for a
    non-chain two distinct deletions must give connected simple chains.
    """
    return _designated(g, _simple, arithmetic)


def is_quasi_classical(g: GDD, arithmetic: Callable[[GDD], bool] = _default_oracle) -> ChainClass:
    """Like :func:`is_semi_classical` with "classical" in place of "simple chain"."""
    return _designated(g, is_classical, arithmetic)


# -- continuation -----------------------------------------------------------------


class Head(str, Enum):
    T5 = "T5"
    T6 = "T6"


@dataclass(frozen=True)
class ContinueResult:
    continues: bool
    extension: GDD
    verdict: object = field(default=None, compare=False)

    @property
    def quasi_affine_continue(self) -> bool:
        return not self.continues


def continue_on(g: GDD, v: int, head: Head | str, oracle: Callable[[GDD], object] | None = None) -> ContinueResult:
    """Attach a one-vertex T5/T6 head at vertex ``v`` (0-based) and test it.

    The new edge is chosen so that ``v`` keeps a simple chain condition:
    ``q_vv^-1`` when ``q_vv != -1``, else the inverse of ``v``'s single edge.
    The new vertex is labelled ``edge^-1`` for T5 and ``-1`` for T6.
    ``oracle`` returns a bool or an object with a ``finite`` attribute.
    """
    head = Head(head)
    if not 0 <= v < g.n:
        raise GDDError(f"vertex {v} out of range for rank {g.n}")
    o = g.order
    qvv = g.vertex_label(v)
    if qvv.is_one():
        raise GDDError("cannot attach a head at a vertex labelled 1")
    if qvv.is_minus_one():
        nb = g.neighbors(v)
        if len(nb) != 1:
            raise GDDError("a head at a -1 vertex needs that vertex to have exactly one edge")
        edge = g.edge_label(v, nb[0]).inverse()
    else:
        edge = qvv.inverse()
    new = edge.inverse() if head is Head.T5 else Label.minus_one(o)
    n = g.n
    qt = [list(row) + [0] for row in g.qt] + [[0] * (n + 1)]
    qt[v][n] = qt[n][v] = edge.code
    ext = GDD(o, list(g.diag) + [new.code], qt)
    if oracle is None:
        from .weyl import arithmetic_verdict

        oracle = arithmetic_verdict
    verdict = oracle(ext)
    ok = verdict if isinstance(verdict, bool) else verdict.finite
    return ContinueResult(bool(ok), ext, verdict)
