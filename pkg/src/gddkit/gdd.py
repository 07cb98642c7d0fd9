"""The GDD data model: vertex labels ``q_ii`` and symmetric edge labels.

Vertices are 0-based in the Python API; the text format and CLI use 1-based
indices.  An edge label equal to 1 means "no edge" and is never stored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .labels import Label, LabelError, ParamOrder

__all__ = [
    "GDD",
    "GDDError",
    "ShapeKind",
    "Shape",
    "new_gdd",
    "from_codes",
]

MAX_RANK = 8


class GDDError(ValueError):
    """Raised for malformed diagrams or out-of-range vertex indices."""


class ShapeKind(str, Enum):
    CHAIN = "chain"
    CYCLE = "cycle"
    BRANCHED_TREE = "branched-tree"
    OTHER = "other"


@dataclass(frozen=True)
class Shape:
    kind: ShapeKind
    walk: tuple[int, ...] | None = None

    def __str__(self):
        if self.walk is not None:
            return f"{self.kind.value} {'-'.join(str(v + 1) for v in self.walk)}"
        return self.kind.value


class GDD:
    """Immutable generalized Dynkin diagram.

    ``diag[i]`` is the code of ``q_ii`` and ``qt[i][j]`` the code of the edge
    label between ``i`` and ``j`` (code 0 means the label is 1, i.e. no edge).
    Codes are interpreted by :attr:`order`; see :mod:`gddkit.labels`.
    """

    __slots__ = ("order", "n", "diag", "qt", "_hash", "_canon")

    def __init__(self, order: ParamOrder, diag: Sequence[int], qt: Sequence[Sequence[int]]):
        n = len(diag)
        if n < 1:
            raise GDDError("a GDD needs at least one vertex")
        if n > MAX_RANK:
            raise GDDError(f"rank {n} exceeds the supported maximum {MAX_RANK}")
        if order.n is not None and order.n < 3:
            raise GDDError(f"parameter order must be >= 3 or generic, got {order.n}")
        self.order = order
        self.n = n
        self.diag = tuple(diag)
        self.qt = tuple(tuple(row) for row in qt)
        self._hash = None
        self._canon = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_labels(cls, diag: Sequence[Label], edges: Mapping[tuple[int, int], Label]) -> "GDD":
        if not diag:
            raise GDDError("a GDD needs at least one vertex")
        order = diag[0].order
        for lab in itertools.chain(diag, edges.values()):
            if lab.order != order:
                raise LabelError(f"label {lab!r} does not share order {order}")
        n = len(diag)
        qt = [[0] * n for _ in range(n)]
        for (i, j), lab in edges.items():
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise GDDError(f"bad edge ({i}, {j}) for rank {n}")
            if qt[i][j] and qt[i][j] != lab.code:
                raise GDDError(f"conflicting labels for edge ({i}, {j})")
            qt[i][j] = qt[j][i] = lab.code
        return cls(order, [d.code for d in diag], qt)

    # -- label access ----------------------------------------------------------

    def vertex_label(self, i: int) -> Label:
        return Label.from_code(self.order, self.diag[i])

    def edge_label(self, i: int, j: int) -> Label:
        return Label.from_code(self.order, self.qt[i][j])

    @property
    def vertex_labels(self) -> tuple[Label, ...]:
        return tuple(self.vertex_label(i) for i in range(self.n))

    def edges(self) -> dict[tuple[int, int], Label]:
        """Stored edges ``{(i, j): label}`` with ``i < j``."""
        return {
            (i, j): self.edge_label(i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if self.qt[i][j]
        }

    def neighbors(self, i: int) -> list[int]:
        row = self.qt[i]
        return [j for j in range(self.n) if j != i and row[j]]

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))

    @property
    def edge_count(self) -> int:
        return sum(1 for i in range(self.n) for j in range(i + 1, self.n) if self.qt[i][j])

    # -- structure -------------------------------------------------------------

    def subgdd(self, vertices: Iterable[int]) -> "GDD":
        vs = list(vertices)
        return GDD(self.order, [self.diag[v] for v in vs], [[self.qt[a][b] for b in vs] for a in vs])

    def delete_vertex(self, i: int) -> "GDD":
        if not 0 <= i < self.n:
            raise GDDError(f"vertex {i} out of range for rank {self.n}")
        if self.n == 1:
            raise GDDError("cannot delete the only vertex")
        return self.subgdd(v for v in range(self.n) if v != i)

    def permute(self, perm: Sequence[int]) -> "GDD":
        """Relabel so that new vertex ``k`` is old vertex ``perm[k]``."""
        if sorted(perm) != list(range(self.n)):
            raise GDDError(f"{perm!r} is not a permutation of range({self.n})")
        return self.subgdd(perm)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.neighbors(v):
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def connected(self) -> bool:
        return len(self.components()) == 1

    def shape(self) -> Shape:
        if not self.connected():
            return Shape(ShapeKind.OTHER)
        n, m = self.n, self.edge_count
        degs = [self.degree(i) for i in range(n)]
        if m == n - 1:
            if max(degs, default=0) <= 2:
                return Shape(ShapeKind.CHAIN, self._path_walk(degs))
            return Shape(ShapeKind.BRANCHED_TREE)
        if m == n and all(d == 2 for d in degs):
            return Shape(ShapeKind.CYCLE, self._cycle_walk())
        return Shape(ShapeKind.OTHER)

    def _path_walk(self, degs):
        if self.n == 1:
            return (0,)
        start = min(i for i in range(self.n) if degs[i] == 1)
        walk, prev = [start], None
        while len(walk) < self.n:
            nxt = [w for w in self.neighbors(walk[-1]) if w != prev]
            prev = walk[-1]
            walk.append(nxt[0])
        if walk[-1] < walk[0]:
            walk.reverse()
        return tuple(walk)

    def _cycle_walk(self):
        walk, prev = [0], None
        while len(walk) < self.n:
            nxt = sorted(w for w in self.neighbors(walk[-1]) if w != prev)
            prev = walk[-1]
            walk.append(nxt[0])
        return tuple(walk)

    def is_chain(self) -> bool:
        return self.shape().kind is ShapeKind.CHAIN

    # -- canonical form ----------------------------------------------------------

    def _serialize(self, perm: Sequence[int]) -> tuple[int, ...]:
        qt = self.qt
        out = [self.diag[p] for p in perm]
        n = self.n
        for a in range(n):
            row = qt[perm[a]]
            for b in range(a + 1, n):
                out.append(row[perm[b]])
        return tuple(out)

    def canonical(self) -> tuple[tuple, tuple[int, ...]]:
        """Return ``(key, perm)`` with ``self.permute(perm)`` attaining ``key``.

        Vertices are first sorted by an isomorphism-invariant signature; the
        lexicographic minimum is then taken over permutations inside each
        signature block only.  The key is therefore a complete invariant up
        to relabeling.
        """
        if self._canon is None:
            n, qt = self.n, self.qt
            sigs = [
                (self.diag[i], self.degree(i), tuple(sorted(qt[i][j] for j in range(n) if j != i)))
                for i in range(n)
            ]
            ordered = sorted(range(n), key=lambda i: sigs[i])
            blocks = [list(g) for _, g in itertools.groupby(ordered, key=lambda i: sigs[i])]
            best = None
            for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
                perm = [v for block in choice for v in block]
                ser = self._serialize(perm)
                if best is None or ser < best[0]:
                    best = (ser, tuple(perm))
            self._canon = ((n, self.order._sort_key(), tuple(sigs[i] for i in ordered), best[0]), best[1])
        return self._canon

    def canonical_form(self) -> tuple:
        return self.canonical()[0]

    def canonical_gdd(self) -> "GDD":
        return self.permute(self.canonical()[1])

    def isomorphic(self, other: "GDD") -> bool:
        return self.canonical_form() == other.canonical_form()

    # -- dunder --------------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, GDD):
            return NotImplemented
        return self.order == other.order and self.diag == other.diag and self.qt == other.qt

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.diag, self.qt))
        return self._hash

    def __repr__(self):
        verts = ", ".join(str(v) for v in self.vertex_labels)
        edges = ", ".join(f"({i + 1},{j + 1}): {lab}" for (i, j), lab in self.edges().items())
        return f"GDD(order={self.order}, vertices=[{verts}], edges={{{edges}}})"


def new_gdd(
    order: ParamOrder,
    diag: Sequence[Label],
    edges: Mapping[tuple[int, int], Label] | None = None,
) -> GDD:
    """Build a GDD, dropping edges whose label is 1."""
    if not diag:
        raise GDDError("a GDD needs at least one vertex")
    for lab in itertools.chain(diag, (edges or {}).values()):
        if lab.order != order:
            raise LabelError(f"label {lab!r} does not have order {order}")
    kept = {k: v for k, v in (edges or {}).items() if not v.is_one()}
    return GDD.from_labels(list(diag), kept)


def from_codes(order: ParamOrder, diag: Sequence[int], edges: Mapping[tuple[int, int], int]) -> GDD:
    n = len(diag)
    qt = [[0] * n for _ in range(n)]
    for (i, j), c in edges.items():
        qt[i][j] = qt[j][i] = c
    return GDD(order, diag, qt)
