"""Braiding exponential matrices and the finite/affine/indefinite trichotomy.

For a GDD of Cartan type every edge satisfies ``qt_ij = q_ii ** b`` for some
``b <= 0``; taking the largest such ``b`` gives an integer generalized Cartan
matrix.  Classification follows Kac: an indecomposable GCM is of finite type
iff all principal minors are positive, affine iff ``det = 0`` with all
proper principal minors positive, and indefinite otherwise.  "Strictly
hyperbolic" means indefinite with every proper connected subdiagram finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .gdd import GDD

__all__ = [
    "CartanMatrix",
    "GcmError",
    "GcmKind",
    "GcmClass",
    "Prop51",
    "bareiss_det",
    "cartan_type",
    "classify_gcm",
    "prop_a51",
]


class GcmError(ValueError):
    pass


class CartanMatrix:
    """An integer generalized Cartan matrix, validated on construction."""

    __slots__ = ("rows", "n")

    def __init__(self, rows: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise GcmError("matrix must be square")
        for i in range(n):
            if rows[i][i] != 2:
                raise GcmError(f"diagonal entry a_{i}{i} = {rows[i][i]} != 2")
            for j in range(n):
                if i == j:
                    continue
                if rows[i][j] > 0:
                    raise GcmError(f"off-diagonal entry a_{i}{j} = {rows[i][j]} > 0")
                if (rows[i][j] == 0) != (rows[j][i] == 0):
                    raise GcmError(f"a_{i}{j} = 0 but a_{j}{i} != 0")
        self.rows = rows
        self.n = n

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, CartanMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"CartanMatrix({[list(r) for r in self.rows]})"

    def principal(self, idx: Sequence[int]) -> "CartanMatrix":
        return CartanMatrix([[self.rows[a][b] for b in idx] for a in idx])

    def components(self) -> list[list[int]]:
        seen, comps = set(), []
        for s in range(self.n):
            if s in seen:
                continue
            stack, comp = [s], []
            seen.add(s)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in range(self.n):
                    if w not in seen and self.rows[v][w]:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def det(self) -> int:
        return bareiss_det(self.rows)


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class GcmKind(str, Enum):
    FINITE = "finite"
    AFFINE = "affine"
    STRICTLY_HYPERBOLIC = "strictly-hyperbolic"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class GcmClass:
    """Result of :func:`classify_gcm`.

    For a decomposable matrix ``kind`` is FINITE when every component is
    finite and INDEFINITE otherwise; the per-component verdicts are in
    ``components``.
    """

    kind: GcmKind
    det: int
    witness: tuple = ()
    components: tuple = field(default=())

    def __str__(self):
        return self.kind.value


def _connected_subsets(a: CartanMatrix, proper: bool = True):
    n = a.n
    for size in range(1, n if proper else n + 1):
        for idx in itertools.combinations(range(n), size):
            if len(a.principal(idx).components()) == 1:
                yield idx


def _classify_indecomposable(a: CartanMatrix) -> GcmClass:
    n = a.n
    minors = {}
    for size in range(1, n + 1):
        for idx in itertools.combinations(range(n), size):
            minors[idx] = bareiss_det([[a.rows[i][j] for j in idx] for i in idx])
    full = minors[tuple(range(n))]
    proper_pos = all(v > 0 for k, v in minors.items() if len(k) < n)
    if proper_pos and full > 0:
        return GcmClass(GcmKind.FINITE, full, tuple(sorted(minors.items())))
    if proper_pos and full == 0:
        return GcmClass(GcmKind.AFFINE, full, _null_vector(a))
    bad = [idx for idx in _connected_subsets(a) if _classify_indecomposable_cached(a, idx) is not GcmKind.FINITE]
    if not bad:
        return GcmClass(GcmKind.STRICTLY_HYPERBOLIC, full)
    return GcmClass(GcmKind.INDEFINITE, full, tuple(bad))


def _classify_indecomposable_cached(a: CartanMatrix, idx) -> GcmKind:
    sub = a.principal(idx)
    ok = all(
        bareiss_det([[sub.rows[i][j] for j in s] for i in s]) > 0
        for size in range(1, sub.n + 1)
        for s in itertools.combinations(range(sub.n), size)
    )
    return GcmKind.FINITE if ok else GcmKind.INDEFINITE


def _null_vector(a: CartanMatrix) -> tuple:
    """Positive integer vector in the kernel of an affine matrix."""
    from fractions import Fraction
    from math import lcm

    n = a.n
    m = [[Fraction(x) for x in r] for r in a.rows]
    # Solve with the last coordinate pinned to 1 on the first n-1 rows.
    sub = [row[: n - 1] + [-row[n - 1]] for row in m[: n - 1]]
    for c in range(n - 1):
        p = next(r for r in range(c, n - 1) if sub[r][c] != 0)
        sub[c], sub[p] = sub[p], sub[c]
        piv = sub[c][c]
        sub[c] = [x / piv for x in sub[c]]
        for r in range(n - 1):
            if r != c and sub[r][c] != 0:
                f = sub[r][c]
                sub[r] = [x - f * y for x, y in zip(sub[r], sub[c])]
    vec = [sub[r][n - 1] for r in range(n - 1)] + [Fraction(1)]
    den = lcm(*(v.denominator for v in vec))
    return tuple(int(v * den) for v in vec)


def classify_gcm(a: CartanMatrix) -> GcmClass:
    comps = a.components()
    if len(comps) == 1:
        return _classify_indecomposable(a)
    parts = tuple((tuple(c), _classify_indecomposable(a.principal(c))) for c in comps)
    kind = GcmKind.FINITE if all(p.kind is GcmKind.FINITE for _, p in parts) else GcmKind.INDEFINITE
    return GcmClass(kind, a.det(), components=parts)


def _max_exponent(order, qii: int, qt: int) -> int | None:
    """Largest ``b <= 0`` with ``qii ** b == qt`` (``qt != 1``), else None."""
    if order.n is not None:
        m = order.modulus
        for b in range(0, -m, -1):
            if order.pow(qii, b) == qt:
                return b
        return None
    s, e = qii & 1, qii >> 1
    t, f = qt & 1, qt >> 1
    if e == 0:
        # q_ii = +-1: only -1 raised to an odd power gives a non-trivial label
        return -1 if s and t and f == 0 else None
    if f % e:
        return None
    b = f // e
    if b > 0 or (s and (b & 1)) != t:
        return None
    return b


def cartan_type(g: GDD) -> CartanMatrix | None:
    """Braiding exponential matrix of ``g`` or None when not of Cartan type."""
    n = g.n
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 2
        for j in range(n):
            if i == j or g.qt[i][j] == 0:
                continue
            b = _max_exponent(g.order, g.diag[i], g.qt[i][j])
            if b is None:
                return None
            rows[i][j] = b
    return CartanMatrix(rows)


class Prop51(str, Enum):
    ARITHMETIC = "arithmetic"
    QUASI_AFFINE = "quasi-affine"
    NEITHER = "neither"
    NOT_CARTAN = "not-cartan-type"


def prop_a51(g: GDD) -> Prop51:
    """Decide arithmetic / quasi-affine for a connected GDD of Cartan type."""
    a = cartan_type(g)
    if a is None:
        return Prop51.NOT_CARTAN
    kind = classify_gcm(a).kind
    if kind is GcmKind.FINITE:
        return Prop51.ARITHMETIC
    if kind is GcmKind.AFFINE or (kind is GcmKind.STRICTLY_HYPERBOLIC and g.n <= 5):
        return Prop51.QUASI_AFFINE
    return Prop51.NEITHER
