"""Arithmetic-ness oracle based on Weyl groupoid reflections.

At an object ``X`` (a GDD) and vertex ``i`` the Cartan entries are

    c_ij = -min{ m >= 0 : (m+1)_{q_ii} = 0  or  q_ii^m * qt_ij = 1 }

and the reflection ``r_i`` transforms the labels by

    q'_jj  = q_jj * qt_ij^(-c_ij) * q_ii^(c_ij^2)
    qt'_ij = qt_ij^(-1) * q_ii^(2 c_ij)
    qt'_jk = qt_jk * qt_ij^(-c_ik) * qt_ik^(-c_ij) * q_ii^(2 c_ij c_ik)

The oracle explores morphisms into the base object, i.e. pairs (object,
integer matrix) where the matrix maps the object's simple roots to real roots
at the base.  The root system is finite exactly when this exploration closes.

Non-finiteness is certified in three ways:

* an undefined Cartan entry at a reachable object,
* the base object is of Cartan type with a non-finite Cartan matrix (can be
  switched off with ``cartan_shortcut=False``),
* an automorphism of the base object of infinite order (two morphisms from
  the same object differ by one).  An integer ``n x n`` matrix has finite
  order iff ``T^k = I`` for some ``k`` up to the largest finite order in
  ``GL(n, Z)``: 12 for ``n = 4, 5``, 30 for ``n = 6, 7``, 60 for ``n = 8``.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .cartan import CartanMatrix, GcmKind, cartan_type, classify_gcm
from .gdd import GDD

__all__ = [
    "Caps",
    "DEFAULT_CAPS",
    "Undefined",
    "ReflectionUndefined",
    "Outcome",
    "WeylVerdict",
    "cartan_row",
    "reflect",
    "arithmetic_verdict",
    "is_arithmetic",
]

log = logging.getLogger(__name__)

# max finite order of an element of GL(n, Z), indexed by n
_MAX_FINITE_ORDER = {1: 2, 2: 6, 3: 6, 4: 12, 5: 12, 6: 30, 7: 30, 8: 60}


@dataclass(frozen=True)
class Caps:
    max_objects: int = 20_000
    max_roots: int = 20_000
    max_height: int = 64
    m_cap: int = 64
    max_loop_checks: int = 4_000

    def doubled(self) -> "Caps":
        return Caps(*(2 * v for v in (self.max_objects, self.max_roots, self.max_height, self.m_cap, self.max_loop_checks)))

    def __post_init__(self):
        for name in ("max_objects", "max_roots", "max_height", "m_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"cap {name} must be positive")


DEFAULT_CAPS = Caps()


@dataclass(frozen=True)
class Undefined:
    """No admissible ``m`` for the pair (i, j).

    ``proven`` is False when a solution might exist beyond ``m_cap``.
    """

    j: int
    proven: bool = True


class ReflectionUndefined(ArithmeticError):
    def __init__(self, vertex: int, undefined: Undefined):
        super().__init__(f"reflection at vertex {vertex} undefined (neighbour {undefined.j})")
        self.vertex = vertex
        self.undefined = undefined


def _cartan_entry(order, qii: int, qtij: int, m_cap: int):
    if qtij == 0:
        return 0
    if order.n is not None:
        # q_ii of finite order d != 1 makes (d)_{q_ii} vanish, so m < d
        if qii == 0:
            return None
        d = order.order_of(qii)
        x = qtij
        for m in range(d):
            if x == 0:
                return -m
            x = (x + qii) % order.modulus
        return -(d - 1)
    s, e = qii & 1, qii >> 1
    t, f = qtij & 1, qtij >> 1
    if e == 0:
        if s == 0:
            return None  # q_ii = 1
        return -1  # q_ii = -1: (2)_{-1} = 0
    # q_ii of infinite order: only q_ii^m * qt = 1 can hold
    if f % e:
        return None
    m = -f // e
    if m < 0 or ((s & m) ^ t):
        return None
    if m > m_cap:
        return Undefined(-1, proven=False)
    return -m


def cartan_row(g: GDD, i: int, m_cap: int = DEFAULT_CAPS.m_cap) -> list[int] | Undefined:
    """Cartan row at vertex ``i`` or the first :class:`Undefined` entry."""
    row = []
    for j in range(g.n):
        if j == i:
            row.append(2)
            continue
        c = _cartan_entry(g.order, g.diag[i], g.qt[i][j], m_cap)
        if c is None:
            return Undefined(j, proven=True)
        if isinstance(c, Undefined):
            return Undefined(j, proven=False)
        row.append(c)
    return row


def _reflect_codes(order, n, diag, qt, i, c):
    mul, pw = order.mul, order.pow
    qii = diag[i]
    row_i = qt[i]
    new_diag = list(diag)
    new_qt = [list(r) for r in qt]
    for j in range(n):
        if j == i:
            continue
        cij = c[j]
        if cij == 0:
            continue
        new_diag[j] = mul(mul(diag[j], pw(row_i[j], -cij)), pw(qii, cij * cij))
        v = mul(order.inv(row_i[j]), pw(qii, 2 * cij))
        new_qt[i][j] = new_qt[j][i] = v
    for j in range(n):
        if j == i:
            continue
        cij = c[j]
        for k in range(j + 1, n):
            if k == i:
                continue
            cik = c[k]
            if cij == 0 and cik == 0:
                continue
            v = mul(
                mul(qt[j][k], pw(row_i[j], -cik)),
                mul(pw(row_i[k], -cij), pw(qii, 2 * cij * cik)),
            )
            new_qt[j][k] = new_qt[k][j] = v
    return tuple(new_diag), tuple(tuple(r) for r in new_qt)


def reflect(g: GDD, i: int, m_cap: int = DEFAULT_CAPS.m_cap) -> GDD:
    """Reflect ``g`` at vertex ``i``; raises :class:`ReflectionUndefined`."""
    c = cartan_row(g, i, m_cap)
    if isinstance(c, Undefined):
        raise ReflectionUndefined(i, c)
    diag, qt = _reflect_codes(g.order, g.n, g.diag, g.qt, i, c)
    return GDD(g.order, diag, qt)


class Outcome(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite-certified"
    CAP = "cap-exceeded"


@dataclass(frozen=True)
class WeylVerdict:
    outcome: Outcome
    root_count: int | None = None
    object_count: int | None = None
    reason: str = ""
    detail: tuple = ()
    caps: Caps = field(default=DEFAULT_CAPS, compare=False)
    positive_roots: tuple = field(default=(), compare=False, repr=False)

    @property
    def finite(self) -> bool:
        return self.outcome is Outcome.FINITE

    @property
    def certified_infinite(self) -> bool:
        return self.outcome is Outcome.INFINITE

    def __str__(self):
        if self.outcome is Outcome.FINITE:
            if self.object_count is None:
                return f"finite roots={self.root_count} ({self.reason or 'componentwise'})"
            return f"finite roots={self.root_count} objects={self.object_count}"
        return f"{self.outcome.value} ({self.reason})"


def _matmul(a, b, n):
    # column-major flat n*n tuples
    out = []
    for j in range(n):
        col = b[j * n:(j + 1) * n]
        for r in range(n):
            s = 0
            for k in range(n):
                x = col[k]
                if x:
                    s += a[k * n + r] * x
            out.append(s)
    return tuple(out)


def _has_finite_order(t, n, identity) -> bool:
    p = t
    for _ in range(_MAX_FINITE_ORDER.get(n, 60)):
        if p == identity:
            return True
        p = _matmul(p, t, n)
    return False


def _apply_reflection(mat, inv, c, i, n):
    """Return ``(M S_i, S_i M^-1)`` for column-major flat matrices."""
    cols = [mat[j * n:(j + 1) * n] for j in range(n)]
    ci = cols[i]
    new_cols = []
    for j in range(n):
        if j == i:
            new_cols.append(tuple(-x for x in ci))
        elif c[j]:
            cj = c[j]
            new_cols.append(tuple(a - cj * b for a, b in zip(cols[j], ci)))
        else:
            new_cols.append(cols[j])
    new_mat = tuple(x for col in new_cols for x in col)
    # S_i on rows: row_i <- -row_i - sum_{j != i} c_ij row_j
    inv_l = list(inv)
    for col in range(n):
        base = col * n
        s = -inv[base + i]
        for j in range(n):
            if j != i and c[j]:
                s -= c[j] * inv[base + j]
        inv_l[base + i] = s
    return new_mat, tuple(inv_l)


def _is_cartan_object(order, n, diag, qt, rows) -> bool:
    pw = order.pow
    for i in range(n):
        for j in range(n):
            if i != j and qt[i][j] != pw(diag[i], rows[i][j]):
                return False
    return True


def arithmetic_verdict(g: GDD, caps: Caps = DEFAULT_CAPS, cartan_shortcut: bool = True) -> WeylVerdict:
    """Decide whether the root system of ``g`` is finite.

    Disconnected input is judged componentwise.  With ``cartan_shortcut``
    off, a Cartan-type base is explored like any other object, so the
    verdict does not rely on the classification of its Cartan matrix.
    """
    comps = g.components()
    if len(comps) > 1:
        parts = [arithmetic_verdict(g.subgdd(c), caps, cartan_shortcut) for c in comps]
        for p in parts:
            if not p.finite:
                return p
        return WeylVerdict(
            Outcome.FINITE,
            sum(p.root_count for p in parts),
            None,
            reason="componentwise",
            caps=caps,
        )
    n = g.n
    order = g.order
    if n == 1:
        return WeylVerdict(Outcome.FINITE, 1, 1, caps=caps, positive_roots=((1,),))

    objects = {}  # (diag, qt) -> [rows, reflected keys, representative (M, M^-1)]
    identity = tuple(1 if r == c else 0 for c in range(n) for r in range(n))

    def visit(key):
        diag, qt = key
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if j == i:
                    row.append(2)
                    continue
                cij = _cartan_entry(order, diag[i], qt[i][j], caps.m_cap)
                if cij is None or isinstance(cij, Undefined):
                    return i, (j if cij is None else None)
                row.append(cij)
            rows.append(row)
        objects[key] = [rows, [None] * n, None]
        return None

    base = (g.diag, g.qt)
    bad = visit(base)
    if bad is not None:
        return _undefined_verdict(bad, 0, caps)
    rows0 = objects[base][0]
    if cartan_shortcut and _is_cartan_object(order, n, g.diag, g.qt, rows0):
        cls = classify_gcm(CartanMatrix(rows0))
        if cls.kind is not GcmKind.FINITE:
            return WeylVerdict(Outcome.INFINITE, reason=f"cartan-type {cls.kind.value}", detail=(rows0,), caps=caps)

    objects[base][2] = (identity, identity)
    states = {(base, identity)}
    roots = set(identity[j * n:(j + 1) * n] for j in range(n))
    queue = deque([(base, identity, identity)])
    loop_checks = 0
    seen_loops = set()

    while queue:
        key, mat, inv = queue.popleft()
        rows, nxt, _ = objects[key]
        for i in range(n):
            nkey = nxt[i]
            if nkey is None:
                nkey = _reflect_codes(order, n, key[0], key[1], i, rows[i])
                nxt[i] = nkey
                if nkey not in objects:
                    if len(objects) >= caps.max_objects:
                        return WeylVerdict(Outcome.CAP, reason="max_objects", object_count=len(objects), caps=caps)
                    bad = visit(nkey)
                    if bad is not None:
                        return _undefined_verdict(bad, len(objects), caps)
            nmat, ninv = _apply_reflection(mat, inv, rows[i], i, n)
            if (nkey, nmat) in states:
                continue
            states.add((nkey, nmat))
            entry = objects[nkey]
            if entry[2] is None:
                entry[2] = (nmat, ninv)
            elif loop_checks < caps.max_loop_checks:
                t = _matmul(nmat, entry[2][1], n)
                if t not in seen_loops:
                    seen_loops.add(t)
                    loop_checks += 1
                    if not _has_finite_order(t, n, identity):
                        return WeylVerdict(
                            Outcome.INFINITE,
                            reason="infinite-order automorphism",
                            detail=(t,),
                            object_count=len(objects),
                            caps=caps,
                        )
            for j in range(n):
                col = nmat[j * n:(j + 1) * n]
                if col not in roots:
                    if max(abs(x) for x in col) > caps.max_height:
                        return WeylVerdict(Outcome.CAP, reason="max_height", object_count=len(objects), caps=caps)
                    pos = all(x >= 0 for x in col)
                    if not pos and not all(x <= 0 for x in col):
                        raise AssertionError(f"mixed-sign root {col} reached from {g!r}")
                    roots.add(col)
            if len(roots) > 2 * caps.max_roots:
                return WeylVerdict(Outcome.CAP, reason="max_roots", object_count=len(objects), caps=caps)
            if len(states) > caps.max_objects * 8:
                return WeylVerdict(Outcome.CAP, reason="max_states", object_count=len(objects), caps=caps)
            queue.append((nkey, nmat, ninv))

    positive = tuple(sorted(r for r in roots if all(x >= 0 for x in r)))
    return WeylVerdict(
        Outcome.FINITE,
        len(positive),
        len(objects),
        caps=caps,
        positive_roots=positive,
    )


def _undefined_verdict(bad, count, caps):
    vertex, j = bad
    if j is None:
        return WeylVerdict(Outcome.CAP, reason=f"m_cap at vertex {vertex + 1}", object_count=count, caps=caps)
    return WeylVerdict(
        Outcome.INFINITE,
        reason=f"undefined reflection at vertex {vertex + 1}",
        detail=(vertex, j),
        object_count=count,
        caps=caps,
    )


def is_arithmetic(g: GDD, caps: Caps = DEFAULT_CAPS) -> bool:
    return arithmetic_verdict(g, caps).finite
