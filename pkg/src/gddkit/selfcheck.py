"""Randomized cross-checks shared by ``gdd selftest`` and the test-suite.

* Cartan-type GDDs built from random symmetrizable GCMs, where the oracle
  must agree with the finite/affine/hyperbolic classification of the matrix.
* Random rank-4 GDDs run through the filter bank, where no rejected GDD may
  be arithmetic.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cartan import CartanMatrix, GcmKind, classify_gcm
from .gdd import GDD
from .labels import GENERIC, ParamOrder
from .weyl import DEFAULT_CAPS, Caps, arithmetic_verdict

__all__ = [
    "symmetrizer",
    "random_gcm",
    "gdd_from_gcm",
    "random_rank4",
    "CrossCheck",
    "prop_a51_crosscheck",
    "filter_soundness_sample",
]


def symmetrizer(rows) -> list[int] | None:
    """Positive integers ``d`` with ``d_i a_ij = d_j a_ji``, or None."""
    n = len(rows)
    d: list = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if i == j or rows[i][j] == 0:
                    continue
                v = d[i] * rows[i][j] / rows[j][i]
                if d[j] is None:
                    d[j] = v
                    stack.append(j)
                elif d[j] != v:
                    return None
    den = 1
    for x in d:
        den = den * x.denominator // _gcd(den, x.denominator)
    return [int(x * den) for x in d]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def random_gcm(rng: random.Random, n: int, min_entry: int = -3) -> list[list[int]]:
    """Random connected symmetrizable GCM with off-diagonal entries >= ``min_entry``."""
    while True:
        rows = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        for i, j in itertools.combinations(range(n), 2):
            if rng.random() < 0.6:
                rows[i][j] = rng.randint(min_entry, -1)
                rows[j][i] = rng.randint(min_entry, -1)
        if symmetrizer(rows) is None:
            continue
        if len(CartanMatrix(rows).components()) == 1:
            return rows


def gdd_from_gcm(rows, order: ParamOrder = GENERIC) -> GDD:
    """The Cartan-type GDD with ``q_ii = q^(2 d_i)`` and ``qt_ij = q^(2 d_i a_ij)``."""
    d = symmetrizer(rows)
    if d is None:
        raise ValueError("matrix is not symmetrizable")
    n = len(rows)
    diag = [order.code(1, 2 * d[i]) for i in range(n)]
    qt = [[0] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        if rows[i][j]:
            qt[i][j] = qt[j][i] = order.code(1, 2 * d[i] * rows[i][j])
    return GDD(order, diag, qt)


def random_rank4(rng: random.Random, order: ParamOrder, max_exp: int = 3) -> GDD:
    """Connected rank-4 GDD with labels ``±q^e``, ``|e| <= max_exp``."""
    labels = sorted({order.code(s, e) for s in (1, -1) for e in range(-max_exp, max_exp + 1)})
    edge_labels = [c for c in labels if c != 0]
    while True:
        diag = [rng.choice(labels) for _ in range(4)]
        qt = [[0] * 4 for _ in range(4)]
        for i, j in itertools.combinations(range(4), 2):
            if rng.random() < 0.5:
                qt[i][j] = qt[j][i] = rng.choice(edge_labels)
        g = GDD(order, diag, qt)
        if g.connected():
            return g


@dataclass
class CrossCheck:
    checked: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def prop_a51_crosscheck(samples: int = 500, seed: int = 0, max_n: int = 4,
                        caps: Caps = DEFAULT_CAPS) -> CrossCheck:
    """Oracle finiteness and quasi-affinity versus the GCM classification.

    The oracle runs without its Cartan-type shortcut so the two sides are
    computed independently.
    """
    rng = random.Random(seed)
    out = CrossCheck()
    for _ in range(samples):
        rows = random_gcm(rng, rng.randint(2, max_n))
        g = gdd_from_gcm(rows)
        kind = classify_gcm(CartanMatrix(rows)).kind
        w = arithmetic_verdict(g, caps, cartan_shortcut=False)
        fin = kind is GcmKind.FINITE
        qa_gcm = kind in (GcmKind.AFFINE, GcmKind.STRICTLY_HYPERBOLIC)
        qa = not w.finite and all(
            arithmetic_verdict(g.delete_vertex(i), caps, cartan_shortcut=False).finite for i in range(g.n))
        out.checked += 1
        if w.finite != fin or qa != qa_gcm or not (w.finite or w.certified_infinite):
            out.disagreements.append((rows, kind, w))
    return out


def filter_soundness_sample(order: ParamOrder, samples: int = 200, seed: int = 0,
                            caps: Caps = DEFAULT_CAPS) -> CrossCheck:
    """No random rank-4 GDD rejected by the filter bank may be arithmetic."""
    from .filters import first_rejection

    rng = random.Random(seed)
    out = CrossCheck()
    for _ in range(samples):
        g = random_rank4(rng, order)
        rej = first_rejection(g)
        out.checked += 1
        if rej is not None and arithmetic_verdict(g, caps).finite:
            out.disagreements.append((g, rej))
    return out
