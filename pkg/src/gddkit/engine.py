"""Quasi-affine decisions and exhaustive enumeration by rank.

A connected GDD is quasi-affine when it is not arithmetic but every
one-vertex deletion is (a disconnected deletion counts as arithmetic when
all its components are).

Enumeration works level by level.  ``A_k`` is the set of canonical forms of
connected arithmetic GDDs of rank ``k`` over the label universe.  Every
connected rank-``k+1`` GDD with all deletions arithmetic arises from some
member of ``A_k`` by adding a vertex (deleting a non-cut vertex of a
connected graph leaves it connected), so candidates are generated that way
and filtered by table lookups before the reflection oracle is consulted.
"""

from __future__ import annotations

import itertools
import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cartan import Prop51, cartan_type, prop_a51
from .gdd import GDD, GDDError, ShapeKind
from .labels import GENERIC, Label, ParamOrder
from .weyl import DEFAULT_CAPS, Caps, Outcome, WeylVerdict, arithmetic_verdict

__all__ = [
    "QaVerdict",
    "Universe",
    "UniverseTooLarge",
    "EnumerationResult",
    "is_quasi_affine",
    "enumerate_quasi_affine",
    "brute_force_rank2",
    "default_workers",
    "DiffReport",
    "match_catalog",
    "match_concrete",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QaVerdict:
    is_quasi_affine: bool
    whole: WeylVerdict
    deletions: tuple[WeylVerdict, ...]
    warnings: tuple[str, ...] = ()
    cartan: str | None = None

    @property
    def capped(self) -> bool:
        return any(w.outcome is Outcome.CAP for w in (self.whole, *self.deletions))

    def __str__(self):
        head = "quasi-affine" if self.is_quasi_affine else "not quasi-affine"
        return f"{head}; whole: {self.whole}"


def is_quasi_affine(g: GDD, caps: Caps = DEFAULT_CAPS) -> QaVerdict:
    """Run the oracle on ``g`` and on each of its vertex deletions."""
    if g.n < 2:
        raise GDDError("quasi-affinity needs rank >= 2")
    if not g.connected():
        raise GDDError("quasi-affinity is defined for connected GDDs")
    whole = arithmetic_verdict(g, caps)
    dels = tuple(arithmetic_verdict(g.delete_vertex(i), caps) for i in range(g.n))
    warnings = []
    for name, w in [("whole", whole)] + [(f"delete {i + 1}", d) for i, d in enumerate(dels)]:
        if w.outcome is Outcome.CAP:
            warnings.append(f"{name}: cap exceeded ({w.reason})")
    qa = not whole.finite and all(d.finite for d in dels)
    cartan = None
    if cartan_type(g) is not None:
        p = prop_a51(g)
        cartan = p.value
        if whole.outcome is not Outcome.CAP:
            # Cartan-type decision must agree with the oracle.
            assert (p is Prop51.ARITHMETIC) == whole.finite, (g, p, whole)
            if not any(d.outcome is Outcome.CAP for d in dels):
                assert (p is Prop51.QUASI_AFFINE) == qa or g.n > 5, (g, p, qa)
    return QaVerdict(qa, whole, dels, tuple(warnings), cartan)


# -- universe -------------------------------------------------------------------------


class UniverseTooLarge(RuntimeError):
    def __init__(self, estimate: int, limit: int, rank: int):
        super().__init__(
            f"enumeration at rank {rank} would examine about {estimate:,} candidates "
            f"(limit {limit:,}); narrow the universe or raise max_work"
        )
        self.estimate, self.limit, self.rank = estimate, limit, rank


@dataclass(frozen=True)
class Universe:
    """Labels ``±q^e`` with ``|e| <= max_exp`` (signs only if ``allow_sign``)."""

    order: ParamOrder
    max_exp: int = 6
    allow_sign: bool = True

    def codes(self) -> list[int]:
        o = self.order
        out = set()
        for e in range(-self.max_exp, self.max_exp + 1):
            out.add(o.code(1, e))
            if self.allow_sign:
                out.add(o.code(-1, e))
        return sorted(out)

    def edge_codes(self) -> list[int]:
        return [c for c in self.codes() if c != 0]


# -- enumeration ---------------------------------------------------------------------------


@dataclass
class EnumerationResult:
    rank: int
    universe: Universe
    shapes: str = "all"
    results: dict = field(default_factory=dict)  # canonical form -> (GDD, QaVerdict)
    arithmetic_counts: dict = field(default_factory=dict)
    candidates_examined: dict = field(default_factory=dict)
    pruned: dict = field(default_factory=dict)
    arithmetic: dict = field(default_factory=dict)  # rank -> canonical arithmetic GDDs
    warnings: list = field(default_factory=list)

    def sorted_results(self) -> list[tuple[GDD, QaVerdict]]:
        return [self.results[k] for k in sorted(self.results)]


def default_workers() -> int:
    env = os.environ.get("GDD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"GDD_THREADS must be an integer, got {env!r}") from None
    return 1


def _components_ok(h: GDD, tables: dict) -> bool:
    comps = h.components()
    if len(comps) == 1:
        return h.n == 1 or h.canonical_form() in tables[h.n]
    for c in comps:
        if len(c) > 1 and h.subgdd(c).canonical_form() not in tables[len(c)]:
            return False
    return True


def _extend(base: GDD, universe_codes, edge_codes, pair_ok, chains_only: bool):
    """Yield rank+1 GDDs obtained by attaching a new vertex to ``base``."""
    n = base.n
    o = base.order
    if chains_only:
        shape = base.shape()
        if n == 1:
            ends = [0]
        else:
            ends = sorted({shape.walk[0], shape.walk[-1]})
    for d in universe_codes:
        if chains_only:
            choices = []
            for u in ends:
                for e in edge_codes:
                    if pair_ok(base.diag[u], d, e):
                        row = [0] * n
                        row[u] = e
                        choices.append(row)
            rows = choices
        else:
            per = []
            for u in range(n):
                per.append([0] + [e for e in edge_codes if pair_ok(base.diag[u], d, e)])
            rows = (r for r in itertools.product(*per) if any(r))
        for row in rows:
            qt = [list(base.qt[i]) + [row[i]] for i in range(n)]
            qt.append(list(row) + [0])
            yield GDD(o, list(base.diag) + [d], qt)


def _level_job(args):
    bases, codes, ecodes, pairs, tables, chains_only, seen_forms = args
    out = {}
    if pairs is None:
        pair_ok = lambda a, b, e: True  # noqa: E731
    else:
        pair_ok = lambda a, b, e: (a, b, e) in pairs  # noqa: E731
    for base in bases:
        for g in _extend(base, codes, ecodes, pair_ok, chains_only):
            key = g.canonical_form()
            if key in out or key in seen_forms:
                continue
            ok = all(_components_ok(g.delete_vertex(i), tables) for i in range(g.n - 1))
            out[key] = g if ok else None
    return out


def enumerate_quasi_affine(
    rank: int,
    order: ParamOrder,
    universe: Universe | None = None,
    caps: Caps = DEFAULT_CAPS,
    prune: bool = True,
    shapes: str = "all",
    workers: int | None = None,
    max_work: int = 50_000_000,
    progress=None,
) -> EnumerationResult:
    """All connected quasi-affine GDDs of ``rank`` over the label universe.

    ``shapes="chain"`` restricts every level to chains.  With ``prune`` the
    filter bank skips oracle calls below the target rank; at the target rank
    every survivor still gets a full :class:`QaVerdict`.
    """
    if rank < 2:
        raise ValueError("rank must be at least 2")
    if shapes not in ("all", "chain"):
        raise ValueError(f"unknown shape restriction {shapes!r}")
    if universe is None:
        universe = Universe(order)
    if universe.order != order:
        raise ValueError("universe order differs from the requested order")
    workers = default_workers() if workers is None else max(1, workers)
    chains_only = shapes == "chain"
    codes = universe.codes()
    ecodes = universe.edge_codes()
    res = EnumerationResult(rank, universe, shapes)

    if prune:
        from .filters import first_rejection

    # rank 1: every single vertex is arithmetic
    level = [GDD(order, [d], [[0]]) for d in codes]
    tables: dict[int, set] = {1: {g.canonical_form() for g in level}}
    res.arithmetic_counts[1] = len(level)

    # arithmetic rank-2 pairs, used to pre-filter edges of new vertices
    pairs = set()
    for a in codes:
        for b in codes:
            for e in ecodes:
                if (b, a, e) in pairs:
                    pairs.add((a, b, e))
                    continue
                if arithmetic_verdict(GDD(order, [a, b], [[0, e], [e, 0]]), caps).finite:
                    pairs.add((a, b, e))

    for k in range(1, rank):
        target = k + 1 == rank
        if chains_only:
            est = len(level) * len(codes) * 2 * len(ecodes)
        else:
            est = len(level) * len(codes) * (len(ecodes) + 1) ** k
        if est > max_work:
            raise UniverseTooLarge(est, max_work, k + 1)
        frozen_tables = {r: frozenset(s) for r, s in tables.items()}
        jobs = _split(level, workers)
        # every edge of a rank >= 3 candidate lies in a proper subdiagram
        pair_arg = frozenset(pairs) if k >= 2 else None
        args = [(chunk, codes, ecodes, pair_arg, frozen_tables, chains_only, frozenset()) for chunk in jobs]
        if workers > 1 and len(jobs) > 1:
            import multiprocessing as mp

            with mp.get_context("fork").Pool(workers) as pool:
                parts = pool.map(_level_job, args)
        else:
            parts = [_level_job(a) for a in args]
        cands: dict = {}
        for p in parts:
            for key, g in p.items():
                if key not in cands or cands[key] is None:
                    cands[key] = g
        survivors = [cands[k2] for k2 in sorted(cands) if cands[k2] is not None]
        res.candidates_examined[k + 1] = len(cands)
        if progress:
            progress(f"rank {k + 1}: {len(cands)} candidates, {len(survivors)} with arithmetic deletions")
        next_level = []
        pruned = 0
        for g in survivors:
            if target:
                v = is_quasi_affine(g.canonical_gdd(), caps)
                if v.warnings:
                    res.warnings.extend(f"{g!r}: {w}" for w in v.warnings)
                if v.whole.finite:
                    next_level.append(g)
                elif v.is_quasi_affine or v.whole.outcome is Outcome.CAP:
                    res.results[g.canonical_form()] = (g.canonical_gdd(), v)
                continue
            if prune and k + 1 >= 4 and first_rejection(g) is not None:
                pruned += 1
                continue
            w = arithmetic_verdict(g, caps)
            if w.outcome is Outcome.CAP:
                res.warnings.append(f"{g!r}: cap exceeded at rank {k + 1} ({w.reason}); treated as non-arithmetic")
            if w.finite:
                next_level.append(g)
        res.pruned[k + 1] = pruned
        level = [g.canonical_gdd() for g in next_level]
        tables[k + 1] = {g.canonical_form() for g in level}
        res.arithmetic_counts[k + 1] = len(level)
        res.arithmetic[k + 1] = level
    return res


def _split(items: Sequence, parts: int) -> list[list]:
    if parts <= 1 or len(items) < 2:
        return [list(items)]
    size = max(1, (len(items) + parts * 4 - 1) // (parts * 4))
    return [list(items[i:i + size]) for i in range(0, len(items), size)]


def brute_force_rank2(universe: Universe, caps: Caps = DEFAULT_CAPS) -> dict:
    """Quasi-affine rank-2 GDDs straight from the definition, no pruning."""
    o = universe.order
    out = {}
    for a, b in itertools.product(universe.codes(), repeat=2):
        for e in universe.edge_codes():
            g = GDD(o, [a, b], [[0, e], [e, 0]])
            w = arithmetic_verdict(g, caps)
            dels_ok = all(arithmetic_verdict(g.delete_vertex(i), caps).finite for i in range(2))
            if not w.finite and dels_ok:
                out[g.canonical_form()] = g.canonical_gdd()
    return out


# -- catalog matching ------------------------------------------------------------------


@dataclass
class DiffReport:
    """Three-way comparison of enumeration output against a catalog.

    ``result_only`` items carry a verdict recomputed at doubled caps.
    """

    order: ParamOrder
    matched: list = field(default_factory=list)  # (tag, GDD)
    paper_only: list = field(default_factory=list)  # (tag, GDD)
    result_only: list = field(default_factory=list)  # (GDD, QaVerdict)
    skipped: list = field(default_factory=list)  # (tag, reason)

    @property
    def ok(self) -> bool:
        return not self.paper_only

    def summary(self) -> str:
        return (f"order {self.order}: {len(self.matched)} matched, {len(self.paper_only)} catalog-only, "
                f"{len(self.result_only)} result-only, {len(self.skipped)} skipped")


def _catalog_instances(entry, order: ParamOrder, universe: Universe | None):
    """Instances of ``entry`` at every admissible ``q`` of exactly this order."""
    out = {}
    if order.is_generic:
        vals = [Label(1, 1, order)]
    else:
        vals = [q for q in entry.constraint.values(order) if q.multiplicative_order() == order.n]
    allowed = set(universe.codes()) if universe is not None else None
    for q in vals:
        g = entry.instantiate(q)
        if g is None:
            continue
        if allowed is not None:
            codes = list(g.diag) + [c for row in g.qt for c in row if c]
            if any(c not in allowed for c in codes):
                continue
        out[g.canonical_form()] = g
    return out


def match_catalog(results, catalog, order: ParamOrder, universe: Universe | None = None,
                  caps: Caps = DEFAULT_CAPS, shapes: str | None = None) -> DiffReport:
    """Compare enumeration output with catalog entries instantiated at ``order``.

    ``results`` is an :class:`EnumerationResult` or an iterable of GDDs.  An
    entry is skipped when its constraint excludes ``order``, when it
    degenerates there (a ``q^e`` label becomes ``±1``), or when no admissible
    instance fits the universe.  It counts as matched if any admissible
    instance appears among the results.  With ``shapes="chain"`` non-chain
    entries are skipped.
    """
    if isinstance(results, EnumerationResult):
        found = {k: g for k, (g, _) in results.results.items()}
        if universe is None:
            universe = results.universe
        if shapes is None:
            shapes = results.shapes
    else:
        found = {g.canonical_form(): g for g in results}
    rep = DiffReport(order)
    claimed = set()
    for entry in catalog:
        if shapes == "chain" and entry.pattern.shape().kind is not ShapeKind.CHAIN:
            rep.skipped.append((entry.tag, "not a chain"))
            continue
        if order.is_generic and not entry.constraint.holds(Label(1, 1, order)):
            rep.skipped.append((entry.tag, "constraint excludes this order"))
            continue
        if not order.is_generic and not entry.admissible_at(order):
            why = "constraint excludes this order" if not entry.constraint.admits(order) else "labels degenerate at this order"
            rep.skipped.append((entry.tag, why))
            continue
        inst = _catalog_instances(entry, order, universe)
        if not inst:
            rep.skipped.append((entry.tag, "outside the label universe"))
            continue
        hit = [k for k in inst if k in found]
        claimed.update(hit)
        if hit:
            rep.matched.append((entry.tag, found[hit[0]]))
        else:
            rep.paper_only.append((entry.tag, entry.instantiate(Label(1, 1, order)) or next(iter(inst.values()))))
    big = caps.doubled()
    for k in sorted(found):
        if k not in claimed:
            g = found[k]
            rep.result_only.append((g, is_quasi_affine(g, big)))
    return rep


def match_concrete(results, catalog, caps: Caps = DEFAULT_CAPS, shapes: str | None = None) -> DiffReport:
    """Compare enumeration output with a catalog of fixed-order GDDs.

    ``catalog`` holds ``(tag, GDD)`` pairs; entries whose order differs from
    the results are skipped, as are non-chains when ``shapes="chain"``.
    """
    if isinstance(results, EnumerationResult):
        found = {k: g for k, (g, _) in results.results.items()}
        order = results.universe.order
        if shapes is None:
            shapes = results.shapes
    else:
        results = list(results)
        found = {g.canonical_form(): g for g in results}
        order = results[0].order if results else None
    if order is None:
        order = catalog[0][1].order if catalog else GENERIC
    rep = DiffReport(order)
    claimed = set()
    for tag, g in catalog:
        if g.order != order:
            rep.skipped.append((tag, f"order {g.order} differs from {order}"))
            continue
        if shapes == "chain" and g.shape().kind is not ShapeKind.CHAIN:
            rep.skipped.append((tag, "not a chain"))
            continue
        k = g.canonical_form()
        if k in found:
            claimed.add(k)
            rep.matched.append((tag, found[k]))
        else:
            rep.paper_only.append((tag, g))
    big = caps.doubled()
    for k in sorted(found):
        if k not in claimed:
            rep.result_only.append((found[k], is_quasi_affine(found[k], big)))
    return rep
