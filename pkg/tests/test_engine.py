import random

import pytest

from gddkit.catalog import CatalogEntry
from gddkit.constraints import parse_constraint
from gddkit.engine import (
    Universe,
    UniverseTooLarge,
    _extend,
    brute_force_rank2,
    enumerate_quasi_affine,
    is_quasi_affine,
    match_catalog,
)
from gddkit.filters import first_rejection
from gddkit.gdd import GDDError
from gddkit.labels import ParamOrder
from gddkit.weyl import arithmetic_verdict

from helpers import chain, mk

# (14.1.1) at q in R_3
QA_14_1_1 = chain(3, ["q", "q", "-1", "-q^-1", "-q^-1"], ["q^-1", "q^-1", "-q", "-q"])
CYCLE5 = mk(None, ["q"] * 5, {(1, 2): "q^-1", (2, 3): "q^-1", (3, 4): "q^-1", (4, 5): "q^-1", (5, 1): "q^-1"})


def test_quasi_affine_examples():
    v = is_quasi_affine(QA_14_1_1)
    assert v.is_quasi_affine and not v.whole.finite
    assert all(d.finite for d in v.deletions)
    assert is_quasi_affine(CYCLE5).is_quasi_affine
    # the standard A5 chain is arithmetic, hence not quasi-affine
    a5 = chain(7, ["q"] * 5, ["q^-1"] * 4)
    v = is_quasi_affine(a5)
    assert not v.is_quasi_affine and v.whole.finite


def test_quasi_affine_rejects_bad_input():
    with pytest.raises(GDDError):
        is_quasi_affine(mk(3, ["q"]))
    with pytest.raises(GDDError):
        is_quasi_affine(mk(3, ["q", "q", "q"], {(1, 2): "q^-1"}))


@pytest.mark.parametrize("n", [3, 4])
def test_rank2_matches_brute_force(n):
    u = Universe(ParamOrder(n), max_exp=2)
    brute = brute_force_rank2(u)
    assert brute
    for prune in (True, False):
        res = enumerate_quasi_affine(2, ParamOrder(n), u, prune=prune)
        assert set(res.results) == set(brute)


@pytest.mark.parametrize("n", [3, 4])
def test_rank3_prune_on_off_agree(n):
    u = Universe(ParamOrder(n), max_exp=2)
    on = enumerate_quasi_affine(3, ParamOrder(n), u, prune=True)
    off = enumerate_quasi_affine(3, ParamOrder(n), u, prune=False)
    assert set(on.results) == set(off.results) and on.results


def test_rank5_prune_on_off_agree_on_small_universe():
    u = Universe(ParamOrder(3), max_exp=1, allow_sign=False)
    on = enumerate_quasi_affine(5, ParamOrder(3), u, prune=True)
    off = enumerate_quasi_affine(5, ParamOrder(3), u, prune=False)
    assert on.pruned[4] > 0 and off.pruned[4] == 0
    assert set(on.results) == set(off.results) and on.results
    assert on.arithmetic_counts == off.arithmetic_counts


@pytest.mark.parametrize("n,max_exp,count", [(4, 2, 25), (5, 1, 25), (6, 1, 25)])
def test_pruning_never_drops_arithmetic_rank4_slices(n, max_exp, count):
    # random rank-3 arithmetic bases extended by one vertex: the filter bank
    # may only reject candidates that the oracle calls non-arithmetic
    o = ParamOrder(n)
    u = Universe(o, max_exp=max_exp)
    base = enumerate_quasi_affine(3, o, u)
    rng = random.Random(n)
    bases = rng.sample(base.arithmetic[3], min(count, len(base.arithmetic[3])))
    rejected = 0
    for b in bases:
        for g in _extend(b, u.codes(), u.edge_codes(), lambda *a: True, False):
            if first_rejection(g) is not None:
                rejected += 1
                assert not arithmetic_verdict(g).finite, g
    assert rejected > 0


def test_universe_guard():
    with pytest.raises(UniverseTooLarge) as exc:
        enumerate_quasi_affine(4, ParamOrder(5), Universe(ParamOrder(5), 6), max_work=1000)
    assert exc.value.rank >= 2 and exc.value.estimate > 1000
    with pytest.raises(ValueError):
        enumerate_quasi_affine(1, ParamOrder(3))
    with pytest.raises(ValueError):
        enumerate_quasi_affine(2, ParamOrder(3), Universe(ParamOrder(4)))


def test_results_are_quasi_affine_with_arithmetic_deletions():
    res = enumerate_quasi_affine(3, ParamOrder(4), Universe(ParamOrder(4), max_exp=2))
    for g, v in res.sorted_results():
        assert v.is_quasi_affine and g.connected() and g.n == 3
        assert all(arithmetic_verdict(g.delete_vertex(i)).finite for i in range(3))


def test_workers_do_not_change_the_output():
    u = Universe(ParamOrder(4), max_exp=2)
    one = enumerate_quasi_affine(3, ParamOrder(4), u, workers=1)
    two = enumerate_quasi_affine(3, ParamOrder(4), u, workers=2)
    assert [g for g, _ in one.sorted_results()] == [g for g, _ in two.sorted_results()]


def test_chain_mode_only_returns_chains():
    res = enumerate_quasi_affine(4, ParamOrder(4), Universe(ParamOrder(4), max_exp=2), shapes="chain")
    assert res.results
    assert all(g.shape().kind.name == "CHAIN" for g, _ in res.sorted_results())


def test_match_catalog_three_way():
    o = ParamOrder(3)
    entries = [
        CatalogEntry("14.1.1", chain(None, ["q", "q", "-1", "-q^-1", "-q^-1"], ["q^-1", "q^-1", "-q", "-q"]),
                     parse_constraint("q^2 != 1")),
        CatalogEntry("9.6.2", chain(None, ["q^2", "q", "-1", "q^-3", "q^-3"], ["q^-2", "q^-1", "q^3", "q^3"]),
                     parse_constraint("q in R_7")),
        CatalogEntry("missing", CYCLE5, parse_constraint("")),
    ]
    extra = mk(3, ["q", "q", "q"], {(1, 2): "q^-1", (2, 3): "q^-1", (3, 1): "q^-1"})
    rep = match_catalog([QA_14_1_1, extra], entries, o)
    assert [t for t, _ in rep.matched] == ["14.1.1"]
    assert [t for t, _ in rep.paper_only] == ["missing"]
    assert dict(rep.skipped) == {"9.6.2": "constraint excludes this order"}
    assert [g for g, _ in rep.result_only] == [extra]
    assert not rep.ok
    assert "1 matched, 1 catalog-only, 1 result-only, 1 skipped" in rep.summary()
