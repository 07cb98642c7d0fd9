import itertools
import random

import pytest

from gddkit.catalog import bundled
from gddkit.filters import LEMMAS, FilterConfig, FilterOutcome, filter_bank, first_rejection, lemma_tags
from gddkit.labels import ParamOrder
from gddkit.selfcheck import filter_soundness_sample, random_rank4
from gddkit.weyl import arithmetic_verdict

from helpers import chain, mk


def verdict(g, lemma):
    return next(v for v in filter_bank(g) if v.lemma == lemma)


def test_exception_2_20_b():
    # q -- -1 -- -1 -- -q^-1
    g = chain(5, ["q", "-1", "-1", "-q^-1"], ["q^-1", "-1", "-q"])
    v = verdict(g, "L2.20")
    assert v.outcome is FilterOutcome.EXCEPTION and "2.20(b)" in v.exception
    assert first_rejection(g) is None
    assert arithmetic_verdict(g).finite


def test_chain_failing_twice_is_rejected():
    g = chain(5, ["q", "q", "q^2", "q"], ["q^-2", "q^-1", "q^-1"])
    v = first_rejection(g)
    assert v is not None and v.lemma == "L2.20"
    assert not arithmetic_verdict(g).finite


def test_star_with_minus_one_leaves_is_rejected():
    g = mk(5, ["q", "-1", "-1", "-1"], {(1, 2): "q^-1", (1, 3): "q^-1", (1, 4): "q^2"})
    assert verdict(g, "L2.56").outcome is FilterOutcome.REJECTS
    assert not arithmetic_verdict(g).finite


def test_all_minus_one_star_is_outside_l256():
    g = mk(3, ["-1"] * 4, {(1, 2): "-1", (1, 3): "-1", (1, 4): "-1"})
    assert verdict(g, "L2.56").outcome is FilterOutcome.NOT_APPLICABLE


def test_config():
    with pytest.raises(ValueError):
        FilterConfig(l278_reading="other")
    g = chain(5, ["q", "q", "q^2", "q"], ["q^-2", "q^-1", "q^-1"])
    only = FilterConfig(enabled=frozenset({"L2.56"}))
    assert [v.lemma for v in filter_bank(g, only)] == ["L2.56"]
    assert first_rejection(g, only) is None


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_every_exception_is_arithmetic(n):
    o = ParamOrder(n)
    checked = 0
    for entry in bundled("lemma_exceptions"):
        for q in entry.constraint.values(o):
            if q.multiplicative_order() != n:
                continue
            g = entry.instantiate(q)
            if g is None:
                continue
            assert arithmetic_verdict(g).finite, (entry.tag, q)
            assert entry.tag in lemma_tags(g)
            checked += 1
    assert checked > 0


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_random_rejections_are_sound(n):
    r = filter_soundness_sample(ParamOrder(n), samples=150, seed=n)
    assert r.ok, r.disagreements


def test_rejections_happen():
    rng = random.Random(0)
    o = ParamOrder(5)
    hits = {v.lemma for _ in range(400) if (v := first_rejection(random_rank4(rng, o))) is not None}
    assert len(hits) >= 3 and hits <= set(LEMMAS)
