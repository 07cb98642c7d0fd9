import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from gddkit.chains import (
    ChainVerdict,
    Head,
    TYPE_CONDITIONS,
    classical_template,
    classify_classical,
    continue_on,
    failing_places,
    is_semi_classical,
    is_simple_chain,
    make_simple_chain,
)
from gddkit.engine import is_quasi_affine
from gddkit.gdd import GDDError
from gddkit.labels import GENERIC, Label, LabelError, ParamOrder
from gddkit.weyl import arithmetic_verdict

from helpers import chain, mk

Q = Label(1, 1, GENERIC)


def test_simple_chain_examples():
    assert is_simple_chain(make_simple_chain(2, Q)).verdict is ChainVerdict.SIMPLE_CHAIN
    assert make_simple_chain(2, Q) == chain(None, ["q", "q"], ["q^-1"])
    for n in (3, 4, 5, 7, None):
        assert is_simple_chain(chain(n, ["-1", "-1"], ["q"])).verdict is ChainVerdict.SIMPLE_CHAIN
    bad = chain(None, ["q", "q", "q"], ["q^-1", "q^-2"])
    assert is_simple_chain(bad).verdict is ChainVerdict.NOT_SIMPLE
    # middle fails ppe2 and ppe3, the right end fails its end condition
    assert failing_places(bad) == [1, 2]


def test_make_simple_chain_examples():
    assert make_simple_chain(3, Q) == chain(None, ["q", "q", "q"], ["q^-1", "q^-1"])
    assert make_simple_chain(3, Q, [1, 2, 3]) == chain(None, ["q^-1", "q^-1", "-1"], ["q", "q"])
    assert make_simple_chain(1, Q).n == 1
    assert make_simple_chain(1, Q, [1]).vertex_label(0).is_minus_one()
    with pytest.raises(GDDError):
        make_simple_chain(3, Q, [4])
    with pytest.raises(LabelError):
        make_simple_chain(3, Label(1, 0, GENERIC))


@st.composite
def chain_params(draw):
    o = draw(st.sampled_from([GENERIC, ParamOrder(3), ParamOrder(4), ParamOrder(5), ParamOrder(7), ParamOrder(12)]))
    q = Label(draw(st.sampled_from([1, -1])), draw(st.integers(-4, 4)), o)
    n = draw(st.integers(1, 6))
    marks = draw(st.sets(st.integers(1, n)))
    return n, q, marks


@settings(max_examples=300, deadline=None)
@given(chain_params())
def test_make_simple_chain_is_simple(p):
    n, q, marks = p
    if q.is_one() or (q.is_minus_one() and not marks):
        return
    g = make_simple_chain(n, q, marks)
    assert g.n == n and g.connected()
    assert is_simple_chain(g).verdict is ChainVerdict.SIMPLE_CHAIN


def test_classical_examples():
    c5 = classify_classical(make_simple_chain(5, Q))
    assert c5.verdict is ChainVerdict.CLASSICAL
    assert any(m.type == 7 for m in c5.matches)
    tri = mk(None, ["q", "-1", "-1"], {(1, 2): "q^-1", (1, 3): "q^-1", (2, 3): "q^2"})
    assert any(m.type == 6 for m in classify_classical(tri).matches)
    assert classify_classical(chain(None, ["q", "q^-1", "-1"], ["q^-1", "q^2"])).verdict is ChainVerdict.NOT_CLASSIFIED


def test_random_non_template_chains_are_not_classified():
    rng = random.Random(7)
    labs = ["q", "q^2", "-q", "q^-3", "-1", "q^3"]
    templates = [
        g.canonical_form()
        for t in range(1, 8) for s in (1, -1) for e in range(-6, 7)
        for r in range(5) for m in itertools.combinations(range(1, 5), r)
        if (g := classical_template(t, 4, Label(s, e, GENERIC), m)) is not None
    ]
    seen = 0
    for _ in range(200):
        g = chain(None, [rng.choice(labs) for _ in range(4)], [rng.choice(labs) for _ in range(3)])
        brute = g.canonical_form() in templates
        assert (classify_classical(g).verdict is ChainVerdict.CLASSICAL) == brute
        seen += brute
    assert seen < 200


def test_semi_classical_examples():
    c = is_semi_classical(chain(None, ["q", "q", "-1", "-q^-1"], ["q^-1", "q^-1", "-q"]))
    assert c.verdict is ChainVerdict.SEMI_CLASSICAL and c.root == 3
    a = is_semi_classical(chain(None, ["q^2", "q^2", "-1", "-1"], ["q^-2", "q^-2", "q"]))
    assert a.verdict is ChainVerdict.SEMI_CLASSICAL
    cl = is_semi_classical(make_simple_chain(4, Q))
    assert cl.verdict is ChainVerdict.NOT_CLASSIFIED and "classical" in cl.notes


def test_continue_on_quasi_affine():
    # dropping an end of (9.5.1) at q in R_5 and adding a T5 head back
    base = chain(5, ["q^2", "-1", "q^-3", "q^-3"], ["q^-2", "q^3", "q^3"])
    assert arithmetic_verdict(base).finite
    res = continue_on(base, 0, Head.T5)
    assert res.quasi_affine_continue
    full = chain(5, ["q^2", "q^2", "-1", "q^-3", "q^-3"], ["q^-2", "q^-2", "q^3", "q^3"])
    assert res.extension.isomorphic(full)
    v = is_quasi_affine(res.extension)
    assert v.is_quasi_affine and all(d.finite for d in v.deletions)


def test_continue_on_classical_continues():
    base = make_simple_chain(3, Label(1, 1, ParamOrder(7)))
    res = continue_on(base, 2, "T5")
    assert res.continues
    res6 = continue_on(base, 2, Head.T6)
    assert res6.extension.vertex_label(3).is_minus_one()
    with pytest.raises(GDDError):
        continue_on(base, 5, "T5")


@pytest.mark.parametrize("t", range(1, 8))
def test_templates_respect_side_conditions(t):
    for n in range(3, 6):
        for e in range(-3, 4):
            q = Label(1, e, ParamOrder(3))
            g = classical_template(t, n, q)
            assert (g is None) or TYPE_CONDITIONS[t](q)
