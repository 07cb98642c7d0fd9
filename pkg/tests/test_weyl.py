import itertools

import pytest
from hypothesis import assume, given, settings, strategies as st

from gddkit.chains import make_simple_chain
from gddkit.gdd import new_gdd
from gddkit.labels import GENERIC, Label, ParamOrder
from gddkit.selfcheck import gdd_from_gcm
from gddkit.weyl import (
    Caps,
    Outcome,
    ReflectionUndefined,
    Undefined,
    arithmetic_verdict,
    cartan_row,
    reflect,
)

from helpers import chain, mk


def test_cartan_entries():
    for n in (3, 4, 7, None):
        assert cartan_row(mk(n, ["-1", "q^2"], {(1, 2): "q"}), 0) == [2, -1]
    assert cartan_row(mk(None, ["q", "q"], {(1, 2): "q^-1"}), 0) == [2, -1]
    assert cartan_row(mk(4, ["q", "q"], {(1, 2): "q^-2"}), 0) == [2, -2]
    assert cartan_row(mk(None, ["q", "q"], {(1, 2): "q^-3"}), 0) == [2, -3]
    assert isinstance(cartan_row(mk(None, ["q", "q"], {(1, 2): "q"}), 0), Undefined)
    assert isinstance(cartan_row(mk(None, ["1", "q"], {(1, 2): "q"}), 0), Undefined)


def test_cartan_entry_beyond_cap_is_unproven():
    u = cartan_row(mk(None, ["q", "q"], {(1, 2): "q^-9"}), 0, m_cap=4)
    assert isinstance(u, Undefined) and not u.proven


def test_reflection_examples():
    g = mk(None, ["q", "q"], {(1, 2): "q^-1"})
    assert reflect(g, 0) == g
    h = mk(None, ["-1", "q"], {(1, 2): "q^-1"})
    assert reflect(h, 0) == mk(None, ["-1", "-1"], {(1, 2): "q"})
    one = mk(5, ["q"])
    assert reflect(one, 0) == one
    with pytest.raises(ReflectionUndefined):
        reflect(mk(None, ["q", "q"], {(1, 2): "q"}), 0)


def test_verdict_examples():
    # (20.3.1) at q in R_3
    g = chain(3, ["-1"] * 5, ["q^-1", "q", "q", "q^-1"])
    w = arithmetic_verdict(g)
    assert w.outcome in (Outcome.INFINITE, Outcome.CAP)
    assert all(arithmetic_verdict(g.delete_vertex(i)).finite for i in range(5))
    a4 = arithmetic_verdict(make_simple_chain(4, Label(1, 1, ParamOrder(5))))
    assert a4.finite and a4.root_count == 10
    aff = arithmetic_verdict(mk(None, ["q", "q"], {(1, 2): "q^-2"}))
    assert aff.certified_infinite
    aff2 = arithmetic_verdict(mk(None, ["q", "q"], {(1, 2): "q^-2"}), cartan_shortcut=False)
    assert aff2.certified_infinite


ROOT_COUNTS = [
    ([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], 6),
    ([[2, -1, 0], [-1, 2, -2], [0, -1, 2]], 9),
    ([[2, -1], [-3, 2]], 6),
    ([[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]], 12),
    ([[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]], 24),
]


@pytest.mark.parametrize("rows,count", ROOT_COUNTS)
def test_root_counts_of_finite_cartan_types(rows, count):
    for order in (GENERIC, ParamOrder(13)):
        w = arithmetic_verdict(gdd_from_gcm(rows, order), cartan_shortcut=False)
        assert w.finite and w.root_count == count


def test_super_type_root_count():
    # a rank-2 chain with two -1 vertices: roots a1, a2, a1 + a2
    w = arithmetic_verdict(mk(None, ["-1", "-1"], {(1, 2): "q"}))
    assert w.finite and w.root_count == 3


def test_disconnected_input_is_componentwise():
    g = mk(5, ["q", "q", "-1"], {(1, 2): "q^-1"})
    w = arithmetic_verdict(g)
    assert w.finite and w.root_count == 3 + 1


def test_caps_reported():
    g = chain(3, ["-1"] * 5, ["q^-1", "q", "q", "q^-1"])
    w = arithmetic_verdict(g, Caps(max_objects=2, max_roots=5, max_height=3))
    assert w.outcome in (Outcome.CAP, Outcome.INFINITE)
    with pytest.raises(ValueError):
        Caps(max_objects=0)


@st.composite
def reflectable(draw):
    o = draw(st.sampled_from([GENERIC, ParamOrder(3), ParamOrder(4), ParamOrder(5), ParamOrder(6), ParamOrder(8)]))
    n = draw(st.integers(2, 5))
    lab = st.builds(lambda s, e: Label(s, e, o), st.sampled_from([1, -1]), st.integers(-3, 3))
    diag = [draw(lab) for _ in range(n)]
    edges = {(i, j): draw(lab) for i, j in itertools.combinations(range(n), 2) if draw(st.booleans())}
    g = new_gdd(o, diag, edges)
    i = draw(st.integers(0, n - 1))
    assume(not isinstance(cartan_row(g, i), Undefined))
    return g, i


@settings(max_examples=500, deadline=None)
@given(reflectable())
def test_reflection_is_an_involution(gi):
    g, i = gi
    h = reflect(g, i)
    assert cartan_row(h, i) == cartan_row(g, i)
    assert reflect(h, i) == g
