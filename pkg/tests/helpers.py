"""Small constructors shared by the tests."""

from gddkit.fileformat import load_gdd_file
from gddkit.gdd import new_gdd
from gddkit.labels import GENERIC, ParamOrder, parse_label
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


def order_of(n):
    return GENERIC if n is None else ParamOrder(n)


def mk(n, verts, edges=None):
    """GDD from label strings; ``edges`` uses 1-based vertex pairs."""
    o = order_of(n)
    diag = [parse_label(v, o) for v in verts]
    es = {(i - 1, j - 1): parse_label(t, o) for (i, j), t in (edges or {}).items()}
    return new_gdd(o, diag, es)


def chain(n, verts, edge_labels):
    return mk(n, verts, {(k, k + 1): t for k, t in enumerate(edge_labels, 1)})


def fixture(name):
    return load_gdd_file(FIXTURES / name)
