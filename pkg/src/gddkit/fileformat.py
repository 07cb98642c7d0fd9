"""Reader and writer for the ``.gdd`` text format.

One entry looks like::

    # optional comment lines, attached to the next entry
    gdd "20.3.1" {
      order = 3;
      vertices = [-1, -1, -1, -1, -1];
      edges = { (1,2): q^-1, (2,3): q, (3,4): q, (4,5): q^-1 };
      constraint = "";
    }

Vertex indices are 1-based.  ``order`` and ``vertices`` are required,
``edges`` and ``constraint`` are optional, any other key is an error.
Comment lines at the top of a file that are followed by a blank line form
the file header rather than belonging to the first entry.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .gdd import GDD, GDDError
from .labels import Label, LabelError, parse_label, parse_order

__all__ = [
    "Entry",
    "GddFile",
    "GddSyntaxError",
    "parse_gdd_file",
    "print_gdd_file",
    "format_entry",
    "load_gdd_file",
]


class GddSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


@dataclass
class Entry:
    gdd: GDD
    tag: str
    constraint: str | None = None
    comments: tuple[str, ...] = ()
    line: int = field(default=0, compare=False)


class GddFile(list):
    """List of entries that also remembers the file header comments."""

    def __init__(self, entries=(), header=()):
        super().__init__(entries)
        self.header = tuple(header)


_WS = re.compile(r"(?:\s+|#[^\n]*)*")
_LABEL = re.compile(r"-?\s*(?:1|q(?:\s*\^\s*[+-]?\d+)?)")
_INT = re.compile(r"\d+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ORDER = re.compile(r"generic|-?\d+")
_STRING = re.compile(r'"((?:[^"\\\n]|\\.)*)"')


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.pending_comments: list[str] = []
        self.header: list[str] = []
        self.seen_entry = False

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, msg, pos=None):
        return GddSyntaxError(msg, *self.where(pos))

    def skip(self, collect=False):
        m = _WS.match(self.text, self.pos)
        if collect:
            parts = m.group(0).split("\n")
            for k, ln in enumerate(parts):
                ln = ln.strip()
                if ln.startswith("#"):
                    self.pending_comments.append(ln[1:].strip())
                elif not ln and 0 < k < len(parts) - 1 and self.pending_comments and not self.seen_entry:
                    self.header += self.pending_comments
                    self.pending_comments = []
        self.pos = m.end()

    def at_end(self):
        self.skip(collect=True)
        return self.pos >= len(self.text)

    def expect(self, lit):
        self.skip()
        if not self.text.startswith(lit, self.pos):
            found = self.text[self.pos:self.pos + 12].split("\n")[0] or "end of input"
            raise self.error(f"expected {lit!r}, found {found!r}")
        self.pos += len(lit)

    def peek(self, lit):
        self.skip()
        return self.text.startswith(lit, self.pos)

    def match(self, rx, what):
        self.skip()
        m = rx.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m


def _unescape(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s)


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _parse_entry(r: _Reader) -> Entry:
    start = r.pos
    comments = tuple(r.pending_comments)
    r.pending_comments = []
    r.seen_entry = True
    kw = r.match(_IDENT, "'gdd'")
    if kw.group(0) != "gdd":
        raise r.error(f"expected 'gdd', found {kw.group(0)!r}", kw.start())
    tag = _unescape(r.match(_STRING, "quoted tag").group(1))
    r.expect("{")
    fields: dict = {}
    while not r.peek("}"):
        key_m = r.match(_IDENT, "a key")
        key = key_m.group(0)
        if key not in ("order", "vertices", "edges", "constraint"):
            raise r.error(f"unknown key {key!r}", key_m.start())
        if key in fields:
            raise r.error(f"duplicate key {key!r}", key_m.start())
        r.expect("=")
        if key == "order":
            m = r.match(_ORDER, "an order (integer >= 3 or 'generic')")
            try:
                fields[key] = parse_order(m.group(0))
            except LabelError as exc:
                raise r.error(str(exc), m.start()) from None
        elif key == "vertices":
            r.expect("[")
            items = []
            while True:
                items.append((r.match(_LABEL, "a label"),))
                if r.peek(","):
                    r.expect(",")
                    continue
                break
            r.expect("]")
            fields[key] = items
        elif key == "edges":
            r.expect("{")
            items = []
            if not r.peek("}"):
                while True:
                    r.expect("(")
                    i = r.match(_INT, "a vertex index")
                    r.expect(",")
                    j = r.match(_INT, "a vertex index")
                    r.expect(")")
                    r.expect(":")
                    items.append((i, j, r.match(_LABEL, "a label")))
                    if r.peek(","):
                        r.expect(",")
                        continue
                    break
            r.expect("}")
            fields[key] = items
        else:
            fields[key] = _unescape(r.match(_STRING, "a quoted string").group(1))
        r.expect(";")
    r.expect("}")
    for req in ("order", "vertices"):
        if req not in fields:
            raise r.error(f"entry {tag!r} lacks required key {req!r}", start)
    order = fields["order"]

    def lab(m):
        try:
            return parse_label(m.group(0), order)
        except LabelError as exc:
            raise r.error(str(exc), m.start()) from None

    diag = [lab(m[0]) for m in fields["vertices"]]
    n = len(diag)
    edges: dict[tuple[int, int], Label] = {}
    for im, jm, lm in fields.get("edges", []):
        i, j = int(im.group(0)), int(jm.group(0))
        for v, m in ((i, im), (j, jm)):
            if not 1 <= v <= n:
                raise r.error(f"vertex index {v} out of range 1..{n}", m.start())
        if i == j:
            raise r.error("an edge needs two distinct vertices", im.start())
        key = (min(i, j) - 1, max(i, j) - 1)
        if key in edges:
            raise r.error(f"duplicate edge ({i},{j})", im.start())
        value = lab(lm)
        if value.is_one():
            raise r.error(f"edge ({i},{j}) is declared with label 1", lm.start())
        edges[key] = value
    try:
        g = GDD.from_labels(diag, edges)
    except (GDDError, LabelError) as exc:
        raise r.error(str(exc), start) from None
    return Entry(g, tag, fields.get("constraint"), comments, r.where(start)[0])


def parse_gdd_file(text: str) -> GddFile:
    r = _Reader(text)
    out = []
    while not r.at_end():
        out.append(_parse_entry(r))
    if not r.seen_entry:
        r.header += r.pending_comments
    return GddFile(out, r.header)


def load_gdd_file(path) -> GddFile:
    return parse_gdd_file(Path(path).read_text())


def format_entry(e: Entry) -> str:
    g = e.gdd
    lines = [f"# {c}".rstrip() for c in e.comments]
    lines.append(f'gdd "{_escape(e.tag)}" {{')
    lines.append(f"  order = {g.order};")
    lines.append(f"  vertices = [{', '.join(str(v) for v in g.vertex_labels)}];")
    edges = ", ".join(f"({i + 1},{j + 1}): {lab}" for (i, j), lab in g.edges().items())
    lines.append(f"  edges = {{ {edges} }};" if edges else "  edges = { };")
    if e.constraint is not None:
        lines.append(f'  constraint = "{_escape(e.constraint)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_gdd_file(entries: Iterable[Entry], header: Iterable[str] | None = None) -> str:
    if header is None:
        header = getattr(entries, "header", ())
    head = "".join(f"# {h}".rstrip() + "\n" for h in header)
    body = "\n".join(format_entry(e) for e in entries)
    if head and body:
        return head + "\n" + body
    return head + body
