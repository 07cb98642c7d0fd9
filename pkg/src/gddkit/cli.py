"""Command-line interface: ``gdd check|enumerate|diff|render|selftest``.

Exit codes: 0 ok, 1 verification miss, 2 usage or parse error.  Errors are
reported on stderr as one JSON line ``{"error": kind, "message": ...}``.
``GDD_THREADS`` sets the default worker count of ``enumerate``.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .cartan import cartan_type, classify_gcm
from .catalog import CatalogEntry, instantiate
from .chains import classify_classical, is_simple_chain
from .constraints import ConstraintError, parse_constraint
from .engine import (
    Universe,
    UniverseTooLarge,
    default_workers,
    enumerate_quasi_affine,
    is_quasi_affine,
    match_catalog,
    match_concrete,
)
from .fileformat import Entry, GddSyntaxError, load_gdd_file, print_gdd_file
from .gdd import GDD, GDDError, ShapeKind
from .labels import GENERIC, Label, LabelError, ParamOrder, parse_order
from .weyl import DEFAULT_CAPS, Caps, arithmetic_verdict

EXIT_OK, EXIT_MISS, EXIT_USAGE = 0, 1, 2

_CAP_KEYS = {
    "objects": "max_objects",
    "roots": "max_roots",
    "height": "max_height",
    "m": "m_cap",
    "loops": "max_loop_checks",
}


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.kind, self.code = kind, code


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the subcommands."""

    caps: Caps = DEFAULT_CAPS
    max_exp: int = 6
    allow_sign: bool = True
    prune: bool = True
    shapes: str = "all"
    workers: int = 1
    output: str | None = None


def parse_caps(text: str | None) -> Caps:
    """``objects=40000,m=128`` style overrides of the default caps."""
    caps = DEFAULT_CAPS
    if not text:
        return caps
    names = {f.name for f in fields(Caps)}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        key = _CAP_KEYS.get(key.strip(), key.strip())
        if not sep or key not in names:
            raise CliError("usage", f"unknown cap {item.strip()!r}; use {', '.join(_CAP_KEYS)}")
        try:
            caps = replace(caps, **{key: int(val)})
        except ValueError as exc:
            raise CliError("usage", f"bad cap value {item.strip()!r}: {exc}") from None
    return caps


def _load(path) -> list[Entry]:
    try:
        return load_gdd_file(path)
    except OSError as exc:
        raise CliError("io", str(exc)) from None
    except (GddSyntaxError, GDDError, LabelError, ConstraintError) as exc:
        raise CliError("parse", f"{path}:{exc}") from None


# -- check --------------------------------------------------------------------------


def _instance(e: Entry, order: ParamOrder | None):
    """Concrete GDD for an entry plus a note on how it was chosen."""
    g = e.gdd
    if not g.order.is_generic:
        if order is not None and order != g.order:
            return None, f"entry has order {g.order}"
        return g, ""
    if e.constraint is None:
        if order is None or order.is_generic:
            return g, "generic q"
        return instantiate(g, Label(1, 1, order)), f"order {order}"
    entry = CatalogEntry(e.tag, g, parse_constraint(e.constraint))
    if order is None:
        n = entry.smallest_order()
        if n is None:
            return None, f"no admissible order for {e.constraint!r}"
        order = ParamOrder(n)
        note = f"smallest admissible order {n}"
    else:
        note = f"order {order}"
    inst = entry.at_order(order)
    if inst is None:
        return None, f"constraint {e.constraint!r} excludes order {order}"
    return inst, note


def _chain_text(g: GDD) -> str:
    parts = []
    if g.shape().kind is ShapeKind.CHAIN:
        parts.append(is_simple_chain(g).verdict.value)
    cl = classify_classical(g)
    if cl.matches:
        parts.append("classical: " + ", ".join(str(m) for m in cl.matches[:3])
                     + (" ..." if len(cl.matches) > 3 else ""))
    return "; ".join(parts) or "-"


def _check_one(g: GDD, caps: Caps) -> tuple[list[str], dict]:
    lines = [f"shape: {g.shape()}", f"chain class: {_chain_text(g)}"]
    a = cartan_type(g)
    if a is None:
        lines.append("cartan type: no")
    else:
        lines.append(f"cartan type: {a.rows} ({classify_gcm(a)})")
    facts = {"arithmetic": None, "qa": None, "capped": False}
    if g.n >= 2 and g.connected():
        v = is_quasi_affine(g, caps)
        lines.append(f"weyl: {v.whole}")
        dels = ", ".join(f"{i + 1}: {d}" for i, d in enumerate(v.deletions))
        lines.append(f"deletions: {dels}")
        lines.append(f"verdict: {'quasi-affine' if v.is_quasi_affine else 'not quasi-affine'}")
        lines += [f"warning: {w}" for w in v.warnings]
        facts.update(arithmetic=v.whole.finite, qa=v.is_quasi_affine, capped=v.capped)
    else:
        w = arithmetic_verdict(g, caps)
        lines.append(f"weyl: {w}")
        lines.append("verdict: quasi-affinity needs a connected GDD of rank >= 2")
        facts.update(arithmetic=w.finite, capped=w.outcome.value == "cap-exceeded")
    return lines, facts


_EXPECT = {
    "qa": lambda f: f["qa"] is True,
    "not-qa": lambda f: f["qa"] is False,
    "arithmetic": lambda f: f["arithmetic"] is True,
    "non-arithmetic": lambda f: f["arithmetic"] is False,
}


def cmd_check(args, cfg: RunConfig, out) -> int:
    order = parse_order(args.order) if args.order else None
    entries = _load(args.file)
    misses = 0
    for e in entries:
        g, note = _instance(e, order)
        head = f'[{e.tag}]'
        if g is None:
            print(f"{head} skipped: {note}", file=out)
            if args.expect:
                misses += 1
            continue
        print(f"{head} order {g.order}" + (f" ({note})" if note else ""), file=out)
        lines, facts = _check_one(g, cfg.caps)
        for ln in lines:
            print(f"  {ln}", file=out)
        if args.expect and (not _EXPECT[args.expect](facts) or facts["capped"]):
            misses += 1
            print(f"  MISS: expected {args.expect}", file=out)
    if args.expect:
        print(f"{len(entries) - misses}/{len(entries)} entries meet --expect {args.expect}", file=out)
    return EXIT_MISS if misses else EXIT_OK


# -- enumerate ----------------------------------------------------------------------------


def _universe_line(u: Universe, cfg: RunConfig) -> str:
    return (f"universe: order={u.order} max_exp={u.max_exp} sign={'on' if u.allow_sign else 'off'} "
            f"shapes={cfg.shapes} prune={'on' if cfg.prune else 'off'}")


def _verdict_comments(v) -> tuple[str, ...]:
    dels = ", ".join(str(d.root_count) if d.finite else d.outcome.value for d in v.deletions)
    return (f"whole: {v.whole}", f"deletion root counts: {dels}") + tuple(f"warning: {w}" for w in v.warnings)


def cmd_enumerate(args, cfg: RunConfig, out) -> int:
    if args.generic:
        order = GENERIC
    elif args.order:
        order = parse_order(args.order)
    else:
        raise CliError("usage", "give --order N or --generic")
    u = Universe(order, cfg.max_exp, cfg.allow_sign)
    t0 = time.time()

    def progress(msg):
        if args.verbose:
            print(f"[{time.time() - t0:7.1f}s] {msg}", file=sys.stderr)

    try:
        res = enumerate_quasi_affine(args.rank, order, u, cfg.caps, prune=cfg.prune, shapes=cfg.shapes,
                                     workers=cfg.workers, progress=progress)
    except UniverseTooLarge as exc:
        raise CliError("universe-too-large", str(exc)) from None
    except ValueError as exc:
        raise CliError("usage", str(exc)) from None
    entries = []
    for k, (g, v) in enumerate(res.sorted_results(), 1):
        entries.append(Entry(g, f"R{args.rank}-{k:04d}", None, _verdict_comments(v)))
    header = (f"quasi-affine GDDs of rank {args.rank}", _universe_line(u, cfg))
    text = print_gdd_file(entries, header)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)
    capped = sum(1 for _, v in res.results.values() if v.capped)
    print(f"rank {args.rank}, order {order}: {len(entries)} quasi-affine, {capped} with cap warnings, "
          f"{time.time() - t0:.1f}s", file=sys.stderr)
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


# -- diff ------------------------------------------------------------------------------------

_UNIVERSE_RE = re.compile(r"universe: order=(\S+) max_exp=(\d+) sign=(on|off) shapes=(\w+)")


def cmd_diff(args, cfg: RunConfig, out) -> int:
    res_file = _load(args.results)
    cat_file = _load(args.catalog)
    found = [e.gdd for e in res_file]
    order = parse_order(args.order) if args.order else None
    max_exp, sign, shapes = cfg.max_exp, cfg.allow_sign, args.shapes
    for h in res_file.header:
        m = _UNIVERSE_RE.search(h)
        if m:
            order = order or parse_order(m.group(1))
            if args.max_exp is None:
                max_exp = int(m.group(2))
            sign = sign and m.group(3) == "on"
            shapes = shapes or m.group(4)
    if order is None:
        if found:
            order = found[0].order
        else:
            raise CliError("usage", "empty results file; pass --order")
    if any(g.order != order for g in found):
        raise CliError("usage", "results file mixes parameter orders")
    if all(e.gdd.order.is_generic for e in cat_file):
        catalog = [CatalogEntry(e.tag, e.gdd, parse_constraint(e.constraint or "")) for e in cat_file]
        rep = match_catalog(found, catalog, order, Universe(order, max_exp, sign), cfg.caps, shapes)
    else:
        rep = match_concrete(found, [(e.tag, e.gdd) for e in cat_file], cfg.caps, shapes)
    print(rep.summary(), file=out)
    for tag, g in rep.matched:
        print(f"matched  {tag}", file=out)
    for tag, g in rep.paper_only:
        print(f"catalog-only  {tag}  {g!r}", file=out)
    for g, v in rep.result_only:
        print(f"result-only  {g!r}  re-verified at doubled caps: {v}", file=out)
    if args.show_skipped:
        for tag, why in rep.skipped:
            print(f"skipped  {tag}: {why}", file=out)
    return EXIT_OK if rep.ok else EXIT_MISS


# -- render ----------------------------------------------------------------------------------


def cmd_render(args, cfg: RunConfig, out) -> int:
    from .render import render_png, to_dot

    items = [(e.tag, e.gdd) for e in _load(args.file)]
    text = to_dot(items)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)
    if args.png:
        try:
            render_png(items, args.png)
        except ImportError:
            raise CliError("missing-dependency", "PNG output needs matplotlib (pip install 'artifact[png]')") from None
    return EXIT_OK


# -- selftest --------------------------------------------------------------------------------


def cmd_selftest(args, cfg: RunConfig, out) -> int:
    from .selfcheck import filter_soundness_sample, prop_a51_crosscheck

    bad = 0
    t0 = time.time()
    r = prop_a51_crosscheck(args.samples, args.seed, caps=cfg.caps)
    print(f"cartan-type cross-check: {r.checked} GCMs, {len(r.disagreements)} disagreements "
          f"({time.time() - t0:.1f}s)", file=out)
    for rows, kind, w in r.disagreements:
        print(f"  disagreement: {rows} {kind.value} oracle {w}", file=out)
    bad += len(r.disagreements)
    for n in args.orders:
        t0 = time.time()
        r = filter_soundness_sample(ParamOrder(n), args.filter_samples, args.seed, cfg.caps)
        print(f"filter soundness N={n}: {r.checked} GDDs, {len(r.disagreements)} unsound rejections "
              f"({time.time() - t0:.1f}s)", file=out)
        for g, rej in r.disagreements:
            print(f"  unsound: {g!r} rejected by {rej}", file=out)
        bad += len(r.disagreements)
    return EXIT_MISS if bad else EXIT_OK


# -- entry point ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gdd", description="Generalized Dynkin diagram toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def caps_opt(sp):
        sp.add_argument("--caps", help="cap overrides, e.g. objects=40000,roots=40000,height=64,m=64,loops=4000")

    sp = sub.add_parser("check", help="report shape, chain class, Cartan type and verdicts per GDD")
    sp.add_argument("file")
    sp.add_argument("--order", help="instantiate generic entries at this order instead of the smallest admissible one")
    sp.add_argument("--expect", choices=sorted(_EXPECT), help="exit 1 unless every entry has this verdict")
    caps_opt(sp)

    sp = sub.add_parser("enumerate", help="enumerate quasi-affine GDDs of a given rank")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--order", help="parameter order N (q a primitive N-th root of unity)")
    sp.add_argument("--generic", action="store_true", help="q not a root of unity")
    sp.add_argument("--max-exp", type=int, default=6, help="labels are ±q^e with |e| <= this (default 6)")
    sp.add_argument("--no-sign", action="store_true", help="only labels q^e, no -q^e")
    sp.add_argument("--no-prune", action="store_true")
    sp.add_argument("--shapes", choices=("all", "chain"), default="all")
    sp.add_argument("--workers", type=int, help="worker processes (default GDD_THREADS or 1)")
    sp.add_argument("-o", "--output")
    sp.add_argument("-v", "--verbose", action="store_true")
    caps_opt(sp)

    sp = sub.add_parser("diff", help="compare enumeration output with a catalog")
    sp.add_argument("results")
    sp.add_argument("catalog")
    sp.add_argument("--order", help="order of the results (read from the file when omitted)")
    sp.add_argument("--max-exp", type=int, help="label universe bound (read from the results header when omitted)")
    sp.add_argument("--shapes", choices=("all", "chain"))
    sp.add_argument("--show-skipped", action="store_true")
    caps_opt(sp)

    sp = sub.add_parser("render", help="write DOT (and optionally PNG) drawings")
    sp.add_argument("file")
    sp.add_argument("-o", "--output", help="DOT file (stdout when omitted)")
    sp.add_argument("--png", help="also draw a PNG grid (needs matplotlib)")

    sp = sub.add_parser("selftest", help="random cross-checks of the oracle and the filter bank")
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--filter-samples", type=int, default=200)
    sp.add_argument("--orders", type=lambda s: [int(x) for x in s.split(",")], default=[3, 4, 5, 6])
    sp.add_argument("--seed", type=int, default=0)
    caps_opt(sp)
    return p


_COMMANDS = {
    "check": cmd_check,
    "enumerate": cmd_enumerate,
    "diff": cmd_diff,
    "render": cmd_render,
    "selftest": cmd_selftest,
}


def _config(args) -> RunConfig:
    cfg = RunConfig(caps=parse_caps(getattr(args, "caps", None)))
    if getattr(args, "max_exp", None) is not None:
        cfg = replace(cfg, max_exp=args.max_exp)
    if getattr(args, "no_sign", False):
        cfg = replace(cfg, allow_sign=False)
    if getattr(args, "no_prune", False):
        cfg = replace(cfg, prune=False)
    if getattr(args, "shapes", None):
        cfg = replace(cfg, shapes=args.shapes)
    workers = getattr(args, "workers", None)
    if not workers:
        try:
            workers = default_workers()
        except ValueError as exc:
            raise CliError("usage", str(exc)) from None
    return replace(cfg, workers=workers, output=getattr(args, "output", None))


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return _COMMANDS[args.command](args, cfg, out)
    except CliError as exc:
        print(json.dumps({"error": exc.kind, "message": str(exc)}), file=sys.stderr)
        return exc.code
    except (LabelError, ConstraintError, GDDError) as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed the pipe (e.g. ``| head``); stop quietly
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
