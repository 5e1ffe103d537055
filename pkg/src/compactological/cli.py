"""Command-line front end.

Input is a single tree-structured document::

    (document
      (version 1)
      (tower N ninf)
      (map s succ)
      (check epi (id N) (depth 3))
      (compute coequalizer (id N) s))

Declarations are ``tower``, ``object``, ``map`` and ``compactology``; every
other top-level form after ``version`` is a command.  Grammar details are in
the README.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field

from . import cmp as cm
from . import cond as cd
from . import towers as tw
from .certs import Certificate
from .finkit import FinFun, FinSet, fin, min_equivalence_bruteforce

VERSION = 1
DECLARATION_KINDS = ("tower", "object", "map", "compactology")


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line, self.col = line, col


class ResolutionError(ParseError):
    pass


# -- reader ------------------------------------------------------------------

@dataclass
class Node:
    """An atom (``value`` set) or a list (``items`` set), with its position."""
    line: int
    col: int
    value: object = None
    items: list | None = None

    @property
    def is_list(self) -> bool:
        return self.items is not None

    def head(self):
        if self.is_list and self.items and not self.items[0].is_list:
            return self.items[0].value
        return None

    def to_data(self):
        if self.is_list:
            return [i.to_data() for i in self.items]
        return self.value


def _tokens(text: str):
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            yield ch, line, col
            col, i = col + 1, i + 1
            continue
        start, start_col = i, col
        while i < len(text) and not text[i].isspace() and text[i] not in "();":
            i, col = i + 1, col + 1
        yield text[start:i], line, start_col


def _atom(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def read(text: str) -> Node:
    stack = []
    root = None
    for tok, line, col in _tokens(text):
        if tok == "(":
            stack.append(Node(line, col, items=[]))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            node = stack.pop()
            if stack:
                stack[-1].items.append(node)
            elif root is None:
                root = node
            else:
                raise ParseError("text after the document", line, col)
        else:
            if not stack:
                raise ParseError(f"atom {tok!r} outside the document", line, col)
            stack[-1].items.append(Node(line, col, value=_atom(tok)))
    if stack:
        raise ParseError("unclosed '('", stack[-1].line, stack[-1].col)
    if root is None:
        raise ParseError("empty input", 1, 1)
    return root


def write(data) -> str:
    if isinstance(data, list):
        return "(" + " ".join(write(d) for d in data) + ")"
    return str(data)


# -- documents ---------------------------------------------------------------

@dataclass
class Declaration:
    kind: str
    name: str
    expr: Node


@dataclass
class Document:
    version: int
    declarations: list = field(default_factory=list)
    commands: list = field(default_factory=list)
    env: dict = field(default_factory=dict, repr=False)

    def canonical(self) -> str:
        lines = ["(document", f"  (version {self.version})"]
        for d in self.declarations:
            lines.append(f"  ({d.kind} {d.name} {write(d.expr.to_data())})")
        for c in self.commands:
            lines.append("  " + write(c.to_data()))
        return "\n".join(lines) + ")\n"


def parse(text: str) -> Document:
    root = read(text)
    if root.head() != "document":
        raise ParseError("expected (document ...)", root.line, root.col)
    items = root.items[1:]
    if not items or items[0].head() != "version":
        raise ParseError("missing (version N)", root.line, root.col)
    v = items[0].items[1].value if len(items[0].items) == 2 else None
    if v != VERSION:
        raise ParseError(f"unsupported version {v!r}", items[0].line, items[0].col)
    doc = Document(v)
    for node in items[1:]:
        if not node.is_list or not node.items:
            raise ParseError("expected a form", node.line, node.col)
        head = node.head()
        if head in DECLARATION_KINDS:
            if len(node.items) != 3 or node.items[1].is_list:
                raise ParseError(f"expected ({head} NAME EXPR)", node.line, node.col)
            name = node.items[1].value
            if name in doc.env:
                raise ResolutionError(f"duplicate name {name!r}", node.items[1].line,
                                      node.items[1].col)
            decl = Declaration(head, name, node.items[2])
            doc.env[name] = (head, _resolve(head, decl.expr, doc.env))
            doc.declarations.append(decl)
        elif head in COMMANDS:
            _check_command(node, doc.env)
            doc.commands.append(node)
        else:
            raise ParseError(f"unknown form {head!r}", node.line, node.col)
    return doc


# -- expression resolution ---------------------------------------------------

def _lookup(node: Node, env: dict, kind: str):
    name = node.value
    if name not in env:
        raise ResolutionError(f"undeclared name {name!r}", node.line, node.col)
    have, value = env[name]
    if have != kind:
        raise ResolutionError(f"{name!r} is a {have}, not a {kind}", node.line, node.col)
    return value


def _resolve(kind: str, node: Node, env: dict):
    try:
        return _BUILDERS[kind](node, env)
    except ParseError:
        raise
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ResolutionError(f"cannot build {kind}: {exc}", node.line, node.col) from exc


def _tower(node: Node, env: dict) -> tw.Tower:
    if not node.is_list:
        if node.value == "ninf":
            return tw.ninf()
        if node.value == "cantor":
            return tw.cantor()
        return _lookup(node, env, "tower")
    head, args = node.head(), node.items[1:]
    if head == "fin":
        return tw.fin_tower(args[0].value)
    if head == "product":
        return tw.tower_product_many([_tower(a, env) for a in args])
    if head == "coproduct":
        return tw.tower_coproduct([_tower(a, env) for a in args])
    raise ResolutionError(f"unknown tower form {head!r}", node.line, node.col)


def _object(node: Node, env: dict) -> cm.CmpObject:
    if not node.is_list:
        if node.value == "discrete_countable":
            return cm.discrete_countable()
        return _lookup(node, env, "object")
    head, args = node.head(), node.items[1:]
    if head == "compact":
        return cm.from_compact(_tower(args[0], env))
    if head == "discrete":
        return cm.discrete(args[0].value)
    if head == "product":
        return cm.cmp_product(*[_object(a, env) for a in args]).obj
    if head == "coproduct":
        return cm.cmp_coproduct([_object(a, env) for a in args]).obj
    raise ResolutionError(f"unknown object form {head!r}", node.line, node.col)


def _map(node: Node, env: dict) -> tw.TowerMap:
    if not node.is_list:
        if node.value == "succ":
            return tw.successor()
        if node.value == "first_one":
            return tw.first_one()
        return _lookup(node, env, "map")
    head, args = node.head(), node.items[1:]
    if head == "id":
        return tw.identity(_tower(args[0], env))
    if head == "flip":
        return tw.bit_flip(args[0].value)
    if head == "truncate":
        return tw.truncation(_tower(args[0], env), args[1].value)
    if head == "table":
        # (table n m v0 v1 ...): a map fin(n) → fin(m)
        n, m = args[0].value, args[1].value
        fun = FinFun(fin(n), fin(m), tuple(a.value for a in args[2:]))
        return tw.level_map(tw.fin_tower(n), tw.fin_tower(m), 0, fun)
    if head == "compose":
        maps = [_map(a, env) for a in args]
        out = maps[-1]
        for g in reversed(maps[:-1]):
            out = tw.compose(g, out)
        return out
    raise ResolutionError(f"unknown map form {head!r}", node.line, node.col)


def _subset(node: Node) -> tuple:
    if not node.is_list:
        raise ResolutionError("expected a list of labels", node.line, node.col)
    return tuple(i.value for i in node.items)


def _compactology(node: Node, env: dict) -> cm.FiniteCompactology:
    if not node.is_list:
        return _lookup(node, env, "compactology")
    parts = {i.head(): i for i in node.items if i.is_list}
    if "carrier" not in parts or "family" not in parts:
        raise ResolutionError("expected (carrier ...) and (family ...)", node.line, node.col)
    carrier = FinSet(tuple(i.value for i in parts["carrier"].items[1:]))
    family = [_subset(s) for s in parts["family"].items[1:]]
    return cm.FiniteCompactology(carrier, tuple(family))


_BUILDERS = {"tower": _tower, "object": _object, "map": _map, "compactology": _compactology}


# -- commands ----------------------------------------------------------------

OPTIONS = ("depth", "chain", "window")


def _split_options(node: Node):
    args, opts = [], {}
    for item in node.items[1:]:
        if item.is_list and item.head() in OPTIONS:
            vals = [i.value for i in item.items[1:]]
            if item.head() == "window":
                opts["chain"], opts["depth"] = vals
            else:
                opts[item.head()] = vals[0]
        else:
            args.append(item)
    return args, opts


COMMANDS = ("check", "compute", "count", "roundtrip", "sample")
_SIGNATURES = {
    ("check", "compactology"): ("compactology",),
    ("check", "epi"): ("map",),
    ("check", "mono"): ("map",),
    ("check", "iso"): ("map",),
    ("check", "equal"): ("map", "map"),
    ("check", "sheaf"): ("object", "cover"),
    ("compute", "coequalizer"): ("map", "map"),
    ("compute", "equalizer"): ("map", "map"),
    ("compute", "quotient"): ("object", "pairs"),
    ("count", "hom"): ("object", "object"),
    ("count", "subobjects"): ("object",),
    ("roundtrip", "representable"): ("object",),
    ("sample", "coequalizer-oracle"): ("int",),
}


def _check_command(node: Node, env: dict):
    args, _ = _split_options(node)
    if not args or args[0].is_list:
        raise ParseError("command needs a subcommand", node.line, node.col)
    key = (node.head(), args[0].value)
    if key not in _SIGNATURES:
        raise ParseError(f"unknown command {' '.join(map(str, key))!r}", node.line, node.col)
    sig = _SIGNATURES[key]
    if len(args) - 1 != len(sig):
        raise ParseError(f"{' '.join(key)} takes {len(sig)} argument(s)", node.line, node.col)
    for kind, arg in zip(sig, args[1:]):
        if kind in _BUILDERS:
            _resolve(kind, arg, env)


@dataclass
class Flags:
    depth: int = tw.DEFAULT_DEPTH
    chain: int = cm.DEFAULT_CHAIN
    cap: int = 10**6
    seed: int = 0


def _cert(c: Certificate) -> str:
    return c.label()


def _plain(x):
    if isinstance(x, (frozenset, set)):
        return sorted((_plain(i) for i in x), key=repr)
    if isinstance(x, (tuple, list)):
        return [_plain(i) for i in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    return x


def _record(verdict, certificate=None, witness=None, **counts) -> dict:
    return {"verdict": verdict, "certificate": certificate,
            "witness": _plain(witness), "counts": _plain(counts)}


def _compact_pair(f: tw.TowerMap, g: tw.TowerMap):
    src, dst = cm.from_compact(f.src), cm.from_compact(f.dst)
    return cm.from_tower_map(src, dst, f), cm.from_tower_map(src, dst, g)


def _run_one(node: Node, env: dict, flags: Flags) -> dict:
    args, opts = _split_options(node)
    depth = opts.get("depth", flags.depth)
    chain = opts.get("chain", flags.chain)
    key = (node.head(), args[0].value)
    rest = args[1:]

    if key == ("check", "compactology"):
        v = cm.check_compactology(_compactology(rest[0], env))
        if v.valid:
            return _record("valid", "exact")
        return _record("invalid", "exact", witness=v.witness, axiom=v.axiom)
    if key[0] == "check" and key[1] in ("epi", "mono", "iso"):
        f = _map(rest[0], env)
        c = {"epi": tw.is_epi, "mono": tw.is_mono, "iso": tw.is_iso}[key[1]](f, depth)
        return _record(c.status.removesuffix("_at"), _cert(c), witness=c.witness)
    if key == ("check", "equal"):
        c = tw.maps_equal(_map(rest[0], env), _map(rest[1], env), depth)
        return _record(c.status.removesuffix("_at"), _cert(c), witness=c.witness)
    if key == ("check", "sheaf"):
        obj = _object(rest[0], env)
        glue, pieces = _cover(rest[1], env)
        v = cd.sheaf_check(cd.representable(obj), pieces, glue, chain, depth, flags.cap)
        return _record("sheaf" if v.ok else "not_sheaf", _cert(v.certificate), **v.counts)
    if key == ("compute", "coequalizer"):
        f, g = _compact_pair(_map(rest[0], env), _map(rest[1], env))
        cone = cm.cmp_coequalizer(f, g, chain, depth)
        sizes = [len(cone.obj.node(chain).level(n)) for n in range(depth + 1)]
        verdict = "point" if set(sizes) == {1} else f"{sizes[-1]} points at depth {depth}"
        return _record(verdict, _cert(cone.certificate), level_sizes=sizes)
    if key == ("compute", "equalizer"):
        f, g = _compact_pair(_map(rest[0], env), _map(rest[1], env))
        cone = cm.cmp_equalizer(f, g, depth, chain)
        piece = cone.pieces(0)
        sizes = [len(piece.member(n)) for n in range(depth + 1)]
        empt = piece.emptiness(depth)
        verdict = "empty" if empt.status == "empty" else f"{sizes[-1]} points at depth {depth}"
        return _record(verdict, _cert(cone.certificate), level_sizes=sizes)
    if key == ("compute", "quotient"):
        obj = _object(rest[0], env)
        pairs = [tuple(i.value for i in p.items) for p in rest[1].items[1:]]
        cong = cd.make_quotient(obj, set(pairs))
        pts = cd.formal_quotient(cong).points()
        return _record(f"{len(pts)} points", "exact", witness=list(pts))
    if key == ("count", "hom"):
        hw = cm.hom_set(_object(rest[0], env), _object(rest[1], env)).enumerate(
            chain, depth, flags.cap)
        return _record(len(hw), _cert(hw.certificate))
    if key == ("count", "subobjects"):
        subs = cm.subobjects_enumerate(_object(rest[0], env))
        return _record(len(subs), "exact")
    if key == ("roundtrip", "representable"):
        rt = cd.underlying_cmp(cd.representable(_object(rest[0], env)), chain, depth)
        st = rt.certificate.status
        return _record("iso" if st in ("iso", "window") else st, _cert(rt.certificate))
    if key == ("sample", "coequalizer-oracle"):
        return _sample_oracle(rest[0].value, flags.seed, depth)
    raise ParseError(f"unhandled command {key!r}", node.line, node.col)


def _cover(node: Node, env: dict):
    head, args = node.head(), [i.value for i in node.items[1:]]
    if head == "cover":
        k, j = args
        return cd.finite_cover(k, j), [tw.fin_tower(1), tw.fin_tower(max(k - 1, 0))]
    if head == "truncate":
        return tw.truncation(tw.ninf(), args[0]), [tw.ninf(), tw.fin_tower(1)]
    raise ResolutionError(f"unknown cover {head!r}", node.line, node.col)


def _catalogue_pairs():
    t = tw.ninf()
    c = tw.cantor()
    return [("id/succ on ninf", tw.identity(t), tw.successor()),
            ("id/id on ninf", tw.identity(t), tw.identity(t)),
            ("id/flip0 on cantor", tw.identity(c), tw.bit_flip(0)),
            ("flip0/flip1 on cantor", tw.bit_flip(0), tw.bit_flip(1))]


def _sample_oracle(count: int, seed: int, depth: int) -> dict:
    rng = random.Random(seed)
    pairs = _catalogue_pairs()
    failures = []
    for _ in range(count):
        name, f, g = rng.choice(pairs)
        n = rng.randrange(min(depth, 3) + 1)
        rel = tw.LevelRelation.generated_by(f, g)
        brute = min_equivalence_bruteforce(f.dst.level(n), [_pair(p) for p in rel.pairs(n)])
        if brute.pairs() != rel.partition(n).pairs():
            failures.append((name, n))
    return _record("agree" if not failures else "disagree", "exact", witness=failures or None,
                   samples=count)


def _pair(p):
    return (tuple(p) * 2)[:2]


# -- reports -----------------------------------------------------------------

@dataclass
class Report:
    flags: Flags
    records: list = field(default_factory=list)


def run(doc: Document, flags: Flags | None = None) -> Report:
    flags = flags or Flags()
    report = Report(flags)
    for i, node in enumerate(doc.commands):
        text = write(node.to_data())
        try:
            rec = _run_one(node, doc.env, flags)
            rec["error"] = None
        except Exception as exc:  # a failing command is reported, never fatal
            rec = _record("error")
            rec["error"] = f"{type(exc).__name__}: {exc}"
        rec["index"] = i
        rec["command"] = text
        report.records.append(rec)
    return report


def emit(report: Report, fmt: str = "human") -> str:
    if fmt == "machine":
        payload = {"flags": {"cap": report.flags.cap, "chain": report.flags.chain,
                             "depth": report.flags.depth, "seed": report.flags.seed},
                   "records": report.records, "version": VERSION}
        return json.dumps(payload, sort_keys=True, indent=2, default=repr) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    header = f"{'#':>3}  {'command':<48} {'verdict':<22} certificate"
    lines = [header, "-" * len(header)]
    for r in report.records:
        verdict = r["error"] if r["error"] else str(r["verdict"])
        lines.append(f"{r['index']:>3}  {r['command'][:48]:<48} {verdict:<22} "
                     f"{r['certificate'] or '-'}")
        if r["witness"] is not None:
            lines.append(f"{'':>5}witness: {r['witness']}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="compactological",
                                 description="Run a document of compactological checks.")
    ap.add_argument("input", nargs="?", default="-", help="document file, or - for stdin")
    ap.add_argument("--depth", type=int, default=tw.DEFAULT_DEPTH)
    ap.add_argument("--chain", type=int, default=cm.DEFAULT_CHAIN)
    ap.add_argument("--cap", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=("human", "machine"), default="human")
    ns = ap.parse_args(argv)
    text = sys.stdin.read() if ns.input == "-" else open(ns.input, encoding="utf-8").read()
    try:
        doc = parse(text)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run(doc, Flags(ns.depth, ns.chain, ns.cap, ns.seed))
    sys.stdout.write(emit(report, ns.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
