"""Line-oriented text formats for algebras (``.ua``) and morphisms (``.hom``),
congruence specs and construction expressions."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .algebra import (AlgebraError, BoundedLatticeSpec, FiniteAlgebra, build_algebra, covering_pairs,
                      is_lattice, lattice_from_covers, lattice_order)
from .congruence import Partition, cg_generated, require_congruence
from .homomorphism import Homomorphism, validate_hom


class ParseError(AlgebraError):
    def __init__(self, message, line=None, source=None):
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line


@dataclass
class HomSpec:
    name: str
    source: str
    target: str
    pairs: list[tuple[str, str]]
    line: int


@dataclass
class Document:
    algebras: dict[str, FiniteAlgebra] = field(default_factory=dict)
    homs: list[HomSpec] = field(default_factory=list)
    origin: str | None = None


_HEADS = ("algebra", "lattice", "hom")


def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_text(text: str, origin: str | None = None) -> Document:
    doc = Document(origin=origin)
    lines = [(i + 1, _strip(l)) for i, l in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l]
    pos = 0
    while pos < len(lines):
        n, line = lines[pos]
        head = line.split()[0]
        if head not in _HEADS:
            raise ParseError(f"expected 'algebra', 'lattice' or 'hom', got {head!r}", n, origin)
        end = pos + 1
        while end < len(lines) and lines[end][1].split()[0] not in _HEADS:
            end += 1
        block = lines[pos:end]
        if head == "hom":
            doc.homs.append(_parse_hom(block, origin))
        else:
            alg = (_parse_algebra if head == "algebra" else _parse_lattice)(block, origin)
            if alg.name in doc.algebras:
                raise ParseError(f"algebra {alg.name!r} defined twice", n, origin)
            doc.algebras[alg.name] = alg
        pos = end
    return doc


def parse_file(path) -> Document:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text, str(path))


def _name_of(block, origin, keyword):
    n, line = block[0]
    parts = line.split()
    if len(parts) != 2:
        raise ParseError(f"expected '{keyword} <name>'", n, origin)
    return parts[1]


def _check_labels(labels, n, origin):
    seen = set()
    for l in labels:
        if l in seen:
            raise ParseError(f"duplicate label {l!r}", n, origin)
        seen.add(l)


def _parse_algebra(block, origin) -> FiniteAlgebra:
    name = _name_of(block, origin, "algebra")
    if len(block) < 2 or block[1][1].split()[0] != "elements":
        raise ParseError("expected 'elements <n> [labels...]'", block[min(1, len(block) - 1)][0], origin)
    n_line, line = block[1]
    parts = line.split()[1:]
    try:
        size = int(parts[0])
    except (IndexError, ValueError):
        raise ParseError("'elements' needs a size", n_line, origin) from None
    labels = parts[1:] or None
    if labels is not None:
        if len(labels) != size:
            raise ParseError(f"{len(labels)} labels given for {size} elements", n_line, origin)
        _check_labels(labels, n_line, origin)
    lookup = {l: i for i, l in enumerate(labels)} if labels else {}
    ops = []
    cur = None
    for n, line in block[2:]:
        toks = line.split()
        if toks[0] == "op":
            if cur is not None:
                ops.append(_finish_op(cur, size, origin))
            if len(toks) != 3 or not toks[2].isdigit():
                raise ParseError("expected 'op <name> <arity>'", n, origin)
            cur = {"name": toks[1], "arity": int(toks[2]), "values": [], "line": n}
            continue
        if cur is None:
            raise ParseError("table values before any 'op' line", n, origin)
        for t in toks:
            if t.lstrip("-").isdigit():
                cur["values"].append((int(t), n))
            elif t in lookup:
                cur["values"].append((lookup[t], n))
            else:
                raise ParseError(f"unknown table entry {t!r}", n, origin)
    if cur is not None:
        ops.append(_finish_op(cur, size, origin))
    try:
        return build_algebra(name, size, ops, labels)
    except AlgebraError as exc:
        raise ParseError(str(exc), block[0][0], origin) from None


def _finish_op(cur, size, origin):
    want = size ** cur["arity"]
    vals = cur["values"]
    if len(vals) != want:
        raise ParseError(f"op {cur['name']!r}: expected {want} entries, got {len(vals)}", cur["line"], origin)
    for v, n in vals:
        if not 0 <= v < size:
            raise ParseError(f"op {cur['name']!r}: entry {v} out of range [0, {size})", n, origin)
    return (cur["name"], cur["arity"], [v for v, _ in vals])


def _parse_lattice(block, origin) -> FiniteAlgebra:
    name = _name_of(block, origin, "lattice")
    labels, bottom, top, covers = None, None, None, []
    for n, line in block[1:]:
        toks = line.split()
        key, rest = toks[0], toks[1:]
        if key == "elements":
            if labels is not None:
                raise ParseError("'elements' given twice", n, origin)
            _check_labels(rest, n, origin)
            labels = rest
        elif key in ("bottom", "top"):
            if len(rest) != 1:
                raise ParseError(f"expected '{key} <label>'", n, origin)
            if key == "bottom":
                bottom = rest[0]
            else:
                top = rest[0]
        elif key == "covers":
            body = line[len("covers"):]
            for item in body.split(";"):
                item = item.strip()
                if not item:
                    continue
                m = re.fullmatch(r"(\S+)\s*<\s*(\S+)", item)
                if not m:
                    raise ParseError(f"bad cover {item!r}, expected 'a < b'", n, origin)
                covers.append((m.group(1), m.group(2), n))
        else:
            raise ParseError(f"unknown lattice keyword {key!r}", n, origin)
    head = block[0][0]
    if labels is None:
        raise ParseError("lattice without 'elements'", head, origin)
    known = set(labels)
    for a, b, n in covers:
        for x in (a, b):
            if x not in known:
                raise ParseError(f"unknown element {x!r} in covers", n, origin)
    for key, val in (("bottom", bottom), ("top", top)):
        if val is None:
            raise ParseError(f"lattice without '{key}'", head, origin)
        if val not in known:
            raise ParseError(f"unknown {key} element {val!r}", head, origin)
    spec = BoundedLatticeSpec(tuple(labels), frozenset((a, b) for a, b, _ in covers), bottom, top, name)
    try:
        return lattice_from_covers(spec)
    except AlgebraError as exc:
        raise ParseError(str(exc), head, origin) from None


def _parse_hom(block, origin) -> HomSpec:
    n0, line = block[0]
    m = re.fullmatch(r"hom\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", line)
    if not m:
        raise ParseError("expected 'hom <name> : <source> -> <target>'", n0, origin)
    pairs = []
    for n, line in block[1:]:
        if not line.startswith("map"):
            raise ParseError(f"expected 'map', got {line.split()[0]!r}", n, origin)
        for item in line[3:].split(";"):
            item = item.strip()
            if not item:
                continue
            mm = re.fullmatch(r"(\S+)\s*->\s*(\S+)", item)
            if not mm:
                raise ParseError(f"bad map entry {item!r}, expected 'a -> b'", n, origin)
            pairs.append((mm.group(1), mm.group(2)))
    return HomSpec(m.group(1), m.group(2), m.group(3), pairs, n0)


def resolve_hom(spec: HomSpec, lookup: Callable[[str], FiniteAlgebra], origin=None) -> Homomorphism:
    try:
        A, B = lookup(spec.source), lookup(spec.target)
    except KeyError as exc:
        raise ParseError(f"unknown algebra {exc.args[0]}", spec.line, origin) from None
    mapping = [None] * A.size
    for a, b in spec.pairs:
        try:
            i, j = A.index_of(a), B.index_of(b)
        except KeyError as exc:
            raise ParseError(exc.args[0], spec.line, origin) from None
        if mapping[i] is not None and mapping[i] != j:
            raise ParseError(f"{a!r} mapped twice", spec.line, origin)
        mapping[i] = j
    missing = [A.label(i) for i, v in enumerate(mapping) if v is None]
    if missing:
        raise ParseError(f"hom {spec.name}: no image for {', '.join(missing)}", spec.line, origin)
    try:
        return validate_hom(A, B, mapping, spec.name)
    except AlgebraError as exc:
        raise ParseError(str(exc), spec.line, origin) from None


# ------------------------------------------------------------ rendering

def render_algebra(A: FiniteAlgebra) -> str:
    if is_lattice(A) and len(A.ops) == 4 and A.labels is not None:
        leq = lattice_order(A)
        covers = " ; ".join(f"{A.label(a)} < {A.label(b)}" for a, b in covering_pairs(leq))
        out = [f"lattice {A.name}", "elements " + " ".join(A.labels),
               f"bottom {A.label(A.op('zero').table[0])}", f"top {A.label(A.op('one').table[0])}"]
        if covers:
            out.append("covers " + covers)
        return "\n".join(out) + "\n"
    out = [f"algebra {A.name}", f"elements {A.size}" + ("" if A.labels is None else " " + " ".join(A.labels))]
    for op in A.ops:
        out.append(f"op {op.name} {op.arity}")
        if op.arity == 0:
            out.append(str(op.table[0]))
        else:
            n = A.size
            vals = [str(v) for v in op.table]
            for i in range(0, len(vals), n):
                out.append(" ".join(vals[i:i + n]))
    return "\n".join(out) + "\n"


def render_hom(f: Homomorphism) -> str:
    return f.render()


# ------------------------------------------------------- congruence specs

def split_top(s: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside any (), {} nesting."""
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in {s!r}")
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ParseError(f"unbalanced brackets in {s!r}")
    out.append("".join(cur))
    return [p.strip() for p in out]


def _inner(s, open_, close):
    s = s.strip()
    if not (s.startswith(open_) and s.endswith(close)):
        raise ParseError(f"expected {open_}...{close}, got {s!r}")
    return s[1:-1]


def _element(A, tok):
    try:
        return A.index_of(tok.strip())
    except KeyError:
        raise ParseError(f"{A.name} has no element {tok.strip()!r}") from None


def parse_congruence(A: FiniteAlgebra, text: str) -> Partition:
    """``cg{(a,b),...}``, a literal ``{{a,b},{c}}``, or one of delta / nabla."""
    s = text.strip()
    if s.lower() in ("delta", "Δ"):
        return Partition.discrete(A.size)
    if s.lower() in ("nabla", "∇"):
        return Partition.total(A.size)
    if s.startswith("cg"):
        body = _inner(s[2:], "{", "}")
        pairs = []
        for item in split_top(body) if body.strip() else []:
            parts = split_top(_inner(item, "(", ")"))
            if len(parts) != 2:
                raise ParseError(f"expected a pair, got {item!r}")
            pairs.append((_element(A, parts[0]), _element(A, parts[1])))
        return cg_generated(A, pairs)
    body = _inner(s, "{", "}")
    blocks = []
    for item in split_top(body) if body.strip() else []:
        inner = _inner(item, "{", "}")
        blocks.append([_element(A, t) for t in split_top(inner)] if inner.strip() else [])
    try:
        p = Partition.from_blocks(A.size, blocks)
    except AlgebraError as exc:
        raise ParseError(str(exc)) from None
    require_congruence(A, p)
    return p


# ------------------------------------------------- construction expressions

def evaluate_expression(text: str, lookup: Callable[[str], FiniteAlgebra]) -> FiniteAlgebra:
    from .constructions import direct_product, ordinal_sum, quotient
    s = text.strip()
    m = re.fullmatch(r"(\w+)\s*\((.*)\)", s, flags=re.S)
    if not m or m.group(1) not in ("product", "osum", "quotient"):
        try:
            return lookup(s)
        except KeyError:
            raise ParseError(f"unknown algebra {s!r}") from None
    fn, args = m.group(1), split_top(m.group(2))
    if fn == "quotient":
        if len(args) != 2:
            raise ParseError("quotient takes an algebra and a congruence spec")
        A = evaluate_expression(args[0], lookup)
        return quotient(A, parse_congruence(A, args[1])).algebra
    parts = [evaluate_expression(a, lookup) for a in args]
    if fn == "product":
        return direct_product(parts)
    return ordinal_sum(parts)
