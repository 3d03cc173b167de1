"""Command-line front end.

Algebra arguments are either ``.ua`` files or expressions over algebra names
(``P``, ``product(L22,P)``, ``quotient(P, cg{(y,z)})``).  Names are looked up
in files passed with ``--lib``, then in the bundled corpus.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import AlgebraError
from .congruence import element_cap, enumerate_con
from .corpus import load_corpus, run_corpus
from .dot import emit_dot
from .morphism import analyze
from .homomorphism import kernel
from .spectrum import commutator, spectral_report, stone_closure
from .textfmt import evaluate_expression, parse_congruence, parse_file, render_algebra, resolve_hom

VERBS = ("con", "spec", "commutator", "hom-check", "analyze", "product", "osum", "quotient",
         "closure", "corpus", "dot")


class _Resolver:
    def __init__(self, libs):
        self.docs = [parse_file(p) for p in libs]
        self._corpus = None

    def corpus(self):
        if self._corpus is None:
            self._corpus = load_corpus()
        return self._corpus

    def lookup(self, name):
        for doc in self.docs:
            if name in doc.algebras:
                return doc.algebras[name]
        algebras = self.corpus().algebras
        if name in algebras:
            return algebras[name]
        raise KeyError(name)


def _algebras(arg, resolver, only=None):
    path = Path(arg)
    if path.suffix == ".ua" and path.exists():
        doc = parse_file(path)
        resolver.docs.insert(0, doc)
        algs = list(doc.algebras.values())
        if only:
            algs = [A for A in algs if A.name == only]
            if not algs:
                raise AlgebraError(f"{arg} has no algebra named {only}")
        if not algs:
            raise AlgebraError(f"{arg} defines no algebra")
        return algs
    if path.suffix == ".ua":
        raise AlgebraError(f"no such file: {arg}")
    return [evaluate_expression(arg, resolver.lookup)]


def _congruence(A, text, resolver):
    """Congruence spec, or a name from the corpus manifest when A is a corpus algebra."""
    corpus = resolver.corpus()
    if corpus.algebras.get(A.name) is A and text in corpus.named(A.name):
        return corpus.named(A.name)[text]
    return parse_congruence(A, text)


def _one_algebra(arg, resolver, only=None):
    algs = _algebras(arg, resolver, only)
    if len(algs) > 1:
        raise AlgebraError(f"{arg} defines several algebras; pick one with --algebra")
    return algs[0]


def _homs(arg, resolver, only=None):
    path = Path(arg)
    if path.suffix == ".hom" or path.exists():
        if not path.exists():
            raise AlgebraError(f"no such file: {arg}")
        doc = parse_file(path)
        docs = [doc] + [parse_file(p) for p in sorted(path.parent.glob("*.ua")) if p != path]

        def lookup(name):
            for d in docs:
                if name in d.algebras:
                    return d.algebras[name]
            return resolver.lookup(name)
        specs = [s for s in doc.homs if only is None or s.name == only]
        if not specs:
            raise AlgebraError(f"{arg} has no morphism" + (f" named {only}" if only else ""))
        return [resolve_hom(s, lookup, str(path)) for s in specs]
    # corpus morphism id such as exadm/k
    homs = resolver.corpus().homs
    if arg in homs:
        return [homs[arg]]
    raise AlgebraError(f"unknown morphism {arg!r}")


def _emit(args, text, data):
    if args.format == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ verbs

def _cmd_con(args, res):
    for A in _algebras(args.algebra_arg, res, args.algebra):
        if args.format == "dot":
            sys.stdout.write(emit_dot(A, "con"))
            continue
        con = enumerate_con(A)
        text = f"Con({A.name}): {len(con)} congruences\n" + "".join(
            f"  [{i}] {con.render(i)}\n" for i in range(len(con)))
        _emit(args, text, {"algebra": A.name, "congruences": [con.render(i) for i in range(len(con))]})
    return 0


def _cmd_spec(args, res):
    for A in _algebras(args.algebra_arg, res, args.algebra):
        if args.format == "dot":
            sys.stdout.write(emit_dot(A, "spec", args.strategy))
            continue
        r = spectral_report(A, args.strategy)
        _emit(args, r.to_text(), r.to_dict())
    return 0


def _cmd_commutator(args, res):
    A = _one_algebra(args.algebra_arg, res, args.algebra)
    alpha, beta = _congruence(A, args.alpha, res), _congruence(A, args.beta, res)
    c = commutator(A, alpha, beta, args.strategy)
    _emit(args, c.render(A) + "\n", {"algebra": A.name, "alpha": alpha.render(A), "beta": beta.render(A),
                                     "strategy": args.strategy, "commutator": c.render(A)})
    return 0


def _cmd_hom_check(args, res):
    out = []
    for f in _homs(args.hom_arg, res, args.hom):
        out.append({"hom": f.name, "source": f.source.name, "target": f.target.name, "valid": True,
                    "injective": f.is_injective, "surjective": f.is_surjective,
                    "kernel": kernel(f).render(f.source)})
    text = "".join(f"hom {d['hom']} : {d['source']} -> {d['target']} valid"
                   f" injective={'yes' if d['injective'] else 'no'}"
                   f" surjective={'yes' if d['surjective'] else 'no'} kernel={d['kernel']}\n" for d in out)
    _emit(args, text, out)
    return 0


def _cmd_analyze(args, res):
    verdicts = [analyze(f, args.strategy) for f in _homs(args.hom_arg, res, args.hom)]
    _emit(args, "".join(v.to_text() for v in verdicts), [v.to_dict() for v in verdicts])
    return 0


def _show_algebra(args, A):
    if args.format == "dot":
        sys.stdout.write(emit_dot(A, "algebra-order"))
        return 0
    data = {"name": A.name, "size": A.size, "labels": list(A.labels) if A.labels else None,
            "ops": {op.name: {"arity": op.arity, "table": list(op.table)} for op in A.ops}}
    _emit(args, render_algebra(A), data)
    return 0


def _cmd_construct(args, res):
    if args.verb == "quotient":
        expr = f"quotient({args.parts[0]}, {args.parts[1]})" if len(args.parts) == 2 else None
        if expr is None:
            raise AlgebraError("quotient takes an algebra and a congruence spec")
    else:
        if len(args.parts) < 1:
            raise AlgebraError(f"{args.verb} needs at least one algebra")
        expr = f"{'product' if args.verb == 'product' else 'osum'}({', '.join(args.parts)})"
    return _show_algebra(args, evaluate_expression(expr, res.lookup))


def _cmd_closure(args, res):
    A = _one_algebra(args.algebra_arg, res, args.algebra)
    M = [_congruence(A, s, res) for s in args.primes]
    cl = stone_closure(A, M, args.strategy)
    data = {"algebra": A.name, "set": [p.render(A) for p in M], "closure": [p.render(A) for p in cl]}
    text = "closure: " + (" ".join(data["closure"]) if cl else "(empty)") + "\n"
    _emit(args, text, data)
    return 0


def _cmd_corpus(args, res):
    corpus = load_corpus(args.dir) if args.dir else res.corpus()
    report = run_corpus(corpus, args.only)
    _emit(args, report.to_text(), report.to_dict())
    return 1 if report.mismatches else 0


def _cmd_dot(args, res):
    for A in _algebras(args.algebra_arg, res, args.algebra):
        sys.stdout.write(emit_dot(A, args.what, args.strategy))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--strategy", choices=("meet", "delta"), default="meet",
                        help="commutator strategy (meet needs a distributive Con)")
    common.add_argument("--cap", type=int, default=None, help="element cap for enumeration")
    common.add_argument("--lib", action="append", default=[], help="extra .ua file for name lookup")

    p = argparse.ArgumentParser(prog="congruma", description="Congruence lattices, spectra and GU/LO checks.")
    sub = p.add_subparsers(dest="verb", required=True, metavar="verb")

    def alg(name, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("algebra_arg", metavar="ALGEBRA", help=".ua file or algebra expression")
        s.add_argument("--algebra", help="pick one algebra from a multi-algebra file")
        return s

    alg("con", "list Con(A)")
    alg("spec", "spectral report")
    s = alg("commutator", "commutator of two congruences")
    s.add_argument("alpha")
    s.add_argument("beta")
    for name, help_ in (("hom-check", "validate morphisms"), ("analyze", "admissibility, GU and LO")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("hom_arg", metavar="HOM", help=".hom file or corpus id such as exadm/k")
        s.add_argument("--hom", help="pick one morphism from the file")
    for name, help_ in (("product", "direct product of algebras"), ("osum", "ordinal sum of lattices"),
                        ("quotient", "quotient A/theta")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("parts", nargs="+")
    s = alg("closure", "Stone closure of a set of primes")
    s.add_argument("primes", nargs="*")
    s = sub.add_parser("corpus", parents=[common], help="run the bundled corpus")
    s.add_argument("--only", help="entry id, prefix or glob")
    s.add_argument("--dir", help="corpus directory")
    s = alg("dot", "DOT diagram")
    s.add_argument("--what", choices=("algebra-order", "con", "spec"), default="con")
    return p


_DISPATCH = {
    "con": _cmd_con, "spec": _cmd_spec, "commutator": _cmd_commutator, "hom-check": _cmd_hom_check,
    "analyze": _cmd_analyze, "product": _cmd_construct, "osum": _cmd_construct, "quotient": _cmd_construct,
    "closure": _cmd_closure, "corpus": _cmd_corpus, "dot": _cmd_dot,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        res = _Resolver(args.lib)
        if args.cap is not None:
            with element_cap(args.cap):
                return _DISPATCH[args.verb](args, res)
        return _DISPATCH[args.verb](args, res)
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
