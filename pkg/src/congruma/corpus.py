"""The bundled example corpus and its golden results."""
from __future__ import annotations

import fnmatch
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .algebra import AlgebraError, FiniteAlgebra
from .congruence import Partition
from .homomorphism import Homomorphism, kernel, preimage
from .morphism import analyze
from .residuated import filter_correspondence, filters
from .spectrum import spectral_report
from .textfmt import parse_congruence, parse_file, resolve_hom


class CorpusError(AlgebraError):
    """A corpus file or the manifest is malformed."""


@dataclass
class CorpusEntry:
    id: str
    kind: str            # "algebra" or "hom"
    group: str           # the example the entry comes from (file stem)
    name: str
    expected: dict


@dataclass
class Corpus:
    directory: Path
    algebras: dict[str, FiniteAlgebra]
    groups: dict[str, str]                     # algebra name -> file stem
    homs: dict[str, Homomorphism]              # "stem/name" -> morphism
    entries: list[CorpusEntry]
    _named: dict = field(default_factory=dict, repr=False)

    def algebra(self, name: str) -> FiniteAlgebra:
        return self.algebras[name]

    def hom(self, hom_id: str) -> Homomorphism:
        return self.homs[hom_id]

    def named(self, alg_name: str) -> dict[str, Partition]:
        """Named congruences of an algebra, from its manifest entry."""
        if alg_name not in self._named:
            A = self.algebras[alg_name]
            out = {"Delta": Partition.discrete(A.size), "Nabla": Partition.total(A.size)}
            for e in self.entries:
                if e.kind == "algebra" and e.name == alg_name:
                    for key, spec in e.expected.get("named", {}).items():
                        try:
                            out[key] = parse_congruence(A, spec)
                        except AlgebraError as exc:
                            raise CorpusError(f"{e.id}: named congruence {key}: {exc}") from None
            self._named[alg_name] = out
        return self._named[alg_name]

    def name_of(self, alg_name: str, p: Partition) -> str:
        for key, q in self.named(alg_name).items():
            if q == p:
                return key
        return p.render(self.algebras[alg_name])

    def resolve(self, alg_name: str, token: str) -> str:
        """Manifest token (a name or a literal) to a canonical rendering."""
        named = self.named(alg_name)
        A = self.algebras[alg_name]
        if token in named:
            return named[token].render(A)
        return parse_congruence(A, token).render(A)


def default_directory() -> Path:
    return Path(str(resources.files("congruma") / "corpus_data"))


def load_corpus(directory=None, manifest: str | None = None) -> Corpus:
    directory = Path(directory) if directory is not None else default_directory()
    algebras, groups = {}, {}
    try:
        for path in sorted(directory.glob("*.ua")):
            for name, A in parse_file(path).algebras.items():
                if name in algebras:
                    raise CorpusError(f"{path.name}: algebra {name} already defined in {groups[name]}.ua")
                algebras[name] = A
                groups[name] = path.stem
        homs = {}
        for path in sorted(directory.glob("*.hom")):
            for spec in parse_file(path).homs:
                hid = f"{path.stem}/{spec.name}"
                homs[hid] = resolve_hom(spec, algebras.__getitem__, str(path))
    except AlgebraError as exc:
        if isinstance(exc, CorpusError):
            raise
        raise CorpusError(str(exc)) from None
    if manifest is None:
        mpath = directory / "expected.toml"
        manifest = mpath.read_text(encoding="utf-8") if mpath.exists() else ""
    try:
        data = tomllib.loads(manifest)
    except tomllib.TOMLDecodeError as exc:
        raise CorpusError(f"expected.toml: {exc}") from None
    entries = []
    for kind in ("algebra", "hom"):
        for eid, expected in data.get(kind, {}).items():
            group, _, name = eid.partition("/")
            if kind == "algebra":
                if name not in algebras or groups[name] != group:
                    raise CorpusError(f"manifest entry {eid}: no such algebra")
            elif eid not in homs:
                raise CorpusError(f"manifest entry {eid}: no such morphism")
            entries.append(CorpusEntry(eid, kind, group, name, expected))
    return Corpus(directory, algebras, groups, homs, entries)


# --------------------------------------------------------------- running

@dataclass(frozen=True)
class CheckResult:
    entry: str
    key: str
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass
class CorpusReport:
    results: list[CheckResult]

    @property
    def mismatches(self) -> list[CheckResult]:
        return [r for r in self.results if not r.ok]

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            status = "ok      " if r.ok else "MISMATCH"
            line = f"{status} {r.entry} {r.key} = {_show(r.actual)}"
            if not r.ok:
                line += f" (expected {_show(r.expected)})"
            lines.append(line)
        lines.append(f"{len(self.results)} checks, {len(self.mismatches)} mismatches")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"checks": len(self.results), "mismatches": len(self.mismatches),
                "results": [{"entry": r.entry, "key": r.key, "ok": r.ok,
                             "expected": r.expected, "actual": r.actual} for r in self.results]}


def _show(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_show(x) for x in v) + "]"
    return str(v)


def _matches(eid, only):
    if only is None:
        return True
    return eid == only or eid.startswith(only.rstrip("/") + "/") or fnmatch.fnmatchcase(eid, only)


def run_corpus(corpus: Corpus | None = None, only: str | None = None) -> CorpusReport:
    corpus = corpus or load_corpus()
    results = []
    for e in corpus.entries:
        if not _matches(e.id, only):
            continue
        try:
            check = _check_algebra if e.kind == "algebra" else _check_hom
            results.extend(check(corpus, e))
        except AlgebraError as exc:
            results.append(CheckResult(e.id, "error", None, str(exc)))
    return CorpusReport(results)


def _sorted_renders(corpus, alg, tokens):
    return sorted(corpus.resolve(alg, t) for t in tokens)


def _check_algebra(corpus, e):
    A = corpus.algebra(e.name)
    exp = e.expected
    rep = spectral_report(A)
    con = rep.con
    out = []
    named = corpus.named(e.name)
    for key, p in named.items():
        if key in exp.get("named", {}):
            out.append(CheckResult(e.id, f"named.{key} in Con", True, p in con.index))
    if "con_size" in exp:
        out.append(CheckResult(e.id, "con_size", exp["con_size"], len(con)))
    for key in ("spec", "max", "min", "con2"):
        if key in exp:
            actual = sorted(con.render(i) for i in getattr(rep, key))
            out.append(CheckResult(e.id, key, _sorted_renders(corpus, e.name, exp[key]), actual))
    if "not_prime" in exp:
        primes = {con.render(i) for i in rep.spec}
        for t in exp["not_prime"]:
            out.append(CheckResult(e.id, f"{t} prime", False, corpus.resolve(e.name, t) in primes))
    if "filters" in exp:
        out.append(CheckResult(e.id, "filters", exp["filters"], len(filters(A))))
        filter_correspondence(A)
        out.append(CheckResult(e.id, "filters correspond to Con", True, True))
    return out


def _check_hom(corpus, e):
    f = corpus.hom(e.id)
    src, tgt = f.source.name, f.target.name
    exp = e.expected
    v = analyze(f)
    out = [CheckResult(e.id, "admissible", exp["admissible"], v.admissible)] if "admissible" in exp else []
    for key, actual in (("gu", v.gu), ("lo", v.lo)):
        if key in exp:
            out.append(CheckResult(e.id, key, exp[key], actual))
    if "kernel" in exp:
        out.append(CheckResult(e.id, "kernel", corpus.resolve(src, exp["kernel"]), kernel(f).render(f.source)))
    for tname, sname in exp.get("preimage", {}).items():
        beta = corpus.named(tgt)[tname]
        out.append(CheckResult(e.id, f"preimage.{tname}", corpus.resolve(src, sname),
                               preimage(f, beta).render(f.source)))
    if "lo_witnesses" in exp:
        out.append(CheckResult(e.id, "lo_witnesses", _sorted_renders(corpus, src, exp["lo_witnesses"]),
                               sorted(v.witnesses.get("LO", ()))))
    if "gu_witnesses" in exp:
        want = sorted((corpus.resolve(src, a), corpus.resolve(tgt, b), corpus.resolve(src, c))
                      for a, b, c in exp["gu_witnesses"])
        out.append(CheckResult(e.id, "gu_witnesses", [list(w) for w in want],
                               [list(w) for w in sorted(v.witnesses.get("GU", ()))]))
    return out
