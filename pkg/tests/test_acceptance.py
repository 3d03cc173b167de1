"""Acceptance criteria.

Each test prints one line ``PASS|FAIL [n] title: ...`` with its violation count,
runtime and time limit.  The lines are collected in ``RESULTS`` and repeated in
the pytest terminal summary.  Running this file as a script prints them too.
Tolerances: all comparisons are exact (partitions are compared as normalized
block vectors, verdicts as booleans); only wall-clock time has a limit.
"""
import itertools
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from oracles import brute_con  # noqa: E402

from congruma.algebra import chain  # noqa: E402
from congruma.congruence import (Partition, cg_generated, element_cap, enumerate_con, is_congruence,  # noqa: E402
                                 meet_all)
from congruma.constructions import (direct_product, ordinal_sum, ordinal_sum_congruence, ordinal_sum_hom,  # noqa: E402
                                    product_hom, product_partition)
from congruma.corpus import load_corpus, run_corpus  # noqa: E402
from congruma.generators import random_hom_from, random_lattice, random_morphism, random_quotient_map  # noqa: E402
from congruma.homomorphism import compose, find_homomorphisms, kernel, preimage  # noqa: E402
from congruma.morphism import (all_f_beta_lo, fbeta_equivalents, fulfills_gu, fulfills_lo,  # noqa: E402
                               induced_f_bracket, is_admissible, lo_char_radical)
from congruma.residuated import (boolean_square, filter_congruence, filter_correspondence, filters,  # noqa: E402
                                 godel_chain, lukasiewicz_chain)
from congruma.spectrum import commutator, delta_commutator, max_indices, spec  # noqa: E402

SEED = 20240601
RESULTS: list[str] = []
LATTICE_OPS = ["join", "meet", "zero", "one"]


class Tally:
    """Collects violations and a few counters for one criterion."""

    def __init__(self):
        self.violations = []
        self.counts = {}
        self.start = time.perf_counter()

    def check(self, ok, what):
        if not ok:
            self.violations.append(what)

    def bump(self, key, by=1):
        self.counts[key] = self.counts.get(key, 0) + by

    def finish(self, num, title, limit):
        elapsed = time.perf_counter() - self.start
        ok = not self.violations and elapsed < limit
        extra = "".join(f", {k}={v}" for k, v in self.counts.items())
        line = (f"{'PASS' if ok else 'FAIL'} [{num}] {title}: {len(self.violations)} violations"
                f"{extra}, {elapsed:.2f}s (limit {limit}s)")
        RESULTS.append(line)
        print(line)
        assert not self.violations, self.violations[:5]
        assert elapsed < limit, f"{elapsed:.2f}s exceeds {limit}s"


def _is_lattice(A):
    return [o.name for o in A.ops] == LATTICE_OPS


def _blocks(A, p):
    return p.render(A)


# ------------------------------------------------------------ corpus (1-3)

def _corpus_part(t, corpus, prefix):
    report = run_corpus(corpus, prefix)
    t.bump("checks", len(report.results))
    for m in report.mismatches:
        t.check(False, f"{m.entry} {m.key}")


def _verdict(f):
    adm = bool(is_admissible(f))
    if not adm:
        return adm, None, None
    return adm, bool(fulfills_gu(f)), bool(fulfills_lo(f))


def test_criterion_1_exadm():
    t = Tally()
    c = load_corpus()
    for name, size in [("D", 2), ("L22", 4), ("P", 5)]:
        t.check(len(enumerate_con(c.algebra(name))) == size, f"|Con({name})|")
    P, nm = c.algebra("P"), c.named("P")
    t.check(set(spec(P)) == {nm["Delta"], nm["alpha"], nm["beta"]}, "Spec(P)")
    t.check(nm["gamma"] in set(enumerate_con(P)) and nm["gamma"] not in spec(P), "gamma excluded")
    for hid in ("i", "j", "h"):
        t.check(not is_admissible(c.hom(f"exadm/{hid}")), f"{hid} admissible")
    t.check(bool(is_admissible(c.hom("exadm/k"))), "k not admissible")
    _corpus_part(t, c, "exadm")
    t.finish(1, "corpus exadm", 1.0)


def test_criterion_2_meproud():
    t = Tally()
    c = load_corpus()
    H, K = c.algebra("H"), c.algebra("K")
    chi = Partition.from_blocks(H.size, [[H.index_of(s) for s in b] for b in
                                         (["0"], ["a", "x"], ["b"], ["c", "z"], ["y", "1"])])
    t.check(list(enumerate_con(H)) == [Partition.total(H.size), chi, Partition.discrete(H.size)], "Con(H)")
    t.check(len(enumerate_con(K)) == 2, "Con(K)")
    i = c.hom("meproud/i")
    gu, lo = fulfills_gu(i), fulfills_lo(i)
    t.check(bool(is_admissible(i)) and not gu and not lo, "verdict of i")
    t.check(lo.witnesses == (_blocks(H, chi),), "LO witness")
    t.check(gu.witnesses == ((_blocks(H, Partition.discrete(H.size)), _blocks(K, Partition.discrete(K.size)),
                              _blocks(H, chi)),), "GU witness")
    _corpus_part(t, c, "meproud")
    t.finish(2, "corpus meproud", 1.0)


def test_criterion_3_exadmgulo():
    t = Tally()
    c = load_corpus()
    for name, size in zip("EFLQRST", (3, 4, 5, 5, 3, 3, 5)):
        con = set(enumerate_con(c.algebra(name)))
        t.check(len(con) == size, f"|Con({name})|")
        t.check(set(c.named(name).values()) <= con, f"named partitions of {name}")
    expected = {"j": (True, False, False), "k": (False, None, None)}
    for hid in "lmqr":
        expected[hid] = (True, True, True)
    for hid, v in expected.items():
        t.check(_verdict(c.hom(f"exadmgulo/{hid}")) == v, f"verdict of {hid}")
    _corpus_part(t, c, "exadmgulo")
    t.finish(3, "corpus exadmgulo", 2.0)


# ------------------------------------------------------- theorem suite (4)

def _min_primes(A):
    primes = spec(A)
    return [p for p in primes if not any(q != p and q.refines(p) for q in primes)]


def _quotient_transfer(t, f, rng):
    A = f.source
    con = list(enumerate_con(A))
    sampled = rng.sample(con, min(3, len(con)))
    adm = bool(is_admissible(f))
    if not adm:
        t.check(not is_admissible(induced_f_bracket(f, Partition.discrete(A.size))), "f[Delta] admissible")
        return
    gu, lo = bool(fulfills_gu(f)), bool(fulfills_lo(f))
    for theta in sampled:
        fq = induced_f_bracket(f, theta)
        t.check(bool(is_admissible(fq)), "f[theta] not admissible")
        t.check(not gu or fulfills_gu(fq), "GU not inherited by f[theta]")
        t.check(not lo or fulfills_lo(fq), "LO not inherited by f[theta]")
    fk = induced_f_bracket(f, kernel(f))
    t.check(bool(fulfills_gu(fk)) == gu, "GU of f[Ker f]")
    t.check(bool(fulfills_lo(fk)) == lo, "LO of f[Ker f]")
    t.check(all(fulfills_gu(induced_f_bracket(f, m)) for m in _min_primes(A)) == gu, "GU over Min(A)")
    t.bump("thetas", len(sampled))


def _composition(t, f, g, h):
    gf, hg = compose(g, f), compose(h, g)
    t.check(compose(h, gf).mapping == compose(hg, f).mapping, "associativity")
    for beta in enumerate_con(g.target):
        if preimage(gf, beta) != preimage(f, preimage(g, beta)):
            t.check(False, "preimage of composite")
            break
    if not (is_admissible(f) and is_admissible(g)):
        return
    t.check(bool(is_admissible(gf)), "composite of admissible maps")
    fgu, ggu, flo, glo = fulfills_gu(f), fulfills_gu(g), fulfills_lo(f), fulfills_lo(g)
    t.check(not (fgu and ggu) or fulfills_gu(gf), "GU composition")
    t.check(not (f.is_surjective and glo) or fulfills_lo(gf), "surjective then LO")
    t.check(not (flo and glo and g.is_injective) or fulfills_lo(gf), "LO then injective LO")
    if fulfills_gu(gf) and glo:
        t.check(not g.is_injective or fgu, "cancelling an injective LO map")
        # every prime of the middle algebra contains Ker(g)
        if all(kernel(g).refines(p) for p in spec(g.source)):
            t.check(bool(fgu), "cancelling an LO map whose kernel lies below every prime")
    t.bump("composites")


def test_criterion_4_theorem_suite():
    t = Tally()
    rng = random.Random(SEED)
    with element_cap(64):
        # (a) on quotient maps of 200 random lattices
        for _ in range(200):
            L = random_lattice(rng)
            q = random_quotient_map(L, rng)
            t.check(_verdict(q) == (True, True, True), f"surjection out of {L.name}")
        t.bump("lattices", 200)
        # (c) distributive lattices and morphisms out of them
        for _ in range(60):
            f = random_morphism(rng, distributive=True)
            A = f.source
            con = enumerate_con(A)
            two = {p for p in con if p.num_blocks == 2}
            t.check(set(spec(A)) == two, "Spec != Con2")
            t.check({con[i] for i in max_indices(A)} == two, "Max != Con2")
            t.check(_verdict(f)[:2] == (True, True), "distributive morphism not adm+GU")
        lo_not_gu = morphisms = 0
        for _ in range(220):
            f = random_morphism(rng)
            morphisms += 1
            if f.is_surjective:
                t.check(_verdict(f) == (True, True, True), "surjective morphism")
            if is_admissible(f):
                gu, lo = bool(fulfills_gu(f)), bool(fulfills_lo(f))
                t.check(not gu or lo, "GU without LO")                       # (b)
                eq = fbeta_equivalents(f)
                t.check(len(set(eq.values())) == 1 and eq["gu"] == gu, f"fbeta forms {eq}")  # (d)
                t.check(all_f_beta_lo(f) == gu, "all f_beta LO")
                t.check(bool(lo_char_radical(f)) == lo, "radical form of LO")   # (e)
                lo_not_gu += lo and not gu
                t.bump("admissible")
            # (f) composable triples
            if f.target.size <= 8:
                g = random_hom_from(f.target, rng)
                h = random_hom_from(g.target, rng) if g.target.size <= 8 else random_quotient_map(g.target, rng)
                _composition(t, f, g, h)
            # (g)
            if f.source.size <= 8:
                _quotient_transfer(t, f, rng)
        t.bump("morphisms", morphisms)
        t.bump("lo_not_gu", lo_not_gu)
    t.finish(4, "random theorem suite", 60.0)


# ----------------------------------------------------- products, sums (5)

def _corpus_lattices(c):
    return [A for A in c.algebras.values() if _is_lattice(A)]


def _padded_spec(parts_for, specs, tops):
    out = set()
    for i, primes in enumerate(specs):
        for phi in primes:
            out.add(parts_for([phi if j == i else tops[j] for j in range(len(specs))]))
    return out


def _componentwise(t, f, parts):
    adm = bool(is_admissible(f))
    t.check(adm == all(is_admissible(p) for p in parts), f"admissibility of {f.name}")
    if adm:
        t.check(bool(fulfills_gu(f)) == all(fulfills_gu(p) for p in parts), f"GU of {f.name}")
        t.check(bool(fulfills_lo(f)) == all(fulfills_lo(p) for p in parts), f"LO of {f.name}")
    t.bump("maps")


def test_criterion_5_products_and_sums():
    t = Tally()
    c = load_corpus()
    lattices = _corpus_lattices(c)
    with element_cap(64):
        for A, B in itertools.combinations_with_replacement(lattices, 2):
            tops = [Partition.total(A.size), Partition.total(B.size)]
            if A.size * B.size <= 45:
                X = direct_product([A, B])
                expect = _padded_spec(lambda ps: product_partition(X, ps), [spec(A), spec(B)], tops)
                t.check(set(spec(X)) == expect, f"Spec({X.name})")
                t.bump("products")
                if X.size <= 25:
                    con = list(enumerate_con(X))
                    ca, cb = list(enumerate_con(A)), list(enumerate_con(B))
                    for a1, a2 in itertools.product(ca, repeat=2):
                        for b1, b2 in itertools.product(cb, repeat=2):
                            lhs = delta_commutator(X, product_partition(X, [a1, b1]), product_partition(X, [a2, b2]))
                            rhs = product_partition(X, [delta_commutator(A, a1, a2), delta_commutator(B, b1, b2)])
                            t.check(lhs == rhs, f"commutator product law in {X.name}")
                    t.bump("commutator_products")
                    t.check(len(con) == len(ca) * len(cb), f"Con({X.name}) size")
            S = ordinal_sum([A, B])
            expect = _padded_spec(lambda ps: ordinal_sum_congruence(S, ps), [spec(A), spec(B)], tops)
            t.check(set(spec(S)) == expect, f"Spec({S.name})")
            t.bump("sums")
        homs = [f for f in c.homs.values() if _is_lattice(f.source)]
        L2 = chain(2, "L2")
        homs.append(find_homomorphisms(L2, L2)[0])
        built = {}

        def made(kind, A, B):
            key = kind, id(A), id(B)
            if key not in built:
                built[key] = (direct_product if kind == "x" else ordinal_sum)([A, B])
            return built[key]

        for f, g in itertools.product(homs, repeat=2):
            if f.source.size * g.source.size <= 64 and f.target.size * g.target.size <= 64:
                h = product_hom([f, g], made("x", f.source, g.source), made("x", f.target, g.target))
                _componentwise(t, h, [f, g])
            h = ordinal_sum_hom([f, g], made("+", f.source, g.source), made("+", f.target, g.target))
            _componentwise(t, h, [f, g])
    t.finish(5, "products and ordinal sums", 30.0)


# --------------------------------------------------------- oracles (6)

def test_criterion_6_oracle_equivalence():
    t = Tally()
    c = load_corpus()
    rng = random.Random(SEED + 6)
    algebras = [A for A in c.algebras.values() if A.size <= 6]
    algebras += [random_lattice(rng, 4, 8) for _ in range(50)]
    for A in algebras:
        con = list(enumerate_con(A))
        t.check(sorted(con) == brute_con(A, is_congruence), f"Con({A.name})")
        seeds = [[p] for p in itertools.combinations(range(A.size), 2)]
        seeds += [rng.sample(seeds, 2)[0] + rng.sample(seeds, 1)[0] for _ in range(5)]
        for pairs in seeds:
            containing = [p for p in con if all(p.related(a, b) for a, b in pairs)]
            t.check(cg_generated(A, pairs) == meet_all(containing, A.size), f"Cg in {A.name}")
        t.bump("seeds", len(seeds))
    t.bump("algebras", len(algebras))
    t.finish(6, "oracle equivalence", 60.0)


# -------------------------------------------------- commutators (7)

def test_criterion_7_commutator_cross_validation():
    t = Tally()
    c = load_corpus()
    for A in c.algebras.values():
        con = list(enumerate_con(A))
        table = {}
        for a, b in itertools.product(con, repeat=2):
            table[a, b] = delta_commutator(A, a, b)
            t.check(table[a, b] == commutator(A, a, b, "meet"), f"delta != meet in {A.name}")
        for a, b in itertools.product(con, repeat=2):
            t.check(table[a, b] == table[b, a], f"commutativity in {A.name}")
            for a2 in con:
                if a.refines(a2):
                    t.check(table[a, b].refines(table[a2, b]), f"monotonicity in {A.name}")
                j = cg_generated(A, b.pairs() + a2.pairs())
                t.check(table[a, j] == cg_generated(A, table[a, b].pairs() + table[a, a2].pairs()),
                        f"join distributivity in {A.name}")
        t.bump("pairs", len(table))
    t.bump("algebras", len(c.algebras))
    t.finish(7, "commutator cross-validation", 30.0)


# -------------------------------------------------- residuated (8)

def test_criterion_8_residuated_family():
    t = Tally()
    c = load_corpus()
    family = [c.algebra("G3"), godel_chain(2), godel_chain(4), lukasiewicz_chain(3), lukasiewicz_chain(4),
              boolean_square()]
    for R in family:
        con = set(enumerate_con(R))
        corr = filter_correspondence(R)
        t.check(set(corr) == set(filters(R)), f"filters of {R.name}")
        t.check(set(corr.values()) == con and len(con) == len(corr), f"Filt({R.name}) not onto Con")
        t.check(all(filter_congruence(R, F) == p for F, p in corr.items()), f"F -> ~F in {R.name}")
    seen = 0
    for A, B in itertools.product(family, repeat=2):
        for f in find_homomorphisms(A, B):
            t.check(_verdict(f) == (True, True, True), f"{A.name}->{B.name} {f.mapping}")
            seen += 1
    t.bump("algebras", len(family))
    t.bump("morphisms", seen)
    t.finish(8, "residuated lattices", 60.0)


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
