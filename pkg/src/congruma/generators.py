"""Random finite bounded lattices and lattice morphisms for property tests."""
from __future__ import annotations

import random

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, lattice_from_order, lattice_order, subalgebra_generate
from .congruence import enumerate_con
from .constructions import direct_product, quotient
from .homomorphism import Homomorphism, compose, find_homomorphisms


def _family_lattice(sets, name):
    sets = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    n = len(sets)
    leq = np.array([[a <= b for b in sets] for a in sets], dtype=bool)
    labels = tuple(f"e{i}" for i in range(n))
    return lattice_from_order(name, labels, leq)


def _close(sets, ops):
    sets = set(sets)
    while True:
        new = {op(a, b) for a in sets for b in sets for op in ops} - sets
        if not new:
            return sets
        sets |= new


def random_lattice(rng: random.Random, min_size=4, max_size=8, name=None) -> FiniteAlgebra:
    """Lattice of a random intersection-closed set family ordered by inclusion.

    Every finite lattice arises this way, so the shapes are not biased towards
    distributive ones.
    """
    while True:
        k = rng.randint(3, 5)
        full = frozenset(range(k))
        picks = [frozenset(x for x in range(k) if rng.random() < 0.5) for _ in range(rng.randint(2, 6))]
        fam = _close(picks + [full], [frozenset.intersection])
        if min_size <= len(fam) <= max_size:
            return _family_lattice(fam, name or f"Lat{rng.randrange(10**6)}")


def random_distributive_lattice(rng: random.Random, min_size=4, max_size=8, name=None) -> FiniteAlgebra:
    """Lattice of a random ring of sets (closed under union and intersection)."""
    while True:
        k = rng.randint(2, 4)
        full = frozenset(range(k))
        picks = [frozenset(x for x in range(k) if rng.random() < 0.5) for _ in range(rng.randint(1, 4))]
        fam = _close(picks + [full, frozenset()], [frozenset.intersection, frozenset.union])
        if min_size <= len(fam) <= max_size:
            return _family_lattice(fam, name or f"Dist{rng.randrange(10**6)}")


def random_quotient_map(A, rng) -> Homomorphism:
    con = enumerate_con(A)
    theta = con[rng.randrange(len(con))]
    q = quotient(A, theta)
    return q.projection


def random_sublattice_inclusion(A, rng) -> Homomorphism:
    seed = rng.sample(range(A.size), rng.randint(1, min(3, A.size)))
    sub = subalgebra_generate(A, seed, f"{A.name}_sub")
    return Homomorphism(sub.algebra, A, sub.inclusion, "incl")


def random_search_hom(A, B, rng) -> Homomorphism | None:
    homs = find_homomorphisms(A, B)
    return rng.choice(homs).renamed("search") if homs else None


def graph_embedding(g: Homomorphism) -> Homomorphism:
    """x -> (x, g(x)) into source x target; always injective."""
    P = direct_product([g.source, g.target])
    return Homomorphism(g.source, P, tuple(P.index_of_tuple((x, g(x))) for x in range(g.source.size)), "graph")


def random_extension_embedding(A, rng, tries=20) -> Homomorphism | None:
    """Insert new elements strictly between comparable pairs of A, keeping the
    inclusion a lattice embedding; None when no attempt succeeds."""
    leq = lattice_order(A)
    n = A.size
    if n < 2:
        return None
    for _ in range(tries):
        cur = leq
        labels = [A.label(i) for i in range(n)]
        for extra in range(rng.randint(1, 2)):
            m = cur.shape[0]
            pairs = [(a, b) for a in range(m) for b in range(m) if a != b and cur[a, b]]
            a, b = rng.choice(pairs)
            new = np.zeros((m + 1, m + 1), dtype=bool)
            new[:m, :m] = cur
            new[m, m] = True
            new[:m, m] = cur[:, a]      # everything below a is below u
            new[m, :m] = cur[b, :]      # u is below everything above b
            cur = new
            labels.append(f"n{extra}")
        try:
            B = lattice_from_order(f"{A.name}+", tuple(labels), cur)
        except AlgebraError:
            continue
        ja, jb = A.op("join").array, B.op("join").array[:n, :n]
        ma, mb = A.op("meet").array, B.op("meet").array[:n, :n]
        if (ja == jb).all() and (ma == mb).all():
            return Homomorphism(A, B, tuple(range(n)), "ext")
    return None


def random_hom_from(A, rng, distributive=False) -> Homomorphism:
    gen = random_distributive_lattice if distributive else random_lattice
    kind = rng.choice(["quotient", "search", "search", "graph", "extension"])
    if kind == "extension" and not distributive:
        e = random_extension_embedding(A, rng)
        if e is not None:
            return e
        kind = "quotient"
    if kind in ("quotient", "extension"):
        return random_quotient_map(A, rng)
    if kind == "graph":
        C = random_distributive_lattice(rng, 2, 4)
        g = random_search_hom(A, C, rng)
        if g is not None:
            return graph_embedding(g)
        return random_quotient_map(A, rng)
    B = gen(rng, 3, 8)
    h = random_search_hom(A, B, rng)
    return h if h is not None else random_quotient_map(A, rng)


def random_morphism(rng: random.Random, distributive=False) -> Homomorphism:
    """A random valid bounded-lattice morphism; sources have 4 to 8 elements
    except for sublattice inclusions, whose source is the generated sublattice."""
    gen = random_distributive_lattice if distributive else random_lattice
    A = gen(rng)
    r = rng.random()
    if r < 0.25:
        return random_sublattice_inclusion(A, rng)
    if r < 0.85:
        return random_hom_from(A, rng, distributive)
    f = random_hom_from(A, rng, distributive)
    g = random_hom_from(f.target, rng, distributive) if f.target.size <= 8 else random_quotient_map(f.target, rng)
    return compose(g, f)
