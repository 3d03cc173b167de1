"""Finite commutative residuated lattices, their filters and filter congruences."""
from __future__ import annotations

import itertools

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, build_algebra, chain, is_lattice, lattice, lattice_order
from .congruence import Partition, enumerate_con

SIGNATURE = (("join", 2), ("meet", 2), ("zero", 0), ("one", 0), ("prod", 2), ("res", 2))


def residuated_lattice(L: FiniteAlgebra, prod, name: str | None = None) -> FiniteAlgebra:
    """Extend the bounded lattice L by a monoid product; the residuum is derived.

    ``prod`` is an n x n table.  The product must be commutative, associative,
    monotone, have the top as unit and be residuated.
    """
    if not is_lattice(L):
        raise AlgebraError(f"{L.name} is not a bounded lattice")
    n = L.size
    prod = np.asarray(prod, dtype=np.int64).reshape(n, n)
    leq = lattice_order(L)
    one = L.op("one").table[0]
    idx = np.arange(n)
    if not (prod == prod.T).all():
        raise AlgebraError("product is not commutative")
    if not (prod[prod[:, :, None], idx[None, None, :]] == prod[idx[:, None, None], prod[None, :, :]]).all():
        raise AlgebraError("product is not associative")
    if not (prod[one] == idx).all():
        raise AlgebraError("top is not a unit for the product")
    res = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            below = [c for c in range(n) if leq[prod[a, c], b]]
            top = [c for c in below if all(leq[d, c] for d in below)]
            if not top:
                raise AlgebraError(f"no residuum for {L.label(a)} -> {L.label(b)}")
            res[a, b] = top[0]
    # residuation law a.c <= b  iff  c <= a->b
    for a, b, c in itertools.product(range(n), repeat=3):
        if leq[prod[a, c], b] != leq[c, res[a, b]]:
            raise AlgebraError("product is not residuated")
    ops = list(L.ops) + [("prod", 2, prod), ("res", 2, res)]
    return build_algebra(name or f"{L.name}_res", n, ops, L.labels)


def is_residuated_lattice(R: FiniteAlgebra) -> bool:
    return R.signature == SIGNATURE


def godel_chain(n: int) -> FiniteAlgebra:
    L = chain(n, f"G{n}")
    return residuated_lattice(L, L.op("meet").array, f"G{n}")


def lukasiewicz_chain(n: int) -> FiniteAlgebra:
    L = chain(n, f"Luk{n}")
    a = np.arange(n)
    return residuated_lattice(L, np.maximum(0, a[:, None] + a[None, :] - (n - 1)), f"Luk{n}")


def boolean_square() -> FiniteAlgebra:
    L = lattice("B4", "0 x y 1".split(), "0<x 0<y x<1 y<1")
    return residuated_lattice(L, L.op("meet").array, "B4")


def biconditional(R: FiniteAlgebra, a: int, b: int) -> int:
    res, meet = R.op("res"), R.op("meet")
    return meet(res(a, b), res(b, a))


def filters(R: FiniteAlgebra) -> list[frozenset[int]]:
    """Non-empty up-sets closed under the product, by exhaustive subset scan."""
    n = R.size
    leq = lattice_order(R)
    prod = R.op("prod")
    out = []
    for mask in range(1, 1 << n):
        F = [x for x in range(n) if mask >> x & 1]
        fs = set(F)
        if any(leq[x, y] and y not in fs for x in F for y in range(n)):
            continue
        if any(prod(x, y) not in fs for x in F for y in F):
            continue
        out.append(frozenset(F))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def filter_congruence(R: FiniteAlgebra, F) -> Partition:
    F = set(F)
    n = R.size
    assign = list(range(n))
    for a in range(n):
        for b in range(a):
            if biconditional(R, a, b) in F:
                assign[a] = assign[b]
                break
    return Partition.from_assignment(assign)


def congruence_filter(R: FiniteAlgebra, theta: Partition) -> frozenset[int]:
    one = R.op("one").table[0]
    return frozenset(x for x in range(R.size) if theta.related(x, one))


def filter_correspondence(R: FiniteAlgebra) -> dict[frozenset[int], Partition]:
    """F -> ~F, checked to be an order isomorphism from filters onto Con(R)."""
    fs = filters(R)
    con = enumerate_con(R)
    out = {F: filter_congruence(R, F) for F in fs}
    if sorted(out.values()) != sorted(con) or len(fs) != len(con):
        raise AlgebraError(f"{R.name}: filters do not correspond to congruences")
    for F in fs:
        if congruence_filter(R, out[F]) != F:
            raise AlgebraError(f"{R.name}: the 1-class of ~F is not F")
        for G in fs:
            if (F <= G) != out[F].refines(out[G]):
                raise AlgebraError(f"{R.name}: correspondence is not monotone both ways")
    return out
