"""Direct products, quotients and ordinal sums, with their congruence translations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (AlgebraError, FiniteAlgebra, build_algebra, is_lattice, lattice_from_order,
                      lattice_order, product_on_tuples)
from .congruence import (Partition, _UnionFind, enumerate_con, is_congruence, partition_meet,
                         require_congruence)
from .homomorphism import Homomorphism, HomomorphismError, kernel, validate_hom


# ------------------------------------------------------------------ products

@dataclass(frozen=True, eq=False)
class ProductAlgebra(FiniteAlgebra):
    factors: tuple[FiniteAlgebra, ...] = ()
    tuples: tuple[tuple[int, ...], ...] = ()

    def index_of_tuple(self, t: Sequence[int]) -> int:
        return self.cached("tuple-index", lambda: {tp: i for i, tp in enumerate(self.tuples)})[tuple(t)]

    def projection(self, i: int) -> Homomorphism:
        F = self.factors[i]
        return Homomorphism(self, F, tuple(t[i] for t in self.tuples), f"pi{i}")


def direct_product(factors: Sequence[FiniteAlgebra], name: str | None = None) -> ProductAlgebra:
    factors = tuple(factors)
    if not factors:
        raise AlgebraError("a product needs at least one factor")
    sig = factors[0].signature
    for F in factors[1:]:
        if F.signature != sig:
            raise AlgebraError(f"signature mismatch between {factors[0].name} and {F.name}")
    tuples = list(itertools.product(*(range(F.size) for F in factors)))
    name = name or "x".join(F.name for F in factors)
    alg = product_on_tuples(name, list(factors), tuples)
    return ProductAlgebra(alg.name, alg.size, alg.ops, alg.labels, factors=factors, tuples=tuple(tuples))


def product_partition(P: ProductAlgebra, parts: Sequence[Partition]) -> Partition:
    """The product relation: tuples related iff every coordinate is related."""
    if len(parts) != len(P.factors):
        raise AlgebraError(f"expected {len(P.factors)} factor partitions, got {len(parts)}")
    code = np.zeros(P.size, dtype=np.int64)
    tup = np.asarray(P.tuples, dtype=np.int64)
    for i, p in enumerate(parts):
        if p.size != P.factors[i].size:
            raise AlgebraError(f"factor partition {i} has the wrong carrier size")
        code = code * p.num_blocks + p.array[tup[:, i]]
    return Partition.from_assignment(code)


def product_congruence_decompose(P: ProductAlgebra, theta: Partition) -> list[Partition]:
    """Factor theta as a product of factor congruences, or raise if it does not factor."""
    require_congruence(P, theta, "theta")
    parts = []
    for i, F in enumerate(P.factors):
        uf = _UnionFind(F.size)
        for a, b in theta.pairs():
            uf.union(P.tuples[a][i], P.tuples[b][i])
        part = Partition.from_assignment(uf.labels())
        if not is_congruence(F, part):
            raise AlgebraError(f"projection of {theta.render(P)} onto factor {i} is not a congruence")
        parts.append(part)
    if product_partition(P, parts) != theta:
        raise AlgebraError(f"{theta.render(P)} is not a product of factor congruences")
    return parts


def product_hom(fs: Sequence[Homomorphism], source: ProductAlgebra | None = None,
                target: ProductAlgebra | None = None) -> Homomorphism:
    fs = list(fs)
    source = source or direct_product([f.source for f in fs])
    target = target or direct_product([f.target for f in fs])
    if len(source.factors) != len(fs) or len(target.factors) != len(fs):
        raise HomomorphismError("factor count mismatch")
    for f, S, T in zip(fs, source.factors, target.factors):
        if f.source != S or f.target != T:
            raise HomomorphismError(f"{f} does not match the factor algebras")
    mapping = tuple(target.index_of_tuple(tuple(f(x) for f, x in zip(fs, t))) for t in source.tuples)
    h = Homomorphism(source, target, mapping, "x".join(f.name for f in fs))
    if kernel(h) != product_partition(source, [kernel(f) for f in fs]):
        raise AlgebraError("kernel of the product map is not the product of kernels")
    return h


# ----------------------------------------------------------------- quotients

@dataclass(frozen=True, eq=False)
class QuotientAlgebra(FiniteAlgebra):
    base: FiniteAlgebra | None = None
    theta: Partition | None = None
    representatives: tuple[int, ...] = ()

    def lift(self, delta: Partition) -> Partition:
        """Congruence of the base whose image is delta."""
        return Partition.from_assignment(delta.array[self.theta.array])

    def push(self, gamma: Partition) -> Partition:
        """gamma/theta for gamma containing theta."""
        if not self.theta.refines(gamma):
            raise AlgebraError(f"{gamma.render(self.base)} does not contain {self.theta.render(self.base)}")
        return Partition.from_assignment(gamma.array[list(self.representatives)])


@dataclass(frozen=True)
class QuotientResult:
    algebra: QuotientAlgebra
    projection: Homomorphism

    def correspondence(self) -> dict[Partition, Partition]:
        """Map gamma -> gamma/theta over the principal filter of theta, checked to be an order isomorphism."""
        Q = self.algebra
        A, theta = Q.base, Q.theta
        above = [g for g in enumerate_con(A) if theta.refines(g)]
        out = {g: Q.push(g) for g in above}
        target = set(enumerate_con(Q))
        if set(out.values()) != target or len(target) != len(above):
            raise AlgebraError("congruences above theta do not correspond to Con of the quotient")
        for g in above:
            for h in above:
                if g.refines(h) != out[g].refines(out[h]):
                    raise AlgebraError("correspondence is not an order isomorphism")
        return out


def quotient(A: FiniteAlgebra, theta: Partition, name: str | None = None) -> QuotientResult:
    require_congruence(A, theta, "theta")
    reps = theta.representatives()
    lab = theta.array
    ops = []
    for op in A.ops:
        if op.arity == 0:
            ops.append((op.name, 0, int(lab[op.table[0]])))
            continue
        sub = op.array[np.ix_(*([np.asarray(reps)] * op.arity))]
        ops.append((op.name, op.arity, lab[sub].reshape(-1)))
    labels = [A.label(r) for r in reps]
    name = name or f"{A.name}/{theta.render(A)}"
    base = build_algebra(name, len(reps), ops, labels)
    Q = QuotientAlgebra(base.name, base.size, base.ops, base.labels, base=A, theta=theta,
                        representatives=tuple(reps))
    proj = Homomorphism(A, Q, tuple(int(v) for v in lab), "p")
    return QuotientResult(Q, proj)


# ------------------------------------------------------------- ordinal sums

@dataclass(frozen=True, eq=False)
class OrdinalSumLattice(FiniteAlgebra):
    summands: tuple[FiniteAlgebra, ...] = ()
    embeddings: tuple[tuple[int, ...], ...] = ()   # summand element -> sum element

    def glue_points(self) -> list[int]:
        return [emb[_top(S)] for S, emb in zip(self.summands[:-1], self.embeddings[:-1])]


def _top(L):
    return L.op("one").table[0]


def _bottom(L):
    return L.op("zero").table[0]


def ordinal_sum(lattices: Sequence[FiniteAlgebra], name: str | None = None) -> OrdinalSumLattice:
    """Stack bounded lattices, identifying each top with the next bottom.

    Elements are laid out summand by summand; a glue point keeps the index
    and label it has in the lower summand.
    """
    lattices = tuple(lattices)
    if not lattices:
        raise AlgebraError("an ordinal sum needs at least one summand")
    for L in lattices:
        if not is_lattice(L) or len(L.ops) != 4:
            raise AlgebraError(f"{L.name} is not a bounded lattice")
    embeddings = []
    owner = []          # (summand, element) for each sum element
    for i, L in enumerate(lattices):
        emb = [None] * L.size
        if i > 0:
            emb[_bottom(L)] = embeddings[-1][_top(lattices[i - 1])]
        for x in range(L.size):
            if emb[x] is None:
                emb[x] = len(owner)
                owner.append((i, x))
        embeddings.append(tuple(emb))
    n = len(owner)
    leq = np.zeros((n, n), dtype=bool)
    for i, L in enumerate(lattices):
        lo = lattice_order(L)
        emb = np.asarray(embeddings[i])
        leq[np.ix_(emb, emb)] |= lo
        for j in range(i + 1, len(lattices)):
            leq[np.ix_(emb, np.asarray(embeddings[j]))] = True
    raw = [lattices[i].label(x) for i, x in owner]
    if len(set(raw)) != n:
        raw = [f"{i}.{lattices[i].label(x)}" for i, x in owner]
    name = name or "+".join(L.name for L in lattices)
    alg = lattice_from_order(name, tuple(raw), leq)
    return OrdinalSumLattice(alg.name, alg.size, alg.ops, alg.labels, summands=lattices,
                             embeddings=tuple(embeddings))


def ordinal_sum_congruence(S: OrdinalSumLattice, parts: Sequence[Partition]) -> Partition:
    if len(parts) != len(S.summands):
        raise AlgebraError(f"expected {len(S.summands)} summand partitions, got {len(parts)}")
    uf = _UnionFind(S.size)
    for L, emb, p in zip(S.summands, S.embeddings, parts):
        require_congruence(L, p, f"component on {L.name}")
        reps = p.representatives()
        for x, b in enumerate(p.blocks):
            uf.union(emb[x], emb[reps[b]])
    return Partition.from_assignment(uf.labels())


def ordinal_sum_decompose(S: OrdinalSumLattice, theta: Partition) -> list[Partition]:
    """Restrict theta to each summand."""
    return [Partition.from_assignment(theta.array[list(emb)]) for emb in S.embeddings]


def ordinal_sum_hom(hs: Sequence[Homomorphism], source: OrdinalSumLattice | None = None,
                    target: OrdinalSumLattice | None = None) -> Homomorphism:
    hs = list(hs)
    source = source or ordinal_sum([h.source for h in hs])
    target = target or ordinal_sum([h.target for h in hs])
    if len(source.summands) != len(hs) or len(target.summands) != len(hs):
        raise HomomorphismError("summand count mismatch")
    mapping = [None] * source.size
    for h, S, T, es, et in zip(hs, source.summands, target.summands, source.embeddings, target.embeddings):
        if h.source != S or h.target != T:
            raise HomomorphismError(f"{h} does not match the summand lattices")
        for x in range(S.size):
            y = et[h(x)]
            if mapping[es[x]] is not None and mapping[es[x]] != y:
                raise HomomorphismError(f"{h.name}: glue point not preserved")
            mapping[es[x]] = y
    return validate_hom(source, target, mapping, "+".join(h.name for h in hs))
