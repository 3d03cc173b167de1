"""Homomorphisms between finite algebras: validation, preimages, kernels, images."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, induced_subalgebra
from .congruence import Partition, cg_generated, require_congruence


class HomomorphismError(AlgebraError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    mapping: tuple[int, ...]
    name: str = "f"
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def cached(self, key, compute):
        try:
            return self._cache[key]
        except KeyError:
            return self._cache.setdefault(key, compute())

    def renamed(self, name: str) -> "Homomorphism":
        return Homomorphism(self.source, self.target, self.mapping, name)

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    @cached_property
    def array(self) -> np.ndarray:
        a = np.asarray(self.mapping, dtype=np.int64)
        a.setflags(write=False)
        return a

    @property
    def is_injective(self) -> bool:
        return len(set(self.mapping)) == self.source.size

    @property
    def is_surjective(self) -> bool:
        return len(set(self.mapping)) == self.target.size

    def render(self) -> str:
        pairs = " ; ".join(f"{self.source.label(x)} -> {self.target.label(y)}" for x, y in enumerate(self.mapping))
        return f"hom {self.name} : {self.source.name} -> {self.target.name}\nmap {pairs}\n"

    def __str__(self):
        return f"{self.name}: {self.source.name} -> {self.target.name}"


def validate_hom(source: FiniteAlgebra, target: FiniteAlgebra, mapping: Sequence[int], name: str = "f") -> Homomorphism:
    mapping = tuple(int(v) for v in mapping)
    if len(mapping) != source.size:
        raise HomomorphismError(f"{name}: map has {len(mapping)} entries, source has {source.size} elements")
    for x, y in enumerate(mapping):
        if not 0 <= y < target.size:
            raise HomomorphismError(f"{name}: image of {source.label(x)} out of range")
    if source.signature != target.signature:
        raise HomomorphismError(f"{name}: signatures differ ({source.signature} vs {target.signature})")
    m = np.asarray(mapping, dtype=np.int64)
    for opA, opB in zip(source.ops, target.ops):
        if opA.arity == 0:
            if m[opA.table[0]] != opB.table[0]:
                raise HomomorphismError(
                    f"{name}: constant {opA.name} not preserved "
                    f"({source.label(opA.table[0])} -> {target.label(int(m[opA.table[0]]))})", (opA.name, ()))
            continue
        lhs = m[opA.array]
        rhs = opB.array[np.ix_(*([m] * opA.arity))]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            args = tuple(int(v) for v in bad[0])
            shown = ",".join(source.label(a) for a in args)
            raise HomomorphismError(f"{name}: {opA.name}({shown}) not preserved", (opA.name, args))
    return Homomorphism(source, target, mapping, name)


def hom_from_labels(source, target, pairs: dict[str, str], name="f") -> Homomorphism:
    mapping = [None] * source.size
    for a, b in pairs.items():
        mapping[source.index_of(a)] = target.index_of(b)
    missing = [source.label(i) for i, v in enumerate(mapping) if v is None]
    if missing:
        raise HomomorphismError(f"{name}: no image for {', '.join(missing)}")
    return validate_hom(source, target, mapping, name)


def identity(A: FiniteAlgebra) -> Homomorphism:
    return Homomorphism(A, A, tuple(range(A.size)), f"id_{A.name}")


def compose(g: Homomorphism, f: Homomorphism) -> Homomorphism:
    """``g o f``: apply f first."""
    if f.target is not g.source and f.target != g.source:
        raise HomomorphismError(f"cannot compose {g} after {f}")
    return Homomorphism(f.source, g.target, tuple(g.mapping[y] for y in f.mapping), f"{g.name}.{f.name}")


def preimage(f: Homomorphism, beta: Partition) -> Partition:
    require_congruence(f.target, beta, "beta")
    return Partition.from_assignment(beta.array[f.array])


def preimage_unchecked(f: Homomorphism, beta: Partition) -> Partition:
    return Partition.from_assignment(beta.array[f.array])


def kernel(f: Homomorphism) -> Partition:
    return Partition.from_assignment(f.array)


def image_pairs(f: Homomorphism, theta: Partition) -> list[tuple[int, int]]:
    return sorted({(f(a), f(b)) for a, b in theta.pairs()})


def pushforward_cg(f: Homomorphism, theta: Partition, check: bool = True) -> Partition:
    """Congruence of the target generated by the image of theta."""
    if check:
        require_congruence(f.source, theta, "theta")
    return cg_generated(f.target, image_pairs(f, theta))


@dataclass(frozen=True)
class ImageFactorization:
    image: FiniteAlgebra
    surjection: Homomorphism
    embedding: Homomorphism


def image_algebra(f: Homomorphism) -> ImageFactorization:
    carrier = sorted(set(f.mapping))
    img = induced_subalgebra(f.target, carrier, f"{f.name}({f.source.name})")
    pos = {y: i for i, y in enumerate(carrier)}
    surj = Homomorphism(f.source, img, tuple(pos[y] for y in f.mapping), f"{f.name}_onto")
    emb = Homomorphism(img, f.target, tuple(carrier), f"{f.name}_incl")
    return ImageFactorization(img, surj, emb)


def find_homomorphisms(A: FiniteAlgebra, B: FiniteAlgebra, limit: int | None = None) -> list[Homomorphism]:
    """All homomorphisms A -> B by backtracking over element assignments.

    Constants are fixed first; a partial map is pruned as soon as some operation
    entry with all arguments and result assigned is violated.
    """
    if A.signature != B.signature:
        return []
    n = A.size
    fixed = {}
    for opA, opB in zip(A.ops, B.ops):
        if opA.arity == 0:
            a, b = opA.table[0], opB.table[0]
            if fixed.get(a, b) != b:
                return []
            fixed[a] = b
    binary = [(opA.array, opB.array) for opA, opB in zip(A.ops, B.ops) if opA.arity == 2]
    unary = [(opA.array, opB.array) for opA, opB in zip(A.ops, B.ops) if opA.arity == 1]
    if any(op.arity > 2 for op in A.ops):
        raise HomomorphismError("search supports operations of arity at most 2")
    order = sorted(fixed) + [x for x in range(n) if x not in fixed]
    rank = {x: i for i, x in enumerate(order)}
    # entries become checkable once all of x, y and op(x,y) are assigned
    checks = [[] for _ in range(n)]
    for k, (ta, _) in enumerate(binary):
        for x in range(n):
            for y in range(n):
                z = int(ta[x, y])
                last = max((x, y, z), key=rank.__getitem__)
                checks[last].append((k, x, y, z))
    for k, (ta, _) in enumerate(unary):
        for x in range(n):
            z = int(ta[x])
            last = max((x, z), key=rank.__getitem__)
            checks[last].append((-1 - k, x, x, z))
    out = []
    m = [-1] * n

    def ok(x):
        for k, a, b, z in checks[x]:
            if k >= 0:
                if binary[k][1][m[a], m[b]] != m[z]:
                    return False
            elif unary[-1 - k][1][m[a]] != m[z]:
                return False
        return True

    def go(i):
        if limit is not None and len(out) >= limit:
            return
        if i == n:
            out.append(Homomorphism(A, B, tuple(m), f"h{len(out)}"))
            return
        x = order[i]
        for v in ([fixed[x]] if x in fixed else range(B.size)):
            m[x] = v
            if ok(x):
                go(i + 1)
        m[x] = -1

    go(0)
    return out
