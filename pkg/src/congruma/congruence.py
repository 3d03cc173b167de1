"""Partitions of a finite carrier, generated congruences and the lattice Con(A)."""
from __future__ import annotations

import contextlib
import contextvars
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra

DEFAULT_CAP = 20
_cap_override = contextvars.ContextVar("element_cap", default=None)


class ElementCapError(AlgebraError):
    """Enumeration refused because the algebra is larger than the element cap."""


def current_cap() -> int:
    cap = _cap_override.get()
    if cap is not None:
        return cap
    env = os.environ.get("CONGRUMA_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise AlgebraError(f"CONGRUMA_CAP must be an integer, got {env!r}") from None
    return DEFAULT_CAP


@contextlib.contextmanager
def element_cap(n: int):
    token = _cap_override.set(int(n))
    try:
        yield
    finally:
        _cap_override.reset(token)


def _check_cap(A: FiniteAlgebra):
    cap = current_cap()
    if A.size > cap:
        raise ElementCapError(
            f"{A.name} has {A.size} elements, above the element cap {cap} "
            f"(raise it with --cap or CONGRUMA_CAP)")


# ---------------------------------------------------------------- partitions

def _normalize(assignment: Sequence[int]) -> tuple[int, ...]:
    seen = {}
    out = []
    for v in assignment:
        out.append(seen.setdefault(v, len(seen)))
    return tuple(out)


@dataclass(frozen=True, order=True)
class Partition:
    """Equivalence relation as a block vector; blocks are numbered by least member."""

    blocks: tuple[int, ...]

    @classmethod
    def from_assignment(cls, assignment) -> "Partition":
        if isinstance(assignment, np.ndarray):
            return cls(_normalize(assignment.reshape(-1).tolist()))
        return cls(_normalize([int(v) for v in assignment]))

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        assign = list(range(n))
        seen = set()
        for block in blocks:
            block = list(block)
            for x in block:
                if not 0 <= x < n:
                    raise AlgebraError(f"element {x} outside carrier of size {n}")
                if x in seen:
                    raise AlgebraError(f"element {x} occurs in two blocks")
                seen.add(x)
            if block:
                m = min(block)
                for x in block:
                    assign[x] = m
        return cls.from_assignment(assign)

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def total(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @property
    def size(self) -> int:
        return len(self.blocks)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.asarray(self.blocks, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def least_labels(self) -> np.ndarray:
        a = np.asarray(self.representatives(), dtype=np.int64)[self.array]
        a.setflags(write=False)
        return a

    @property
    def num_blocks(self) -> int:
        return max(self.blocks) + 1 if self.blocks else 0

    def classes(self) -> list[list[int]]:
        out = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.blocks):
            out[b].append(x)
        return out

    def representatives(self) -> list[int]:
        """Least element of each block, in block order."""
        reps = [-1] * self.num_blocks
        for x, b in enumerate(self.blocks):
            if reps[b] < 0:
                reps[b] = x
        return reps

    def related(self, a: int, b: int) -> bool:
        return self.blocks[a] == self.blocks[b]

    def is_discrete(self) -> bool:
        return self.num_blocks == self.size

    def is_total(self) -> bool:
        return self.num_blocks <= 1

    def refines(self, other: "Partition") -> bool:
        """``self`` is contained in ``other`` as a relation."""
        _same_carrier(self, other)
        o = other.array
        reps = self.array
        first = np.asarray(self.representatives())
        return bool((o == o[first[reps]]).all())

    def pairs(self, strict: bool = True) -> list[tuple[int, int]]:
        out = []
        for cls in self.classes():
            for i, a in enumerate(cls):
                for b in cls[i + 1 if strict else i:]:
                    out.append((a, b))
        return out

    def render(self, A: FiniteAlgebra | None = None) -> str:
        lab = A.label if A is not None else str
        return "{" + ",".join("{" + ",".join(lab(x) for x in c) + "}" for c in self.classes()) + "}"

    def __str__(self):
        return self.render()


def _same_carrier(p: Partition, q: Partition):
    if p.size != q.size:
        raise AlgebraError(f"partitions over carriers of size {p.size} and {q.size}")


def partition_meet(p: Partition, q: Partition) -> Partition:
    _same_carrier(p, q)
    return Partition.from_assignment(p.array * q.num_blocks + q.array)


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def labels(self) -> np.ndarray:
        # pointer jumping; roots are the least members, so labels are roots
        p = np.asarray(self.parent, dtype=np.int64)
        while True:
            q = p[p]
            if (q == p).all():
                return p
            p = q


def _least_labels(p: Partition) -> np.ndarray:
    """Each element's label is the least member of its block."""
    return p.least_labels


def _hook(lab: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coarsen least-member labels ``lab`` by identifying a[i] with b[i].

    Min-label hooking with pointer jumping, so the result again labels every
    element by the least member of its class.
    """
    r = np.arange(lab.size)
    ra, rb = lab[a], lab[b]
    while True:
        ka, kb = r[ra], r[rb]
        diff = ka != kb
        if not diff.any():
            return r[lab]
        ka, kb = ka[diff], kb[diff]
        m = np.minimum(ka, kb)
        np.minimum.at(r, ka, m)
        np.minimum.at(r, kb, m)
        while True:
            q = r[r]
            if (q == r).all():
                break
            r = q


def partition_join_closure(p: Partition, q: Partition) -> Partition:
    _same_carrier(p, q)
    return Partition.from_assignment(_hook(_least_labels(p), np.arange(q.size), _least_labels(q)))


def join_all(parts: Sequence[Partition], n: int) -> Partition:
    out = Partition.discrete(n)
    for p in parts:
        out = partition_join_closure(out, p)
    return out


def meet_all(parts: Sequence[Partition], n: int) -> Partition:
    out = Partition.total(n)
    for p in parts:
        out = partition_meet(out, p)
    return out


# --------------------------------------------------------------- congruences

def is_congruence(A: FiniteAlgebra, p: Partition) -> bool:
    if p.size != A.size:
        return False
    lab = p.array
    rep = np.asarray(p.representatives())[lab]
    for op in A.ops:
        if op.arity == 0:
            continue
        out = lab[op.array]
        for slot in range(op.arity):
            # changing one argument inside its block must not change the output block
            if not (np.take(out, rep, axis=slot) == out).all():
                return False
    return True


def _slot_matrices(A: FiniteAlgebra) -> list[np.ndarray]:
    """One (n, n**(k-1)) table per operation slot: row x lists every value with x
    in that slot.  Identical slots (commutative operations) are kept once."""
    def compute():
        mats = []
        for op in A.ops:
            for slot in range(op.arity):
                m = np.ascontiguousarray(np.moveaxis(op.array, slot, 0).reshape(A.size, -1))
                if not any(m.shape == q.shape and (m == q).all() for q in mats):
                    mats.append(m)
        return mats
    return A.cached("slot_matrices", compute)


def _closures(A: FiniteAlgebra, seed_rows: Sequence[np.ndarray]) -> np.ndarray:
    """Least-member labels of Cg(seeds) for every (k, 2) seed array, one row each.

    Rows are disjoint copies of the carrier in one flat label array, so all
    closures advance together.  Each round identifies the current pairs, then
    feeds every basic translate of the (old root, new root) pairs into the
    next round.
    """
    n, R = A.size, len(seed_rows)
    mats = _slot_matrices(A)
    ident = np.arange(R * n)
    lab = ident.copy()
    counts = [len(s) for s in seed_rows]
    seeds = np.concatenate(seed_rows) if R else np.zeros((0, 2), dtype=np.int64)
    off = np.repeat(np.arange(R) * n, counts)
    xs, ys = seeds[:, 0] + off, seeds[:, 1] + off
    while xs.size:
        new = _hook(lab, xs, ys)
        moved = np.flatnonzero((lab == ident) & (new != lab))
        lab = new
        if not moved.size:
            break
        base = (moved - moved % n)[:, None]
        x, y = moved % n, lab[moved] % n
        us, vs = [], []
        for m in mats:
            u, v = lab[(m[x] + base).reshape(-1)], lab[(m[y] + base).reshape(-1)]
            keep = u != v
            if keep.any():
                us.append(u[keep])
                vs.append(v[keep])
        if not us:
            break
        xs, ys = np.concatenate(us), np.concatenate(vs)
    return lab.reshape(R, n) - (np.arange(R) * n)[:, None]


def cg_generated(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Partition:
    """Least congruence containing ``pairs``."""
    n = A.size
    seeds = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    if seeds.size and (seeds.min() < 0 or seeds.max() >= n):
        a, b = next((a, b) for a, b in seeds.tolist() if not (0 <= a < n and 0 <= b < n))
        raise AlgebraError(f"pair ({a},{b}) outside carrier of size {n}")
    return Partition.from_assignment(_closures(A, [seeds])[0])


def principal(A: FiniteAlgebra, a: int, b: int) -> Partition:
    return A.cached(("cg", min(a, b), max(a, b)), lambda: cg_generated(A, [(a, b)]))


def _all_principals(A: FiniteAlgebra) -> dict[tuple[int, int], Partition]:
    n = A.size
    todo = [(a, b) for a in range(n) for b in range(a + 1, n) if ("cg", a, b) not in A._cache]
    # chunk so one round's translate arrays stay around a million entries
    step = max(1, 1_000_000 // (n * n * max(1, len(_slot_matrices(A)))))
    for i in range(0, len(todo), step):
        chunk = todo[i:i + step]
        rows = _closures(A, [np.array([p], dtype=np.int64) for p in chunk])
        for (a, b), row in zip(chunk, rows):
            A.cached(("cg", a, b), lambda row=row: Partition.from_assignment(row))
    return {(a, b): principal(A, a, b) for a in range(n) for b in range(a + 1, n)}


def require_congruence(A: FiniteAlgebra, p: Partition, what: str = "partition"):
    if not is_congruence(A, p):
        raise AlgebraError(f"{what} {p.render(A) if p.size == A.size else p} is not a congruence of {A.name}")


class CongruenceLattice:
    """Con(A): canonical sorted congruence list with order and lattice tables."""

    def __init__(self, algebra: FiniteAlgebra, congruences: list[Partition],
                 principal_pairs: dict[tuple[int, int], Partition]):
        self.algebra = algebra
        self.congruences = tuple(sorted(congruences))
        self.index = {c: i for i, c in enumerate(self.congruences)}
        n = algebra.size
        self.principal = {}
        for (a, b), p in principal_pairs.items():
            self.principal[(a, b)] = self.principal[(b, a)] = self.index[p]
        for a in range(n):
            self.principal[(a, a)] = self.index[Partition.discrete(n)]
        m = len(self.congruences)
        arr = np.stack([c.array for c in self.congruences])
        leq = np.zeros((m, m), dtype=bool)
        for i, c in enumerate(self.congruences):
            # c <= d iff d is constant on every block of c
            reps = np.asarray(c.representatives())[c.array]
            leq[i] = (arr == arr[:, reps]).all(axis=1)
        self.leq = leq
        self.leq.setflags(write=False)
        self.join_table = self._table(np.minimum)
        self.meet_table = self._table(np.maximum)

    def _table(self, pick):
        # join = least upper bound via the order; ties impossible in a lattice
        m = len(self.congruences)
        leq = self.leq
        counts = leq.sum(axis=0)   # number of elements below; larger = higher
        tab = np.empty((m, m), dtype=np.int64)
        for i in range(m):
            for j in range(i, m):
                if pick is np.minimum:
                    cand = np.flatnonzero(leq[i] & leq[j])
                    k = cand[np.argmin(counts[cand])]
                else:
                    cand = np.flatnonzero(leq[:, i] & leq[:, j])
                    k = cand[np.argmax(counts[cand])]
                tab[i, j] = tab[j, i] = k
        tab.setflags(write=False)
        return tab

    def __len__(self):
        return len(self.congruences)

    def __iter__(self):
        return iter(self.congruences)

    def __getitem__(self, i) -> Partition:
        return self.congruences[i]

    def index_of(self, p: Partition) -> int:
        try:
            return self.index[p]
        except KeyError:
            raise AlgebraError(f"{p.render(self.algebra)} is not a congruence of {self.algebra.name}") from None

    @property
    def bottom(self) -> int:
        return self.index[Partition.discrete(self.algebra.size)]

    @property
    def top(self) -> int:
        return self.index[Partition.total(self.algebra.size)]

    def principal_indices(self) -> list[int]:
        return sorted(set(self.principal.values()))

    def join(self, i, j) -> int:
        return int(self.join_table[i, j])

    def meet(self, i, j) -> int:
        return int(self.meet_table[i, j])

    def above(self, i) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.leq[i])]

    def covers(self) -> list[tuple[int, int]]:
        from .algebra import covering_pairs
        return covering_pairs(self.leq)

    def render(self, i) -> str:
        return self.congruences[i].render(self.algebra)


def enumerate_con(A: FiniteAlgebra) -> CongruenceLattice:
    _check_cap(A)
    return A.cached("con", lambda: _enumerate(A))


def _enumerate(A):
    n = A.size
    principals = _all_principals(A)
    gens = sorted(set(principals.values()))
    found = {Partition.discrete(n)}
    found.update(gens)
    queue = list(found)
    while queue:
        c = queue.pop()
        for g in gens:
            j = partition_join_closure(c, g)
            if j not in found:
                found.add(j)
                queue.append(j)
    con = CongruenceLattice(A, list(found), principals)
    for i in range(len(con)):
        for j in range(i + 1, len(con)):
            if partition_meet(con[i], con[j]) not in con.index:
                raise AlgebraError(f"{A.name}: congruences are not closed under intersection")
    return con


def _law_holds(join, meet, modular_only):
    m = join.shape[0]
    x = np.arange(m)[:, None, None]
    y = np.arange(m)[None, :, None]
    z = np.arange(m)[None, None, :]
    lhs = meet[x, join[y, z]]
    rhs = join[meet[x, y], meet[x, z]]
    if modular_only:
        # only triples with z <= x, encoded as meet(x,z)==z
        mask = meet[x, z] == z
        return bool((lhs == rhs)[np.broadcast_to(mask, lhs.shape)].all())
    return bool((lhs == rhs).all())


def con_is_distributive(con: CongruenceLattice) -> bool:
    return _law_holds(con.join_table, con.meet_table, False)


def con_is_modular(con: CongruenceLattice) -> bool:
    return _law_holds(con.join_table, con.meet_table, True)
