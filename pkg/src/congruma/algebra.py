"""Finite algebras given by operation tables.

Elements of an algebra of size ``n`` are the integers ``0..n-1``; labels are
only used for presentation.  Every operation is stored as a flat row-major
table of ``n**arity`` entries, nullary operations as one-entry tables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class AlgebraError(ValueError):
    """Raised when an algebra, lattice or map is malformed."""


class NotALatticeError(AlgebraError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class OperationTable:
    name: str
    arity: int
    table: tuple[int, ...]

    @cached_property
    def array(self) -> np.ndarray:
        if self.arity == 0:
            return np.asarray(self.table, dtype=np.int64)
        n = round(len(self.table) ** (1.0 / self.arity))
        arr = np.asarray(self.table, dtype=np.int64).reshape((n,) * self.arity)
        arr.setflags(write=False)
        return arr

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise TypeError(f"{self.name} takes {self.arity} arguments, got {len(args)}")
        if self.arity == 0:
            return self.table[0]
        return int(self.array[args])


@dataclass(frozen=True)
class FiniteAlgebra:
    name: str
    size: int
    ops: tuple[OperationTable, ...]
    labels: tuple[str, ...] | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError(f"algebra {self.name!r}: carrier must be non-empty")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise AlgebraError(f"algebra {self.name!r}: {len(self.labels)} labels for {self.size} elements")
            if len(set(self.labels)) != self.size:
                dup = next(l for l in self.labels if self.labels.count(l) > 1)
                raise AlgebraError(f"algebra {self.name!r}: duplicate label {dup!r}")
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise AlgebraError(f"algebra {self.name!r}: duplicate operation names")
        n = self.size
        for op in self.ops:
            if op.arity < 0:
                raise AlgebraError(f"op {op.name!r}: negative arity")
            if len(op.table) != n ** op.arity:
                raise AlgebraError(
                    f"op {op.name!r}: expected {n ** op.arity} entries for arity {op.arity}, got {len(op.table)}")
            t = np.asarray(op.table, dtype=np.int64)
            bad = np.flatnonzero((t < 0) | (t >= n))
            if bad.size:
                pos = int(bad[0])
                tup = _unravel(pos, n, op.arity)
                raise AlgebraError(f"op {op.name!r}: entry {op.table[pos]} at {tup} out of range [0, {n})")

    @property
    def elements(self) -> range:
        return range(self.size)

    def op(self, name: str) -> OperationTable:
        for o in self.ops:
            if o.name == name:
                return o
        raise KeyError(f"algebra {self.name!r} has no operation {name!r}")

    def has_op(self, name: str) -> bool:
        return any(o.name == name for o in self.ops)

    @property
    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple((o.name, o.arity) for o in self.ops)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def index_of(self, label: str) -> int:
        if self.labels is not None:
            try:
                return self.labels.index(label)
            except ValueError:
                pass
        if label.isdigit() and int(label) < self.size and self.labels is None:
            return int(label)
        raise KeyError(f"algebra {self.name!r} has no element {label!r}")

    def cached(self, key, compute):
        # write-once: concurrent computations may race but store equal values
        try:
            return self._cache[key]
        except KeyError:
            return self._cache.setdefault(key, compute())

    def __str__(self):
        return f"{self.name} (|A|={self.size}, ops={','.join(f'{n}/{a}' for n, a in self.signature)})"


def _unravel(pos, n, arity):
    out = []
    for _ in range(arity):
        pos, r = divmod(pos, n)
        out.append(r)
    return tuple(reversed(out))


def _flatten_table(raw, n, arity, opname):
    if arity == 0:
        if isinstance(raw, (list, tuple)):
            flat = list(np.asarray(raw).reshape(-1))
        else:
            flat = [raw]
        if len(flat) != 1:
            raise AlgebraError(f"op {opname!r}: nullary table must have one entry")
        return tuple(int(v) for v in flat)
    arr = np.asarray(raw)
    if arr.ndim == 1:
        flat = arr
    else:
        if arr.shape != (n,) * arity:
            raise AlgebraError(f"op {opname!r}: table shape {arr.shape} does not match arity {arity}")
        flat = arr.reshape(-1)
    if np.issubdtype(flat.dtype, np.integer):
        return tuple(flat.tolist())
    return tuple(int(v) for v in flat)


def build_algebra(name: str, size: int, ops, labels: Sequence[str] | None = None) -> FiniteAlgebra:
    """Build an algebra from ``ops``, a list of ``(name, arity, table)`` triples.

    Tables may be nested (``table[a][b]``) or flat row-major.  Nullary tables
    may be a bare integer.
    """
    tables = []
    for entry in ops:
        if isinstance(entry, OperationTable):
            tables.append(entry)
            continue
        opname, arity, raw = entry
        tables.append(OperationTable(opname, int(arity), _flatten_table(raw, size, int(arity), opname)))
    return FiniteAlgebra(name, size, tuple(tables), tuple(labels) if labels is not None else None)


# ---------------------------------------------------------------- lattices

LATTICE_SIGNATURE = (("join", 2), ("meet", 2), ("zero", 0), ("one", 0))


@dataclass(frozen=True)
class BoundedLatticeSpec:
    labels: tuple[str, ...]
    covers: frozenset[tuple[str, str]]
    bottom: str
    top: str
    name: str = "L"


def _order_closure(n, covers):
    leq = np.eye(n, dtype=bool)
    for lo, hi in covers:
        leq[lo, hi] = True
    for k in range(n):
        leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
    return leq


def lattice_from_order(name, labels, leq: np.ndarray, extra_ops=()) -> FiniteAlgebra:
    """Bounded lattice from a reflexive, transitive, antisymmetric relation."""
    n = len(labels)
    if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
        a, b = map(int, np.argwhere(leq & leq.T & ~np.eye(n, dtype=bool))[0])
        raise NotALatticeError(f"order has a cycle through {labels[a]} and {labels[b]}", (labels[a], labels[b]))
    bottoms = [i for i in range(n) if leq[i].all()]
    tops = [i for i in range(n) if leq[:, i].all()]
    if not bottoms or not tops:
        raise NotALatticeError(f"{name}: no {'bottom' if not bottoms else 'top'} element")
    join = np.empty((n, n), dtype=np.int64)
    meet = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a, n):
            ub = np.flatnonzero(leq[a] & leq[b])
            least = [u for u in ub if leq[u, ub].all()]
            if len(least) != 1:
                raise NotALatticeError(f"{name}: {labels[a]} and {labels[b]} have no least upper bound",
                                       (labels[a], labels[b]))
            lb = np.flatnonzero(leq[:, a] & leq[:, b])
            greatest = [u for u in lb if leq[lb, u].all()]
            if len(greatest) != 1:
                raise NotALatticeError(f"{name}: {labels[a]} and {labels[b]} have no greatest lower bound",
                                       (labels[a], labels[b]))
            join[a, b] = join[b, a] = least[0]
            meet[a, b] = meet[b, a] = greatest[0]
    alg = build_algebra(name, n, [("join", 2, join), ("meet", 2, meet),
                                  ("zero", 0, bottoms[0]), ("one", 0, tops[0]), *extra_ops], labels)
    if n <= 12:
        check_lattice_laws(alg)
    return alg


def lattice_from_covers(spec: BoundedLatticeSpec) -> FiniteAlgebra:
    labels = tuple(spec.labels)
    if len(set(labels)) != len(labels):
        raise AlgebraError(f"lattice {spec.name!r}: duplicate labels")
    pos = {l: i for i, l in enumerate(labels)}
    try:
        covers = [(pos[a], pos[b]) for a, b in spec.covers]
        bottom, top = pos[spec.bottom], pos[spec.top]
    except KeyError as exc:
        raise AlgebraError(f"lattice {spec.name!r}: unknown element {exc.args[0]!r}") from None
    leq = _order_closure(len(labels), covers)
    if not leq[bottom].all():
        raise NotALatticeError(f"lattice {spec.name!r}: {spec.bottom} is not the least element")
    if not leq[:, top].all():
        raise NotALatticeError(f"lattice {spec.name!r}: {spec.top} is not the greatest element")
    return lattice_from_order(spec.name, labels, leq)


def lattice(name: str, labels: Iterable[str], covers: str | Iterable[tuple[str, str]],
            bottom: str | None = None, top: str | None = None) -> FiniteAlgebra:
    """Shorthand: ``covers`` may be a string like ``"0<x 0<y x<1 y<1"``."""
    labels = tuple(labels)
    if isinstance(covers, str):
        covers = [tuple(c.split("<")) for c in covers.replace(";", " ").split()]
    return lattice_from_covers(BoundedLatticeSpec(
        labels, frozenset((a.strip(), b.strip()) for a, b in covers),
        bottom if bottom is not None else labels[0],
        top if top is not None else labels[-1], name))


def chain(n: int, name: str | None = None) -> FiniteAlgebra:
    labels = [str(i) for i in range(n)]
    return lattice(name or f"L{n}", labels, [(labels[i], labels[i + 1]) for i in range(n - 1)])


def is_lattice(A: FiniteAlgebra) -> bool:
    return A.signature[:4] == LATTICE_SIGNATURE


def lattice_order(A: FiniteAlgebra) -> np.ndarray:
    """``leq[a, b]`` iff ``a <= b``, read off the join table."""
    join = A.op("join").array
    return join == np.arange(A.size)[None, :]


def covering_pairs(leq: np.ndarray) -> list[tuple[int, int]]:
    n = leq.shape[0]
    lt = leq & ~np.eye(n, dtype=bool)
    out = []
    for a, b in zip(*np.nonzero(lt)):
        between = lt[a] & lt[:, b]
        if not between.any():
            out.append((int(a), int(b)))
    return sorted(out)


def check_lattice_laws(A: FiniteAlgebra) -> None:
    j, m = A.op("join").array, A.op("meet").array
    idx = np.arange(A.size)
    for name, op in (("join", j), ("meet", m)):
        if not (op == op.T).all():
            raise NotALatticeError(f"{A.name}: {name} is not commutative")
        if not (op[idx, idx] == idx).all():
            raise NotALatticeError(f"{A.name}: {name} is not idempotent")
        # (a.b).c == a.(b.c) over all triples
        if not (op[op[:, :, None], idx[None, None, :]] == op[idx[:, None, None], op[None, :, :]]).all():
            raise NotALatticeError(f"{A.name}: {name} is not associative")
    if not (j[idx[:, None], m] == idx[:, None]).all() or not (m[idx[:, None], j] == idx[:, None]).all():
        raise NotALatticeError(f"{A.name}: absorption fails")


# ----------------------------------------------------------- subalgebras

def closure(A: FiniteAlgebra, seed: Iterable[int]) -> list[int]:
    """Smallest subset containing ``seed`` and closed under all operations."""
    inside = np.zeros(A.size, dtype=bool)
    for s in seed:
        inside[s] = True
    for op in A.ops:
        if op.arity == 0:
            inside[op.table[0]] = True
    while True:
        current = np.flatnonzero(inside)
        new = inside.copy()
        for op in A.ops:
            if op.arity == 0:
                continue
            sub = op.array[np.ix_(*([current] * op.arity))]
            new[sub.reshape(-1)] = True
        if (new == inside).all():
            return [int(x) for x in current]
        inside = new


@dataclass(frozen=True)
class Subalgebra:
    carrier: tuple[int, ...]
    algebra: FiniteAlgebra
    inclusion: tuple[int, ...]   # subalgebra index -> parent index

    def index_in_sub(self, parent_index: int) -> int:
        return self.carrier.index(parent_index)


def induced_subalgebra(A: FiniteAlgebra, carrier: Sequence[int], name: str | None = None) -> FiniteAlgebra:
    carrier = list(carrier)
    pos = {x: i for i, x in enumerate(carrier)}
    ops = []
    for op in A.ops:
        if op.arity == 0:
            ops.append((op.name, 0, pos[op.table[0]]))
            continue
        sub = op.array[np.ix_(*([np.asarray(carrier)] * op.arity))]
        try:
            ops.append((op.name, op.arity, [pos[int(v)] for v in sub.reshape(-1)]))
        except KeyError:
            raise AlgebraError(f"subset is not closed under {op.name!r}") from None
    labels = [A.label(x) for x in carrier] if A.labels is not None else None
    return build_algebra(name or f"{A.name}_sub", len(carrier), ops, labels)


def subalgebra_generate(A: FiniteAlgebra, seed: Iterable[int], name: str | None = None) -> Subalgebra:
    seed = list(seed)
    if not seed:
        raise AlgebraError("seed must be non-empty")
    carrier = closure(A, seed)
    # keep labels of the parent even when it had none, so elements stay identifiable
    sub = induced_subalgebra(A, carrier, name)
    if A.labels is None:
        sub = FiniteAlgebra(sub.name, sub.size, sub.ops, tuple(str(x) for x in carrier))
    return Subalgebra(tuple(carrier), sub, tuple(carrier))


def square_algebra(A: FiniteAlgebra):
    """Direct square ``A x A``; returns the algebra and the pair list (index -> pair)."""
    pairs = list(itertools.product(range(A.size), repeat=2))
    return product_on_tuples(f"{A.name}^2", [A, A], pairs), pairs


def product_on_tuples(name, factors, tuples) -> FiniteAlgebra:
    """Subalgebra of the direct product of ``factors`` on the closed tuple list ``tuples``."""
    sizes = [F.size for F in factors]
    index = {t: i for i, t in enumerate(tuples)}
    tup_arr = np.asarray(tuples, dtype=np.int64).reshape(len(tuples), len(factors))
    strides = np.cumprod([1] + sizes[::-1][:-1])[::-1]
    ops = []
    for k, (opname, arity) in enumerate(factors[0].signature):
        comps = []
        for fi, F in enumerate(factors):
            op = F.ops[k]
            if arity == 0:
                comps.append(np.asarray(op.table[0]))
            else:
                grids = np.meshgrid(*([tup_arr[:, fi]] * arity), indexing="ij")
                comps.append(op.array[tuple(grids)])
        if arity == 0:
            t = tuple(int(c) for c in comps)
            if t not in index:
                raise AlgebraError(f"{name}: tuple set does not contain the constant {opname!r}")
            ops.append((opname, 0, index[t]))
        else:
            code = sum(c * s for c, s in zip(comps, strides))
            lookup = np.full(int(np.prod(sizes)), -1, dtype=np.int64)
            lookup[tup_arr @ strides] = np.arange(len(tuples))
            out = lookup[code].reshape(-1)
            if (out < 0).any():
                raise AlgebraError(f"{name}: tuple set not closed under {opname!r}")
            ops.append((opname, arity, out))
    labels = ["(" + ",".join(F.label(x) for F, x in zip(factors, t)) + ")" for t in tuples]
    return build_algebra(name, len(tuples), ops, labels)
