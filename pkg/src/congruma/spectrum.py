"""Commutators, prime spectra, Stone-topology closed sets, radicals and m-systems."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, product_on_tuples
from .congruence import (CongruenceLattice, Partition, _UnionFind, cg_generated, con_is_distributive,
                         enumerate_con, is_congruence, meet_all, partition_meet, require_congruence)

STRATEGIES = ("meet", "delta")


class StrategyError(AlgebraError):
    """The meet strategy was requested on an algebra whose Con is not distributive."""


def _normalize_strategy(strategy):
    if strategy in ("delta-construction", "delta"):
        return "delta"
    if strategy != "meet":
        raise AlgebraError(f"unknown commutator strategy {strategy!r} (use meet or delta)")
    return "meet"


def _distributive(A):
    return A.cached("con-distributive", lambda: con_is_distributive(enumerate_con(A)))


def _alpha_algebra(A, alpha):
    """Subalgebra of A x A on the pairs of alpha, with its pair index."""
    pairs = alpha.pairs(strict=False)
    pairs = sorted(set(pairs) | {(b, a) for a, b in pairs})
    return pairs, product_on_tuples(f"{A.name}(alpha)", [A, A], pairs), {p: i for i, p in enumerate(pairs)}


def delta_commutator(A: FiniteAlgebra, alpha: Partition, beta: Partition) -> Partition:
    """Commutator through the subalgebra A(alpha) of A x A whose carrier is alpha."""
    pairs, Aa, pos = A.cached(("alpha_algebra", alpha), lambda: _alpha_algebra(A, alpha))
    seeds = [(pos[(b, b)], pos[(c, c)]) for b, c in beta.pairs()]
    big = cg_generated(Aa, seeds)
    uf = _UnionFind(A.size)
    for a, c in pairs:
        if big.related(pos[(a, c)], pos[(c, c)]):
            uf.union(a, c)
    result = Partition.from_assignment(uf.labels())
    # the relation read off must already be an equivalence
    for a, c in result.pairs():
        if not big.related(pos[(a, c)], pos[(c, c)]):
            raise AlgebraError(f"{A.name}: delta construction did not yield an equivalence")
    return result


def commutator(A: FiniteAlgebra, alpha: Partition, beta: Partition, strategy: str = "meet") -> Partition:
    strategy = _normalize_strategy(strategy)
    require_congruence(A, alpha, "alpha")
    require_congruence(A, beta, "beta")
    if strategy == "meet":
        if not _distributive(A):
            raise StrategyError(f"Con({A.name}) is not distributive; use the delta strategy")
        return partition_meet(alpha, beta)
    return A.cached(("comm", alpha, beta) if alpha <= beta else ("comm", beta, alpha),
                    lambda: delta_commutator(A, alpha, beta))


def commutator_index(A: FiniteAlgebra, i: int, j: int, strategy: str = "meet") -> int:
    con = enumerate_con(A)
    strategy = _normalize_strategy(strategy)
    if strategy == "meet":
        if not _distributive(A):
            raise StrategyError(f"Con({A.name}) is not distributive; use the delta strategy")
        return con.meet(i, j)
    return con.index_of(commutator(A, con[i], con[j], "delta"))


def _principal_commutators(A, strategy):
    """Matrix over the distinct principal indices: commutator result index."""
    def compute():
        con = enumerate_con(A)
        prin = con.principal_indices()
        tab = np.empty((len(prin), len(prin)), dtype=np.int64)
        for a, i in enumerate(prin):
            for b in range(a, len(prin)):
                tab[a, b] = tab[b, a] = commutator_index(A, i, prin[b], strategy)
        return prin, tab
    return A.cached(("principal-comm", strategy), compute)


def _prime_flags(A, strategy):
    def compute():
        con = enumerate_con(A)
        prin, tab = _principal_commutators(A, strategy)
        prin = np.asarray(prin)
        flags = np.zeros(len(con), dtype=bool)
        for t in range(len(con)):
            if t == con.top:
                continue
            inside = con.leq[prin, t]          # principal <= theta
            comm_inside = con.leq[tab, t]      # [p, q] <= theta
            bad = comm_inside & ~inside[:, None] & ~inside[None, :]
            flags[t] = not bad.any()
        flags.setflags(write=False)
        return flags
    return A.cached(("prime-flags", strategy), compute)


def is_prime(A: FiniteAlgebra, theta: Partition, con: CongruenceLattice | None = None,
             strategy: str = "meet") -> bool:
    require_congruence(A, theta, "theta")
    con = con or enumerate_con(A)
    return bool(_prime_flags(A, _normalize_strategy(strategy))[con.index_of(theta)])


def spec_indices(A: FiniteAlgebra, strategy: str = "meet") -> list[int]:
    return [int(i) for i in np.flatnonzero(_prime_flags(A, _normalize_strategy(strategy)))]


def max_indices(A: FiniteAlgebra) -> list[int]:
    con = enumerate_con(A)
    top = con.top
    proper = [i for i in range(len(con)) if i != top]
    return [i for i in proper if not any(j != i and con.leq[i, j] for j in proper)]


def spec(A: FiniteAlgebra, strategy: str = "meet") -> list[Partition]:
    con = enumerate_con(A)
    return [con[i] for i in spec_indices(A, strategy)]


def v_indices(A: FiniteAlgebra, theta_index: int, strategy: str = "meet") -> list[int]:
    con = enumerate_con(A)
    return [i for i in spec_indices(A, strategy) if con.leq[theta_index, i]]


def v_set(A: FiniteAlgebra, theta: Partition, strategy: str = "meet") -> list[Partition]:
    con = enumerate_con(A)
    return [con[i] for i in v_indices(A, con.index_of(theta), strategy)]


def d_set(A: FiniteAlgebra, theta: Partition, strategy: str = "meet") -> list[Partition]:
    inside = set(v_set(A, theta, strategy))
    return [p for p in spec(A, strategy) if p not in inside]


def radical_with_flag(A: FiniteAlgebra, theta: Partition, strategy: str = "meet") -> tuple[Partition, bool]:
    """Intersection of the primes above theta; the flag is True when there are none
    and the result is the total relation by convention."""
    vs = v_set(A, theta, strategy)
    return meet_all(vs, A.size), not vs


def radical(A: FiniteAlgebra, theta: Partition, strategy: str = "meet") -> Partition:
    return radical_with_flag(A, theta, strategy)[0]


def stone_closure(A: FiniteAlgebra, M: Iterable[Partition], strategy: str = "meet") -> list[Partition]:
    M = list(M)
    if not M:
        return []
    primes = set(spec(A, strategy))
    for p in M:
        if p not in primes:
            raise AlgebraError(f"{p.render(A)} is not a prime congruence of {A.name}")
    return v_set(A, meet_all(M, A.size), strategy)


def is_closed(A: FiniteAlgebra, M: Iterable[Partition], strategy: str = "meet") -> bool:
    M = sorted(set(M))
    return sorted(stone_closure(A, M, strategy)) == M


def is_m_system(A: FiniteAlgebra, S: Iterable[tuple[int, int]], strategy: str = "meet") -> bool:
    S = sorted(set(S))
    if not S:
        return False
    con = enumerate_con(A)
    for a, b in S:
        for c, d in S:
            k = commutator_index(A, con.principal[(a, b)], con.principal[(c, d)], strategy)
            theta = con[k]
            if not any(theta.related(x, y) for x, y in S):
                return False
    return True


def complement_pairs(A: FiniteAlgebra, theta: Partition) -> list[tuple[int, int]]:
    """The pairs of the total relation that lie outside theta."""
    n = A.size
    return [(a, b) for a in range(n) for b in range(n) if not theta.related(a, b)]


# ------------------------------------------------------------------ report

@dataclass(frozen=True)
class SpectralReport:
    algebra: FiniteAlgebra
    con: CongruenceLattice = field(repr=False)
    spec: tuple[int, ...]
    max: tuple[int, ...]
    min: tuple[int, ...]
    con2: tuple[int, ...]
    strategy: str = "meet"
    radicals: tuple[int, ...] = ()
    # True where no prime lies above, so the radical is nabla by convention
    empty_v: tuple[bool, ...] = ()

    def flags(self, i) -> list[str]:
        out = []
        if i in self.spec:
            out.append("prime")
        if i in self.max:
            out.append("maximal")
        if i in self.min:
            out.append("minimal-prime")
        if i in self.con2:
            out.append("two-class")
        return out

    def to_dict(self) -> dict:
        A, con = self.algebra, self.con
        return {
            "algebra": A.name,
            "size": A.size,
            "strategy": self.strategy,
            "congruences": [
                {"index": i, "partition": con.render(i), "classes": con[i].num_blocks,
                 "prime": i in self.spec, "flags": self.flags(i),
                 "radical": con.render(self.radicals[i]), "radical_by_convention": self.empty_v[i]}
                for i in range(len(con))
            ],
            "spec": [con.render(i) for i in self.spec],
            "max": [con.render(i) for i in self.max],
            "min": [con.render(i) for i in self.min],
            "con2": [con.render(i) for i in self.con2],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        A, con = self.algebra, self.con
        lines = [f"algebra {A.name} size {A.size} congruences {len(con)}"]
        for i in range(len(con)):
            flags = " ".join(self.flags(i))
            rad = f"  radical=[{self.radicals[i]}]" + (" (no prime above, nabla by convention)" if self.empty_v[i] else "")
            lines.append(f"  [{i}] {con.render(i)}  classes={con[i].num_blocks}" + (f"  {flags}" if flags else "") + rad)
        for key in ("spec", "max", "min", "con2"):
            vals = getattr(self, key)
            lines.append(f"{key}: " + (" ".join(con.render(i) for i in vals) if vals else "(empty)"))
        return "\n".join(lines) + "\n"


def spectral_report(A: FiniteAlgebra, strategy: str = "meet") -> SpectralReport:
    strategy = _normalize_strategy(strategy)
    con = enumerate_con(A)
    sp = spec_indices(A, strategy)
    mx = max_indices(A)
    mn = [i for i in sp if not any(j != i and con.leq[j, i] for j in sp)]
    two = [i for i in range(len(con)) if con[i].num_blocks == 2]
    rads = [radical_with_flag(A, con[i], strategy) for i in range(len(con))]
    return SpectralReport(A, con, tuple(sp), tuple(mx), tuple(mn), tuple(two), strategy,
                          tuple(con.index_of(r) for r, _ in rads), tuple(flag for _, flag in rads))
