"""Admissibility, Going Up and Lying Over for homomorphisms of finite algebras.

All decisions work on congruence indices of the source and target lattices.
``f*`` denotes the preimage map on congruences.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraError
from .congruence import Partition, enumerate_con
from .constructions import quotient
from .homomorphism import Homomorphism, HomomorphismError, kernel, preimage_unchecked, pushforward_cg
from .spectrum import _normalize_strategy, radical, spec_indices


class NotAdmissibleError(AlgebraError):
    """GU and LO are only defined for admissible morphisms."""


@dataclass(frozen=True)
class Check:
    holds: bool
    witnesses: tuple = ()

    def __bool__(self):
        return self.holds


class _Context:
    """Congruence data of a morphism, computed once per strategy."""

    def __init__(self, f: Homomorphism, strategy: str):
        self.f = f
        self.strategy = strategy
        self.con_a = enumerate_con(f.source)
        self.con_b = enumerate_con(f.target)
        self.spec_a = spec_indices(f.source, strategy)
        self.spec_b = spec_indices(f.target, strategy)
        self.spec_a_set = set(self.spec_a)
        self.pre = np.asarray([self.con_a.index_of(preimage_unchecked(f, b)) for b in self.con_b])
        self.ker = self.con_a.index_of(kernel(f))

    def v_a(self, i):
        return [p for p in self.spec_a if self.con_a.leq[i, p]]

    def v_b(self, j):
        return [p for p in self.spec_b if self.con_b.leq[j, p]]

    def ra(self, i):
        return self.con_a.render(i)

    def rb(self, j):
        return self.con_b.render(j)


def _ctx(f: Homomorphism, strategy="meet") -> _Context:
    strategy = _normalize_strategy(strategy)
    return f.cached(("ctx", strategy), lambda: _Context(f, strategy))


def spec_preimage(f: Homomorphism, psi: Partition, strategy="meet") -> Partition:
    c = _ctx(f, strategy)
    return c.con_a[int(c.pre[c.con_b.index_of(psi)])]


# ------------------------------------------------------------- decisions

def is_admissible(f: Homomorphism, strategy="meet") -> Check:
    c = _ctx(f, strategy)
    bad = tuple((c.rb(j), c.ra(int(c.pre[j]))) for j in c.spec_b if int(c.pre[j]) not in c.spec_a_set)
    return Check(not bad, bad)


def _require_admissible(f, strategy):
    if not is_admissible(f, strategy):
        raise NotAdmissibleError(f"{f} is not admissible; GU and LO do not apply")


def fulfills_gu(f: Homomorphism, strategy="meet") -> Check:
    """For every prime psi of the target: V(f*psi) is inside f*(V(psi))."""
    _require_admissible(f, strategy)
    c = _ctx(f, strategy)
    bad = []
    for j in c.spec_b:
        phi = int(c.pre[j])
        lifted = {int(c.pre[k]) for k in c.v_b(j)}
        for p in c.v_a(phi):
            if p not in lifted:
                bad.append((c.ra(phi), c.rb(j), c.ra(p)))
    return Check(not bad, tuple(bad))


def fulfills_lo(f: Homomorphism, strategy="meet") -> Check:
    """Every prime above the kernel is the preimage of some prime."""
    _require_admissible(f, strategy)
    c = _ctx(f, strategy)
    image = {int(c.pre[j]) for j in c.spec_b}
    bad = tuple(c.ra(p) for p in c.v_a(c.ker) if p not in image)
    return Check(not bad, bad)


def fulfills_gu_raw(f: Homomorphism, strategy="meet") -> bool:
    """Quantifier form: phi <= phi1 primes, psi over phi, find psi1 >= psi over phi1."""
    _require_admissible(f, strategy)
    c = _ctx(f, strategy)
    for phi in c.spec_a:
        for phi1 in c.spec_a:
            if not c.con_a.leq[phi, phi1]:
                continue
            for psi in c.spec_b:
                if c.pre[psi] != phi:
                    continue
                if not any(c.con_b.leq[psi, psi1] and c.pre[psi1] == phi1 for psi1 in c.spec_b):
                    return False
    return True


def fulfills_lo_raw(f: Homomorphism, strategy="meet") -> bool:
    _require_admissible(f, strategy)
    c = _ctx(f, strategy)
    for phi in c.spec_a:
        if c.con_a.leq[c.ker, phi] and not any(c.pre[psi] == phi for psi in c.spec_b):
            return False
    return True


def spec_map_closed(f: Homomorphism, strategy="meet") -> Check:
    """f* sends every closed set V(theta) of the target to a closed set of the source."""
    c = _ctx(f, strategy)
    bad = []
    for j in range(len(c.con_b)):
        image = sorted({int(c.pre[k]) for k in c.v_b(j)})
        if not image:
            continue
        meet = image[0]
        for k in image[1:]:
            meet = c.con_a.meet(meet, k)
        if c.v_a(meet) != image:
            bad.append(c.rb(j))
    return Check(not bad, tuple(bad))


# ------------------------------------------------------ induced morphisms

def induced_f_beta(f: Homomorphism, beta: Partition) -> Homomorphism:
    """A/f*(beta) -> B/beta, a/f*(beta) |-> f(a)/beta."""
    pre = preimage_unchecked(f, beta)
    qa = quotient(f.source, pre)
    qb = quotient(f.target, beta)
    mapping = tuple(int(beta.array[f(r)]) for r in qa.algebra.representatives)
    h = Homomorphism(qa.algebra, qb.algebra, mapping, f"{f.name}_beta")
    _check_square(f, h, qa.projection, qb.projection)
    if not h.is_injective:
        raise AlgebraError(f"{h.name} is not injective")
    return h


def induced_f_bracket(f: Homomorphism, theta: Partition) -> Homomorphism:
    """A/theta -> B/Cg(f(theta)), a/theta |-> f(a)/Cg(f(theta))."""
    pushed = pushforward_cg(f, theta)
    qa = quotient(f.source, theta)
    qb = quotient(f.target, pushed)
    mapping = tuple(int(pushed.array[f(r)]) for r in qa.algebra.representatives)
    h = Homomorphism(qa.algebra, qb.algebra, mapping, f"{f.name}_[theta]")
    _check_square(f, h, qa.projection, qb.projection)
    return h


def _check_square(f, h, pa, pb):
    # pb . f == h . pa, and h is a homomorphism
    from .homomorphism import validate_hom
    validate_hom(h.source, h.target, h.mapping, h.name)
    for a in range(f.source.size):
        if pb(f(a)) != h(pa(a)):
            raise AlgebraError(f"{h.name}: square with the projections does not commute at {f.source.label(a)}")


def phi_f(f: Homomorphism, strategy="meet") -> list[Partition]:
    """beta |-> f*(beta)/Ker(f) for every beta of Con(target), in index order."""
    c = _ctx(f, strategy)
    q = quotient(f.source, kernel(f)).algebra
    return [q.push(c.con_a[int(c.pre[j])]) for j in range(len(c.con_b))]


def phi_f_lo(f: Homomorphism, strategy="meet") -> bool:
    """Restriction of phi_f to the target spectrum covers Spec(A/Ker f)."""
    c = _ctx(f, strategy)
    images = phi_f(f, strategy)
    q = quotient(f.source, kernel(f)).algebra
    covered = {images[j] for j in c.spec_b}
    con_q = enumerate_con(q)
    return all(con_q[i] in covered for i in spec_indices(q, c.strategy))


def lo_char_radical(f: Homomorphism, strategy="meet") -> Check:
    """For every theta above Ker f: f*(rad(Cg(f theta))) == rad(theta)."""
    _require_admissible(f, strategy)
    c = _ctx(f, strategy)
    bad = []
    for i in c.con_a.above(c.ker):
        theta = c.con_a[i]
        pushed = pushforward_cg(f, theta, check=False)
        lhs = preimage_unchecked(f, radical(f.target, pushed, c.strategy))
        if lhs != radical(f.source, theta, c.strategy):
            bad.append(c.ra(i))
    return Check(not bad, tuple(bad))


def lying_over_prime(f: Homomorphism, phi: Partition, strategy="meet") -> tuple[bool, bool]:
    """(some prime of the target pulls back to phi, f*(Cg(f(phi))) == phi)."""
    c = _ctx(f, strategy)
    i = c.con_a.index_of(phi)
    exists = any(int(c.pre[j]) == i for j in c.spec_b)
    return exists, preimage_unchecked(f, pushforward_cg(f, phi, check=False)) == phi


def _require_embedding(i, strategy):
    if not i.is_injective:
        raise HomomorphismError(f"{i} is not injective")
    _require_admissible(i, strategy)


def gu_char_msystem(i: Homomorphism, strategy="meet") -> Check:
    """For each prime phi of the source, every maximal proper theta avoiding the
    image of the complement of phi pulls back exactly to phi."""
    _require_embedding(i, strategy)
    c = _ctx(i, strategy)
    top = c.con_b.top
    bad = []
    for phi in c.spec_a:
        # theta avoids i(complement of phi) iff i*(theta) <= phi
        cand = [j for j in range(len(c.con_b)) if j != top and c.con_a.leq[int(c.pre[j]), phi]]
        for j in cand:
            if any(k != j and c.con_b.leq[j, k] for k in cand):
                continue
            if int(c.pre[j]) != phi:
                bad.append((c.ra(phi), c.rb(j)))
    return Check(not bad, tuple(bad))


def maximal_avoiders(i: Homomorphism, phi: Partition, strategy="meet") -> list[Partition]:
    c = _ctx(i, strategy)
    p = c.con_a.index_of(phi)
    top = c.con_b.top
    cand = [j for j in range(len(c.con_b)) if j != top and c.con_a.leq[int(c.pre[j]), p]]
    return [c.con_b[j] for j in cand if not any(k != j and c.con_b.leq[j, k] for k in cand)]


def _lo_or_false(h, strategy):
    return bool(is_admissible(h, strategy)) and bool(fulfills_lo(h, strategy))


def all_f_beta_lo(f: Homomorphism, strategy="meet") -> bool:
    c = _ctx(f, strategy)
    return all(_lo_or_false(induced_f_beta(f, beta), strategy) for beta in c.con_b)


def prime_f_beta_spectra_onto(f: Homomorphism, strategy="meet") -> bool:
    """For every prime beta, f_beta* maps Spec(B/beta) onto Spec(A/f*beta)."""
    c = _ctx(f, strategy)
    for j in c.spec_b:
        h = induced_f_beta(f, c.con_b[j])
        hc = _ctx(h, strategy)
        image = {int(hc.pre[k]) for k in hc.spec_b}
        if not set(hc.spec_a) <= image:
            return False
    return True


def fbeta_equivalents(f: Homomorphism, strategy="meet") -> dict[str, bool]:
    """The four conditions that characterize GU for an admissible morphism."""
    return {
        "gu": bool(fulfills_gu(f, strategy)),
        "spec_map_closed": bool(spec_map_closed(f, strategy)),
        "all_f_beta_lo": all_f_beta_lo(f, strategy),
        "prime_f_beta_onto": prime_f_beta_spectra_onto(f, strategy),
    }


# ------------------------------------------------------------------ verdicts

@dataclass(frozen=True)
class MorphismVerdict:
    name: str
    source: str
    target: str
    admissible: bool
    gu: bool | None
    lo: bool | None
    witnesses: dict = field(default_factory=dict)

    @staticmethod
    def _yn(v):
        return "n/a" if v is None else ("yes" if v else "no")

    def to_dict(self) -> dict:
        return {"hom": self.name, "source": self.source, "target": self.target,
                "admissible": self._yn(self.admissible), "GU": self._yn(self.gu), "LO": self._yn(self.lo),
                "witnesses": {k: [list(w) if isinstance(w, tuple) else w for w in v]
                              for k, v in self.witnesses.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"hom {self.name} : {self.source} -> {self.target}",
                 f"admissible: {self._yn(self.admissible)}",
                 f"GU: {self._yn(self.gu)}",
                 f"LO: {self._yn(self.lo)}"]
        for psi, pre in self.witnesses.get("admissible", ()):
            lines.append(f"witness admissible: prime {psi} of {self.target} pulls back to non-prime {pre}")
        for phi, psi, phi1 in self.witnesses.get("GU", ()):
            lines.append(f"witness GU: phi={phi} psi={psi} phi1={phi1} (no prime above psi lies over phi1)")
        for phi in self.witnesses.get("LO", ()):
            lines.append(f"witness LO: prime {phi} above the kernel is no preimage of a prime")
        return "\n".join(lines) + "\n"


def analyze(f: Homomorphism, strategy="meet") -> MorphismVerdict:
    adm = is_admissible(f, strategy)
    if not adm:
        return MorphismVerdict(f.name, f.source.name, f.target.name, False, None, None,
                               {"admissible": adm.witnesses})
    gu, lo = fulfills_gu(f, strategy), fulfills_lo(f, strategy)
    wit = {}
    if not gu:
        wit["GU"] = gu.witnesses
    if not lo:
        wit["LO"] = lo.witnesses
    return MorphismVerdict(f.name, f.source.name, f.target.name, True, gu.holds, lo.holds, wit)

