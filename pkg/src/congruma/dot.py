"""Graphviz DOT output for element orders, congruence lattices and spectra."""
from __future__ import annotations

import numpy as np

from .algebra import AlgebraError, FiniteAlgebra, covering_pairs, is_lattice, lattice_order
from .congruence import enumerate_con
from .spectrum import spec_indices

WHAT = ("algebra-order", "con", "spec")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _digraph(name, labels, leq):
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    for i, lab in enumerate(labels):
        lines.append(f"  n{i} [label={_quote(lab)}];")
    for a, b in covering_pairs(leq):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot(A: FiniteAlgebra, what: str = "con", strategy: str = "meet") -> str:
    """Hasse diagram of the element order, of Con(A), or of Spec(A) under inclusion."""
    if what == "algebra-order":
        if not is_lattice(A):
            raise AlgebraError(f"{A.name} has no lattice order to draw")
        return _digraph(f"{A.name}", [A.label(i) for i in A.elements], lattice_order(A))
    con = enumerate_con(A)
    if what == "con":
        return _digraph(f"Con({A.name})", [con.render(i) for i in range(len(con))], con.leq)
    if what == "spec":
        sp = spec_indices(A, strategy)
        leq = con.leq[np.ix_(sp, sp)] if sp else np.zeros((0, 0), dtype=bool)
        return _digraph(f"Spec({A.name})", [con.render(i) for i in sp], leq)
    raise AlgebraError(f"unknown diagram {what!r}; choose from {', '.join(WHAT)}")
