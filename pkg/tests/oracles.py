"""Brute-force reference implementations used only by the tests."""
import itertools

from congruma.congruence import Partition, partition_meet


def raw_is_congruence(A, p):
    """Compatibility checked pair by pair, one slot at a time."""
    rel = [(a, b) for a in range(A.size) for b in range(A.size) if p.related(a, b)]
    for op in A.ops:
        for args in itertools.product(range(A.size), repeat=op.arity):
            for slot in range(op.arity):
                for a, b in rel:
                    if args[slot] != a:
                        continue
                    other = args[:slot] + (b,) + args[slot + 1:]
                    if not p.related(op(*args), op(*other)):
                        return False
    return True


def set_partitions(n):
    """All restricted-growth strings of length n (one per set partition)."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            yield from grow(prefix + [b], max(top, b))
    if n == 0:
        yield ()
        return
    yield from grow([0], 0)


def brute_con(A, check=raw_is_congruence):
    """Every set partition of the carrier that passes ``check``."""
    return sorted(Partition(p) for p in set_partitions(A.size) if check(A, Partition(p)))


def brute_cg(A, pairs, con=None):
    con = con if con is not None else brute_con(A)
    out = Partition.total(A.size)
    for c in con:
        if all(c.related(a, b) for a, b in pairs):
            out = partition_meet(out, c)
    return out


def brute_prime(con, comm, theta):
    """Primality quantified over all congruence pairs, not just principal ones."""
    if theta.is_total():
        return False
    for a, b in itertools.product(con, repeat=2):
        if comm(a, b).refines(theta) and not a.refines(theta) and not b.refines(theta):
            return False
    return True
