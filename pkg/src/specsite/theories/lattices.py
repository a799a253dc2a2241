"""Order-theoretic helpers shared by the lattice plugins.

Includes two independent enumerators of finite lattices: one searching
orders directly, one building distributive lattices as down-set lattices of
posets (Birkhoff).  Each is the other's oracle.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from ..algebra import find_isomorphism


def leq(L, x, y) -> bool:
    return L.op("meet", x, y) == x


def order_matrix(L):
    return tuple(tuple(leq(L, x, y) for y in range(L.size)) for x in range(L.size))


def upset(L, x):
    return tuple(y for y in range(L.size) if leq(L, x, y))


def downset(L, x):
    return tuple(y for y in range(L.size) if leq(L, y, x))


def meet_all(L, elems, pole="one"):
    """Meet of ``elems`` (join when ``pole == 'zero'``); empty input gives the pole."""
    op = "meet" if pole == "one" else "join"
    acc = L.constant(pole)
    for x in elems:
        acc = L.op(op, acc, x)
    return acc


def join_all(L, elems):
    acc = L.constant("zero")
    for x in elems:
        acc = L.op("join", acc, x)
    return acc


def join_irreducibles(L):
    """Non-bottom elements that are not the join of two strictly smaller elements."""
    bottom = L.constant("zero")
    out = []
    for x in range(L.size):
        if x == bottom:
            continue
        below = [y for y in downset(L, x) if y != x]
        if not any(L.op("join", y, z) == x for y in below for z in below):
            out.append(x)
    return out


def meet_irreducibles(L):
    top = L.constant("one")
    out = []
    for x in range(L.size):
        if x == top:
            continue
        above = [y for y in upset(L, x) if y != x]
        if not any(L.op("meet", y, z) == x for y in above for z in above):
            out.append(x)
    return out


def hasse_edges(elements, less):
    """Covering pairs ``(x, y)`` with ``x < y`` and nothing strictly between."""
    out = []
    for x in elements:
        for y in elements:
            if x != y and less(x, y):
                if not any(z not in (x, y) and less(x, z) and less(z, y) for z in elements):
                    out.append((x, y))
    return out


def posets_isomorphic(elems_a, less_a, elems_b, less_b) -> bool:
    """Brute-force order isomorphism test (sizes here are tiny)."""
    if len(elems_a) != len(elems_b):
        return False
    a = list(elems_a)
    for perm in itertools.permutations(elems_b):
        m = dict(zip(a, perm))
        if all(less_a(x, y) == less_b(m[x], m[y]) for x in a for y in a):
            return True
    return False


# --------------------------------------------------------------------------
# poset enumeration (naturally labelled: i < j in the order implies i < j as ints)


def naturally_labelled_posets(m):
    """Yield posets on ``range(m)`` as tuples of strict-downset bitmasks."""

    def extend(downs):
        k = len(downs)
        if k == m:
            yield tuple(downs)
            return
        for mask in range(1 << k):
            # mask must be down-closed
            ok = True
            for j in range(k):
                if mask >> j & 1 and downs[j] & ~mask:
                    ok = False
                    break
            if ok:
                yield from extend(downs + [mask])

    yield from extend([])


def _lattice_from_order(n, less_eq):
    """Meet and join tables of a finite order, or None if it is not a lattice."""
    meet = [[0] * n for _ in range(n)]
    join = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(x, n):
            lower = [z for z in range(n) if less_eq[z][x] and less_eq[z][y]]
            glb = [z for z in lower if all(less_eq[w][z] for w in lower)]
            upper = [z for z in range(n) if less_eq[x][z] and less_eq[y][z]]
            lub = [z for z in upper if all(less_eq[z][w] for w in upper)]
            if len(glb) != 1 or len(lub) != 1:
                return None
            meet[x][y] = meet[y][x] = glb[0]
            join[x][y] = join[y][x] = lub[0]
    return meet, join


def _order_with_bounds(poset, m):
    n = m + 2
    le = [[False] * n for _ in range(n)]
    for x in range(n):
        le[0][x] = True
        le[x][n - 1] = True
        le[x][x] = True
    for j, mask in enumerate(poset):
        for i in range(m):
            if mask >> i & 1:
                le[i + 1][j + 1] = True
    return le


@lru_cache(maxsize=None)
def lattices_of_size(n, make, distributive_only):
    """All lattices with ``n`` elements up to isomorphism, built by ``make(size, meet, join)``."""
    if n == 1:
        return (make(1, [[0]], [[0]]),)
    if n == 2:
        return (make(2, [[0, 0], [0, 1]], [[0, 1], [1, 1]]),)
    found = []
    for poset in naturally_labelled_posets(n - 2):
        le = _order_with_bounds(poset, n - 2)
        tables = _lattice_from_order(n, le)
        if tables is None:
            continue
        meet, join = tables
        if distributive_only and not _is_distributive(n, meet, join):
            continue
        found.append(make(n, meet, join))
    return tuple(_dedup_bucketed(found))


def _dedup_bucketed(algebras):
    """Keep the first algebra of each isomorphism class."""
    reps = {}
    out = []
    for A in algebras:
        bucket = reps.setdefault(_order_profile(A), [])
        if not any(find_isomorphism(A, B) is not None for B in bucket):
            bucket.append(A)
            out.append(A)
    return out


def _order_profile(A):
    meet = A.table("meet")
    n = A.size
    ups = sorted(sum(1 for y in range(n) if meet[x * n + y] == x) for x in range(n))
    downs = sorted(sum(1 for y in range(n) if meet[y * n + x] == y) for x in range(n))
    return tuple(ups), tuple(downs)


def _is_distributive(n, meet, join):
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if meet[x][join[y][z]] != join[meet[x][y]][meet[x][z]]:
                    return False
    return True


@lru_cache(maxsize=None)
def downset_lattices_of_size(n, make):
    """Distributive lattices of size ``n`` as down-set lattices of posets."""
    found = []
    for k in range(0, n):
        for poset in naturally_labelled_posets(k):
            downs = [mask for mask in range(1 << k)
                     if all(not (mask >> j & 1) or (poset[j] & ~mask) == 0 for j in range(k))]
            if len(downs) != n:
                continue
            downs.sort(key=lambda d: (bin(d).count("1"), d))
            index = {d: i for i, d in enumerate(downs)}
            meet = [[index[a & b] for b in downs] for a in downs]
            join = [[index[a | b] for b in downs] for a in downs]
            found.append(make(n, meet, join))
    return tuple(_dedup_bucketed(found))


def monotone_boolean_functions(r):
    """Truth-table bitmasks (over ``2**r`` assignments) of all monotone Boolean functions."""
    points = list(range(1 << r))
    out = []
    for mask in range(1 << len(points)):
        ok = True
        for p in points:
            if mask >> p & 1:
                for q in points:
                    if p & q == p and not mask >> q & 1:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out.append(mask)
    out.sort(key=lambda m: (bin(m).count("1"), m))
    return out
