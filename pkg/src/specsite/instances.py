"""Generated fibered instances and test presheaves on total sites.

Base sites have at most four objects and one nontrivial cover; fibers are
distributive lattices with at most four elements.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Homomorphism, enumerate_homs, identity, pullback
from .fibered import FiberedInput, TotalSite, total_cod_presheaf
from .site import FiniteSite, Presheaf, constant_presheaf, site_from_poset
from .theories import dlat


@dataclass(frozen=True, eq=False)
class FiberedInstance:
    name: str
    input: FiberedInput
    base_sheaf: bool   # whether F is a sheaf on the base (known by construction)


def poset_presheaf(site: FiniteSite, algebras, maps) -> Presheaf:
    """Presheaf on a poset site from ``maps[(d, c)]: F(c) -> F(d)`` for ``d < c``."""
    table = []
    for a, (d, c) in enumerate(site.arrows):
        if d == c:
            table.append(tuple(range(algebras[c].size)))
        else:
            table.append(tuple(maps[d, c]))
    return Presheaf(site, tuple(A.size for A in algebras), tuple(table), tuple(algebras))


def point_base() -> FiniteSite:
    return site_from_poset(["*"], lambda x, y: x == y)


def arrow_base(covered: bool) -> FiniteSite:
    # objects c (0) and d (1), arrow d -> c
    return site_from_poset(["c", "d"], lambda x, y: x == y or (x, y) == (1, 0),
                           {0: [[1]]} if covered else None)


def empty_cover_base() -> FiniteSite:
    # objects c (0) and e (1), arrow e -> c, e covered by the empty family
    return site_from_poset(["c", "e"], lambda x, y: x == y or (x, y) == (1, 0), {1: [[]]})


def cover_base() -> FiniteSite:
    # c (0) covered by c1 (1) and c2 (2), with c12 (3) below both
    less = {(1, 0), (2, 0), (3, 0), (3, 1), (3, 2)}
    return site_from_poset(["c", "c1", "c2", "c12"], lambda x, y: x == y or (x, y) in less, {0: [[1, 2]]})


def _hom_with(A, B, pred):
    return next(h for h in enumerate_homs(A, B) if pred(h))


def cover_instance(A1, A2, A12, f1: Homomorphism, f2: Homomorphism, top=None, r1=None, r2=None):
    """Cover-shaped input; ``F(c)`` defaults to the pullback, which makes ``F`` a sheaf."""
    site = cover_base()
    if top is None:
        top, r1, r2 = pullback(f1, f2)
    maps = {(1, 0): r1.map, (2, 0): r2.map, (3, 1): f1.map, (3, 2): f2.map,
            (3, 0): r1.then(f1).map}
    return FiberedInput(site, poset_presheaf(site, (top, A1, A2, A12), maps))


def fibered_instances() -> list:
    """At least twenty inputs with ``F`` a sheaf, plus a few deliberate non-sheaves."""
    two, three, four, sq, one = dlat.chain(2), dlat.chain(3), dlat.chain(4), dlat.square(), dlat.trivial()
    out = []

    site = point_base()
    for name, L in [("1", one), ("2", two), ("3", three), ("4", four), ("2x2", sq)]:
        out.append(FiberedInstance(f"point/{name}", FiberedInput(site, poset_presheaf(site, (L,), {})), True))

    site = arrow_base(covered=True)
    for name, L in [("2", two), ("3", three), ("4", four), ("2x2", sq)]:
        F = poset_presheaf(site, (L, L), {(1, 0): tuple(range(L.size))})
        out.append(FiberedInstance(f"arrow-cover/id-{name}", FiberedInput(site, F), True))
    F = poset_presheaf(site, (sq, sq), {(1, 0): (0, 2, 1, 3)})
    out.append(FiberedInstance("arrow-cover/swap-2x2", FiberedInput(site, F), True))
    for m in (0, 1):
        F = poset_presheaf(site, (three, two), {(1, 0): (0, m, 1)})
        out.append(FiberedInstance(f"arrow-cover/3-to-2-m{m}", FiberedInput(site, F), False))

    site = arrow_base(covered=False)
    for name, L, m in [("3-m0", three, (0, 0, 1)), ("3-m1", three, (0, 1, 1)), ("2x2", sq, (0, 1, 0, 1))]:
        F = poset_presheaf(site, (L, two), {(1, 0): m})
        out.append(FiberedInstance(f"arrow/{name}", FiberedInput(site, F), True))

    ident = identity(two)
    to_one = lambda A: Homomorphism(A, one, (0,) * A.size)
    three_to_two = [_hom_with(three, two, lambda h, m=m: h.map[1] == m) for m in (0, 1)]
    four_to_two = _hom_with(four, two, lambda h: h.map == (0, 0, 1, 1))
    sq_to_two = _hom_with(sq, two, lambda h: h.map == (0, 1, 0, 1))
    covers = [
        ("2,2 over 1", two, two, one, to_one(two), to_one(two)),
        ("2,2 over 2", two, two, two, ident, ident),
        ("3,2 over 2 m1", three, two, two, three_to_two[1], ident),
        ("3,2 over 2 m0", three, two, two, three_to_two[0], ident),
        ("2,1 over 1", two, one, one, to_one(two), identity(one)),
        ("1,1 over 1", one, one, one, identity(one), identity(one)),
        ("4,2 over 2", four, two, two, four_to_two, ident),
        ("2x2,2 over 2", sq, two, two, sq_to_two, ident),
    ]
    for name, A1, A2, A12, f1, f2 in covers:
        out.append(FiberedInstance(f"cover/{name}", cover_instance(A1, A2, A12, f1, f2), True))
    # three-element top over two 2-chains agreeing on a 2-chain: the pullback is a 2-chain
    r = three_to_two[1]
    out.append(FiberedInstance("cover/3 over 2,2", cover_instance(two, two, two, ident, ident, three, r, r), False))

    site = empty_cover_base()
    for name, L in [("2", two), ("3", three), ("2x2", sq)]:
        F = poset_presheaf(site, (L, one), {(1, 0): (0,) * L.size})
        out.append(FiberedInstance(f"empty-cover/{name}", FiberedInput(site, F), True))
    F = poset_presheaf(site, (two, two), {(1, 0): (0, 1)})
    out.append(FiberedInstance("empty-cover/2 over 2", FiberedInput(site, F), False))
    return out


# --------------------------------------------------------------------------
# test presheaves on a total site


def representable(S: FiniteSite, k: int) -> Presheaf:
    homs = [S.hom(x, k) for x in range(len(S.objects))]
    pos = [{g: i for i, g in enumerate(hs)} for hs in homs]
    maps = []
    for a, (x, y) in enumerate(S.arrows):
        maps.append(tuple(pos[x][S.compose(g, a)] for g in homs[y]))
    return Presheaf(S, tuple(len(h) for h in homs), tuple(maps))


def doubled_over(X: Presheaf, TS: TotalSite, c: int) -> Presheaf:
    """``X × 2`` on the fiber over base object ``c``, ``X`` elsewhere.

    Objects covered by the empty sieve stay undoubled so fiberwise sheafhood
    can survive.  Maps out of a doubled object forget the extra bit; maps
    into one add bit 0.  At a cover of ``c`` this breaks the horizontal limit.
    """
    S = TS.site
    over = [TS.objects[k][0] == c and bool(S.minimal_sieves[k]) for k in range(len(S.objects))]
    sizes = tuple(n * 2 if over[k] else n for k, n in enumerate(X.sizes))
    maps = []
    for a, (d, t) in enumerate(S.arrows):
        m = X.maps[a]
        if over[t] and over[d]:
            maps.append(tuple(2 * m[v // 2] + v % 2 for v in range(sizes[t])))
        elif over[t]:
            maps.append(tuple(m[v // 2] for v in range(sizes[t])))
        elif over[d]:
            maps.append(tuple(2 * m[v] for v in range(sizes[t])))
        else:
            maps.append(tuple(m))
    return Presheaf(S, sizes, tuple(maps))


def test_presheaves(TS: TotalSite, Ft: Presheaf) -> list:
    """Named set-valued presheaves covering sheaves, non-sheaves and broken transitions."""
    S = TS.site
    base = TS.input.base
    out = [
        ("structural", Ft),
        ("cod", total_cod_presheaf(TS)),
        ("terminal", constant_presheaf(S, 1)),
        ("constant-2", constant_presheaf(S, 2)),
    ]
    for c in range(len(base.objects)):
        out.append((f"representable-{base.objects[c]}", representable(S, TS.index(c, 0))))
    for c in range(len(base.objects)):
        if base.covers[c]:
            out.append((f"doubled-{base.objects[c]}", doubled_over(Ft, TS, c)))
    return out
