"""Meet-semilattices with top and the Jipsen–Moshier geometry.

Etale maps are the quotients ``S ->> S/θ(s, 1)`` (``x ~ y`` iff
``x ∧ s = y ∧ s``), local maps are the 1-conservative ones, and there is no
topology: every object is local and every filter gives a point.
"""

from __future__ import annotations

from functools import lru_cache

from ..algebra import FiniteAlgebra, Homomorphism, Signature, hom, kernel, principal_congruence, quotient
from ..errors import LawViolation, ReconstructionFailure
from ..plugin import Generator, GeometrySpec
from . import lattices
from .lattices import meet_all

THEORY = "slat"


def _check_laws(S: FiniteAlgebra):
    n = S.size
    meet = S.table("meet")
    one = S.constant("one")

    def m(x, y):
        return meet[x * n + y]

    for x in range(n):
        if m(x, x) != x:
            raise LawViolation(f"idempotence fails at {x}", (x,))
        if m(x, one) != x:
            raise LawViolation(f"top is not neutral at {x}", (x,))
        for y in range(n):
            if m(x, y) != m(y, x):
                raise LawViolation(f"commutativity fails at ({x}, {y})", (x, y))
            for z in range(n):
                if m(x, m(y, z)) != m(m(x, y), z):
                    raise LawViolation(f"associativity fails at ({x}, {y}, {z})", (x, y, z))


SIGNATURE = Signature(THEORY, (("meet", 2), ("one", 0)), _check_laws)


def semilattice(size, meet, one=None) -> FiniteAlgebra:
    if one is None:
        mt = meet if not callable(meet) else [[meet(x, y) for y in range(size)] for x in range(size)]
        one = next(x for x in range(size) if all(mt[x][y] == y for y in range(size)))
    return FiniteAlgebra.from_ops(SIGNATURE, size, {"meet": meet, "one": one})


def _make(size, meet, join):
    return semilattice(size, meet)


def chain(n: int) -> FiniteAlgebra:
    return semilattice(n, min, n - 1)


def semilattices(n: int) -> tuple:
    """Meet-semilattices with top of size ``n`` up to iso.

    A finite meet-semilattice with top is a lattice, so these are the
    lattices of size ``n`` with the join forgotten.
    """
    return lattices.lattices_of_size(n, _make, False)


def semilattices_up_to(max_size: int) -> list:
    out = []
    for n in range(1, max_size + 1):
        out.extend(semilattices(n))
    return out


def leq(S, x, y) -> bool:
    return S.op("meet", x, y) == x


def filters(S: FiniteAlgebra) -> list:
    """Meet-closed upsets containing 1 (the whole carrier included), canonical order."""
    out = {tuple(y for y in range(S.size) if leq(S, a, y)) for a in range(S.size)}
    return sorted(out, key=lambda f: (len(f), f))


def is_filter(S, F) -> bool:
    F = set(F)
    if S.constant("one") not in F:
        return False
    for x in F:
        for y in range(S.size):
            if leq(S, x, y) and y not in F:
                return False
        for y in F:
            if S.op("meet", x, y) not in F:
                return False
    return True


@lru_cache(maxsize=None)
def jm() -> GeometrySpec:
    K = chain(2)
    _, k = quotient(K, principal_congruence(K, 0, 1))
    basic = Generator("θ(x,1)", k)

    def local_map_test(u: Homomorphism) -> bool:
        return u.preimage(u.cod.constant("one")) == (u.dom.constant("one"),)

    def local_step(u: Homomorphism):
        S = u.preimage(u.cod.constant("one"))
        if S == (u.dom.constant("one"),):
            return None
        return 0, hom(K, u.dom, (meet_all(u.dom, S), u.dom.constant("one")))

    def etale_test(n: Homomorphism) -> bool:
        if not n.is_surjective():
            return False
        B = n.dom
        c = meet_all(B, n.preimage(n.cod.constant("one")))
        return kernel(n) == principal_congruence(B, c, B.constant("one"))

    def propose_points(B: FiniteAlgebra):
        out = []
        for F in filters(B):
            _, x = quotient(B, principal_congruence(B, meet_all(B, F), B.constant("one")))
            out.append((F, x))
        return out

    return GeometrySpec(
        theory=THEORY,
        name="jm",
        signature=SIGNATURE,
        generators=(basic,),
        cover_generators=(),
        local_step=local_step,
        local_map_test=local_map_test,
        etale_test=etale_test,
        propose_points=propose_points,
        local_object_oracle=lambda A: True,
        description="meet-semilattices with top, no topology",
    )


def kof_reconstruction(S: FiniteAlgebra, budget=None) -> dict:
    """Rebuild ``S`` as the compact open filters of its finite spectrum.

    Points come from the generic spectrum code; opens are unions of the basic
    opens ``U_n`` of spectral-site objects; specialization is read off the
    opens (``x ≤ y`` iff every open containing ``x`` contains ``y``).  The
    compact open filters are the nonempty opens closed under binary meets of
    points; the check is that ``a ↦ {points whose filter contains a}`` is a
    meet-semilattice isomorphism onto them.
    """
    from ..spectrum import basic_opens, points

    G = jm()
    pts = points(S, G, budget)
    labels = [p.label for p in pts]
    k = len(pts)
    basics = basic_opens(S, G, budget)
    opens = {frozenset()}
    for U in basics.values():
        for V in list(opens):
            opens.add(V | U)
    changed = True
    while changed:
        changed = False
        for U in list(opens):
            for V in list(opens):
                W = U | V
                if W not in opens:
                    opens.add(W)
                    changed = True

    def spec_le(x, y):
        return all(y in U for U in opens if x in U)

    def meet_point(x, y):
        lower = [z for z in range(k) if spec_le(z, x) and spec_le(z, y)]
        glb = [z for z in lower if all(spec_le(w, z) for w in lower)]
        return glb[0] if len(glb) == 1 else None

    kof = []
    for U in sorted(opens, key=lambda u: (len(u), sorted(u))):
        if not U:
            continue
        ok = True
        for x in U:
            for y in U:
                z = meet_point(x, y)
                if z is None or z not in U:
                    ok = False
        if ok:
            kof.append(U)

    image = {a: frozenset(i for i, F in enumerate(labels) if a in F) for a in range(S.size)}
    report = {
        "points": [list(F) for F in labels],
        "opens": len(opens),
        "kof": [sorted(U) for U in kof],
        "map": {a: sorted(image[a]) for a in range(S.size)},
    }
    if len(pts) != S.size:
        raise ReconstructionFailure(f"{len(pts)} points for a semilattice of size {S.size}", report)
    if len(set(image.values())) != S.size:
        raise ReconstructionFailure("a ↦ U_a is not injective", report)
    if set(image.values()) != set(kof):
        raise ReconstructionFailure("image of a ↦ U_a differs from the compact open filters", report)
    for a in range(S.size):
        for b in range(S.size):
            if image[S.op("meet", a, b)] != image[a] & image[b]:
                raise ReconstructionFailure(f"a ↦ U_a does not preserve the meet of {a} and {b}", report)
    report["ok"] = True
    return report
