"""Bounded distributive lattices with the Zariski and coZariski geometries.

Elements carry a pole: ``one`` for Zariski, ``zero`` for coZariski.  The
Zariski etale maps are the quotients ``D ->> D/θ(a, 1)``; local maps are the
1-conservative ones (``u⁻¹(1) = {1}``); covers are families ``θ(a_i, 1)``
with ``⋁ a_i = 1``.  The coZariski geometry is the same construction with
meet/join and 0/1 exchanged.
"""

from __future__ import annotations

from functools import lru_cache

from ..algebra import (
    FiniteAlgebra,
    Homomorphism,
    Signature,
    all_congruences,
    descend,
    diagonal,
    generated_congruence,
    hom,
    join_congruences,
    kernel,
    principal_congruence,
    quotient,
)
from ..errors import LawViolation, OracleDisagreement
from ..plugin import CoverGenerator, Generator, GeometrySpec
from . import lattices
from .lattices import meet_all, monotone_boolean_functions

THEORY = "dlat"


def _check_laws(L: FiniteAlgebra):
    n = L.size
    meet, join = L.table("meet"), L.table("join")
    zero, one = L.constant("zero"), L.constant("one")

    def m(x, y):
        return meet[x * n + y]

    def j(x, y):
        return join[x * n + y]

    for x in range(n):
        if m(x, x) != x or j(x, x) != x:
            raise LawViolation(f"idempotence fails at {x}", (x,))
        if m(x, zero) != zero or j(x, one) != one or m(x, one) != x or j(x, zero) != x:
            raise LawViolation(f"bounds fail at {x}", (x,))
        for y in range(n):
            if m(x, y) != m(y, x) or j(x, y) != j(y, x):
                raise LawViolation(f"commutativity fails at ({x}, {y})", (x, y))
            if m(x, j(x, y)) != x or j(x, m(x, y)) != x:
                raise LawViolation(f"absorption fails at ({x}, {y})", (x, y))
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if m(x, m(y, z)) != m(m(x, y), z) or j(x, j(y, z)) != j(j(x, y), z):
                    raise LawViolation(f"associativity fails at ({x}, {y}, {z})", (x, y, z))
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if m(x, j(y, z)) != j(m(x, y), m(x, z)):
                    raise LawViolation(
                        f"not distributive: x∧(y∨z) ≠ (x∧y)∨(x∧z) at (x, y, z) = ({x}, {y}, {z})",
                        (x, y, z),
                    )


SIGNATURE = Signature(THEORY, (("meet", 2), ("join", 2), ("zero", 0), ("one", 0)), _check_laws)


def lattice(size, meet, join, zero=None, one=None) -> FiniteAlgebra:
    """Lattice from nested (or callable) meet/join tables; bounds found if omitted."""
    if zero is None or one is None:
        mt = meet if not callable(meet) else [[meet(x, y) for y in range(size)] for x in range(size)]
        zero = next(x for x in range(size) if all(mt[x][y] == x for y in range(size)))
        one = next(x for x in range(size) if all(mt[x][y] == y for y in range(size)))
    return FiniteAlgebra.from_ops(SIGNATURE, size, {"meet": meet, "join": join, "zero": zero, "one": one})


def _make(size, meet, join):
    return lattice(size, meet, join)


def chain(n: int) -> FiniteAlgebra:
    """The n-element chain ``0 < 1 < ... < n-1``."""
    return lattice(n, min, max, 0, n - 1)


def boolean(k: int) -> FiniteAlgebra:
    """The Boolean lattice of subsets of a k-set (bitmask elements)."""
    n = 1 << k
    return lattice(n, lambda x, y: x & y, lambda x, y: x | y, 0, n - 1)


def square() -> FiniteAlgebra:
    """``2 × 2`` with elements ``0, a, b, 1`` numbered 0, 1, 2, 3."""
    return boolean(2)


def trivial() -> FiniteAlgebra:
    return lattice(1, [[0]], [[0]], 0, 0)


def dual(L: FiniteAlgebra) -> FiniteAlgebra:
    """Order dual on the same carrier labels."""
    return FiniteAlgebra(L.signature, L.size, (L.table("join"), L.table("meet"), L.table("one"), L.table("zero")))


def distributive_lattices(n: int) -> tuple:
    """All distributive lattices of size ``n`` up to iso (order search)."""
    return lattices.lattices_of_size(n, _make, True)


def distributive_lattices_birkhoff(n: int) -> tuple:
    """Same class built independently as down-set lattices of posets."""
    return lattices.downset_lattices_of_size(n, _make)


def distributive_lattices_up_to(max_size: int) -> list:
    out = []
    for n in range(1, max_size + 1):
        out.extend(distributive_lattices(n))
    return out


# --------------------------------------------------------------------------
# filters


def is_filter(L, S, pole="one"):
    op = "meet" if pole == "one" else "join"
    if L.constant(pole) not in S:
        return False
    for x in S:
        for y in range(L.size):
            if pole == "one" and lattices.leq(L, x, y) and y not in S:
                return False
            if pole == "zero" and lattices.leq(L, y, x) and y not in S:
                return False
        for y in S:
            if L.op(op, x, y) not in S:
                return False
    return True


def filters(L: FiniteAlgebra, pole="one") -> list:
    """Proper filters (proper ideals when ``pole == 'zero'``), canonical order.

    In a finite lattice every filter is principal, so this lists ``↑a`` for
    ``a ≠ 0``; ``is_filter`` is the unrestricted check used by the tests.
    """
    other = L.constant("zero" if pole == "one" else "one")
    out = []
    for a in range(L.size):
        S = tuple(sorted(lattices.upset(L, a) if pole == "one" else lattices.downset(L, a)))
        if other not in S and S not in out:
            out.append(S)
    return sorted(out, key=lambda s: (len(s), s))


def is_prime(L, S, pole="one") -> bool:
    op = "join" if pole == "one" else "meet"
    other = L.constant("zero" if pole == "one" else "one")
    if other in S:
        return False
    for x in range(L.size):
        for y in range(L.size):
            if L.op(op, x, y) in S and x not in S and y not in S:
                return False
    return True


def prime_filters(L: FiniteAlgebra, pole="one") -> list:
    return [F for F in filters(L, pole) if is_prime(L, F, pole)]


def prime_ideals(L: FiniteAlgebra) -> list:
    return prime_filters(L, "zero")


def theta_min(L: FiniteAlgebra, F, pole="one"):
    """Least congruence whose pole class is ``F``, computed two ways.

    One route intersects every congruence whose pole class is exactly ``F``;
    the other joins the principal congruences ``θ(a, pole)`` for ``a ∈ F``.
    """
    p = L.constant(pole)
    F = tuple(sorted(F))
    joined = diagonal(L)
    for a in F:
        joined = join_congruences(joined, principal_congruence(L, a, p))
    candidates = [t for t in all_congruences(L) if t.class_of(p) == F]
    if not candidates:
        raise OracleDisagreement(f"no congruence has pole class {list(F)}", F)
    met = candidates[0]
    for t in candidates[1:]:
        met = met.meet(t)
    if met != joined:
        raise OracleDisagreement(f"θ_min disagreement at {list(F)}: {met.blocks} vs {joined.blocks}", F)
    return joined


def closed_form_factorization(f: Homomorphism, pole="one"):
    """Quotient by θ_min of ``f⁻¹(pole)`` followed by the induced remainder."""
    L = f.dom
    S = f.preimage(f.cod.constant(pole))
    theta = generated_congruence(L, [(a, L.constant(pole)) for a in S])
    _, q = quotient(L, theta)
    return q, descend(f, q)


# --------------------------------------------------------------------------
# free lattices used by the cover generators


@lru_cache(maxsize=None)
def free_lattice(r: int):
    """Free bounded distributive lattice on ``r`` generators and the generator elements."""
    masks = monotone_boolean_functions(r)
    index = {m: i for i, m in enumerate(masks)}
    n = len(masks)
    L = lattice(
        n,
        lambda x, y: index[masks[x] & masks[y]],
        lambda x, y: index[masks[x] | masks[y]],
        index[0],
        index[(1 << (1 << r)) - 1],
    )
    gens = []
    for i in range(r):
        m = sum(1 << p for p in range(1 << r) if p >> i & 1)
        gens.append(index[m])
    return L, tuple(gens)


def _cover_generator(r: int, pole: str) -> CoverGenerator:
    L, gens = free_lattice(r)
    op = "join" if pole == "one" else "meet"
    acc = L.constant("zero" if pole == "one" else "one")
    for g in gens:
        acc = L.op(op, acc, g)
    K, q = quotient(L, principal_congruence(L, acc, L.constant(pole)))
    family = []
    for g in gens:
        x = q.map[g]
        family.append(quotient(K, principal_congruence(K, x, K.constant(pole)))[1])
    symbol = "⋁" if pole == "one" else "⋀"
    return CoverGenerator(f"{symbol}x_i={'1' if pole == 'one' else '0'}, r={r}", K, tuple(family))


def _basic_generator(pole: str) -> Generator:
    K = chain(3)
    _, q = quotient(K, principal_congruence(K, 1, K.constant(pole)))
    return Generator(f"θ(x,{'1' if pole == 'one' else '0'})", q)


# --------------------------------------------------------------------------
# the geometry


def _pole_preimage(u, pole):
    return u.preimage(u.cod.constant(pole))


def _make_geometry(name: str, pole: str, max_arity: int) -> GeometrySpec:
    basic = _basic_generator(pole)
    K1 = basic.map.dom

    def local_map_test(u: Homomorphism) -> bool:
        return _pole_preimage(u, pole) == (u.dom.constant(pole),)

    def local_step(u: Homomorphism):
        S = _pole_preimage(u, pole)
        if S == (u.dom.constant(pole),):
            return None
        c = meet_all(u.dom, S, pole)
        attachment = hom(K1, u.dom, (u.dom.constant("zero"), c, u.dom.constant("one")))
        return 0, attachment

    def etale_test(n: Homomorphism) -> bool:
        if not n.is_surjective():
            return False
        B = n.dom
        c = meet_all(B, _pole_preimage(n, pole), pole)
        return kernel(n) == principal_congruence(B, c, B.constant(pole))

    def propose_points(B: FiniteAlgebra):
        out = []
        for F in prime_filters(B, pole):
            c = meet_all(B, F, pole)
            _, x = quotient(B, principal_congruence(B, c, B.constant(pole)))
            out.append((F, x))
        return out

    def local_object_oracle(A: FiniteAlgebra) -> bool:
        return A.size > 1 and is_prime(A, (A.constant(pole),), pole)

    covers = tuple(_cover_generator(r, pole) for r in range(0, max_arity + 1))
    return GeometrySpec(
        theory=THEORY,
        name=name,
        signature=SIGNATURE,
        generators=(basic,),
        cover_generators=covers,
        local_step=local_step,
        local_map_test=local_map_test,
        etale_test=etale_test,
        propose_points=propose_points,
        local_object_oracle=local_object_oracle,
        description=f"distributive lattices, pole {pole}, covers of arity ≤ {max_arity}",
    )


@lru_cache(maxsize=None)
def zariski(max_arity: int = 2) -> GeometrySpec:
    return _make_geometry("zariski", "one", max_arity)


@lru_cache(maxsize=None)
def cozariski(max_arity: int = 2) -> GeometrySpec:
    return _make_geometry("cozariski", "zero", max_arity)
