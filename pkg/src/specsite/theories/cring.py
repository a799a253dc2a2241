"""Finite commutative rings with the Zariski-style geometry (optional plugin).

In a finite ring the powers of ``a`` are eventually periodic and contain a
unique idempotent ``e``; inverting ``a`` then amounts to passing to ``eR``,
i.e. to the quotient ``R/(1 - e)``.  Covers are families ``R -> R[1/a_i]``
with the ``a_i`` generating the unit ideal.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from ..algebra import FiniteAlgebra, Homomorphism, Signature, kernel, principal_congruence, product, quotient
from ..errors import LawViolation
from ..plugin import CoverGenerator, Generator, GeometrySpec

THEORY = "cring"


def _check_laws(R: FiniteAlgebra):
    n = R.size
    add, mul, neg = R.table("add"), R.table("mul"), R.table("neg")
    zero, one = R.constant("zero"), R.constant("one")
    for x in range(n):
        if add[x * n + zero] != x or mul[x * n + one] != x:
            raise LawViolation(f"unit laws fail at {x}", (x,))
        if add[x * n + neg[x]] != zero:
            raise LawViolation(f"negation fails at {x}", (x,))
        for y in range(n):
            if add[x * n + y] != add[y * n + x] or mul[x * n + y] != mul[y * n + x]:
                raise LawViolation(f"commutativity fails at ({x}, {y})", (x, y))
            for z in range(n):
                if add[add[x * n + y] * n + z] != add[x * n + add[y * n + z]]:
                    raise LawViolation(f"additive associativity fails at ({x}, {y}, {z})", (x, y, z))
                if mul[mul[x * n + y] * n + z] != mul[x * n + mul[y * n + z]]:
                    raise LawViolation(f"multiplicative associativity fails at ({x}, {y}, {z})", (x, y, z))
                if mul[x * n + add[y * n + z]] != add[mul[x * n + y] * n + mul[x * n + z]]:
                    raise LawViolation(f"distributivity fails at ({x}, {y}, {z})", (x, y, z))


SIGNATURE = Signature(THEORY, (("add", 2), ("neg", 1), ("mul", 2), ("zero", 0), ("one", 0)), _check_laws)


def zmod(n: int) -> FiniteAlgebra:
    return FiniteAlgebra.from_ops(SIGNATURE, n, {
        "add": lambda x, y: (x + y) % n,
        "neg": lambda x: (-x) % n,
        "mul": lambda x, y: (x * y) % n,
        "zero": 0,
        "one": 1 % n,
    })


def ring_product(R: FiniteAlgebra, S: FiniteAlgebra) -> FiniteAlgebra:
    return product(R, S)[0]


def units(R: FiniteAlgebra) -> tuple:
    one = R.constant("one")
    return tuple(x for x in range(R.size) if any(R.op("mul", x, y) == one for y in range(R.size)))


def is_unit(R, x) -> bool:
    return x in units(R)


def stable_idempotent(R: FiniteAlgebra, a: int) -> int:
    """The idempotent among the powers ``a, a², ...``."""
    seen = []
    x = a
    while x not in seen:
        seen.append(x)
        x = R.op("mul", x, a)
    for y in seen:
        if R.op("mul", y, y) == y:
            return y
    raise AssertionError("powers of an element of a finite ring always contain an idempotent")


def localization(R: FiniteAlgebra, a: int):
    """``(R[1/a], R -> R[1/a])`` computed as ``R/(1 - e)`` for the stable idempotent ``e``."""
    e = stable_idempotent(R, a)
    return quotient(R, principal_congruence(R, e, R.constant("one")))


def generates_unit_ideal(R, elems) -> bool:
    ideal = {R.constant("zero")}
    for a in elems:
        multiples = {R.op("mul", a, r) for r in range(R.size)}
        ideal = {R.op("add", x, y) for x in ideal for y in multiples}
    return R.constant("one") in ideal


def is_local_ring(R: FiniteAlgebra) -> bool:
    """Nonzero with the non-units closed under addition (unique maximal ideal)."""
    if R.size == 1:
        return False
    u = set(units(R))
    non = [x for x in range(R.size) if x not in u]
    return all(R.op("add", x, y) not in u for x in non for y in non)


class Localization(Generator):
    """Inverting one element; an attachment is ``(B, a)`` with ``a`` in ``B``."""

    def attachments(self, B, budget=None):
        return [(B, a) for a in range(B.size)]

    def push(self, attachment):
        B, a = attachment
        return localization(B, a)[1]

    def describe(self, attachment):
        return attachment[1]

    def factors(self, attachment, u) -> bool:
        _, a = attachment
        return is_unit(u.cod, u.map[a])


class _UnitCover(CoverGenerator):
    def attachments(self, B, budget=None):
        r = len(self.family)
        return [(B, t) for t in itertools.product(range(B.size), repeat=r) if generates_unit_ideal(B, t)]

    def push(self, attachment):
        B, t = attachment
        return tuple(localization(B, a)[1] for a in t)

    def describe(self, attachment):
        return list(attachment[1])

    def lifts(self, attachment, budget=None) -> bool:
        B, t = attachment
        return any(is_unit(B, a) for a in t)


def _maximal_ideal_labels(R: FiniteAlgebra, x: Homomorphism):
    A = x.cod
    u = set(units(A))
    return tuple(y for y in range(R.size) if x.map[y] not in u)


@lru_cache(maxsize=None)
def ring_zariski(max_arity: int = 2) -> GeometrySpec:
    def local_map_test(u: Homomorphism) -> bool:
        U = set(units(u.cod))
        V = set(units(u.dom))
        return all(x in V for x in range(u.dom.size) if u.map[x] in U)

    def local_step(u: Homomorphism):
        U = set(units(u.cod))
        V = set(units(u.dom))
        for x in range(u.dom.size):
            if u.map[x] in U and x not in V:
                return 0, (u.dom, x)
        return None

    def etale_test(n: Homomorphism) -> bool:
        if not n.is_surjective():
            return False
        B = n.dom
        k = kernel(n)
        return any(k == principal_congruence(B, e, B.constant("one"))
                   for e in range(B.size) if B.op("mul", e, e) == e)

    def propose_points(R: FiniteAlgebra):
        out = []
        seen = set()
        for e in range(R.size):
            if R.op("mul", e, e) != e:
                continue
            A, x = localization(R, e)
            if not is_local_ring(A) or x.map in seen:
                continue
            seen.add(x.map)
            out.append((_maximal_ideal_labels(R, x), x))
        return sorted(out, key=lambda p: p[0])

    return GeometrySpec(
        theory=THEORY,
        name="ring-zariski",
        signature=SIGNATURE,
        generators=(Localization("invert x", None),),
        cover_generators=tuple(_UnitCover(f"unit ideal, r={r}", None, (None,) * r)
                               for r in range(0, max_arity + 1)),
        local_step=local_step,
        local_map_test=local_map_test,
        etale_test=etale_test,
        propose_points=propose_points,
        local_object_oracle=is_local_ring,
        description="finite commutative rings, localizations at elements",
    )
