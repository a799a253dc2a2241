"""Data carried by a geometry: etale generators, cover generators and the
plugin-side rules that drive factorization and point enumeration.

Every generator and cover generator in this package pushes out to a
surjection, so pushed-out etale maps are always canonical quotient maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Signature,
    enumerate_homs,
    pushout_surjection,
)


@dataclass(frozen=True)
class Generator:
    """An etale generator ``k: K -> K'`` between finite algebras."""

    label: str
    map: Optional[Homomorphism]

    def attachments(self, B: FiniteAlgebra, budget=None) -> list:
        """Maps ``K -> B`` along which the generator can be pushed."""
        return enumerate_homs(self.map.dom, B, budget)

    def push(self, attachment) -> Homomorphism:
        """The pushout of ``k`` along ``attachment``, as a map out of ``cod(attachment)``."""
        q, _ = pushout_surjection(self.map, attachment)
        return q

    def describe(self, attachment):
        """JSON-friendly form of an attachment."""
        return list(attachment.map)

    def factors(self, attachment, u: Homomorphism) -> bool:
        """Whether ``u ∘ attachment`` extends along ``k``."""
        composite = attachment.then(u)
        fixed = {}
        for x, y in enumerate(self.map.map):
            v = composite.map[x]
            if fixed.get(y, v) != v:
                return False
            fixed[y] = v
        return bool(enumerate_homs(self.map.cod, u.cod, fixed=fixed))


@dataclass(frozen=True)
class CoverGenerator:
    """A generating cover family ``(k_i: K -> K_i)``."""

    label: str
    base: Optional[FiniteAlgebra]
    family: tuple

    def attachments(self, B: FiniteAlgebra, budget=None) -> list:
        return enumerate_homs(self.base, B, budget)

    def push(self, attachment) -> tuple:
        return tuple(pushout_surjection(k, attachment)[0] for k in self.family)

    def describe(self, attachment):
        return list(attachment.map)

    def lifts(self, attachment, budget=None) -> bool:
        """Whether ``attachment`` factors through some member of the family."""
        B = attachment.cod
        for k in self.family:
            fixed = {}
            ok = True
            for x, y in enumerate(k.map):
                v = attachment.map[x]
                if fixed.get(y, v) != v:
                    ok = False
                    break
                fixed[y] = v
            if ok and enumerate_homs(k.cod, B, budget, fixed=fixed):
                return True
        return False


@dataclass(frozen=True)
class GeometrySpec:
    """A theory together with its etale generators, local maps and covers.

    ``local_step(u)`` returns ``(generator_index, attachment)`` naming a
    generator instance that ``u`` fails to be right orthogonal to, or None
    when ``u`` is local.  ``propose_points(B)`` returns candidate local forms
    as ``(label, map)`` pairs.
    """

    theory: str
    name: str
    signature: Signature
    generators: tuple
    cover_generators: tuple
    local_step: Callable = field(repr=False)
    local_map_test: Callable = field(repr=False)
    etale_test: Callable = field(repr=False)
    propose_points: Callable = field(repr=False)
    local_object_oracle: Optional[Callable] = field(default=None, repr=False)
    description: str = ""

    @property
    def key(self):
        return self.theory, self.name

    def generator_instances(self, B: FiniteAlgebra, budget=None):
        """All ``(index, attachment, pushed map)`` over ``B``."""
        out = []
        for i, g in enumerate(self.generators):
            for a in g.attachments(B, budget):
                out.append((i, a, g.push(a)))
        return out
