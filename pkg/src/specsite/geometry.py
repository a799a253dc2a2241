"""Locality for a geometry: generalized covers, local objects and maps,
admissible factorization, and the characterizations of locality through a
sample of local objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import FiniteAlgebra, Homomorphism, enumerate_homs, identity
from .errors import AdmissibilityViolation, BudgetExceeded, NotLocalInput, OracleDisagreement
from .factorization import EtaleWitness, Step, _fixed_from, factorize, orthogonality_counterexample
from .plugin import GeometrySpec


@dataclass(frozen=True)
class GeneralizedCover:
    base: FiniteAlgebra
    family: tuple         # maps n_i: B -> B_i
    cover: int            # index of the generating cover
    attachment: object    # the attachment K -> B it was pushed along

    def key(self):
        return frozenset(n.map for n in self.family)


def _family_order(family):
    return (len(family), tuple(sorted((n.cod.size, n.cod.tables, n.map) for n in family)))


def generalized_covers(B: FiniteAlgebra, G: GeometrySpec, budget=None, minimal=False) -> list:
    """Every pushout of a generating cover along an attachment into ``B``.

    Families are compared as sets of etale maps (maps are canonical
    quotients, so equal maps are the same object over ``B``).  With
    ``minimal`` only families containing no smaller cover are kept.
    """
    found = {}
    for ci, cg in enumerate(G.cover_generators):
        for a in cg.attachments(B, budget):
            fam = cg.push(a)
            uniq = {}
            for n in fam:
                uniq.setdefault(n.map, n)
            fam = tuple(sorted(uniq.values(), key=lambda n: (n.cod.size, n.map)))
            key = frozenset(uniq)
            if key not in found:
                found[key] = GeneralizedCover(B, fam, ci, a)
    covers = sorted(found.values(), key=lambda c: _family_order(c.family))
    if minimal:
        keys = [c.key() for c in covers]
        covers = [c for c, k in zip(covers, keys) if not any(o < k for o in keys)]
    return covers


def _retracts(n: Homomorphism, budget=None) -> bool:
    fixed = _fixed_from(n, identity(n.dom))
    return fixed is not None and bool(enumerate_homs(n.cod, n.dom, budget, fixed=fixed))


def failing_cover(A: FiniteAlgebra, G: GeometrySpec, budget=None):
    """A generalized cover of ``A`` no member of which has a retraction, or None."""
    for c in generalized_covers(A, G, budget):
        if not any(_retracts(n, budget) for n in c.family):
            return c
    return None


def is_local_object(A: FiniteAlgebra, G: GeometrySpec, budget=None) -> bool:
    """Retraction criterion: every generalized cover of ``A`` has a member with a retraction."""
    return failing_cover(A, G, budget) is None


def is_local_object_by_injectivity(A: FiniteAlgebra, G: GeometrySpec, budget=None) -> bool:
    """Injectivity criterion: every attachment of a generating cover factors through a member."""
    for cg in G.cover_generators:
        for a in cg.attachments(A, budget):
            if not cg.lifts(a, budget):
                return False
    return True


def _orthogonality_oracle(u: Homomorphism, G: GeometrySpec, budget=None):
    """Counterexample to ``u`` being right orthogonal to the generators, or None."""
    for gi, g in enumerate(G.generators):
        if g.map is not None:
            sq = orthogonality_counterexample(g.map, u, budget)
            if sq is not None:
                return {"generator": g.label, "top": list(sq.top.map), "bottom": list(sq.bottom.map)}
        else:
            # generators given by attachments: u must reflect every extension
            for a in g.attachments(u.dom, budget):
                if g.factors(a, u) and not g.factors(a, identity(u.dom)):
                    return {"generator": g.label, "attachment": g.describe(a)}
    return None


def is_local_map(u: Homomorphism, G: GeometrySpec, budget=None, oracle=True) -> bool:
    """Syntactic local-map test, refereed by brute-force orthogonality."""
    syntactic = G.local_map_test(u)
    if not oracle:
        return syntactic
    witness = _orthogonality_oracle(u, G, budget)
    if syntactic != (witness is None):
        raise OracleDisagreement(
            f"local-map test says {syntactic}, orthogonality says {witness is None}",
            {"map": list(u.map), "square": witness},
        )
    return syntactic


def admissible_factorize(f: Homomorphism, G: GeometrySpec, budget=None):
    """Factorization of a map into a local object, with its middle object checked local."""
    if not is_local_object(f.cod, G, budget):
        raise NotLocalInput("codomain is not a local object")
    witness, u = factorize(f, G)
    middle = witness.codomain
    bad = failing_cover(middle, G, budget)
    if bad is not None:
        raise AdmissibilityViolation(
            "middle object of the factorization is not local",
            {"family": [list(n.map) for n in bad.family]},
        )
    return witness, middle, u


# --------------------------------------------------------------------------
# etale objects under an algebra


def etale_closure(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> dict:
    """Every etale map out of ``B`` reachable by pushing generators, with a witness each.

    Keys are map tuples; pushed generators are canonical quotients, so equal
    keys mean the same object over ``B``.
    """
    start = EtaleWitness(B, ())
    seen = {tuple(range(B.size)): start}
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            n = w.map
            for gi, att, q in G.generator_instances(n.cod, budget):
                m = n.then(q)
                if m.map not in seen:
                    seen[m.map] = EtaleWitness(B, w.steps + (Step(gi, att, q),))
                    nxt.append(seen[m.map])
        frontier = nxt
    return seen


def etale_maps_under(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> list:
    """The etale maps of ``etale_closure``, identity first, then by decreasing codomain size and map."""
    maps = [w.map for w in etale_closure(B, G, budget).values()]
    return sorted(maps, key=lambda n: (-n.cod.size, n.map))


def factors_through(x: Homomorphism, n: Homomorphism, budget=None):
    """The map ``m`` with ``m ∘ n = x`` if there is one (unique when ``n`` is a quotient)."""
    fixed = _fixed_from(n, x)
    if fixed is None:
        return None
    homs = enumerate_homs(n.cod, x.cod, budget, fixed=fixed)
    return homs[0] if homs else None


# --------------------------------------------------------------------------
# locality through a sample of local objects


def _retract_of_sample(A, sample, budget=None):
    for i, L in enumerate(sample):
        for s in enumerate_homs(A, L, budget):
            fixed = _fixed_from(s, identity(A))
            if fixed is not None and enumerate_homs(L, A, budget, fixed=fixed):
                return i
    return None


def diers_local_status(A: FiniteAlgebra, G: GeometrySpec, sample, budget=None, test_objects=None) -> dict:
    """Three independent verdicts on ``A`` being local relative to ``sample``.

    ``u_local``: for each test object ``K`` and ``a: K -> A``, the family of
    etale maps under ``K`` that ``a`` does not factor through must fail to
    be localizing (some point of ``K`` avoids it).
    ``retract``: ``A`` is a retract of a sample object.
    ``cone_injective``: each ``a: K -> A`` factors through a point of ``K``.
    Test objects default to ``sample`` plus ``A``.
    """
    from .spectrum import points

    sample = list(sample)
    tests = list(test_objects) if test_objects is not None else sample + [A]

    u_local = True
    cone = True
    for K in tests:
        pts = points(K, G, budget, audit=False)
        etale = etale_maps_under(K, G, budget)
        for a in enumerate_homs(K, A, budget):
            avoid = [n for n in etale if factors_through(a, n, budget) is None]
            localizing = all(any(factors_through(p.map, n, budget) is not None for n in avoid) for p in pts)
            if localizing:
                u_local = False
            if not any(factors_through(a, p.map, budget) is not None for p in pts):
                cone = False
    retract = _retract_of_sample(A, sample, budget)
    return {"u_local": u_local, "retract": retract is not None, "cone_injective": cone,
            "retract_of": retract}


def localizing_topology(K: FiniteAlgebra, G: GeometrySpec, budget=None, max_families=None) -> list:
    """Families of etale maps under ``K`` through which every point of ``K`` factors.

    Families are tuples of indices into ``etale_maps_under(K, G)``, ordered by
    size then lexicographically.
    """
    from .spectrum import points

    objs = etale_maps_under(K, G, budget)
    pts = points(K, G, budget, audit=False)
    through = [frozenset(i for i, n in enumerate(objs) if factors_through(p.map, n, budget) is not None)
               for p in pts]
    cap = max_families if max_families is not None else budget
    out = []
    count = 0
    for r in range(len(objs) + 1):
        for fam in itertools.combinations(range(len(objs)), r):
            count += 1
            if cap is not None and count > cap:
                raise BudgetExceeded("localizing families", cap)
            s = set(fam)
            if all(t & s for t in through):
                out.append(fam)
    return out
