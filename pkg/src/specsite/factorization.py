"""Orthogonality and the (etale, local) factorization engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    descend,
    enumerate_homs,
    find_isomorphism,
    identity,
    iter_homs,
    pushout_surjection,
)
from .errors import InputError, StepRuleDiverged
from .plugin import GeometrySpec


@dataclass(frozen=True)
class LiftingProblem:
    left: Homomorphism    # l: K -> K'
    right: Homomorphism   # r: X -> Y
    top: Homomorphism     # K -> X
    bottom: Homomorphism  # K' -> Y

    def __post_init__(self):
        lhs = self.top.then(self.right)
        rhs = self.left.then(self.bottom)
        if lhs.map != rhs.map:
            raise InputError("lifting problem square does not commute")


def _fixed_from(l: Homomorphism, top: Homomorphism) -> Optional[dict]:
    # constraints d(l(x)) = top(x); None if they conflict
    fixed = {}
    for x, y in enumerate(l.map):
        v = top.map[x]
        if fixed.setdefault(y, v) != v:
            return None
    return fixed


def diagonal_fillers(p: LiftingProblem, budget=None) -> list:
    """All ``d: K' -> X`` with ``d ∘ l = top`` and ``r ∘ d = bottom``."""
    fixed = _fixed_from(p.left, p.top)
    if fixed is None:
        return []
    out = []
    for d in enumerate_homs(p.left.cod, p.right.dom, budget, fixed=fixed):
        if d.then(p.right).map == p.bottom.map:
            out.append(d)
    return out


def squares(l: Homomorphism, r: Homomorphism, budget=None):
    """Every commuting square from ``l`` to ``r``."""
    for top in enumerate_homs(l.dom, r.dom, budget):
        target = top.then(r)
        fixed = _fixed_from(l, target)
        if fixed is None:
            continue
        for bottom in enumerate_homs(l.cod, r.cod, budget, fixed=fixed):
            yield LiftingProblem(l, r, top, bottom)


def orthogonality_counterexample(l: Homomorphism, r: Homomorphism, budget=None):
    """A square from ``l`` to ``r`` without exactly one filler, or None."""
    for sq in squares(l, r, budget):
        if len(diagonal_fillers(sq, budget)) != 1:
            return sq
    return None


def is_orthogonal(l: Homomorphism, r: Homomorphism, budget=None) -> bool:
    return orthogonality_counterexample(l, r, budget) is None


# --------------------------------------------------------------------------
# etale witnesses and the factorization engine


@dataclass(frozen=True)
class Step:
    generator: int
    attachment: object
    map: Homomorphism


@dataclass(frozen=True)
class EtaleWitness:
    domain: FiniteAlgebra
    steps: tuple = ()

    @property
    def map(self) -> Homomorphism:
        e = identity(self.domain)
        for s in self.steps:
            e = e.then(s.map)
        return e

    @property
    def codomain(self) -> FiniteAlgebra:
        return self.steps[-1].map.cod if self.steps else self.domain

    def replay(self, G: GeometrySpec) -> Homomorphism:
        """Recompute every pushout from its attachment and compose."""
        e = identity(self.domain)
        for s in self.steps:
            q = G.generators[s.generator].push(s.attachment)
            if q != s.map or q.dom != e.cod:
                raise StepRuleDiverged("witness step does not replay", s)
            e = e.then(q)
        return e

    def to_json(self, G: GeometrySpec) -> list:
        return [
            {
                "generator": G.generators[s.generator].label,
                "attachment": G.generators[s.generator].describe(s.attachment),
                "map": list(s.map.map),
                "middle_size": s.map.cod.size,
            }
            for s in self.steps
        ]


def factorize(f: Homomorphism, G: GeometrySpec):
    """Factor ``f = u ∘ e`` with ``e`` a witnessed composite of generator pushouts and ``u`` local.

    Each step pushes out the generator instance proposed by the plugin's
    step rule and descends the remainder through the resulting quotient.
    A step that fails to shrink the middle object, or a remainder that
    cannot be descended, is a plugin bug.
    """
    if f.dom.signature != G.signature:
        raise InputError(f"homomorphism is not in theory {G.theory}")
    u = f
    steps = []
    while True:
        proposal = G.local_step(u)
        if proposal is None:
            break
        gi, attachment = proposal
        q = G.generators[gi].push(attachment)
        if q.dom != u.dom:
            raise StepRuleDiverged("step rule attached a generator to the wrong object", proposal)
        if q.cod.size >= q.dom.size:
            raise StepRuleDiverged("step did not shrink the middle object", proposal)
        try:
            u = descend(u, q)
        except InputError as exc:
            raise StepRuleDiverged(f"remainder does not factor through the step: {exc}", proposal)
        steps.append(Step(gi, attachment, q))
    if not G.local_map_test(u):
        raise StepRuleDiverged("step rule stopped on a non-local remainder", u)
    return EtaleWitness(f.dom, tuple(steps)), u


def middle_iso(e1: Homomorphism, u1: Homomorphism, e2: Homomorphism, u2: Homomorphism, budget=None):
    """Isomorphisms between two middle objects commuting with both legs."""
    out = []
    for m in iter_homs(e1.cod, e2.cod, budget, injective=True):
        if m.is_bijective() and e1.then(m).map == e2.map and m.then(u2).map == u1.map:
            out.append(m)
    return out


# --------------------------------------------------------------------------
# saturation checks


def verify_saturated(G: GeometrySpec, sample, budget=None, etale_test=None) -> dict:
    """Check the etale class on maps among ``sample`` algebras.

    Checks: isomorphisms are etale, etale maps compose, right cancellation
    (``m ∘ n`` and ``n`` etale imply ``m`` etale), and pushouts of etale
    maps and of generator instances are etale.  ``etale_test`` overrides the
    plugin's predicate (used to exercise the checks on broken plugins).
    """
    test = etale_test or G.etale_test
    sample = list(sample)
    homs = {}
    for i, A in enumerate(sample):
        for j, B in enumerate(sample):
            homs[i, j] = enumerate_homs(A, B, budget)
    etale = {key: [f for f in fs if test(f)] for key, fs in homs.items()}
    report = {"objects": len(sample), "maps": sum(len(v) for v in homs.values()), "checks": {}}

    def record(name, counterexample):
        report["checks"][name] = {"passed": counterexample is None, "counterexample": counterexample}

    bad = None
    for (i, j), fs in homs.items():
        for f in fs:
            if f.is_bijective() and not test(f):
                bad = {"iso": [i, j, list(f.map)]}
                break
        if bad:
            break
    record("isomorphisms", bad)

    bad = None
    n_obj = len(sample)
    for i in range(n_obj):
        for j in range(n_obj):
            for n in etale[i, j]:
                for k in range(n_obj):
                    for m in etale[j, k]:
                        if bad is None and not test(n.then(m)):
                            bad = {"triangle": [i, j, k], "n": list(n.map), "m": list(m.map)}
    record("composition", bad)

    bad = None
    for i in range(n_obj):
        for j in range(n_obj):
            for n in etale[i, j]:
                for k in range(n_obj):
                    for m in homs[j, k]:
                        if bad is None and test(n.then(m)) and not test(m):
                            bad = {"triangle": [i, j, k], "n": list(n.map), "m": list(m.map),
                                   "composite": list(n.then(m).map)}
    record("right_cancellation", bad)

    bad = None
    for i, A in enumerate(sample):
        for gi, att, q in G.generator_instances(A, budget):
            if bad is None and not test(q):
                bad = {"generator": G.generators[gi].label, "object": i, "map": list(q.map)}
        for j in range(n_obj):
            for n in etale[i, j]:
                if not n.is_surjective():
                    continue
                for k in range(n_obj):
                    for h in homs[i, k]:
                        q, _ = pushout_surjection(n, h)
                        if bad is None and not test(q):
                            bad = {"span": [i, j, k], "n": list(n.map), "h": list(h.map)}
    record("pushouts", bad)
    report["passed"] = all(c["passed"] for c in report["checks"].values())
    return report


def anel_refinement_witness(k: Homomorphism, a0: Homomorphism, a: Homomorphism, candidates=(), budget=None):
    """Search ``a0 = a1 ∘ a2`` through ``K1`` such that ``a`` factors through the intermediate pushout.

    ``k: K0 ->> K0'`` is a generator, ``a0: K0 -> B``, and ``a: K -> B'``
    maps into the pushout ``B'`` of ``k`` along ``a0``.  Candidate
    intermediate objects are tried in order, ``B`` itself last.  Returns
    ``(a1, a2, h)`` with ``h: K -> K1'`` or None.
    """
    B = a0.cod
    n, _ = pushout_surjection(k, a0)
    if a.cod != n.cod:
        raise InputError("a must land in the pushout of k along a0")
    for K1 in list(candidates) + [B]:
        for a2 in enumerate_homs(a0.dom, K1, budget):
            for a1 in enumerate_homs(K1, B, budget):
                if a2.then(a1).map != a0.map:
                    continue
                q1, _ = pushout_surjection(k, a2)
                comparison = descend(a1.then(n), q1)
                for h in enumerate_homs(a.dom, q1.cod, budget):
                    if h.then(comparison).map == a.map:
                        return a1, a2, h
    return None


def anel_refinement_check(k, a0, a, candidates=(), budget=None) -> bool:
    return anel_refinement_witness(k, a0, a, candidates, budget) is not None


def pushout_functoriality(k: Homomorphism, h: Homomorphism, g: Homomorphism) -> bool:
    """Pushing ``k`` along ``g ∘ h`` agrees with pushing along ``h`` then ``g``."""
    direct, _ = pushout_surjection(k, h.then(g))
    first, _ = pushout_surjection(k, h)
    second, _ = pushout_surjection(first, g)
    return direct.map == second.map and find_isomorphism(direct.cod, second.cod) is not None


__all__ = [
    "LiftingProblem",
    "diagonal_fillers",
    "squares",
    "is_orthogonal",
    "orthogonality_counterexample",
    "Step",
    "EtaleWitness",
    "factorize",
    "middle_iso",
    "verify_saturated",
    "anel_refinement_check",
    "anel_refinement_witness",
    "pushout_functoriality",
]
