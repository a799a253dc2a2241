"""Finite sites, presheaves, the sheaf condition and sheafification.

Covers are stored as generating families.  The Grothendieck topology they
generate is represented by its least covering sieve on each object
(``minimal_sieves``): on a finite site the covering sieves on ``c`` are
exactly the sieves containing that least one.  Sheafification is the plus
construction taken twice, with ``P⁺(c)`` the matching families on the least
covering sieve of ``c``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .algebra import FiniteAlgebra, _flat_index
from .errors import InputError, NotAFunctor


@dataclass(frozen=True, eq=False)
class FiniteSite:
    objects: tuple                 # labels
    arrows: tuple                  # (src, dst) object indices; arrow id = position
    composition: dict = field(repr=False)  # (g, f) -> g∘f for f: a -> b, g: b -> c
    identities: tuple = ()         # arrow id per object
    covers: tuple = ()             # per object: tuple of families (tuples of arrow ids)
    tags: Optional[tuple] = None   # optional per object, per family provenance tags

    def __post_init__(self):
        n = len(self.objects)
        if len(self.identities) != n:
            raise InputError("one identity arrow per object required")
        if len(self.covers) != n:
            raise InputError("one cover list per object required")
        for a, (s, d) in enumerate(self.arrows):
            if not (0 <= s < n and 0 <= d < n):
                raise InputError(f"arrow {a} has an endpoint outside the object list")
        for c, i in enumerate(self.identities):
            if self.arrows[i] != (c, c):
                raise InputError(f"identity of object {c} is not an endomorphism of it")
        for f, (a, b) in enumerate(self.arrows):
            for g in self.arrows_from(b):
                h = self.composition.get((g, f))
                if h is None:
                    raise InputError(f"composite of arrows {g} and {f} missing")
                if self.arrows[h] != (a, self.arrows[g][1]):
                    raise InputError(f"composite of {g} and {f} has wrong endpoints")
            if self.composition[(self.identities[b], f)] != f or self.composition[(f, self.identities[a])] != f:
                raise InputError(f"identity law fails at arrow {f}")
        for f, (a, b) in enumerate(self.arrows):
            for g in self.arrows_from(b):
                for h in self.arrows_from(self.arrows[g][1]):
                    if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                        raise InputError(f"associativity fails at ({h}, {g}, {f})")
        for c, fams in enumerate(self.covers):
            for fam in fams:
                for a in fam:
                    if self.arrows[a][1] != c:
                        raise InputError(f"cover of object {c} contains arrow {a} not into it")

    @cached_property
    def _into(self):
        out = [[] for _ in self.objects]
        for a, (_, d) in enumerate(self.arrows):
            out[d].append(a)
        return tuple(tuple(x) for x in out)

    @cached_property
    def _from(self):
        out = [[] for _ in self.objects]
        for a, (s, _) in enumerate(self.arrows):
            out[s].append(a)
        return tuple(tuple(x) for x in out)

    def arrows_into(self, c) -> tuple:
        return self._into[c]

    def arrows_from(self, c) -> tuple:
        return self._from[c]

    def hom(self, a, b) -> tuple:
        return tuple(f for f in self._from[a] if self.arrows[f][1] == b)

    def src(self, f) -> int:
        return self.arrows[f][0]

    def dst(self, f) -> int:
        return self.arrows[f][1]

    def compose(self, g, f) -> int:
        """``g ∘ f``."""
        return self.composition[(g, f)]

    def __len__(self):
        return len(self.objects)

    # sieves -------------------------------------------------------------

    def generated_sieve(self, c, family) -> frozenset:
        return frozenset(self.compose(f, g) for f in family for g in self.arrows_into(self.src(f)))

    def pullback_sieve(self, h, sieve) -> frozenset:
        """``h*S`` for ``h: d -> c`` and a sieve ``S`` on ``c``."""
        return frozenset(g for g in self.arrows_into(self.src(h)) if self.compose(h, g) in sieve)

    @cached_property
    def minimal_sieves(self) -> tuple:
        """Least covering sieve on each object for the topology generated by the covers."""
        R = [frozenset(self.arrows_into(c)) for c in range(len(self.objects))]
        changed = True
        while changed:
            changed = False
            for c, fams in enumerate(self.covers):
                for fam in fams:
                    new = R[c] & self.generated_sieve(c, fam)
                    if new != R[c]:
                        R[c] = new
                        changed = True
            for h, (d, c) in enumerate(self.arrows):
                new = R[d] & self.pullback_sieve(h, R[c])
                if new != R[d]:
                    R[d] = new
                    changed = True
            for c in range(len(self.objects)):
                new = frozenset(self.compose(f, g) for f in R[c] for g in R[self.src(f)])
                if new != R[c]:
                    R[c] = new
                    changed = True
        return tuple(R)

    def is_covering(self, c, sieve) -> bool:
        return self.minimal_sieves[c] <= frozenset(sieve)

    def closed_sieves(self) -> list:
        """Sets of objects closed downward along arrows and under covering.

        These are the subterminal sheaves (the opens of the topos) when the
        site has a terminal object.
        """
        n = len(self.objects)
        below = [set() for _ in range(n)]
        for s, d in self.arrows:
            below[d].add(s)
        needs = [frozenset(self.src(f) for f in self.minimal_sieves[c]) for c in range(n)]
        out = []
        for bits in range(1 << n):
            U = {c for c in range(n) if bits >> c & 1}
            if any(not below[c] <= U for c in U):
                continue
            if any(c not in U and needs[c] <= U for c in range(n)):
                continue
            out.append(frozenset(U))
        return sorted(out, key=lambda u: (len(u), sorted(u)))


def site_from_poset(labels, leq, covers=None) -> FiniteSite:
    """The site of a finite preorder: one arrow ``x -> y`` whenever ``leq(x, y)``.

    ``covers`` maps an object index to families given as lists of object
    indices (the arrows from those objects).
    """
    n = len(labels)
    arrows = []
    index = {}
    for x in range(n):
        for y in range(n):
            if leq(x, y):
                index[x, y] = len(arrows)
                arrows.append((x, y))
    comp = {}
    for (x, y), f in index.items():
        for z in range(n):
            if (y, z) in index:
                comp[(index[y, z], f)] = index[x, z]
    ids = tuple(index[x, x] for x in range(n))
    cov = [[] for _ in range(n)]
    for c, fams in (covers or {}).items():
        for fam in fams:
            cov[c].append(tuple(index[d, c] for d in fam))
    return FiniteSite(tuple(labels), tuple(arrows), comp, ids, tuple(tuple(f) for f in cov))


# --------------------------------------------------------------------------
# presheaves


@dataclass(frozen=True, eq=False)
class Presheaf:
    """``P(c)`` as ``range(sizes[c])``; ``maps[a]`` is ``P(c) -> P(d)`` for arrow ``a: d -> c``."""

    site: FiniteSite
    sizes: tuple
    maps: tuple
    algebras: Optional[tuple] = None

    def __post_init__(self):
        S = self.site
        if len(self.sizes) != len(S.objects) or len(self.maps) != len(S.arrows):
            raise InputError("presheaf needs one value per object and one map per arrow")
        if self.algebras is not None:
            if tuple(A.size for A in self.algebras) != tuple(self.sizes):
                raise InputError("algebra sizes disagree with presheaf sizes")
        for a, (d, c) in enumerate(S.arrows):
            m = self.maps[a]
            if len(m) != self.sizes[c] or any(not (0 <= v < self.sizes[d]) for v in m):
                raise InputError(f"restriction along arrow {a} has the wrong shape")
        for c, i in enumerate(S.identities):
            if tuple(self.maps[i]) != tuple(range(self.sizes[c])):
                raise InputError(f"restriction along identity of {c} is not the identity")
        for (g, f), h in S.composition.items():
            # P(g∘f) = P(f) ∘ P(g)
            if tuple(self.maps[h]) != tuple(self.maps[f][v] for v in self.maps[g]):
                raise InputError(f"restriction is not functorial at ({g}, {f})")
        if self.algebras is not None:
            for a, (d, c) in enumerate(S.arrows):
                if not _is_hom(self.algebras[c], self.algebras[d], self.maps[a]):
                    raise InputError(f"restriction along arrow {a} is not a homomorphism")

    def restrict(self, a, x):
        return self.maps[a][x]

    def value(self, c) -> Optional[FiniteAlgebra]:
        return self.algebras[c] if self.algebras is not None else None


def _is_hom(A, B, m):
    for (_, arity), ta, tb in zip(A.signature.operations, A.tables, B.tables):
        for i, args in enumerate(itertools.product(range(A.size), repeat=arity)):
            if m[ta[i]] != tb[_flat_index([m[x] for x in args], B.size)]:
                return False
    return True


def matching_families(P: Presheaf, sieve) -> list:
    """All matching families on ``sieve`` as tuples aligned with ``sorted(sieve)``."""
    S = P.site
    arrows = sorted(sieve)
    pos = {f: i for i, f in enumerate(arrows)}
    # forced consequences: s_{f∘g} = P(g)(s_f)
    consequences = {f: [(pos[S.compose(f, g)], g) for g in S.arrows_into(S.src(f)) if S.compose(f, g) in pos]
                    for f in arrows}
    values = [None] * len(arrows)
    out = []

    def assign(i, v, trail):
        stack = [(i, v)]
        while stack:
            i, v = stack.pop()
            if values[i] is not None:
                if values[i] != v:
                    return False
                continue
            values[i] = v
            trail.append(i)
            for j, g in consequences[arrows[i]]:
                stack.append((j, P.maps[g][v]))
        return True

    def search(k):
        while k < len(arrows) and values[k] is not None:
            k += 1
        if k == len(arrows):
            out.append(tuple(values))
            return
        f = arrows[k]
        for v in range(P.sizes[S.src(f)]):
            trail = []
            if assign(k, v, trail):
                search(k + 1)
            for i in trail:
                values[i] = None

    search(0)
    return sorted(out)


def _restrict_section(P, c, x, sieve):
    S = P.site
    return tuple(P.maps[f][x] for f in sorted(sieve))


def sheaf_defects(P: Presheaf, c, sieve):
    """``(non_separated, non_glued)`` for the sheaf condition on one sieve."""
    fams = matching_families(P, sieve)
    images = [_restrict_section(P, c, x, sieve) for x in range(P.sizes[c])]
    return len(set(images)) != len(images), len(set(images)) != len(fams)


def check_sheaf(P: Presheaf) -> dict:
    """Sheaf condition on every stored cover family and every least covering sieve."""
    S = P.site
    failures = []
    for c in range(len(S.objects)):
        for fam in S.covers[c]:
            sep, glue = sheaf_defects(P, c, S.generated_sieve(c, fam))
            if sep or glue:
                failures.append({"object": c, "kind": "family", "family": list(fam),
                                 "defect": "non-separated" if sep else "non-glued"})
        sieve = S.minimal_sieves[c]
        sep, glue = sheaf_defects(P, c, sieve)
        if sep or glue:
            failures.append({"object": c, "kind": "sieve", "family": sorted(sieve),
                             "defect": "non-separated" if sep else "non-glued"})
    return {"ok": not failures, "failures": failures}


def is_sheaf(P: Presheaf) -> bool:
    S = P.site
    for c in range(len(S.objects)):
        sep, glue = sheaf_defects(P, c, S.minimal_sieves[c])
        if sep or glue:
            return False
    return True


def plus(P: Presheaf):
    """One plus construction step; returns ``(P⁺, unit)`` with the unit as per-object maps."""
    S = P.site
    R = S.minimal_sieves
    fams = [matching_families(P, R[c]) for c in range(len(S.objects))]
    index = [{s: i for i, s in enumerate(fs)} for fs in fams]
    order = [sorted(R[c]) for c in range(len(S.objects))]
    maps = []
    for h, (d, c) in enumerate(S.arrows):
        pos_c = {f: i for i, f in enumerate(order[c])}
        m = []
        for s in fams[c]:
            t = tuple(s[pos_c[S.compose(h, g)]] for g in order[d])
            m.append(index[d][t])
        maps.append(tuple(m))
    unit = []
    for c in range(len(S.objects)):
        unit.append(tuple(index[c][_restrict_section(P, c, x, R[c])] for x in range(P.sizes[c])))
    algebras = None
    if P.algebras is not None:
        algebras = tuple(_componentwise_algebra(P, c, order[c], fams[c], index[c]) for c in range(len(S.objects)))
    return Presheaf(S, tuple(len(f) for f in fams), tuple(maps), algebras), tuple(unit)


def _componentwise_algebra(P, c, order, fams, index):
    A0 = P.algebras[c]
    sig = A0.signature
    n = len(fams)
    tables = []
    for (op, arity) in sig.operations:
        flat = []
        for args in itertools.product(range(n), repeat=arity):
            s = tuple(P.algebras[P.site.src(f)].op(op, *[fams[a][i] for a in args]) for i, f in enumerate(order))
            if s not in index:
                raise InputError("operations do not preserve matching families")
            flat.append(index[s])
        tables.append(tuple(flat))
    return FiniteAlgebra(sig, n, tuple(tables))


def sheafify(P: Presheaf):
    """``(a(P), unit)`` via the plus construction applied twice."""
    P1, u1 = plus(P)
    P2, u2 = plus(P1)
    unit = tuple(tuple(u2[c][v] for v in u1[c]) for c in range(len(P.site.objects)))
    return P2, unit


# --------------------------------------------------------------------------
# functors between sites


@dataclass(frozen=True, eq=False)
class SiteFunctor:
    source: FiniteSite
    target: FiniteSite
    on_objects: tuple
    on_arrows: tuple

    def __post_init__(self):
        S, T = self.source, self.target
        if len(self.on_objects) != len(S.objects) or len(self.on_arrows) != len(S.arrows):
            raise NotAFunctor("functor tables have the wrong length")
        for a, (s, d) in enumerate(S.arrows):
            if T.arrows[self.on_arrows[a]] != (self.on_objects[s], self.on_objects[d]):
                raise NotAFunctor(f"arrow {a} is sent to an arrow with the wrong endpoints")
        for c, i in enumerate(S.identities):
            if self.on_arrows[i] != T.identities[self.on_objects[c]]:
                raise NotAFunctor(f"identity of {c} is not preserved")
        for (g, f), h in S.composition.items():
            if T.compose(self.on_arrows[g], self.on_arrows[f]) != self.on_arrows[h]:
                raise NotAFunctor(f"composite ({g}, {f}) is not preserved")

    def preserves_covers(self) -> bool:
        """Images of covering sieves generate covering sieves."""
        S, T = self.source, self.target
        for c in range(len(S.objects)):
            image = [self.on_arrows[f] for f in S.minimal_sieves[c]]
            if not T.is_covering(self.on_objects[c], T.generated_sieve(self.on_objects[c], image)):
                return False
        return True


def identity_functor(S: FiniteSite) -> SiteFunctor:
    return SiteFunctor(S, S, tuple(range(len(S.objects))), tuple(range(len(S.arrows))))


def restrict_along(P: Presheaf, F: SiteFunctor) -> Presheaf:
    """``P ∘ F`` on the source site of ``F``."""
    if F.target is not P.site:
        raise NotAFunctor("functor does not land in the presheaf's site")
    sizes = tuple(P.sizes[F.on_objects[c]] for c in range(len(F.source.objects)))
    maps = tuple(P.maps[F.on_arrows[a]] for a in range(len(F.source.arrows)))
    algebras = None
    if P.algebras is not None:
        algebras = tuple(P.algebras[F.on_objects[c]] for c in range(len(F.source.objects)))
    return Presheaf(F.source, sizes, maps, algebras)


def constant_presheaf(S: FiniteSite, size: int, algebra=None) -> Presheaf:
    ident = tuple(range(size))
    return Presheaf(S, (size,) * len(S.objects), (ident,) * len(S.arrows),
                    (algebra,) * len(S.objects) if algebra is not None else None)


# --------------------------------------------------------------------------
# isomorphisms


def site_isomorphism(S: FiniteSite, T: FiniteSite) -> Optional[SiteFunctor]:
    """A category isomorphism matching least covering sieves, or None."""
    n = len(S.objects)
    if n != len(T.objects) or len(S.arrows) != len(T.arrows):
        return None

    def profile(X, c):
        return (len(X.arrows_into(c)), len(X.arrows_from(c)), len(X.hom(c, c)), len(X.minimal_sieves[c]))

    for perm in itertools.permutations(range(n)):
        if any(profile(S, c) != profile(T, perm[c]) for c in range(n)):
            continue
        if any(len(S.hom(a, b)) != len(T.hom(perm[a], perm[b])) for a in range(n) for b in range(n)):
            continue
        F = _match_arrows(S, T, perm)
        if F is not None:
            return F
    return None


def _match_arrows(S, T, perm):
    n = len(S.objects)
    pairs = [(a, b) for a in range(n) for b in range(n) if S.hom(a, b)]
    choices = [list(itertools.permutations(T.hom(perm[a], perm[b]))) for a, b in pairs]
    for combo in itertools.product(*choices):
        on_arrows = [None] * len(S.arrows)
        for (a, b), image in zip(pairs, combo):
            for f, g in zip(S.hom(a, b), image):
                on_arrows[f] = g
        try:
            F = SiteFunctor(S, T, tuple(perm), tuple(on_arrows))
        except NotAFunctor:
            continue
        if all(frozenset(F.on_arrows[f] for f in S.minimal_sieves[c]) == T.minimal_sieves[perm[c]]
               for c in range(n)):
            return F
    return None


def presheaf_isomorphism(P: Presheaf, Q: Presheaf, budget=None) -> Optional[tuple]:
    """A natural isomorphism ``P -> Q`` over the same site (algebra isos if valued in algebras)."""
    from .algebra import isomorphisms

    S = P.site
    n = len(S.objects)
    if P.sizes != Q.sizes:
        return None
    if P.algebras is not None and Q.algebras is not None:
        options = [[f.map for f in isomorphisms(P.algebras[c], Q.algebras[c], budget)] for c in range(n)]
    else:
        options = [list(itertools.permutations(range(P.sizes[c]))) for c in range(n)]
    chosen = [None] * n

    def natural_at(c):
        for a in S.arrows_into(c) + S.arrows_from(c):
            d, e = S.arrows[a]
            if chosen[d] is None or chosen[e] is None:
                continue
            # Q(a) ∘ φ_e = φ_d ∘ P(a)
            if any(Q.maps[a][chosen[e][x]] != chosen[d][P.maps[a][x]] for x in range(P.sizes[e])):
                return False
        return True

    def search(c):
        if c == n:
            return True
        for m in options[c]:
            chosen[c] = m
            if natural_at(c) and search(c + 1):
                return True
        chosen[c] = None
        return False

    return tuple(chosen) if search(0) else None
