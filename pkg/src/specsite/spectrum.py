"""The spectrum of a single finite algebra under a geometry.

Site objects are the etale maps ``n: B -> C`` (identity first); there is a
site arrow ``n' -> n`` for each ``m: cod n -> cod n'`` with ``m ∘ n = n'``.
Covers of ``n`` are the generalized covers of ``cod n`` composed with ``n``.
Points are local forms, proposed by the plugin and verified here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .algebra import FiniteAlgebra, Homomorphism, enumerate_homs, find_isomorphism, pushout_surjection
from .errors import (
    CompletenessGap,
    NotLocalInput,
    OracleDisagreement,
    StalkMismatch,
    UniversalityGap,
    VerificationFailure,
)
from .factorization import EtaleWitness, factorize
from .geometry import etale_closure, factors_through, generalized_covers, is_local_object
from .plugin import GeometrySpec
from .site import FiniteSite, Presheaf, SiteFunctor, sheafify, site_isomorphism


@dataclass(frozen=True, eq=False)
class SpectralSite:
    base: FiniteAlgebra
    geometry: GeometrySpec
    objects: tuple        # etale maps out of base
    witnesses: tuple      # EtaleWitness per object
    site: FiniteSite
    connecting: tuple     # per site arrow n' -> n, the map m: cod n -> cod n'
    provenance: tuple     # per object, per cover family: (generating cover index, attachment)

    def index_of(self, n: Homomorphism) -> Optional[int]:
        return self._index.get(n.map)

    @property
    def _index(self):
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {n.map: i for i, n in enumerate(self.objects)}
            self.__dict__["_index_cache"] = cached
        return cached


def _spectral_site(B, G, budget):
    closure = etale_closure(B, G, budget)
    ordered = sorted(closure.items(), key=lambda kv: (-kv[1].map.cod.size, kv[0]))
    objects = tuple(w.map for _, w in ordered)
    witnesses = tuple(w for _, w in ordered)
    index = {n.map: i for i, n in enumerate(objects)}
    arrows, connecting, by_ends = [], [], {}
    for i, n in enumerate(objects):          # target of the site arrow
        for j, n2 in enumerate(objects):     # source
            m = factors_through(n2, n, budget)
            if m is not None:
                by_ends[j, i] = len(arrows)
                arrows.append((j, i))
                connecting.append(m)
    comp = {}
    for (j, i), f in by_ends.items():
        for (i2, k), g in by_ends.items():
            if i2 == i:
                comp[(g, f)] = by_ends[j, k]
    ids = tuple(by_ends[i, i] for i in range(len(objects)))
    covers, provenance = [], []
    for i, n in enumerate(objects):
        fams, prov = [], []
        for cov in generalized_covers(n.cod, G, budget):
            fam = []
            for q in cov.family:
                j = index.get(n.then(q).map)
                if j is None:
                    raise VerificationFailure("cover member is not an etale map under the base", list(q.map))
                fam.append(by_ends[j, i])
            fams.append(tuple(fam))
            prov.append((cov.cover, G.cover_generators[cov.cover].describe(cov.attachment)))
        covers.append(tuple(fams))
        provenance.append(tuple(prov))
    labels = tuple(tuple(n.map) for n in objects)
    site = FiniteSite(labels, tuple(arrows), comp, ids, tuple(covers))
    return SpectralSite(B, G, objects, witnesses, site, tuple(connecting), tuple(provenance))


_cached_site = lru_cache(maxsize=256)(_spectral_site)


def spectral_site(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> SpectralSite:
    return _cached_site(B, G, budget)


# --------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class Point:
    label: tuple
    map: Homomorphism       # the local form x: B -> A_x
    witness: EtaleWitness = field(compare=False)

    @property
    def local_object(self) -> FiniteAlgebra:
        return self.map.cod


def local_forms(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> list:
    """Brute force: every etale map under ``B`` whose codomain is local."""
    SS = spectral_site(B, G, budget)
    return [n for n in SS.objects if is_local_object(n.cod, G, budget)]


def points(B: FiniteAlgebra, G: GeometrySpec, budget=None, audit=True) -> list:
    """Plugin-proposed local forms, each verified; optionally audited for completeness."""
    return list(_points(B, G, budget, audit))


@lru_cache(maxsize=256)
def _points(B, G, budget, audit):
    closure = etale_closure(B, G, budget)
    out = []
    for label, x in G.propose_points(B):
        w = closure.get(x.map)
        if w is None or w.map != x:
            raise OracleDisagreement("proposed point is not an etale map under the base", label)
        if w.replay(G) != x:
            raise OracleDisagreement("witness of a proposed point does not replay", label)
        if not is_local_object(x.cod, G, budget):
            raise OracleDisagreement("proposed point does not land in a local object", label)
        out.append(Point(tuple(label), x, w))
    if len({p.map.map for p in out}) != len(out):
        raise OracleDisagreement("plugin proposed the same local form twice", [p.label for p in out])
    if audit:
        proposed = {p.map.map for p in out}
        brute = local_forms(B, G, budget)
        for n in brute:
            if n.map not in proposed:
                raise CompletenessGap("local form not proposed by the plugin", list(n.map))
            for phi in enumerate_homs(B, n.cod, budget):
                w, _ = factorize(phi, G)
                if w.map.map not in proposed:
                    raise CompletenessGap("factorization produced an unproposed local form", list(phi.map))
    return tuple(out)


def specialization(pts) -> list:
    """``order[i][j]``: a map of local forms ``x_i -> x_j`` under the base exists."""
    return [[factors_through(q.map, p.map) is not None for q in pts] for p in pts]


def basic_opens(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> dict:
    """Site object index -> set of point indices factoring through it."""
    SS = spectral_site(B, G, budget)
    pts = points(B, G, budget, audit=False)
    return {i: frozenset(k for k, p in enumerate(pts) if factors_through(p.map, n, budget) is not None)
            for i, n in enumerate(SS.objects)}


# --------------------------------------------------------------------------
# structural sheaf and stalks


def cod_presheaf(SS: SpectralSite) -> Presheaf:
    return Presheaf(SS.site, tuple(n.cod.size for n in SS.objects), tuple(m.map for m in SS.connecting),
                    tuple(n.cod for n in SS.objects))


@lru_cache(maxsize=256)
def _structural(B, G, budget):
    SS = spectral_site(B, G, budget)
    return sheafify(cod_presheaf(SS))


def structural_sheaf(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> Presheaf:
    return _structural(B, G, budget)[0]


def structural_unit(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> tuple:
    return _structural(B, G, budget)[1]


def stalk_colimit(SS: SpectralSite, P: Presheaf, x: Homomorphism) -> FiniteAlgebra:
    """Filtered colimit of ``P`` over the site objects that ``x`` factors through."""
    S = SS.site
    idx = [i for i, n in enumerate(SS.objects) if factors_through(x, n) is not None]
    offset, total = {}, 0
    for i in idx:
        offset[i] = total
        total += P.sizes[i]
    parent = list(range(total))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    inside = set(idx)
    for a, (j, i) in enumerate(S.arrows):
        if i in inside and j in inside:
            for v in range(P.sizes[i]):
                r1, r2 = find(offset[i] + v), find(offset[j] + P.maps[a][v])
                if r1 != r2:
                    parent[max(r1, r2)] = min(r1, r2)
    roots = sorted({find(v) for v in range(total)})
    cls = {r: k for k, r in enumerate(roots)}
    owner = []
    for i in idx:
        owner.extend((i, v) for v in range(P.sizes[i]))

    def common(objs):
        for k in idx:
            if all(S.hom(k, i) for i in objs):
                return k
        raise VerificationFailure("index category of the stalk is not filtered", objs)

    sig = P.algebras[idx[0]].signature
    n = len(roots)
    reps = [owner[r] for r in roots]
    tables = []
    for op, arity in sig.operations:
        flat = []
        for args in itertools.product(range(n), repeat=arity):
            objs = [reps[a][0] for a in args]
            k = common(objs) if objs else idx[-1]
            vals = [P.maps[S.hom(k, reps[a][0])[0]][reps[a][1]] for a in args]
            r = P.algebras[k].op(op, *vals)
            flat.append(cls[find(offset[k] + r)])
        tables.append(tuple(flat))
    return FiniteAlgebra(sig, n, tuple(tables))


def stalk(B: FiniteAlgebra, G: GeometrySpec, point: Point, budget=None, closed_form=None) -> FiniteAlgebra:
    """Stalk of the structural sheaf at ``point``, checked against ``A_x`` and a closed form."""
    SS = spectral_site(B, G, budget)
    Bt = structural_sheaf(B, G, budget)
    A = stalk_colimit(SS, Bt, point.map)
    if find_isomorphism(A, point.local_object) is None:
        raise StalkMismatch("stalk is not isomorphic to the local form's codomain", point.label)
    if not is_local_object(A, G, budget):
        raise StalkMismatch("stalk is not a local object", point.label)
    if closed_form is not None and find_isomorphism(A, closed_form) is None:
        raise StalkMismatch("stalk differs from the plugin's closed form", point.label)
    return A


# --------------------------------------------------------------------------
# functoriality, slices, local toposes, global sections


def spec_functor(f: Homomorphism, G: GeometrySpec, budget=None):
    """The site functor ``n ↦ f_*n`` from the site of ``dom f`` to that of ``cod f``."""
    SB = spectral_site(f.dom, G, budget)
    SC = spectral_site(f.cod, G, budget)
    on_objects = []
    for n in SB.objects:
        pushed, _ = pushout_surjection(n, f)
        i = SC.index_of(pushed)
        if i is None:
            raise VerificationFailure("pushout of an etale map is not etale", list(n.map))
        on_objects.append(i)
    on_arrows = []
    for j, i in SB.site.arrows:
        hs = SC.site.hom(on_objects[j], on_objects[i])
        if not hs:
            raise VerificationFailure("arrow has no image under the pushout functor", (j, i))
        on_arrows.append(hs[0])
    F = SiteFunctor(SB.site, SC.site, tuple(on_objects), tuple(on_arrows))
    return F, F.preserves_covers()


def _coslice(SS: SpectralSite, i: int):
    """The site of arrows into ``i`` (etale maps factoring through object ``i``)."""
    S = SS.site
    objs = list(S.arrows_into(i))
    pos = {a: k for k, a in enumerate(objs)}
    arrows, comp, by = [], {}, {}
    for a in objs:
        for b in objs:
            for h in S.hom(S.src(a), S.src(b)):
                if S.compose(b, h) == a:
                    by[a, b, h] = len(arrows)
                    arrows.append((pos[a], pos[b]))
    keyed = list(by.items())
    for (a, b, h), f in keyed:
        for (b2, c, g), f2 in keyed:
            if b2 == b:
                comp[(f2, f)] = by[a, c, S.compose(g, h)]
    ids = tuple(by[a, a, S.identities[S.src(a)]] for a in objs)
    covers = []
    for a in objs:
        fams = []
        for fam in S.covers[S.src(a)]:
            fams.append(tuple(by[S.compose(a, g), a, g] for g in fam))
        covers.append(tuple(fams))
    return FiniteSite(tuple(objs), tuple(arrows), comp, ids, tuple(covers)), objs


def slice_check(B: FiniteAlgebra, G: GeometrySpec, i: int, budget=None) -> bool:
    """The site of ``cod n`` is isomorphic to the coslice under ``n`` (object ``i``)."""
    SS = spectral_site(B, G, budget)
    n = SS.objects[i]
    SC = spectral_site(n.cod, G, budget)
    coslice, objs = _coslice(SS, i)
    # direct candidate: the arrow n' -> n goes to its connecting map m (m ∘ n = n')
    on_objects = []
    for a in objs:
        k = SC.index_of(SS.connecting[a])
        if k is None:
            on_objects = None
            break
        on_objects.append(k)
    if on_objects is not None and sorted(on_objects) == list(range(len(SC.objects))):
        on_arrows = []
        for s, d in coslice.arrows:
            hs = SC.site.hom(on_objects[s], on_objects[d])
            if not hs:
                on_arrows = None
                break
            on_arrows.append(hs[0])
        if on_arrows is not None:
            try:
                F = SiteFunctor(coslice, SC.site, tuple(on_objects), tuple(on_arrows))
                if len(set(on_arrows)) == len(SC.site.arrows) and all(
                    frozenset(F.on_arrows[f] for f in coslice.minimal_sieves[c])
                    == SC.site.minimal_sieves[on_objects[c]]
                    for c in range(len(objs))
                ):
                    return True
            except Exception:
                pass
    return site_isomorphism(coslice, SC.site) is not None


def local_topos_check(A: FiniteAlgebra, G: GeometrySpec, budget=None) -> dict:
    """The identity object is covered only by sieves containing it, and a least point exists."""
    if not is_local_object(A, G, budget):
        raise NotLocalInput("local topos check needs a local object")
    SS = spectral_site(A, G, budget)
    identity_local = SS.site.identities[0] in SS.site.minimal_sieves[0]
    pts = points(A, G, budget)
    order = specialization(pts)
    least = [i for i in range(len(pts)) if all(order[i][j] for j in range(len(pts)))]
    focal_is_identity = bool(least) and pts[least[0]].map.is_bijective()
    return {
        "identity_local": identity_local,
        "focal_point": list(pts[least[0]].label) if least else None,
        "focal_is_identity": focal_is_identity,
        "ok": identity_local and len(least) == 1 and focal_is_identity,
    }


def global_sections_unit(B: FiniteAlgebra, G: GeometrySpec, local_sample=(), budget=None):
    """``Γ`` of the structural sheaf, the unit ``B -> Γ``, and a universality audit.

    For every local ``A`` in ``local_sample`` and every ``φ: B -> A`` there
    must be exactly one point ``x`` and local map ``u: A_x -> A`` with
    ``u ∘ x = φ``.
    """
    Bt = structural_sheaf(B, G, budget)
    unit = structural_unit(B, G, budget)
    Gamma = Bt.algebras[0]
    eta = Homomorphism(B, Gamma, unit[0])
    pts = points(B, G, budget)
    checked = 0
    for A in local_sample:
        for phi in enumerate_homs(B, A, budget):
            found = []
            for k, p in enumerate(pts):
                u = factors_through(phi, p.map, budget)
                if u is not None and G.local_map_test(u):
                    found.append(k)
            if len(found) != 1:
                raise UniversalityGap(f"{len(found)} factorizations through points",
                                      {"phi": list(phi.map), "points": [list(pts[k].label) for k in found]})
            checked += 1
    report = {"gamma_size": Gamma.size, "eta_iso": eta.is_bijective(), "maps_checked": checked}
    return Gamma, eta, report


def spectrum_report(B: FiniteAlgebra, G: GeometrySpec, budget=None) -> dict:
    """Points, specialization (both orientations), basis, sheaf values, stalks and verdicts."""
    from .site import check_sheaf

    SS = spectral_site(B, G, budget)
    pts = points(B, G, budget)
    order = specialization(pts)
    Bt = structural_sheaf(B, G, budget)
    opens = basic_opens(B, G, budget)
    stalks = []
    for p in pts:
        A = stalk(B, G, p, budget)
        stalks.append({"point": list(p.label), "size": A.size})
    sheaf = check_sheaf(Bt)
    _, eta, gamma = global_sections_unit(B, G, (), budget)
    k = len(pts)
    return {
        "points": [{"label": list(p.label), "map": list(p.map.map), "local_size": p.local_object.size,
                    "witness": p.witness.to_json(G)} for p in pts],
        "specialization": [[i, j] for i in range(k) for j in range(k) if i != j and order[i][j]],
        "specialization_dual": [[j, i] for i in range(k) for j in range(k) if i != j and order[i][j]],
        "basis": [{"object": i, "map": list(n.map), "value_size": Bt.sizes[i],
                   "open": sorted(opens[i])} for i, n in enumerate(SS.objects)],
        "site": {"objects": len(SS.objects), "arrows": len(SS.site.arrows),
                 "covers": [[list(f) for f in fams] for fams in SS.site.covers]},
        "opens": [sorted(U) for U in SS.site.closed_sieves()] if len(SS.objects) <= 16 else None,
        "stalks": stalks,
        "verdicts": {
            "check_sheaf": sheaf["ok"],
            "stalks_match": True,
            "eta_iso": gamma["eta_iso"],
        },
    }
