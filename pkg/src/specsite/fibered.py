"""Total spectral site of a presheaf of algebras over a finite base site.

Objects are pairs ``(c, i)`` with ``i`` an object of the spectral site of
``F(c)``.  An arrow ``(d, j) -> (c, i)`` is a base arrow ``s: d -> c``
together with ``h: cod n_i -> cod n_j`` such that ``h ∘ n_i = n_j ∘ F(s)``.
Vertical covers come from each fiber; horizontal covers lift each base cover
along pushouts (cartesian lifts), at every fiber object.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .algebra import Homomorphism, pushout_surjection
from .errors import EquivalenceViolation, InputError, RestrictionMismatch
from .geometry import factors_through
from .plugin import GeometrySpec
from .site import (
    FiniteSite,
    Presheaf,
    SiteFunctor,
    check_sheaf,
    is_sheaf,
    matching_families,
    presheaf_isomorphism,
    restrict_along,
    sheafify,
)
from .spectrum import SpectralSite, spectral_site, structural_sheaf


@dataclass(frozen=True, eq=False)
class FiberedInput:
    base: FiniteSite
    F: Presheaf

    def __post_init__(self):
        if self.F.site is not self.base:
            raise InputError("presheaf lives on a different site")
        if self.F.algebras is None:
            raise InputError("fibered input needs an algebra-valued presheaf")


@dataclass(frozen=True, eq=False)
class TotalSite:
    input: FiberedInput
    fibers: tuple           # SpectralSite per base object
    objects: tuple          # (c, i)
    site: FiniteSite        # covers: vertical + horizontal at every fiber object
    literal_site: FiniteSite  # covers: vertical + horizontal at identity objects only
    arrow_data: tuple       # per arrow (s, h) with h a Homomorphism
    kinds: tuple            # per object, per family in ``site.covers``: "vertical" / "horizontal"
    lifts: dict             # (base arrow s, i) -> (object index of the lift, arrow index)

    def index(self, c, i) -> int:
        return self._pos[c, i]

    @property
    def _pos(self):
        cached = self.__dict__.get("_pos_cache")
        if cached is None:
            cached = {o: k for k, o in enumerate(self.objects)}
            self.__dict__["_pos_cache"] = cached
        return cached

    def projection(self) -> SiteFunctor:
        B = self.input.base
        return SiteFunctor(self.site, B, tuple(c for c, _ in self.objects), tuple(s for s, _ in self.arrow_data))

    def fiber_inclusion(self, c) -> SiteFunctor:
        SS = self.fibers[c]
        base = self.input.base
        idc = base.identities[c]
        on_objects = tuple(self.index(c, i) for i in range(len(SS.objects)))
        on_arrows = []
        for a, (j, i) in enumerate(SS.site.arrows):
            hits = [t for t in self.site.hom(self.index(c, j), self.index(c, i)) if self.arrow_data[t][0] == idc]
            on_arrows.append(hits[0])
        return SiteFunctor(SS.site, self.site, on_objects, tuple(on_arrows))


def total_site(inp: FiberedInput, G: GeometrySpec, budget=None) -> TotalSite:
    base, F = inp.base, inp.F
    fibers = tuple(spectral_site(F.algebras[c], G, budget) for c in range(len(base.objects)))
    objects = tuple((c, i) for c in range(len(base.objects)) for i in range(len(fibers[c].objects)))
    pos = {o: k for k, o in enumerate(objects)}

    def fmap(s):
        d, c = base.arrows[s]
        return Homomorphism(F.algebras[c], F.algebras[d], tuple(F.maps[s]))

    arrows, data, key = [], [], {}
    for s, (d, c) in enumerate(base.arrows):
        Fs = fmap(s)
        for i, n in enumerate(fibers[c].objects):
            for j, n2 in enumerate(fibers[d].objects):
                h = factors_through(Fs.then(n2), n, budget)
                if h is not None:
                    key[s, j, i] = len(arrows)
                    arrows.append((pos[d, j], pos[c, i]))
                    data.append((s, h))
    comp = {}
    for f, ((d, j), (c, i)) in enumerate((objects[a], objects[b]) for a, b in arrows):
        s, h = data[f]
        for g in range(len(arrows)):
            if objects[arrows[g][0]] != (c, i):
                continue
            t, k = data[g]
            e, l = objects[arrows[g][1]]
            ts = base.compose(t, s)
            comp[(g, f)] = key[ts, j, l]
    ids = tuple(key[base.identities[c], i, i] for c, i in objects)

    # vertical covers
    vertical = [[] for _ in objects]
    for c, SS in enumerate(fibers):
        idc = base.identities[c]
        for i, fams in enumerate(SS.site.covers):
            for fam in fams:
                vertical[pos[c, i]].append(tuple(key[idc, SS.site.src(a), i] for a in fam))

    # cartesian lifts and horizontal covers
    lifts = {}
    for s, (d, c) in enumerate(base.arrows):
        Fs = fmap(s)
        for i, n in enumerate(fibers[c].objects):
            pushed, _ = pushout_surjection(n, Fs)
            j = fibers[d].index_of(pushed)
            if j is None:
                raise InputError("pushout of a fiber etale map is not etale in the target fiber")
            lifts[s, i] = (pos[d, j], key[s, j, i])
    horizontal = [[] for _ in objects]
    literal = [[] for _ in objects]
    for c, fams in enumerate(base.covers):
        for fam in fams:
            for i in range(len(fibers[c].objects)):
                lifted = tuple(lifts[s, i][1] for s in fam)
                horizontal[pos[c, i]].append(lifted)
                if i == 0:
                    literal[pos[c, i]].append(lifted)

    def dedup(fams):
        out = []
        for f in fams:
            if f not in out:
                out.append(f)
        return out

    covers, kinds, lit_covers = [], [], []
    for k in range(len(objects)):
        v, h = dedup(vertical[k]), dedup(horizontal[k])
        covers.append(tuple(v) + tuple(f for f in h if f not in v))
        kinds.append(tuple(["vertical"] * len(v) + ["horizontal"] * len([f for f in h if f not in v])))
        lit = dedup(vertical[k] + literal[k])
        lit_covers.append(tuple(lit))
    labels = tuple((c, fibers[c].site.objects[i]) for c, i in objects)
    site = FiniteSite(labels, tuple(arrows), comp, ids, tuple(covers))
    literal_site = FiniteSite(labels, tuple(arrows), comp, ids, tuple(lit_covers))
    return TotalSite(inp, fibers, objects, site, literal_site, tuple(data), tuple(kinds), lifts)


def total_cod_presheaf(TS: TotalSite) -> Presheaf:
    fibers = TS.fibers
    algebras = tuple(fibers[c].objects[i].cod for c, i in TS.objects)
    return Presheaf(TS.site, tuple(A.size for A in algebras), tuple(h.map for _, h in TS.arrow_data), algebras)


def fibered_structural_sheaf(inp: FiberedInput, G: GeometrySpec, budget=None, TS: Optional[TotalSite] = None):
    """``(sheafified cod on the total site, report)``.

    The report records, per base object, whether restricting along the
    fiber inclusion gives the fiber's own structural sheaf.  A mismatch is
    an error when ``F`` is a sheaf on the base.
    """
    TS = TS or total_site(inp, G, budget)
    Ft, _ = sheafify(total_cod_presheaf(TS))
    base_sheaf = is_sheaf(inp.F)
    per_fiber = []
    for c in range(len(inp.base.objects)):
        restricted = restrict_along(Ft, TS.fiber_inclusion(c))
        own = structural_sheaf(inp.F.algebras[c], G, budget)
        ok = presheaf_isomorphism(restricted, own, budget) is not None
        per_fiber.append(ok)
        if not ok and base_sheaf:
            raise RestrictionMismatch(f"restriction to fiber {c} is not the fiber's structural sheaf", c)
    return Ft, {"base_is_sheaf": base_sheaf, "restriction_identity": per_fiber,
                "restriction_ok": all(per_fiber)}


# --------------------------------------------------------------------------
# continuous sections


def _horizontal_limit_ok(X: Presheaf, TS: TotalSite, target: int, family) -> bool:
    """``X(target)`` is the equalizer of the restrictions to all spans over the family."""
    S = TS.site
    srcs = [S.src(f) for f in family]
    spans = []
    for a, b in itertools.combinations_with_replacement(range(len(family)), 2):
        for y in range(len(S.objects)):
            for g in S.hom(y, srcs[a]):
                for g2 in S.hom(y, srcs[b]):
                    if S.compose(family[a], g) == S.compose(family[b], g2):
                        spans.append((a, g, b, g2))
    compatible = []
    for choice in itertools.product(*[range(X.sizes[s]) for s in srcs]):
        if all(X.maps[g][choice[a]] == X.maps[g2][choice[b]] for a, g, b, g2 in spans):
            compatible.append(choice)
    images = [tuple(X.maps[f][x] for f in family) for x in range(X.sizes[target])]
    return len(set(images)) == len(images) == len(compatible)


def continuous_section_check(X: Presheaf, inp: FiberedInput, TS: TotalSite) -> dict:
    """Total-site sheafhood versus fiberwise sheafhood plus horizontal limits."""
    if X.site is not TS.site:
        raise InputError("presheaf does not live on the total site")
    total = check_sheaf(X)["ok"]
    fiber_ok = []
    for c in range(len(inp.base.objects)):
        Xc = restrict_along(X, TS.fiber_inclusion(c))
        fiber_ok.append(check_sheaf(Xc)["ok"])
    horizontal_ok = True
    for k, fams in enumerate(TS.site.covers):
        for fam, kind in zip(fams, TS.kinds[k]):
            if kind == "horizontal" and not _horizontal_limit_ok(X, TS, k, fam):
                horizontal_ok = False
    sections = all(fiber_ok) and horizontal_ok
    report = {"total_sheaf": total, "fiber_sheaves": fiber_ok, "horizontal_limits": horizontal_ok,
              "continuous_sections": sections, "agree": total == sections}
    if total != sections:
        raise EquivalenceViolation("total-site sheafhood and continuous-section condition disagree", report)
    return report


# --------------------------------------------------------------------------
# structural properties


def projection_reflects_covers(TS: TotalSite) -> bool:
    """Every base cover lifts, at every fiber object, to a stored horizontal family over it."""
    base = TS.input.base
    P = TS.projection()
    for c, fams in enumerate(base.covers):
        for fam in fams:
            for i in range(len(TS.fibers[c].objects)):
                k = TS.index(c, i)
                lifted = tuple(TS.lifts[s, i][1] for s in fam)
                if lifted not in TS.site.covers[k]:
                    return False
                if tuple(P.on_arrows[a] for a in lifted) != tuple(fam):
                    return False
    return True


def lifts_are_pullbacks(TS: TotalSite) -> bool:
    """Each lift at ``(c, i)`` is the pullback of the lift at ``(c, 0)`` along ``(c, i) -> (c, 0)``."""
    S = TS.site
    base = TS.input.base
    for (s, i), (lk, la) in TS.lifts.items():
        d, c = base.arrows[s]
        top_obj, top_arrow = TS.lifts[s, 0]
        ci, c0 = TS.index(c, i), TS.index(c, 0)
        v = S.hom(ci, c0)
        w = S.hom(lk, top_obj)
        if not v or not w:
            return False
        v, w = v[0], w[0]
        if S.compose(v, la) != S.compose(top_arrow, w):
            return False
        for y in range(len(S.objects)):
            for p in S.hom(y, ci):
                for q in S.hom(y, top_obj):
                    if S.compose(v, p) != S.compose(top_arrow, q):
                        continue
                    fill = [r for r in S.hom(y, lk) if S.compose(la, r) == p and S.compose(w, r) == q]
                    if len(fill) != 1:
                        return False
    return True


def lifted_families_cover(TS: TotalSite) -> bool:
    """Lifted base covers are covering for the topology of the literal generating set."""
    L = TS.literal_site
    base = TS.input.base
    for c, fams in enumerate(base.covers):
        for fam in fams:
            for i in range(len(TS.fibers[c].objects)):
                k = TS.index(c, i)
                lifted = [TS.lifts[s, i][1] for s in fam]
                if not L.is_covering(k, L.generated_sieve(k, lifted)):
                    return False
    return True


def same_topology(TS: TotalSite) -> bool:
    return TS.site.minimal_sieves == TS.literal_site.minimal_sieves
