import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from specsite import io
from specsite.algebra import find_isomorphism
from specsite.errors import InputError, NotAFunctor
from specsite.instances import arrow_base, cover_base, empty_cover_base, poset_presheaf
from specsite.site import (
    FiniteSite,
    Presheaf,
    SiteFunctor,
    check_sheaf,
    constant_presheaf,
    identity_functor,
    is_sheaf,
    presheaf_isomorphism,
    restrict_along,
    sheafify,
    site_from_poset,
    site_isomorphism,
)
from specsite.theories import dlat


@st.composite
def cover_presheaves(draw, max_size=3):
    """Set-valued presheaves on the cover site with an arbitrary value at the covered object.

    ``F(c)`` is drawn as a list (repeats allowed) of compatible pairs, so
    separation and gluing can each fail.
    """
    n1, n2, n12 = (draw(st.integers(1, max_size)) for _ in range(3))
    f1 = tuple(draw(st.lists(st.integers(0, n12 - 1), min_size=n1, max_size=n1)))
    f2 = tuple(draw(st.lists(st.integers(0, n12 - 1), min_size=n2, max_size=n2)))
    matching = [(x, y) for x in range(n1) for y in range(n2) if f1[x] == f2[y]]
    if matching:
        top = draw(st.lists(st.sampled_from(matching), max_size=len(matching) + 1))
    else:
        top = []
    S = cover_base()
    maps = {(1, 0): tuple(x for x, _ in top), (2, 0): tuple(y for _, y in top),
            (3, 1): f1, (3, 2): f2, (3, 0): tuple(f1[x] for x, _ in top)}
    table = []
    for d, c in S.arrows:
        table.append(tuple(range([len(top), n1, n2, n12][c])) if d == c else maps[d, c])
    P = Presheaf(S, (len(top), n1, n2, n12), tuple(table))
    return P, top, matching


def test_site_validation():
    S = arrow_base(covered=True)
    with pytest.raises(InputError):
        FiniteSite(S.objects, S.arrows, S.composition, S.identities[:1], S.covers)
    with pytest.raises(InputError):
        # a cover family whose arrow lands elsewhere
        FiniteSite(S.objects, S.arrows, S.composition, S.identities, ((), ((0,),)))


def test_minimal_sieves_examples():
    S = cover_base()
    ids = {S.arrows[a]: a for a in range(len(S.arrows))}
    assert S.minimal_sieves[0] == frozenset({ids[1, 0], ids[2, 0], ids[3, 0]})
    assert S.minimal_sieves[3] == frozenset({ids[3, 3]})
    E = empty_cover_base()
    assert E.minimal_sieves[1] == frozenset()


def test_constant_two_fails_on_empty_cover():
    S = empty_cover_base()
    P = constant_presheaf(S, 2)
    report = check_sheaf(P)
    assert not report["ok"]
    assert any(f["object"] == 1 and f["defect"] == "non-separated" for f in report["failures"])
    Q, unit = sheafify(P)
    assert Q.sizes == (2, 1)
    assert is_sheaf(Q)


def test_terminal_presheaf_is_a_sheaf():
    for S in (site_from_poset(["*"], lambda x, y: True), cover_base(), empty_cover_base()):
        assert check_sheaf(constant_presheaf(S, 1))["ok"]


@given(cover_presheaves())
def test_sheaf_check_matches_pullback_oracle(case):
    P, top, matching = case
    assert is_sheaf(P) == (sorted(top) == sorted(set(top)) == sorted(matching))
    assert check_sheaf(P)["ok"] == is_sheaf(P)


@given(cover_presheaves())
def test_sheafification_is_the_pullback(case):
    P, top, matching = case
    Q, unit = sheafify(P)
    assert is_sheaf(Q)
    assert Q.sizes == (len(matching),) + P.sizes[1:]
    assert all(unit[c] == tuple(range(P.sizes[c])) for c in (1, 2, 3))


@given(cover_presheaves())
def test_sheafification_is_idempotent(case):
    P, _, _ = case
    Q, _ = sheafify(P)
    R, unit = sheafify(Q)
    assert presheaf_isomorphism(Q, R) is not None
    assert all(sorted(u) == list(range(len(u))) for u in unit)


def test_sheafify_keeps_algebra_values():
    S = cover_base()
    two, one = dlat.chain(2), dlat.trivial()
    to_one = (0, 0)
    F = poset_presheaf(S, (two, two, two, one),
                       {(1, 0): (0, 1), (2, 0): (0, 1), (3, 1): to_one, (3, 2): to_one, (3, 0): to_one})
    Q, _ = sheafify(F)
    assert Q.sizes == (4, 2, 2, 1)
    assert find_isomorphism(Q.algebras[0], dlat.square()) is not None


def test_restrict_along_identity_and_inclusion():
    S = cover_base()
    P = constant_presheaf(S, 3)
    assert restrict_along(P, identity_functor(S)).sizes == P.sizes
    # inclusion of the arrow c1 -> c as a subsite
    T = arrow_base(covered=False)
    idx = {S.arrows[a]: a for a in range(len(S.arrows))}
    on_obj = (0, 1)
    on_arr = tuple(idx[on_obj[d], on_obj[c]] for d, c in T.arrows)
    F = SiteFunctor(T, S, on_obj, on_arr)
    assert restrict_along(P, F).sizes == (3, 3)
    with pytest.raises(NotAFunctor):
        SiteFunctor(T, S, on_obj, tuple(reversed(on_arr)))


def test_preserves_covers():
    S = cover_base()
    assert identity_functor(S).preserves_covers()


def test_site_isomorphism():
    S = cover_base()
    swapped = site_from_poset(["c", "c2", "c1", "c12"],
                              lambda x, y: x == y or (x, y) in {(1, 0), (2, 0), (3, 0), (3, 1), (3, 2)},
                              {0: [[1, 2]]})
    assert site_isomorphism(S, swapped) is not None
    assert site_isomorphism(S, site_from_poset(["c", "c1", "c2", "c12"],
                                               lambda x, y: x == y or (x, y) in {(1, 0), (2, 0), (3, 0), (3, 1), (3, 2)})) is None


def test_site_json_roundtrip():
    for S in (cover_base(), empty_cover_base(), arrow_base(covered=True)):
        T = io.site_from_json(json.loads(io.dumps(io.site_to_json(S))))
        assert T.objects == S.objects and T.arrows == S.arrows
        assert T.minimal_sieves == S.minimal_sieves


@given(cover_presheaves())
def test_presheaf_json_roundtrip(case):
    P, _, _ = case
    data = json.loads(io.dumps(io.presheaf_to_json(P)))
    Q = io.presheaf_from_json(data, site=P.site)
    assert Q.sizes == P.sizes and tuple(map(tuple, Q.maps)) == tuple(map(tuple, P.maps))


def test_shipped_presheaf_is_a_sheaf():
    S = io.load_site("data/cover_site.json")
    P = io.load_presheaf("data/cover_presheaf.json", S)
    assert is_sheaf(P)
    assert P.sizes[0] == 4
