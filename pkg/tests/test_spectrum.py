import pytest
from hypothesis import given

from specsite.algebra import Homomorphism, find_isomorphism, quotient
from specsite.errors import NotLocalInput
from specsite.spectrum import (
    cod_presheaf,
    basic_opens,
    global_sections_unit,
    local_forms,
    local_topos_check,
    points,
    slice_check,
    spec_functor,
    specialization,
    spectral_site,
    spectrum_report,
    stalk,
    structural_sheaf,
)
from specsite.site import check_sheaf
from specsite.theories import dlat
from specsite.theories.lattices import join_irreducibles, meet_all

from strategies import lattice_homs, lattices

ONE, TWO, THREE, SQ = dlat.trivial(), dlat.chain(2), dlat.chain(3), dlat.square()
Z = dlat.zariski()


def _leq(D, x, y):
    return D.op("meet", x, y) == x


def test_three_chain_points_and_order():
    pts = points(THREE, Z)
    assert [p.label for p in pts] == [(2,), (1, 2)]
    assert [p.local_object.size for p in pts] == [3, 2]
    # the identity is the generic local form and maps to the quotient
    assert specialization(pts) == [[True, True], [False, True]]


def test_square_points_are_incomparable():
    pts = points(SQ, Z)
    assert [p.label for p in pts] == [(1, 3), (2, 3)]
    assert specialization(pts) == [[True, False], [False, True]]
    assert len(spectral_site(SQ, Z).objects) == 4


def test_two_chain_and_trivial():
    pts = points(TWO, Z)
    assert len(pts) == 1 and pts[0].map.is_bijective()
    assert points(ONE, Z) == []


@given(lattices(7))
def test_points_are_join_irreducibles(D):
    pts = points(D, Z)
    gens = [meet_all(D, p.label) for p in pts]
    assert sorted(gens) == sorted(join_irreducibles(D))
    order = specialization(pts)
    for i, gi in enumerate(gens):
        for j, gj in enumerate(gens):
            assert order[i][j] == _leq(D, gj, gi)


@given(lattices(6))
def test_points_agree_with_brute_force_local_forms(D):
    assert sorted(p.map.map for p in points(D, Z)) == sorted(n.map for n in local_forms(D, Z))


@given(lattices(6))
def test_opens_are_counted_by_the_lattice(D):
    SS = spectral_site(D, Z)
    assert len(SS.site.closed_sieves()) == D.size


@given(lattices(6))
def test_structural_sheaf_is_a_sheaf_with_global_sections_the_base(D):
    assert check_sheaf(structural_sheaf(D, Z))["ok"]
    Gamma, eta, report = global_sections_unit(D, Z)
    assert report["eta_iso"] and Gamma.size == D.size


@given(lattices(6))
def test_stalks_match_the_closed_form(D):
    for p in points(D, Z):
        closed, _ = quotient(D, dlat.theta_min(D, p.label))
        A = stalk(D, Z, p, closed_form=closed)
        assert find_isomorphism(A, p.local_object) is not None


def test_basic_opens_of_square():
    opens = basic_opens(SQ, Z)
    assert sorted(opens.values(), key=lambda U: (len(U), sorted(U))) == [
        frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]


def test_spec_functor_examples():
    F, ok = spec_functor(Homomorphism(SQ, TWO, (0, 1, 0, 1)), Z)
    assert ok and len(F.on_objects) == 4
    F, ok = spec_functor(Homomorphism(THREE, SQ, (0, 1, 3)), Z)
    assert ok


@given(lattice_homs(max_size=5))
def test_spec_functor_preserves_covers(f):
    _, ok = spec_functor(f, Z)
    assert ok


@given(lattices(5))
def test_slices_are_sites_of_etale_codomains(D):
    for i in range(len(spectral_site(D, Z).objects)):
        assert slice_check(D, Z, i)


@pytest.mark.parametrize("A", [TWO, THREE, dlat.chain(4)])
def test_local_topos_examples(A):
    r = local_topos_check(A, Z)
    assert r["ok"] and r["focal_is_identity"]


def test_local_topos_rejects_non_local():
    with pytest.raises(NotLocalInput):
        local_topos_check(SQ, Z)


def test_universality_against_local_sample():
    sample = [TWO, THREE, dlat.chain(4)]
    _, _, report = global_sections_unit(SQ, Z, sample)
    assert report["maps_checked"] > 0


def test_spectrum_report_shape():
    r = spectrum_report(THREE, Z)
    assert len(r["points"]) == 2
    assert r["specialization"] == [[0, 1]] and r["specialization_dual"] == [[1, 0]]
    assert all(r["verdicts"].values())
    assert [s["size"] for s in r["stalks"]] == [3, 2]


def test_two_chain_site_has_an_empty_cover_on_the_collapse():
    SS = spectral_site(TWO, Z)
    assert [n.map for n in SS.objects] == [(0, 1), (0, 0)]
    assert SS.site.minimal_sieves[1] == frozenset()


def test_three_chain_structural_sheaf_is_cod():
    SS = spectral_site(THREE, Z)
    assert [n.map for n in SS.objects] == [(0, 1, 2), (0, 1, 1), (0, 0, 0)]
    assert check_sheaf(cod_presheaf(SS))["ok"]
    assert structural_sheaf(THREE, Z).sizes == (3, 2, 1)
    Gamma, eta, _ = global_sections_unit(THREE, Z, [TWO])
    assert Gamma == THREE and eta.map == (0, 1, 2)


@pytest.mark.parametrize("f,images", [
    (Homomorphism(THREE, TWO, (0, 1, 1)), [(0, 1), (0, 1), (0, 0)]),
    (Homomorphism(SQ, TWO, (0, 1, 0, 1)), [(0, 1), (0, 0), (0, 1), (0, 0)]),
])
def test_spec_functor_images(f, images):
    F, _ = spec_functor(f, Z)
    SB, SC = spectral_site(f.dom, Z), spectral_site(f.cod, Z)
    assert [SC.objects[F.on_objects[i]].map for i in range(len(SB.objects))] == images
