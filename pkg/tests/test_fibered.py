import pytest

from specsite import instances
from specsite.errors import InputError
from specsite.fibered import (
    FiberedInput,
    continuous_section_check,
    fibered_structural_sheaf,
    lifted_families_cover,
    lifts_are_pullbacks,
    projection_reflects_covers,
    same_topology,
    total_site,
)
from specsite.site import constant_presheaf, is_sheaf, site_isomorphism
from specsite.spectrum import spectral_site
from specsite.theories import dlat

Z = dlat.zariski()
INSTANCES = instances.fibered_instances()
BY_NAME = {I.name: I for I in INSTANCES}


@pytest.fixture(scope="module")
def built():
    out = {}
    for I in INSTANCES:
        TS = total_site(I.input, Z)
        Ft, report = fibered_structural_sheaf(I.input, Z, TS=TS)
        out[I.name] = (TS, Ft, report)
    return out


def test_instance_corpus_size():
    assert len(INSTANCES) >= 20
    assert sum(I.base_sheaf for I in INSTANCES) >= 20


@pytest.mark.parametrize("name", [I.name for I in INSTANCES])
def test_base_sheafhood_is_as_constructed(name):
    I = BY_NAME[name]
    assert is_sheaf(I.input.F) == I.base_sheaf


@pytest.mark.parametrize("name", [I.name for I in INSTANCES])
def test_total_site_structure(built, name):
    TS, _, _ = built[name]
    assert projection_reflects_covers(TS)
    assert lifts_are_pullbacks(TS)
    assert lifted_families_cover(TS)
    assert same_topology(TS)


@pytest.mark.parametrize("name", [I.name for I in INSTANCES if I.base_sheaf])
def test_restriction_to_fibers_for_sheaf_inputs(built, name):
    _, _, report = built[name]
    assert report["base_is_sheaf"] and report["restriction_ok"]


def test_restriction_fails_for_three_over_two_chains(built):
    # F(c) is a 3-chain but the gluing of the two 2-chains is a 2-chain
    _, _, report = built["cover/3 over 2,2"]
    assert not report["base_is_sheaf"]
    assert report["restriction_identity"][0] is False
    assert all(report["restriction_identity"][1:])


@pytest.mark.parametrize("name", [I.name for I in INSTANCES])
def test_sheaf_conditions_agree_on_test_presheaves(built, name):
    I = BY_NAME[name]
    TS, Ft, _ = built[name]
    for label, X in instances.test_presheaves(TS, Ft):
        r = continuous_section_check(X, I.input, TS)
        assert r["agree"], label


def test_structural_sheaf_has_continuous_sections(built):
    for I in INSTANCES:
        TS, Ft, _ = built[I.name]
        r = continuous_section_check(Ft, I.input, TS)
        assert r["total_sheaf"] and r["continuous_sections"]


def test_doubled_presheaf_breaks_only_the_horizontal_limit(built):
    TS, Ft, _ = built["arrow-cover/id-2"]
    X = instances.doubled_over(Ft, TS, 0)
    r = continuous_section_check(X, BY_NAME["arrow-cover/id-2"].input, TS)
    assert all(r["fiber_sheaves"])
    assert not r["horizontal_limits"] and not r["total_sheaf"]


def test_constant_two_on_empty_cover_total_site(built):
    I = BY_NAME["empty-cover/2"]
    TS, _, _ = built[I.name]
    r = continuous_section_check(constant_presheaf(TS.site, 2), I.input, TS)
    assert not r["total_sheaf"] and not r["continuous_sections"]


def test_point_base_total_site_is_the_spectral_site(built):
    for name in ("point/3", "point/2x2"):
        TS, _, _ = built[name]
        A = BY_NAME[name].input.F.algebras[0]
        assert site_isomorphism(TS.site, spectral_site(A, Z).site) is not None


def test_fibered_input_needs_algebras():
    S = instances.point_base()
    with pytest.raises(InputError):
        FiberedInput(S, constant_presheaf(S, 2))
    other = instances.point_base()
    with pytest.raises(InputError):
        FiberedInput(S, constant_presheaf(other, 2, dlat.chain(2)))
