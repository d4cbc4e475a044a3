import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelh.corpus import constructor_corpus, fuzz_corpus
from borelh.dual import (
    CoadmissibleComplex,
    calibration_offset,
    dual_cohomological_h,
    dualize,
    duality_check,
    homological_h,
    localisation_image,
    validate_coadmissible,
)
from borelh.errors import ExperimentalModuleError
from borelh.exactalg import GF, QQ, ZZ
from borelh.hinv import h_invariants, rings_for
from borelh.tcomplex import AdmissibleComplex, smash, sphere, xab

FUZZ = fuzz_corpus(count=120)


def test_dual_of_point_sphere():
    d = dualize(sphere(0, 0))
    assert isinstance(d, CoadmissibleComplex)
    assert [(g.id, g.kind, g.degree) for g in d.generators] == [("t*", "tower", 0)]
    assert d.diff == () and d.admissible and d.ell == 0


def test_dual_entries_and_signs():
    d = dualize(sphere(0, 1))
    assert {g.id: g.degree for g in d.generators} == {"t*": 0, "x1*": -1, "y1*": -2}
    # s -> t becomes t* -> s* with sign (-1)^(deg t + 1); deg x1 = 1
    assert {(e.source, e.target): e.coeff for e in d.diff} == {("x1*", "t*"): 1, ("x1*", "y1*"): 1}
    assert d.ell == 0


def test_calibration_offset_is_zero():
    assert calibration_offset() == 0


@pytest.mark.parametrize("h", range(4))
def test_sphere_homological_h(h):
    for ring in ("q", "f:2", "f:3", "z"):
        assert homological_h(sphere(0, h), ring) == (h, h)


def test_homological_examples():
    assert homological_h(sphere(1, 2), QQ) == (2, 2)
    assert homological_h(xab(0, 1, 2, 3), GF(3)) == (2, 2)
    w, s = homological_h(xab(0, 1, 2, 3), ZZ)
    assert w == 1 and s == 1


def test_duality_report_examples():
    for h in range(3):
        assert duality_check(sphere(1, h)).passed
    r = duality_check(xab(0, 1, 2, 3))
    assert r.passed
    assert ("chain[z]", True, "1 <= 1 = 1 <= 2") in r.checks
    assert r.flags["strong_hom_is_min_p"]
    r = duality_check(smash(xab(0, 1, 2, 3), xab(0, 1, 2, 5)))
    assert r.passed and all(ok for name, ok, _ in r.checks if name.startswith("field["))
    assert r.lines()[0].startswith("PASS\tcoadmissible")


def test_double_dual_preserves_invariants():
    for c in constructor_corpus():
        dd = dualize(dualize(c))
        assert isinstance(dd, AdmissibleComplex) and dd.admissible
        assert dd.ell == c.ell
        for ring in rings_for(c):
            assert h_invariants(dd, ring) == h_invariants(c, ring)


def test_mirrored_rule():
    c = CoadmissibleComplex.build([("t", "tower", 0), ("x", "free", -1)], [("t", "x", 1)])
    assert "tower-to-free forbidden" in validate_coadmissible(c).rules()
    ok = CoadmissibleComplex.build([("t", "tower", 0), ("x", "free", -1)], [("x", "t", 1)])
    assert "tower-to-free forbidden" not in validate_coadmissible(ok).rules()


def test_non_coadmissible_dual_is_an_experimental_error():
    bad = CoadmissibleComplex.build([("t", "tower", 0), ("s", "tower", 2)], [])
    with pytest.raises(ExperimentalModuleError):
        localisation_image(bad, 0, QQ)


@pytest.mark.parametrize("c", constructor_corpus(), ids=lambda c: c.name)
def test_field_identity_and_chain_on_constructor_corpus(c):
    r = duality_check(c)
    assert r.passed, r.summary()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FUZZ), st.sampled_from([QQ, GF(2), GF(3), GF(5)]))
def test_field_identity_on_random_attachments(c, ring):
    h = h_invariants(c, ring)[0]
    assert homological_h(c, ring) == (h, h)
    assert dual_cohomological_h(c, ring) == -h


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FUZZ))
def test_integral_chain_on_random_attachments(c):
    hw, hs = homological_h(c, ZZ)
    zw, zs = h_invariants(c, ZZ)
    assert hs <= hw == zw <= zs
