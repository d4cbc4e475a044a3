from fractions import Fraction

import oracle
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from borelh.cohomology import cohomology_at, scan_limit, stabilization_bound
from borelh.corpus import constructor_corpus, corpus_maps, corpus_pairs, fuzz_corpus, scaled_identity, strict_pairs
from borelh.errors import CochainMapError
from borelh.exactalg import GF, QQ, ZZ
from borelh.hinv import (
    candidate_primes,
    froyshov_check,
    h_invariants,
    hp,
    jump_class_primes,
    manifold_report,
    prime_profile,
    rings_for,
    verify_properties,
)
from borelh.tcomplex import CochainMap, identity_map, smash, sphere, xab

FUZZ = fuzz_corpus()
SMALL_FUZZ = [c for c in FUZZ if len(c.generators) <= 7]
LARGE_PRIMES = (11, 13, 17, 19, 23, 29, 31)


def test_h_invariant_examples():
    for ring in ("z", "q", "f:2", "f:3", "f:5"):
        assert h_invariants(sphere(1, 3), ring) == (3, 3)
    x = xab(0, 1, 2, 3)
    assert h_invariants(x, ZZ) == (1, 2)
    assert h_invariants(x, GF(3)) == (2, 2)
    assert h_invariants(x, "f:2") == (1, 1)
    assert hp(x, 0) == 1 and hp(x, 3) == 2


def test_prime_profile_examples():
    r = prime_profile(xab(0, 1, 2, 3))
    assert r.exceptional_primes == {3}
    assert r.h_at(3) == 2 and r.h_at(2) == 1 and r.h_at(101) == 1
    assert r.jump_order == 3 and r.consistent
    assert prime_profile(sphere(1, 2)).exceptional_primes == frozenset()
    r = prime_profile(xab(0, 1, 1, 0))
    assert r.jump_order == 0 and r.h0 == 2 and set(r.prime_profile.values()) == {2}


def test_xab_else_branch():
    r = prime_profile(xab(0, 1, 0, 1))
    assert r.h0 == 1 and set(r.prime_profile.values()) == {1} and r.z == (1, 1)


def test_verify_properties_examples():
    x, y = xab(0, 1, 2, 3), xab(0, 1, 2, 5)
    rep = verify_properties([x], suites=("stability",))
    assert rep.passed and len(rep.results) == 4
    assert h_invariants(smash(x, sphere(0, 1)), GF(3)) == (3, 3)
    assert h_invariants(smash(x, x), GF(3))[0] == 4
    rep = verify_properties(pairs=[(x, x)], suites=("additivity",))
    assert rep.passed
    rep = verify_properties(pairs=[(x, y)], suites=("subadditivity", "strictness"))
    assert rep.passed
    assert "3 < 4" in rep.results[-1].detail
    assert rep.results[0].line().startswith("PASS\tsubadditivity[")


def test_strictness_fails_without_a_witness():
    s = sphere(0, 1)
    rep = verify_properties(pairs=[(s, s)], suites=("strictness",))
    assert not rep.passed


def test_verify_rejects_unknown_suite():
    with pytest.raises(ValueError):
        verify_properties([sphere(0, 0)], suites=("nonsense",))


def test_monotonicity_on_corpus_maps():
    rep = verify_properties(maps=corpus_maps(), suites=("monotonicity",))
    assert rep.passed, rep.lines()
    assert any("fixed degree 0" in r.detail for r in rep.results)
    assert any("fixed degree 2" in r.detail for r in rep.results)


def test_monotonicity_rejects_invalid_map():
    s = sphere(0, 1)
    with pytest.raises(CochainMapError):
        verify_properties(maps=[CochainMap.of(s, s, [("t", "t", 1)])], suites=("monotonicity",))


def test_bundled_corpus_suites():
    corpus = constructor_corpus()
    rep = verify_properties(corpus, corpus_pairs(), corpus_maps(), ("stability", "additivity", "strictness"), strict_pairs())
    assert rep.passed
    rep = verify_properties(corpus, suites=("coefficients",))
    failed = [r.name for r in rep.results if not r.passed]
    assert failed == ["max-p[xab(0,1,6,4)]"]


def test_max_p_counterexample_in_the_xab_family():
    # cocycles in degree 2 are multiples of (-2 u.t, 2 y1, -3 xf): the image is 2Z,
    # yet every field sees a cocycle with nonzero restriction in that degree
    c = xab(0, 1, 6, 4)
    assert h_invariants(c, ZZ) == (1, 2)
    assert oracle.h_strong_z(c, scan_limit(c)) == 2
    for p in (0, 2, 3, 5, 7):
        assert hp(c, p) == 1
        assert oracle.h_field(c, p, scan_limit(c)) == 1
    r = prime_profile(c)
    assert not r.flags["strong_is_max_p"]
    assert r.flags["jump_class_primes"]
    assert jump_class_primes(c, (2, 3, 5, 7)) == frozenset()


def test_max_p_counterexample_in_the_fuzz_corpus():
    # attachment with a u-power-one target; the obstruction class is itself divisible by 2
    c = FUZZ[102]
    K = scan_limit(c)
    assert [oracle.z_restriction_index(c, k) for k in range(K + 1)] == [0, 0, 2, 1, 1, 1]
    assert h_invariants(c, ZZ) == (2, 3)
    for p in (0, 2, 3):
        assert hp(c, p) == oracle.h_field(c, p, K) == 2
    r = prime_profile(c)
    assert set(r.prime_profile.values()) == {2}
    assert not r.flags["strong_is_max_p"] and r.flags["jump_class_primes"]


def test_zero_jump_order_with_an_exceptional_prime():
    # a = 3, b = 0 over S^{1,1}: jump order 0 but h^3 falls short of h_strong(Z)
    r = prime_profile(xab(1, 1, 3, 0))
    assert r.jump_order == 0 and r.z == (2, 2)
    assert r.h0 == 2 and r.h_at(3) == 1
    assert r.flags["jump_order_bound"] and not r.notes["jump_order_exact"]
    assert r.notes["maximising_primes"] == {2, 5, 7}


def test_jump_class_primes_on_fuzz_corpus():
    for c in FUZZ:
        r = prime_profile(c)
        assert r.flags["jump_class_primes"], c.name
        assert r.flags["weak_is_h0"] and r.flags["weak_le_strong"], c.name
        assert r.flags["exceptional_within_candidates"], c.name


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FUZZ), st.sampled_from(LARGE_PRIMES))
def test_non_candidate_primes_behave_like_q(c, p):
    if p in candidate_primes(c):
        return
    assert hp(c, p) == hp(c, 0)
    for n in range(c.d_min - 1, stabilization_bound(c) + 3):
        assert cohomology_at(c, n, GF(p)).dim == cohomology_at(c, n, QQ).dim


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL_FUZZ), st.sampled_from([0, 2, 3]))
def test_field_h_matches_oracle(c, p):
    assert hp(c, p) == oracle.h_field(c, p, scan_limit(c))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL_FUZZ))
def test_strong_z_matches_oracle(c):
    assert h_invariants(c, ZZ)[1] == oracle.h_strong_z(c, scan_limit(c))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(constructor_corpus() + FUZZ[:60]), st.integers(-3, 3))
def test_scaled_identity_monotone(c, k):
    rep = verify_properties(maps=[scaled_identity(c, k)], suites=("monotonicity",))
    assert rep.passed


def test_rings_for_includes_candidates():
    x = xab(0, 1, 2, 13)
    tags = [r.tag for r in rings_for(x)]
    assert tags[:2] == ["z", "q"] and "f:13" in tags


def test_identity_map_degree_one_monotone():
    c = xab(0, 1, 2, 3)
    assert verify_properties(maps=[identity_map(c)], suites=("monotonicity",)).passed


def test_manifold_examples():
    m = manifold_report(sphere(0, 0), 0)
    assert all(v == (0, 0) for v in m.rings.values()) and m.d == 0
    m = manifold_report(sphere(0, 2), "3/4")
    assert set(m.prime_profile.values()) == {Fraction(5, 4)}
    assert m.rings["z"] == (Fraction(5, 4), Fraction(5, 4))
    m = manifold_report(xab(0, 1, 2, 3), 0)
    assert (m.d, m.Fr) == (2, 2)
    assert m.h_KM_source == "dual" and m.h_KM == -1
    with pytest.raises(ValueError):
        manifold_report(sphere(0, 0), "0.75")


def test_froyshov_examples():
    r = froyshov_check(0, -5, 5)
    assert r.satisfied and r.slack == 0
    r = froyshov_check(0, 0, 9)
    assert not r.satisfied and r.slack == Fraction(-9, 8)
    r = froyshov_check("5/4", 2, 8)
    assert r.satisfied and r.slack == 0
    with pytest.raises(ValueError):
        froyshov_check(0, 0, -1)
