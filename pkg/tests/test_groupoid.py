from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from groupoid_lab import groups
from groupoid_lab.action import negation_space, semidirect_product
from groupoid_lab.errors import MalformedTable, NonPositiveWeight, UnknownUnit, WeightMissing
from groupoid_lab.fixtures import builtin_group, groupoid_fixtures
from groupoid_lab.groupoid import (
    FiniteGroupoid,
    HaarSystem,
    build_standard,
    counting_haar,
    disjoint_union,
    find_isomorphism,
    isotropy,
    pair_groupoid,
    validate_groupoid,
    validate_haar,
)

FIXTURES = groupoid_fixtures()
IDS = [label for label, _, _ in FIXTURES]


def test_pair_two_is_valid_with_four_arrows():
    P = pair_groupoid(2)
    assert validate_groupoid(P).ok
    assert len(P.arrows) == 4


def test_swapped_associativity_entry_is_caught():
    G = groups.z2()
    table = dict(G.table)
    table[("s", "s")] = "s"
    M = FiniteGroupoid(G.arrows, G.units, G.src, G.dst, G.inv, table)
    rep = validate_groupoid(M)
    assert not rep.ok
    assert rep.codes() & {"associativity", "inverse-law"}
    assert any(f.witness.count("s") >= 2 for f in rep.findings)


def test_negation_action_groupoid():
    A = semidirect_product(negation_space())
    assert validate_groupoid(A).ok
    assert len(A.arrows) == 6 and len(A.units) == 3
    assert len(isotropy(A, "0").group.arrows) == 2


def test_build_standard_kinds():
    Z2 = build_standard("group", ["e", "s"], lambda a, b: "e" if a == b else "s", name="Z/2")
    assert (len(Z2.arrows), len(Z2.units)) == (2, 1)
    P3 = build_standard("pair", 3)
    assert (len(P3.arrows), len(P3.units)) == (9, 3)
    A = build_standard("action", groups.z2(), negation_space())
    assert (len(A.arrows), len(A.units)) == (6, 3)
    U = build_standard("disjoint-union", [Z2, P3])
    assert len(U.arrows) == 11
    with pytest.raises(ValueError):
        build_standard("torus")


def test_counting_haar_examples():
    assert set(counting_haar(groups.z2()).weight.values()) == {1}
    assert all(v == 1 for v in counting_haar(pair_groupoid(2)).weight.values())
    A = semidirect_product(negation_space())
    lam = counting_haar(A)
    assert all(lam.fiber_mass(A, u) == 2 for u in A.units)


def test_haar_invariance_violation_on_z2():
    G = groups.z2()
    lam = HaarSystem({"e": 1, "s": 2})
    rep = validate_haar(G, lam)
    assert not rep.ok
    assert ("s", "s") in rep.witnesses("haar-invariance")


def test_nonpositive_or_missing_weight_raises():
    G = groups.z2()
    with pytest.raises(NonPositiveWeight):
        validate_haar(G, HaarSystem({"e": 1, "s": 0}))
    with pytest.raises(WeightMissing):
        validate_haar(G, HaarSystem({"e": 1}))


def test_isotropy_examples():
    s3 = builtin_group("s3")
    iso = isotropy(s3, "e")
    assert len(iso.group.arrows) == 6
    assert set(iso.kappa.values()) == {Fraction(1, 6)}
    A = semidirect_product(negation_space())
    assert list(isotropy(A, "0").kappa.values()) == [Fraction(1, 2)] * 2
    assert len(isotropy(A, "1").group.arrows) == 1
    with pytest.raises(UnknownUnit):
        isotropy(A, "nowhere")


def test_malformed_tables_raise():
    with pytest.raises(MalformedTable):
        FiniteGroupoid(("e", "e"), ("e",), {"e": "e"}, {"e": "e"}, {"e": "e"}, {})
    with pytest.raises(MalformedTable):
        FiniteGroupoid(("e", "a"), ("e",), {"e": "e"}, {"e": "e", "a": "e"}, {"e": "e", "a": "a"}, {})


def test_pair_groupoid_isomorphic_to_free_transitive_action():
    from groupoid_lab.action import translation_space
    A = semidirect_product(translation_space(groups.z2()))
    assert find_isomorphism(A, pair_groupoid(2)) is not None
    assert find_isomorphism(groups.z2(), pair_groupoid(2)) is None


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_fixture_axioms(label, G, lam):
    assert validate_groupoid(G).ok
    assert validate_haar(G, lam).ok
    assert validate_haar(G, counting_haar(G)).ok


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_inverse_is_anti_homomorphism(label, G, lam):
    for (a, b), c in G.table.items():
        assert G.inv[c] == G.table[(G.inv[b], G.inv[a])]


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_fiber_mass_constant_on_orbits(label, G, lam):
    for orb in G.orbits():
        assert len({lam.fiber_mass(G, u) for u in orb}) == 1


@given(st.integers(1, 5))
def test_pair_groupoid_counts(n):
    P = pair_groupoid(n)
    assert len(P.arrows) == n * n and len(P.units) == n
    assert validate_groupoid(P).ok
    assert P.orbits() == [tuple(P.units)]


@given(st.lists(st.sampled_from(["z1", "z2", "z3", "v4"]), min_size=1, max_size=3))
def test_disjoint_unions_stay_valid(keys):
    U = disjoint_union([builtin_group(k) for k in keys])
    assert validate_groupoid(U).ok
    assert len(U.units) == len(keys)
