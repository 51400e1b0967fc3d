from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from groupoid_lab import groups
from groupoid_lab.action import EquivariantSystem, negation_space, validate_action
from groupoid_lab.acceptance import composition_fixtures, unit_law_maps
from groupoid_lab.convolution import convolve, involute
from groupoid_lab.correspondence import (
    Correspondence,
    certify_isomorphism,
    check_delta_measure,
    compose,
    compose_map,
    cstar_inner_product,
    identity_correspondence,
    induction_correspondence,
    left_action,
    negation_correspondence,
    quotient_measure,
    restriction_correspondence,
    right_module_action,
    trivialize_cocycle,
    validate_correspondence,
)
from groupoid_lab.errors import InnerMismatch, NotACoboundary, NotSymmetric
from groupoid_lab.exact import GaussianRational
from groupoid_lab.fixtures import builtin_group, correspondence_fixtures
from groupoid_lab.groupoid import counting_haar, haar_from_unit_weights, pair_groupoid
from groupoid_lab.oracles import solve_delta

CORR = correspondence_fixtures()
IDS = [label for label, _ in CORR]
Z2, Z4, S3 = builtin_group("z2"), builtin_group("z4"), builtin_group("s3")
H4 = groups.subgroup(Z4, groups.generate_subgroup(Z4, ["g2"]), name="Z/2")


def gauss(draw_int):
    return st.builds(lambda a, b, c, d: GaussianRational(Fraction(a, c), Fraction(b, d)).simplify(),
                     draw_int, draw_int, st.integers(1, 3), st.integers(1, 3))


small = st.integers(-3, 3)


def test_group_on_itself_is_a_one_measure():
    C = identity_correspondence(S3)
    mu = {x: Fraction(1) for x in C.points}
    assert check_delta_measure(mu, {k: 1 for k in C.point_delta()}, C.left, C.beta).ok


def test_negation_weights_need_the_module():
    X = negation_space()
    lam = counting_haar(X.groupoid)
    mu = {"-1": 2, "0": 1, "1": 1}
    ones = {(g, x): 1 for g in X.groupoid.arrows for x in X.points}
    rep = check_delta_measure(mu, ones, X, lam)
    assert ("s", "1") in rep.witnesses("delta-measure")
    fixed = dict(ones)
    fixed[("s", "1")], fixed[("s", "-1")] = Fraction(2), Fraction(1, 2)
    assert check_delta_measure(mu, fixed, X, lam).ok
    # the oracle solves the same identity pointwise
    assert solve_delta(mu, X.groupoid, X.act, X.moment, lam.weight) == fixed


@pytest.mark.parametrize("label,C", CORR, ids=IDS)
def test_fixtures_validate(label, C):
    assert validate_correspondence(C).ok


def test_identity_and_induction_have_trivial_module():
    assert set(identity_correspondence(Z2).delta.values()) == {1}
    C = induction_correspondence(S3, groups.subgroup(S3, groups.generate_subgroup(S3, ["(12)"])))
    assert set(C.delta.values()) == {1}
    assert set(C.alpha.weight.values()) == {1}


def test_broken_alpha_equivariance_is_reported():
    C = induction_correspondence(Z4, H4)
    alpha = dict(C.alpha.weight)
    alpha["g"] = Fraction(5)
    bad = Correspondence(C.H, C.beta, C.G, C.lam, C.left, C.right, EquivariantSystem(alpha), C.delta)
    assert "alpha-equivariance" in validate_correspondence(bad).codes()


def test_bad_module_is_reported():
    C = negation_correspondence()
    delta = dict(C.delta)
    delta[("s", "[1]")] = Fraction(3)
    bad = Correspondence(C.H, C.beta, C.G, C.lam, C.left, C.right, C.alpha, delta)
    codes = validate_correspondence(bad).codes()
    assert codes & {"delta-cocycle", "delta-measure"}


def test_right_module_examples():
    C = identity_correspondence(Z2)
    assert right_module_action({"e": 1}, {"s": 1}, C) == {"s": 1}
    assert right_module_action({}, {"s": 1}, C) == {}
    xi = {"e": 2, "s": 3}
    assert right_module_action(xi, {"e": 1}, C) == xi


def test_inner_product_examples():
    C = identity_correspondence(Z2)
    assert cstar_inner_product({"e": 1}, {"e": 1}, C) == {"e": 1}
    xi = {"e": GaussianRational(1, 2), "s": 3}
    ip = cstar_inner_product(xi, xi, C)
    assert ip["e"] == 1 + 4 + 9


def test_left_action_examples():
    C = restriction_correspondence(Z4, H4)
    xi = {"e": 1, "g": 2, "g2": 3, "g3": 4}
    got = left_action({"g2": 1}, xi, C)
    assert got == {x: xi[Z4.mul("g2", x)] for x in Z4.arrows}
    assert left_action({"e": 1}, xi, C) == xi


def test_adjoint_identity_with_nontrivial_module(rng):
    C = negation_correspondence()
    for _ in range(20):
        g = {h: complex(*rng.standard_normal(2)) for h in C.H.arrows}
        xi = {x: complex(*rng.standard_normal(2)) for x in C.points}
        eta = {x: complex(*rng.standard_normal(2)) for x in C.points}
        lhs = cstar_inner_product(left_action(g, xi, C), eta, C)
        rhs = cstar_inner_product(xi, left_action(involute(g, C.H), eta, C), C)
        for k in set(lhs) | set(rhs):
            assert abs(lhs.get(k, 0) - rhs.get(k, 0)) < 1e-10


@pytest.mark.parametrize("label,C", CORR, ids=IDS)
@given(data=st.data())
def test_module_compatibility(label, C, data):
    xi = {x: data.draw(gauss(small)) for x in C.points}
    eta = {x: data.draw(gauss(small)) for x in C.points}
    f = {a: data.draw(gauss(small)) for a in C.G.arrows}
    ip = cstar_inner_product(xi, right_module_action(eta, f, C), C)
    assert ip == convolve(cstar_inner_product(xi, eta, C), f, C.G, C.lam)
    assert cstar_inner_product(right_module_action(xi, f, C), eta, C) == \
        involute(cstar_inner_product(eta, right_module_action(xi, f, C), C), C.G)


@pytest.mark.parametrize("label,C", CORR, ids=IDS)
@given(data=st.data())
def test_inner_product_is_positive_at_units(label, C, data):
    xi = {x: data.draw(gauss(small)) for x in C.points}
    ip = cstar_inner_product(xi, xi, C)
    for u in C.G.units:
        v = ip.get(u, 0)
        assert (v.im if isinstance(v, GaussianRational) else 0) == 0
        assert (v.re if isinstance(v, GaussianRational) else v) >= 0


def test_trivialize_examples():
    P = pair_groupoid(2)
    lam = counting_haar(P)
    assert set(trivialize_cocycle({a: 0 for a in P.arrows}, P, lam).values()) == {0}
    c = {"1": 0, "2": 0, "(1,2)": -1, "(2,1)": 1}
    b = trivialize_cocycle(c, P, lam)
    # arrow (2,1) runs from 1 to 2, so c(1 -> 2) = 1 means b(2) - b(1) = 1
    assert b["2"] - b["1"] == 1
    bm = trivialize_cocycle({"1": 1, "2": 1, "(1,2)": Fraction(1, 3), "(2,1)": 3}, P, lam, multiplicative=True)
    assert bm["1"] == 1 and bm["2"] == 3


def test_trivialize_fails_on_isotropy():
    lam = counting_haar(Z2)
    with pytest.raises(NotACoboundary) as exc:
        trivialize_cocycle({"e": 0, "s": 1}, Z2, lam)
    assert exc.value.witness == ("s",)


def test_quotient_measure_examples():
    P = pair_groupoid(2)
    lam = counting_haar(P)
    T = pair_groupoid(1)
    assert dict(quotient_measure({"1": 3}, T, counting_haar(T)).m) == {"[1]": 3}
    # μ = m∘λ̇ with λ̇ of total mass 2 on the orbit: the fibers of λ over 1 and 2 each carry mass 2
    qm = quotient_measure({"1": 1, "2": 1}, P, lam)
    assert dict(qm.m) == {"[1]": 1}
    with pytest.raises(NotSymmetric):
        quotient_measure({"1": 1, "2": 2}, P, lam)


@pytest.mark.parametrize("label,X,Y", composition_fixtures(), ids=[f[0] for f in composition_fixtures()])
def test_composition_preserves_inner_products(label, X, Y, rng):
    CC = compose(X, Y)
    assert CC.report.ok
    for _ in range(5):
        xi, xi2 = ({x: complex(*rng.standard_normal(2)) for x in X.points} for _ in range(2))
        eta, eta2 = ({y: complex(*rng.standard_normal(2)) for y in Y.points} for _ in range(2))
        lhs = cstar_inner_product(compose_map(xi, eta, CC), compose_map(xi2, eta2, CC), CC.result)
        rhs = cstar_inner_product(eta, left_action(cstar_inner_product(xi, xi2, X), eta2, Y), Y)
        for k in set(lhs) | set(rhs):
            assert abs(lhs.get(k, 0) - rhs.get(k, 0)) < 1e-9


def test_identity_composed_with_negation_recovers_it():
    C = negation_correspondence()
    CC = compose(identity_correspondence(C.H), C)
    Z = CC.result
    rep = certify_isomorphism(Z, C, unit_law_maps(CC, "left"), scale_alpha=False)
    assert rep.ok
    assert sorted(Z.alpha.weight.values()) == [1, 1, 2]


@pytest.mark.parametrize("label,C", CORR, ids=IDS)
def test_unit_laws(label, C):
    for side in ("left", "right"):
        I = identity_correspondence(C.H, C.beta) if side == "left" else identity_correspondence(C.G, C.lam)
        CC = compose(I, C) if side == "left" else compose(C, I)
        assert certify_isomorphism(CC.result, C, unit_law_maps(CC, side)).ok


def test_equivalence_composed_with_induction_space():
    C = induction_correspondence(Z4, H4)
    CC = compose(identity_correspondence(Z4), C)
    assert len(CC.result.points) == 4
    assert certify_isomorphism(CC.result, C, unit_law_maps(CC, "left")).ok


def test_two_equivalences_compose_to_an_equivalence():
    P = pair_groupoid(3)
    lam = haar_from_unit_weights(P, {"1": 1, "2": Fraction(1, 2), "3": 3})
    Z = compose(identity_correspondence(P, lam), identity_correspondence(P, lam)).result
    assert validate_action(Z.left).metrics["free"][0] is True
    assert validate_action(Z.right).metrics["free"][0] is True
    # r_X and s_X identify the orbit spaces with the unit spaces
    assert len(Z.quotient.classes) == len(P.units)
    assert len({Z.r_X(Z.quotient.section[c]) for c in Z.quotient.classes}) == len(P.units)


def test_mismatched_inner_groupoids():
    with pytest.raises(InnerMismatch):
        compose(identity_correspondence(Z2), identity_correspondence(S3))


def test_certificate_detects_a_bad_map():
    C = identity_correspondence(Z2)
    assert "not-bijective" in certify_isomorphism(C, C, {"e": "e", "s": "e"}).codes()
    # multiplication by s commutes with both actions because Z/2 is abelian
    assert certify_isomorphism(C, C, {"e": "s", "s": "e"}).ok
    D = identity_correspondence(S3)
    swap = {x: x for x in S3.arrows}
    swap["e"], swap["(12)"] = "(12)", "e"
    assert "left-equivariance" in certify_isomorphism(D, D, swap).codes()
