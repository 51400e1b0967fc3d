from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from groupoid_lab import groups
from groupoid_lab.convolution import (
    ConvolutionAlgebra,
    convolve,
    delta,
    exact_matmul,
    full_norm,
    full_norm_profile,
    i_norm,
    involute,
    is_positive,
    ones,
    random_element,
    reduced_norm,
    regular_adjoint_exact,
    regular_rep_exact,
    regular_rep_matrix,
)
from groupoid_lab.exact import GaussianRational
from groupoid_lab.fixtures import builtin_group, groupoid_fixtures
from groupoid_lab.groupoid import counting_haar, haar_from_unit_weights, pair_groupoid
from groupoid_lab.oracles import dense_operator_norm, naive_convolution

FIXTURES = groupoid_fixtures()
IDS = [label for label, _, _ in FIXTURES]
Z2 = groups.z2()
LZ2 = counting_haar(Z2)


def test_z2_products():
    assert convolve(delta("s"), delta("s"), Z2, LZ2) == {"e": 1}
    assert convolve(ones(Z2), ones(Z2), Z2, LZ2) == {"e": 2, "s": 2}


def test_unit_delta_restricts_to_range_fiber():
    P = pair_groupoid(3)
    lam = counting_haar(P)
    f = {a: i + 1 for i, a in enumerate(P.arrows)}
    got = convolve(delta("2"), f, P, lam)
    assert got == {a: v for a, v in f.items() if P.dst[a] == "2"}


def test_involution_examples():
    assert involute(delta("(1,2)"), pair_groupoid(2)) == {"(2,1)": 1}
    f = {"(1,2)": GaussianRational(2, 1)}
    assert involute(f, pair_groupoid(2)) == {"(2,1)": GaussianRational(2, -1)}
    sym = {"(1,2)": 3, "(2,1)": 3, "1": 1}
    assert involute(sym, pair_groupoid(2)) == sym


def test_regular_rep_examples():
    assert np.allclose(regular_rep_matrix(delta("e"), Z2, LZ2, "e"), np.eye(2))
    assert np.allclose(regular_rep_matrix(delta("s"), Z2, LZ2, "e"), [[0, 1], [1, 0]])
    P = pair_groupoid(2)
    f = {"1": 1, "(1,2)": 2, "(2,1)": 3, "2": 4}
    # basis of G_1 is (1, (2,1)); entry [x][z] is f(x z⁻¹)
    M = regular_rep_exact(f, P, counting_haar(P), "1")
    assert M == [[1, 2], [3, 4]]


def test_norm_examples():
    assert reduced_norm(delta("e"), Z2, LZ2) == pytest.approx(1.0)
    assert reduced_norm(ones(Z2), Z2, LZ2) == pytest.approx(2.0, abs=1e-9)
    assert reduced_norm({}, Z2, LZ2) == 0.0
    assert i_norm(delta("s"), Z2, LZ2) == 1
    assert i_norm(ones(Z2), Z2, LZ2) == 2
    assert full_norm(ones(Z2), Z2, LZ2) == pytest.approx(2.0, abs=1e-9)
    assert full_norm(delta("e"), Z2, LZ2) == pytest.approx(1.0)
    assert full_norm_profile(Z2, LZ2).blocks() == [1, 1]


def test_i_norm_on_one_fiber_of_pair():
    P = pair_groupoid(2)
    f = {"1": 1, "(1,2)": -3}
    # range fiber of 1 sums to 4; the inverse sums are 1 and 3
    assert i_norm(f, P, counting_haar(P)) == 4


def test_morita_block_profiles():
    for n in (1, 2, 3, 4):
        P = pair_groupoid(n)
        assert full_norm_profile(P, counting_haar(P)).blocks() == [n]
    assert full_norm_profile(builtin_group("z1"), counting_haar(builtin_group("z1"))).blocks() == [1]
    s3 = builtin_group("s3")
    assert full_norm_profile(s3, counting_haar(s3)).blocks() == [1, 1, 2]


def test_pair_full_equals_reduced(rng):
    P = pair_groupoid(2)
    lam = counting_haar(P)
    for _ in range(20):
        f = random_element(P, rng)
        assert full_norm(f, P, lam) == pytest.approx(reduced_norm(f, P, lam), rel=1e-8)


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_delta_basis_associativity_and_involution(label, G, lam):
    d = {a: {a: 1} for a in G.arrows}
    for a in G.arrows:
        for b in G.arrows:
            ab = convolve(d[a], d[b], G, lam)
            assert involute(ab, G) == convolve(involute(d[b], G), involute(d[a], G), G, lam)
            for c in G.arrows[:6]:
                assert convolve(ab, d[c], G, lam) == convolve(d[a], convolve(d[b], d[c], G, lam), G, lam)


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_against_naive_oracle(label, G, lam, rng):
    for _ in range(3):
        f = random_element(G, rng, exact=True)
        g = random_element(G, rng, exact=True)
        assert convolve(f, g, G, lam) == naive_convolution(f, g, G, lam.weight)


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_exact_regular_rep_is_a_star_homomorphism(label, G, lam, rng):
    f = random_element(G, rng, exact=True)
    g = random_element(G, rng, exact=True)
    fg = convolve(f, g, G, lam)
    for u in G.units:
        A = regular_rep_exact(f, G, lam, u)
        B = regular_rep_exact(g, G, lam, u)
        assert regular_rep_exact(fg, G, lam, u) == exact_matmul(A, B)
        assert regular_rep_exact(involute(f, G), G, lam, u) == regular_adjoint_exact(A, G, lam, u)


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_norm_chain(label, G, lam, rng):
    alg = ConvolutionAlgebra(G, lam)
    for _ in range(5):
        f = random_element(G, rng)
        r, fu, i = reduced_norm(f, G, lam), alg.full_norm(f), float(i_norm(f, G, lam))
        assert r <= fu * (1 + 1e-8) + 1e-12
        assert fu <= i * (1 + 1e-8) + 1e-12
        assert fu == pytest.approx(r, rel=1e-8)
        dense = max(dense_operator_norm(regular_rep_matrix(f, G, lam, u)) for u in G.units)
        assert r == pytest.approx(dense, rel=1e-9)


@pytest.mark.parametrize("label,G,lam", FIXTURES, ids=IDS)
def test_positivity_of_squares(label, G, lam, rng):
    f = random_element(G, rng)
    assert is_positive(convolve(involute(f, G), f, G, lam), G, lam)


def test_weighted_pair_convolution_uses_weights():
    P = pair_groupoid(2)
    lam = haar_from_unit_weights(P, {"1": 1, "2": Fraction(1, 3)})
    got = convolve(delta("(1,2)"), delta("(2,1)"), P, lam)
    assert got == {"1": lam.weight["(1,2)"]}


@given(st.sampled_from(range(len(FIXTURES))), st.integers(0, 2**32 - 1))
def test_cstar_identity(idx, seed):
    _, G, lam = FIXTURES[idx]
    f = random_element(G, np.random.default_rng(seed))
    n = reduced_norm(f, G, lam)
    assert reduced_norm(convolve(involute(f, G), f, G, lam), G, lam) == pytest.approx(n * n, rel=1e-8)
