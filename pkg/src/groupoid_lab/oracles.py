"""Brute-force reference computations, written independently of the main
code paths so that each can check the other."""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

__all__ = [
    "frobenius_character",
    "regular_character",
    "double_coset_structure",
    "isotropy_average",
    "naive_convolution",
    "dense_operator_norm",
    "solve_delta",
]


def frobenius_character(G, K, chi) -> dict:
    """χ_Ind(g) = (1/|K|) Σ_{x∈G, x⁻¹gx∈K} χ(x⁻¹gx)."""
    Kset = set(K)
    out = {}
    for g in G.arrows:
        tot = 0
        for x in G.arrows:
            c = G.mul(G.mul(G.inv[x], g), x)
            if c in Kset:
                tot += chi[c]
        out[g] = tot / len(Kset)
    return out


def regular_character(G) -> dict:
    return {g: (len(G.arrows) if g == G.identity else 0) for g in G.arrows}


def double_coset_structure(G, K):
    """Structure constants of the double-coset algebra from C[G].

    Convolves indicator functions of double cosets in the group algebra and
    normalizes: p(z | x, y) = (1_{KxK} * 1_{KyK})(z) |KzK| / (|KxK| |KyK|).
    Keys are frozensets of group elements.
    """
    K = list(K)
    cosets = {frozenset(G.mul(G.mul(a, g), b) for a in K for b in K) for g in G.arrows}
    out = {}
    for A, B in product(cosets, cosets):
        conv: dict = {}
        for a in A:
            for b in B:
                c = G.mul(a, b)
                conv[c] = conv.get(c, 0) + 1
        vec = {}
        for Z in cosets:
            z = next(iter(Z))
            val = conv.get(z, 0)
            if val:
                vec[Z] = Fraction(val * len(Z), len(A) * len(B))
        out[(A, B)] = vec
    return out


def isotropy_average(G, act, x, y, z) -> dict:
    """Average of the diagonal orbit of (ζx, z) over ζ fixing y, with orbits
    given as frozensets of pairs."""
    stab = [g for g in G.arrows if act(g, y) == y]
    out: dict = {}
    for g in stab:
        p = (act(g, x), z)
        orbit = frozenset((act(h, p[0]), act(h, p[1])) for h in G.arrows)
        out[orbit] = out.get(orbit, 0) + Fraction(1, len(stab))
    return out


def naive_convolution(f, g, G, weight) -> dict:
    """(f*g)(c) = Σ_{y ∈ G^{s(c)}} f(cy) g(y⁻¹) w(y)."""
    out = {}
    for c in G.arrows:
        tot = 0
        for y in G.arrows:
            if G.dst[y] != G.src[c]:
                continue
            tot += f.get(G.table[(c, y)], 0) * g.get(G.inv[y], 0) * weight[y]
        if tot != 0:
            out[c] = tot
    return out


def dense_operator_norm(M) -> float:
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def solve_delta(mu, G, act, moment, weight) -> dict:
    """The unique Δ making μ a Δ-measure: Δ(γ, x) = μ(γx) w(γ) / (μ(x) w(γ⁻¹))."""
    out = {}
    for (g, x), y in act.items():
        if G.src[g] != moment[x]:
            continue
        out[(g, x)] = Fraction(mu[y]) * weight[g] / (Fraction(mu[x]) * weight[G.inv[g]])
    return out
