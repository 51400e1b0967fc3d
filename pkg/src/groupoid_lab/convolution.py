"""The convolution *-algebra of a finite groupoid with a Haar system.

Elements are plain dicts ``arrow -> scalar``; missing arrows read as 0.
Exact inputs (ints, Fractions, Gaussian rationals) give exact results.

    (f*g)(γ) = Σ_{γ' ∈ G^{s(γ)}} f(γγ') g(γ'⁻¹) w(γ')
    f*(γ)    = conj f(γ⁻¹)
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import UnknownUnit
from .exact import GaussianRational, abs2, conj
from .groupoid import FiniteGroupoid, HaarSystem
from .linalg import block_decompose, hermitian_spectrum, operator_norm

__all__ = [
    "clean",
    "delta",
    "ones",
    "add",
    "scale",
    "convolve",
    "involute",
    "regular_rep_exact",
    "regular_rep_matrix",
    "regular_adjoint_exact",
    "reduced_norm",
    "i_norm",
    "full_norm",
    "full_norm_profile",
    "is_positive",
    "random_element",
    "exact_matmul",
    "ConvolutionAlgebra",
]


def clean(f: Mapping) -> dict:
    """Drop zero coefficients and normalize exact scalars."""
    out = {}
    for a, c in f.items():
        if isinstance(c, GaussianRational):
            c = c.simplify()
        if c != 0:
            out[a] = c
    return out


def delta(a: str, c=1) -> dict:
    return {a: Fraction(c) if isinstance(c, int) else c}


def ones(G: FiniteGroupoid) -> dict:
    return {a: Fraction(1) for a in G.arrows}


def add(f: Mapping, g: Mapping) -> dict:
    out = dict(f)
    for a, c in g.items():
        out[a] = out.get(a, 0) + c
    return clean(out)


def scale(c, f: Mapping) -> dict:
    return clean({a: c * v for a, v in f.items()})


def convolve(f: Mapping, g: Mapping, G: FiniteGroupoid, lam: HaarSystem) -> dict:
    # (f*g)(ab) collects f(a) g(b) w(b⁻¹) over composable (a, b)
    w, inv = lam.weight, G.inv
    out: dict = {}
    for a, fa in f.items():
        if fa == 0:
            continue
        for b in G.range_fiber(G.src[a]):
            gb = g.get(b, 0)
            if gb == 0:
                continue
            ab = G.table[(a, b)]
            out[ab] = out.get(ab, 0) + fa * gb * w[inv[b]]
    return clean(out)


def involute(f: Mapping, G: FiniteGroupoid) -> dict:
    return clean({G.inv[a]: conj(c) for a, c in f.items()})


def _check_unit(G, u):
    if u not in G.units:
        raise UnknownUnit(f"{u!r} is not a unit", (u,))


def regular_rep_exact(f: Mapping, G: FiniteGroupoid, lam: HaarSystem, u: str) -> list[list]:
    """L_u(f) on point masses of G_u: entry [x][z] = f(xz⁻¹) w(z⁻¹).

    Multiplicative on the nose: regular_rep_exact(f*g) is the product of the
    two matrices.
    """
    _check_unit(G, u)
    basis = G.source_fiber(u)
    w, inv = lam.weight, G.inv
    return [[f.get(G.table[(x, inv[z])], 0) * w[inv[z]] for z in basis] for x in basis]


def regular_adjoint_exact(M: list[list], G: FiniteGroupoid, lam: HaarSystem, u: str) -> list[list]:
    """Adjoint of an exact L_u matrix for the weighted inner product, W⁻¹ Mᴴ W."""
    basis = G.source_fiber(u)
    d = [lam.weight[G.inv[z]] for z in basis]
    n = len(basis)
    return [[conj(M[j][i]) * d[j] / d[i] for j in range(n)] for i in range(n)]


def regular_rep_matrix(f: Mapping, G: FiniteGroupoid, lam: HaarSystem, u: str) -> np.ndarray:
    """L_u(f) in the orthonormal basis δ_z / sqrt(w(z⁻¹)) of ℓ²(G_u, λ_u)."""
    _check_unit(G, u)
    basis = G.source_fiber(u)
    w, inv = lam.weight, G.inv
    sq = np.array([np.sqrt(float(w[inv[z]])) for z in basis])
    M = np.array([[complex(f.get(G.table[(x, inv[z])], 0)) for z in basis] for x in basis],
                 dtype=complex).reshape(len(basis), len(basis))
    return M * np.outer(sq, sq)


def reduced_norm(f: Mapping, G: FiniteGroupoid, lam: HaarSystem) -> float:
    return max(operator_norm(regular_rep_matrix(f, G, lam, u)) for u in G.units)


def _abs(c):
    if isinstance(c, (int, Fraction)):
        return abs(Fraction(c))
    if isinstance(c, GaussianRational):
        return Fraction(c.re) if c.im == 0 else float(np.sqrt(float(abs2(c))))
    return abs(c)


def i_norm(f: Mapping, G: FiniteGroupoid, lam: HaarSystem):
    """max(sup_u Σ_{G^u} |f| w, sup_u Σ_{G^u} |f*| w); exact when f is real
    rational."""
    w, inv = lam.weight, G.inv
    best = Fraction(0)
    for u in G.units:
        fib = G.range_fiber(u)
        s1 = sum((_abs(f.get(a, 0)) * w[a] for a in fib), Fraction(0))
        s2 = sum((_abs(f.get(inv[a], 0)) * w[a] for a in fib), Fraction(0))
        best = max(best, s1, s2)
    return best


def exact_matmul(A: list[list], B: list[list]) -> list[list]:
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(m)), Fraction(0)) for j in range(p)]
            for i in range(n)]


def is_positive(f: Mapping, G: FiniteGroupoid, lam: HaarSystem, tol: float = 1e-10) -> bool:
    """Every L_u(f) positive semidefinite to ``tol``."""
    for u in G.units:
        M = regular_rep_matrix(f, G, lam, u)
        M = (M + M.conj().T) / 2
        if min(hermitian_spectrum(M)) < -tol:
            return False
    return True


def random_element(G: FiniteGroupoid, rng: np.random.Generator, exact: bool = False,
                   density: float = 1.0) -> dict:
    """Seeded random element; exact ones have small Gaussian-rational entries."""
    out = {}
    for a in G.arrows:
        if density < 1.0 and rng.random() > density:
            continue
        if exact:
            re = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
            im = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
            out[a] = GaussianRational(re, im).simplify()
        else:
            out[a] = complex(rng.standard_normal(), rng.standard_normal())
    return clean(out)


class ConvolutionAlgebra:
    """C_c(G, λ) acting on itself by left convolution.

    The inner product on C_c(G) is the sum of the fiberwise ones,
    ⟨g, h⟩ = Σ_γ conj g(γ) h(γ) w(γ⁻¹), which makes the left regular action
    faithful; its Wedderburn blocks give the full norm.
    """

    def __init__(self, G: FiniteGroupoid, lam: HaarSystem):
        self.G, self.lam = G, lam
        self.order = list(G.arrows)
        self.index = {a: i for i, a in enumerate(self.order)}
        self._sq = np.array([np.sqrt(float(lam.weight[G.inv[b]])) for b in self.order])
        self._profile = None

    def left_matrix(self, f: Mapping) -> np.ndarray:
        """Left convolution by f in the orthonormal basis δ_b / sqrt(w(b⁻¹))."""
        G, n = self.G, len(self.order)
        M = np.zeros((n, n), dtype=complex)
        for a, fa in f.items():
            for b in G.range_fiber(G.src[a]):
                M[self.index[G.table[(a, b)]], self.index[b]] += complex(fa) * float(self.lam.weight[G.inv[b]])
        return M * np.outer(self._sq, 1 / self._sq)

    @property
    def profile(self):
        if self._profile is None:
            self._profile = block_decompose([self.left_matrix({a: 1}) for a in self.order])
        return self._profile

    def blocks(self) -> list[int]:
        return self.profile.blocks()

    def full_norm(self, f: Mapping) -> float:
        M = self.left_matrix(f)
        seen, best = set(), 0.0
        for t, V in self.profile.components:
            if t in seen:
                continue
            seen.add(t)
            best = max(best, operator_norm(V.conj().T @ M @ V))
        return best


_ALGEBRAS: dict = {}


def _algebra(G, lam) -> ConvolutionAlgebra:
    key = (id(G), id(lam))
    hit = _ALGEBRAS.get(key)
    if hit is None or hit[0] is not G or hit[1] is not lam:
        hit = (G, lam, ConvolutionAlgebra(G, lam))
        _ALGEBRAS[key] = hit
    return hit[2]


def full_norm(f: Mapping, G: FiniteGroupoid, lam: HaarSystem) -> float:
    return _algebra(G, lam).full_norm(f)


def full_norm_profile(G: FiniteGroupoid, lam: HaarSystem):
    return _algebra(G, lam).profile
