"""Finite hypergroupoids: products are probability vectors instead of points.

A hypergroupoid has elements with range and source units, an involution
``star`` and a kernel m(x, y) for composable pairs (s(x) = r(y)), a probability
weight vector over elements.  Functions compose by

    (f*g)(x) = Σ_{y ∈ H^{s(x)}} f(x∘y) g(y*) λ(y),   f(x∘y) = Σ_w m(x, y)(w) f(w).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .action import EquivariantSystem, GSpace, coset_space, validate_action, validate_equivariant
from .convolution import clean
from .errors import InvalidAction, NoSpatialContext, NotStochastic
from .exact import conj
from .groupoid import FiniteGroupoid, HaarSystem
from .groups import subgroup
from .linalg import block_decompose, operator_norm
from .report import Report

__all__ = [
    "FiniteHypergroupoid",
    "HyperHaar",
    "SpatialContext",
    "validate_hypergroupoid",
    "validate_hyper_haar",
    "check_left_invariance",
    "hyper_from_groupoid",
    "spatial_construct",
    "double_coset_construct",
    "hyper_convolve",
    "hyper_involute",
    "spatial_convolve",
    "hyper_left_exact",
    "hyper_left_matrix",
    "hyper_norms",
    "haar_feasibility",
]


def _freeze(d):
    return MappingProxyType(dict(d))


@dataclass(frozen=True, eq=False)
class FiniteHypergroupoid:
    elements: tuple
    units: tuple
    r: Mapping[str, str]
    s: Mapping[str, str]
    star: Mapping[str, str]
    kernel: Mapping[tuple, Mapping[str, Fraction]]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "units", tuple(self.units))
        for k in ("r", "s", "star"):
            object.__setattr__(self, k, _freeze(getattr(self, k)))
        ker = {k: _freeze({w: Fraction(c) for w, c in v.items() if c != 0}) for k, v in self.kernel.items()}
        object.__setattr__(self, "kernel", _freeze(ker))
        rf: dict = {u: [] for u in self.units}
        sf: dict = {u: [] for u in self.units}
        for x in self.elements:
            rf.setdefault(self.r[x], []).append(x)
            sf.setdefault(self.s[x], []).append(x)
        object.__setattr__(self, "_rf", {u: tuple(v) for u, v in rf.items()})
        object.__setattr__(self, "_sf", {u: tuple(v) for u, v in sf.items()})

    def range_fiber(self, u: str) -> tuple:
        return self._rf.get(u, ())

    def source_fiber(self, u: str) -> tuple:
        return self._sf.get(u, ())

    def composable(self):
        for x in self.elements:
            for y in self.range_fiber(self.s[x]):
                yield x, y

    def m(self, x: str, y: str) -> Mapping[str, Fraction]:
        return self.kernel[(x, y)]


@dataclass(frozen=True)
class HyperHaar:
    weight: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "weight", _freeze({k: Fraction(v) for k, v in self.weight.items()}))

    def __getitem__(self, x):
        return self.weight[x]


@dataclass(frozen=True, eq=False)
class SpatialContext:
    """Provenance of a spatial hypergroupoid: H = (X*X)/G."""

    G: FiniteGroupoid
    lam: HaarSystem
    X: GSpace
    alpha: EquivariantSystem
    pair: Mapping[str, tuple]
    class_of: Mapping[tuple, str]
    relabel: Mapping[str, str] = field(default_factory=dict)


def _kernel_sum(H, x, y, f):
    return sum((c * f.get(w, 0) for w, c in H.m(x, y).items()), 0)


def validate_hypergroupoid(H: FiniteHypergroupoid) -> Report:
    """Exact check of the structural axioms; continuity axioms hold
    trivially on finite sets and are recorded as notes."""
    rep = Report()
    E = set(H.elements)
    for (x, y), vec in H.kernel.items():
        if any(c < 0 for c in vec.values()) or sum(vec.values(), Fraction(0)) != 1:
            raise NotStochastic(f"m({x},{y}) is not a probability vector", (x, y))
    for u in H.units:
        if u not in E or H.r[u] != u or H.s[u] != u or H.star[u] != u:
            rep.add("unit-structure", (u,))
    for x in H.elements:
        if H.r[x] not in H.units or H.s[x] not in H.units:
            rep.add("range-source", (x,))
        if H.star.get(x) not in E:
            rep.add("involution", (x,))
            continue
        if H.r[H.star[x]] != H.s[x]:
            rep.add("involution", (x,), "r(x*) != s(x)")
        if H.star[H.star[x]] != x:
            rep.add("involution", (x,), "x** != x")
    if rep.findings:
        return rep
    for x, y in H.composable():
        if (x, y) not in H.kernel:
            rep.add("kernel-missing", (x, y))
    for key in H.kernel:
        x, y = key
        if H.s[x] != H.r[y]:
            rep.add("kernel-extra", key)
    if rep.findings:
        return rep
    # support in H^{r(x)}_{s(y)}
    for (x, y), vec in H.kernel.items():
        for w in vec:
            if H.r[w] != H.r[x] or H.s[w] != H.s[y]:
                rep.add("support", (x, y, w))
    # units act as identities
    for x in H.elements:
        for u, pair in ((H.r[x], (H.r[x], x)), (H.s[x], (x, H.s[x]))):
            if dict(H.kernel[pair]) != {x: 1}:
                rep.add("unit-law", pair)
    # m(x,y)* = m(y*,x*)
    for (x, y), vec in H.kernel.items():
        pushed: dict = {}
        for w, c in vec.items():
            pushed[H.star[w]] = pushed.get(H.star[w], 0) + c
        if pushed != dict(H.kernel[(H.star[y], H.star[x])]):
            rep.add("involution-compatibility", (x, y))
    # support meets the units iff x = y*
    U = set(H.units)
    for (x, y), vec in H.kernel.items():
        if bool(U & set(vec)) != (x == H.star[y]):
            rep.add("unit-support", (x, y))
    # associativity of the kernel
    for x, y in H.composable():
        for z in H.range_fiber(H.s[y]):
            lhs: dict = {}
            for w, c in H.m(y, z).items():
                for v, d in H.m(x, w).items():
                    lhs[v] = lhs.get(v, 0) + c * d
            rhs: dict = {}
            for w, c in H.m(x, y).items():
                for v, d in H.m(w, z).items():
                    rhs[v] = rhs.get(v, 0) + c * d
            if clean(lhs) != clean(rhs):
                rep.add("associativity", (x, y, z))
    rep.note("continuity axioms hold automatically on finite sets")
    return rep


def validate_hyper_haar(H: FiniteHypergroupoid, lam: HyperHaar) -> Report:
    """Adjoint property on δ-bases: m(x, b)(a) λ(b) = m(x*, a)(b) λ(a) for
    r(b) = s(x), r(a) = r(x)."""
    rep = Report()
    for a in H.elements:
        if a not in lam.weight:
            rep.add("weight-missing", (a,))
        elif lam.weight[a] <= 0:
            rep.add("non-positive-weight", (a,))
    if rep.findings:
        return rep
    for x in H.elements:
        xs = H.star[x]
        for a in H.range_fiber(H.r[x]):
            for b in H.range_fiber(H.s[x]):
                lhs = H.m(x, b).get(a, 0) * lam.weight[b]
                rhs = H.m(xs, a).get(b, 0) * lam.weight[a]
                if lhs != rhs:
                    rep.add("adjoint-property", (x, a, b), f"{lhs} != {rhs}")
    rep.note("continuity and support conditions hold automatically on finite sets")
    return rep


def check_left_invariance(H: FiniteHypergroupoid, lam: HyperHaar) -> Report:
    """Σ_{y ∈ H^{s(x)}} m(x, y)(a) λ(y) = λ(a) for every a with r(a) = r(x)."""
    rep = Report()
    for x in H.elements:
        for a in H.range_fiber(H.r[x]):
            lhs = sum((H.m(x, y).get(a, 0) * lam.weight[y] for y in H.range_fiber(H.s[x])), Fraction(0))
            if lhs != lam.weight[a]:
                rep.add("left-invariance", (x, a), f"{lhs} != {lam.weight[a]}")
    return rep


def hyper_from_groupoid(G: FiniteGroupoid, lam: HaarSystem) -> tuple[FiniteHypergroupoid, HyperHaar]:
    """The groupoid with point-mass kernel m(x, y) = δ_{xy}."""
    kernel = {(a, b): {c: Fraction(1)} for (a, b), c in G.table.items()}
    H = FiniteHypergroupoid(G.arrows, G.units, G.dst, G.src, G.inv, kernel, name=G.name)
    return H, HyperHaar(lam.weight)


def spatial_construct(G: FiniteGroupoid, lam: HaarSystem, X: GSpace, alpha: EquivariantSystem):
    """H = (X*X)/G for a proper left G-space with an equivariant weight α.

    Elements are the orbits [x, y] of the diagonal action, labeled by their
    smallest pair.  The kernel averages δ_{[ζx, z]} over the stabilizer of y
    with the normalized restriction of λ; the Haar weight λ^{[x]}([x, y]) is
    the α-mass of the y' with [x, y'] = [x, y].
    """
    if X.side != "left":
        raise InvalidAction("spatial construction expects a left space")
    vr = validate_action(X)
    if not vr.ok:
        raise InvalidAction("action fails validation", vr.sorted_findings()[0].witness)
    if not validate_equivariant(X, alpha).ok:
        raise InvalidAction("weight is not equivariant")
    pairs = sorted((x, y) for x in X.points for y in X.points if X.moment[x] == X.moment[y])
    class_of, pair_of = {}, {}
    for p in pairs:
        if p in class_of:
            continue
        x, y = p
        orb = sorted({(X.act[(g, x)], X.act[(g, y)]) for g in G.source_fiber(X.moment[x])})
        label = f"[{orb[0][0]},{orb[0][1]}]"
        pair_of[label] = orb[0]
        for q in orb:
            class_of[q] = label
    elements = sorted(pair_of)
    units = [e for e in elements if pair_of[e][0] == pair_of[e][1]]
    unit_of = {x: class_of[(x, x)] for x in X.points}
    r = {e: unit_of[pair_of[e][0]] for e in elements}
    s = {e: unit_of[pair_of[e][1]] for e in elements}
    star = {e: class_of[(pair_of[e][1], pair_of[e][0])] for e in elements}

    def stab(y):
        st = [g for g in G.source_fiber(X.moment[y]) if X.act[(g, y)] == y]
        tot = sum((lam.weight[g] for g in st), Fraction(0))
        return [(g, lam.weight[g] / tot) for g in st]

    def product(x, y, z):
        out: dict = {}
        for g, k in stab(y):
            c = class_of[(X.act[(g, x)], z)]
            out[c] = out.get(c, 0) + k
        return out

    kernel: dict = {}
    rep = Report()
    for x in X.points:
        for y in X.points:
            if X.moment[y] != X.moment[x]:
                continue
            for z in X.points:
                if X.moment[z] != X.moment[y]:
                    continue
                key = (class_of[(x, y)], class_of[(y, z)])
                val = product(x, y, z)
                old = kernel.setdefault(key, val)
                if old != val:
                    rep.add("kernel-well-defined", (x, y, z))
    weight: dict = {}
    for x in X.points:
        w: dict = {}
        for y in X.points:
            if X.moment[y] == X.moment[x]:
                c = class_of[(x, y)]
                w[c] = w.get(c, 0) + alpha[y]
        for c, v in w.items():
            if weight.setdefault(c, v) != v:
                rep.add("haar-well-defined", (x, c))
    if rep.findings:
        raise InvalidAction("spatial data depends on representatives", rep.sorted_findings()[0].witness)
    H = FiniteHypergroupoid(elements, units, r, s, star, kernel, name=f"({X.name or 'X'}*{X.name or 'X'})/{G.name or 'G'}")
    ctx = SpatialContext(G, lam, X, alpha, _freeze(pair_of), _freeze(class_of))
    return H, HyperHaar(weight), ctx


def double_coset_construct(G: FiniteGroupoid, K):
    """K\\G/K as the spatial hypergroupoid of G acting on G/K with counting
    weight; the class [aK, bK] is relabeled by the double coset K a⁻¹b K,
    written ``K{min}K``."""
    from .action import EquivariantSystem as ES
    from .groupoid import counting_haar

    Kel = list(K.arrows) if isinstance(K, FiniteGroupoid) else list(K)
    subgroup(G, Kel)
    X = coset_space(G, Kel)
    alpha = ES({p: Fraction(1) for p in X.points})
    H0, lam0, ctx = spatial_construct(G, counting_haar(G), X, alpha)
    rep_of = {p: p[:-1] for p in X.points}  # "{min}K" -> min
    relabel = {}
    for e, (p, q) in ctx.pair.items():
        a, b = rep_of[p], rep_of[q]
        g = G.mul(G.inv[a], b)
        dc = {G.mul(G.mul(k1, g), k2) for k1 in Kel for k2 in Kel}
        relabel[e] = f"K{min(dc)}K"
    R = relabel.get
    H = FiniteHypergroupoid(
        sorted(R(e) for e in H0.elements), [R(u) for u in H0.units],
        {R(e): R(v) for e, v in H0.r.items()}, {R(e): R(v) for e, v in H0.s.items()},
        {R(e): R(v) for e, v in H0.star.items()},
        {(R(x), R(y)): {R(w): c for w, c in vec.items()} for (x, y), vec in H0.kernel.items()},
        name=f"K\\{G.name or 'G'}/K")
    lam = HyperHaar({R(e): v for e, v in lam0.weight.items()})
    ctx = SpatialContext(ctx.G, ctx.lam, ctx.X, ctx.alpha,
                         _freeze({R(e): p for e, p in ctx.pair.items()}),
                         _freeze({k: R(v) for k, v in ctx.class_of.items()}), _freeze(relabel))
    return H, lam, ctx


# algebra

def hyper_convolve(f: Mapping, g: Mapping, H: FiniteHypergroupoid, lam: HyperHaar) -> dict:
    out: dict = {}
    for x in H.elements:
        total = 0
        for y in H.range_fiber(H.s[x]):
            gy = g.get(H.star[y], 0)
            if gy == 0:
                continue
            fx = _kernel_sum(H, x, y, f)
            if fx != 0:
                total += fx * gy * lam.weight[y]
        out[x] = total
    return clean(out)


def hyper_involute(f: Mapping, H: FiniteHypergroupoid) -> dict:
    return clean({H.star[x]: conj(c) for x, c in f.items()})


def spatial_convolve(f: Mapping, g: Mapping, H: FiniteHypergroupoid, ctx: SpatialContext) -> dict:
    """f*g[x, z] = Σ_y f[x, y] g[y, z] α(y), computed at each class's smallest pair."""
    X, out = ctx.X, {}
    for e, (x, z) in ctx.pair.items():
        total = 0
        for y in X.points:
            if X.moment[y] != X.moment[x]:
                continue
            a = f.get(ctx.class_of[(x, y)], 0)
            if a == 0:
                continue
            total += a * g.get(ctx.class_of[(y, z)], 0) * ctx.alpha[y]
        out[e] = total
    return clean(out)


def hyper_left_exact(f: Mapping, H: FiniteHypergroupoid, lam: HyperHaar, u: str) -> list[list]:
    """L_u(f) on point masses of H_u: entry [x][z] = f(x∘z*) λ(z*)."""
    basis = H.source_fiber(u)
    return [[_kernel_sum(H, x, H.star[z], f) * lam.weight[H.star[z]] for z in basis] for x in basis]


def hyper_left_matrix(f: Mapping, H: FiniteHypergroupoid, lam: HyperHaar, u: str) -> np.ndarray:
    """L_u(f) in the orthonormal basis δ_z / sqrt(λ(z*)) of ℓ²(H_u)."""
    basis = H.source_fiber(u)
    sq = np.array([np.sqrt(float(lam.weight[H.star[z]])) for z in basis])
    M = np.array([[complex(_kernel_sum(H, x, H.star[z], f)) for z in basis] for x in basis],
                 dtype=complex).reshape(len(basis), len(basis))
    return M * np.outer(sq, sq)


def _abs(c):
    from .convolution import _abs as a
    return a(c)


class _HyperAlgebra:
    """C_c(H) acting on itself by left convolution, inner product
    ⟨g, h⟩ = Σ conj g(x) h(x) λ(x*)."""

    def __init__(self, H: FiniteHypergroupoid, lam: HyperHaar):
        self.H, self.lam = H, lam
        self.order = list(H.elements)
        self.sq = np.array([np.sqrt(float(lam.weight[H.star[x]])) for x in self.order])
        self._profile = None
        self.mats = [self.left_matrix({x: 1}) for x in self.order]

    def left_matrix(self, f: Mapping) -> np.ndarray:
        n = len(self.order)
        M = np.zeros((n, n), dtype=complex)
        for j, b in enumerate(self.order):
            img = hyper_convolve(f, {b: 1}, self.H, self.lam)
            for a, c in img.items():
                M[self.order.index(a), j] = complex(c)
        return M * np.outer(self.sq, 1 / self.sq)

    def diagnostics(self) -> Report:
        rep = Report()
        for x, M in zip(self.order, self.mats):
            Ms = self.left_matrix(hyper_involute({x: 1}, self.H))
            if np.max(np.abs(Ms - M.conj().T), initial=0.0) > 1e-10:
                rep.add("adjoint-mismatch", (x,), "left action of x* is not the adjoint")
        stack = np.array([M.reshape(-1) for M in self.mats])
        rank = np.linalg.matrix_rank(stack, tol=1e-9)
        if rank < len(self.order):
            rep.add("non-C*-representable direction", (), f"regular action has rank {rank}")
        return rep

    @property
    def profile(self):
        if self._profile is None:
            self._profile = block_decompose(self.mats)
        return self._profile

    def full_norm(self, f: Mapping) -> float:
        M = self.left_matrix(f)
        seen, best = set(), 0.0
        for t, V in self.profile.components:
            if t in seen:
                continue
            seen.add(t)
            best = max(best, operator_norm(V.conj().T @ M @ V))
        return best


def _relative_norm(f: Mapping, ctx: SpatialContext) -> float:
    """Norm of f as the kernel operator ξ ↦ Σ_z f[x,z] ξ(z) α(z) on
    ℓ²(X, α), taken blockwise over the irreducible pieces of the algebra of
    all such operators."""
    X = ctx.X
    pts = list(X.points)
    sq = np.array([np.sqrt(float(ctx.alpha[x])) for x in pts])

    def T(h):
        M = np.zeros((len(pts), len(pts)), dtype=complex)
        for i, x in enumerate(pts):
            for j, z in enumerate(pts):
                if X.moment[x] == X.moment[z]:
                    M[i, j] = complex(h.get(ctx.class_of[(x, z)], 0)) * float(ctx.alpha[z])
        return M * np.outer(sq, 1 / sq)

    prof = block_decompose([T({e: 1}) for e in ctx.pair])
    M = T(f)
    return max((operator_norm(V.conj().T @ M @ V) for _, V in prof.components), default=0.0)


def hyper_norms(f: Mapping, H: FiniteHypergroupoid, lam: HyperHaar, ctx: SpatialContext | None = None,
                want_relative: bool = False) -> Report:
    """reduced, I-, full and (given a spatial context) relative norms."""
    rep = Report()
    reduced = max(operator_norm(hyper_left_matrix(f, H, lam, u)) for u in H.units)
    best = Fraction(0)
    for u in H.units:
        fib = H.range_fiber(u)
        s1 = sum((_abs(f.get(a, 0)) * lam.weight[a] for a in fib), Fraction(0))
        s2 = sum((_abs(f.get(H.star[a], 0)) * lam.weight[a] for a in fib), Fraction(0))
        best = max(best, s1, s2)
    alg = _HyperAlgebra(H, lam)
    rep.extend(alg.diagnostics())
    full = alg.full_norm(f)
    rep.metric("reduced", reduced, 1e-8)
    rep.metric("i", best)
    rep.metric("full", full, 1e-8)
    if reduced > full + 1e-8 * max(1.0, full):
        rep.add("norm-order", ("reduced", "full"))
    if ctx is None:
        if want_relative:
            raise NoSpatialContext("relative norm needs the spatial provenance")
        return rep
    rel = _relative_norm(f, ctx)
    rep.metric("relative", rel, 1e-8)
    if rel > full + 1e-8 * max(1.0, full):
        rep.add("norm-order", ("relative", "full"))
    strict = rel < full - 1e-6
    rep.metric("strict_quotient", strict)
    if strict:
        rep.note("relative completion is a strict quotient for this element")
    return rep


def haar_feasibility(H: FiniteHypergroupoid):
    """Search for positive weights with the adjoint property by linear
    programming; returns a weight dict (floats, min weight 1) or None."""
    from scipy.optimize import linprog

    idx = {x: i for i, x in enumerate(H.elements)}
    n = len(idx)
    rows = []
    for x in H.elements:
        xs = H.star[x]
        for a in H.range_fiber(H.r[x]):
            for b in H.range_fiber(H.s[x]):
                row = np.zeros(n)
                row[idx[b]] += float(H.m(x, b).get(a, 0))
                row[idx[a]] -= float(H.m(xs, a).get(b, 0))
                if np.any(row):
                    rows.append(row)
    A_eq = np.array(rows) if rows else None
    b_eq = np.zeros(len(rows)) if rows else None
    res = linprog(np.ones(n), A_eq=A_eq, b_eq=b_eq, bounds=[(1, None)] * n, method="highs")
    if not res.success:
        return None
    return {x: float(res.x[i]) for x, i in idx.items()}
