"""Quasi-invariant measures, disintegration and induction of representations
through correspondences.

A representation of (G, λ) is a quasi-invariant weight μ on the units plus a
Hilbert bundle: one finite-dimensional fiber per unit and a unitary
L(γ): fiber(s γ) → fiber(r γ) per arrow.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .action import GSpace, orbit_quotient, quotient_action, semidirect_product, unit_space
from .correspondence import (
    Correspondence,
    QuotientMeasure,
    check_delta_measure,
    induction_correspondence,
    quotient_measure,
    semidirect_haar,
    sqrt_scalar,
    subgroup_correspondence,
    trivialize_cocycle,
)
from .errors import NotPseudoImage, NotQuasiInvariant
from .groupoid import FiniteGroupoid, HaarSystem, counting_haar
from .groups import conjugate_subgroup, double_cosets, subgroup
from .linalg import is_projection, polar_unitary, range_basis
from .report import Report

__all__ = [
    "QuasiInvariantMeasure",
    "HilbertBundle",
    "Representation",
    "DisintegrationResult",
    "InducedMeasure",
    "radon_nikodym_module",
    "disintegrate",
    "induce_measure",
    "fixed_point_projection",
    "induce_representation",
    "mackey_decompose",
    "trivial_rep",
    "regular_rep",
    "rep_from_matrices",
    "direct_sum",
    "restrict_rep",
    "intertwiner",
    "equivalent",
    "interior_tensor_rep",
]


@dataclass(frozen=True)
class QuasiInvariantMeasure:
    mu: Mapping[str, Fraction]
    module: Mapping[str, Fraction]


def radon_nikodym_module(mu: Mapping[str, Fraction], G: FiniteGroupoid, lam: HaarSystem) -> QuasiInvariantMeasure:
    """Δ_μ(γ) = ν(γ)/ν(γ⁻¹) with ν(γ) = μ(r γ) w(γ); 1 off the charged arrows."""
    w = lam.weight
    mu = {u: Fraction(mu.get(u, 0)) for u in G.units}
    module = {}
    for g in G.arrows:
        nu = mu[G.dst[g]] * w[g]
        nu_inv = mu[G.src[g]] * w[G.inv[g]]
        if (nu == 0) != (nu_inv == 0):
            raise NotQuasiInvariant("μ∘λ and its inverse have different supports", (g,))
        module[g] = nu / nu_inv if nu else Fraction(1)
    return QuasiInvariantMeasure(mu, module)


# bundles and representations

@dataclass(frozen=True, eq=False)
class HilbertBundle:
    """Fibers C^dims[u] with unitaries L[γ] of shape (dims[r γ], dims[s γ])."""

    groupoid: FiniteGroupoid
    dims: Mapping[str, int]
    L: Mapping[str, np.ndarray]

    def validate(self, tol: float = 1e-10, arrows=None) -> Report:
        G, rep = self.groupoid, Report()
        arrows = G.arrows if arrows is None else arrows
        keep = set(arrows)
        for g in arrows:
            M = self.L[g]
            if M.shape != (self.dims[G.dst[g]], self.dims[G.src[g]]):
                rep.add("shape", (g,))
                continue
            if M.shape[0] != M.shape[1] or not np.allclose(M.conj().T @ M, np.eye(M.shape[1]), atol=tol, rtol=0):
                rep.add("unitary", (g,))
            if G.is_unit(g) and not np.allclose(M, np.eye(M.shape[0]), atol=tol, rtol=0):
                rep.add("unit-identity", (g,))
            if not np.allclose(self.L[G.inv[g]], M.conj().T, atol=tol, rtol=0):
                rep.add("inverse", (g,))
        for (a, b), c in G.table.items():
            if a in keep and b in keep and c in keep:
                if not np.allclose(self.L[c], self.L[a] @ self.L[b], atol=tol, rtol=0):
                    rep.add("multiplicative", (a, b))
        return rep


@dataclass(frozen=True, eq=False)
class Representation:
    G: FiniteGroupoid
    lam: HaarSystem
    measure: QuasiInvariantMeasure
    bundle: HilbertBundle

    @property
    def dims(self):
        return self.bundle.dims

    @property
    def L(self):
        return self.bundle.L

    def charged_units(self) -> list[str]:
        return [u for u in self.G.units if self.measure.mu[u] > 0]

    def dim(self) -> int:
        return sum(self.dims[u] for u in self.charged_units())

    def validate(self, tol: float = 1e-10) -> Report:
        G = self.G
        live = set(self.charged_units())
        arrows = [g for g in G.arrows if G.dst[g] in live]
        return self.bundle.validate(tol, arrows)

    def character(self) -> dict:
        """trace L(γ) on isotropy arrows of charged units."""
        G = self.G
        return {g: complex(np.trace(self.L[g])) for g in G.arrows
                if G.dst[g] == G.src[g] and self.measure.mu[G.dst[g]] > 0}

    def integrated(self, f: Mapping) -> np.ndarray:
        """π(f)ξ(u) = Σ_{γ∈G^u} f(γ) L(γ) ξ(sγ) Δ^{-1/2}(γ) w(γ), in orthonormal
        coordinates of ⊕_u fiber(u) with the inner product weighted by μ."""
        G, mu, D = self.G, self.measure.mu, self.measure.module
        units = self.charged_units()
        off, n = {}, 0
        for u in units:
            off[u] = n
            n += self.dims[u]
        M = np.zeros((n, n), dtype=complex)
        for g, c in f.items():
            u, v = G.dst[g], G.src[g]
            if u not in off or c == 0:
                continue
            k = complex(c) * float(self.lam.weight[g]) / float(sqrt_scalar(D[g]))
            k *= float(sqrt_scalar(mu[u] / mu[v]))
            M[off[u]:off[u] + self.dims[u], off[v]:off[v] + self.dims[v]] += k * self.L[g]
        return M


def rep_from_matrices(G: FiniteGroupoid, mats: Mapping[str, object], lam: HaarSystem | None = None,
                      mu: Mapping[str, Fraction] | None = None) -> Representation:
    lam = lam or counting_haar(G)
    mats = {g: np.atleast_2d(np.array(m, dtype=complex)) for g, m in mats.items()}
    dims = {}
    for g, M in mats.items():
        dims.setdefault(G.dst[g], M.shape[0])
        dims.setdefault(G.src[g], M.shape[1])
    mu = mu or {u: Fraction(1) for u in G.units}
    return Representation(G, lam, radon_nikodym_module(mu, G, lam), HilbertBundle(G, dims, mats))


def trivial_rep(G: FiniteGroupoid, lam: HaarSystem | None = None) -> Representation:
    return rep_from_matrices(G, {g: [[1.0]] for g in G.arrows}, lam)


def regular_rep(G: FiniteGroupoid) -> Representation:
    """Left regular representation of a group by permutation matrices."""
    idx = {a: i for i, a in enumerate(G.arrows)}
    n = len(idx)
    mats = {}
    for g in G.arrows:
        M = np.zeros((n, n))
        for a in G.arrows:
            M[idx[G.mul(g, a)], idx[a]] = 1.0
        mats[g] = M
    return rep_from_matrices(G, mats)


def direct_sum(reps) -> Representation:
    reps = list(reps)
    G = reps[0].G
    mats = {}
    for g in G.arrows:
        blocks = [R.L[g] for R in reps]
        r = sum(b.shape[0] for b in blocks)
        c = sum(b.shape[1] for b in blocks)
        M = np.zeros((r, c), dtype=complex)
        i = j = 0
        for b in blocks:
            M[i:i + b.shape[0], j:j + b.shape[1]] = b
            i, j = i + b.shape[0], j + b.shape[1]
        mats[g] = M
    return rep_from_matrices(G, mats, reps[0].lam, reps[0].measure.mu)


def restrict_rep(R: Representation, H: FiniteGroupoid) -> Representation:
    return rep_from_matrices(H, {h: R.L[h] for h in H.arrows})


# disintegration

@dataclass(frozen=True)
class DisintegrationResult:
    base: QuasiInvariantMeasure
    rho: Mapping[str, Mapping[str, Fraction]]
    delta: Mapping[tuple, Fraction]
    module_x: Mapping[tuple, Fraction]
    module_y: Mapping[tuple, Fraction]
    report: Report


def _space_module(weight, X: GSpace, lam: HaarSystem) -> dict:
    """Module of a weight on a left G-space: weight(γx) w(γ) / (weight(x) w(γ⁻¹))."""
    G, w, out = X.groupoid, lam.weight, {}
    for x in X.points:
        for g in G.source_fiber(X.moment[x]):
            a = Fraction(weight.get(X.act[(g, x)], 0)) * w[g]
            b = Fraction(weight.get(x, 0)) * w[G.inv[g]]
            if (a == 0) != (b == 0):
                raise NotQuasiInvariant("weight is not quasi-invariant", (g, x))
            out[(g, x)] = a / b if b else Fraction(1)
    return out


def disintegrate(nu: Mapping[str, Fraction], pi: Mapping[str, str], mu: Mapping[str, Fraction],
                 X: GSpace, Y: GSpace, lam: HaarSystem) -> DisintegrationResult:
    """ν = Σ_y μ(y) ρ_y with ρ_y(x) = ν(x)/μ(y) on π⁻¹(y).

    Also returns δ with ρ_{γy}(γx) = δ(γ, x) ρ_y(x), the modules Δ_X of ν and
    Δ_Y of μ, and a report checking Δ_X = δ·(Δ_Y∘π) exactly.
    """
    G = X.groupoid
    nu = {x: Fraction(nu.get(x, 0)) for x in X.points}
    mu = {y: Fraction(mu.get(y, 0)) for y in Y.points}
    mass: dict = {y: Fraction(0) for y in Y.points}
    for x in X.points:
        mass[pi[x]] += nu[x]
    for y in Y.points:
        if (mass[y] == 0) != (mu[y] == 0):
            raise NotPseudoImage("base weight and pushforward charge different points", (y,))
    rho = {y: {x: nu[x] / mu[y] for x in X.points if pi[x] == y and mu[y] > 0} for y in Y.points}
    DX = _space_module(nu, X, lam)
    DY = _space_module(mu, Y, lam)
    delta = {}
    rep = Report()
    for (g, x), d in DX.items():
        y = pi[x]
        gy = Y.act[(g, y)]
        if pi[X.act[(g, x)]] != gy:
            rep.add("equivariance", (g, x))
            continue
        if nu[x] == 0:
            delta[(g, x)] = Fraction(1)
        else:
            delta[(g, x)] = rho[gy][X.act[(g, x)]] / rho[y][x]
        if d != delta[(g, x)] * DY[(g, y)]:
            rep.add("module-factorization", (g, x), f"{d} != {delta[(g, x)]}*{DY[(g, y)]}")
    # δ is a cocycle on G⋉X
    for x in X.points:
        for g in G.source_fiber(X.moment[x]):
            gx = X.act[(g, x)]
            for k in G.source_fiber(G.dst[g]):
                if delta[(G.mul(k, g), x)] != delta[(k, gx)] * delta[(g, x)]:
                    rep.add("delta-cocycle", (k, g, x))
    base = QuasiInvariantMeasure(mu, {})
    return DisintegrationResult(base, rho, delta, DX, DY, rep)


# induced measure

@dataclass(frozen=True, eq=False)
class InducedMeasure:
    measure: QuasiInvariantMeasure
    nu: Mapping[str, Fraction]
    b: Mapping[str, Fraction]
    m: QuotientMeasure
    delta_m: Mapping[tuple, Fraction]
    quotient_space: GSpace
    disintegration: DisintegrationResult
    report: Report = field(default_factory=Report)


def induce_measure(mu: Mapping[str, Fraction], C: Correspondence) -> InducedMeasure:
    """Induce a quasi-invariant weight μ of (G, λ) to H through C.

    The weight μ∘α on X is corrected by b with b(xγ)/b(x) = Δ_μ(γ) so that
    it becomes symmetric on X⋊G; its quotient m is a Δ_m-measure on X/G, and
    its pushforward to the units of H is the induced measure.
    """
    G, H = C.G, C.H
    qi = radon_nikodym_module(mu, G, C.lam)
    nu = {x: qi.mu[C.s_X(x)] * C.alpha[x] for x in C.points}
    P = semidirect_product(C.right)
    lamP = semidirect_haar(P, C.lam)
    # arrow (x, γ): b(r)/b(s) = b(x)/b(xγ) = 1/Δ_μ(γ)
    c = {a: 1 / qi.module[g] for a, (x, g) in P.pairs.items()}
    b = trivialize_cocycle(c, P, lamP, multiplicative=True)
    weighted = {x: b[x] * nu[x] for x in C.points}
    m = quotient_measure(weighted, P, lamP)
    Q = C.quotient
    rep = Report()
    if tuple(m.classes) != tuple(Q.classes):
        rep.add("class-labels", (), "orbit labels disagree")
    XQ = quotient_action(C.left, Q)
    delta_m = {}
    for cl in Q.classes:
        x = Q.section[cl]
        for h in H.source_fiber(C.r_X(x)):
            delta_m[(h, cl)] = b[C.left.act[(h, x)]] / b[x] * C.delta[(h, cl)]
    # the representative choice must not matter
    for x in C.points:
        cl = Q.class_of[x]
        for h in H.source_fiber(C.r_X(x)):
            if nu[x] and b[C.left.act[(h, x)]] / b[x] * C.delta[(h, cl)] != delta_m[(h, cl)]:
                rep.add("delta-m-representative", (h, x))
    rep.extend(check_delta_measure(m.m, delta_m, XQ, C.beta), "quotient-")
    U = unit_space(H)
    mu_under = {u: Fraction(0) for u in H.units}
    for cl in Q.classes:
        mu_under[XQ.moment[cl]] += m.m[cl]
    dis = disintegrate(m.m, dict(XQ.moment), mu_under, XQ, U, C.beta)
    rep.extend(dis.report, "disintegration-")
    under = radon_nikodym_module(mu_under, H, C.beta)
    # the module of the induced measure read off through the fibers
    for (h, cl), dm in delta_m.items():
        if m.m[cl] == 0:
            continue
        if under.module[h] != dm / dis.delta[(h, cl)]:
            rep.add("induced-module", (h, cl))
    return InducedMeasure(under, nu, b, m, delta_m, XQ, dis, rep)


# fixed points and induced bundles

def fixed_point_projection(B: HilbertBundle, lam: HaarSystem | None = None):
    """Average the isotropy unitaries at each unit of the (proper) groupoid.

    Returns (projections, bases): P_x = Σ_{γ∈G(x)} κ(γ) L(γ) with κ the
    normalized restriction of λ, and an orthonormal basis of its range.
    """
    P_G = B.groupoid
    lam = lam or counting_haar(P_G)
    projections, bases = {}, {}
    for x in P_G.units:
        iso = P_G.hom(x, x)
        tot = sum((lam.weight[g] for g in iso), Fraction(0))
        d = B.dims[x]
        P = np.zeros((d, d), dtype=complex)
        for g in iso:
            P += float(lam.weight[g] / tot) * B.L[g]
        projections[x] = P
        bases[x] = range_basis(P)
    return projections, bases


@dataclass(frozen=True, eq=False)
class InducedRepresentation:
    rep: Representation
    induced_measure: InducedMeasure
    bases: Mapping[str, np.ndarray]
    projections: Mapping[str, np.ndarray]
    report: Report


def induce_representation(R: Representation, C: Correspondence) -> InducedRepresentation:
    """Induce R of (G, λ) to (H, β) through C.

    The pullback bundle over X⋊G is cut down to isotropy-fixed vectors, each
    orbit ẋ is represented at its smallest point, and the fiber over u ∈ H⁰ is
    the ρ^u-weighted sum of the charged orbits over u.  H acts by
    L(h)ξ(ẏ) = δ^{1/2}(h⁻¹, ẏ) L(γ) ξ(h⁻¹ẏ) where yγ = h x'.
    """
    G, H = C.G, C.H
    im = induce_measure(R.measure.mu, C)
    rep = Report()
    rep.extend(im.report)
    Pg = semidirect_product(C.right)
    # pullback bundle: arrow (x, γ) carries L(γ) from fiber(xγ) to fiber(x)
    dims = {x: R.dims[C.s_X(x)] for x in C.points}
    Lp = {a: R.L[g] for a, (x, g) in Pg.pairs.items()}
    pull = HilbertBundle(Pg, dims, Lp)
    projections, bases = fixed_point_projection(pull, semidirect_haar(Pg, C.lam))
    for x, P in projections.items():
        if not is_projection(P):
            rep.add("projection", (x,))
    Q = C.quotient
    rho = im.disintegration.rho
    mu_u = im.measure.mu
    # coordinates: per unit u, charged classes over u in label order
    layout: dict = {u: [] for u in H.units}
    for cl in Q.classes:
        u = im.quotient_space.moment[cl]
        if im.m.m[cl] > 0:
            layout[u].append(cl)
    offsets, hdims = {}, {}
    for u, cls in layout.items():
        n = 0
        for cl in cls:
            offsets[cl] = n
            n += bases[Q.section[cl]].shape[1]
        hdims[u] = n
    L = {}
    for h in H.arrows:
        u, v = H.dst[h], H.src[h]
        M = np.zeros((hdims[u], hdims[v]), dtype=complex)
        hi = H.inv[h]
        for cl in layout[u]:
            y = Q.section[cl]
            cl_src = im.quotient_space.act[(hi, cl)]
            xp = Q.section[cl_src]
            hx = C.left.act[(h, xp)]
            # transport γ with yγ = h x'
            gam = next(g for g in G.range_fiber(C.s_X(y)) if C.right.act[(y, g)] == hx)
            scale = sqrt_scalar(im.disintegration.delta[(hi, cl)])
            scale = float(scale) * float(sqrt_scalar(rho[u][cl])) / float(sqrt_scalar(rho[v][cl_src]))
            Vy, Vx = bases[y], bases[xp]
            blk = scale * (Vy.conj().T @ R.L[gam] @ Vx)
            i, j = offsets[cl], offsets[cl_src]
            M[i:i + Vy.shape[1], j:j + Vx.shape[1]] = blk
        L[h] = M
    out = Representation(H, C.beta, im.measure, HilbertBundle(H, hdims, L))
    rep.extend(out.validate(), "bundle-")
    return InducedRepresentation(out, im, bases, projections, rep)


# equivalence

def _mats(R: Representation) -> list[np.ndarray]:
    return [R.integrated({g: 1}) for g in R.G.arrows]


def intertwiner(A: list, B: list, seed: int = 0x5EED) -> np.ndarray | None:
    """A unitary U with U A_i U* = B_i for all i, or None."""
    n = A[0].shape[0]
    if B[0].shape[0] != n:
        return None
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    I = np.eye(n)
    S = np.zeros((n * n, n * n), dtype=complex)
    for a, b in zip(A, B):
        K = np.kron(I, b) - np.kron(a.T, I)
        S += K.conj().T @ K
    w, V = np.linalg.eigh(S)
    null = V[:, w < 1e-9 * max(1.0, float(w[-1]))]
    if null.shape[1] == 0:
        return None
    rng = np.random.default_rng(seed)
    T = (null @ (rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1]))).reshape((n, n), order="F")
    if np.linalg.matrix_rank(T, tol=1e-8 * max(1.0, np.abs(T).max())) < n:
        return None
    U = polar_unitary(T)
    err = max(float(np.max(np.abs(U @ a @ U.conj().T - b), initial=0.0)) for a, b in zip(A, B))
    return U if err < 1e-8 else None


def equivalent(R1: Representation, R2: Representation, tol: float = 1e-10) -> Report:
    """Unitary equivalence of two representations of the same groupoid via
    characters of the integrated forms plus an explicit intertwiner."""
    rep = Report()
    A, B = _mats(R1), _mats(R2)
    if A[0].shape != B[0].shape:
        rep.add("dimension", (A[0].shape[0], B[0].shape[0]))
        return rep
    for g, a, b in zip(R1.G.arrows, A, B):
        if abs(np.trace(a) - np.trace(b)) > tol:
            rep.add("character", (g,), f"{np.trace(a):.6g} != {np.trace(b):.6g}")
    if rep.findings:
        return rep
    if intertwiner(A, B) is None:
        rep.add("intertwiner", (), "no unitary intertwiner found")
    return rep


def interior_tensor_rep(C: Correspondence, R: Representation):
    """C_c(H) acting on the completion of C_c(X) ⊗ ℋ_R for the inner product
    ⟨ξ⊗v, η⊗w⟩ = ⟨v, π_R(⟨ξ, η⟩) w⟩.  Returns a function f ↦ matrix in an
    orthonormal basis of the quotient by null vectors."""
    from .correspondence import cstar_inner_product, left_action

    pts = list(C.points)
    n = R.integrated({}).shape[0]
    N = len(pts) * n
    K = np.zeros((N, N), dtype=complex)
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            ip = cstar_inner_product({x: 1}, {y: 1}, C)
            K[i * n:(i + 1) * n, j * n:(j + 1) * n] = R.integrated(ip)
    K = (K + K.conj().T) / 2
    w, V = np.linalg.eigh(K)
    keep = w > 1e-9 * max(1.0, float(w[-1]))
    Bm = V[:, keep] / np.sqrt(w[keep])

    def act(f):
        T = np.zeros((N, N), dtype=complex)
        for j, y in enumerate(pts):
            img = left_action(f, {y: 1}, C)
            for x, c in img.items():
                i = pts.index(x)
                T[i * n:(i + 1) * n, j * n:(j + 1) * n] += complex(c) * np.eye(n)
        return Bm.conj().T @ K @ T @ Bm

    return act


# Mackey

def mackey_decompose(G: FiniteGroupoid, H1: FiniteGroupoid, H2: FiniteGroupoid,
                     R: Representation):
    """Restriction to H1 of the representation induced from H2, split along
    the double cosets H1 x H2.

    Returns (summands, whole, report) with summands a list of
    (label, representative x, induced representation of H1) and whole the
    representation induced through X = G as an (H1, H2)-space.
    """
    summands = []
    for d in double_cosets(G, H1.arrows, H2.arrows):
        x = min(d)
        conj = conjugate_subgroup(G, x, H2.arrows)
        S_el = sorted(set(H1.arrows) & conj, key=H1.arrows.index)
        S = subgroup(H1, S_el, name=f"{H1.name or 'H1'}∩x{H2.name or 'H2'}x⁻¹")
        xi = G.inv[x]
        Rx = rep_from_matrices(S, {s: R.L[G.mul(G.mul(xi, s), x)] for s in S.arrows})
        ind = induce_representation(Rx, induction_correspondence(H1, S))
        summands.append((f"{H1.name or 'H1'}{x}{H2.name or 'H2'}", x, ind.rep))
    whole = induce_representation(R, subgroup_correspondence(G, H1, H2, name="mackey"))
    rep = Report()
    rep.extend(whole.report)
    total = direct_sum([s[2] for s in summands])
    if total.dim() != whole.rep.dim():
        rep.add("dimension", (total.dim(), whole.rep.dim()))
    else:
        rep.extend(equivalent(total, whole.rep), "mackey-")
    return summands, whole.rep, rep
