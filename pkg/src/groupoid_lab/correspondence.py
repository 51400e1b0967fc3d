"""Δ-correspondences between finite groupoids and their module operations.

Conventions for a left G-space X with weight μ and Haar weights w: the
measure μ is a Δ-measure when, for every acting pair (γ, x),

    μ(γx) w(γ) = Δ(γ, x) μ(x) w(γ⁻¹).

A correspondence from (H, β) to (G, λ) is an (H, G)-bispace X with a
G-equivariant weight α on X (read along the fibers of s_X) and a cocycle Δ on
H⋉(X/G) making α a Δ-measure for the H-action.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .action import (
    ActionGroupoid,
    EquivariantSystem,
    GSpace,
    QuotientSpace,
    action_from_function,
    orbit_quotient,
    semidirect_product,
    translation_space,
    validate_action,
    validate_equivariant,
)
from .convolution import clean, convolve, involute
from .errors import InnerMismatch, NotACoboundary, NotSymmetric
from .exact import conj, exact_sqrt
from .groupoid import FiniteGroupoid, HaarSystem, counting_haar
from .report import Report

__all__ = [
    "Correspondence",
    "QuotientMeasure",
    "ComposedCorrespondence",
    "check_delta_measure",
    "validate_correspondence",
    "semidirect_haar",
    "right_module_action",
    "cstar_inner_product",
    "left_action",
    "sqrt_scalar",
    "trivialize_cocycle",
    "quotient_measure",
    "compose",
    "compose_map",
    "certify_isomorphism",
    "identity_correspondence",
    "mso_alpha",
    "restriction_correspondence",
    "induction_correspondence",
    "subgroup_correspondence",
    "negation_correspondence",
]


def _freeze(d):
    return MappingProxyType(dict(d))


def sqrt_scalar(q):
    """Positive square root, exact when q is a rational square."""
    r = exact_sqrt(q) if isinstance(q, (int, Fraction)) else None
    return r if r is not None else math.sqrt(float(q))


@dataclass(frozen=True, eq=False)
class Correspondence:
    """(H, β) → (G, λ) correspondence.

    ``left`` is the H-action and ``right`` the G-action on the same points;
    ``delta`` is keyed by (h, class of X/G).
    """

    H: FiniteGroupoid
    beta: HaarSystem
    G: FiniteGroupoid
    lam: HaarSystem
    left: GSpace
    right: GSpace
    alpha: EquivariantSystem
    delta: Mapping[tuple, Fraction]
    name: str = ""
    quotient: QuotientSpace = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "delta", _freeze({k: Fraction(v) for k, v in self.delta.items()}))
        object.__setattr__(self, "quotient", orbit_quotient(self.right))

    @property
    def points(self) -> tuple:
        return self.left.points

    def r_X(self, x):
        return self.left.moment[x]

    def s_X(self, x):
        return self.right.moment[x]

    def Delta(self, h: str, x: str) -> Fraction:
        """Module at the H⋉X arrow (h, x), read through the class of x."""
        return self.delta[(h, self.quotient.class_of[x])]

    def point_delta(self) -> dict:
        """Δ on all acting pairs (h, x) of H⋉X."""
        out = {}
        for x in self.points:
            for h in self.H.source_fiber(self.r_X(x)):
                out[(h, x)] = self.Delta(h, x)
        return out


@dataclass(frozen=True)
class QuotientMeasure:
    classes: tuple
    class_of: Mapping[str, str]
    members: Mapping[str, tuple]
    m: Mapping[str, Fraction]
    cutoff: Mapping[str, Fraction]


def semidirect_haar(P: ActionGroupoid, lam: HaarSystem) -> HaarSystem:
    """Haar weights of G⋉X or X⋊G inherited from λ."""
    w = {}
    for a, pair in P.pairs.items():
        g = pair[0] if P.side == "left" else pair[1]
        w[a] = lam.weight[g]
    return HaarSystem(w)


def check_delta_measure(mu: Mapping[str, Fraction], Delta: Mapping[tuple, Fraction],
                        X: GSpace, lam: HaarSystem) -> Report:
    """μ∘λ₁ = Δ(μ∘λ₂) as weights on G⋉X, exactly.

    The weight of the arrow (γ, x) is μ(γx) w(γ) under μ∘λ₁ and
    μ(x) w(γ⁻¹) under μ∘λ₂.
    """
    G, w = X.groupoid, lam.weight
    rep = Report()
    for x in X.points:
        for g in G.source_fiber(X.moment[x]):
            lhs = Fraction(mu.get(X.act[(g, x)], 0)) * w[g]
            d = Delta.get((g, x))
            if d is None:
                rep.add("delta-missing", (g, x), "no module value")
                continue
            rhs = Fraction(d) * Fraction(mu.get(x, 0)) * w[G.inv[g]]
            if lhs != rhs:
                rep.add("delta-measure", (g, x), f"{lhs} != {rhs}")
    return rep


def validate_correspondence(C: Correspondence) -> Report:
    rep = Report()
    rep.extend(validate_action(C.left), "left-")
    rep.extend(validate_action(C.right), "right-")
    # drop per-side freeness/properness metrics; properness of the right action is what matters
    for k in ("left-free", "left-proper", "right-free", "right-proper"):
        rep.metrics.pop(k, None)
    rep.metric("right-proper", True)
    if C.left.points != C.right.points:
        rep.add("point-sets", (), "left and right spaces differ")
        return rep
    H, G = C.H, C.G
    for x in C.points:
        for h in H.source_fiber(C.r_X(x)):
            hx = C.left.act[(h, x)]
            if C.s_X(hx) != C.s_X(x):
                rep.add("moment-invariance", (h, x), "s_X(hx) != s_X(x)")
                continue
            for g in G.range_fiber(C.s_X(x)):
                xg = C.right.act[(x, g)]
                if C.r_X(xg) != C.r_X(x):
                    rep.add("moment-invariance", (x, g), "r_X(xγ) != r_X(x)")
                    continue
                if C.right.act[(hx, g)] != C.left.act[(h, xg)]:
                    rep.add("commute", (h, x, g), "(hx)γ != h(xγ)")
    Q = C.quotient
    # Δ is a positive cocycle on H⋉(X/G)
    for c in Q.classes:
        x = Q.section[c]
        for h in H.source_fiber(C.r_X(x)):
            if (h, c) not in C.delta:
                rep.add("delta-missing", (h, c))
            elif C.delta[(h, c)] <= 0:
                rep.add("delta-positive", (h, c))
    if rep.findings:
        return rep
    for c in Q.classes:
        x = Q.section[c]
        u = C.r_X(x)
        if C.delta[(u, c)] != 1:
            rep.add("delta-cocycle", (u, c), "module at a unit must be 1")
        for h in H.source_fiber(u):
            hc = Q.class_of[C.left.act[(h, x)]]
            for k in H.source_fiber(H.dst[h]):
                lhs = C.delta[(H.mul(k, h), c)]
                rhs = C.delta[(k, hc)] * C.delta[(h, c)]
                if lhs != rhs:
                    rep.add("delta-cocycle", (k, h, c), f"{lhs} != {rhs}")
    rep.extend(validate_equivariant(C.right, C.alpha), "alpha-")
    rep.extend(check_delta_measure(C.alpha.weight, C.point_delta(), C.left, C.beta))
    return rep


# module operations

def right_module_action(xi: Mapping, f: Mapping, C: Correspondence) -> dict:
    """(ξf)(x) = Σ_{γ ∈ G^{s_X(x)}} ξ(xγ) f(γ⁻¹) w(γ)."""
    G, w = C.G, C.lam.weight
    out = {}
    for x in C.points:
        total = 0
        for g in G.range_fiber(C.s_X(x)):
            a = xi.get(C.right.act[(x, g)], 0)
            if a == 0:
                continue
            total += a * f.get(G.inv[g], 0) * w[g]
        out[x] = total
    return clean(out)


def cstar_inner_product(xi: Mapping, eta: Mapping, C: Correspondence) -> dict:
    """⟨ξ, η⟩(γ) = Σ_{s_X(x) = r(γ)} conj ξ(x) η(xγ) α(x)."""
    G = C.G
    out = {}
    for x in C.points:
        a = xi.get(x, 0)
        if a == 0:
            continue
        ca = conj(a) * C.alpha.weight[x]
        for g in G.range_fiber(C.s_X(x)):
            b = eta.get(C.right.act[(x, g)], 0)
            if b != 0:
                out[g] = out.get(g, 0) + ca * b
    return clean(out)


def left_action(g: Mapping, xi: Mapping, C: Correspondence) -> dict:
    """(gξ)(x) = Σ_{h ∈ H^{r_X(x)}} g(h) ξ(h⁻¹x) Δ^{1/2}(h⁻¹, x) β(h)."""
    H, b = C.H, C.beta.weight
    out = {}
    for x in C.points:
        total = 0
        for h in H.range_fiber(C.r_X(x)):
            gh = g.get(h, 0)
            if gh == 0:
                continue
            hi = H.inv[h]
            v = xi.get(C.left.act[(hi, x)], 0)
            if v == 0:
                continue
            total += gh * v * sqrt_scalar(C.Delta(hi, x)) * b[h]
        out[x] = total
    return clean(out)


# cocycles and quotients on proper groupoids

def trivialize_cocycle(c: Mapping[str, object], P: FiniteGroupoid, lam: HaarSystem,
                       multiplicative: bool = False) -> dict:
    """A function b on units with c(γ) = b(r γ) - b(s γ) (additive) or
    c(γ) = b(r γ) / b(s γ) (multiplicative), checked on every arrow.

    Additive cocycles use the cutoff average b(x) = Σ_{γ∈P^x} F(sγ) c(γ) w(γ)
    with F the reciprocal fiber mass.  Multiplicative ones are solved exactly
    by propagating from the smallest point of each orbit.
    """
    b: dict = {}
    if not multiplicative:
        for x in P.units:
            fib = P.range_fiber(x)
            total = 0
            for g in fib:
                F = 1 / lam.fiber_mass(P, P.src[g])
                total += F * c[g] * lam.weight[g]
            b[x] = total
    else:
        for orb in P.orbits():
            base = orb[0]
            b[base] = Fraction(1)
            for g in P.range_fiber(base):
                # g : s(g) -> base, so b(s g) = b(base) / c(g)
                y = P.src[g]
                if y not in b:
                    b[y] = b[base] / c[g]
    for g in P.arrows:
        if multiplicative:
            ok = c[g] * b[P.src[g]] == b[P.dst[g]]
        else:
            ok = c[g] == b[P.dst[g]] - b[P.src[g]]
        if not ok:
            raise NotACoboundary(f"cocycle is not a coboundary at {g!r}", (g,))
    return b


def quotient_measure(mu: Mapping[str, Fraction], P: FiniteGroupoid, lam: HaarSystem) -> QuotientMeasure:
    """The measure m on the orbit space with μ = m∘λ̇.

    Requires μ∘λ to be symmetric: μ(rγ) w(γ) = μ(sγ) w(γ⁻¹) for every arrow.
    m is computed with the cutoff F = 1/(fiber mass): m(ẋ) = Σ_{y∈ẋ} μ(y) F(y).
    """
    w = lam.weight
    for g in P.arrows:
        if Fraction(mu[P.dst[g]]) * w[g] != Fraction(mu[P.src[g]]) * w[P.inv[g]]:
            raise NotSymmetric(f"μ∘λ is not symmetric at {g!r}", (g,))
    classes, class_of, members, m, cutoff = [], {}, {}, {}, {}
    for orb in P.orbits():
        label = f"[{orb[0]}]"
        classes.append(label)
        members[label] = orb
        total = Fraction(0)
        for y in orb:
            class_of[y] = label
            cutoff[y] = 1 / lam.fiber_mass(P, y)
            total += Fraction(mu[y]) * cutoff[y]
        m[label] = total
    return QuotientMeasure(tuple(classes), _freeze(class_of), _freeze(members), _freeze(m), _freeze(cutoff))


# composition

@dataclass(frozen=True, eq=False)
class ComposedCorrespondence:
    """Z = (X*Y)/G₂ together with the data linking it to X and Y."""

    result: Correspondence
    first: Correspondence
    second: Correspondence
    rep_of: Mapping[str, tuple]
    class_of: Mapping[tuple, str]
    b: Mapping[tuple, Fraction]
    report: Report


def compose(Cxy: Correspondence, Cyz: Correspondence, name: str = "") -> ComposedCorrespondence:
    """Compose X: G₁→G₂ with Y: G₂→G₃ into Z = (X*Y)/G₂.

    G₂ acts on X*Y by (x, y)h = (xh, h⁻¹y).  A positive b(x, ẏ) with
    b(xh⁻¹, hy) = b(x, y)/Δ_Y(h, y) makes b·(α×β) symmetric, so it descends
    to τ on Z; the module of Z is Δ(γ, [x,y]) = b(γx, y) Δ_X(γ, x) / b(x, y).
    """
    X, Y = Cxy, Cyz
    if X.G is not Y.H and (X.G.arrows != Y.H.arrows or dict(X.G.table) != dict(Y.H.table)):
        raise InnerMismatch("inner groupoids differ")
    G1, G2, G3 = X.H, X.G, Y.G
    lam2 = X.lam
    if dict(lam2.weight) != dict(Y.beta.weight):
        raise InnerMismatch("inner Haar systems differ")
    QY = Y.quotient
    # W = X * (Y/G₃) as a right G₂-space
    pairs_w = sorted((x, c) for x in X.points for c in QY.classes
                     if X.s_X(x) == Y.r_X(QY.section[c]))
    wid = {p: f"({p[0]};{p[1]})" for p in pairs_w}
    back = {v: k for k, v in wid.items()}

    def act_w(pt, h):
        x, c = back[pt]
        y = QY.section[c]
        return wid[(X.right.act[(x, h)], QY.class_of[Y.left.act[(G2.inv[h], y)]])]

    W = action_from_function(G2, [wid[p] for p in pairs_w],
                             {wid[p]: X.s_X(p[0]) for p in pairs_w}, act_w, "right", "X*(Y/G3)")
    P = semidirect_product(W)
    # arrow ((x,ẏ), h) has range (x,ẏ) and source (xh, h⁻¹ẏ); b(r)/b(s) = 1/Δ_Y(h, h⁻¹ẏ)
    cval = {}
    for a, (pt, h) in P.pairs.items():
        s_pt = W.act[(pt, h)]
        c_s = back[s_pt][1]
        cval[a] = 1 / Y.delta[(h, c_s)]
    bw = trivialize_cocycle(cval, P, semidirect_haar(P, lam2), multiplicative=True)

    def b(x, y):
        return bw[wid[(x, QY.class_of[y])]]

    # X*Y and its G₂-classes
    xy = sorted((x, y) for x in X.points for y in Y.points if X.s_X(x) == Y.r_X(y))
    class_of, rep_of, members = {}, {}, {}
    for p in xy:
        if p in class_of:
            continue
        x, y = p
        orb = sorted({(X.right.act[(x, h)], Y.left.act[(G2.inv[h], y)])
                      for h in G2.range_fiber(X.s_X(x))})
        label = f"[{orb[0][0]};{orb[0][1]}]"
        rep_of[label] = orb[0]
        members[label] = orb
        for q in orb:
            class_of[q] = label
    # symmetry of b·(α×β) on (X*Y)⋊G₂, then τ by the cutoff
    rep = Report()
    for (x, y) in xy:
        for h in G2.range_fiber(X.s_X(x)):
            x2, y2 = X.right.act[(x, h)], Y.left.act[(G2.inv[h], y)]
            lhs = b(x, y) * X.alpha[x] * Y.alpha[y] * lam2.weight[h]
            rhs = b(x2, y2) * X.alpha[x2] * Y.alpha[y2] * lam2.weight[G2.inv[h]]
            if lhs != rhs:
                raise NotSymmetric("b(α×β) is not symmetric", (x, y, h))
    tau = {}
    for label, orb in members.items():
        tot = Fraction(0)
        for (x, y) in orb:
            F = 1 / lam2.fiber_mass(G2, X.s_X(x))
            tot += b(x, y) * X.alpha[x] * Y.alpha[y] * F
        tau[label] = tot
    zpts = sorted(members)

    def left_z(g, z):
        x, y = rep_of[z]
        return class_of[(X.left.act[(g, x)], y)]

    def right_z(z, g):
        x, y = rep_of[z]
        return class_of[(x, Y.right.act[(y, g)])]

    Lz = action_from_function(G1, zpts, {z: X.r_X(rep_of[z][0]) for z in zpts}, left_z, "left", "Z")
    Rz = action_from_function(G3, zpts, {z: Y.s_X(rep_of[z][1]) for z in zpts}, right_z, "right", "Z")
    QZ = orbit_quotient(Rz)
    delta = {}
    for (x, y) in xy:
        z = class_of[(x, y)]
        cz = QZ.class_of[z]
        for g in G1.source_fiber(X.r_X(x)):
            val = b(X.left.act[(g, x)], y) * X.Delta(g, x) / b(x, y)
            old = delta.setdefault((g, cz), val)
            if old != val:
                rep.add("delta-class-dependence", (g, x, y), f"{val} != {old}")
    Z = Correspondence(G1, X.beta, G3, Y.lam, Lz, Rz, EquivariantSystem(tau), delta,
                       name=name or f"{X.name or 'X'}*{Y.name or 'Y'}")
    rep.extend(validate_correspondence(Z))
    bxy = {(x, y): b(x, y) for (x, y) in xy}
    return ComposedCorrespondence(Z, X, Y, _freeze(rep_of), _freeze(class_of), _freeze(bxy), rep)


def compose_map(xi: Mapping, eta: Mapping, CC: ComposedCorrespondence) -> dict:
    """Image of ξ⊗η in C_c(Z):
    [x,y] ↦ Σ_{h ∈ G₂^{s_X(x)}} ξ(xh) η(h⁻¹y) b(xh, h⁻¹y)^{-1/2} w₂(h)."""
    X, Y = CC.first, CC.second
    G2, w = X.G, X.lam.weight
    out = {}
    for z, (x, y) in CC.rep_of.items():
        total = 0
        for h in G2.range_fiber(X.s_X(x)):
            x2, y2 = X.right.act[(x, h)], Y.left.act[(G2.inv[h], y)]
            a, c = xi.get(x2, 0), eta.get(y2, 0)
            if a == 0 or c == 0:
                continue
            total += a * c * w[h] / sqrt_scalar(CC.b[(x2, y2)])
        out[z] = total
    return clean(out)


def certify_isomorphism(C1: Correspondence, C2: Correspondence, point_map: Mapping[str, str],
                        scale_alpha: bool = True) -> Report:
    """Check that a point bijection intertwines both actions, carries α₁ to a
    constant multiple of α₂ on each s_X-fiber (exactly when ``scale_alpha`` is
    false) and matches the modules."""
    rep = Report()
    if sorted(point_map) != sorted(C1.points) or sorted(point_map.values()) != sorted(C2.points):
        rep.add("not-bijective", (), "point map is not a bijection")
        return rep
    for (h, x), y in C1.left.act.items():
        if C2.left.act.get((h, point_map[x])) != point_map[y]:
            rep.add("left-equivariance", (h, x))
    for (x, g), y in C1.right.act.items():
        if C2.right.act.get((point_map[x], g)) != point_map[y]:
            rep.add("right-equivariance", (x, g))
    ratios: dict = {}
    for x in C1.points:
        r = C2.alpha[point_map[x]] / C1.alpha[x]
        key = C1.s_X(x) if scale_alpha else None
        if ratios.setdefault(key, r) != r:
            rep.add("alpha-ratio", (x,), f"{r} != {ratios[key]}")
    if not scale_alpha and ratios.get(None, 1) != 1:
        rep.add("alpha-ratio", (), "weights differ")
    for x in C1.points:
        for h in C1.H.source_fiber(C1.r_X(x)):
            if C1.Delta(h, x) != C2.Delta(h, point_map[x]):
                rep.add("module", (h, x))
    return rep


# standard correspondences

def mso_alpha(left: GSpace, beta: HaarSystem, right: GSpace) -> EquivariantSystem:
    """α_u(y) = Σ_{h: h⁻¹x = y} β(h) for a chosen x over u (smallest id)."""
    H = left.groupoid
    weight = {}
    by_u: dict = {}
    for x in sorted(right.points):
        by_u.setdefault(right.moment[x], x)
    for y in right.points:
        x = by_u[right.moment[y]]
        tot = Fraction(0)
        for h in H.range_fiber(left.moment[x]):
            if left.act[(H.inv[h], x)] == y:
                tot += beta.weight[h]
        weight[y] = tot
    return EquivariantSystem(weight)


def _bispace(H, G, points, left_fn, right_fn, r_mom, s_mom):
    L = action_from_function(H, points, r_mom, left_fn, "left")
    R = action_from_function(G, points, s_mom, right_fn, "right")
    return L, R


def identity_correspondence(G: FiniteGroupoid, lam: HaarSystem | None = None) -> Correspondence:
    """X = G as a (G, G)-space by multiplication, α from β-averaging, Δ ≡ 1."""
    lam = lam or counting_haar(G)
    L = translation_space(G, "left")
    R = translation_space(G, "right")
    alpha = mso_alpha(L, lam, R)
    Q = orbit_quotient(R)
    delta = {(h, c): Fraction(1) for c in Q.classes for h in G.source_fiber(L.moment[Q.section[c]])}
    return Correspondence(G, lam, G, lam, L, R, alpha, delta, name=f"id({G.name or 'G'})")


def subgroup_correspondence(G: FiniteGroupoid, H1: FiniteGroupoid, H2: FiniteGroupoid,
                            name: str = "") -> Correspondence:
    """X = G as an (H1, H2)-space for subgroups H1, H2, α counting, Δ ≡ 1
    (finite groups are unimodular)."""
    e = G.identity
    pts = G.arrows
    L, R = _bispace(H1, H2, pts, G.mul, G.mul, {x: e for x in pts}, {x: e for x in pts})
    Q = orbit_quotient(R)
    delta = {(h, c): Fraction(1) for c in Q.classes for h in H1.arrows}
    return Correspondence(H1, counting_haar(H1), H2, counting_haar(H2), L, R,
                          EquivariantSystem({x: Fraction(1) for x in pts}), delta, name=name)


def restriction_correspondence(G: FiniteGroupoid, H: FiniteGroupoid) -> Correspondence:
    """Y = G as an (H, G)-space; restricts G-representations to H."""
    return subgroup_correspondence(G, H, G, name=f"res({H.name or 'H'})")


def induction_correspondence(G: FiniteGroupoid, H: FiniteGroupoid) -> Correspondence:
    """X = G as a (G, H)-space; induces H-representations to G."""
    return subgroup_correspondence(G, G, H, name=f"ind({H.name or 'H'})")


def negation_correspondence(alpha=(2, 1, 1)) -> Correspondence:
    """Z/2 acting on {-1, 0, 1} by negation, trivial group on the right.

    With α = (a, b, c) on (-1, 0, 1) the module is Δ(s, x) = α(-x)/α(x).
    """
    from .action import negation_space
    from .groupoid import group_groupoid

    L = negation_space()
    H = L.groupoid
    T = group_groupoid(["e"], lambda a, b: "e", name="1")
    R = action_from_function(T, L.points, {p: "e" for p in L.points}, lambda x, g: x, "right")
    a = dict(zip(L.points, (Fraction(v) for v in alpha)))
    delta = {}
    for h in H.arrows:
        for x in L.points:
            delta[(h, f"[{x}]")] = a[L.act[(h, x)]] / a[x]
    return Correspondence(H, counting_haar(H), T, counting_haar(T), L, R,
                          EquivariantSystem(a), delta, name="negation")
