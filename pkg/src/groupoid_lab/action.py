"""Finite G-spaces: validation, semidirect products, quotients, fibered
products, equivariant weights and the two fiber integrations.

A left space carries ``act[(γ, x)] = γx`` defined when ``s(γ) == moment(x)``;
a right space carries ``act[(x, γ)] = xγ`` defined when ``moment(x) == r(γ)``.
Internally a right action is handled as a left action of the opposite
groupoid, so one code path serves both sides.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

from .errors import InvalidAction, MalformedAction, ProjectionMismatch
from .groupoid import FiniteGroupoid, HaarSystem, opposite
from .report import Report

__all__ = [
    "GSpace",
    "ActionGroupoid",
    "QuotientSpace",
    "FiberedProduct",
    "FiberIntegration",
    "EquivariantSystem",
    "validate_action",
    "validate_equivariant",
    "semidirect_product",
    "orbit_quotient",
    "quotient_action",
    "fibered_product",
    "fiber_systems",
    "action_from_function",
    "translation_space",
    "unit_space",
    "coset_space",
    "negation_space",
    "restrict_action",
]


def _freeze(d) -> Mapping:
    return MappingProxyType(dict(d))


@dataclass(frozen=True, eq=False)
class GSpace:
    groupoid: FiniteGroupoid
    points: tuple
    moment: Mapping[str, str]
    act: Mapping[tuple, str]
    side: str = "left"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "moment", _freeze(self.moment))
        object.__setattr__(self, "act", _freeze(self.act))
        if self.side not in ("left", "right"):
            raise MalformedAction(f"side must be left or right, not {self.side!r}")
        pset = set(self.points)
        if len(pset) != len(self.points):
            raise MalformedAction("duplicate point ids")
        G = self.groupoid
        for x in self.points:
            if x not in self.moment:
                raise MalformedAction(f"point {x!r} has no moment", (x,))
            if self.moment[x] not in G.dst or not G.is_unit(self.moment[x]):
                raise MalformedAction(f"moment of {x!r} is not a unit", (x,))
        for key, y in self.act.items():
            g, x = key if self.side == "left" else (key[1], key[0])
            if g not in G.dst or x not in pset or y not in pset:
                raise MalformedAction("act entry references an unknown id", (g, x, y))

    @property
    def acting(self) -> FiniteGroupoid:
        """G for a left space, the opposite of G for a right space."""
        return self.groupoid if self.side == "left" else opposite(self.groupoid)

    def left_table(self) -> dict:
        """``(γ, x) -> γ·x`` for the acting groupoid."""
        if self.side == "left":
            return dict(self.act)
        return {(g, x): y for (x, g), y in self.act.items()}

    def as_left(self) -> "GSpace":
        if self.side == "left":
            return self
        return GSpace(self.acting, self.points, self.moment, self.left_table(), "left", self.name)

    def left_act(self, g: str, x: str) -> str:
        return self.act[(g, x)]

    def right_act(self, x: str, g: str) -> str:
        return self.act[(x, g)]

    def acting_arrows(self, x: str) -> tuple:
        """Arrows that may act on x."""
        G = self.groupoid
        u = self.moment[x]
        return G.source_fiber(u) if self.side == "left" else G.range_fiber(u)

    def stabilizer(self, x: str) -> tuple:
        if self.side == "left":
            return tuple(g for g in self.acting_arrows(x) if self.act.get((g, x)) == x)
        return tuple(g for g in self.acting_arrows(x) if self.act.get((x, g)) == x)


@dataclass(frozen=True, eq=False)
class ActionGroupoid(FiniteGroupoid):
    """Semidirect product; ``pairs`` maps each arrow id to its (γ, x) or (x, γ)."""

    pairs: Mapping = field(default_factory=dict)
    side: str = "left"

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "pairs", _freeze(self.pairs))

    def arrow_of(self, a: str, b: str) -> str:
        key = (a, b)
        for k, v in self.pairs.items():
            if v == key:
                return k
        raise KeyError(key)


@dataclass(frozen=True)
class QuotientSpace:
    classes: tuple
    members: Mapping[str, tuple]
    class_of: Mapping[str, str]
    section: Mapping[str, str]

    def __post_init__(self):
        for attr in ("members", "class_of", "section"):
            object.__setattr__(self, attr, _freeze(getattr(self, attr)))


@dataclass(frozen=True)
class FiberedProduct:
    pairs: tuple
    projection: Mapping[tuple, str]


@dataclass(frozen=True)
class EquivariantSystem:
    """Positive weight per point of a space, read along its moment fibers."""

    weight: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "weight", _freeze({k: Fraction(v) for k, v in self.weight.items()}))

    def __getitem__(self, x):
        return self.weight[x]


@dataclass(frozen=True)
class FiberIntegration:
    """λ₁ and λ₂ for a left space; functions on G*X are keyed by (γ, x)."""

    space: GSpace
    haar: HaarSystem

    def _terms(self, x):
        G = self.space.groupoid
        return G.range_fiber(self.space.moment[x])

    def lambda1(self, f: Mapping[tuple, object]) -> dict:
        X, w = self.space, self.haar.weight
        G = X.groupoid
        out = {}
        for x in X.points:
            total = 0
            for g in self._terms(x):
                total += f.get((g, X.act[(G.inv[g], x)]), 0) * w[g]
            out[x] = total
        return out

    def lambda2(self, f: Mapping[tuple, object]) -> dict:
        X, w = self.space, self.haar.weight
        G = X.groupoid
        out = {}
        for x in X.points:
            total = 0
            for g in self._terms(x):
                total += f.get((G.inv[g], x), 0) * w[g]
            out[x] = total
        return out


def validate_action(X: GSpace) -> Report:
    """Unit, associativity and moment laws of an action, exhaustively.

    Freeness is reported as the metric ``free``; properness is automatic for
    finite actions and recorded as ``proper``.
    """
    L = X.as_left()
    G, act, mom = L.groupoid, L.act, L.moment
    rep = Report()
    for (g, x) in act:
        if G.src[g] != mom[x]:
            raise MalformedAction("act entry on a non-composable pair", (g, x))
    for x in L.points:
        for g in G.source_fiber(mom[x]):
            if (g, x) not in act:
                raise MalformedAction("act table is not total on composable pairs", (g, x))
    for x in L.points:
        u = mom[x]
        if act[(u, x)] != x:
            rep.add("unit-identity", (u, x), f"u.x = {act[(u, x)]}")
        for g in G.source_fiber(u):
            y = act[(g, x)]
            if mom[y] != G.dst[g]:
                rep.add("moment", (g, x), f"moment({y}) != r({g})")
                continue
            for h in G.source_fiber(G.dst[g]):
                hg = G.table.get((h, g))
                if hg is None:
                    continue
                if act[(hg, x)] != act[(h, y)]:
                    rep.add("associativity", (h, g, x), f"(hg).x={act[(hg, x)]} but h.(g.x)={act[(h, y)]}")
    free = all(len(L.stabilizer(x)) == 1 for x in L.points)
    rep.metric("free", free)
    rep.metric("proper", True)
    rep.note("properness holds automatically for finite actions")
    return rep


def validate_equivariant(X: GSpace, alpha: EquivariantSystem) -> Report:
    """weight(γ·x) == weight(x) for every acting pair."""
    rep = Report()
    for x in X.points:
        if x not in alpha.weight:
            rep.add("weight-missing", (x,))
        elif alpha.weight[x] <= 0:
            rep.add("non-positive-weight", (x,))
    if rep.findings:
        return rep
    for key, y in sorted(X.act.items()):
        x = key[1] if X.side == "left" else key[0]
        if alpha.weight[y] != alpha.weight[x]:
            rep.add("equivariance", key, f"weight({y})={alpha.weight[y]} != weight({x})={alpha.weight[x]}")
    return rep


def semidirect_product(X: GSpace, name: str = "") -> ActionGroupoid:
    """G⋉X for a left space, X⋊G for a right space.

    Arrows of G⋉X are pairs (γ, x) with range γx and source x; arrows of X⋊G
    are pairs (x, γ) with range x and source xγ.  Identity pairs take the id
    of their point.
    """
    G = X.groupoid
    rep = validate_action(X)
    if not rep.ok:
        raise InvalidAction("action fails validation", rep.sorted_findings()[0].witness)
    arrows, src, dst, inv, table, pairs = [], {}, {}, {}, {}, {}
    if X.side == "left":
        def aid(g, x):
            return x if G.is_unit(g) else f"({g},{x})"

        for x in X.points:
            for g in G.source_fiber(X.moment[x]):
                a = aid(g, x)
                y = X.act[(g, x)]
                arrows.append(a)
                pairs[a] = (g, x)
                dst[a], src[a] = y, x
                inv[a] = aid(G.inv[g], y)
        for a, (g, x) in pairs.items():
            y = X.act[(g, x)]
            for h in G.source_fiber(G.dst[g]):
                table[(aid(h, y), a)] = aid(G.mul(h, g), x)
    else:
        def aid(x, g):
            return x if G.is_unit(g) else f"({x},{g})"

        for x in X.points:
            for g in G.range_fiber(X.moment[x]):
                a = aid(x, g)
                y = X.act[(x, g)]
                arrows.append(a)
                pairs[a] = (x, g)
                dst[a], src[a] = x, y
                inv[a] = aid(y, G.inv[g])
        for a, (x, g) in pairs.items():
            y = X.act[(x, g)]
            for h in G.range_fiber(G.src[g]):
                table[(a, aid(y, h))] = aid(x, G.mul(g, h))
    order = list(X.points) + [a for a in arrows if a not in set(X.points)]
    label = name or (f"{G.name or 'G'}⋉{X.name or 'X'}" if X.side == "left"
                     else f"{X.name or 'X'}⋊{G.name or 'G'}")
    return ActionGroupoid(tuple(order), tuple(X.points), src, dst, inv, table,
                          name=label, pairs=pairs, side=X.side)


def orbit_quotient(X: GSpace) -> QuotientSpace:
    """Orbit classes labeled ``[rep]``, rep the lexicographically smallest id."""
    L = X.as_left()
    seen, classes, members, class_of, section = set(), [], {}, {}, {}
    for x in sorted(L.points):
        if x in seen:
            continue
        orb = tuple(sorted({L.act[(g, x)] for g in L.groupoid.source_fiber(L.moment[x])}))
        label = f"[{orb[0]}]"
        seen.update(orb)
        classes.append(label)
        members[label] = orb
        section[label] = orb[0]
        for y in orb:
            class_of[y] = label
    return QuotientSpace(tuple(classes), members, class_of, section)


def quotient_action(X: GSpace, Q: QuotientSpace, name: str = "") -> GSpace:
    """Pass a left action on X down to the classes of Q.

    Requires the action to respect the classes, as it does when Q comes from
    a commuting action on the other side.
    """
    if X.side != "left":
        raise InvalidAction("quotient_action expects a left space")
    act, moment = {}, {}
    for c in Q.classes:
        members = Q.members[c]
        moms = {X.moment[x] for x in members}
        if len(moms) != 1:
            raise InvalidAction("moment is not constant on a class", (c,))
        moment[c] = moms.pop()
    for c in Q.classes:
        for x in Q.members[c]:
            for g in X.groupoid.source_fiber(X.moment[x]):
                d = Q.class_of[X.act[(g, x)]]
                if act.setdefault((g, c), d) != d:
                    raise InvalidAction("action does not descend to the quotient", (g, c))
    return GSpace(X.groupoid, Q.classes, moment, act, "left", name or f"{X.name or 'X'}/~")


def fibered_product(p: Mapping[str, str], q: Mapping[str, str],
                    base: Iterable[str] | None = None) -> FiberedProduct:
    """Y*Z = {(y, z): p(y) = q(z)}, in sorted order."""
    if base is not None:
        bset = set(base)
        for name, proj in (("first", p), ("second", q)):
            for y, b in proj.items():
                if b not in bset:
                    raise ProjectionMismatch(f"{name} projection leaves the base", (y, b))
    by_base: dict = {}
    for z, b in q.items():
        by_base.setdefault(b, []).append(z)
    pairs = sorted((y, z) for y, b in p.items() for z in by_base.get(b, ()))
    return FiberedProduct(tuple(pairs), _freeze({(y, z): p[y] for y, z in pairs}))


def fiber_systems(X: GSpace, lam: HaarSystem) -> FiberIntegration:
    if X.side != "left":
        raise InvalidAction("fiber integrations are defined for left spaces")
    for g in X.groupoid.arrows:
        if g not in lam.weight:
            raise InvalidAction("Haar system does not cover the groupoid", (g,))
    return FiberIntegration(X, lam)


# builders

def action_from_function(G: FiniteGroupoid, points: Iterable[str], moment: Mapping[str, str],
                         fn: Callable[[str, str], str], side: str = "left",
                         name: str = "") -> GSpace:
    """Tabulate ``fn(γ, x)`` (left) or ``fn(x, γ)`` (right) on composable pairs."""
    points = tuple(points)
    act = {}
    for x in points:
        if side == "left":
            for g in G.source_fiber(moment[x]):
                act[(g, x)] = fn(g, x)
        else:
            for g in G.range_fiber(moment[x]):
                act[(x, g)] = fn(x, g)
    return GSpace(G, points, moment, act, side, name)


def translation_space(G: FiniteGroupoid, side: str = "left") -> GSpace:
    """G acting on its own arrows by multiplication."""
    if side == "left":
        return action_from_function(G, G.arrows, dict(G.dst), G.mul, "left", G.name)
    return action_from_function(G, G.arrows, dict(G.src), G.mul, "right", G.name)


def unit_space(G: FiniteGroupoid) -> GSpace:
    """G acting on its units by γ·s(γ) = r(γ)."""
    return action_from_function(G, G.units, {u: u for u in G.units},
                                lambda g, u: G.dst[g], "left", "G0")


def coset_space(G: FiniteGroupoid, K: Iterable[str]) -> GSpace:
    """Left G-space G/K; the coset gK is labeled ``{min}K``."""
    from .groups import left_cosets

    cosets = left_cosets(G, K)
    label = {c: f"{min(c)}K" for c in cosets}
    of = {g: label[c] for c in cosets for g in c}
    rep = {label[c]: min(c) for c in cosets}
    e = G.identity
    pts = [label[c] for c in cosets]
    return action_from_function(G, pts, {p: e for p in pts},
                                lambda g, p: of[G.mul(g, rep[p])], "left", "G/K")


def negation_space(G: FiniteGroupoid | None = None) -> GSpace:
    """Z/2 acting on {-1, 0, 1} by negation."""
    from .groups import z2

    G = G or z2()
    e = G.identity
    s = [g for g in G.arrows if g != e][0]
    neg = {"-1": "1", "0": "0", "1": "-1"}
    pts = ("-1", "0", "1")
    return action_from_function(G, pts, {p: e for p in pts},
                                lambda g, x: x if g == e else neg[x], "left", "{-1,0,1}")


def restrict_action(X: GSpace, H: FiniteGroupoid) -> GSpace:
    """Restrict the action to a subgroupoid H (arrow ids shared with X's groupoid)."""
    keep = set(H.arrows)
    if X.side == "left":
        act = {(g, x): y for (g, x), y in X.act.items() if g in keep}
    else:
        act = {(x, g): y for (x, g), y in X.act.items() if g in keep}
    return GSpace(H, X.points, X.moment, act, X.side, X.name)
