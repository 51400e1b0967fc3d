"""Finite groupoids, Haar systems, isotropy, and the standard builders.

Arrows and units are opaque string ids; a unit is identified with its
identity arrow.  Composition is an explicit table on composable pairs
``(a, b)`` with ``s(a) == r(b)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import MalformedTable, NonPositiveWeight, UnknownUnit, WeightMissing
from .report import Report

__all__ = [
    "FiniteGroupoid",
    "HaarSystem",
    "IsotropySummary",
    "validate_groupoid",
    "validate_haar",
    "counting_haar",
    "haar_from_unit_weights",
    "isotropy",
    "group_groupoid",
    "pair_groupoid",
    "disjoint_union",
    "build_standard",
    "subgroupoid",
    "opposite",
    "find_isomorphism",
]


def _freeze(d) -> Mapping:
    return MappingProxyType(dict(d))


@dataclass(frozen=True, eq=False)
class FiniteGroupoid:
    arrows: tuple
    units: tuple
    src: Mapping[str, str]
    dst: Mapping[str, str]
    inv: Mapping[str, str]
    table: Mapping[tuple, str]
    name: str = ""
    _range_fibers: Mapping = field(init=False, repr=False)
    _source_fibers: Mapping = field(init=False, repr=False)

    def __post_init__(self):
        arrows = tuple(self.arrows)
        units = tuple(self.units)
        object.__setattr__(self, "arrows", arrows)
        object.__setattr__(self, "units", units)
        for attr in ("src", "dst", "inv", "table"):
            object.__setattr__(self, attr, _freeze(getattr(self, attr)))
        aset = set(arrows)
        if len(aset) != len(arrows):
            raise MalformedTable("duplicate arrow ids")
        uset = set(units)
        if not uset <= aset:
            raise MalformedTable("units must be arrows", sorted(uset - aset))
        for a in arrows:
            for attr in ("src", "dst", "inv"):
                m = getattr(self, attr)
                if a not in m:
                    raise MalformedTable(f"arrow {a!r} has no {attr} entry", (a,))
            if self.src[a] not in uset or self.dst[a] not in uset:
                raise MalformedTable(f"arrow {a!r} has a non-unit endpoint", (a,))
            if self.inv[a] not in aset:
                raise MalformedTable(f"inverse of {a!r} is not an arrow", (a,))
        for (a, b), c in self.table.items():
            if a not in aset or b not in aset or c not in aset:
                raise MalformedTable("compose entry references an unknown arrow", (a, b, c))
        rf = {u: [] for u in units}
        sf = {u: [] for u in units}
        for a in arrows:
            rf[self.dst[a]].append(a)
            sf[self.src[a]].append(a)
        object.__setattr__(self, "_range_fibers", _freeze({u: tuple(v) for u, v in rf.items()}))
        object.__setattr__(self, "_source_fibers", _freeze({u: tuple(v) for u, v in sf.items()}))

    # structure maps
    def r(self, a: str) -> str:
        return self.dst[a]

    def s(self, a: str) -> str:
        return self.src[a]

    def inverse(self, a: str) -> str:
        return self.inv[a]

    def compose(self, a: str, b: str) -> str | None:
        """``a*b`` if the pair is composable and tabulated, else None."""
        return self.table.get((a, b))

    def mul(self, a: str, b: str) -> str:
        c = self.table.get((a, b))
        if c is None:
            raise KeyError(f"({a}, {b}) is not composable")
        return c

    def range_fiber(self, u: str) -> tuple:
        """G^u, arrows with range u."""
        return self._range_fibers[u]

    def source_fiber(self, u: str) -> tuple:
        """G_u, arrows with source u."""
        return self._source_fibers[u]

    def hom(self, x: str, y: str) -> tuple:
        """Arrows with range x and source y."""
        return tuple(a for a in self._range_fibers[x] if self.src[a] == y)

    def is_unit(self, a: str) -> bool:
        return a in self._range_fibers

    def is_group(self) -> bool:
        return len(self.units) == 1

    @property
    def identity(self) -> str:
        if not self.is_group():
            raise ValueError("groupoid has more than one unit")
        return self.units[0]

    def orbits(self) -> list[tuple]:
        """Orbits of the unit space, each sorted, listed by smallest member."""
        seen, out = set(), []
        for u in sorted(self.units):
            if u in seen:
                continue
            orb = tuple(sorted({self.src[a] for a in self._range_fibers[u]}))
            seen.update(orb)
            out.append(orb)
        return out

    def __len__(self):
        return len(self.arrows)

    def __repr__(self):
        label = self.name or "FiniteGroupoid"
        return f"<{label}: {len(self.arrows)} arrows, {len(self.units)} units>"


@dataclass(frozen=True)
class HaarSystem:
    """Positive exact weight per arrow, read as the measures λ^u on range fibers."""

    weight: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "weight", _freeze({k: Fraction(v) for k, v in self.weight.items()}))

    def __getitem__(self, a: str) -> Fraction:
        return self.weight[a]

    def fiber_mass(self, G: FiniteGroupoid, u: str) -> Fraction:
        return sum((self.weight[a] for a in G.range_fiber(u)), Fraction(0))


@dataclass(frozen=True)
class IsotropySummary:
    point: str
    group: FiniteGroupoid
    kappa: Mapping[str, Fraction]


def validate_groupoid(G: FiniteGroupoid) -> Report:
    """Check every groupoid axiom exhaustively and report each violation."""
    rep = Report()
    units = set(G.units)
    for u in G.units:
        if G.src[u] != u or G.dst[u] != u:
            rep.add("unit-endpoints", (u,), "r(i(u)) and s(i(u)) must equal u")
        if G.inv[u] != u:
            rep.add("unit-inverse", (u,), "a unit must be its own inverse")
    for a in G.arrows:
        ai = G.inv[a]
        if G.dst[ai] != G.src[a] or G.src[ai] != G.dst[a]:
            rep.add("inverse-endpoints", (a, ai), "r(a^-1) must be s(a)")
        if G.inv[ai] != a:
            rep.add("inverse-involution", (a, ai), "(a^-1)^-1 must be a")
    for a in G.arrows:
        for b in G.arrows:
            composable = G.src[a] == G.dst[b]
            c = G.table.get((a, b))
            if composable and c is None:
                rep.add("compose-missing", (a, b), "composable pair has no product")
            elif not composable and c is not None:
                rep.add("compose-extra", (a, b), "product given for a non-composable pair")
            elif c is not None and (G.dst[c] != G.dst[a] or G.src[c] != G.src[b]):
                rep.add("compose-endpoints", (a, b), "r(ab)=r(a) and s(ab)=s(b) fail")
    for a in G.arrows:
        ru, su = G.dst[a], G.src[a]
        if ru in units and G.table.get((ru, a)) != a:
            rep.add("unit-law", (ru, a), "i(r(a))*a must be a")
        if su in units and G.table.get((a, su)) != a:
            rep.add("unit-law", (a, su), "a*i(s(a)) must be a")
        ai = G.inv[a]
        if G.table.get((a, ai)) != ru:
            rep.add("inverse-law", (a, ai), "a*a^-1 must be i(r(a))")
        if G.table.get((ai, a)) != su:
            rep.add("inverse-law", (ai, a), "a^-1*a must be i(s(a))")
    right_of = {u: [b for b in G.arrows if G.dst[b] == u] for u in G.units}
    for a in G.arrows:
        for b in right_of.get(G.src[a], ()):
            ab = G.table.get((a, b))
            for c in right_of.get(G.src[b], ()):
                bc = G.table.get((b, c))
                if ab is None or bc is None:
                    continue
                left = G.table.get((ab, c))
                right = G.table.get((a, bc))
                if left != right:
                    rep.add("associativity", (a, b, c), f"(ab)c={left} but a(bc)={right}")
    return rep


def validate_haar(G: FiniteGroupoid, lam: HaarSystem) -> Report:
    """Left invariance ``weight(γγ') == weight(γ')`` on all composable pairs."""
    for a in G.arrows:
        if a not in lam.weight:
            raise WeightMissing(f"no weight for arrow {a!r}", (a,))
        if lam.weight[a] <= 0:
            raise NonPositiveWeight(f"weight of {a!r} is {lam.weight[a]}", (a,))
    rep = Report()
    for a in G.arrows:
        for b in G.range_fiber(G.src[a]):
            ab = G.table.get((a, b))
            if ab is not None and lam.weight[ab] != lam.weight[b]:
                rep.add("haar-invariance", (a, b),
                        f"weight({ab})={lam.weight[ab]} != weight({b})={lam.weight[b]}")
    return rep


def counting_haar(G: FiniteGroupoid) -> HaarSystem:
    return HaarSystem({a: Fraction(1) for a in G.arrows})


def haar_from_unit_weights(G: FiniteGroupoid, c: Mapping[str, Fraction]) -> HaarSystem:
    """The left Haar system with weight(γ) = c(s(γ)); every left Haar system
    of a finite groupoid has this form."""
    return HaarSystem({a: Fraction(c[G.src[a]]) for a in G.arrows})


def subgroupoid(G: FiniteGroupoid, arrows: Iterable[str], name: str = "") -> FiniteGroupoid:
    """Restriction of the tables to a subset closed under product and inverse."""
    keep = set(arrows)
    units = tuple(u for u in G.units if u in keep)
    table = {(a, b): c for (a, b), c in G.table.items() if a in keep and b in keep}
    for (a, b), c in table.items():
        if c not in keep:
            raise MalformedTable("subset is not closed under composition", (a, b, c))
    order = tuple(a for a in G.arrows if a in keep)
    return FiniteGroupoid(order, units,
                          {a: G.src[a] for a in order}, {a: G.dst[a] for a in order},
                          {a: G.inv[a] for a in order}, table, name=name)


def isotropy(G: FiniteGroupoid, x: str) -> IsotropySummary:
    if x not in G.units:
        raise UnknownUnit(f"{x!r} is not a unit", (x,))
    arrows = G.hom(x, x)
    grp = subgroupoid(G, arrows, name=f"{G.name or 'G'}({x})")
    n = len(arrows)
    return IsotropySummary(x, grp, MappingProxyType({a: Fraction(1, n) for a in arrows}))


def opposite(G: FiniteGroupoid) -> FiniteGroupoid:
    """Same arrows with range and source exchanged and products reversed."""
    table = {(b, a): c for (a, b), c in G.table.items()}
    return FiniteGroupoid(G.arrows, G.units, G.dst, G.src, G.inv, table,
                          name=(G.name + "^op") if G.name else "")


def group_groupoid(elements: Sequence[str], mult, name: str = "") -> FiniteGroupoid:
    """A finite group as a one-unit groupoid.

    ``mult`` is a mapping ``(a, b) -> ab`` or a two-argument callable.
    """
    elements = tuple(elements)
    eset = set(elements)
    get = mult if callable(mult) else (lambda a, b: mult[(a, b)])
    table = {}
    for a in elements:
        for b in elements:
            try:
                c = get(a, b)
            except KeyError:
                raise MalformedTable("multiplication table is incomplete", (a, b)) from None
            if c not in eset:
                raise MalformedTable("product is not an element", (a, b, c))
            table[(a, b)] = c
    ident = [e for e in elements if all(table[(e, a)] == a == table[(a, e)] for a in elements)]
    if not ident:
        raise MalformedTable("multiplication table has no identity")
    e = ident[0]
    inv = {}
    for a in elements:
        cands = [b for b in elements if table[(a, b)] == e]
        if not cands:
            raise MalformedTable("element has no inverse", (a,))
        inv[a] = cands[0]
    src = {a: e for a in elements}
    return FiniteGroupoid(elements, (e,), src, dict(src), inv, table, name=name)


def pair_groupoid(n_or_points, name: str = "") -> FiniteGroupoid:
    """Pair groupoid on points; the arrow ``(i,j)`` has range i and source j.

    Units carry the point ids themselves.
    """
    if isinstance(n_or_points, int):
        points = tuple(str(i) for i in range(1, n_or_points + 1))
    else:
        points = tuple(map(str, n_or_points))

    def aid(i, j):
        return i if i == j else f"({i},{j})"

    arrows, src, dst, inv, table = [], {}, {}, {}, {}
    for i in points:
        for j in points:
            a = aid(i, j)
            arrows.append(a)
            dst[a], src[a], inv[a] = i, j, aid(j, i)
    for i, j, k in itertools.product(points, repeat=3):
        table[(aid(i, j), aid(j, k))] = aid(i, k)
    return FiniteGroupoid(tuple(arrows), points, src, dst, inv, table,
                          name=name or f"pair({len(points)})")


def disjoint_union(parts: Sequence[FiniteGroupoid], name: str = "") -> FiniteGroupoid:
    """Disjoint union; ids of the k-th part are prefixed with ``"k:"``."""
    arrows, units, src, dst, inv, table = [], [], {}, {}, {}, {}
    for k, G in enumerate(parts):
        p = f"{k}:"
        arrows += [p + a for a in G.arrows]
        units += [p + u for u in G.units]
        for a in G.arrows:
            src[p + a], dst[p + a], inv[p + a] = p + G.src[a], p + G.dst[a], p + G.inv[a]
        for (a, b), c in G.table.items():
            table[(p + a, p + b)] = p + c
    return FiniteGroupoid(tuple(arrows), tuple(units), src, dst, inv, table,
                          name=name or " + ".join(G.name or "G" for G in parts))


def build_standard(kind: str, *args, **kwargs) -> FiniteGroupoid:
    """Dispatch to the standard builders.

    ``group``: (elements, mult) | ``pair``: n | ``action``: (G, X) |
    ``disjoint-union``: list of groupoids.
    """
    if kind == "group":
        return group_groupoid(*args, **kwargs)
    if kind == "pair":
        return pair_groupoid(*args, **kwargs)
    if kind == "action":
        from .action import semidirect_product, validate_action
        G, X = args
        rep = validate_action(X)
        if not rep.ok:
            raise MalformedTable("action fails validation", rep.sorted_findings()[0].witness)
        return semidirect_product(X, **kwargs)
    if kind in ("disjoint-union", "disjoint_union"):
        return disjoint_union(*args, **kwargs)
    raise ValueError(f"unknown groupoid kind {kind!r}")


def find_isomorphism(G: FiniteGroupoid, H: FiniteGroupoid) -> dict | None:
    """Search for an arrow bijection preserving r, s and products.

    Backtracking over unit bijections and then arrows; meant for small
    groupoids only.
    """
    if len(G.arrows) != len(H.arrows) or len(G.units) != len(H.units):
        return None

    def profile(K, u):
        return (len(K.range_fiber(u)), len(K.hom(u, u)))

    gu = sorted(G.units, key=lambda u: profile(G, u))
    for perm in itertools.permutations(H.units):
        umap = dict(zip(gu, perm))
        if any(profile(G, u) != profile(H, umap[u]) for u in gu):
            continue
        amap = dict(umap)
        order = [a for a in G.arrows if a not in umap]
        used = set(umap.values())

        def extend(i):
            if i == len(order):
                return all(amap[G.table[(a, b)]] == H.table.get((amap[a], amap[b]))
                           for (a, b) in G.table)
            a = order[i]
            rr, ss = umap[G.dst[a]], umap[G.src[a]]
            for b in H.hom(rr, ss):
                if b in used:
                    continue
                amap[a] = b
                used.add(b)
                ok = True
                for (x, y), z in G.table.items():
                    if x in amap and y in amap and z in amap:
                        if H.table.get((amap[x], amap[y])) != amap[z]:
                            ok = False
                            break
                if ok and extend(i + 1):
                    return True
                used.discard(b)
                del amap[a]
            return False

        if extend(0):
            return amap
    return None
