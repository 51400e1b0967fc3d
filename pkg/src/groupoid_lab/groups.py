"""Named finite groups as one-unit groupoids, plus subgroup and coset helpers.

Permutation groups act on {1..n} and their elements are named in cycle
notation without separators (``"(12)(34)"``), the identity being ``"e"``.
Products compose right to left: ``(ab)(i) = a(b(i))``.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .errors import NotASubgroup
from .groupoid import FiniteGroupoid, group_groupoid, subgroupoid

__all__ = [
    "cycle_name",
    "permutation_group",
    "cyclic",
    "z2",
    "symmetric",
    "alternating",
    "dihedral",
    "klein",
    "quaternion",
    "direct_product",
    "generate_subgroup",
    "subgroup",
    "is_subgroup",
    "left_cosets",
    "right_cosets",
    "double_cosets",
    "conjugate_subgroup",
    "all_subgroups",
]


def cycle_name(perm: Sequence[int]) -> str:
    """Cycle notation of a 0-based image tuple, points printed 1-based."""
    n = len(perm)
    seen = [False] * n
    parts = []
    for i in range(n):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc, j = [], i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = perm[j]
        parts.append("(" + "".join(map(str, cyc)) + ")")
    return "".join(parts) or "e"


def _parse_cycles(text: str, n: int) -> tuple:
    perm = list(range(n))
    if text in ("e", ""):
        return tuple(perm)
    for chunk in text.replace(")", " ").replace("(", " ").split():
        pts = [int(c) - 1 for c in chunk]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    return tuple(perm)


def permutation_group(generators: Iterable, n: int, name: str = "") -> FiniteGroupoid:
    """Closure of permutations (0-based image tuples or cycle strings)."""
    gens = [_parse_cycles(g, n) if isinstance(g, str) else tuple(g) for g in generators]
    ident = tuple(range(n))
    els = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = tuple(g[a[i]] for i in range(n))
                if c not in els:
                    els.add(c)
                    nxt.append(c)
        frontier = nxt
    perms = sorted(els)
    names = {p: cycle_name(p) for p in perms}
    order = sorted(names.values(), key=lambda s: (s != "e", len(s), s))
    by_name = {v: k for k, v in names.items()}

    def mult(a, b):
        pa, pb = by_name[a], by_name[b]
        return names[tuple(pa[pb[i]] for i in range(n))]

    return group_groupoid(order, mult, name=name)


def cyclic(n: int, gen: str = "g", name: str = "") -> FiniteGroupoid:
    """Z/n with elements e, g, g2, ..., g{n-1}."""
    def el(k):
        k %= n
        return "e" if k == 0 else (gen if k == 1 else f"{gen}{k}")

    elements = [el(k) for k in range(n)]
    idx = {el(k): k for k in range(n)}
    return group_groupoid(elements, lambda a, b: el(idx[a] + idx[b]), name=name or f"Z/{n}")


def z2() -> FiniteGroupoid:
    """Z/2 = {e, s}."""
    return cyclic(2, gen="s", name="Z/2")


def symmetric(n: int) -> FiniteGroupoid:
    gens = [tuple([1, 0] + list(range(2, n)))] if n >= 2 else []
    if n >= 3:
        gens.append(tuple(list(range(1, n)) + [0]))
    return permutation_group(gens, n, name=f"S{n}")


def alternating(n: int) -> FiniteGroupoid:
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return permutation_group(gens, n, name=f"A{n}")


def dihedral(n: int) -> FiniteGroupoid:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return permutation_group([rot, ref], n, name=f"D{n}")


def klein() -> FiniteGroupoid:
    return permutation_group(["(12)(34)", "(13)(24)"], 4, name="V4")


def quaternion() -> FiniteGroupoid:
    """Q8 with elements 1, -1, i, -i, j, -j, k, -k."""
    basis = {"1": (1, "1"), "i": (1, "i"), "j": (1, "j"), "k": (1, "k")}
    unit_mul = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }

    def parse(x):
        return (-1, x[1:]) if x.startswith("-") else (1, x)

    def show(sign, b):
        return b if sign == 1 else "-" + b

    elements = [show(sg, b) for b in basis for sg in (1, -1)]

    def mult(a, b):
        sa, ba = parse(a)
        sb, bb = parse(b)
        sc, bc = unit_mul[(ba, bb)]
        return show(sa * sb * sc, bc)

    return group_groupoid(elements, mult, name="Q8")


def direct_product(G: FiniteGroupoid, H: FiniteGroupoid, name: str = "") -> FiniteGroupoid:
    els = [f"{a}x{b}" for a in G.arrows for b in H.arrows]
    pairs = {f"{a}x{b}": (a, b) for a in G.arrows for b in H.arrows}

    def mult(x, y):
        (a, b), (c, d) = pairs[x], pairs[y]
        return f"{G.mul(a, c)}x{H.mul(b, d)}"

    return group_groupoid(els, mult, name=name or f"{G.name}x{H.name}")


def generate_subgroup(G: FiniteGroupoid, generators: Iterable[str]) -> frozenset:
    els = {G.identity}
    frontier = [G.identity]
    gens = list(generators)
    for g in gens:
        if g not in G.src:
            raise NotASubgroup(f"{g!r} is not an element", (g,))
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = G.mul(a, g)
                if c not in els:
                    els.add(c)
                    nxt.append(c)
        frontier = nxt
    return frozenset(els)


def is_subgroup(G: FiniteGroupoid, elements: Iterable[str]) -> bool:
    S = set(elements)
    if G.identity not in S:
        return False
    return all(G.mul(a, G.inv[b]) in S for a in S for b in S)


def subgroup(G: FiniteGroupoid, elements: Iterable[str], name: str = "") -> FiniteGroupoid:
    S = set(elements)
    if not S <= set(G.arrows) or not is_subgroup(G, S):
        raise NotASubgroup("elements do not form a subgroup", tuple(sorted(S)))
    return subgroupoid(G, S, name=name)


def left_cosets(G: FiniteGroupoid, K: Iterable[str]) -> list[frozenset]:
    """Cosets gK, sorted by their smallest element id."""
    K = list(K)
    out = {frozenset(G.mul(g, k) for k in K) for g in G.arrows}
    return sorted(out, key=min)


def right_cosets(G: FiniteGroupoid, K: Iterable[str]) -> list[frozenset]:
    K = list(K)
    out = {frozenset(G.mul(k, g) for k in K) for g in G.arrows}
    return sorted(out, key=min)


def double_cosets(G: FiniteGroupoid, H1: Iterable[str], H2: Iterable[str]) -> list[frozenset]:
    """Double cosets H1 x H2, sorted by their smallest element id."""
    H1, H2 = list(H1), list(H2)
    out = {frozenset(G.mul(G.mul(a, g), b) for a in H1 for b in H2) for g in G.arrows}
    return sorted(out, key=min)


def conjugate_subgroup(G: FiniteGroupoid, x: str, K: Iterable[str]) -> frozenset:
    """x K x^-1."""
    xi = G.inv[x]
    return frozenset(G.mul(G.mul(x, k), xi) for k in K)


def all_subgroups(G: FiniteGroupoid) -> list[frozenset]:
    """All subgroups, as iterated joins of cyclic subgroups."""
    subs = {generate_subgroup(G, [a]) for a in G.arrows}
    while True:
        new = set(subs)
        for A, B in itertools.combinations(list(subs), 2):
            new.add(generate_subgroup(G, sorted(A | B)))
        if new == subs:
            break
        subs = new
    return sorted(subs, key=lambda S: (len(S), sorted(S)))
