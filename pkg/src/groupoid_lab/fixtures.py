"""Named groupoids, spaces, correspondences and hypergroupoids used by the
tests, the acceptance run and the CLI."""
from __future__ import annotations

from fractions import Fraction

from . import groups
from .action import (
    EquivariantSystem,
    action_from_function,
    coset_space,
    negation_space,
    semidirect_product,
    translation_space,
)
from .correspondence import (
    identity_correspondence,
    induction_correspondence,
    negation_correspondence,
    restriction_correspondence,
)
from .groupoid import counting_haar, disjoint_union, haar_from_unit_weights, pair_groupoid
from .hyper import double_coset_construct, hyper_from_groupoid, spatial_construct

__all__ = [
    "builtin_group",
    "GROUP_NAMES",
    "permutation_space",
    "groupoid_fixtures",
    "correspondence_fixtures",
    "hyper_fixtures",
    "small_subgroup_pairs",
]

_GROUPS = {
    "z1": lambda: groups.cyclic(1, name="1"),
    "z2": groups.z2,
    "z3": lambda: groups.cyclic(3),
    "z4": lambda: groups.cyclic(4),
    "z6": lambda: groups.cyclic(6),
    "z8": lambda: groups.cyclic(8),
    "v4": groups.klein,
    "s3": lambda: groups.symmetric(3),
    "d4": lambda: groups.dihedral(4),
    "q8": groups.quaternion,
    "a4": lambda: groups.alternating(4),
    "d6": lambda: groups.dihedral(6),
}
GROUP_NAMES = tuple(_GROUPS)


def builtin_group(name: str):
    key = name.lower().replace("/", "").replace("_", "")
    if key not in _GROUPS:
        raise KeyError(f"unknown group {name!r}; known: {', '.join(GROUP_NAMES)}")
    return _GROUPS[key]()


def permutation_space(G, n: int, name: str = ""):
    """A permutation group acting on the points 1..n."""
    pts = tuple(str(i) for i in range(1, n + 1))

    def act(g, x):
        perm = groups._parse_cycles(g, n)
        return str(perm[int(x) - 1] + 1)

    return action_from_function(G, pts, {p: G.identity for p in pts}, act, "left", name or f"{{1..{n}}}")


def groupoid_fixtures():
    """(label, groupoid, Haar system) triples: groups up to order 8, pair
    groupoids up to 4 points, action groupoids up to 24 arrows and a few with
    non-uniform Haar weights."""
    out = []
    for key in ("z1", "z2", "z3", "z4", "v4", "s3", "z6", "d4", "q8", "z8"):
        G = builtin_group(key)
        out.append((G.name or key, G, counting_haar(G)))
    for n in range(1, 5):
        P = pair_groupoid(n)
        out.append((P.name, P, counting_haar(P)))
    S3 = builtin_group("s3")
    K = groups.generate_subgroup(S3, ["(12)"])
    spaces = [
        negation_space(),
        permutation_space(S3, 3),
        coset_space(S3, K),
        translation_space(builtin_group("z4")),
        permutation_space(builtin_group("v4"), 4),
    ]
    for X in spaces:
        A = semidirect_product(X)
        out.append((A.name, A, counting_haar(A)))
    P3 = pair_groupoid(3)
    out.append(("pair(3) weighted", P3, haar_from_unit_weights(P3, {"1": 1, "2": Fraction(1, 2), "3": 3})))
    U = disjoint_union([builtin_group("z2"), pair_groupoid(2)])
    out.append((U.name, U, haar_from_unit_weights(U, {"0:e": 2, "1:1": 1, "1:2": Fraction(1, 3)})))
    return out


def correspondence_fixtures():
    z2, z4, s3 = builtin_group("z2"), builtin_group("z4"), builtin_group("s3")
    H4 = groups.subgroup(z4, groups.generate_subgroup(z4, ["g2"]), name="Z/2")
    K = groups.subgroup(s3, groups.generate_subgroup(s3, ["(12)"]), name="K")
    return [
        ("identity Z/2", identity_correspondence(z2)),
        ("identity S3", identity_correspondence(s3)),
        ("identity pair(3) weighted", identity_correspondence(
            pair_groupoid(3), haar_from_unit_weights(pair_groupoid(3), {"1": 1, "2": Fraction(1, 2), "3": 3}))),
        ("restriction Z/2 <= Z/4", restriction_correspondence(z4, H4)),
        ("induction K <= S3", induction_correspondence(s3, K)),
        ("negation", negation_correspondence()),
    ]


def hyper_fixtures():
    """(label, H, λ, spatial context or None)."""
    out = []
    X = negation_space()
    G = X.groupoid
    H, lam, ctx = spatial_construct(G, counting_haar(G), X, EquivariantSystem({p: Fraction(1) for p in X.points}))
    out.append(("negation spatial", H, lam, ctx))
    X = negation_space()
    H, lam, ctx = spatial_construct(G, counting_haar(G), X,
                                    EquivariantSystem({"-1": Fraction(2), "0": Fraction(1, 2), "1": Fraction(2)}))
    out.append(("negation spatial weighted", H, lam, ctx))
    s3, z4 = builtin_group("s3"), builtin_group("z4")
    for label, Gp, gens in (("S3/<(12)>", s3, ["(12)"]), ("S3/<(123)>", s3, ["(123)"]),
                            ("Z4/<g2>", z4, ["g2"])):
        H, lam, ctx = double_coset_construct(Gp, groups.generate_subgroup(Gp, gens))
        out.append((label, H, lam, ctx))
    T = translation_space(s3)
    H, lam, ctx = spatial_construct(s3, counting_haar(s3), T, EquivariantSystem({p: Fraction(1) for p in T.points}))
    out.append(("S3 free spatial", H, lam, ctx))
    for label, Gd, lamd in (("S3 point masses", s3, counting_haar(s3)),
                            ("pair(3) point masses", pair_groupoid(3),
                             haar_from_unit_weights(pair_groupoid(3), {"1": 1, "2": Fraction(1, 2), "3": 3}))):
        H, lam = hyper_from_groupoid(Gd, lamd)
        out.append((label, H, lam, None))
    return out


def small_subgroup_pairs(rng, count: int = 5):
    """Random (G, H1, H2) with |G| <= 12 drawn from the builtin groups."""
    names = ["s3", "d4", "q8", "a4", "d6", "z6", "v4"]
    out = []
    for _ in range(count):
        G = builtin_group(names[int(rng.integers(len(names)))])
        subs = groups.all_subgroups(G)
        a, b = (subs[int(i)] for i in rng.integers(len(subs), size=2))
        H1 = groups.subgroup(G, a, name="H1")
        H2 = groups.subgroup(G, b, name="H2")
        out.append((G, H1, H2))
    return out
