"""Acceptance criteria as plain functions, shared by the test-suite and the
``selftest`` command.  Each returns a :class:`CriterionResult`; nothing here
depends on wall-clock time, so reports are reproducible."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import groups, oracles
from .action import EquivariantSystem, negation_space, orbit_quotient, quotient_action
from .convolution import (
    ConvolutionAlgebra,
    convolve,
    involute,
    random_element,
    reduced_norm,
    regular_rep_exact,
)
from .correspondence import (
    certify_isomorphism,
    check_delta_measure,
    compose,
    compose_map,
    cstar_inner_product,
    identity_correspondence,
    induction_correspondence,
    left_action,
    negation_correspondence,
    restriction_correspondence,
)
from .exact import GaussianRational
from .fixtures import builtin_group, correspondence_fixtures, groupoid_fixtures, hyper_fixtures, small_subgroup_pairs
from .groupoid import FiniteGroupoid, counting_haar, haar_from_unit_weights, pair_groupoid, validate_groupoid, validate_haar
from .hyper import (
    double_coset_construct,
    hyper_convolve,
    hyper_from_groupoid,
    hyper_left_exact,
    hyper_norms,
    spatial_construct,
    validate_hyper_haar,
    validate_hypergroupoid,
)
from .induction import (
    direct_sum,
    disintegrate,
    induce_measure,
    induce_representation,
    mackey_decompose,
    regular_rep,
    trivial_rep,
)
from .report import Report

__all__ = ["CriterionResult", "CRITERIA", "run_criteria", "selftest_report"]

SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: list = field(default_factory=list)

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.title}"


def _fail(details, msg):
    details.append(msg)
    return False


# 1

def mutate_table(G: FiniteGroupoid, rng):
    """Change one product in the table; returns (mutated groupoid, (a, b))."""
    keys = sorted(G.table)
    a, b = keys[int(rng.integers(len(keys)))]
    old = G.table[(a, b)]
    others = [c for c in G.arrows if c != old]
    new = others[int(rng.integers(len(others)))]
    table = dict(G.table)
    table[(a, b)] = new
    M = FiniteGroupoid(G.arrows, G.units, G.src, G.dst, G.inv, table, name=G.name + "~")
    return M, (a, b)


def criterion_1() -> CriterionResult:
    res = CriterionResult(1, "groupoid and Haar axioms; mutations rejected with witnesses", True)
    rng = np.random.default_rng(SEED)
    for label, G, lam in groupoid_fixtures():
        if not validate_groupoid(G).ok or not validate_haar(G, lam).ok:
            res.passed = _fail(res.details, f"{label}: builder output fails validation")
        if len(G.arrows) < 2:
            continue
        for _ in range(10):
            M, (a, b) = mutate_table(G, rng)
            rep = validate_groupoid(M)
            if rep.ok:
                res.passed = _fail(res.details, f"{label}: mutation at ({a},{b}) accepted")
            elif not any(a in f.witness and b in f.witness for f in rep.findings):
                res.passed = _fail(res.details, f"{label}: no witness names ({a},{b})")
    return res


# 2

def criterion_2(samples: int = 100) -> CriterionResult:
    res = CriterionResult(2, "convolution *-algebra identities and norms", True)
    rng = np.random.default_rng(SEED + 2)
    for label, G, lam in groupoid_fixtures():
        for a in G.arrows:
            for b in G.arrows:
                da, db = {a: 1}, {b: 1}
                ab = convolve(da, db, G, lam)
                if involute(ab, G) != convolve(involute(db, G), involute(da, G), G, lam):
                    res.passed = _fail(res.details, f"{label}: involution at ({a},{b})")
                for c in G.arrows:
                    dc = {c: 1}
                    if convolve(ab, dc, G, lam) != convolve(da, convolve(db, dc, G, lam), G, lam):
                        res.passed = _fail(res.details, f"{label}: associativity at ({a},{b},{c})")
        alg = ConvolutionAlgebra(G, lam)
        worst = 0.0
        for i in range(samples):
            f = random_element(G, rng)
            n = reduced_norm(f, G, lam)
            nn = reduced_norm(convolve(involute(f, G), f, G, lam), G, lam)
            worst = max(worst, abs(nn - n * n) / max(n * n, 1e-300))
            if i < 5:
                full = alg.full_norm(f)
                if abs(full - n) > 1e-8 * max(1.0, n):
                    res.passed = _fail(res.details, f"{label}: full {full} vs reduced {n}")
        if worst > 1e-8:
            res.passed = _fail(res.details, f"{label}: C*-identity off by {worst:.3g}")
    return res


# 3

def _rand_exact(keys, rng):
    return {k: GaussianRational(Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))),
                                Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))).simplify()
            for k in keys}


def _dist(f, g) -> float:
    ks = set(f) | set(g)
    return max((abs(complex(f.get(k, 0)) - complex(g.get(k, 0))) for k in ks), default=0.0)


def criterion_3(samples: int = 100) -> CriterionResult:
    res = CriterionResult(3, "adjoint identity for the left action", True)
    rng = np.random.default_rng(SEED + 3)
    for label, C in correspondence_fixtures():
        trivial = all(v == 1 for v in C.delta.values())
        worst = 0.0
        for _ in range(samples):
            g = _rand_exact(C.H.arrows, rng)
            xi, eta = _rand_exact(C.points, rng), _rand_exact(C.points, rng)
            lhs = cstar_inner_product(left_action(g, xi, C), eta, C)
            rhs = cstar_inner_product(xi, left_action(involute(g, C.H), eta, C), C)
            if trivial and lhs != rhs:
                res.passed = _fail(res.details, f"{label}: exact identity fails")
                break
            worst = max(worst, _dist(lhs, rhs))
        if worst > 1e-10:
            res.passed = _fail(res.details, f"{label}: deviation {worst:.3g}")
    return res


# 4

def criterion_4() -> CriterionResult:
    res = CriterionResult(4, "Δ-measures and the module factorization", True)
    for label, C in correspondence_fixtures():
        rep = check_delta_measure(C.alpha.weight, C.point_delta(), C.left, C.beta)
        if not rep.ok:
            res.passed = _fail(res.details, f"{label}: Δ-measure check fails")
        mu = {u: Fraction(1) for u in C.G.units}
        im = induce_measure(mu, C)
        if not im.report.ok:
            res.passed = _fail(res.details, f"{label}: induced measure checks fail {im.report.codes()}")
    # the worked example and randomized weights on every left space fixture
    X = negation_space()
    Q = orbit_quotient(X)
    d = disintegrate({"-1": 2, "0": 1, "1": 1}, dict(Q.class_of), {"[-1]": 3, "[0]": 1},
                     X, quotient_action(X, Q), counting_haar(X.groupoid))
    if not d.report.ok or d.delta[("s", "1")] != 2 or d.rho["[-1]"] != {"-1": Fraction(2, 3), "1": Fraction(1, 3)}:
        res.passed = _fail(res.details, "negation disintegration example")
    rng = np.random.default_rng(SEED + 4)
    from .fixtures import permutation_space
    from .action import coset_space, translation_space
    s3 = builtin_group("s3")
    spaces = [negation_space(), permutation_space(s3, 3), coset_space(s3, groups.generate_subgroup(s3, ["(12)"])),
              translation_space(builtin_group("z4")), permutation_space(builtin_group("v4"), 4)]
    for X in spaces:
        lam = counting_haar(X.groupoid)
        Q = orbit_quotient(X)
        for _ in range(3):
            nu = {x: Fraction(int(rng.integers(1, 6)), int(rng.integers(1, 4))) for x in X.points}
            mu = {c: sum((nu[x] for x in Q.members[c]), Fraction(0)) for c in Q.classes}
            d = disintegrate(nu, dict(Q.class_of), mu, X, quotient_action(X, Q), lam)
            if not d.report.ok:
                res.passed = _fail(res.details, f"{X.name}: factorization fails")
    return res


# 5

def composition_fixtures():
    z2, z4 = builtin_group("z2"), builtin_group("z4")
    H4 = groups.subgroup(z4, groups.generate_subgroup(z4, ["g2"]), name="Z/2")
    P2 = pair_groupoid(2)
    lamP = haar_from_unit_weights(P2, {"1": 1, "2": Fraction(1, 3)})
    neg = negation_correspondence()
    return [
        ("id(Z/2)*negation", identity_correspondence(neg.H), neg),
        ("negation*id(1)", neg, identity_correspondence(neg.G)),
        ("ind(Z/2<=Z/4)*res(Z/2<=Z/4)", induction_correspondence(z4, H4), restriction_correspondence(z4, H4)),
        ("res*ind", restriction_correspondence(z4, H4), induction_correspondence(z4, H4)),
        ("id(Z/4)*ind", identity_correspondence(z4), induction_correspondence(z4, H4)),
        ("id(pair(2))*id(pair(2))", identity_correspondence(P2, lamP), identity_correspondence(P2, lamP)),
        ("id(Z/2)*id(Z/2)", identity_correspondence(z2), identity_correspondence(z2)),
    ]


def unit_law_maps(CC, side: str) -> dict:
    """Point map Z -> C for identity*C (side 'left') or C*identity ('right')."""
    X, Y = CC.first, CC.second
    if side == "left":
        return {z: Y.left.act[(x, y)] for z, (x, y) in CC.rep_of.items()}
    return {z: X.right.act[(x, y)] for z, (x, y) in CC.rep_of.items()}


def criterion_5(samples: int = 10) -> CriterionResult:
    res = CriterionResult(5, "composition preserves inner products; identity is a unit", True)
    rng = np.random.default_rng(SEED + 5)
    for label, X, Y in composition_fixtures():
        CC = compose(X, Y)
        if not CC.report.ok:
            res.passed = _fail(res.details, f"{label}: composed correspondence invalid {CC.report.codes()}")
            continue
        worst = 0.0
        for _ in range(samples):
            xi, xi2 = _rand_exact(X.points, rng), _rand_exact(X.points, rng)
            eta, eta2 = _rand_exact(Y.points, rng), _rand_exact(Y.points, rng)
            lhs = cstar_inner_product(compose_map(xi, eta, CC), compose_map(xi2, eta2, CC), CC.result)
            rhs = cstar_inner_product(eta, left_action(cstar_inner_product(xi, xi2, X), eta2, Y), Y)
            worst = max(worst, _dist(lhs, rhs))
        if worst > 1e-9:
            res.passed = _fail(res.details, f"{label}: inner products differ by {worst:.3g}")
    for label, C in correspondence_fixtures():
        for side in ("left", "right"):
            I = identity_correspondence(C.H, C.beta) if side == "left" else identity_correspondence(C.G, C.lam)
            CC = compose(I, C) if side == "left" else compose(C, I)
            rep = certify_isomorphism(CC.result, C, unit_law_maps(CC, side))
            if not rep.ok:
                res.passed = _fail(res.details, f"{label}: {side} unit law fails {rep.codes()}")
    return res


# 6

def criterion_6() -> CriterionResult:
    res = CriterionResult(6, "induced characters match the oracles", True)
    for key in ("z2", "z3", "z4", "v4", "s3"):
        G = builtin_group(key)
        E = groups.subgroup(G, [G.identity], name="1")
        ind = induce_representation(trivial_rep(E), induction_correspondence(G, E))
        chi = ind.rep.character()
        if not ind.report.ok or any(chi[g] != oracles.regular_character(G)[g] for g in G.arrows):
            res.passed = _fail(res.details, f"{G.name}: regular character")
    s3 = builtin_group("s3")
    K = groups.subgroup(s3, groups.generate_subgroup(s3, ["(12)"]), name="K")
    ind = induce_representation(trivial_rep(K), induction_correspondence(s3, K))
    chi = ind.rep.character()
    ref = oracles.frobenius_character(s3, K.arrows, {k: 1 for k in K.arrows})
    if max(abs(chi[g] - ref[g]) for g in s3.arrows) > 1e-10:
        res.passed = _fail(res.details, "S3/K: character differs from the Frobenius formula")
    classes = [round(chi["e"].real, 10), round(chi["(12)"].real, 10), round(chi["(123)"].real, 10)]
    if classes != [3, 1, 0]:
        res.passed = _fail(res.details, f"S3/K: class values {classes}")
    return res


# 7

def criterion_7() -> CriterionResult:
    res = CriterionResult(7, "Mackey decomposition", True)
    s3 = builtin_group("s3")
    K = groups.subgroup(s3, groups.generate_subgroup(s3, ["(12)"]), name="K")
    summands, whole, rep = mackey_decompose(s3, K, K, trivial_rep(K))
    dims = [R.dim() for _, _, R in summands]
    if sorted(dims) != [1, 2]:
        res.passed = _fail(res.details, f"S3: summand dims {dims}")
    total = direct_sum([R for _, _, R in summands])
    ct, cw = total.character(), whole.character()
    if max(abs(ct[g] - cw[g]) for g in K.arrows) > 1e-10 or not rep.ok:
        res.passed = _fail(res.details, "S3: characters of the sum and the whole differ")
    rng = np.random.default_rng(SEED + 7)
    for G, H1, H2 in small_subgroup_pairs(rng, 5):
        summands, whole, rep = mackey_decompose(G, H1, H2, trivial_rep(H2))
        if sum(R.dim() for _, _, R in summands) != whole.dim():
            res.passed = _fail(res.details, f"{G.name}: dimensions do not add up")
        if not rep.ok:
            res.passed = _fail(res.details, f"{G.name}: {rep.codes()}")
    return res


# 8

def criterion_8() -> CriterionResult:
    res = CriterionResult(8, "spatial hypergroupoid from Z/2 acting on {-1,0,1}", True)
    X = negation_space()
    G = X.groupoid
    H, lam, ctx = spatial_construct(G, counting_haar(G), X, EquivariantSystem({p: Fraction(1) for p in X.points}))
    if not validate_hypergroupoid(H).ok or not validate_hyper_haar(H, lam).ok:
        res.passed = _fail(res.details, "axiom checks fail")
    if len(H.elements) != 5 or len(H.units) != 2:
        res.passed = _fail(res.details, "wrong element or unit count")
    # oracle: orbits as sets of pairs, averaged over the stabilizer of 0
    ref = oracles.isotropy_average(G, lambda g, x: X.act[(g, x)], "1", "0", "1")
    got = {frozenset(q for q, c in ctx.class_of.items() if c == e): v
           for e, v in H.m(ctx.class_of[("1", "0")], ctx.class_of[("0", "1")]).items()}
    if got != ref:
        res.passed = _fail(res.details, f"kernel {got} != oracle {ref}")
    expect = {frozenset({("1", "1"), ("-1", "-1")}): Fraction(1, 2), frozenset({("1", "-1"), ("-1", "1")}): Fraction(1, 2)}
    if ref != expect:
        res.passed = _fail(res.details, "oracle disagrees with the hand computation")
    return res


# 9

def criterion_9() -> CriterionResult:
    res = CriterionResult(9, "double-coset kernels match the group-algebra oracle", True)
    cases = [(builtin_group("s3"), ["(12)"]), (builtin_group("z4"), ["g2"]), (builtin_group("s3"), ["(123)"])]
    for G, gens in cases:
        K = groups.generate_subgroup(G, gens)
        H, lam, ctx = double_coset_construct(G, K)
        ref = oracles.double_coset_structure(G, K)
        label_of = {}
        for A in {k for pair in ref for k in pair}:
            label_of[A] = f"K{min(A)}K"
        for (A, B), vec in ref.items():
            got = dict(H.m(label_of[A], label_of[B]))
            want = {label_of[Z]: v for Z, v in vec.items()}
            if got != want:
                res.passed = _fail(res.details, f"{G.name}/<{','.join(gens)}>: {label_of[A]}*{label_of[B]}")
        if not validate_hypergroupoid(H).ok or not validate_hyper_haar(H, lam).ok:
            res.passed = _fail(res.details, f"{G.name}/<{','.join(gens)}>: axioms")
    # the worked example: 1_C1 * 1_C1 = 4·1_K + 2·1_C1 in C[S3]
    s3 = builtin_group("s3")
    K = groups.generate_subgroup(s3, ["(12)"])
    C1 = set(s3.arrows) - set(K)
    conv: dict = {}
    for a in C1:
        for b in C1:
            c = s3.mul(a, b)
            conv[c] = conv.get(c, 0) + 1
    if any(conv.get(k, 0) != 4 for k in K) or any(conv.get(c, 0) != 2 for c in C1):
        res.passed = _fail(res.details, "indicator convolution in C[S3]")
    return res


# 10

def criterion_10() -> CriterionResult:
    res = CriterionResult(10, "hypergroupoid norm order and groupoid degeneration", True)
    rng = np.random.default_rng(SEED + 10)
    for label, H, lam, ctx in hyper_fixtures():
        elems = [{e: 1} for e in H.elements]
        elems += [{e: complex(rng.standard_normal(), rng.standard_normal()) for e in H.elements} for _ in range(3)]
        for f in elems:
            rep = hyper_norms(f, H, lam, ctx)
            m = {k: v for k, (v, _) in rep.metrics.items()}
            if m["reduced"] > m["full"] + 1e-8 * max(1.0, m["full"]):
                res.passed = _fail(res.details, f"{label}: reduced > full")
            if "relative" in m and m["relative"] > m["full"] + 1e-8 * max(1.0, m["full"]):
                res.passed = _fail(res.details, f"{label}: relative > full")
            if rep.codes() - {"adjoint-mismatch"}:
                res.passed = _fail(res.details, f"{label}: {sorted(rep.codes())}")
    for G, glam in ((builtin_group("s3"), counting_haar(builtin_group("s3"))),
                    (pair_groupoid(3), haar_from_unit_weights(pair_groupoid(3), {"1": 1, "2": Fraction(1, 2), "3": 3}))):
        H, lam = hyper_from_groupoid(G, glam)
        for _ in range(5):
            f = random_element(G, rng, exact=True)
            g = random_element(G, rng, exact=True)
            if hyper_convolve(f, g, H, lam) != convolve(f, g, G, glam):
                res.passed = _fail(res.details, f"{G.name}: convolution differs")
            for u in G.units:
                if hyper_left_exact(f, H, lam, u) != regular_rep_exact(f, G, glam, u):
                    res.passed = _fail(res.details, f"{G.name}: exact L_u differs at {u}")
            rep = hyper_norms(f, H, lam)
            red = reduced_norm(f, G, glam)
            full = ConvolutionAlgebra(G, glam).full_norm(f)
            if abs(rep.metrics["reduced"][0] - red) > 1e-10 * max(1.0, red):
                res.passed = _fail(res.details, f"{G.name}: reduced norms differ")
            if abs(rep.metrics["full"][0] - full) > 1e-10 * max(1.0, full):
                res.passed = _fail(res.details, f"{G.name}: full norms differ")
    return res


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_criteria(numbers=None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if numbers is None else numbers
    return [CRITERIA[n]() for n in numbers]


def selftest_report(numbers=None) -> Report:
    rep = Report()
    for r in run_criteria(numbers):
        rep.metric(f"criterion-{r.number:02d}", r.passed)
        if not r.passed:
            rep.add("criterion-failed", (r.number,), "; ".join(r.details[:5]))
    rep.note("determinism (criterion 11) is checked by running selftest twice")
    return rep
