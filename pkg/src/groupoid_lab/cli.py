"""Command-line entry point.

``run_command(argv)`` returns (report, exit code, output text) so the whole
surface can be exercised in-process; ``main`` prints and exits.  Commands that
produce a document write it as canonical JSON; the others print the report.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import config, groups
from .action import EquivariantSystem, semidirect_product, validate_action, validate_equivariant
from .convolution import convolve, full_norm, i_norm, reduced_norm
from .correspondence import (
    compose,
    identity_correspondence,
    induction_correspondence,
    negation_correspondence,
    restriction_correspondence,
    semidirect_haar,
    validate_correspondence,
)
from .errors import DocumentError, GroupoidLabError, NotStochastic, UsageError
from .exact import parse_fraction
from .fixtures import GROUP_NAMES, builtin_group
from .groupoid import counting_haar, haar_from_unit_weights, pair_groupoid, validate_groupoid, validate_haar
from .hyper import (
    double_coset_construct,
    hyper_norms,
    spatial_construct,
    validate_hyper_haar,
    validate_hypergroupoid,
)
from .induction import induce_representation, regular_rep, trivial_rep
from .io import (
    action_doc,
    correspondence_doc,
    dumps,
    element_doc,
    groupoid_doc,
    hypergroupoid_doc,
    load_document,
    representation_doc,
)
from .report import Report, emit_report

__all__ = ["run_command", "main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--seed", default=None, help="hex seed for randomized probes")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", default=None)

    p = _Parser(prog="groupoid-lab", parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("validate", parents=[common])
    v.add_argument("file")

    b = sub.add_parser("build", parents=[common])
    b.add_argument("what", choices=("group", "pair", "action", "correspondence", "rep"))
    b.add_argument("args", nargs="*")
    b.add_argument("--weights", default=None, help="unit weights u=p/q,...")
    b.add_argument("--k", default=None, help="subgroup generators")

    c = sub.add_parser("convolve", parents=[common])
    c.add_argument("file")
    c.add_argument("f")
    c.add_argument("g")

    n = sub.add_parser("norm", parents=[common])
    n.add_argument("file")
    n.add_argument("--element", required=True)
    kind = n.add_mutually_exclusive_group()
    kind.add_argument("--reduced", action="store_true")
    kind.add_argument("--full", action="store_true")
    kind.add_argument("--i", action="store_true")

    i = sub.add_parser("induce", parents=[common])
    i.add_argument("file", help="correspondence document")
    i.add_argument("--rep", required=True)

    cc = sub.add_parser("compose-corr", parents=[common])
    cc.add_argument("first")
    cc.add_argument("second")

    h = sub.add_parser("hyper", parents=[common])
    h.add_argument("action", choices=("check", "spatial", "doublecoset", "norm"))
    h.add_argument("file")
    h.add_argument("--k", default=None)
    h.add_argument("--element", default=None)

    s = sub.add_parser("selftest", parents=[common])
    s.add_argument("--criteria", default=None, help="comma separated criterion numbers")
    return p


# loading helpers

def _load(path: str, want: tuple | str | None = None):
    try:
        doc = load_document(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    want = (want,) if isinstance(want, str) else want
    if want and doc.kind not in want:
        raise UsageError(f"{path} is a {doc.kind} document, expected {' or '.join(want)}")
    return doc


def _groupoid_ref(ref: str):
    """A groupoid from a file, ``builtin:NAME`` or a bare builtin name."""
    if ref.startswith("builtin:"):
        ref = ref[len("builtin:"):]
    elif os.path.exists(ref):
        return _load(ref, "groupoid").value
    try:
        G = builtin_group(ref)
    except KeyError:
        raise UsageError(f"{ref!r} is neither a file nor a builtin group ({', '.join(GROUP_NAMES)})") from None
    return G, counting_haar(G)


def _element(path: str, near: str):
    if not os.path.exists(path):
        alt = os.path.join(os.path.dirname(near), path)
        if os.path.exists(alt):
            path = alt
    return _load(path, "element").value


def _generators(text: str | None) -> list[str]:
    if not text:
        raise UsageError("--k is required")
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append(f"({tok})" if tok.isdigit() else tok)
    return out


def _subgroup(G, text, name="K"):
    gens = _generators(text)
    unknown = [g for g in gens if g not in G.src]
    if unknown:
        raise UsageError(f"{unknown[0]!r} is not an element of {G.name or 'the group'}")
    return groups.subgroup(G, groups.generate_subgroup(G, gens), name=name)


def _unit_weights(text: str | None) -> dict:
    out = {}
    for part in (text or "").split(","):
        if part.strip():
            k, _, v = part.partition("=")
            out[k.strip()] = parse_fraction(v.strip())
    return out


# commands

def _validate(ns, rep: Report):
    doc = _load(ns.file)
    if doc.kind == "groupoid":
        G, lam = doc.value
        rep.extend(validate_groupoid(G))
        if rep.ok:
            rep.extend(validate_haar(G, lam), "haar-")
    elif doc.kind == "action":
        X, lam, alpha = doc.value
        rep.extend(validate_action(X))
        if alpha is not None and rep.ok:
            rep.extend(validate_equivariant(X, alpha), "alpha-")
    elif doc.kind == "correspondence":
        rep.extend(validate_correspondence(doc.value))
    elif doc.kind == "representation":
        rep.extend(doc.value.validate(ns.tolerance or 1e-10))
    elif doc.kind == "hypergroupoid":
        H, lam = doc.value
        try:
            rep.extend(validate_hypergroupoid(H))
        except NotStochastic as exc:
            rep.add("not-stochastic", exc.witness, str(exc))
        if lam is not None and rep.ok:
            rep.extend(validate_hyper_haar(H, lam), "haar-")
    else:
        raise UsageError("element documents have nothing to validate on their own")
    return None


def _build(ns, rep: Report):
    a = ns.args
    if ns.what == "group":
        if len(a) != 1:
            raise UsageError("build group NAME")
        G, lam = _groupoid_ref(a[0])
        return groupoid_doc(G, lam)
    if ns.what == "pair":
        if len(a) != 1 or not a[0].isdigit():
            raise UsageError("build pair N")
        P = pair_groupoid(int(a[0]))
        w = _unit_weights(ns.weights)
        lam = haar_from_unit_weights(P, {u: w.get(u, Fraction(1)) for u in P.units})
        return groupoid_doc(P, lam)
    if ns.what == "action":
        if len(a) != 1:
            raise UsageError("build action FILE")
        X, lam, _ = _load(a[0], "action").value
        P = semidirect_product(X)
        return groupoid_doc(P, semidirect_haar(P, lam))
    if ns.what == "rep":
        if len(a) != 2 or a[0] not in ("trivial", "regular"):
            raise UsageError("build rep trivial|regular GROUP")
        G, lam = _groupoid_ref(a[1])
        if a[0] == "trivial":
            return representation_doc(trivial_rep(G, lam))
        if not G.is_group():
            raise UsageError("regular representations are built for groups")
        return representation_doc(regular_rep(G))
    # correspondence
    if not a:
        raise UsageError("build correspondence identity|negation|induction|restriction ...")
    kind = a[0]
    if kind == "negation":
        C = negation_correspondence()
    elif kind == "identity" and len(a) == 2:
        G, lam = _groupoid_ref(a[1])
        C = identity_correspondence(G, lam)
    elif kind in ("induction", "restriction") and len(a) == 2:
        G, _ = _groupoid_ref(a[1])
        K = _subgroup(G, ns.k)
        C = induction_correspondence(G, K) if kind == "induction" else restriction_correspondence(G, K)
    else:
        raise UsageError("build correspondence identity|negation|induction|restriction ...")
    rep.extend(validate_correspondence(C))
    return correspondence_doc(C)


def _convolve(ns, rep: Report):
    G, lam = _load(ns.file, "groupoid").value
    f, g = _element(ns.f, ns.file), _element(ns.g, ns.file)
    _check_support(f, G.src, rep)
    _check_support(g, G.src, rep)
    return element_doc(convolve(f, g, G, lam))


def _check_support(f, known, rep):
    for k in f:
        if k not in known:
            raise UsageError(f"element has a coefficient on unknown id {k!r}")


def _norm(ns, rep: Report):
    G, lam = _load(ns.file, "groupoid").value
    f = _element(ns.element, ns.file)
    _check_support(f, G.src, rep)
    tol = ns.tolerance or 1e-9
    if ns.full:
        rep.metric("full", full_norm(f, G, lam), tol)
    elif ns.i:
        rep.metric("i", i_norm(f, G, lam))
    else:
        rep.metric("reduced", reduced_norm(f, G, lam), tol)
    return None


def _induce(ns, rep: Report):
    C = _load(ns.file, "correspondence").value
    R = _load(ns.rep, "representation").value
    if set(R.G.arrows) != set(C.G.arrows):
        raise UsageError("the representation is not of the correspondence's right groupoid")
    ind = induce_representation(R, C)
    rep.extend(ind.report)
    rep.metric("dimension", ind.rep.dim())
    return representation_doc(ind.rep)


def _compose(ns, rep: Report):
    X = _load(ns.first, "correspondence").value
    Y = _load(ns.second, "correspondence").value
    CC = compose(X, Y)
    rep.extend(CC.report)
    return correspondence_doc(CC.result)


def _hyper(ns, rep: Report):
    if ns.action == "doublecoset":
        G, _ = _groupoid_ref(ns.file)
        if not G.is_group():
            raise UsageError("double cosets need a group")
        K = _subgroup(G, ns.k)
        H, lam, _ = double_coset_construct(G, K.arrows)
        rep.extend(validate_hypergroupoid(H))
        rep.extend(validate_hyper_haar(H, lam), "haar-")
        return hypergroupoid_doc(H, lam)
    if ns.action == "spatial":
        X, lam, alpha = _load(ns.file, "action").value
        alpha = alpha or EquivariantSystem({x: Fraction(1) for x in X.points})
        H, hl, _ = spatial_construct(X.groupoid, lam, X.as_left() if X.side != "left" else X, alpha)
        rep.extend(validate_hypergroupoid(H))
        rep.extend(validate_hyper_haar(H, hl), "haar-")
        return hypergroupoid_doc(H, hl)
    doc = _load(ns.file, ("hypergroupoid", "action"))
    if doc.kind == "action":
        X, lam, alpha = doc.value
        alpha = alpha or EquivariantSystem({x: Fraction(1) for x in X.points})
        H, hl, ctx = spatial_construct(X.groupoid, lam, X, alpha)
    else:
        (H, hl), ctx = doc.value, None
    if ns.action == "check":
        try:
            rep.extend(validate_hypergroupoid(H))
        except NotStochastic as exc:
            rep.add("not-stochastic", exc.witness, str(exc))
        if hl is not None and rep.ok:
            rep.extend(validate_hyper_haar(H, hl), "haar-")
        return None
    if hl is None:
        raise UsageError("the hypergroupoid document has no haar weights")
    if not ns.element:
        raise UsageError("hyper norm needs --element")
    f = _element(ns.element, ns.file)
    _check_support(f, set(H.elements), rep)
    rep.extend(hyper_norms(f, H, hl, ctx))
    return None


def _selftest(ns, rep: Report):
    from .acceptance import selftest_report

    nums = None
    if ns.criteria:
        try:
            nums = [int(x) for x in ns.criteria.split(",")]
        except ValueError:
            raise UsageError("--criteria takes comma separated integers") from None
        bad = [x for x in nums if not 1 <= x <= 10]
        if bad:
            raise UsageError(f"no criterion {bad[0]}")
    rep.extend(selftest_report(nums))
    return None


_COMMANDS = {
    "validate": _validate,
    "build": _build,
    "convolve": _convolve,
    "norm": _norm,
    "induce": _induce,
    "compose-corr": _compose,
    "hyper": _hyper,
    "selftest": _selftest,
}


def run_command(argv) -> tuple[Report, int, str]:
    rep = Report()
    fmt = "text"
    try:
        ns = build_parser().parse_args(list(argv))
        fmt = ns.format
        changes = {}
        if ns.tolerance is not None:
            if not ns.tolerance > 0:
                raise UsageError("--tolerance must be positive")
            changes["unitary_tol"] = ns.tolerance
        if ns.seed is not None:
            try:
                changes["probe_seed"] = int(ns.seed, 16)
            except ValueError:
                raise UsageError(f"--seed expects hex, got {ns.seed!r}") from None
        with config.override(**changes):
            doc = _COMMANDS[ns.command](ns, rep)
    except UsageError as exc:
        rep.error = f"usage: {exc}"
        return rep, 2, emit_report(rep, fmt)
    except DocumentError as exc:
        rep.error = str(exc)
        return rep, 2, emit_report(rep, fmt)
    except GroupoidLabError as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
        return rep, 2, emit_report(rep, fmt)
    if doc is not None:
        return rep, rep.exit_code(), dumps(doc)
    return rep, rep.exit_code(), emit_report(rep, fmt)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    rep, code, text = run_command(argv)
    out = None
    try:
        out = argv[argv.index("--out") + 1] if "--out" in argv else None
    except IndexError:
        out = None
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code and text.startswith("{") and rep.findings:
        # a document was produced despite findings; show them too
        sys.stderr.write(emit_report(rep, "text"))
    return code


if __name__ == "__main__":
    sys.exit(main())
