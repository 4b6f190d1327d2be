"""Command-line front end: ``torsorext extend|verify|blowup PROBLEM``.

Exit codes: 0 success, 1 input error, 2 cap or resource failure,
3 certificate failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import CapExceeded, ProblemFileError, ResourceLimit, TorsorExtError
from .extend import FIRST_MODEL, PRODUCT, extend_torsor, normalize_input, verify_generic_equivalence
from .groebner import IdealPresentation, ideal_equal
from .hopf import GroupPresentation, unipotent_equation, verify_hopf
from .neron import blowup_at_closed, blowup_base_origin, blowup_group_at_unit, blowup_torsor_at_section
from .poly import Role, UNIFORMIZER, VariableRegistry
from .problem import Problem, load_problem
from .torsor import fiber_group, verify_torsor

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_CERT = 0, 1, 2, 3


def coordinate_form(relations, reg: VariableRegistry, kind: str) -> str | None:
    """The relations in a single coordinate y, when the presentation allows it."""
    names = reg.matrix_names(kind)
    if len(names) == 2:
        return unipotent_equation(relations, reg, kind, var="y")
    rest = [r for r in relations]
    if len(names) != 1 or not rest:
        return None
    keep = [n for n, r in zip(reg.names, reg.roles) if r.kind == "base"]
    target = VariableRegistry(reg.field, [("y", Role("aux"))] + [(n, Role("base")) for n in keep]
                              + [(reg.uniformizer, UNIFORMIZER)])
    try:
        return "; ".join(str(r.embed(target, {names[0][0]: "y"})) for r in rest)
    except TorsorExtError:
        return None


def _block(key, items):
    items = list(items)
    if not items:
        return [f"{key}: (none)"]
    return [f"{key}:"] + [f"  {x}" for x in items]


def extension_report(prob: Problem, result) -> dict:
    T, G = result.torsor_model, result.group_model
    return {
        "mode": result.mode,
        "translation": ", ".join(f"{k}={v}" for k, v in prob.translation.items()),
        "e": result.e,
        "e-cap": result.cap,
        "e-cap-source": "default engineering bound" if result.cap_is_default else "user",
        "sigma": result.sigma.describe(),
        "base-relations": [str(u) for u in result.base_model.relations],
        "group": prob.group.name if prob.group is not None else "",
        "group-relations": G.relation_strings(),
        "group-equation": coordinate_form(G.relations, G.registry, "group"),
        "torsor-relations": T.relation_strings(),
        "equation": coordinate_form(T.relations, T.registry, "torsor"),
        "generic-equivalence": result.generic_equivalence,
        "certificate": result.certificate.label,
        "certificate-entries": result.certificate.lines(),
    }


def format_report(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, list):
            lines += _block(key, value)
        elif value is None or value == "":
            continue
        elif isinstance(value, bool):
            lines.append(f"{key}: {'yes' if value else 'no'}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _group_for(prob: Problem) -> GroupPresentation:
    if prob.group is not None:
        return prob.group
    return fiber_group(prob.torsor)


def cmd_extend(args) -> int:
    prob = load_problem(args.problem)
    if prob.torsor is None:
        raise ProblemFileError("extend needs torsor relations or a family")
    T = prob.torsor
    if T.level != "generic":
        T = T.with_relations(T.relations, level="generic")
    try:
        result = extend_torsor(T, args.mode, args.e_cap)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        d = exc.diagnostics
        for f, c in d.get("contents", {}).items():
            print(f"  content {c}: {f}", file=sys.stderr)
        for e, label, failing in d.get("history", []):
            print(f"  e={e}: {label}", file=sys.stderr)
            for line in failing:
                print(f"    {line}", file=sys.stderr)
        return EXIT_CAP
    result.generic_equivalence = verify_generic_equivalence(normalize_input(T), result)
    report = extension_report(prob, result)
    sys.stdout.write(format_report(report))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    prob = load_problem(args.problem)
    if prob.torsor is None:
        if prob.group is None:
            raise ProblemFileError("verify needs a group or a torsor")
        G = prob.group
        if args.level:
            G = G.with_relations(G.relations, level=args.level)
        ent = verify_hopf(G)
        print(f"object: group {G.name}".rstrip())
        print(f"hopf: {ent.status}")
        print(f"  {ent.line()}")
        return EXIT_OK if ent.passed else EXIT_CERT
    T = prob.torsor
    if args.level:
        T = T.with_relations(T.relations, level=args.level)
    G = _group_for(prob)
    cert = verify_torsor(T, G)
    print(f"object: torsor ({T.level})")
    print(f"group: {G.name or 'fiber group'}")
    eq = coordinate_form(T.relations, T.registry, "torsor")
    if eq:
        print(f"equation: {eq}")
    print(f"certificate: {cert.label}")
    for line in cert.lines():
        print(f"  {line}")
    return EXIT_CERT if cert.failures() else EXIT_OK


def cmd_blowup(args) -> int:
    prob = load_problem(args.problem)
    centers = list(args.center or []) or list(prob.center)
    if args.e is not None:
        base2, sub = blowup_base_origin(prob.base, args.e)
        print("object: base")
        print(f"e: {args.e}")
        print(f"sigma: {sub.describe()}")
        for line in _block("base-relations", [str(u) for u in base2.relations]):
            print(line)
        return EXIT_OK
    if prob.torsor is None:
        if prob.group is None:
            raise ProblemFileError("blowup needs a group, a torsor or --e")
        G = prob.group
        print(f"object: group {G.name}".rstrip())
        if centers:
            reg = G.registry
            center = IdealPresentation(reg, [_center_poly(reg, c) for c in centers])
            out = blowup_at_closed(G.ideal, center)
            print(f"center: {', '.join(centers)}")
            rels = [g for g in out.generators if g != G.det_relation] if out.registry == reg else list(out.generators)
            unchanged = out.registry == reg and ideal_equal(out, G.ideal)
            print(f"unchanged: {'yes' if unchanged else 'no'}")
            for line in _block("relations", [str(g) for g in rels]):
                print(line)
            if out.registry == reg:
                eq = coordinate_form(rels, reg, "group")
                if eq:
                    print(f"equation: {eq}")
            return EXIT_OK
        G2 = blowup_group_at_unit(G)
        print("center: unit section")
        for line in _block("relations", G2.relation_strings()):
            print(line)
        eq = coordinate_form(G2.relations, G2.registry, "group")
        if eq:
            print(f"equation: {eq}")
        return EXIT_OK
    T = prob.torsor
    if T.level != "integral":
        T = T.with_relations(T.relations, level="integral")
    T2, G2 = blowup_torsor_at_section(T, _group_for(prob))
    print("object: torsor")
    print("center: identity section")
    for line in _block("group-relations", G2.relation_strings()):
        print(line)
    for line in _block("torsor-relations", T2.relation_strings()):
        print(line)
    eq = coordinate_form(T2.relations, T2.registry, "torsor")
    if eq:
        print(f"equation: {eq}")
    return EXIT_OK


def _center_poly(reg, text):
    try:
        return reg.parse(text)
    except TorsorExtError as exc:
        raise ProblemFileError(f"center {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torsorext", description="Extend pointed torsors over a DVR.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log pipeline progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extend", help="run the blow-up pipeline on a torsor")
    p.add_argument("problem")
    p.add_argument("--mode", choices=(PRODUCT, FIRST_MODEL), default=PRODUCT)
    p.add_argument("--e-cap", type=int, default=None, help="largest blow-up exponent to try")
    p.add_argument("--report", metavar="PATH", help="also write a JSON report")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("verify", help="certify a torsor or check a group's Hopf structure")
    p.add_argument("problem")
    p.add_argument("--level", choices=("generic", "integral"), default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("blowup", help="Neron blow-up of a group, torsor or base")
    p.add_argument("problem")
    p.add_argument("--center", action="append", metavar="POLY",
                   help="center generator (repeatable); default is the unit section")
    p.add_argument("--e", type=int, default=None, help="blow up the base at the origin e times")
    p.set_defaults(func=cmd_blowup)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        import logging

        logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except ProblemFileError as exc:
        where = f"{args.problem}:" if getattr(args, "problem", None) else ""
        print(f"error: {where}{exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimit as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except TorsorExtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
