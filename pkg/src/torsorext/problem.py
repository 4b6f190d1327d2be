"""Line-oriented problem files.

Example::

    # Artin-Schreier torsor y^3 - y - pi*x over A^1
    field: Fp
    prime: 3
    uniformizer: pi
    base: affine 1 x
    group: Z/p
    relations:
      y12^3 - y12 - pi*x
      y11 - 1
      y22 - 1
      y21

Header keys: field (Fp or Q), prime, uniformizer, base ("affine n [names]"
or "preset alpha_p [name]"), group (a built-in name or "explicit d"), d,
level (generic or integral), family (artin_schreier, kummer, m_torsor) with
rhs, translation ("t1=1, t2=0", applied on load so the marked point becomes
the origin).  Blocks: relations, group-relations,
base-relations, center.  A file without torsor relations or family describes
a group only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import PolySyntaxError, ProblemFileError, TorsorExtError
from .families import FAMILIES, build_family
from .hopf import GroupPresentation, builtin_group, group_registry
from .poly import MultiPoly, VariableRegistry
from .scalars import GF, QQ
from .torsor import BasePresentation, TorsorPresentation, torsor_registry, translate

HEADER_KEYS = ("field", "prime", "uniformizer", "base", "group", "d", "level", "family", "rhs", "translation")
BLOCK_KEYS = ("relations", "group-relations", "base-relations", "center")
_KEY_RE = re.compile(r"^([a-z][a-z-]*)\s*:\s*(.*)$")


@dataclass
class Problem:
    field: object
    prime: int | None
    uniformizer: str
    base: BasePresentation
    group: GroupPresentation | None = None
    torsor: TorsorPresentation | None = None
    family: str | None = None
    rhs: str | None = None
    translation: dict = field(default_factory=dict)
    center: list = field(default_factory=list)
    center_lines: list = field(default_factory=list)
    path: str = ""

    @property
    def is_group_only(self) -> bool:
        return self.torsor is None


def _split(text: str):
    """Header dict and block dict, each value paired with its line number."""
    header, blocks = {}, {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _KEY_RE.match(line) if not line[0].isspace() else None
        if m:
            key, value = m.group(1), m.group(2).strip()
            if key in BLOCK_KEYS:
                if key in blocks:
                    raise ProblemFileError(f"duplicate block {key!r}", lineno)
                blocks[key] = []
                current = key
                if value:
                    blocks[key].append((value, lineno))
                continue
            if key not in HEADER_KEYS:
                raise ProblemFileError(f"unknown key {key!r}", lineno)
            if key in header:
                raise ProblemFileError(f"duplicate key {key!r}", lineno)
            header[key] = (value, lineno)
            current = None
            continue
        if current is None:
            raise ProblemFileError(f"unexpected line {line.strip()!r}", lineno)
        blocks[current].append((line.strip(), lineno))
    return header, blocks


def _parse_poly(reg: VariableRegistry, text: str, lineno: int) -> MultiPoly:
    try:
        return reg.parse(text)
    except PolySyntaxError as exc:
        message = str(exc).rsplit(" at position", 1)[0]
        raise ProblemFileError(f"column {exc.position + 1}: {message}", lineno) from exc
    except TorsorExtError as exc:
        raise ProblemFileError(str(exc), lineno) from exc


def _with_prime(name: str, prime):
    if prime and re.fullmatch(r"(mu_|alpha_|Z/|M_)p", name):
        return name[:-1] + str(prime)
    return name


def parse_problem(text: str, path: str = "") -> Problem:
    header, blocks = _split(text)

    def get(key, default=None):
        return header[key] if key in header else (default, None)

    fname, fline = get("field", "Fp")
    prime_s, pline = get("prime")
    prime = None
    if prime_s is not None:
        if not prime_s.isdigit():
            raise ProblemFileError("prime must be a positive integer", pline)
        prime = int(prime_s)
    try:
        if fname == "Fp":
            if prime is None:
                raise ProblemFileError("field Fp needs a prime", fline)
            field_ = GF(prime)
        elif fname == "Q":
            field_ = QQ
        else:
            raise ProblemFileError(f"field must be Fp or Q, got {fname!r}", fline)
    except ValueError as exc:
        raise ProblemFileError(str(exc), pline) from exc
    uni, _ = get("uniformizer", "pi")

    base_s, bline = get("base", "affine 1")
    parts = base_s.split()
    try:
        if len(parts) >= 2 and parts[0] == "affine" and parts[1].isdigit():
            n = int(parts[1])
            names = parts[2:] or None
            base = BasePresentation.affine(field_, n, names, uni)
        elif len(parts) >= 2 and parts[0] == "preset" and parts[1] == "alpha_p":
            if not prime:
                raise ProblemFileError("preset alpha_p needs a prime", bline)
            base = BasePresentation.alpha_p(field_, parts[2] if len(parts) > 2 else "t1", uni, prime)
        else:
            raise ProblemFileError("base must be 'affine n [names]' or 'preset alpha_p [name]'", bline)
    except (ValueError, TorsorExtError) as exc:
        if isinstance(exc, ProblemFileError):
            raise
        raise ProblemFileError(str(exc), bline) from exc
    translation = {}
    tr, tline = get("translation")
    if tr:
        for item in tr.split(","):
            if "=" not in item:
                raise ProblemFileError("translation entries look like 't1=1'", tline)
            k, v = (s.strip() for s in item.split("=", 1))
            if k not in base.coords:
                raise ProblemFileError(f"{k!r} is not a base coordinate", tline)
            _parse_poly(base.registry, v, tline)
            translation[k] = v
    # with a translation the marked point sits elsewhere until it is moved to the origin
    pointed = not translation

    if "base-relations" in blocks:
        rels = [_parse_poly(base.registry, t, ln) for t, ln in blocks["base-relations"]]
        try:
            base = BasePresentation(base.registry, list(base.relations) + rels, base.level, base.name, pointed)
        except TorsorExtError as exc:
            raise ProblemFileError(str(exc), blocks["base-relations"][0][1]) from exc

    group = None
    gname, gline = get("group")
    if gname is not None:
        gparts = gname.split()
        try:
            if gparts[0] == "explicit":
                if len(gparts) != 2 or not gparts[1].isdigit():
                    raise ProblemFileError("explicit groups need a size: 'explicit d'", gline)
                d = int(gparts[1])
                greg = group_registry(field_, d, uni)
                rels = [_parse_poly(greg, t, ln) for t, ln in blocks.get("group-relations", [])]
                group = GroupPresentation(d, rels, greg, "integral", "explicit")
            else:
                group = builtin_group(_with_prime(gname, prime), field_, uni)
        except (ValueError, TorsorExtError) as exc:
            if isinstance(exc, ProblemFileError):
                raise
            raise ProblemFileError(str(exc), gline) from exc

    level, lline = get("level")
    if level is not None and level not in ("generic", "integral"):
        raise ProblemFileError("level must be generic or integral", lline)

    torsor = None
    fam, famline = get("family")
    rhs, rline = get("rhs")
    try:
        if fam is not None:
            if fam not in FAMILIES:
                raise ProblemFileError(f"unknown family {fam!r}", famline)
            if rhs is None:
                raise ProblemFileError("family needs an rhs", famline)
            if not prime:
                raise ProblemFileError("family needs a prime", famline)
            _parse_poly(base.registry, rhs, rline)
            torsor = build_family(fam, prime, rhs, field_, base, pointed)
            if level and level != torsor.level:
                torsor = TorsorPresentation(base, torsor.d, torsor.relations, level, torsor.registry,
                                            torsor.name, pointed)
        elif "relations" in blocks:
            d_s, dline = get("d")
            if d_s is not None:
                if not d_s.isdigit() or int(d_s) < 1:
                    raise ProblemFileError("d must be a positive integer", dline)
                d = int(d_s)
            elif group is not None:
                d = group.d
            else:
                raise ProblemFileError("torsor relations need 'd:' or a group", blocks["relations"][0][1])
            treg = torsor_registry(base, d)
            rels = []
            for t, ln in blocks["relations"]:
                rels.append((_parse_poly(treg, t, ln), ln))
            try:
                torsor = TorsorPresentation(base, d, [r for r, _ in rels], level or "generic", treg,
                                            pointed=pointed)
            except TorsorExtError as exc:
                raise ProblemFileError(str(exc), rels[0][1] if rels else None) from exc
    except TorsorExtError as exc:
        if isinstance(exc, ProblemFileError):
            raise
        raise ProblemFileError(str(exc), famline) from exc

    if translation and torsor is not None:
        try:
            torsor = translate(torsor, translation)
        except TorsorExtError as exc:
            raise ProblemFileError(f"after translation: {exc}", tline) from exc
        base = torsor.base

    center_lines = blocks.get("center", [])
    return Problem(field_, prime, uni, base, group, torsor, fam, rhs, translation,
                   [t for t, _ in center_lines], center_lines, path)


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_problem(text, path)


def format_problem(prob: Problem) -> str:
    """Problem file text for a parsed problem (explicit relations, no family)."""
    lines = [f"field: {'Fp' if prob.field.is_prime_field else 'Q'}"]
    if prob.prime:
        lines.append(f"prime: {prob.prime}")
    lines.append(f"uniformizer: {prob.uniformizer}")
    b = prob.base
    lines.append(f"base: affine {len(b.coords)} {' '.join(b.coords)}")
    if b.relations:
        lines.append("base-relations:")
        lines += [f"  {u}" for u in b.relations]
    if prob.group is not None:
        lines.append(f"group: explicit {prob.group.d}")
        lines.append("group-relations:")
        lines += [f"  {g}" for g in prob.group.relations]
    if prob.torsor is not None:
        lines.append(f"d: {prob.torsor.d}")
        lines.append(f"level: {prob.torsor.level}")
        lines.append("relations:")
        lines += [f"  {f}" for f in prob.torsor.relations]
    return "\n".join(lines) + "\n"
