"""Closed subgroup schemes of GL_d and their matrix Hopf structure.

A group is a relation ideal in k[pi, x_11..x_dd, D] containing
D*det(x) - 1.  Comultiplication, counit and antipode are the matrix formulas

    Δ(x_ij) = Σ_r x'_ir x''_rj,   ε(x_ij) = δ_ij,   S(x) = D * adj(x),

and all Hopf axioms are checked by ideal membership in concrete doubled or
tripled rings whose copies carry the suffixes ``_p``, ``_pp``, ``_ppp``.
"""

from __future__ import annotations

import re
from functools import cached_property
from itertools import product

from .certificate import CertificateEntry, entry
from .errors import CharacteristicMismatch, NotAHopfIdeal, RegistryMismatch
from .groebner import GREVLEX, IdealPresentation, cut_torsion, ideal_membership, saturate_by_t
from .poly import (
    MultiPoly,
    RingMap,
    Role,
    UNIFORMIZER,
    VariableRegistry,
    adjugate,
    apply_map,
    determinant,
    matmul,
    reduce_mod_t,
)
from .scalars import FieldDescriptor

COPY_SUFFIX = {"": "", "p": "_p", "pp": "_pp", "ppp": "_ppp"}
LEVELS = ("generic", "integral", "special")


def entry_name(prefix: str, i: int, j: int, copy: str = "") -> str:
    return f"{prefix}{i}{j}{COPY_SUFFIX.get(copy, '_' + copy)}"


def group_variables(d: int, copy: str = "", prefix: str = "x", det: str = "D"):
    if not 1 <= d <= 9:
        raise ValueError("matrix size must be between 1 and 9")
    out = [(entry_name(prefix, i, j, copy), Role("group", i, j, copy))
           for i in range(1, d + 1) for j in range(1, d + 1)]
    out.append((det + COPY_SUFFIX.get(copy, "_" + copy), Role("det_group", copy=copy)))
    return out


def group_registry(field: FieldDescriptor, d: int, uniformizer: str = "pi", copies=("",)) -> VariableRegistry:
    vs = []
    for c in copies:
        vs.extend(group_variables(d, c))
    return VariableRegistry(field, vs + [(uniformizer, UNIFORMIZER)])


def matrix_of(reg: VariableRegistry, kind: str = "group", copy: str = ""):
    return [[reg.var(n) for n in row] for row in reg.matrix_names(kind, copy)]


def det_name(reg: VariableRegistry, kind: str = "det_group", copy: str = "") -> str:
    names = reg.names_of(kind, copy)
    if len(names) != 1:
        raise KeyError(f"no unique {kind} variable for copy {copy!r}")
    return names[0]


def det_relation(reg: VariableRegistry, kind: str = "group", copy: str = "") -> MultiPoly:
    dk = "det_group" if kind == "group" else "det_torsor"
    return reg.var(det_name(reg, dk, copy)) * determinant(matrix_of(reg, kind, copy)) - 1


class GroupPresentation:
    """A closed subgroup scheme of GL_d over k[pi]: user relations plus D*det - 1.

    ``level`` is ``generic`` (over K), ``integral`` (over R, relations
    t-saturated) or ``special`` (relations free of pi, over the residue field).
    """

    def __init__(self, d: int, relations, registry: VariableRegistry | None = None,
                 level: str = "generic", name: str = "", field: FieldDescriptor | None = None,
                 uniformizer: str = "pi"):
        if level not in LEVELS:
            raise ValueError(f"unknown level {level!r}")
        if registry is None:
            registry = group_registry(field, d, uniformizer)
        rels = []
        for r in relations:
            if isinstance(r, str):
                r = registry.parse(r)
            if r.registry != registry:
                raise RegistryMismatch("relation not in the group registry")
            if r and r not in rels:
                rels.append(r)
        self.d = d
        self.registry = registry
        self.relations = tuple(rels)
        self.level = level
        self.name = name

    def __repr__(self):
        return f"GroupPresentation({self.name or 'd=%d' % self.d}, {self.level}, {[str(r) for r in self.relations]})"

    @property
    def field(self):
        return self.registry.field

    @cached_property
    def det_relation(self) -> MultiPoly:
        return det_relation(self.registry)

    @cached_property
    def ideal(self) -> IdealPresentation:
        return IdealPresentation(self.registry, list(self.relations) + [self.det_relation])

    @property
    def membership_level(self) -> str:
        return "generic" if self.level == "generic" else "strict"

    def matrix(self):
        return matrix_of(self.registry)

    def with_relations(self, relations, level=None, name=None) -> "GroupPresentation":
        return GroupPresentation(self.d, relations, self.registry, level or self.level,
                                 self.name if name is None else name)

    def relation_strings(self) -> list[str]:
        return [str(r) for r in self.relations]


# ---------------------------------------------------------------- structure maps

def _doubled(G: GroupPresentation, copies) -> VariableRegistry:
    return group_registry(G.field, G.d, G.registry.uniformizer, copies)


def _copy_map(G: GroupPresentation, target: VariableRegistry, copy: str) -> RingMap:
    """Rename the plain group variables into the ``copy`` block of ``target``."""
    images = {}
    for row_src, row_tgt in zip(G.registry.matrix_names("group"), target.matrix_names("group", copy)):
        for a, b in zip(row_src, row_tgt):
            images[a] = target.var(b)
    images[det_name(G.registry)] = target.var(det_name(target, copy=copy))
    return RingMap.build(G.registry, target, images)


def comultiplication_map(G: GroupPresentation, target: VariableRegistry | None = None,
                         left: str = "p", right: str = "pp") -> RingMap:
    target = target or _doubled(G, (left, right))
    X1 = matrix_of(target, "group", left)
    X2 = matrix_of(target, "group", right)
    prod = matmul(X1, X2)
    images = {}
    for i, row in enumerate(G.registry.matrix_names("group")):
        for j, n in enumerate(row):
            images[n] = prod[i][j]
    images[det_name(G.registry)] = (target.var(det_name(target, copy=left))
                                    * target.var(det_name(target, copy=right)))
    return RingMap.build(G.registry, target, images)


def comultiplication_image(f: MultiPoly, G: GroupPresentation) -> MultiPoly:
    if f.registry != G.registry:
        raise RegistryMismatch("polynomial not in the group ring")
    return apply_map(f, comultiplication_map(G))


def counit_map(G: GroupPresentation, target: VariableRegistry | None = None, copy: str = "") -> RingMap:
    """x_ij -> δ_ij, D -> 1; with ``target``, only the ``copy`` block is sent to scalars."""
    reg = G.registry
    target = target or reg
    images = {}
    for i, row in enumerate(reg.matrix_names("group")):
        for j, n in enumerate(row):
            images[n] = target.const(1 if i == j else 0)
    images[det_name(reg)] = target.const(1)
    return RingMap.build(reg, target, images)


def counit_image(f: MultiPoly, G: GroupPresentation) -> MultiPoly:
    """ε(f), returned as a polynomial in pi alone (a scalar when pi is absent)."""
    return apply_map(f, counit_map(G))


def antipode_map(G: GroupPresentation) -> RingMap:
    reg = G.registry
    X = G.matrix()
    D = reg.var(det_name(reg))
    adj = adjugate(X)
    images = {}
    for s, row in enumerate(reg.matrix_names("group")):
        for r, n in enumerate(row):
            images[n] = D * adj[s][r]
    images[det_name(reg)] = determinant(X)
    return RingMap.build(reg, reg, images)


def antipode_image(f: MultiPoly, G: GroupPresentation) -> MultiPoly:
    return apply_map(f, antipode_map(G))


# ---------------------------------------------------------------- verification

def _membership_failures(polys, ideal, level, label):
    fails = []
    for src, img in polys:
        if not ideal_membership(img, ideal, level):
            fails.append((str(src), label))
    return fails


def verify_hopf(G: GroupPresentation) -> CertificateEntry:
    """Check that the relation ideal is a Hopf ideal for the matrix structure.

    Returns a single entry named ``hopf``; call ``raise_for_status(NotAHopfIdeal)``
    to turn a failure into an exception.
    """
    level = G.membership_level
    reg = G.registry
    gens = list(G.ideal.generators)
    fails = []

    # (a) Δ(I) ⊆ I⊗A + A⊗I
    dreg = _doubled(G, ("p", "pp"))
    delta = comultiplication_map(G, dreg)
    doubled_ideal = IdealPresentation(
        dreg, [apply_map(g, _copy_map(G, dreg, c)) for c in ("p", "pp") for g in gens])
    fails += _membership_failures([(g, apply_map(g, delta)) for g in gens], doubled_ideal, level,
                                  "comultiplication image not in I⊗A + A⊗I")

    # (b) ε(I) = 0
    eps = counit_map(G)
    for g in gens:
        if apply_map(g, eps):
            fails.append((str(g), f"counit image {apply_map(g, eps)} is nonzero"))

    # (c) S(I) ⊆ I
    S = antipode_map(G)
    fails += _membership_failures([(g, apply_map(g, S)) for g in gens], G.ideal, level,
                                  "antipode image not in I")

    # (d) coassociativity and counit laws as identities on generators
    treg = _doubled(G, ("p", "pp", "ppp"))
    # (Δ⊗id)Δ(x) = (x'x'')x''' and (id⊗Δ)Δ(x) = x'(x''x''') entrywise
    X1 = matrix_of(treg, "group", "p")
    X2 = matrix_of(treg, "group", "pp")
    X3 = matrix_of(treg, "group", "ppp")
    left = matmul(matmul(X1, X2), X3)
    right = matmul(X1, matmul(X2, X3))
    names = reg.matrix_names("group")
    for i in range(G.d):
        for j in range(G.d):
            if left[i][j] != right[i][j]:
                fails.append((names[i][j], "coassociativity identity fails"))
    for copy in ("p", "pp"):
        kill = {}
        for row in dreg.matrix_names("group", copy):
            for n in row:
                r = dreg.role_of(n)
                kill[n] = dreg.const(1 if r.i == r.j else 0)
        kill[det_name(dreg, copy=copy)] = dreg.const(1)
        back = RingMap.build(dreg, dreg, kill)
        other = "pp" if copy == "p" else "p"
        expect = _copy_map(G, dreg, other)
        for v in reg.names:
            if v == reg.uniformizer:
                continue
            got = apply_map(apply_map(reg.var(v), delta), back)
            if got != apply_map(reg.var(v), expect):
                fails.append((v, f"counit law fails on copy {copy}"))

    # (e) Σ_r S(x_ir) x_rj = δ_ij modulo the determinant relation, both sides
    det_only = IdealPresentation(reg, [G.det_relation])
    SX = [[apply_map(reg.var(n), S) for n in row] for row in names]
    X = G.matrix()
    for prod, side in ((matmul(SX, X), "S(x)*x"), (matmul(X, SX), "x*S(x)")):
        for i in range(G.d):
            for j in range(G.d):
                if not ideal_membership(prod[i][j] - (1 if i == j else 0), det_only):
                    fails.append((names[i][j], f"antipode law {side} fails"))

    return entry("hopf", "generic" if G.level == "generic" else "integral", fails,
                 f"{len(gens)} relations checked")


def verify_hopf_or_raise(G: GroupPresentation) -> CertificateEntry:
    return verify_hopf(G).raise_for_status(NotAHopfIdeal)


def flat_closure(G: GroupPresentation) -> GroupPresentation:
    """Closure of G in GL_{d,R}: the t-saturated relation ideal."""
    rels = cut_torsion(G.registry, G.relations, [G.det_relation])
    return G.with_relations(rels, level="integral")


def special_fiber_group(G: GroupPresentation) -> GroupPresentation:
    rels = [reduce_mod_t(r) for r in G.relations]
    return G.with_relations([r for r in rels if r], level="special",
                            name=(G.name + " mod pi") if G.name else "")


# ---------------------------------------------------------------- built-ins

BUILTIN_NAMES = ("GL1", "GL2", "mu_p", "alpha_p", "Z/p", "M_p")
_NAME_RE = re.compile(r"^(GL1|GL2|mu_|alpha_|Z/|M_)(p|\d+)?$")


def unipotent_relations(reg: VariableRegistry, kind: str = "group", copy: str = ""):
    m = matrix_of(reg, kind, copy)
    return [m[0][0] - 1, m[1][1] - 1, m[1][0]]


def builtin_group(name: str, field: FieldDescriptor, uniformizer: str = "pi") -> GroupPresentation:
    """Built-in groups: GL1, GL2, mu_p, alpha_p, Z/p, M_p (p may be a number)."""
    mt = _NAME_RE.match(name.strip())
    if not mt:
        raise ValueError(f"unknown built-in group {name!r}; expected one of {BUILTIN_NAMES}")
    head, num = mt.group(1), mt.group(2)
    if head in ("GL1", "GL2"):
        if num:
            raise ValueError(f"unknown built-in group {name!r}")
        d = 1 if head == "GL1" else 2
        return GroupPresentation(d, [], level="integral", name=head, field=field, uniformizer=uniformizer)
    if num in (None, "p"):
        p = field.characteristic
        if not p:
            raise CharacteristicMismatch(f"{name} needs an explicit prime over {field}")
    else:
        p = int(num)
    if head == "mu_":
        reg = group_registry(field, 1, uniformizer)
        return GroupPresentation(1, [reg.var("x11") ** p - 1], reg, "integral", f"mu_{p}")
    if field.characteristic != p:
        raise CharacteristicMismatch(f"{head}{p} is a group scheme only in characteristic {p}")
    reg = group_registry(field, 2, uniformizer)
    x = reg.var("x12")
    pi = reg.pi_power(1)
    base = unipotent_relations(reg)
    if head == "alpha_":
        return GroupPresentation(2, base + [x ** p], reg, "integral", f"alpha_{p}")
    if head == "Z/":
        return GroupPresentation(2, base + [x ** p - x], reg, "integral", f"Z/{p}")
    return GroupPresentation(2, base + [pi ** (p - 1) * x ** p - x], reg, "integral", f"M_{p}")


def unipotent_equation(relations, reg: VariableRegistry, kind: str = "group", copy: str = "",
                       var: str = "y") -> str | None:
    """For a 2x2 unipotent presentation, the remaining relation(s) in one coordinate.

    Returns e.g. ``pi*y^2 - y`` for M_2, or None if the presentation does not
    contain the unipotent shape relations.
    """
    try:
        names = reg.matrix_names(kind, copy)
    except KeyError:
        return None
    if len(names) != 2:
        return None
    shape = unipotent_relations(reg, kind, copy)
    rels = list(relations)
    if not all(s in rels or -s in rels for s in shape):
        return None
    rest = [r for r in rels if r not in shape and -r not in shape]
    if not rest:
        return None
    keep = [var] + [n for n, r in zip(reg.names, reg.roles) if r.kind == "base"]
    target = VariableRegistry(reg.field, [(var, Role("aux"))]
                              + [(n, Role("base")) for n in keep[1:]]
                              + [(reg.uniformizer, UNIFORMIZER)])
    out = []
    for r in rest:
        try:
            out.append(str(r.embed(target, {names[0][1]: var})))
        except Exception:
            return None
    return "; ".join(out)


def order_diagnostic(G: GroupPresentation, bound: int = 10000):
    """(generic rank, special-fiber rank) by counting standard monomials.

    Heuristic diagnostic only: ``None`` means infinite or above ``bound``.
    """
    from .groebner import MonomialOrder

    reg = G.registry
    sat = saturate_by_t(G.ideal)
    non_pi = [n for n in reg.names if n != reg.uniformizer]
    order = MonomialOrder.block(reg, non_pi)
    lms = []
    for lm, _ in sat._engine_basis(order):
        lms.append(tuple(e for k, e in enumerate(lm) if k != reg.pi))
    generic = _count_standard(lms, len(non_pi), bound)
    special_rels = [reduce_mod_t(g) for g in sat.generators]
    sp = IdealPresentation(reg, [g for g in special_rels if g] + [reg.pi_power(1)])
    lms_s = [tuple(e for k, e in enumerate(lm) if k != reg.pi) for lm, _ in sp._engine_basis(GREVLEX)
             if not lm[reg.pi]]
    special = _count_standard(lms_s, len(non_pi), bound)
    return generic, special


def _count_standard(lms, n, bound):
    if any(not any(m) for m in lms):
        return 0
    # finite iff every variable has a pure power among the leading monomials
    for k in range(n):
        if not any(m[k] and sum(m) == m[k] for m in lms):
            return None
    caps = [min(m[k] for m in lms if m[k] and sum(m) == m[k]) for k in range(n)]
    count = 0
    for e in product(*(range(c) for c in caps)):
        if not any(all(a >= b for a, b in zip(e, m)) for m in lms):
            count += 1
            if count > bound:
                return None
    return count
