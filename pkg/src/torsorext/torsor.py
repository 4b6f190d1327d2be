"""Pointed torsors presented inside the trivial GL_d-torsor over an affine base.

The torsor ring is k[pi, t_1..t_r, y_11..y_dd, Dy] modulo base relations,
torsor relations and Dy*det(y) - 1.  The marked point is the identity matrix
over the origin t = 0.  Tensor rings are single registries with disjoint
variable blocks: torsor copies ``_l``/``_r``, the group block ``x``, and the
shared base coordinates (tensor products are over the base ring A).
"""

from __future__ import annotations

from functools import cached_property

from .certificate import PASS, SKIPPED, Certificate, CertificateEntry, entry
from .errors import EmptyFiber, NotEquivariant, NotPointed, RegistryMismatch, ZeroRelation
from .groebner import LEX, IdealPresentation, ideal_equal, ideal_membership, saturate_by_t
from .hopf import (
    COPY_SUFFIX,
    GroupPresentation,
    det_name,
    det_relation,
    group_registry,
    group_variables,
    matrix_of,
)
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
    specialize_origin,
)
from .scalars import FieldDescriptor

CERTIFIED = "certified torsor"
FLAT_CANDIDATE = "generic torsor with R-flat model candidate"
GENERIC_TORSOR = "generic torsor"
NOT_CERTIFIED = "not certified"


def torsor_variables(d: int, copy: str = ""):
    suffix = COPY_SUFFIX.get(copy, "_" + copy)
    out = [(f"y{i}{j}{suffix}", Role("torsor", i, j, copy)) for i in range(1, d + 1) for j in range(1, d + 1)]
    out.append((f"Dy{suffix}", Role("det_torsor", copy=copy)))
    return out


def _check_base_name(n: str):
    import re

    if re.fullmatch(r"(x|y)\d\d(_\w*)?|D(y)?(_\w*)?|w_sat_*", n):
        raise ValueError(f"base coordinate name {n!r} clashes with reserved matrix names")


class BasePresentation:
    """Affine base Spec(k[pi, t]/(u)) pointed at the origin."""

    def __init__(self, registry: VariableRegistry, relations=(), level: str = "integral", name: str = "",
                 pointed: bool = True):
        for n in registry.names_of("base"):
            _check_base_name(n)
        rels = []
        for u in relations:
            if isinstance(u, str):
                u = registry.parse(u)
            if u.registry != registry:
                raise RegistryMismatch("base relation not in the base registry")
            if u and u not in rels:
                rels.append(u)
        for u in rels if pointed else ():
            if specialize_origin(u):
                raise NotPointed(f"the origin does not satisfy base relation {u}")
        self.registry = registry
        self.relations = tuple(rels)
        self.level = level
        self.name = name

    @classmethod
    def affine(cls, field: FieldDescriptor, n: int, names=None, uniformizer: str = "pi") -> "BasePresentation":
        names = list(names) if names else [f"t{i}" for i in range(1, n + 1)]
        if len(names) != n:
            raise ValueError("need one name per coordinate")
        reg = VariableRegistry(field, [(v, Role("base")) for v in names] + [(uniformizer, UNIFORMIZER)])
        return cls(reg, (), "integral", f"A^{n}")

    @classmethod
    def alpha_p(cls, field: FieldDescriptor, name: str = "t1", uniformizer: str = "pi", p: int | None = None):
        p = p or field.characteristic
        if not p:
            raise ValueError("alpha_p base needs a prime")
        reg = VariableRegistry(field, [(name, Role("base")), (uniformizer, UNIFORMIZER)])
        return cls(reg, [reg.var(name) ** p], "integral", f"alpha_{p}")

    @property
    def coords(self) -> list[str]:
        return self.registry.names_of("base")

    @property
    def is_affine_space(self) -> bool:
        return not self.relations

    def with_relations(self, relations, level=None) -> "BasePresentation":
        return BasePresentation(self.registry, relations, level or self.level, self.name)


def torsor_registry(base: BasePresentation, d: int, blocks=(("torsor", ""),)) -> VariableRegistry:
    vs = []
    for kind, copy in blocks:
        vs.extend(torsor_variables(d, copy) if kind == "torsor" else group_variables(d, copy))
    breg = base.registry
    vs.extend((n, breg.role_of(n)) for n in base.coords)
    return VariableRegistry(breg.field, vs + [(breg.uniformizer, UNIFORMIZER)])


class TorsorPresentation:
    """Relations f_n of Y inside GL_d over the base, at level generic or integral.

    With ``pointed=False`` the identity-over-the-origin check is skipped; such a
    presentation is only meant to be passed through ``translate``.
    """

    def __init__(self, base: BasePresentation, d: int, relations, level: str = "generic",
                 registry: VariableRegistry | None = None, name: str = "", pointed: bool = True):
        if level not in ("generic", "integral"):
            raise ValueError(f"unknown level {level!r}")
        registry = registry or torsor_registry(base, d)
        rels = []
        for f in relations:
            if isinstance(f, str):
                f = registry.parse(f)
            if f.registry != registry:
                raise RegistryMismatch("relation not in the torsor registry")
            if not f:
                raise ZeroRelation("a torsor relation is the zero polynomial")
            if f not in rels:
                rels.append(f)
        self.base = base
        self.d = d
        self.registry = registry
        self.relations = tuple(rels)
        self.level = level
        self.name = name
        if pointed:
            self._check_pointed()

    def _check_pointed(self):
        ident = identity_point_map(self.registry)
        for f in self.relations:
            v = apply_map(specialize_origin(f), ident)
            if v:
                raise NotPointed(f"identity over the origin does not satisfy {f} (value {v})")

    def __repr__(self):
        return f"TorsorPresentation({self.level}, {[str(r) for r in self.relations]})"

    @property
    def field(self):
        return self.registry.field

    @cached_property
    def base_relations(self) -> list[MultiPoly]:
        return [u.embed(self.registry) for u in self.base.relations]

    @cached_property
    def det_relation(self) -> MultiPoly:
        return det_relation(self.registry, "torsor")

    @cached_property
    def ideal(self) -> IdealPresentation:
        return IdealPresentation(self.registry, list(self.relations) + self.base_relations + [self.det_relation])

    @property
    def membership_level(self) -> str:
        return "generic" if self.level == "generic" else "strict"

    def with_relations(self, relations, level=None, base=None, name=None) -> "TorsorPresentation":
        base = base or self.base
        reg = self.registry if base is self.base else torsor_registry(base, self.d)
        return TorsorPresentation(base, self.d, relations, level or self.level, reg,
                                  self.name if name is None else name)

    def relation_strings(self) -> list[str]:
        return [str(r) for r in self.relations]


def identity_point_map(reg: VariableRegistry) -> RingMap:
    """Send every torsor block to the identity matrix (Dy -> 1)."""
    images = {}
    for n, r in zip(reg.names, reg.roles):
        if r.kind == "torsor":
            images[n] = reg.const(1 if r.i == r.j else 0)
        elif r.kind == "det_torsor":
            images[n] = reg.const(1)
    return RingMap.build(reg, reg, images)


def _block_map(src: VariableRegistry, tgt: VariableRegistry, kind: str, copy: str) -> dict:
    """Images renaming the plain ``kind`` block of ``src`` into block ``copy`` of ``tgt``."""
    det_kind = "det_torsor" if kind == "torsor" else "det_group"
    images = {}
    for row_s, row_t in zip(src.matrix_names(kind), tgt.matrix_names(kind, copy)):
        for a, b in zip(row_s, row_t):
            images[a] = tgt.var(b)
    images[det_name(src, det_kind)] = tgt.var(det_name(tgt, det_kind, copy))
    return images


def torsor_into(T: TorsorPresentation, tgt: VariableRegistry, copy: str) -> RingMap:
    return RingMap.build(T.registry, tgt, _block_map(T.registry, tgt, "torsor", copy))


def group_into(G: GroupPresentation, tgt: VariableRegistry, copy: str = "") -> RingMap:
    return RingMap.build(G.registry, tgt, _block_map(G.registry, tgt, "group", copy))


# ---------------------------------------------------------------- fiber group

def fiber_group(T: TorsorPresentation) -> GroupPresentation:
    """Group of the fiber over the origin: specialize base coords, rename y -> x."""
    G_reg = group_registry(T.field, T.d, T.registry.uniformizer)
    src = T.registry
    images = {}
    for row_s, row_t in zip(src.matrix_names("torsor"), G_reg.matrix_names("group")):
        for a, b in zip(row_s, row_t):
            images[a] = G_reg.var(b)
    images[det_name(src, "det_torsor")] = G_reg.var(det_name(G_reg))
    for n in T.base.coords:
        images[n] = G_reg.zero()
    to_group = RingMap.build(src, G_reg, images)
    rels = [apply_map(specialize_origin(f), to_group) for f in T.relations]
    G = GroupPresentation(T.d, [r for r in rels if r], G_reg, T.level)
    if G.ideal.is_unit():
        raise EmptyFiber("the fiber over the origin is empty")
    return G


# ---------------------------------------------------------------- coaction

def coaction_registry(T: TorsorPresentation) -> VariableRegistry:
    return torsor_registry(T.base, T.d, (("torsor", ""), ("group", "")))


def coaction_map(T: TorsorPresentation, target: VariableRegistry | None = None,
                 group_copy: str = "", torsor_copy: str = "") -> RingMap:
    """ρ(y_ij) = Σ_r x_ir y_rj, ρ(Dy) = D*Dy, base coordinates fixed."""
    target = target or coaction_registry(T)
    X = matrix_of(target, "group", group_copy)
    Y = matrix_of(target, "torsor", torsor_copy)
    prod = matmul(X, Y)
    images = {}
    for i, row in enumerate(T.registry.matrix_names("torsor")):
        for j, n in enumerate(row):
            images[n] = prod[i][j]
    images[det_name(T.registry, "det_torsor")] = (target.var(det_name(target, "det_group", group_copy))
                                                  * target.var(det_name(target, "det_torsor", torsor_copy)))
    return RingMap.build(T.registry, target, images)


def coaction_image(f: MultiPoly, T: TorsorPresentation) -> MultiPoly:
    if f.registry != T.registry:
        raise RegistryMismatch("polynomial not in the torsor ring")
    return apply_map(f, coaction_map(T))


def verify_comodule(T: TorsorPresentation, G: GroupPresentation | None = None) -> CertificateEntry:
    """ρ(I_B) ⊆ I_C⊗B + C⊗I_B, plus coassociativity and counit identities.

    Use ``raise_for_status(NotEquivariant)`` on the result to get an exception.
    """
    G = G or fiber_group(T)
    level = T.membership_level
    creg = coaction_registry(T)
    rho = coaction_map(T, creg)
    ideal = IdealPresentation(
        creg, [apply_map(g, group_into(G, creg)) for g in G.ideal.generators]
        + [apply_map(g, torsor_into(T, creg, "")) for g in T.ideal.generators])
    fails = []
    for g in T.ideal.generators:
        if not ideal_membership(apply_map(g, rho), ideal, level):
            fails.append((str(g), "coaction image not in I_C⊗B + C⊗I_B"))

    # (Δ⊗id)ρ = (id⊗ρ)ρ is (x'x'')y = x'(x''y); counit: ρ followed by x -> 1 is the identity
    areg = torsor_registry(T.base, T.d, (("torsor", ""), ("group", "p"), ("group", "pp")))
    X1, X2 = matrix_of(areg, "group", "p"), matrix_of(areg, "group", "pp")
    Y = matrix_of(areg, "torsor", "")
    lhs, rhs = matmul(matmul(X1, X2), Y), matmul(X1, matmul(X2, Y))
    names = T.registry.matrix_names("torsor")
    for i in range(T.d):
        for j in range(T.d):
            if lhs[i][j] != rhs[i][j]:
                fails.append((names[i][j], "coassociativity identity fails"))
    kill = {}
    for n, r in zip(creg.names, creg.roles):
        if r.kind == "group":
            kill[n] = creg.const(1 if r.i == r.j else 0)
        elif r.kind == "det_group":
            kill[n] = creg.const(1)
    eps = RingMap.build(creg, creg, kill)
    back = torsor_into(T, creg, "")
    for n in T.registry.names:
        if T.registry.role_of(n).kind in ("torsor", "det_torsor"):
            v = T.registry.var(n)
            if apply_map(apply_map(v, rho), eps) != apply_map(v, back):
                fails.append((n, "counit law fails"))
    return entry("comodule", T.level, fails)


def verify_comodule_or_raise(T, G=None) -> CertificateEntry:
    return verify_comodule(T, G).raise_for_status(NotEquivariant)


# ---------------------------------------------------------------- Ψ and its inverse

def psi_registry(T: TorsorPresentation) -> VariableRegistry:
    return torsor_registry(T.base, T.d, (("torsor", "l"), ("group", ""), ("torsor", "r")))


def build_psi(T: TorsorPresentation, registry: VariableRegistry | None = None) -> tuple[RingMap, RingMap]:
    """Ψ: B⊗_A B -> C⊗B and its inverse, as endomorphisms of the three-block ring.

    Ψ(y_l) = x*y_r, Ψ(Dy_l) = D*Dy_r; Ψ^{-1}(x) = y_l * H(y_r) with
    H(y_r) = Dy_r * adj(y_r) the inverse matrix, Ψ^{-1}(D) = Dy_l*det(y_r).
    Right-copy and base variables are fixed by both maps.
    """
    reg = registry or psi_registry(T)
    X = matrix_of(reg, "group")
    YL = matrix_of(reg, "torsor", "l")
    YR = matrix_of(reg, "torsor", "r")
    D = reg.var(det_name(reg, "det_group"))
    DyL = reg.var(det_name(reg, "det_torsor", "l"))
    DyR = reg.var(det_name(reg, "det_torsor", "r"))
    XYR = matmul(X, YR)
    psi = {}
    for i, row in enumerate(reg.matrix_names("torsor", "l")):
        for j, n in enumerate(row):
            psi[n] = XYR[i][j]
    psi[det_name(reg, "det_torsor", "l")] = D * DyR
    H = [[DyR * a for a in row] for row in adjugate(YR)]
    YLH = matmul(YL, H)
    inv = {}
    for i, row in enumerate(reg.matrix_names("group")):
        for j, n in enumerate(row):
            inv[n] = YLH[i][j]
    inv[det_name(reg, "det_group")] = DyL * determinant(YR)
    return RingMap.build(reg, reg, psi), RingMap.build(reg, reg, inv)


def psi_ideals(T: TorsorPresentation, G: GroupPresentation, reg: VariableRegistry | None = None):
    """(source ideal of B⊗_A B, target ideal of C⊗B) in the three-block ring."""
    reg = reg or psi_registry(T)
    left = torsor_into(T, reg, "l")
    right = torsor_into(T, reg, "r")
    src = [apply_map(g, left) for g in T.ideal.generators]
    src += [apply_map(g, right) for g in T.ideal.generators if g not in T.base_relations]
    tgt = [apply_map(g, group_into(G, reg)) for g in G.ideal.generators]
    tgt += [apply_map(g, right) for g in T.ideal.generators]
    return IdealPresentation(reg, src), IdealPresentation(reg, tgt)


def _psi_checks(T, G, level):
    reg = psi_registry(T)
    psi, inv = build_psi(T, reg)
    src, tgt = psi_ideals(T, G, reg)
    well = []
    for g in src.generators:
        if not ideal_membership(apply_map(g, psi), tgt, level):
            well.append((str(g), "Psi image not in the C⊗B relations"))
    for g in tgt.generators:
        if not ideal_membership(apply_map(g, inv), src, level):
            well.append((str(g), "Psi^-1 image not in the B⊗B relations"))
    mutual = []
    src_vars = [n for n, r in zip(reg.names, reg.roles) if r.kind not in ("group", "det_group", "uniformizer")]
    tgt_vars = [n for n, r in zip(reg.names, reg.roles)
                if not (r.kind in ("torsor", "det_torsor") and r.copy == "l") and r.kind != "uniformizer"]
    for n in src_vars:
        v = reg.var(n)
        if not ideal_membership(apply_map(apply_map(v, psi), inv) - v, src, level):
            mutual.append((n, "Psi^-1(Psi(v)) != v"))
    for n in tgt_vars:
        v = reg.var(n)
        if not ideal_membership(apply_map(apply_map(v, inv), psi) - v, tgt, level):
            mutual.append((n, "Psi(Psi^-1(v)) != v"))
    return well, mutual


# ---------------------------------------------------------------- special fiber

def special_fiber_ideal(T: TorsorPresentation) -> IdealPresentation:
    gens = [reduce_mod_t(g) for g in T.ideal.generators]
    return IdealPresentation(T.registry, [g for g in gens if g])


def find_section(J: IdealPresentation):
    """A section of the special fiber over the base, if it is a graph over it.

    Returns (matrix, det-inverse) of polynomials in the base coordinates read
    off the reduced lex basis, or None.
    """
    reg = J.registry
    tvars = reg.names_of("torsor") + reg.names_of("det_torsor")
    values = {}
    for g in J.basis(LEX):
        lm = min(g.coeffs, key=lambda m: tuple(-x for x in m))
        if sum(lm) == 1:
            k = lm.index(1)
            if reg.names[k] in tvars:
                values[reg.names[k]] = reg.var(reg.names[k]) - g.scale(reg.field.inv(g.coeffs[lm]))
    if set(values) != set(tvars):
        return None
    names = reg.matrix_names("torsor")
    return [[values[n] for n in row] for row in names], values[det_name(reg, "det_torsor")]


def product_fiber_ideal(T: TorsorPresentation, G: GroupPresentation, section=None) -> IdealPresentation:
    """Ideal of G_s ×_k X_s translated by ``section`` (identity by default)."""
    reg = T.registry
    Y = matrix_of(reg, "torsor")
    Dy = reg.var(det_name(reg, "det_torsor"))
    if section is None:
        inv, det_s = [[reg.const(1 if i == j else 0) for j in range(T.d)] for i in range(T.d)], reg.const(1)
    else:
        S, DS = section
        inv = [[DS * a for a in row] for row in adjugate(S)]
        det_s = determinant(S)
    XY = matmul(Y, inv)
    images = {}
    for i, row in enumerate(G.registry.matrix_names("group")):
        for j, n in enumerate(row):
            images[n] = XY[i][j]
    images[det_name(G.registry)] = Dy * det_s
    to_t = RingMap.build(G.registry, reg, images)
    gens = [reduce_mod_t(u) for u in T.base_relations]
    gens += [apply_map(reduce_mod_t(g), to_t) for g in G.relations]
    gens.append(T.det_relation)
    return IdealPresentation(reg, [g for g in gens if g])


def _product_check(T, G):
    J = special_fiber_ideal(T)
    P = product_fiber_ideal(T, G)
    if ideal_equal(J, P):
        return [], "identity section"
    sec = find_section(J)
    if sec is not None:
        P2 = product_fiber_ideal(T, G, sec)
        if ideal_equal(J, P2):
            shown = ", ".join(f"{n}={v}" for n, v in zip(sum(T.registry.matrix_names('torsor'), []),
                                                       sum(sec[0], [])) if str(v) not in ("0", "1"))
            return [], f"section {shown or 'identity'}"
    for g in J.generators:
        if not ideal_membership(g, P):
            return [(str(g), "special fiber is not G_s x X_s")], ""
    for g in P.generators:
        if not ideal_membership(g, J):
            return [(str(g), "special fiber is not G_s x X_s")], ""
    return [("", "special fiber is not G_s x X_s")], ""


# ---------------------------------------------------------------- certificate

def verify_torsor(T: TorsorPresentation, G: GroupPresentation | None = None,
                  checks=(1, 2, 3, 4, 5)) -> Certificate:
    """Run the torsor checks; failures are recorded, never raised.

    1 comodule, 2 Psi well-defined, 3 Psi mutually inverse, 4 t-saturated,
    5 special fiber is G_s × X_s.  Checks 4 and 5 only apply at integral level.
    """
    G = G or fiber_group(T)
    level = T.membership_level
    entries = []
    if 1 in checks:
        entries.append(verify_comodule(T, G))
    if 2 in checks or 3 in checks:
        well, mutual = _psi_checks(T, G, level)
        if 2 in checks:
            entries.append(entry("psi-well-defined", T.level, well))
        if 3 in checks:
            entries.append(entry("psi-inverse", T.level, mutual))
    integral = T.level == "integral"
    if 4 in checks:
        if integral:
            sat = saturate_by_t(T.ideal)
            fails = [(str(g), "pi-torsion not cut") for g in sat.generators
                     if not ideal_membership(g, T.ideal)]
            entries.append(entry("t-saturated", "integral", fails[:1]))
        else:
            entries.append(CertificateEntry("t-saturated", "integral", SKIPPED))
    if 5 in checks:
        if integral:
            fails, how = _product_check(T, G)
            entries.append(entry("product-special-fiber", "integral", fails, how))
        else:
            entries.append(CertificateEntry("product-special-fiber", "integral", SKIPPED))
    return Certificate(tuple(entries), certificate_label(entries, T.level))


def certificate_label(entries, level) -> str:
    status = {e.name: e.status for e in entries}
    core = all(status.get(n) == PASS for n in ("comodule", "psi-well-defined", "psi-inverse"))
    if not core:
        return NOT_CERTIFIED
    if level == "generic":
        return GENERIC_TORSOR
    if status.get("t-saturated") == PASS:
        if status.get("product-special-fiber") == PASS:
            return CERTIFIED
        return FLAT_CANDIDATE
    return GENERIC_TORSOR


def translate(T: TorsorPresentation, shift: dict) -> TorsorPresentation:
    """Move a marked point to the origin: substitute t -> t + shift[t]."""
    reg = T.registry
    images = {}
    for n, v in shift.items():
        if n not in T.base.coords:
            raise ValueError(f"{n} is not a base coordinate")
        val = reg.parse(v) if isinstance(v, str) else v
        images[n] = reg.var(n) + val
    m = RingMap.build(reg, reg, images)
    bm = RingMap.build(T.base.registry, T.base.registry,
                       {n: T.base.registry.var(n) + (T.base.registry.parse(v) if isinstance(v, str) else v.embed(T.base.registry))
                        for n, v in shift.items()})
    base = T.base.with_relations([apply_map(u, bm) for u in T.base.relations])
    return TorsorPresentation(base, T.d, [apply_map(f, m) for f in T.relations], T.level, reg, T.name)
