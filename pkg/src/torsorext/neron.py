"""Néron blow-ups of affine presentations.

Only the pi-chart of the blow-up is ever needed: adjoin c/pi for the
generators c of the center and cut the pi-torsion.  When every center
generator is a coordinate minus a constant, the chart is just the
substitution v -> a + pi*v followed by saturation, which keeps the registry.
"""

from __future__ import annotations

from .errors import CenterNotInSpecialFiber, SectionNotInSpecialFiber, UnsupportedSection
from .groebner import IdealPresentation, cut_torsion, ideal_equal, ideal_membership, ring_map_kernel, saturate_by_t
from .hopf import GroupPresentation
from .poly import (
    MultiPoly,
    RingMap,
    Role,
    UNIFORMIZER,
    VariableRegistry,
    apply_map,
    primitivize,
    reduce_mod_t,
    scale_variables,
)
from .torsor import BasePresentation, TorsorPresentation, identity_point_map


def blowup_base_origin(X: BasePresentation, e: int) -> tuple[BasePresentation, RingMap]:
    """Base chart t -> pi^e t'; the new coordinates keep the old names."""
    if e < 0:
        raise ValueError("blow-up exponent must be non-negative")
    reg = X.registry
    sub = RingMap.build(reg, reg, {n: reg.pi_power(e) * reg.var(n) for n in X.coords})
    rels = []
    for u in X.relations:
        g, _ = primitivize(apply_map(u, sub))
        rels.append(g)
    return X.with_relations(rels), sub


def _variable_shift(c: MultiPoly):
    """(name, constant) if c is a nonzero multiple of (v - a), else None."""
    reg = c.registry
    linear = [(m, v) for m, v in c.coeffs.items() if any(m)]
    if len(linear) != 1:
        return None
    m, lead = linear[0]
    if sum(m) != 1 or m[reg.pi]:
        return None
    name = reg.names[m.index(1)]
    a = reg.field.norm(-reg.field.div(c.constant_term(), lead))
    return name, a


def blowup_at_closed(I_scheme: IdealPresentation, I_center: IdealPresentation,
                     names=None) -> IdealPresentation:
    """pi-chart of the blow-up of Spec(ring/I_scheme) along V(I_center).

    If the center is generated (besides multiples of pi) by coordinates
    minus constants, the result lives in the same registry with each such
    coordinate v replaced by (v - a)/pi.  Otherwise new aux variables
    ``names`` (default z1, z2, ...) are adjoined with graph relations
    pi*z_i - c_i, and the scheme's variables are kept.
    """
    reg = I_scheme.registry
    if I_center.registry != reg:
        raise CenterNotInSpecialFiber("center lives in a different ring")
    if not ideal_membership(reg.pi_power(1), I_center):
        raise CenterNotInSpecialFiber("center does not contain pi")
    gens = [c for c in I_center.generators if reduce_mod_t(c)]
    shifts = [_variable_shift(c) for c in gens]
    if all(s is not None for s in shifts):
        images = {n: reg.const(a) + reg.pi_power(1) * reg.var(n) for n, a in shifts}
        sub = RingMap.build(reg, reg, images)
        rels = cut_torsion(reg, [apply_map(f, sub) for f in I_scheme.generators])
        return IdealPresentation(reg, rels)
    names = list(names) if names else [f"z{k}" for k in range(1, len(gens) + 1)]
    if len(names) != len(gens):
        raise ValueError("need one new variable per center generator outside (pi)")
    ext = reg.extended([(n, Role("aux")) for n in names])
    rels = [f.embed(ext) for f in I_scheme.generators]
    fixed = [ext.pi_power(1) * ext.var(n) - c.embed(ext) for n, c in zip(names, gens)]
    return IdealPresentation(ext, cut_torsion(ext, rels, fixed) + fixed)


def section_in_special_fiber(T: TorsorPresentation) -> bool:
    """Does the identity section (over every base point) lie in Y_s?"""
    ident = identity_point_map(T.registry)
    J = IdealPresentation(T.registry, [u for u in (reduce_mod_t(b) for b in T.base_relations) if u]
                          + [T.registry.pi_power(1)])
    return all(ideal_membership(apply_map(f, ident), J) for f in T.ideal.generators)


def _frozen_entries(ideal: IdealPresentation, reg: VariableRegistry, kind: str):
    frozen = set()
    for i, row in enumerate(reg.matrix_names(kind)):
        for j, n in enumerate(row):
            target = reg.var(n) - (1 if i == j else 0)
            if ideal_membership(target, ideal):
                frozen.add((i, j))
    return frozen


def conjugation_weights(frozen, d: int):
    """Integers a_i with a_i - a_j = 1 for every free entry (i, j).

    Free entries are those not identically equal to the identity matrix
    entry; conjugating by diag(pi^a) then realizes the blow-up at the unit
    section inside GL_d.
    """
    free = [(i, j) for i in range(d) for j in range(d) if (i, j) not in frozen]
    if any(i == j for i, j in free):
        raise UnsupportedSection("a diagonal entry is not frozen; the blow-up leaves GL_d")
    a = [None] * d
    for start in range(d):
        if a[start] is not None:
            continue
        a[start] = 0
        stack = [start]
        while stack:
            i = stack.pop()
            for (r, s) in free:
                for u, v, w in ((r, s, 1), (s, r, -1)):
                    if u == i:
                        want = a[i] - w
                        if a[v] is None:
                            a[v] = want
                            stack.append(v)
                        elif a[v] != want:
                            raise UnsupportedSection("no diagonal conjugation realizes this blow-up")
    low = min(a)
    return [x - low for x in a]


def conjugate_relations(relations, reg: VariableRegistry, kind: str, weights, copy: str = ""):
    """Substitute y_ij -> pi^(a_i - a_j) y_ij, clearing negative pi powers, primitive."""
    k_pi = reg.pi
    idx = {}
    for i, row in enumerate(reg.matrix_names(kind, copy)):
        for j, n in enumerate(row):
            idx[reg.index[n]] = weights[i] - weights[j]
    out = []
    for f in relations:
        coeffs = {}
        for m, c in f.coeffs.items():
            shift = sum(m[k] * w for k, w in idx.items())
            coeffs[m[:k_pi] + (m[k_pi] + shift,) + m[k_pi + 1:]] = c
        low = min(m[k_pi] for m in coeffs)
        coeffs = {m[:k_pi] + (m[k_pi] - low,) + m[k_pi + 1:]: c for m, c in coeffs.items()}
        g, _ = primitivize(MultiPoly(reg, coeffs))
        out.append(g)
    return out


def blowup_group_at_unit(G: GroupPresentation) -> GroupPresentation:
    frozen = _frozen_entries(G.ideal, G.registry, "group")
    weights = conjugation_weights(frozen, G.d)
    rels = conjugate_relations(G.relations, G.registry, "group", weights)
    rels = cut_torsion(G.registry, rels, [G.det_relation])
    name = f"{G.name} blown up at the unit section" if G.name else ""
    return G.with_relations(rels, level="integral", name=name)


def blowup_torsor_at_section(T: TorsorPresentation, G: GroupPresentation) -> tuple[TorsorPresentation, GroupPresentation]:
    """Blow up Y at the identity section of Y_s and G at its unit section.

    The chart adjoins (y_ij - delta_ij)/pi.  It is re-embedded in GL_d by
    conjugating with diag(pi^a), which requires every non-frozen entry to be
    off-diagonal (the unipotent case); otherwise UnsupportedSection.
    """
    if not section_in_special_fiber(T):
        raise SectionNotInSpecialFiber("the identity section does not lie in the special fiber")
    frozen = _frozen_entries(T.ideal, T.registry, "torsor") & _frozen_entries(G.ideal, G.registry, "group")
    weights = conjugation_weights(frozen, T.d)
    rels = conjugate_relations(T.relations, T.registry, "torsor", weights)
    rels = cut_torsion(T.registry, rels, T.base_relations + [T.det_relation])
    T2 = T.with_relations(rels, level="integral")
    grels = cut_torsion(G.registry, conjugate_relations(G.relations, G.registry, "group", weights),
                        [G.det_relation])
    return T2, G.with_relations(grels, level="integral")


def blow_down(f: MultiPoly, names, e: int = 1) -> MultiPoly:
    """Substitute v -> pi^(-e) v for ``names``, clear denominators, make primitive."""
    g, _ = primitivize(scale_variables(f, names, -e))
    return g


def blow_up_variables(f: MultiPoly, names, e: int = 1) -> MultiPoly:
    """Substitute v -> pi^e v for ``names`` and make primitive."""
    g, _ = primitivize(scale_variables(f, names, e))
    return g


def affine_space_registry(field, n: int, names=None, uniformizer: str = "pi") -> VariableRegistry:
    names = list(names) if names else [f"x{i}" for i in range(1, n + 1)]
    return VariableRegistry(field, [(v, Role("base")) for v in names] + [(uniformizer, UNIFORMIZER)])


def affine_space_renormalization(n: int, m: int, field=None, names=None,
                                 registry: VariableRegistry | None = None) -> RingMap:
    """The automorphism x_i -> pi^m x_i of A^n_K."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    if registry is None:
        from .scalars import GF

        registry = affine_space_registry(field or GF(2), n, names)
    coords = registry.names_of("base")
    if len(coords) != n:
        raise ValueError("registry does not have n coordinates")
    return RingMap.build(registry, registry, {v: registry.pi_power(m) * registry.var(v) for v in coords})


def verify_affine_renormalization(n: int, m: int, field=None):
    """Kernel of R[x, y] -> R[y], x_i -> pi^m y_i, y_i -> y_i, equals (x_i - pi^m y_i).

    Returns (ok, kernel ideal, graph ideal).
    """
    from .scalars import GF

    field = field or GF(2)
    xs = [f"x{i}" for i in range(1, n + 1)]
    ys = [f"y{i}" for i in range(1, n + 1)]
    src = VariableRegistry(field, [(v, Role("base")) for v in xs + ys] + [("pi", UNIFORMIZER)])
    tgt = VariableRegistry(field, [(v, Role("base")) for v in ys] + [("pi", UNIFORMIZER)])
    images = {x: tgt.pi_power(m) * tgt.var(y) for x, y in zip(xs, ys)}
    images.update({y: tgt.var(y) for y in ys})
    kernel = ring_map_kernel(RingMap.build(src, tgt, images), IdealPresentation(tgt, []))
    graph = IdealPresentation(src, [src.var(x) - src.pi_power(m) * src.var(y) for x, y in zip(xs, ys)])
    return ideal_equal(kernel, graph), kernel, graph


def is_saturated(I: IdealPresentation) -> bool:
    return ideal_equal(saturate_by_t(I), I)
