"""Extending a pointed generic torsor to an integral model by Néron blow-ups of the base.

The loop substitutes t -> pi^e t for e = 0, 1, 2, ..., makes every relation
primitive, cuts the pi-torsion and stops at the first e whose candidate
passes the certificate demanded by the stopping mode.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .certificate import PASS, Certificate
from .errors import CapExceeded, ZeroPolynomial
from .groebner import IdealPresentation, cut_torsion, ideal_equal
from .hopf import GroupPresentation, flat_closure
from .neron import affine_space_renormalization, blowup_base_origin
from .poly import MultiPoly, RingMap, apply_map, identity_map, primitivize, specialize_origin, t_content
from .torsor import (
    CERTIFIED,
    BasePresentation,
    TorsorPresentation,
    fiber_group,
    translate,
    verify_torsor,
)

log = logging.getLogger(__name__)

PRODUCT = "product"
FIRST_MODEL = "first-model"
MODES = (PRODUCT, FIRST_MODEL)


@dataclass(frozen=True)
class DecomposedRelation:
    """f = alpha_part + sum(v * g for v, g in g_terms), each g vanishing at the origin."""

    alpha_part: MultiPoly
    g_terms: tuple = ()

    def recombine(self) -> MultiPoly:
        out = self.alpha_part
        for v, g in self.g_terms:
            out = out + v * g
        return out


def decompose(f: MultiPoly) -> DecomposedRelation:
    """Split f monomial by monomial into its origin part and (v, g) pairs."""
    reg = f.registry
    base = set(reg.indices("base"))
    alpha = specialize_origin(f)
    terms = []
    for m, c in f.terms():
        if not any(m[k] for k in base):
            continue
        v = [0 if k in base else e for k, e in enumerate(m)]
        g = [e if k in base else 0 for k, e in enumerate(m)]
        terms.append((MultiPoly(reg, {tuple(v): c}), MultiPoly(reg, {tuple(g): reg.field.one()})))
    return DecomposedRelation(alpha, tuple(terms))


def base_degree(f: MultiPoly) -> int:
    return f.degree_in(f.registry.indices("base"))


def normalize_input(T: TorsorPresentation, translation: dict | None = None) -> TorsorPresentation:
    """Primitive relations, point moved to the origin when a translation is given."""
    if translation:
        T = translate(T, translation)
    rels = [primitivize(f)[0] for f in T.relations]
    return T.with_relations(rels, level="generic")


def blowup_step(T: TorsorPresentation, e: int) -> TorsorPresentation:
    """Integral candidate over the e-fold blow-up of the base at the origin."""
    base2, sub = blowup_base_origin(T.base, e)
    reg = T.registry
    tsub = RingMap.build(reg, reg, {n: sub.image(n).embed(reg) for n in T.base.coords})
    rels = [primitivize(apply_map(f, tsub))[0] for f in T.relations]
    fixed = [u.embed(reg) for u in base2.relations] + [T.det_relation]
    rels = cut_torsion(reg, rels, fixed)
    return TorsorPresentation(base2, T.d, rels, "integral", reg, T.name)


def model_group(T: TorsorPresentation) -> GroupPresentation:
    return flat_closure(fiber_group(T))


def stopping_check(T: TorsorPresentation, mode: str = PRODUCT, G: GroupPresentation | None = None) -> Certificate:
    """Certificate for a candidate: checks 1-5 (product) or 1-4 (first-model)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    G = G or model_group(T)
    checks = (1, 2, 3, 4, 5) if mode == PRODUCT else (1, 2, 3, 4)
    return verify_torsor(T, G, checks)


def mode_passes(cert: Certificate, mode: str) -> bool:
    if mode == PRODUCT:
        return cert.label == CERTIFIED
    return cert.passed(("comodule", "psi-well-defined", "psi-inverse", "t-saturated"))


def default_cap(T: TorsorPresentation) -> int:
    """1 + max content of the alpha parts at e = 0 + max base degree of the relations.

    An engineering bound only: the iterative check decides.
    """
    cand = blowup_step(T, 0)
    contents = []
    for f in cand.relations:
        try:
            contents.append(t_content(decompose(f).alpha_part))
        except ZeroPolynomial:
            contents.append(0)
    degs = [base_degree(f) for f in T.relations]
    return 1 + max(contents, default=0) + max(degs, default=0)


@dataclass
class ExtensionResult:
    e: int
    sigma: RingMap
    base_model: BasePresentation
    group_model: GroupPresentation
    torsor_model: TorsorPresentation
    certificate: Certificate
    mode: str
    cap: int = 0
    cap_is_default: bool = True
    history: list = field(default_factory=list)
    generic_equivalence: bool | None = None

    @property
    def weaker(self) -> bool:
        return self.mode == FIRST_MODEL


def extend_torsor(T: TorsorPresentation, mode: str = PRODUCT, e_cap: int | None = None,
                  translation: dict | None = None) -> ExtensionResult:
    """Smallest e (up to the cap) whose blown-up candidate is certified for ``mode``."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    Tn = normalize_input(T, translation)
    cap = default_cap(Tn) if e_cap is None else e_cap
    history = []
    for e in range(cap + 1):
        cand = blowup_step(Tn, e)
        G = model_group(cand)
        cert = stopping_check(cand, mode, G)
        failing = [x.line() for x in cert.failures()]
        history.append((e, cert.label, failing))
        log.info("e=%d: %s", e, cert.label)
        if mode_passes(cert, mode):
            reg = Tn.base.registry
            if Tn.base.is_affine_space:
                sigma = affine_space_renormalization(len(Tn.base.coords), e, registry=reg)
            else:
                sigma = identity_map(reg)
            return ExtensionResult(e, sigma, cand.base, G, cand, cert, mode, cap, e_cap is None, history)
    contents = {str(f): t_content(f) for f in Tn.relations}
    raise CapExceeded(
        f"no certified model for e <= {cap}",
        {"cap": cap, "contents": contents, "history": history},
    )


def transported_input(T: TorsorPresentation, result: ExtensionResult) -> IdealPresentation:
    """Input relations pulled back along t -> pi^e t, in the model's ring."""
    Tn = T
    reg = result.torsor_model.registry
    if Tn.registry != reg:
        Tn = T.with_relations([f.embed(reg) for f in T.relations], base=T.base)
    base2, sub = blowup_base_origin(T.base, result.e)
    tsub = RingMap.build(reg, reg, {n: sub.image(n).embed(reg) for n in T.base.coords})
    gens = [apply_map(f, tsub) for f in Tn.relations]
    gens += [apply_map(u.embed(reg), tsub) for u in T.base.relations]
    return IdealPresentation(reg, gens + [result.torsor_model.det_relation])


def verify_generic_equivalence(T: TorsorPresentation, result: ExtensionResult) -> bool:
    return ideal_equal(transported_input(T, result), result.torsor_model.ideal, "generic")


def certificate_passes(result: ExtensionResult) -> bool:
    return all(x.status == PASS for x in result.certificate)
