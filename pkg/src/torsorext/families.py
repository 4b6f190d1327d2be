"""Named torsor families: Artin-Schreier, Kummer and the M-torsors."""

from __future__ import annotations

from .errors import CharacteristicMismatch
from .hopf import GroupPresentation, builtin_group, unipotent_relations
from .poly import MultiPoly
from .scalars import GF, FieldDescriptor
from .torsor import BasePresentation, TorsorPresentation, torsor_registry

FAMILIES = ("artin_schreier", "kummer", "m_torsor")


def _setup(p, field, base, d):
    field = field or GF(p)
    base = base or BasePresentation.affine(field, 1)
    if base.registry.field != field:
        raise ValueError("base and field disagree")
    return field, base, torsor_registry(base, d)


def _lift(data, base: BasePresentation, reg):
    if isinstance(data, MultiPoly):
        return data.embed(reg)
    if isinstance(data, int):
        return reg.const(data)
    return base.registry.parse(str(data)).embed(reg)


def _require_char(p: int, field: FieldDescriptor):
    if field.characteristic != p:
        raise CharacteristicMismatch(f"this family needs characteristic {p}, got {field}")


def artin_schreier(p: int, rhs, field: FieldDescriptor | None = None,
                   base: BasePresentation | None = None, pointed: bool = True) -> TorsorPresentation:
    """y^p - y - rhs in unipotent GL_2 coordinates (y = y12); fiber group Z/p."""
    field, base, reg = _setup(p, field, base, 2)
    _require_char(p, field)
    y = reg.var("y12")
    rels = [y ** p - y - _lift(rhs, base, reg)] + unipotent_relations(reg, "torsor")
    return TorsorPresentation(base, 2, rels, "generic", reg, f"artin_schreier p={p}", pointed)


def kummer(p: int, unit_rhs, field: FieldDescriptor | None = None,
           base: BasePresentation | None = None, pointed: bool = True) -> TorsorPresentation:
    """y^p - unit_rhs in GL_1; fiber group mu_p."""
    field, base, reg = _setup(p, field, base, 1)
    y = reg.var("y11")
    return TorsorPresentation(base, 1, [y ** p - _lift(unit_rhs, base, reg)], "generic", reg,
                              f"kummer p={p}", pointed)


def m_torsor(p: int, a, field: FieldDescriptor | None = None,
             base: BasePresentation | None = None, pointed: bool = True) -> TorsorPresentation:
    """pi^(p-1) y^p - y + a in unipotent GL_2 coordinates; fiber group M_p."""
    field, base, reg = _setup(p, field, base, 2)
    _require_char(p, field)
    y = reg.var("y12")
    rel = reg.pi_power(p - 1) * y ** p - y + _lift(a, base, reg)
    return TorsorPresentation(base, 2, [rel] + unipotent_relations(reg, "torsor"), "integral", reg,
                              f"m_torsor p={p}", pointed)


def family_group(name: str, p: int, field: FieldDescriptor | None = None) -> GroupPresentation:
    field = field or GF(p)
    return builtin_group({"artin_schreier": "Z/p", "kummer": "mu_p", "m_torsor": "M_p"}[name]
                         .replace("p", str(p)), field)


def build_family(name: str, p: int, data, field=None, base=None, pointed: bool = True) -> TorsorPresentation:
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; expected one of {FAMILIES}")
    return {"artin_schreier": artin_schreier, "kummer": kummer, "m_torsor": m_torsor}[name](
        p, data, field, base, pointed)
