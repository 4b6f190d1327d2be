import pytest

from torsorext.errors import CenterNotInSpecialFiber, SectionNotInSpecialFiber, UnsupportedSection
from torsorext.families import artin_schreier, kummer
from torsorext.groebner import IdealPresentation, ideal_equal, ideal_membership
from torsorext.hopf import builtin_group, verify_hopf
from torsorext.neron import (
    affine_space_renormalization,
    blow_down,
    blow_up_variables,
    blowup_at_closed,
    blowup_base_origin,
    blowup_group_at_unit,
    blowup_torsor_at_section,
    conjugation_weights,
    is_saturated,
    verify_affine_renormalization,
)
from torsorext.poly import RingMap, VariableRegistry, apply_map
from torsorext.scalars import GF
from torsorext.torsor import BasePresentation, verify_torsor


def integral(T):
    return T.with_relations(T.relations, level="integral")


# -- base blow-ups

def test_free_base_blowup_has_no_relations():
    base, sub = blowup_base_origin(BasePresentation.affine(GF(3), 1), 1)
    assert base.relations == ()
    assert sub.image("t1") == base.registry.parse("pi*t1")


def test_alpha_p_base_blowup_divides_out_content():
    base = BasePresentation.alpha_p(GF(3), "t1", p=3)
    new, _ = blowup_base_origin(base, 1)
    assert new.relations == (new.registry.parse("t1^3"),)


def test_composite_of_blowups_is_one_blowup():
    base = BasePresentation.affine(GF(5), 2)
    _, one = blowup_base_origin(base, 1)
    _, three = blowup_base_origin(base, 3)
    assert one.compose(one).compose(one).images == three.images


def test_origin_section_factors_through_base_blowup():
    reg = VariableRegistry.simple(GF(3), ["t1"])
    base = BasePresentation(reg, [reg.parse("t1^3 - pi*t1^2")])
    new, _ = blowup_base_origin(base, 2)
    for u in new.relations:
        assert not apply_map(u, RingMap.build(reg, reg, {"t1": reg.zero()}))


# -- blow-ups at closed subschemes

def _reg(names=("a", "t1"), p=3):
    return VariableRegistry.simple(GF(p), names)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_blowup_of_constant_group_gives_m(p):
    reg = _reg(("a",), p)
    X = IdealPresentation.parse(reg, [f"a^{p} - a"])
    out = blowup_at_closed(X, IdealPresentation.parse(reg, ["a", "pi"]))
    assert ideal_equal(out, IdealPresentation.parse(reg, [f"pi^{p - 1}*a^{p} - a"]))


def test_blowup_with_new_variable_gives_m():
    reg = _reg(("a",))
    X = IdealPresentation.parse(reg, ["a^3 - a"])
    out = blowup_at_closed(X, IdealPresentation.parse(reg, ["a^2 + a", "pi"]), ["z"])
    assert out.registry.role_of("z").kind == "aux"
    # z = (a^2 + a)/pi; the scheme a^3 = a is untouched generically
    assert ideal_equal(out, IdealPresentation(out.registry, [g.embed(out.registry) for g in X.generators]
                                              + [out.registry.parse("pi*z - a^2 - a")]), "generic")
    assert is_saturated(out)


def test_blowup_along_whole_special_fiber_is_identity():
    reg = _reg(("a",))
    X = IdealPresentation.parse(reg, ["a^3 - a"])
    assert ideal_equal(blowup_at_closed(X, IdealPresentation.parse(reg, ["pi"])), X)


def test_blowup_of_artin_schreier_gives_m_torsor():
    reg = _reg()
    X = IdealPresentation.parse(reg, ["a^3 - a - pi*t1"])
    out = blowup_at_closed(X, IdealPresentation.parse(reg, ["a", "pi"]))
    assert ideal_equal(out, IdealPresentation.parse(reg, ["pi^2*a^3 - a - t1"]))
    # generic invariance: undo the substitution a -> pi*a
    back = IdealPresentation(reg, [blow_down(g, ["a"]) for g in out.generators])
    assert ideal_equal(back, X, "generic")


def test_center_must_contain_pi():
    reg = _reg(("a",))
    with pytest.raises(CenterNotInSpecialFiber):
        blowup_at_closed(IdealPresentation.parse(reg, ["a^3 - a"]), IdealPresentation.parse(reg, ["a"]))


@pytest.mark.parametrize("center", [["a", "pi"], ["a - 1", "pi"], ["a^2", "pi"], ["a*t1 + a", "pi"]])
def test_blowup_output_is_saturated(center):
    reg = _reg()
    X = IdealPresentation.parse(reg, ["a^3 - a - pi*t1"])
    out = blowup_at_closed(X, IdealPresentation.parse(reg, center))
    assert is_saturated(out)


# -- groups and torsors at the unit section

@pytest.mark.parametrize("p", [2, 3, 5])
def test_group_blowup_at_unit_is_m_and_hopf(p):
    Z = builtin_group(f"Z/{p}", GF(p))
    M = blowup_group_at_unit(Z)
    assert ideal_equal(M.ideal, builtin_group(f"M_{p}", GF(p)).ideal)
    assert verify_hopf(M).status == "pass"


@pytest.mark.parametrize("p", [2, 3])
def test_torsor_blowup_at_section_gives_m_torsor(p):
    T = integral(artin_schreier(p, "pi*t1"))
    T2, G2 = blowup_torsor_at_section(T, builtin_group(f"Z/{p}", GF(p)))
    reg = T2.registry
    assert reg.parse(f"pi^{p - 1}*y12^{p} - y12 - t1") in T2.relations
    cert = verify_torsor(T2, G2)
    assert cert.label == "certified torsor", cert.lines()
    # the chart is y12 = pi*z, so z -> z/pi and clearing pi recovers the input relation
    back = blow_down(reg.parse(f"pi^{p - 1}*y12^{p} - y12 - t1"), ["y12"])
    assert back == T.relations[0]
    assert blow_up_variables(back, ["y12"]) == reg.parse(f"pi^{p - 1}*y12^{p} - y12 - t1")


def test_section_must_lie_in_special_fiber():
    T = integral(artin_schreier(3, "t1"))
    with pytest.raises(SectionNotInSpecialFiber):
        blowup_torsor_at_section(T, builtin_group("Z/3", GF(3)))


def test_multiplicative_section_blowup_is_unsupported_in_gl():
    # the mu_p blow-up would need x11 = 1 + pi*z, which leaves GL_1
    T = integral(kummer(3, "1"))
    with pytest.raises(UnsupportedSection):
        blowup_torsor_at_section(T, builtin_group("mu_3", GF(3)))


def test_multiplicative_blowup_at_ideal_level():
    reg = _reg(("x",))
    X = IdealPresentation.parse(reg, ["x^3 - 1"])
    out = blowup_at_closed(X, IdealPresentation.parse(reg, ["x - 1", "pi"]))
    # (1 + pi*x)^3 - 1 = pi^3*x^3 in characteristic 3
    assert ideal_equal(out, IdealPresentation.parse(reg, ["x^3"]))


def test_conjugation_weights():
    assert conjugation_weights({(0, 0), (1, 1), (1, 0)}, 2) == [1, 0]
    with pytest.raises(UnsupportedSection):
        conjugation_weights({(0, 1)}, 2)
    with pytest.raises(UnsupportedSection):
        conjugation_weights({(0, 0), (1, 1)}, 2)


# -- affine space

def test_renormalization_examples():
    sigma = affine_space_renormalization(1, 0)
    assert sigma.is_identity()
    sigma = affine_space_renormalization(1, 2)
    assert sigma.image("x1") == sigma.source.parse("pi^2*x1")
    sigma = affine_space_renormalization(3, 1)
    assert [str(sigma.image(f"x{i}")) for i in (1, 2, 3)] == ["pi*x1", "pi*x2", "pi*x3"]


@pytest.mark.parametrize("n,m", [(1, 2), (3, 1), (2, 4)])
def test_renormalization_kernel_is_graph(n, m):
    ok, kernel, graph = verify_affine_renormalization(n, m)
    assert ok
    assert all(ideal_membership(g, kernel) for g in graph.generators)
