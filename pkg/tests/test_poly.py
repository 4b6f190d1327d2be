from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import binomial_expand, evaluate, evaluate_q, leibniz_det
from torsorext.errors import (
    ExponentOverflow,
    PolySyntaxError,
    RegistryMismatch,
    UnknownVariable,
    ZeroPolynomial,
)
from torsorext.poly import (
    MultiPoly,
    RingMap,
    Role,
    UNIFORMIZER,
    VariableRegistry,
    adjugate,
    apply_map,
    determinant,
    matmul,
    poly_arith,
    poly_parse,
    primitivize,
    reduce_mod_t,
    scale_variables,
    specialize_origin,
    t_content,
)
from torsorext.scalars import GF, QQ


def reg_for(field):
    # y is a fiber coordinate, x a base coordinate, pi the uniformizer
    return VariableRegistry(field, [("y", Role("aux")), ("x", Role("base")), ("pi", UNIFORMIZER)])


R3 = reg_for(GF(3))
R7 = reg_for(GF(7))
RQ = reg_for(QQ)


def polys(reg, max_terms=5, max_exp=3):
    mono = st.tuples(*[st.integers(0, max_exp)] * reg.nvars)
    coeff = st.integers(-5, 5) if reg.field.p else st.fractions(max_denominator=5).map(
        lambda q: q.limit_denominator(5))
    return st.dictionaries(mono, coeff, max_size=max_terms).map(
        lambda d: MultiPoly(reg, {m: reg.field.coerce(c) for m, c in d.items()}))


points7 = st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))


# -- parsing and printing

def test_parse_example_relation():
    reg = reg_for(GF(2))
    f = poly_parse("y^2 - y - pi*x", reg)
    assert len(f) == 3


def test_parse_zero_is_empty():
    assert not poly_parse("0", R3).coeffs


def test_parse_collects_terms():
    assert poly_parse("pi^2*(x+1) - pi^2*x", R3) == R3.pi_power(2)


def test_parse_fraction_over_q_only():
    assert poly_parse("1/2*x", RQ) == RQ.var("x").scale(Fraction(1, 2))
    with pytest.raises(PolySyntaxError):
        poly_parse("1/2*x", R3)


@pytest.mark.parametrize("text", ["x +", "x * * y", "(x + 1", "x^", ""])
def test_syntax_errors_carry_position(text):
    with pytest.raises(PolySyntaxError) as info:
        poly_parse(text, R3)
    assert 0 <= info.value.position <= len(text)


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        poly_parse("z + 1", R3)


def test_exponent_overflow():
    with pytest.raises(ExponentOverflow):
        poly_parse("x^70000", R3)


@settings(max_examples=200)
@given(polys(R3))
def test_print_parse_roundtrip_f3(f):
    g = poly_parse(str(f), R3)
    assert g == f and g.coeffs == f.coeffs


@settings(max_examples=100)
@given(polys(RQ))
def test_print_parse_roundtrip_q(f):
    assert poly_parse(str(f), RQ) == f


# -- arithmetic

def test_arith_examples():
    y = R3.var("y")
    assert poly_arith(y, y, "sub") == R3.zero()
    assert poly_arith(y + 1, y - 1, "mul") == y ** 2 - 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_freshmans_dream(p):
    reg = reg_for(GF(p))
    a, b = reg.var("y"), reg.var("x") + reg.pi_power(1)
    assert (a + b) ** p == a ** p + b ** p
    assert binomial_expand(a, b, p) == a ** p + b ** p


@settings(max_examples=500)
@given(polys(R7), polys(R7), polys(R7), points7)
def test_ring_axioms_and_evaluation_oracle(f, g, h, pt):
    assert (f + g) + h == f + (g + h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f - f == R7.zero()
    # the evaluation homomorphism is an independent oracle for products and sums
    assert evaluate((f * g).coeffs, pt, 7) == evaluate(f.coeffs, pt, 7) * evaluate(g.coeffs, pt, 7) % 7
    assert evaluate((f + g).coeffs, pt, 7) == (evaluate(f.coeffs, pt, 7) + evaluate(g.coeffs, pt, 7)) % 7


@settings(max_examples=100)
@given(polys(RQ, 4, 2), polys(RQ, 4, 2))
def test_products_over_q_against_evaluation(f, g):
    pt = (Fraction(1, 2), Fraction(-2, 3), Fraction(3))
    assert evaluate_q((f * g).coeffs, pt) == evaluate_q(f.coeffs, pt) * evaluate_q(g.coeffs, pt)


def test_registry_mismatch():
    with pytest.raises(RegistryMismatch):
        R3.var("y") + R7.var("y")


# -- maps and specializations

def test_apply_map_rescale_example():
    f = poly_parse("y^3 - y - pi*x", R3)
    m = RingMap.build(R3, R3, {"x": "pi*x"})
    assert apply_map(f, m) == poly_parse("y^3 - y - pi^2*x", R3)
    assert apply_map(f, RingMap.build(R3, R3)) == f


@settings(max_examples=100)
@given(polys(R3))
def test_composed_rescalings(f):
    one = RingMap.build(R3, R3, {"x": "pi*x"})
    two = RingMap.build(R3, R3, {"x": "pi^2*x"})
    assert apply_map(apply_map(f, one), one) == apply_map(f, two)
    assert apply_map(f, one.compose(one)) == apply_map(f, two)
    assert scale_variables(f, ["x"], 2) == apply_map(f, two)


def test_specialize_and_reduce_examples():
    f = poly_parse("y^3 - y - pi*x", R3)
    assert specialize_origin(f) == poly_parse("y^3 - y", R3)
    assert reduce_mod_t(f) == poly_parse("y^3 - y", R3)
    assert specialize_origin(R3.const(5)) == R3.const(5)
    assert reduce_mod_t(R3.pi_power(1)) == R3.zero()


@settings(max_examples=100)
@given(polys(R3))
def test_specialize_origin_is_substitution(f):
    zero_x = RingMap.build(R3, R3, {"x": R3.zero()})
    assert specialize_origin(f) == apply_map(f, zero_x)
    assert specialize_origin(reduce_mod_t(f)) == reduce_mod_t(specialize_origin(f))


# -- content

def test_content_examples():
    f = poly_parse("pi^2*x + pi^3*y", R3)
    assert t_content(f) == 2
    assert primitivize(f) == (poly_parse("x + pi*y", R3), 2)
    assert t_content(poly_parse("y^3 - y - pi*x", R3)) == 0
    g = poly_parse("pi^3*y^3 - pi*y", R3)
    assert primitivize(g) == (poly_parse("pi^2*y^3 - y", R3), 1)
    with pytest.raises(ZeroPolynomial):
        t_content(R3.zero())


@settings(max_examples=200)
@given(polys(R3), st.integers(0, 4))
def test_content_shift_and_roundtrip(f, k):
    if not f:
        return
    assert t_content(f * R3.pi_power(k)) == t_content(f) + k
    g, c = primitivize(f)
    assert g * R3.pi_power(c) == f
    assert reduce_mod_t(g)


@settings(max_examples=200)
@given(polys(R3), polys(R3))
def test_gauss_lemma_f3(f, g):
    if f and g:
        assert t_content(f * g) == t_content(f) + t_content(g)


@settings(max_examples=100)
@given(polys(RQ), polys(RQ))
def test_gauss_lemma_q(f, g):
    if f and g:
        assert t_content(f * g) == t_content(f) + t_content(g)


# -- matrices

@pytest.mark.parametrize("d", [1, 2, 3])
def test_adjugate_identity_and_leibniz_oracle(d):
    names = [(f"x{i}{j}", Role("group", i, j)) for i in range(1, d + 1) for j in range(1, d + 1)]
    reg = VariableRegistry(GF(5), names + [("D", Role("det_group")), ("pi", UNIFORMIZER)])
    X = [[reg.var(f"x{i}{j}") for j in range(1, d + 1)] for i in range(1, d + 1)]
    det = determinant(X)
    assert det == leibniz_det(X)
    ident = [[det if i == j else reg.zero() for j in range(d)] for i in range(d)]
    assert matmul(adjugate(X), X) == ident
    assert matmul(X, adjugate(X)) == ident
