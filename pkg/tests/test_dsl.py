import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from bundlecurv import catalog
from bundlecurv.dsl import eval_field, parse_expr, schwarzian, substitute, to_text
from bundlecurv.errors import CriticalPoint, DomainError, ExprSyntaxError, UnknownVariable

atoms = st.sampled_from(["z1", "z2", "v1", "i", "pi", "2", "0.5", "3.25e-1"])


def _combine(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(
        lambda t: f"({t[0]} {t[1]} {t[2]})")
    calls = st.tuples(st.sampled_from(["conj", "abs2", "exp", "re", "im"]), children).map(
        lambda t: f"{t[0]}({t[1]})")
    powers = st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}")
    return binary | calls | powers | children.map(lambda c: f"-{c}")


expressions = st.recursive(atoms, _combine, max_leaves=8)


@given(expressions)
def test_print_parse_round_trip(text):
    ast = parse_expr(text, (2, 1))
    again = parse_expr(to_text(ast), (2, 1))
    assert again == ast
    assert to_text(again) == to_text(ast)


@given(expressions, st.complex_numbers(max_magnitude=0.8), st.complex_numbers(max_magnitude=0.8))
def test_printed_text_evaluates_identically(text, a, b):
    ast = parse_expr(text, (2, 1))
    pt = [a, b, 0.3]
    v1 = eval_field(ast, pt, max_order=1).value
    v2 = eval_field(parse_expr(to_text(ast), (2, 1)), pt, max_order=1).value
    assert_allclose(v1, v2, rtol=1e-12, atol=1e-12)


def test_catalog_names_are_stable():
    for name in ("flat", "o_minus_one", "gauss", "poincare", "fs_k", "theta_family"):
        assert name in catalog.names()


def test_catalog_expressions_parse():
    for e in catalog.entries():
        if e.metric:
            e.metric_asts()
        if e.potential:
            e.potential_ast()


def test_syntax_error_position_and_expected():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("1 + * z1")
    assert info.value.position == 4
    assert "number" in info.value.expected
    assert list(info.value.expected) == sorted(info.value.expected)
    with pytest.raises(ExprSyntaxError):
        parse_expr("exp(z1")
    with pytest.raises(ExprSyntaxError):
        parse_expr("z1 $ 2")


def test_unknown_variables():
    with pytest.raises(UnknownVariable):
        parse_expr("z2", (1, 0))
    with pytest.raises(UnknownVariable):
        parse_expr("v1", (1, 0))
    with pytest.raises(UnknownVariable):
        parse_expr("w1", (1, 1))


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_field(parse_expr("log(z1)"), [0.0])
    with pytest.raises(DomainError):
        eval_field(parse_expr("1/z1"), [1e-13])
    with pytest.raises(DomainError):
        eval_field(parse_expr("(z1 - 0.5)^-2"), [0.5])


def test_eval_field_derivatives():
    ast = parse_expr("log(1 + abs2(z1))")
    z = 0.3 + 0.4j
    jet = eval_field(ast, [z])
    assert_allclose(jet.value, np.log(1 + abs(z) ** 2))
    assert_allclose(jet.derivative((1,), (1,)), 1 / (1 + abs(z) ** 2) ** 2)


def test_substitute():
    ast = substitute(parse_expr("abs2(z1) + z1"), "z1", parse_expr("2*z1"))
    assert_allclose(eval_field(ast, [0.5]).value, 1.0 + 1.0)


# -- Schwarzian ---------------------------------------------------------------

def lit(c):
    return f"({c.real!r} + {c.imag!r}*i)"


def test_schwarzian_examples():
    assert_allclose(schwarzian("exp(z1)", 0.0), -0.5, atol=1e-12)
    assert_allclose(schwarzian("z1^2", 1.0), -1.5, atol=1e-12)


@given(st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2),
       st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2),
       st.complex_numbers(max_magnitude=0.5))
def test_mobius_has_zero_schwarzian(a, b, c, d, z):
    if abs(a * d - b * c) < 0.1 or abs(c * z + d) < 0.2:
        return
    text = f"({lit(a)}*z1 + {lit(b)})/({lit(c)}*z1 + {lit(d)})"
    assert abs(schwarzian(text, z)) <= 1e-9 * max(1.0, abs(a * d - b * c) ** -2)


def test_schwarzian_cocycle_under_post_composition():
    f = "exp(z1) + z1^3"
    mobius_of_f = "(2*(exp(z1) + z1^3) + 1)/((exp(z1) + z1^3) + 3)"
    z = 0.2 + 0.1j
    assert_allclose(schwarzian(mobius_of_f, z), schwarzian(f, z), atol=1e-8)


def test_schwarzian_errors():
    with pytest.raises(CriticalPoint):
        schwarzian("z1^2", 0.0)
    with pytest.raises(DomainError):
        schwarzian("abs2(z1)", 0.5)
