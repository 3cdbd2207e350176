import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multloop import exprdsl as dsl
from multloop.exprdsl import Apply, BinOp, Num, Var


def test_parse_shape():
    e = dsl.strip_groups(dsl.parse("exp(z)-1"))
    assert e == BinOp("-", Apply("exp", Var("z")), Num("1"))


@pytest.mark.parametrize(
    "src, env, want",
    [
        ("z^2", {"z": 3}, 9.0),
        ("3*(1-exp(-z))", {"z": 0}, 0.0),
        ("x*z", {"x": 2, "z": 5}, 10.0),
        ("2^3^2", {}, 512.0),  # right associative
        ("-2^2", {}, -4.0),  # unary minus binds looser than ^
        ("1-2-3", {}, -4.0),
        ("8/4/2", {}, 1.0),
        ("z^-1", {"z": 4}, 0.25),
        ("sin(x)^2+cos(x)^2", {"x": 0.7}, 1.0),
    ],
)
def test_evaluate(src, env, want):
    assert dsl.evaluate(dsl.parse(src), env) == pytest.approx(want, abs=1e-15)


def test_unbalanced_reports_offset():
    with pytest.raises(dsl.DSLSyntaxError) as err:
        dsl.parse("exp(")
    assert err.value.offset == 4


@pytest.mark.parametrize("src", ["", "1+", "z^x", "z^1.5", "foo(z)", "(z", "z)", "2 3", "q"])
def test_syntax_errors(src):
    with pytest.raises(dsl.DSLSyntaxError):
        dsl.parse(src)


@pytest.mark.parametrize("src, env", [("log(z)", {"z": -1.0}), ("1/z", {"z": 0.0}), ("z^-2", {"z": 0.0})])
def test_domain_errors(src, env):
    with pytest.raises(dsl.DomainError):
        dsl.evaluate(dsl.parse(src), env)


def test_unbound():
    with pytest.raises(dsl.UnboundVariable):
        dsl.evaluate(dsl.parse("x+y"), {"x": 1.0})


@pytest.mark.parametrize("src, want", [("exp(z)-1", {"z"}), ("x^2+z", {"x", "z"}), ("1", set())])
def test_free_vars(src, want):
    assert dsl.free_vars(dsl.parse(src)) == want


def test_arrays_broadcast():
    f = dsl.compile_expr("x*z + 1", "xz")
    np.testing.assert_allclose(f(np.array([1.0, 2.0]), np.array([3.0, 4.0])), [4.0, 9.0])


def test_derivative_matches_hand_values():
    cases = [("z^3", lambda z: 3 * z * z), ("exp(2*z)", lambda z: 2 * math.exp(2 * z)),
             ("z*exp(-z)", lambda z: math.exp(-z) * (1 - z)), ("3*z^2-z+7", lambda z: 6 * z - 1)]
    for src, d in cases:
        for z in (-1.3, 0.0, 0.4, 1.7):
            assert dsl.derivative(dsl.parse(src), "z", {"z": z}) == pytest.approx(d(z), abs=1e-6)


# --- round trip on random trees ------------------------------------------------

_leaf = st.one_of(
    st.integers(0, 9).map(lambda n: Num(str(n))),
    st.sampled_from("xyz").map(Var),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda t: BinOp(*t)),
        children.map(dsl.Neg),
        st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: Apply(*t)),
        st.tuples(children, st.integers(0, 3)).map(lambda t: dsl.Pow(t[0], Num(str(t[1])))),
    )


trees = st.recursive(_leaf, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_print_parse_round_trip(tree):
    text = dsl.to_str(tree)
    again = dsl.parse(text)
    assert dsl.to_str(again) == text
    assert dsl.strip_groups(dsl.parse(dsl.to_str(again))) == dsl.strip_groups(again)
    env = {"x": 0.3, "y": -0.7, "z": 1.1}
    with np.errstate(all="ignore"):
        a, b = dsl.evaluate(tree, env), dsl.evaluate(again, env)
    assert a == b or (math.isnan(a) and math.isnan(b))
