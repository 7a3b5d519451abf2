import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from monop import expr as ex
from monop.errors import (
    EvaluationOverflow,
    ExprSyntaxError,
    NotExactError,
    PoleError,
    UnknownIdentifierError,
    WrongVariableError,
)


@pytest.mark.parametrize(
    "text, z, expected",
    [
        ("1/(s+1/2)", 0.5, 1.0),
        ("2*s^2 - 3", 2, 5),
        ("s^-1", 4, 0.25),
        ("s^(-2)", 2, 0.25),
        ("-s^2", 3, -9),
        ("i*s", 2, 2j),
        ("exp(-s)", 1, cmath.exp(-1)),
        ("conj(s)", 1 + 2j, 1 - 2j),
        ("1.5e1 + s", 0, 15),
        ("2 - 3 - 4", 0, -5),
        ("8 / 4 / 2", 0, 1),
        ("s*exp(-s)", 0.5, 0.5 * cmath.exp(-0.5)),
    ],
)
def test_evaluate_known(text, z, expected):
    assert ex.evaluate(ex.parse(text), z) == pytest.approx(expected, rel=1e-15, abs=1e-15)


@pytest.mark.parametrize(
    "text, err",
    [
        ("", ExprSyntaxError),
        ("   ", ExprSyntaxError),
        ("2s", ExprSyntaxError),
        ("(s+1", ExprSyntaxError),
        ("s+", ExprSyntaxError),
        ("s^1.5", ExprSyntaxError),
        ("s^s", ExprSyntaxError),
        ("s $ 2", ExprSyntaxError),
        ("sin(s)", UnknownIdentifierError),
        ("foo", UnknownIdentifierError),
        ("n + 1", WrongVariableError),
    ],
)
def test_parse_errors(text, err):
    with pytest.raises(err):
        ex.parse(text, "s")


def test_syntax_error_reports_position():
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("1 + (s * 2", "s")
    assert info.value.position == 10


def test_variable_choice():
    e = ex.parse("1/(n+1)", "n")
    assert e(3) == pytest.approx(0.25)
    with pytest.raises(WrongVariableError):
        ex.parse("1/(s+1)", "n")


def test_pole_and_overflow():
    e = ex.parse("1/(s-1)")
    with pytest.raises(PoleError):
        e(1.0)
    with pytest.raises(PoleError):
        ex.evaluate(e, np.array([0.0, 1.0]))
    with pytest.raises(EvaluationOverflow):
        ex.parse("exp(s)")(1000.0)


def test_array_evaluation_matches_scalar():
    e = ex.parse("(s^2 + 1)/(s + 3)")
    z = np.linspace(-2, 2, 9) + 0.5j
    np.testing.assert_allclose(e(z), [e(complex(v)) for v in z], rtol=1e-15)
    assert ex.parse("2")(z).shape == z.shape


def test_exact_evaluation():
    e = ex.parse("1/(2*n+1) + n^2", "n")
    assert ex.evaluate_exact(e, 3) == Fraction(1, 7) + 9
    with pytest.raises(NotExactError):
        ex.evaluate_exact(ex.parse("i*n", "n"), 1)
    with pytest.raises(NotExactError):
        ex.evaluate_exact(ex.parse("exp(-n)", "n"), 1)
    assert ex.evaluate_exact(ex.parse("exp(0*n)", "n"), 5) == 1


def test_mp_evaluation_agrees_with_float():
    e = ex.parse("(n+1/2)*exp(-(n+1/2))", "n")
    for n in range(6):
        assert complex(ex.evaluate_mp(e, Fraction(n), 256)) == pytest.approx(e(n), rel=1e-15)


def test_transcendental_flag():
    assert ex.parse("s*exp(-s)").has_transcendental
    assert not ex.parse("1/(s+1)").has_transcendental


@pytest.mark.parametrize(
    "text, P, Q",
    [
        ("1/(2*s+1)", [1], [1, 2]),
        ("(s+1)/(s+1)", [1], [1]),
        ("1/(s+1/2)", [2], [1, 2]),
        ("1", [1], [1]),
        ("s^2/(s-1)^-1", [0, 0, -1, 1], [1]),
    ],
)
def test_as_rational(text, P, Q):
    r = ex.as_rational(ex.parse(text))
    # normalization may scale numerator and denominator together
    lead = r.denominator[0] if r.denominator[0] != 0 else r.denominator[-1]
    ref = Q[0] if Q[0] != 0 else Q[-1]
    assert [c / lead * ref for c in r.numerator] == pytest.approx(P)
    assert [c / lead * ref for c in r.denominator] == pytest.approx(Q)


def test_as_rational_none_for_transcendental():
    assert ex.as_rational(ex.parse("s*exp(-s)")) is None
    assert ex.as_rational(ex.parse("conj(s)")) is None


# ------------------------------------------------------------- properties

_leaf = st.one_of(
    st.integers(0, 9).map(lambda k: ex.Num(str(k))),
    st.sampled_from(["0.5", "1.25", "3"]).map(ex.Num),
    st.just(ex.Var("s")),
    st.just(ex.ImagUnit()),
)


def _extend(children):
    return st.one_of(
        st.builds(ex.Neg, children),
        st.builds(ex.BinOp, st.sampled_from("+-*/"), children, children),
        st.builds(ex.Pow, children, st.integers(-3, 3)),
        st.builds(ex.Call, st.sampled_from(["exp", "conj"]), children),
    )


trees = st.recursive(_leaf, _extend, max_leaves=12)


@given(trees)
def test_print_parse_roundtrip(tree):
    assert ex.parse(ex.to_text(tree), "s").root == tree


rational_trees = st.recursive(
    st.one_of(st.integers(1, 5).map(lambda k: ex.Num(str(k))), st.just(ex.Var("s"))),
    lambda c: st.one_of(
        st.builds(ex.BinOp, st.sampled_from("+-*"), c, c),
        st.builds(ex.Pow, c, st.integers(0, 2)),
    ),
    max_leaves=8,
)


@given(rational_trees, rational_trees, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_as_rational_agrees_with_evaluate(num, den, z):
    e = ex.parse(ex.to_text(ex.BinOp("/", num, den)))
    try:
        direct = e(z)
    except (PoleError, EvaluationOverflow):
        return
    try:
        r = ex.as_rational(e)
    except PoleError:
        return
    q = np.polynomial.polynomial.polyval(z, np.asarray(r.denominator))
    if abs(q) < 1e-6:
        return
    assert complex(r(z)) == pytest.approx(direct, rel=1e-8, abs=1e-8)
