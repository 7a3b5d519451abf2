import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from monop import catalog as cat
from monop import expr as ex
from monop.errors import SpecError
from monop.symbols import (
    AffineNodes,
    ArithmeticIndices,
    ExplicitIndices,
    ExplicitNodes,
    GeometricIndices,
    GeometricNodes,
    MonomialSpec,
    SymbolPair,
    affine_symbols,
    angular_derivative,
    blaschke_terms,
    blaschke_test,
    classify_fast_path,
    composition_bounded,
    intercept_note,
    interpolation_consistency,
    muntz_density,
    muntz_nodes,
    muntz_partial_sum,
    rational_symbol_classify,
    self_map_check,
)
from monop.verdict import VerdictClass


def spec(coeff="1", a=1, b=0, h=None, **kw):
    d = {"coeff_expr": coeff, "a": a, "b": b, **kw}
    if h is not None:
        d["h_expr"] = h
    return MonomialSpec.from_dict(d)


@pytest.mark.parametrize(
    "a, b, slope, intercept",
    [(1, 1, 1, 1), (2, 0, 2, Fraction(-1, 2)), (1, 0, 1, 0), (2, 2, 2, Fraction(3, 2))],
)
def test_affine_symbols(a, b, slope, intercept):
    sym = affine_symbols(spec(a=a, b=b))
    assert sym.slope == slope and sym.intercept == intercept


def test_intercept_note_only_when_slope_differs_from_one():
    assert intercept_note(spec(a=1, b=3)) is None
    note = intercept_note(spec(a=2, b=2))
    assert "3/2" in note


@given(st.integers(0, 6), st.integers(0, 12), st.integers(1, 6))
def test_phi_hits_shifted_exponents(a_num, b_num, den):
    s = spec(a=str(Fraction(a_num, den)), b=str(Fraction(b_num, den)))
    sym = affine_symbols(s)
    for n in range(0, 101, 7):
        assert sym.phi_exact(Fraction(2 * n + 1, 2)) == s.p(n) + Fraction(1, 2)


@pytest.mark.parametrize(
    "doc, message",
    [
        ({"coeff_expr": "", "a": 1, "b": 0}, "empty coefficient rule"),
        ({"coeff_expr": "1", "a": -1, "b": 0}, "slope"),
        ({"coeff_expr": "1", "a": 1, "b": "-1/2"}, "-1/2"),
        ({"coeff_expr": "1/(n-3)", "a": 1, "b": 0}, "c_3"),
        ({"coeff_expr": "1", "a": 1}, "missing"),
        ({"coeff_expr": "1", "a": 1, "b": 0, "h_expr": "2s"}, "h_expr"),
        ([1, 2], "JSON object"),
    ],
)
def test_invalid_specs(doc, message):
    with pytest.raises(SpecError, match=message.replace("(", r"\(")):
        MonomialSpec.from_dict(doc)


def test_spec_roundtrip_and_predicates():
    s = spec("1/(n+1)", 1, 1, "1/(s+1/2)", name="v", coeff_values=["1"])
    again = MonomialSpec.from_dict(s.to_dict())
    assert again.to_dict() == s.to_dict()
    assert s.is_flat and s.is_rational
    assert not spec("exp(-n)").is_rational
    assert not spec(a=2).is_flat


@pytest.mark.parametrize(
    "slope, intercept, expected",
    [(1, 1, True), (2, Fraction(-1, 2), False), (0, 0, False), (0, 1, True), (1, 0, True)],
)
def test_self_map_check(slope, intercept, expected):
    assert self_map_check(SymbolPair(Fraction(slope), Fraction(intercept), None, None)) is expected


@pytest.mark.parametrize("name, N", [("volterra", 50), ("t3", 50), ("shift", 10), ("hardy", 50), ("se_minus_s", 30)])
def test_interpolation_consistency(name, N):
    s = cat.get(name).spec()
    assert interpolation_consistency(affine_symbols(s), s, N) <= 1e-14


def test_interpolation_consistency_not_applicable():
    s = spec("1/(n+1)")
    assert interpolation_consistency(affine_symbols(s), s, 5) is None
    assert affine_symbols(s).interpolation_only


@pytest.mark.parametrize(
    "nodes, expected",
    [
        (AffineNodes(1, 0.5), "not_blaschke"),
        (AffineNodes(0, 3j), "blaschke"),
        (GeometricNodes(1, 2), "blaschke"),
        (GeometricNodes(1, 1), "not_blaschke"),
        (ExplicitNodes((1, 2, 3)), "blaschke"),
        (ExplicitNodes((1,), tail_exponent=2.0), "blaschke"),
        (ExplicitNodes((1,), tail_exponent=1.0), "not_blaschke"),
        ([1j, 2j, 3j], "blaschke"),
        ([1, 2, 3], "inconclusive"),
    ],
)
def test_blaschke(nodes, expected):
    assert blaschke_test(nodes) == expected


def test_blaschke_partial_sums_support_the_rules():
    geo = blaschke_terms(GeometricNodes(1, 2), 60)
    assert geo.sum() < 2 * sum(2.0**-n for n in range(60))
    aff = blaschke_terms(AffineNodes(1, 0.5), 4000)
    assert aff[:4000].sum() > aff[:400].sum() + 1.5  # log growth


def test_blaschke_rejects_left_half_plane():
    with pytest.raises(ValueError):
        blaschke_test([-1.0, 1.0])


@pytest.mark.parametrize(
    "S, expected",
    [
        (ArithmeticIndices(0, 1), "dense"),
        (ArithmeticIndices(0, 2), "dense"),
        (GeometricIndices(1, 2), "not_dense"),
        (ExplicitIndices((1, 5, 9)), "not_dense"),
        (ExplicitIndices((1,), tail_exponent=1.0), "dense"),
    ],
)
def test_muntz(S, expected):
    assert muntz_density(S) == expected


def test_muntz_partial_sums():
    geo = [muntz_partial_sum(GeometricIndices(1, 2), N) for N in (20, 40, 60)]
    assert geo[2] < 2.0 and geo[2] - geo[1] < 1e-11
    even = [muntz_partial_sum(ArithmeticIndices(0, 2), N) for N in (100, 1000, 10000)]
    assert even[2] - even[1] == pytest.approx(even[1] - even[0], rel=0.05)


@given(st.integers(0, 20), st.integers(1, 5))
def test_blaschke_and_muntz_agree_on_progressions(start, step):
    S = ArithmeticIndices(start, step)
    assert (blaschke_test(muntz_nodes(S)) == "not_blaschke") == (muntz_density(S) == "dense")


@pytest.mark.parametrize(
    "h, kind, limit",
    [
        ("1/(2*s)", "axis_pole", math.inf),
        ("1/(2*s+1)", "square_integrable_on_axis", 0.0),
        ("1", "bounded_on_axis", 1.0),
        ("(3*s+1)/(s+2)", "bounded_on_axis", 3.0),
        ("1/(s^2+4)", "axis_pole", math.inf),
        ("s^2/(s+1)", "grows_on_axis", math.inf),
        ("0", "square_integrable_on_axis", 0.0),
    ],
)
def test_rational_symbol_classify(h, kind, limit):
    r = rational_symbol_classify(ex.as_rational(ex.parse(h)))
    assert r.kind == kind and r.limit == pytest.approx(limit)


@given(st.floats(0.1, 10) | st.floats(-10, -0.1))
def test_rational_classify_scale_invariant(c):
    for h in ("1/(2*s)", "1/(2*s+1)", "(3*s+1)/(s+2)"):
        r = ex.as_rational(ex.parse(h))
        a, b = rational_symbol_classify(r), rational_symbol_classify(r.scaled(c))
        assert a.kind == b.kind and a.limit == pytest.approx(b.limit)


@pytest.mark.parametrize("a, value", [(1, 1.0), (2, 0.5), (0, math.inf)])
def test_angular_derivative(a, value):
    sym = SymbolPair(Fraction(a), Fraction(1), None, None)
    assert angular_derivative(sym) == value
    assert composition_bounded(sym) is (a > 0)


@pytest.mark.parametrize(
    "name, cls, tag",
    [
        ("t1", VerdictClass.UNBOUNDED, "not_self_map"),
        ("t2", VerdictClass.UNBOUNDED, "axis_pole"),
        ("t3", VerdictClass.COMPACT, "square_integrable_weight"),
        ("volterra", VerdictClass.COMPACT, "square_integrable_weight"),
    ],
)
def test_fast_path_decides(name, cls, tag):
    s = cat.get(name).spec()
    v = classify_fast_path(s, affine_symbols(s))
    assert (v.cls, v.tag) == (cls, tag)


@pytest.mark.parametrize("name", ["hardy", "shift", "se_minus_s"])
def test_fast_path_defers(name):
    s = cat.get(name).spec()
    assert classify_fast_path(s, affine_symbols(s)) is None


@pytest.mark.parametrize(
    "doc, cls, tag",
    [
        ({"coeff_expr": "0", "a": 1, "b": 1, "h_expr": "0"}, VerdictClass.COMPACT, "zero_weight"),
        ({"coeff_expr": "1/(n+1)", "a": 0, "b": 0, "h_expr": "1/(s+1/2)"}, VerdictClass.COMPACT, "rank_one"),
        ({"coeff_expr": "1", "a": 0, "b": 0, "h_expr": "1"}, VerdictClass.UNBOUNDED, "rank_one_weight_not_h2"),
        ({"coeff_expr": "1", "a": 0, "b": "-1/2", "h_expr": "1"}, None, None),
        ({"coeff_expr": "1/(n-1/2)", "a": 1, "b": 1, "h_expr": "1/(s-1)"}, VerdictClass.UNBOUNDED, "interior_pole"),
    ],
)
def test_fast_path_edge_cases(doc, cls, tag):
    try:
        s = MonomialSpec.from_dict(doc)
    except SpecError:
        assert cls is None
        return
    v = classify_fast_path(s, affine_symbols(s))
    assert (v.cls, v.tag) == (cls, tag)
