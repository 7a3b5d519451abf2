import math
from fractions import Fraction

import gmpy2
import numpy as np
import pytest
from hypothesis import given, strategies as st

from monop import catalog as cat
from monop.errors import OracleCapError
from monop.oracle import (
    galerkin_matrix,
    legendre_coeffs,
    legendre_gram,
    necessary_condition_scan,
    sv_scan,
    txn_ratio,
    txn_ratio_integral,
    weak_gram,
)
from monop.symbols import MonomialSpec


@pytest.mark.parametrize("k, coeffs", [(0, (1,)), (1, (-1, 2)), (2, (1, -6, 6)), (3, (-1, 12, -30, 20))])
def test_legendre_coeffs(k, coeffs):
    assert legendre_coeffs(k) == coeffs


def test_legendre_orthonormal_by_exact_integration():
    # <phi_j, phi_k> = sqrt((2j+1)(2k+1)) sum A_j[l] A_k[m] / (l+m+1)
    for j in range(6):
        for k in range(6):
            s = sum(Fraction(a * b, l + m + 1) for l, a in enumerate(legendre_coeffs(j)) for m, b in enumerate(legendre_coeffs(k)))
            assert s * (2 * j + 1 if j == k else 1) == (1 if j == k else 0)


def test_legendre_gram_identity_small():
    G = legendre_gram(8)
    assert all(G[j][k] == (1 if j == k else 0) for j in range(8) for k in range(8))


@pytest.mark.parametrize("name, value", [("volterra", 0.5), ("hardy", 1.0)])
def test_one_by_one(name, value):
    r = galerkin_matrix(cat.get(name).spec(), 1)
    assert r.matrix[0, 0] == value and r.sigma_max == value


def test_zero_coefficients():
    s = MonomialSpec.from_dict({"coeff_expr": "0", "a": 1, "b": 1})
    r = galerkin_matrix(s, 6)
    assert np.all(r.matrix == 0) and np.all(r.singular_values == 0)


def test_caps_and_redirect():
    v = cat.get("volterra").spec()
    with pytest.raises(OracleCapError, match="64"):
        galerkin_matrix(v, 65)
    with pytest.raises(OracleCapError, match="128"):
        galerkin_matrix(v, 129, "float")
    r = galerkin_matrix(cat.get("se_minus_s").spec(), 4, "exact")
    assert r.mode == "float" and r.precision >= 256 and "redirected" in r.note


def test_exact_and_float_modes_agree():
    for name in ("volterra", "t2", "shift"):
        s = cat.get(name).spec()
        a, b = galerkin_matrix(s, 24), galerkin_matrix(s, 24, "float")
        np.testing.assert_allclose(a.matrix, b.matrix, rtol=0, atol=1e-15)


def test_precision_grows_with_N():
    v = cat.get("volterra").spec()
    assert galerkin_matrix(v, 8, "float").precision == 256
    assert galerkin_matrix(v, 128, "float").precision > 600


def test_matrix_against_direct_quadrature():
    # <T phi_k, phi_j> by numpy Legendre polynomials and Gauss quadrature on (0, 1)
    s = cat.get("t3").spec()
    M = galerkin_matrix(s, 6).matrix
    x, w = np.polynomial.legendre.leggauss(40)
    x, w = (x + 1) / 2, w / 2
    phi = [math.sqrt(2 * k + 1) * np.polynomial.polynomial.polyval(x, legendre_coeffs(k)) for k in range(6)]
    Tphi = [
        math.sqrt(2 * k + 1) * sum(a * float(s.c(m).real) * x ** float(s.p(m)) for m, a in enumerate(legendre_coeffs(k)))
        for k in range(6)
    ]
    direct = np.array([[np.sum(w * Tphi[k] * phi[j]) for k in range(6)] for j in range(6)])
    np.testing.assert_allclose(M, direct, atol=1e-12)


def test_complex_coefficients_in_float_mode():
    s = MonomialSpec.from_dict({"coeff_expr": "i/(n+1)", "a": 1, "b": 1})
    r = galerkin_matrix(s, 5, "exact")
    assert r.mode == "float" and np.iscomplexobj(r.matrix)
    np.testing.assert_allclose(r.singular_values, galerkin_matrix(cat.get("volterra").spec(), 5).singular_values, rtol=1e-13)


@pytest.mark.parametrize("entry", cat.ENTRIES, ids=lambda e: e.name)
def test_sigma_max_nondecreasing(entry):
    scan = sv_scan(entry.spec(), [1, 2, 4, 8, 16, 32])
    assert all(b >= a - 1e-12 for a, b in zip(scan.sigma_max, scan.sigma_max[1:]))
    assert all(np.all(r.singular_values >= 0) for r in scan.results)


def test_result_serialization_is_stable():
    r = galerkin_matrix(cat.get("hardy").spec(), 8)
    again = galerkin_matrix(cat.get("hardy").spec(), 8)
    assert r.to_json() == again.to_json()
    assert len(r.checksum) == 64


def test_scan_summaries():
    v = sv_scan(cat.get("volterra").spec(), [8, 16, 32])
    assert v.trend == "bounded" and v.decay["decays"]
    assert v.sigma_max[-1] == pytest.approx(2 / math.pi, abs=1e-4)
    t2 = sv_scan(cat.get("t2").spec(), [8, 16, 32, 64])
    assert t2.trend == "growing"
    shift = sv_scan(cat.get("shift").spec(), [8, 16, 32])
    assert shift.trend == "bounded" and not shift.decay["decays"] and shift.decay["persists"]
    assert max(shift.sigma_max) <= 1.0
    with pytest.raises(ValueError):
        sv_scan(cat.get("shift").spec(), [16, 8])


# frozen from the calibration run
@pytest.mark.parametrize(
    "name, N, sigma",
    [
        ("volterra", 8, 0.636619772367581),
        ("hardy", 8, 1.659383),
        ("t2", 8, 1.171769839781514),
        ("t2", 64, 1.5409937088371717),
        ("t3", 16, 0.252581),
        ("t1", 64, 7.434845),
    ],
)
def test_frozen_sigma_max(name, N, sigma):
    assert galerkin_matrix(cat.get(name).spec(), N).sigma_max == pytest.approx(sigma, rel=1e-6)


@pytest.mark.parametrize(
    "name, n, value",
    [("volterra", 0, math.sqrt(1 / 3)), ("hardy", 0, 1.0), ("hardy", 4, 0.2)],
)
def test_txn_ratio_values(name, n, value):
    assert txn_ratio(cat.get(name).spec(), n) == pytest.approx(value, rel=1e-15)


def test_txn_ratio_zero_and_domain():
    assert txn_ratio(0, 3, Fraction(5)) == 0.0
    with pytest.raises(ValueError):
        txn_ratio(1, 0, Fraction(-1, 2))


@given(
    st.fractions(min_value=-5, max_value=5, max_denominator=50),
    st.integers(0, 40),
    st.fractions(min_value=Fraction(-2, 5), max_value=30, max_denominator=50),
)
def test_txn_ratio_against_integrals(c, n, p):
    assert txn_ratio(c, n, p) == pytest.approx(txn_ratio_integral(c, n, p), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("m, n, value", [(3, 3, 1.0), (0, 1, math.sqrt(3) / 2)])
def test_weak_gram(m, n, value):
    assert weak_gram(m, n) == pytest.approx(value, rel=1e-15)


def test_weak_gram_tends_to_zero():
    for n in (10, 100, 1000):
        assert weak_gram(0, n) <= 2 / math.sqrt(2 * n + 1)


@pytest.mark.parametrize(
    "name, flags",
    [
        ("volterra", {"pass_bounded", "pass_compact_necessary"}),
        ("shift", {"pass_bounded", "fail_compact_necessary"}),
        ("se_minus_s", {"pass_bounded", "pass_compact_necessary"}),
        ("t1", {"pass_bounded", "fail_compact_necessary"}),
    ],
)
def test_necessary_condition_scan(name, flags):
    assert necessary_condition_scan(cat.get(name).spec()).flags == flags


def test_necessary_scan_flags_growth():
    s = MonomialSpec.from_dict({"coeff_expr": "n+1", "a": 1, "b": 0})
    assert "fail_bounded" in necessary_condition_scan(s).flags


def test_gmpy2_context_restored():
    before = gmpy2.get_context().precision
    galerkin_matrix(cat.get("se_minus_s").spec(), 8, "float")
    assert gmpy2.get_context().precision == before
