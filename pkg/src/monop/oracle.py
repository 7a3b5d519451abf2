"""Galerkin oracle: truncations of T in the orthonormal shifted-Legendre basis.

The basis is ``phi_k(x) = sqrt(2k+1) * sum_m A[k][m] x**m`` with integer
coefficients ``A[k][m] = (-1)**(k-m) C(k, m) C(k+m, m)``.  Because
``<x**p, x**q> = 1/(p+q+1)`` on (0, 1), every entry of the compressed matrix

    M[j][k] = <T phi_k, phi_j>
            = sqrt((2j+1)(2k+1)) * sum_{m<=k, l<=j} A[k][m] c_m A[j][l] / (p_m + l + 1)

is a finite sum.  The integer coefficients grow like ``4**k`` with alternating
signs, so the sum is formed in exact rationals (``gmpy2.mpq``) whenever the
``c_m`` are rational and in high-precision binary floats otherwise.  Only the
finished entries are rounded to double, and the singular values come from
``numpy.linalg.svd``.

The oracle is corroboration only: growth of ``sigma_max`` over a finite range
of ``N`` is evidence of unboundedness, not a proof.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import gmpy2
import numpy as np

from .errors import EvaluationError, NotExactError, OracleCapError
from .quadrature import integrate_half_line
from .symbols import MonomialSpec

N_MAX_EXACT = 64
N_MAX_FLOAT = 128
DEFAULT_PRECISION = 256

# Trend thresholds, calibrated once on the catalog and then frozen.
GROWTH_FACTOR = 2.0  # sigma_max(N_last) / sigma_max(N_first) at or above this is "growing"
GROWTH_STEP = 1.05  # ... as is a last-step ratio above this when the whole series keeps rising
DECAY_LEVEL = 0.05  # sigma_k / sigma_1 below this by k = 24 counts as decay at N = 32
DECAY_INDEX = 24
PERSIST_LEVEL = 0.05  # min sigma_k(32), k <= 16, above this counts as non-decay (Hardy: 0.081)


# ------------------------------------------------------------------ basis


@lru_cache(maxsize=None)
def legendre_coeffs(k: int) -> tuple:
    """Integer monomial coefficients of ``phi_k / sqrt(2k+1)``, ascending."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return tuple(
        (-1) ** (k - m) * math.comb(k, m) * math.comb(k + m, m) for m in range(k + 1)
    )


def legendre_factor(k: int) -> float:
    return math.sqrt(2 * k + 1)


def legendre_gram(N: int) -> list:
    """Exact Gram matrix of ``phi_0 .. phi_{N-1}``; the identity in exact arithmetic.

    Entries are returned as Fractions.  The ``sqrt(2j+1) sqrt(2k+1)`` factor is
    applied after squaring, so the result stays rational.
    """
    G = []
    for j in range(N):
        row = []
        for k in range(N):
            s = gmpy2.mpq(0)
            for l, aj in enumerate(legendre_coeffs(j)):
                for m, ak in enumerate(legendre_coeffs(k)):
                    s += gmpy2.mpq(aj * ak, l + m + 1)
            # <phi_j, phi_k> = sqrt((2j+1)(2k+1)) * s; it is rational when
            # s = 0 or j = k, and that is all the identity needs
            if j == k:
                row.append(Fraction(int(s.numerator) * (2 * j + 1), int(s.denominator)))
            elif s == 0:
                row.append(Fraction(0))
            else:
                row.append(float(s) * math.sqrt((2 * j + 1) * (2 * k + 1)))
        G.append(row)
    return G


# --------------------------------------------------------------- matrices


@dataclass(frozen=True)
class GalerkinResult:
    N: int
    mode: str
    matrix: np.ndarray
    singular_values: np.ndarray
    precision: Optional[int] = None
    note: Optional[str] = None

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0]) if self.N else 0.0

    @property
    def checksum(self) -> str:
        m = np.ascontiguousarray(self.matrix)
        if np.iscomplexobj(m):
            data = m.astype("<c16").tobytes()
        else:
            data = m.astype("<f8").tobytes()
        return hashlib.sha256(data).hexdigest()

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "mode": self.mode,
            "precision": self.precision,
            "note": self.note,
            "singular_values": [float(s) for s in self.singular_values],
            "entry_checksum": self.checksum,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self, fh):
        for row in self.matrix:
            fh.write(",".join(repr(complex(v)) if np.iscomplexobj(self.matrix) else repr(float(v)) for v in row))
            fh.write("\n")


def _exact_coeffs(spec: MonomialSpec, N: int) -> list:
    return [spec.coeff.exact(m) for m in range(N)]


def _required_bits(N: int, precision: int) -> int:
    top = max(abs(a) for a in legendre_coeffs(N - 1)) if N else 1
    return max(precision, 2 * top.bit_length() + 64)


def _form(A, B, zero):
    """``R = A (A B)^T`` over whatever scalar type the entries carry."""
    N = len(A)
    C = []
    for k in range(N):
        Ak = A[k]
        row = []
        for l in range(N):
            s = zero
            for m in range(k + 1):
                s += Ak[m] * B[m][l]
            row.append(s)
        C.append(row)
    R = [[zero] * N for _ in range(N)]
    for j in range(N):
        Aj = A[j]
        for k in range(N):
            Ck = C[k]
            s = zero
            for l in range(j + 1):
                s += Aj[l] * Ck[l]
            R[j][k] = s
    return R


def _scale(R, N) -> np.ndarray:
    M = np.empty((N, N))
    for j in range(N):
        for k in range(N):
            M[j, k] = float(R[j][k]) * math.sqrt((2 * j + 1) * (2 * k + 1))
    return M


def galerkin_matrix(spec: MonomialSpec, N: int, mode: str = "exact", precision: int = DEFAULT_PRECISION) -> GalerkinResult:
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
    if N < 0:
        raise ValueError("N must be >= 0")
    cap = N_MAX_EXACT if mode == "exact" else N_MAX_FLOAT
    if N > cap:
        raise OracleCapError(f"N = {N} exceeds the {mode}-mode cap of {cap}")
    if N == 0:
        empty = np.zeros((0, 0))
        return GalerkinResult(0, mode, empty, np.zeros(0))
    p = [spec.p(m) for m in range(N)]
    note = None
    if mode == "exact":
        try:
            c = _exact_coeffs(spec, N)
        except (NotExactError, EvaluationError):
            c = None
            note = "coefficients are not rational; redirected to float mode"
        if c is not None:
            A = [[gmpy2.mpz(a) for a in legendre_coeffs(k)] for k in range(N)]
            B = [
                [gmpy2.mpq(cm.numerator, cm.denominator) / gmpy2.mpq(pm.numerator + (l + 1) * pm.denominator, pm.denominator)
                 for l in range(N)]
                for cm, pm in zip(c, p)
            ]
            R = _form(A, B, gmpy2.mpq(0))
            M = _scale(R, N)
            return GalerkinResult(N, "exact", M, _svd(M))
        mode = "float"
    bits = _required_bits(N, precision)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        c = [spec.coeff.mp(m, bits) for m in range(N)]
        A = [[gmpy2.mpfr(a) for a in legendre_coeffs(k)] for k in range(N)]
        den = [[gmpy2.mpfr(gmpy2.mpq(pm.numerator + (l + 1) * pm.denominator, pm.denominator)) for l in range(N)] for pm in p]
        zero = gmpy2.mpfr(0)
        Bre = [[gmpy2.mpfr(c[m].real) / den[m][l] for l in range(N)] for m in range(N)]
        M = _scale(_form(A, Bre, zero), N)
        if any(c[m].imag != 0 for m in range(N)):
            Bim = [[gmpy2.mpfr(c[m].imag) / den[m][l] for l in range(N)] for m in range(N)]
            M = M + 1j * _scale(_form(A, Bim, zero), N)
    return GalerkinResult(N, "float", M, _svd(M), precision=bits, note=note)


def _svd(M: np.ndarray) -> np.ndarray:
    return np.linalg.svd(M, compute_uv=False)


# ------------------------------------------------------------------- scans


@dataclass(frozen=True)
class ScanSummary:
    N: tuple
    sigma_max: tuple
    trend: str  # "growing" or "bounded"
    growth_ratio: float
    cauchy: tuple  # |sigma_max(N_i+1) - sigma_max(N_i)|
    decay: Optional[dict] = None
    results: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "N": list(self.N),
            "sigma_max": list(self.sigma_max),
            "trend": self.trend,
            "growth_ratio": self.growth_ratio,
            "cauchy": list(self.cauchy),
            "decay": self.decay,
            "label": "evidence",
        }


def sv_scan(spec: MonomialSpec, N_list: Sequence[int], mode: str = "exact", decay_N: int = 32) -> ScanSummary:
    """Singular values for each ``N`` plus a trend and decay summary.

    Decay is read at ``decay_N`` when it is in the list, else at the largest N.
    """
    N_list = tuple(int(n) for n in N_list)
    if list(N_list) != sorted(set(N_list)):
        raise ValueError("N_list must be strictly increasing")
    results = tuple(galerkin_matrix(spec, n, mode) for n in N_list)
    smax = tuple(r.sigma_max for r in results)
    cauchy = tuple(abs(b - a) for a, b in zip(smax, smax[1:]))
    trend, ratio = _trend(smax)
    at = next((r for r in results if r.N == decay_N), results[-1] if results else None)
    return ScanSummary(N_list, smax, trend, ratio, cauchy, _decay(at) if at is not None else None, results)


def _trend(smax) -> tuple:
    if len(smax) < 2 or smax[0] == 0:
        return "bounded", 1.0
    ratio = smax[-1] / smax[0]
    rising = all(b > a for a, b in zip(smax, smax[1:]))
    if ratio >= GROWTH_FACTOR or (rising and smax[-1] / smax[-2] > GROWTH_STEP):
        return "growing", ratio
    return "bounded", ratio


def _decay(res: GalerkinResult) -> dict:
    s = res.singular_values
    if len(s) == 0 or s[0] == 0:
        return {"N": res.N, "relative": [], "decays": True, "min_first_16": 0.0, "persists": False}
    rel = s / s[0]
    k = min(DECAY_INDEX, len(s)) - 1
    return {
        "N": res.N,
        "relative": [float(v) for v in rel],
        "decays": bool(rel[k] < DECAY_LEVEL),
        "min_first_16": float(s[: min(16, len(s))].min()),
        "persists": bool(s[: min(16, len(s))].min() > PERSIST_LEVEL),
    }


# ---------------------------------------------------- necessary conditions


def txn_ratio(spec_or_c, n: int = 0, p=None) -> float:
    """``||T x^n|| / ||x^n|| = |c_n| sqrt((2n+1)/(2 Re p_n + 1))``.

    Accepts a MonomialSpec and an index, or a bare ``(c, n, p)`` triple.
    """
    if isinstance(spec_or_c, MonomialSpec):
        c, p = spec_or_c.c(n), spec_or_c.p(n)
    else:
        c = spec_or_c
    rp = float(complex(p).real) if not isinstance(p, Fraction) else p
    if not rp > -0.5:
        raise ValueError("Re p_n must exceed -1/2")
    if c == 0:
        return 0.0
    return abs(complex(c)) * math.sqrt((2 * n + 1) / (2 * float(rp) + 1))


def txn_ratio_integral(c, n: int, p) -> float:
    """The same ratio from the two norms, each integrated numerically.

    With ``x = exp(-t)``, ``int_0^1 x**(2q) dx = int_0^inf exp(-(2q+1) t) dt``.
    """
    if c == 0:
        return 0.0
    rp = float(complex(p).real)
    num, _ = integrate_half_line(lambda t: np.exp(-(2 * rp + 1) * t), rtol=1e-14)
    den, _ = integrate_half_line(lambda t: np.exp(-(2 * n + 1) * t), rtol=1e-14)
    return abs(complex(c)) * math.sqrt(num / den)


def weak_gram(m: int, n: int) -> float:
    """``<e_m, e_n>`` for the normalized monomials ``e_n = sqrt(2n+1) x**n``."""
    if m < 0 or n < 0:
        raise ValueError("indices must be >= 0")
    return math.sqrt((2 * m + 1) * (2 * n + 1)) / (m + n + 1)


@dataclass(frozen=True)
class NecessaryScan:
    ratios: tuple
    bounded: str  # "pass" or "fail"
    compact_necessary: str  # "pass" or "fail"
    tail_slope: float

    @property
    def flags(self) -> frozenset:
        return frozenset({f"{self.bounded}_bounded", f"{self.compact_necessary}_compact_necessary"})

    def to_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "compact_necessary": self.compact_necessary,
            "tail_slope": self.tail_slope,
            "last_ratio": self.ratios[-1] if self.ratios else None,
        }


def necessary_condition_scan(spec: MonomialSpec, N: int = 256, slope_tol: float = 0.05, zero_level: float = 1e-3) -> NecessaryScan:
    """Probe ``||T x^n|| / ||x^n||`` for ``n < N``.

    Tail rule: fit ``log r_n`` against ``log(n+1)`` over the second half of the
    range.  A slope above ``slope_tol`` fails boundedness.  The compactness
    necessary condition passes when the slope is below ``-slope_tol`` or the
    last ratio is under ``zero_level`` times the largest one.
    """
    if N < 4:
        raise ValueError("N must be at least 4")
    r = np.array([txn_ratio(spec, n) for n in range(N)])
    n = np.arange(N)
    tail = slice(N // 2, N)
    rt = r[tail]
    if np.all(rt > 0):
        slope = float(np.polyfit(np.log(n[tail] + 1.0), np.log(rt), 1)[0])
    else:
        slope = -math.inf
    bounded = "fail" if slope > slope_tol else "pass"
    peak = float(r.max())
    vanish = slope < -slope_tol or peak == 0 or r[-1] <= zero_level * peak
    return NecessaryScan(tuple(float(v) for v in r), bounded, "pass" if vanish else "fail", slope)
