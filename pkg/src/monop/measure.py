"""Carleson-measure tests for affine weighted composition operators.

For ``phi(s) = a*s + beta`` the pull-back measure

    mu(E) = integral over {y : phi(iy) in E} of |h(iy)|^2 dy

lives on the vertical line ``Re z = beta``. A Carleson square with centre
``L + i t`` and side ``2L`` meets that line iff ``2L >= beta`` and then carries
the mass of ``|h(iy)|^2`` over ``y in [(t - L)/a, (t + L)/a]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import expr as ex
from .errors import EvaluationError, NotSelfMapError
from .quadrature import integrate_line, integrate_many
from .symbols import (
    AxisBehaviour,
    MonomialSpec,
    SymbolPair,
    classify_fast_path,
    rational_symbol_classify,
)
from .verdict import Verdict, VerdictClass

CLOSED_FORM_MAX_DEG = 2
POLE_MARGIN = 1e-6
QUAD_RTOL = 1e-10
GOLDEN = (math.sqrt(5) - 1) / 2


# ------------------------------------------------------- closed-form masses


class RationalDensity:
    """``|h(iy)|^2`` for rational ``h`` via partial fractions in ``y``.

    Writing ``|h(iy)|^2 = N(y)/D(y)``, every root ``y0`` of ``D`` is non-real
    when ``h`` has no pole on the axis, so the principal logarithm of ``y - y0``
    is continuous along the real line and the antiderivative is elementary.
    """

    def __init__(self, h: ex.RationalSymbol):
        P = np.trim_zeros(np.asarray(h.numerator, dtype=complex), "b")
        Q = np.trim_zeros(np.asarray(h.denominator, dtype=complex), "b")
        if P.size == 0:
            P = np.zeros(1, dtype=complex)
        pk = np.arange(P.size)
        qk = np.arange(Q.size)
        poly = np.polynomial.polynomial
        self.N = poly.polymul(P * 1j**pk, np.conj(P) * (-1j) ** pk)
        self.D = poly.polymul(Q * 1j**qk, np.conj(Q) * (-1j) ** qk)
        s_roots = np.roots(Q[::-1]) if Q.size > 1 else np.zeros(0, dtype=complex)
        y_roots = np.concatenate([-1j * s_roots, 1j * np.conj(s_roots)])
        if P.size > 1 or P[0] != 0:
            self.quot, rem = poly.polydiv(self.N, self.D)
        else:
            self.quot, rem = np.zeros(1, dtype=complex), np.zeros(1, dtype=complex)
        self.quot_int = poly.polyint(self.quot)
        self.terms = []  # (y0, [coefficient of (y - y0)^-m, ..., (y - y0)^-1])
        for y0, mult in _cluster(y_roots):
            E = self.D
            for _ in range(mult):
                E, _r = poly.polydiv(E, np.array([-y0, 1.0]))
            nt = _taylor(rem, y0, mult)
            et = _taylor(E, y0, mult)
            q = np.zeros(mult, dtype=complex)
            for j in range(mult):
                q[j] = (nt[j] - sum(et[i] * q[j - i] for i in range(1, j + 1))) / et[0]
            self.terms.append((y0, q))
        self.integrable = (len(self.N) <= len(self.D) - 2) or not np.any(self.N)

    def __call__(self, y):
        poly = np.polynomial.polynomial
        return (poly.polyval(y, self.N) / poly.polyval(y, self.D)).real

    def mass(self, y1, y2):
        """Integral over ``[y1, y2]`` (arrays allowed)."""
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        poly = np.polynomial.polynomial
        total = poly.polyval(y2, self.quot_int) - poly.polyval(y1, self.quot_int)
        for y0, q in self.terms:
            u1 = y1 - y0
            u2 = y2 - y0
            m = len(q)
            for j in range(m):
                k = m - j  # power of 1/u
                if k == 1:
                    total = total + q[j] * np.log1p((y2 - y1) / u1)
                else:
                    total = total + q[j] * (u2 ** (1 - k) - u1 ** (1 - k)) / (1 - k)
        return np.real(total)

    def total_mass(self) -> float:
        """Integral over the real line by residues in the upper half-plane."""
        if not np.any(self.N):
            return 0.0
        if not self.integrable:
            return math.inf
        res = sum(q[-1] for y0, q in self.terms if y0.imag > 0)
        return float(np.real(2j * math.pi * res))


def _cluster(roots, tol=1e-9):
    out = []
    for r in roots:
        for k, (c, m) in enumerate(out):
            if abs(r - c) <= tol * max(1.0, abs(c)):
                out[k] = (c, m + 1)
                break
        else:
            out.append((complex(r), 1))
    return out


def _taylor(coeffs, y0, order):
    """First ``order`` Taylor coefficients of the polynomial at ``y0``."""
    c = np.asarray(coeffs, dtype=complex)
    out = []
    for _ in range(order):
        out.append(np.polynomial.polynomial.polyval(y0, c) if c.size else 0j)
        c = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(0, dtype=complex)
    fact = [math.factorial(k) for k in range(order)]
    return [v / f for v, f in zip(out, fact)]


# ------------------------------------------------------------- line measure


@dataclass(frozen=True)
class LineMeasure:
    """Pull-back measure on the line ``Re z = beta`` for ``phi(s) = a*s + beta``."""

    slope: float
    abscissa: float
    weight: ex.ComplexExpr
    rational: Optional[ex.RationalSymbol] = None
    scale: float = 1.0  # density is scale**2 * |h(iy)|^2
    _closed: Optional[RationalDensity] = field(default=None, compare=False, repr=False)
    _axis: Optional[AxisBehaviour] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError("line measures need slope a > 0")
        if self.abscissa < 0:
            raise ValueError("the supporting line must lie in the closed half-plane")
        if self.rational is not None:
            axis = rational_symbol_classify(self.rational)
            object.__setattr__(self, "_axis", axis)
            if axis.kind != "axis_pole" and self.rational.deg_den <= CLOSED_FORM_MAX_DEG:
                object.__setattr__(self, "_closed", RationalDensity(self.rational))

    @classmethod
    def from_symbols(cls, sym: SymbolPair, scale: float = 1.0) -> "LineMeasure":
        if sym.weight is None:
            raise ValueError("the weight is known only at the nodes; no measure can be formed")
        return cls(float(sym.slope), float(sym.intercept), sym.weight, sym.rational, scale)

    def scaled(self, c: float) -> "LineMeasure":
        return LineMeasure(self.slope, self.abscissa, self.weight, self.rational, self.scale * c)

    @property
    def has_closed_form(self) -> bool:
        return self._closed is not None

    @property
    def axis_poles(self) -> tuple:
        """``y`` such that ``h`` has a pole at ``iy``."""
        if self._axis is None or self._axis.kind != "axis_pole":
            return ()
        return tuple(sorted(p.imag for p in self._axis.poles))

    def density(self, y):
        hv = ex.evaluate(self.weight, 1j * np.asarray(y, dtype=float))
        return self.scale**2 * (hv.real**2 + hv.imag**2)

    # -- masses over y-intervals ------------------------------------------

    def y_masses(self, y1, y2, closed_form: Optional[bool] = None) -> np.ndarray:
        """Mass of ``|h(iy)|^2 dy`` over each ``[y1[k], y2[k]]``; +inf near a pole."""
        y1 = np.atleast_1d(np.asarray(y1, dtype=float))
        y2 = np.atleast_1d(np.asarray(y2, dtype=float))
        out = np.empty(y1.shape)
        blocked = np.zeros(y1.shape, dtype=bool)
        for yp in self.axis_poles:
            blocked |= (y1 - POLE_MARGIN <= yp) & (yp <= y2 + POLE_MARGIN)
        out[blocked] = math.inf
        todo = ~blocked
        use_closed = self.has_closed_form if closed_form is None else closed_form
        if use_closed and not self.has_closed_form:
            raise ValueError("no closed-form antiderivative for this weight")
        if not np.any(todo):
            return out
        if use_closed:
            out[todo] = self.scale**2 * self._closed.mass(y1[todo], y2[todo])
        else:
            out[todo] = self._quad(y1[todo], y2[todo])
        return out

    def _quad(self, y1, y2):
        try:
            res = integrate_many(self.density, y1, y2, rtol=QUAD_RTOL)
        except EvaluationError:
            if y1.size == 1:
                return np.array([math.inf])
            return np.concatenate([self._quad(y1[k : k + 1], y2[k : k + 1]) for k in range(y1.size)])
        vals = np.where(res.converged, res.value, math.inf)
        return vals

    def total_mass(self) -> float:
        if self.axis_poles:
            return math.inf
        if self.has_closed_form:
            return self.scale**2 * self._closed.total_mass()
        if self._axis is not None and self._axis.kind in ("bounded_on_axis", "grows_on_axis"):
            return math.inf
        try:
            value, ok = integrate_line(self.density, rtol=QUAD_RTOL)
        except EvaluationError:
            return math.inf
        return float(value) if ok else math.inf

    def integrate(self, g) -> float:
        """``integral g dmu`` for ``g`` defined on the line ``beta + i v``.

        Integrates in the line coordinate ``v = a*y``; ``g`` receives complex
        points ``beta + i v``.
        """
        a, beta = self.slope, self.abscissa

        def integrand(v):
            y = v / a
            return np.real(g(beta + 1j * v)) * self.density(y) / a

        value, ok = integrate_line(integrand, rtol=QUAD_RTOL, mapping="algebraic")
        return float(value) if ok else math.inf

    # -- Carleson windows --------------------------------------------------

    def window_masses(self, t, L, closed_form: Optional[bool] = None) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        L = np.atleast_1d(np.asarray(L, dtype=float))
        t, L = np.broadcast_arrays(t, L)
        if np.any(L <= 0):
            raise ValueError("half-length L must be positive")
        out = np.zeros(t.shape)
        hit = 2 * L >= self.abscissa
        if np.any(hit):
            out[hit] = self.y_masses((t[hit] - L[hit]) / self.slope, (t[hit] + L[hit]) / self.slope, closed_form)
        return out

    def ratios(self, t, L) -> np.ndarray:
        t, L = np.broadcast_arrays(np.atleast_1d(t), np.atleast_1d(L))
        return self.window_masses(t, L) / (2 * L)

    def tail_limits(self) -> dict:
        """Analytic limits of the window ratio for rational weights.

        ``far_t``: fixed window, centre sliding to infinity (``limit**2 / a``);
        ``large_L``: window growing without bound.
        """
        if self._axis is None:
            return {}
        kind = self._axis.kind
        if kind == "axis_pole":
            return {"far_t": math.inf, "large_L": math.inf}
        lim = self._axis.limit
        far = self.scale**2 * lim**2 / self.slope
        return {"far_t": far, "large_L": far}


def window_mass(m: LineMeasure, t: float, L: float) -> float:
    """Mass of the Carleson square with centre ``L + i t`` and side ``2L``."""
    return float(m.window_masses(t, L)[0])


# ------------------------------------------------------------- search grids


@dataclass(frozen=True)
class SearchBox:
    T_max: float = 4096.0
    L_min: float = 2.0**-12
    L_max: float = 4096.0
    per_octave: int = 2
    t_linear_step: float = 0.125
    t_linear_extent: float = 4.0

    def L_grid(self, beta: float) -> np.ndarray:
        lo = max(beta / 2, self.L_min)
        ks = np.arange(
            math.floor(math.log2(self.L_min) * self.per_octave),
            math.ceil(math.log2(self.L_max) * self.per_octave) + 1,
        )
        geo = 2.0 ** (ks / self.per_octave)
        geo = geo[(geo >= lo) & (geo <= self.L_max)]
        grid = np.union1d(geo, [lo] if lo <= self.L_max else [])
        return grid

    def t_grid(self) -> np.ndarray:
        n = int(round(self.t_linear_extent / self.t_linear_step))
        lin = np.arange(1, n + 1) * self.t_linear_step
        ks = np.arange(
            math.floor(math.log2(self.L_min) * self.per_octave),
            math.ceil(math.log2(self.T_max) * self.per_octave) + 1,
        )
        geo = 2.0 ** (ks / self.per_octave)
        geo = geo[geo <= self.T_max]
        pos = np.union1d(lin, geo)
        return np.concatenate([-pos[::-1], [0.0], pos])

    def to_dict(self) -> dict:
        return {
            "T_max": self.T_max,
            "L_min": self.L_min,
            "L_max": self.L_max,
            "per_octave": self.per_octave,
            "t_linear_step": self.t_linear_step,
            "t_linear_extent": self.t_linear_extent,
        }


@dataclass(frozen=True)
class WindowProfile:
    """Sampled ``(t, L) -> mass, mass/(2L)``."""

    t: np.ndarray
    L: np.ndarray
    mass: np.ndarray
    ratio: np.ndarray

    def to_csv(self, fh):
        fh.write("t,L,mass,ratio\n")
        for row in zip(self.t, self.L, self.mass, self.ratio):
            fh.write(",".join(_fmt(float(v)) for v in row) + "\n")


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def window_profile(m: LineMeasure, search: SearchBox = SearchBox()) -> WindowProfile:
    tg = search.t_grid()
    Lg = search.L_grid(m.abscissa)
    T, L = np.meshgrid(tg, Lg, indexing="ij")
    T, L = T.ravel(), L.ravel()
    mass = m.window_masses(T, L)
    return WindowProfile(T, L, mass, mass / (2 * L))


def _golden_max(f, lo, hi, tol=1e-10, max_iter=200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo) + abs(hi)):
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _neighbours(grid, x):
    k = int(np.searchsorted(grid, x))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    return lo, hi


# ---------------------------------------------------------------- band sup


@dataclass(frozen=True)
class BandSup:
    value: float
    t_star: float
    tail_max: float
    inner_max: float
    growth_ratio: float


def band_sup(m: LineMeasure, T_max: float = 4096.0, step: float = 1 / 16, per_octave: int = 8) -> BandSup:
    """Estimate ``sup_t integral_t^{t+1} |h(iy)|^2 dy``.

    Linear grid of spacing ``step`` on ``|t| <= 8`` plus a geometric grid out
    to ``T_max``; the best cell is refined by golden-section search. The tail
    summary compares the maxima on ``|t| in [T/2, T]`` and ``[T/4, T/2]``.
    """
    lin = np.arange(-8.0, 8.0 + step / 2, step)
    ks = np.arange(3 * per_octave, int(math.ceil(math.log2(T_max) * per_octave)) + 1)
    geo = 2.0 ** (ks / per_octave)
    geo = geo[(geo > 8) & (geo <= T_max)]
    tg = np.union1d(lin, np.concatenate([-geo, geo]))
    vals = m.y_masses(tg, tg + 1)
    best = int(np.argmax(vals))
    value, t_star = float(vals[best]), float(tg[best])
    if math.isfinite(value):
        lo, hi = _neighbours(tg, t_star)
        t_ref, v_ref = _golden_max(lambda x: float(m.y_masses(x, x + 1)[0]), lo, hi)
        if v_ref > value:
            value, t_star = v_ref, t_ref
    at = np.abs(tg)
    tail = vals[(at > T_max / 2) & (at <= T_max)]
    inner = vals[(at > T_max / 4) & (at <= T_max / 2)]
    tail_max = float(tail.max()) if tail.size else 0.0
    inner_max = float(inner.max()) if inner.size else 0.0
    return BandSup(value, t_star, tail_max, inner_max, _growth(tail_max, inner_max))


def _growth(outer: float, inner: float) -> float:
    if outer == 0 and inner == 0:
        return 1.0
    if inner == 0 or math.isinf(outer):
        return math.inf
    return outer / inner


# ------------------------------------------------------- Carleson supremum


@dataclass(frozen=True)
class CarlesonSup:
    value: float
    t_star: float
    L_star: float
    grid_value: float
    limits: dict
    growth_ratio: float
    pole: Optional[float]
    profile: WindowProfile = field(repr=False)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def carleson_sup_estimate(m: LineMeasure, search: SearchBox = SearchBox(), profile: Optional[WindowProfile] = None) -> CarlesonSup:
    """Estimate ``sup mu(Q_I)/|I|`` over the search box plus analytic tails."""
    prof = profile if profile is not None else window_profile(m, search)
    best = int(np.argmax(prof.ratio))
    grid_value = float(prof.ratio[best])
    t_star, L_star = float(prof.t[best]), float(prof.L[best])
    value = grid_value
    pole = None
    if math.isinf(grid_value):
        poles = m.axis_poles
        pole = float(poles[0]) if poles else None
    else:
        t_star, L_star, value = _refine(m, search, t_star, L_star, value)
    limits = m.tail_limits()
    for v in limits.values():
        value = max(value, v)
    at = np.abs(prof.t)
    T = search.T_max
    outer = prof.ratio[(at > T / 2) & (at <= T)]
    inner = prof.ratio[(at > T / 4) & (at <= T / 2)]
    growth = _growth(float(outer.max()) if outer.size else 0.0, float(inner.max()) if inner.size else 0.0)
    return CarlesonSup(value, t_star, L_star, grid_value, limits, growth, pole, prof)


def _refine(m, search, t_star, L_star, value, rounds=2):
    tg = search.t_grid()
    Lg = search.L_grid(m.abscissa)
    for _ in range(rounds):
        lo, hi = _neighbours(tg, t_star)
        t_new, v = _golden_max(lambda x: float(m.ratios(x, L_star)[0]), lo, hi, tol=1e-12)
        if v > value:
            t_star, value = t_new, v
        lo, hi = _neighbours(Lg, L_star)
        lo = max(lo, Lg[0])
        L_new, v = _golden_max(lambda x: float(m.ratios(t_star, x)[0]), lo, hi, tol=1e-12)
        if v > value:
            L_star, value = L_new, v
    return t_star, L_star, value


# ------------------------------------------------------- vanishing tests


def naive_vanishing_test(m: LineMeasure, search: SearchBox = SearchBox(), tol: float = 1e-3) -> bool:
    """Small-square vanishing: ``sup_t mu(Q_I)/|I|`` at the smallest scanned
    ``|I|`` is at most ``tol`` times its largest value for ``L`` up to 1.

    This condition does not imply compactness on the half-plane; it is kept to
    exhibit exactly that.
    """
    trace = naive_vanishing_trace(m, search)
    peak = max(v for _, v, _ in trace)
    first = trace[0][1]
    return first == 0.0 or first <= tol * peak


def naive_vanishing_trace(m: LineMeasure, search: SearchBox = SearchBox()) -> list:
    """``(L, sup_t ratio, argmax t)`` for ``L = L_min * 2^k <= 1``."""
    tg = search.t_grid()
    out = []
    L0 = search.L_min
    while L0 <= 1.0:
        vals = m.ratios(tg, np.full(tg.shape, L0))
        best = int(np.argmax(vals))
        value, t_star = float(vals[best]), float(tg[best])
        if math.isfinite(value) and value > 0:
            lo, hi = _neighbours(tg, t_star)
            t_ref, v = _golden_max(lambda x, L0=L0: float(m.ratios(x, L0)[0]), lo, hi)
            if v > value:
                value, t_star = v, t_ref
        out.append((L0, value, t_star))
        L0 *= 2
    return out


DEFAULT_R = tuple(2.0**-k for k in range(1, 11))


@dataclass(frozen=True)
class VanishingResult:
    result: str  # "vanishing", "not_vanishing" or "inconclusive"
    trace: tuple  # (r, sup, t, L, branch) per r
    decay_rate: float
    reference: float
    witness: Optional[dict]


def true_vanishing_test(
    m: LineMeasure,
    r_sequence=DEFAULT_R,
    search: SearchBox = SearchBox(),
    tol: float = 1e-3,
    min_rate: float = 0.5,
    flat_rate: float = 0.1,
    scan: Optional[CarlesonSup] = None,
) -> VanishingResult:
    """Vanishing test over squares whose centre lies in
    ``S_r = {0 < Re z < r} U {|z| > 1/r}`` for decreasing ``r``.

    The sup over ``S_r`` is nonincreasing as ``r`` decreases. It is declared
    vanishing when the last sup is below ``tol`` times the overall Carleson
    sup, or when it decays at least like ``r**min_rate`` over the last four
    halvings; not vanishing when the decay is slower than ``r**flat_rate``;
    inconclusive in between.
    """
    scan = scan if scan is not None else carleson_sup_estimate(m, search)
    prof = scan.profile
    limits = scan.limits
    far_limit = max(limits.values()) if limits else 0.0
    reference = scan.value if scan.value > 0 else 1.0
    trace = []
    for r in r_sequence:
        strip = prof.L < r
        far = prof.L**2 + prof.t**2 > 1.0 / r**2
        mask = strip | far
        if np.any(mask):
            idx = np.flatnonzero(mask)
            k = idx[int(np.argmax(prof.ratio[idx]))]
            sup, t, L = float(prof.ratio[k]), float(prof.t[k]), float(prof.L[k])
            branch = "strip" if strip[k] else "far"
        else:
            sup, t, L, branch = 0.0, math.nan, math.nan, "empty"
        if far_limit > sup:
            sup, t, L, branch = far_limit, math.inf, math.nan, "far_limit"
        trace.append((r, sup, t, L, branch))

    sups = [row[1] for row in trace]
    last = sups[-1]
    if any(math.isinf(s) for s in sups):
        rate = 0.0
    else:
        rate = _decay_rate(r_sequence, sups)
    if last == 0 or last <= tol * reference or rate >= min_rate:
        result = "vanishing"
    elif rate <= flat_rate:
        result = "not_vanishing"
    else:
        result = "inconclusive"
    witness = None
    if result != "vanishing":
        r, sup, t, L, branch = trace[-1]
        witness = {"r": r, "ratio": sup, "t": t, "L": L, "branch": branch}
    return VanishingResult(result, tuple(trace), rate, reference, witness)


def _decay_rate(rs, sups, span=4):
    """Average exponent ``alpha`` in ``sup ~ r**alpha`` over the last ``span`` steps."""
    if len(sups) < 2:
        return 0.0
    span = min(span, len(sups) - 1)
    s0, s1 = sups[-1 - span], sups[-1]
    r0, r1 = rs[-1 - span], rs[-1]
    if s1 == 0:
        return math.inf
    if s0 == 0:
        return 0.0
    return math.log(s0 / s1) / math.log(r0 / r1)


# ---------------------------------------------------------- dyadic fallback


@dataclass(frozen=True)
class PushforwardSamples:
    """Point masses ``phi(iy_k)`` with weights ``|h(iy_k)|^2 * dy``."""

    points: np.ndarray
    weights: np.ndarray


def pushforward_samples(phi, h, y_max: float = 64.0, step: float = 2.0**-8) -> PushforwardSamples:
    """Sample the pull-back measure at the midpoints of a uniform ``y`` grid.

    ``phi`` and ``h`` may be ComplexExpr or callables on complex arrays.
    """
    n = int(round(2 * y_max / step))
    y = -y_max + (np.arange(n) + 0.5) * step
    s = 1j * y
    pts = ex.evaluate(phi, s) if isinstance(phi, ex.ComplexExpr) else np.asarray(phi(s), dtype=complex)
    hv = ex.evaluate(h, s) if isinstance(h, ex.ComplexExpr) else np.asarray(h(s), dtype=complex)
    return PushforwardSamples(np.broadcast_to(pts, y.shape).astype(complex), np.abs(hv) ** 2 * step)


@dataclass(frozen=True)
class DyadicEstimate:
    value: float
    side: float
    j: int


def dyadic_box_estimate(samples: PushforwardSamples, depth: int, max_level: Optional[int] = None) -> DyadicEstimate:
    """Max of mass/side over dyadic boxes ``[0, 2^k] x [j 2^k, (j+1) 2^k]``.

    Levels run from ``k = -depth`` up to ``max_level`` (default: the first side
    exceeding the sampled imaginary range). This is an estimate only.
    """
    pts, w = samples.points, samples.weights
    bad = np.flatnonzero(pts.real < 0)
    if bad.size:
        raise NotSelfMapError(complex(pts[bad[0]]))
    if not np.any(w > 0):
        return DyadicEstimate(0.0, math.nan, 0)
    if max_level is None:
        span = max(float(np.ptp(pts.imag)), float(np.max(np.abs(pts.imag))), float(np.max(pts.real)), 1.0)
        max_level = int(math.ceil(math.log2(span))) + 1
    best = DyadicEstimate(0.0, math.nan, 0)
    for k in range(-depth, max_level + 1):
        side = 2.0**k
        inside = pts.real <= side
        if not np.any(inside):
            continue
        j = np.floor(pts.imag[inside] / side).astype(np.int64)
        keys, inv = np.unique(j, return_inverse=True)
        mass = np.bincount(inv, weights=w[inside])
        i = int(np.argmax(mass))
        ratio = float(mass[i]) / side
        if ratio > best.value:
            best = DyadicEstimate(ratio, side, int(keys[i]))
    return best


# ------------------------------------------------------------------ decide


@dataclass(frozen=True)
class DecideConfig:
    search: SearchBox = SearchBox()
    r_sequence: tuple = DEFAULT_R
    tol_vanish: float = 1e-3
    bound_threshold: float = 1e6
    tail_growth_factor: float = 1.5
    min_decay_rate: float = 0.5
    flat_decay_rate: float = 0.1

    def to_dict(self) -> dict:
        return {
            "search": self.search.to_dict(),
            "r_sequence": list(self.r_sequence),
            "tol_vanish": self.tol_vanish,
            "bound_threshold": self.bound_threshold,
            "tail_growth_factor": self.tail_growth_factor,
            "min_decay_rate": self.min_decay_rate,
            "flat_decay_rate": self.flat_decay_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecideConfig":
        d = dict(d or {})
        search = SearchBox(**d.pop("search", {}))
        if "r_sequence" in d:
            d["r_sequence"] = tuple(float(r) for r in d["r_sequence"])
        return cls(search=search, **d)


@dataclass(frozen=True)
class Analysis:
    """Everything :func:`decide` computed, for reports."""

    verdict: Verdict
    fast_path: Optional[Verdict]
    measure: Optional[LineMeasure] = None
    carleson: Optional[CarlesonSup] = None
    band: Optional[BandSup] = None
    naive: Optional[bool] = None
    vanishing: Optional[VanishingResult] = None


def decide(spec: MonomialSpec, sym: SymbolPair, config: DecideConfig = DecideConfig()) -> Verdict:
    return analyze(spec, sym, config).verdict


def analyze(spec: MonomialSpec, sym: SymbolPair, config: DecideConfig = DecideConfig()) -> Analysis:
    """Fast path first; for ``a > 0`` the measure tests always run as a cross-check."""
    fast = classify_fast_path(spec, sym)
    if fast is not None and (fast.cls is VerdictClass.UNBOUNDED or sym.slope == 0 or fast.tag == "zero_weight"):
        return Analysis(fast, fast)
    if sym.weight is None:
        v = Verdict(VerdictClass.INCONCLUSIVE, "interpolation_only", {"reason": "no closed form for the weight"})
        return Analysis(v, fast)
    if sym.slope == 0:
        return Analysis(_rank_one_numeric(sym), fast)

    m = LineMeasure.from_symbols(sym)
    cs = carleson_sup_estimate(m, config.search)
    bs = band_sup(m, config.search.T_max)
    naive = naive_vanishing_test(m, config.search, config.tol_vanish)
    van = true_vanishing_test(
        m, config.r_sequence, config.search, config.tol_vanish, config.min_decay_rate, config.flat_decay_rate, cs
    )
    ev = _evidence(cs, bs, naive, van, config)

    growing = cs.growth_ratio > config.tail_growth_factor
    if not cs.finite:
        num = Verdict(VerdictClass.UNBOUNDED, "carleson_sup_infinite", ev)
    elif cs.value > config.bound_threshold or growing:
        num = Verdict(VerdictClass.UNBOUNDED, "carleson_sup_growing", ev)
    elif van.result == "vanishing":
        num = Verdict(VerdictClass.COMPACT, "vanishing_carleson", ev)
    elif van.result == "not_vanishing":
        num = Verdict(VerdictClass.BOUNDED_NOT_COMPACT, "carleson_not_vanishing", ev)
    else:
        num = Verdict(VerdictClass.INCONCLUSIVE, "vanishing_undecided", ev)

    if fast is not None:
        ev = dict(ev, fast_path=fast.tag)
        if fast.cls is num.cls:
            verdict = Verdict(fast.cls, fast.tag, ev)
        else:
            ev["conflict"] = {"fast_path": fast.cls.value, "numeric": num.cls.value}
            verdict = Verdict(VerdictClass.INCONCLUSIVE, "fast_path_numeric_conflict", ev)
    else:
        verdict = num
    return Analysis(verdict, fast, m, cs, bs, naive, van)


def _rank_one_numeric(sym: SymbolPair) -> Verdict:
    """``a = 0`` with a non-rational weight: bounded iff h is in H^2."""
    try:
        value, ok = integrate_line(lambda y: np.abs(ex.evaluate(sym.weight, 1j * y)) ** 2, rtol=QUAD_RTOL)
    except EvaluationError as err:
        return Verdict(VerdictClass.UNBOUNDED, "rank_one_weight_pole", {"error": str(err)})
    ev = {"axis_l2_norm_sq": _num(float(value)), "converged": ok, "assumes": "weight analytic in the half-plane"}
    if ok:
        return Verdict(VerdictClass.COMPACT, "rank_one_numeric", ev)
    far = np.abs(ex.evaluate(sym.weight, np.array([1e6j, -1e6j])))
    if np.min(far) >= 1e-3:
        return Verdict(VerdictClass.UNBOUNDED, "rank_one_weight_not_h2", ev)
    return Verdict(VerdictClass.INCONCLUSIVE, "rank_one_undecided", ev)


def _num(v: float):
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _evidence(cs: CarlesonSup, bs: BandSup, naive: bool, van: VanishingResult, config: DecideConfig) -> dict:
    return {
        "carleson_sup": _num(cs.value),
        "carleson_argmax": {"t": _num(cs.t_star), "L": _num(cs.L_star)},
        "carleson_grid_sup": _num(cs.grid_value),
        "carleson_tail_limits": {k: _num(v) for k, v in cs.limits.items()},
        "carleson_tail_growth": _num(cs.growth_ratio),
        "pole": cs.pole,
        "band_sup": {
            "value": _num(bs.value),
            "t": _num(bs.t_star),
            "tail_max": _num(bs.tail_max),
            "tail_growth": _num(bs.growth_ratio),
        },
        "naive_vanishing": naive,
        "vanishing": {
            "result": van.result,
            "decay_rate": _num(van.decay_rate),
            "trace": [
                {"r": r, "sup": _num(s), "t": _num(t), "L": _num(L), "branch": b} for r, s, t, L, b in van.trace
            ],
            "witness": None if van.witness is None else {k: _num(v) if isinstance(v, float) else v for k, v in van.witness.items()},
            "policy": "decay-rate rule over the last four halvings of r; thresholds are configuration, not theorems",
        },
    }
