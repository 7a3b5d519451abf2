"""Monomial-operator specifications and their half-plane symbols.

A monomial operator acts by ``T(x**n) = c_n * x**p_n`` with ``p_n = a*n + b``.
Its adjoint, carried to the Hardy space of the right half-plane, is the
weighted composition operator ``f -> h * (f o phi)`` where ``phi`` is affine
and ``h`` interpolates ``conj(c_n)`` at the nodes ``n + 1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .errors import EvaluationError, ExprError, NotExactError, SpecError
from .verdict import Verdict, VerdictClass

N_PROBE = 64
ROOT_TOL = 1e-12

Number = Union[int, float, Fraction, str]


def as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise SpecError(f"non-finite parameter {x!r}")
        # the shortest repr of a JSON double is what the user wrote
        return Fraction(repr(x))
    if isinstance(x, bool):
        raise SpecError("boolean is not a number")
    try:
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError):
        raise SpecError(f"not a real number: {x!r}") from None


@dataclass(frozen=True)
class CoefficientRule:
    """``c_n``: optional explicit leading values, then a closed form in ``n``."""

    expr: ex.ComplexExpr
    prefix: tuple = ()

    @classmethod
    def from_text(cls, text: str, prefix: Sequence = ()) -> "CoefficientRule":
        if text is None or not str(text).strip():
            raise SpecError("empty coefficient rule")
        try:
            e = ex.parse(str(text), "n")
        except ExprError as err:
            raise SpecError(f"coefficient rule: {err}") from err
        return cls(e, tuple(_prefix_value(v) for v in prefix))

    def __call__(self, n: int) -> complex:
        if n < len(self.prefix):
            return complex(self.prefix[n])
        return complex(self.expr(n))

    def exact(self, n: int) -> Fraction:
        if n < len(self.prefix):
            v = self.prefix[n]
            if isinstance(v, Fraction):
                return v
            raise NotExactError("explicit coefficient is not rational")
        return ex.evaluate_exact(self.expr, n)

    def mp(self, n: int, precision: int):
        import gmpy2

        if n < len(self.prefix):
            v = self.prefix[n]
            with gmpy2.context(gmpy2.get_context(), precision=precision):
                if isinstance(v, Fraction):
                    return gmpy2.mpc(gmpy2.mpq(v.numerator, v.denominator))
                return gmpy2.mpc(v)
        return ex.evaluate_mp(self.expr, Fraction(n), precision)


def _prefix_value(v):
    if isinstance(v, complex):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return complex(v.replace("i", "j"))
    return as_fraction(v)


@dataclass(frozen=True)
class MonomialSpec:
    """The operator ``x**n -> c_n x**(a*n + b)`` on L^2(0, 1)."""

    coeff: CoefficientRule
    a: Fraction
    b: Fraction
    name: Optional[str] = None
    weight: Optional[ex.ComplexExpr] = None
    n_probe: int = N_PROBE

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))
        if self.a < 0:
            raise SpecError(f"exponent slope must be >= 0, got {self.a}")
        # p_n is nondecreasing, so n = 0 is the binding case
        if self.b <= Fraction(-1, 2):
            raise SpecError(f"Re p_0 = {self.b} must exceed -1/2")
        for n in range(self.n_probe + 1):
            try:
                c = self.coeff(n)
            except EvaluationError as err:
                raise SpecError(f"coefficient c_{n} is not finite: {err}") from err
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise SpecError(f"coefficient c_{n} is not finite")

    @classmethod
    def from_dict(cls, doc: dict) -> "MonomialSpec":
        """Build from ``{name, coeff_expr, a, b, h_expr?, coeff_values?}``."""
        if not isinstance(doc, dict):
            raise SpecError("spec must be a JSON object")
        for key in ("coeff_expr", "a", "b"):
            if key not in doc:
                raise SpecError(f"spec is missing {key!r}")
        coeff = CoefficientRule.from_text(doc["coeff_expr"], doc.get("coeff_values", ()))
        weight = None
        if doc.get("h_expr"):
            try:
                weight = ex.parse(str(doc["h_expr"]), "s")
            except ExprError as err:
                raise SpecError(f"h_expr: {err}") from err
        return cls(coeff, as_fraction(doc["a"]), as_fraction(doc["b"]), doc.get("name"), weight)

    def to_dict(self) -> dict:
        d = {"name": self.name, "coeff_expr": self.coeff.expr.source, "a": str(self.a), "b": str(self.b)}
        if self.coeff.prefix:
            d["coeff_values"] = [str(v) for v in self.coeff.prefix]
        if self.weight is not None:
            d["h_expr"] = self.weight.source
        return d

    def c(self, n: int) -> complex:
        return self.coeff(n)

    def p(self, n: int) -> Fraction:
        return self.a * n + self.b

    @property
    def is_flat(self) -> bool:
        return self.a == 1

    @property
    def is_rational(self) -> bool:
        """True when every probed coefficient is exactly rational."""
        try:
            for n in range(self.n_probe + 1):
                self.coeff.exact(n)
        except (NotExactError, EvaluationError):
            return False
        return True


@dataclass(frozen=True)
class SymbolPair:
    """``phi(s) = slope*s + intercept`` and the weight ``h``."""

    slope: Fraction
    intercept: Fraction
    weight: Optional[ex.ComplexExpr] = None
    rational: Optional[ex.RationalSymbol] = field(default=None, compare=False)

    @property
    def interpolation_only(self) -> bool:
        return self.weight is None

    def phi(self, s):
        return float(self.slope) * s + float(self.intercept)

    def phi_exact(self, s: Fraction) -> Fraction:
        return self.slope * s + self.intercept

    def h(self, s):
        if self.weight is None:
            raise ValueError("weight is known only at the nodes n + 1/2")
        return ex.evaluate(self.weight, s)


def affine_symbols(spec: MonomialSpec) -> SymbolPair:
    """Symbols with ``phi(n + 1/2) = p_n + 1/2``, hence intercept ``b + (1 - a)/2``."""
    intercept = spec.b + (1 - spec.a) / 2
    rational = None
    if spec.weight is not None:
        rational = ex.as_rational(spec.weight)
    return SymbolPair(spec.a, intercept, spec.weight, rational)


def intercept_note(spec: MonomialSpec) -> Optional[str]:
    """Explain the intercept when it differs from ``b`` (i.e. when ``a != 1``)."""
    if spec.a == 1:
        return None
    beta = spec.b + (1 - spec.a) / 2
    return (
        f"phi intercept is b + (1 - a)/2 = {beta}, not b = {spec.b}: "
        f"phi(s) = a*s + b would send n + 1/2 to p_n + a/2 instead of p_n + 1/2"
    )


def self_map_check(sym: SymbolPair) -> bool:
    if sym.slope > 0:
        return sym.intercept >= 0
    return sym.slope == 0 and sym.intercept > 0


def interpolation_consistency(sym: SymbolPair, spec: MonomialSpec, N: int) -> Optional[float]:
    """Largest ``|h(n + 1/2) - conj(c_n)|`` for ``n < N``; None if h has no closed form."""
    if sym.interpolation_only:
        return None
    if N < 1:
        raise ValueError("N must be >= 1")
    nodes = np.arange(N) + 0.5
    hv = ex.evaluate(sym.weight, nodes)
    cv = np.array([spec.c(n) for n in range(N)])
    return float(np.max(np.abs(hv - np.conj(cv))))


# ------------------------------------------------------------ node sequences


@dataclass(frozen=True)
class AffineNodes:
    """z_n = slope*n + offset."""

    slope: complex
    offset: complex


@dataclass(frozen=True)
class GeometricNodes:
    """z_n = scale * ratio**n."""

    scale: complex
    ratio: complex


@dataclass(frozen=True)
class ExplicitNodes:
    """Finitely many nodes, optionally followed by a tail whose Blaschke terms
    decay like ``n**-tail_exponent``."""

    values: tuple
    tail_exponent: Optional[float] = None


def blaschke_terms(nodes, N: int) -> np.ndarray:
    z = np.asarray(_first_nodes(nodes, N), dtype=complex)
    return z.real / (1 + np.abs(z) ** 2)


def _first_nodes(nodes, N):
    if isinstance(nodes, AffineNodes):
        return [nodes.slope * n + nodes.offset for n in range(N)]
    if isinstance(nodes, GeometricNodes):
        return [nodes.scale * nodes.ratio**n for n in range(N)]
    if isinstance(nodes, ExplicitNodes):
        return list(nodes.values)[:N]
    return list(nodes)[:N]


def blaschke_test(nodes, N_probe: int = N_PROBE) -> str:
    """Decide whether ``sum Re z_n / (1 + |z_n|^2)`` converges.

    Returns ``"blaschke"``, ``"not_blaschke"`` or ``"inconclusive"``.
    """
    probe = np.asarray(_first_nodes(nodes, N_probe), dtype=complex)
    if probe.size and np.any(probe.real < 0):
        raise ValueError("nodes must lie in the closed right half-plane")

    if isinstance(nodes, AffineNodes):
        slope, offset = complex(nodes.slope), complex(nodes.offset)
        if slope.real > 0:
            return "not_blaschke"  # terms ~ Re(slope) / (|slope|^2 n)
        if slope != 0:
            return "blaschke"  # Re z_n = Re(offset), |z_n| ~ |slope| n
        return "blaschke" if offset.real == 0 else "not_blaschke"

    if isinstance(nodes, GeometricNodes):
        q = abs(complex(nodes.ratio))
        if nodes.scale == 0 or q != 1:
            return "blaschke"  # terms are O(q^-n) or O(q^n)
        if all(abs(z.real) == 0 for z in probe):
            return "blaschke"
        return "not_blaschke" if complex(nodes.ratio) == 1 else "inconclusive"

    if isinstance(nodes, ExplicitNodes):
        if nodes.tail_exponent is None:
            return "blaschke"  # finitely many nodes
        if nodes.tail_exponent > 1:
            return "blaschke"
        return "not_blaschke"

    if probe.size and np.all(probe.real == 0):
        return "blaschke"
    return "inconclusive"


# ---------------------------------------------------------------- index sets


@dataclass(frozen=True)
class ArithmeticIndices:
    """{start + k*step : k >= 0}."""

    start: int = 0
    step: int = 1

    def __post_init__(self):
        if self.start < 0 or self.step < 1:
            raise ValueError("need start >= 0 and step >= 1")


@dataclass(frozen=True)
class GeometricIndices:
    """{scale * ratio**k : k >= 0} for an integer ratio >= 2."""

    scale: int = 1
    ratio: int = 2

    def __post_init__(self):
        if self.scale < 1 or self.ratio < 2:
            raise ValueError("need scale >= 1 and ratio >= 2")


@dataclass(frozen=True)
class ExplicitIndices:
    """Finite explicit indices, optionally followed by a tail whose terms
    ``1/(n + 1)`` decay like ``k**-tail_exponent``."""

    values: tuple
    tail_exponent: Optional[float] = None


def muntz_partial_sum(S, N: int) -> float:
    return float(sum(1.0 / (n + 1) for n in _first_indices(S, N)))


def _first_indices(S, N):
    if isinstance(S, ArithmeticIndices):
        return [S.start + k * S.step for k in range(N)]
    if isinstance(S, GeometricIndices):
        return [S.scale * S.ratio**k for k in range(N)]
    return list(S.values)[:N]


def muntz_density(S, N_probe: int = N_PROBE) -> str:
    """``"dense"`` iff ``sum_{n in S} 1/(n + 1)`` diverges."""
    if isinstance(S, ArithmeticIndices):
        return "dense"
    if isinstance(S, GeometricIndices):
        return "not_dense"
    if isinstance(S, ExplicitIndices):
        if S.tail_exponent is None:
            return "not_dense"
        return "dense" if S.tail_exponent <= 1 else "not_dense"
    return "inconclusive"


def muntz_nodes(S):
    """Half-integer nodes ``{n + 1/2 : n in S}`` as a node-sequence rule."""
    if isinstance(S, ArithmeticIndices):
        return AffineNodes(S.step, S.start + 0.5)
    if isinstance(S, GeometricIndices):
        raise ValueError("geometric index sets shift to non-geometric nodes; use explicit nodes")
    return ExplicitNodes(tuple(n + 0.5 for n in S.values), S.tail_exponent)


# --------------------------------------------------------- rational weights


@dataclass(frozen=True)
class AxisBehaviour:
    """How a rational weight behaves on the imaginary axis.

    ``kind`` is one of ``axis_pole``, ``square_integrable_on_axis``,
    ``bounded_on_axis`` (with ``limit`` = lim |h(iy)|) or ``grows_on_axis``.
    """

    kind: str
    limit: float = 0.0
    poles: tuple = ()


def _roots(coeffs) -> np.ndarray:
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1])


def _on_axis(r: complex) -> bool:
    return abs(r.real) <= ROOT_TOL * max(1.0, abs(r))


def rational_symbol_classify(h: ex.RationalSymbol, a=None, beta=None) -> AxisBehaviour:
    """Classify ``h = P/Q`` on the imaginary axis.

    ``a`` and ``beta`` are accepted for interface symmetry; the classification
    depends on ``h`` alone.
    """
    if h.is_zero:
        return AxisBehaviour("square_integrable_on_axis")
    axis = tuple(complex(r) for r in _roots(h.denominator) if _on_axis(complex(r)))
    if axis:
        return AxisBehaviour("axis_pole", math.inf, axis)
    dp, dq = h.deg_num, h.deg_den
    if dq >= dp + 1:
        return AxisBehaviour("square_integrable_on_axis")
    if dp == dq:
        return AxisBehaviour("bounded_on_axis", abs(h.numerator[dp] / h.denominator[dq]))
    return AxisBehaviour("grows_on_axis", math.inf)


def interior_poles(h: ex.RationalSymbol) -> tuple:
    """Poles of ``h`` in the open right half-plane."""
    return tuple(complex(r) for r in _roots(h.denominator) if r.real > 0 and not _on_axis(complex(r)))


def angular_derivative(sym: SymbolPair) -> float:
    """``lim z / phi(z)`` at infinity: ``1/a``, or infinity when ``a = 0``."""
    if sym.slope == 0:
        return math.inf
    return float(1 / sym.slope)


def composition_bounded(sym: SymbolPair) -> bool:
    d = angular_derivative(sym)
    return 0 < d < math.inf


# ----------------------------------------------------------------- fast path


def classify_fast_path(spec: MonomialSpec, sym: SymbolPair) -> Optional[Verdict]:
    """Closed-form classification, or None when numerics must decide.

    Decides: invalid exponent or non-self-map or a weight pole on the closed
    half-plane (Unbounded); the zero weight, a square-integrable weight with
    ``a > 0, beta > 0``, and every rank-one case ``a = 0`` with a rational
    weight. Everything else (``beta = 0``, non-rational weights, weights with a
    nonzero limit at infinity) is left to the measure tests.
    """
    ev = {"slope": str(sym.slope), "intercept": str(sym.intercept)}
    if spec.b <= Fraction(-1, 2):
        return Verdict(VerdictClass.UNBOUNDED, "exponent_out_of_range", ev)
    h = sym.rational
    if h is not None and h.is_zero:
        return Verdict(VerdictClass.COMPACT, "zero_weight", ev)
    if not self_map_check(sym):
        return Verdict(VerdictClass.UNBOUNDED, "not_self_map", ev)
    if h is None:
        return None
    axis = rational_symbol_classify(h, sym.slope, sym.intercept)
    ev["axis"] = axis.kind
    if axis.kind == "axis_pole":
        ev["poles"] = [_cstr(p) for p in axis.poles]
        return Verdict(VerdictClass.UNBOUNDED, "axis_pole", ev)
    inside = interior_poles(h)
    if inside:
        # h * (k_w o phi) would have to vanish at each pole for every kernel
        ev["poles"] = [_cstr(p) for p in inside]
        return Verdict(VerdictClass.UNBOUNDED, "interior_pole", ev)
    if sym.slope == 0:
        # W f = h * f(beta): rank one, bounded iff h is in H^2
        if axis.kind == "square_integrable_on_axis":
            return Verdict(VerdictClass.COMPACT, "rank_one", ev)
        return Verdict(VerdictClass.UNBOUNDED, "rank_one_weight_not_h2", ev)
    if sym.intercept > 0 and axis.kind == "square_integrable_on_axis":
        return Verdict(VerdictClass.COMPACT, "square_integrable_weight", ev)
    return None


def _cstr(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"
