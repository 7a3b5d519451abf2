"""From L^2(0,1) to the Hardy space of the right half-plane.

``x = exp(-t)`` gives the isometry ``Jf(t) = exp(-t/2) f(exp(-t))`` onto
L^2(0, inf), and the Laplace transform then sends ``exp(-(n + 1/2) t)`` to the
reproducing kernel ``k_{n+1/2}(s) = 1/(s + n + 1/2)``.

Inner products on H^2 use ``<F, G> = (1/2pi) int F(iy) conj(G(iy)) dy``, under
which ``<k_w, k_z> = 1/(z + conj(w))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import expr as ex
from .measure import LineMeasure
from .quadrature import integrate, integrate_half_line, integrate_line
from .symbols import MonomialSpec, SymbolPair, rational_symbol_classify

INNER_RTOL = 1e-12
Y_MAX = 1e4


class AccuracyWarning(UserWarning):
    pass


# ---------------------------------------------------------------- isometry J


def j_forward(f: Callable, t):
    """``Jf(t) = exp(-t/2) f(exp(-t))``."""
    t = np.asarray(t, dtype=float)
    return np.exp(-t / 2) * f(np.exp(-t))


def j_inverse(g: Callable, x):
    """``J^{-1} g(x) = g(-log x) / sqrt(x)`` on (0, 1)."""
    x = np.asarray(x, dtype=float)
    return g(-np.log(x)) / np.sqrt(x)


# ------------------------------------------------------------------ kernels


@dataclass(frozen=True)
class KernelVector:
    """``k_w(s) = 1/(s + conj(w))`` for ``Re w > 0``."""

    w: complex

    def __post_init__(self):
        if not complex(self.w).real > 0:
            raise ValueError(f"kernel parameter must have positive real part, got {self.w}")

    def __call__(self, s):
        return 1 / (s + np.conj(complex(self.w)))


@dataclass(frozen=True)
class KernelSpan:
    """Finite combination ``sum c_j k_{w_j}``."""

    terms: tuple = ()

    @classmethod
    def of(cls, *pairs) -> "KernelSpan":
        return cls(tuple((complex(c), KernelVector(complex(w))) for c, w in pairs))

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        for c, k in self.terms:
            out = out + c * k(s)
        return out

    def __add__(self, other: "KernelSpan") -> "KernelSpan":
        return KernelSpan(self.terms + other.terms)

    def scaled(self, c) -> "KernelSpan":
        return KernelSpan(tuple((c * a, k) for a, k in self.terms))

    def gram(self) -> np.ndarray:
        w = np.array([complex(k.w) for _, k in self.terms])
        # G[i, j] = <k_{w_i}, k_{w_j}> = 1/(w_j + conj(w_i))
        return 1 / (w[None, :] + np.conj(w)[:, None])

    def norm(self) -> float:
        return math.sqrt(max(h2_inner(self, self).real, 0.0))

    def boundary(self) -> "BoundaryFunction":
        return BoundaryFunction(lambda y: self(1j * y))


@dataclass(frozen=True)
class BoundaryFunction:
    """An H^2 function known through its values ``F(iy)`` on the axis."""

    fn: Callable

    def __call__(self, y):
        return self.fn(np.asarray(y, dtype=float))

    def sample(self, grid: Optional[np.ndarray] = None) -> "BoundarySamples":
        y = boundary_grid() if grid is None else np.asarray(grid, dtype=float)
        return BoundarySamples(y, np.asarray(self(y), dtype=complex))


@dataclass(frozen=True)
class BoundarySamples:
    y: np.ndarray
    values: np.ndarray

    def to_csv(self, fh):
        fh.write("y,re,im\n")
        for y, v in zip(self.y, self.values):
            fh.write(f"{float(y)!r},{float(v.real)!r},{float(v.imag)!r}\n")


def boundary_grid(y_min: float = 1e-4, y_max: float = Y_MAX, n: int = 4096) -> np.ndarray:
    """Symmetric grid, geometric in ``|y|`` between ``y_min`` and ``y_max``."""
    half = np.geomspace(y_min, y_max, n // 2)
    return np.concatenate([-half[::-1], half])


def h2_inner(F, G, max_depth: int = 48) -> complex:
    """``<F, G>`` in H^2 of the right half-plane.

    Two kernel spans use the closed form. Anything else is integrated over the
    whole axis by quadrature after a tan substitution, so there is no
    truncation at a finite ``Y_MAX``; an :class:`AccuracyWarning` is issued
    if the quadrature fails to converge within ``max_depth`` bisections.
    """
    if isinstance(F, KernelSpan) and isinstance(G, KernelSpan):
        if not F.terms or not G.terms:
            return 0j
        a = np.array([c for c, _ in F.terms])
        b = np.array([c for c, _ in G.terms])
        w = np.array([complex(k.w) for _, k in F.terms])
        z = np.array([complex(k.w) for _, k in G.terms])
        return complex(np.sum(a[:, None] * np.conj(b)[None, :] / (z[None, :] + np.conj(w)[:, None])))
    Fb = F.boundary() if isinstance(F, KernelSpan) else F
    Gb = G.boundary() if isinstance(G, KernelSpan) else G

    def integrand(y):
        return Fb(y) * np.conj(Gb(y)) / (2 * math.pi)

    re, ok_re = integrate_line(lambda y: integrand(y).real, rtol=INNER_RTOL, max_depth=max_depth)
    im, ok_im = integrate_line(lambda y: integrand(y).imag, rtol=INNER_RTOL, max_depth=max_depth)
    if not (ok_re and ok_im):
        warnings.warn("H^2 inner product quadrature did not converge", AccuracyWarning, stacklevel=2)
    return complex(re, im)


def laplace_numeric(g: Callable, s: complex) -> complex:
    """``int_0^inf g(t) exp(-s t) dt`` by quadrature."""
    re, _ = integrate_half_line(lambda t: (g(t) * np.exp(-s * t)).real)
    im, _ = integrate_half_line(lambda t: (g(t) * np.exp(-s * t)).imag)
    return complex(re, im)


def polynomial_image(coeffs: Sequence) -> KernelSpan:
    """H^2 image of ``sum a_n x^n``: ``sum a_n k_{n + 1/2}``."""
    return KernelSpan.of(*((a, n + 0.5) for n, a in enumerate(coeffs) if a != 0))


def l2_norm_unit_interval(f: Callable) -> float:
    val, _ = integrate(lambda x: np.abs(f(x)) ** 2, 0.0, 1.0, rtol=1e-13)
    return math.sqrt(val)


def l2_norm_half_line(g: Callable) -> float:
    val, _ = integrate_half_line(lambda t: np.abs(g(t)) ** 2, rtol=1e-13)
    return math.sqrt(val)


# ---------------------------------------------------------- operator action


def kernel_image(c: complex, p: complex) -> KernelSpan:
    """Image of ``k_{n+1/2}`` under T0 when ``T x^n = c x^p``."""
    if c == 0:
        return KernelSpan()
    return KernelSpan.of((c, np.conj(complex(p)) + 0.5))


def t0_on_kernels(spec: MonomialSpec, n: int) -> KernelSpan:
    return kernel_image(spec.c(n), complex(spec.p(n)))


def weighted_comp_apply(h, phi, F) -> BoundaryFunction:
    """Boundary values of ``h * (F o phi)``.

    ``h`` is a ComplexExpr, a RationalSymbol or a callable; ``phi`` a SymbolPair
    or a callable; ``F`` a KernelSpan (evaluated in closed form off the axis)
    or any callable analytic on the image of ``phi``.
    """
    hf = (lambda s: ex.evaluate(h, s)) if isinstance(h, ex.ComplexExpr) else h
    pf = phi.phi if isinstance(phi, SymbolPair) else phi
    if isinstance(F, BoundaryFunction):
        raise TypeError("F must be evaluable off the axis (a KernelSpan or an analytic callable)")

    def fn(y):
        s = 1j * np.asarray(y, dtype=float)
        return hf(s) * F(pf(s))

    return BoundaryFunction(fn)


@dataclass(frozen=True)
class AdjointCheck:
    lhs: complex
    rhs: complex
    residual: float
    route: str


def adjoint_identity_check(spec: MonomialSpec, sym: SymbolPair, u, v) -> AdjointCheck:
    """Compare ``<T0 k_u, k_v>`` with ``<k_u, W k_v>`` for ``u = n + 1/2``.

    The left side uses ``c_n`` and ``p_n`` in closed form. The right side is a
    boundary integral when ``h * (k_v o phi)`` is square integrable on the
    axis, and otherwise the reproducing identity ``conj((W k_v)(u))``.
    """
    n2 = Fraction(u) - Fraction(1, 2)
    if n2.denominator != 1 or n2 < 0:
        raise ValueError(f"u must be n + 1/2 for an integer n >= 0, got {u}")
    n = int(n2)
    v = complex(v)
    if not v.real > 0:
        raise ValueError("v must lie in the open right half-plane")
    image = t0_on_kernels(spec, n)
    kv = KernelSpan.of((1, v))
    lhs = h2_inner(image, kv)
    if sym.weight is None:
        raise ValueError("the weight has no closed form")
    if _boundary_route_ok(sym, v):
        Wkv = weighted_comp_apply(sym.weight, sym, kv)
        rhs = h2_inner(KernelSpan.of((1, float(u))), Wkv)
        route = "quadrature"
    else:
        s = complex(float(u))
        rhs = complex(np.conj(ex.evaluate(sym.weight, s) * kv(sym.phi(s))))
        route = "reproducing"
    return AdjointCheck(lhs, rhs, abs(lhs - rhs), route)


def _boundary_route_ok(sym: SymbolPair, v: complex) -> bool:
    h = sym.rational
    if h is None:
        return False
    if h.is_zero:
        return True
    axis = rational_symbol_classify(h)
    if axis.kind in ("axis_pole", "grows_on_axis"):
        return False
    # k_v(phi(iy)) is singular on the axis iff Re phi = -Re v there
    return float(sym.intercept) + v.real > 0


class NormIdentity(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def normid_check(sym: SymbolPair, F: KernelSpan) -> NormIdentity:
    """``||W F||^2`` on the axis versus ``(1/2pi) int |F|^2 dmu``.

    The left side integrates ``|h(iy) F(phi(iy))|^2`` in ``y``; the right side
    integrates ``|F|^2`` over the line measure in the line coordinate, with a
    different quadrature map.
    """
    if not F.terms:
        return NormIdentity(0.0, 0.0, 0.0)
    WF = weighted_comp_apply(sym.weight, sym, F)
    lhs = h2_inner(WF, WF).real
    m = LineMeasure.from_symbols(sym)
    rhs = m.integrate(lambda z: np.abs(F(z)) ** 2) / (2 * math.pi)
    scale = max(abs(lhs), abs(rhs))
    residual = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return NormIdentity(lhs, rhs, residual)
