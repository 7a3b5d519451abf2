"""Adaptive Gauss-Legendre quadrature, vectorized over many intervals.

Each interval is integrated with a 15-point Gauss panel and compared against
the sum over its two halves; intervals that disagree are bisected. All
intervals at one bisection level are evaluated in a single call to the
integrand, so ``f`` must accept and return numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NODES, WEIGHTS = np.polynomial.legendre.leggauss(15)
ABS_FLOOR = 1e-15


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray
    converged: np.ndarray
    panels: int


def _panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x))
    acc = fx[:, 0] * WEIGHTS[0]
    for k in range(1, NODES.size):
        acc = acc + fx[:, k] * WEIGHTS[k]
    return half * acc


def integrate_many(f, a, b, rtol=1e-10, atol=ABS_FLOOR, max_depth=48) -> QuadResult:
    """Integrate ``f`` over each ``[a[k], b[k]]``.

    ``f`` receives a 2-D array of abscissae and must return values of the same
    shape (real or complex). Results are accumulated per interval in a fixed
    order, so repeated calls are bit-identical.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    n = a.size
    owner = np.arange(n)
    lo, hi = a.copy(), b.copy()
    whole = _panel(f, lo, hi)
    total = np.zeros(n, dtype=whole.dtype)
    converged = np.ones(n, dtype=bool)
    # scale for the relative test is the coarse estimate of the whole interval
    scale = np.where(np.isfinite(whole), np.abs(whole), 0.0)
    coarse = whole
    panels = n
    for depth in range(max_depth + 1):
        if owner.size == 0:
            break
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        panels += 2 * owner.size
        fine = left + right
        err = np.abs(fine - coarse)
        width_frac = (hi - lo) / np.maximum(b[owner] - a[owner], np.finfo(float).tiny)
        tol = np.maximum(rtol * np.maximum(scale[owner], np.abs(fine)), atol * width_frac)
        ok = np.isfinite(err) & (err <= tol)
        done = ok | (hi - lo <= 4 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi)))
        if depth == max_depth:
            done[:] = True
        converged[owner[done & ~ok]] = False
        np.add.at(total, owner[done], fine[done])
        keep = ~done
        owner = np.concatenate([owner[keep], owner[keep]])
        lo, hi = (
            np.concatenate([lo[keep], mid[keep]]),
            np.concatenate([mid[keep], hi[keep]]),
        )
        coarse = np.concatenate([left[keep], right[keep]])
    return QuadResult(total, converged, panels)


def integrate(f, a, b, rtol=1e-10, atol=ABS_FLOOR, max_depth=48):
    """Scalar convenience wrapper; returns ``(value, converged)``."""
    res = integrate_many(f, [a], [b], rtol=rtol, atol=atol, max_depth=max_depth)
    return res.value[0], bool(res.converged[0])


def integrate_line(g, rtol=1e-10, atol=ABS_FLOOR, pieces=16, max_depth=48, mapping="tan"):
    """Integrate ``g`` over the whole real line without truncation.

    ``mapping="tan"`` uses ``y = tan(theta)`` on (-pi/2, pi/2);
    ``mapping="algebraic"`` uses ``y = u / (1 - u**2)`` on (-1, 1). Either map
    turns a ``1/y**2`` tail into a bounded integrand. ``g`` receives arrays of
    ``y``. Returns ``(value, converged)``; a non-integrable tail shows up as
    ``converged = False``.
    """
    if mapping == "tan":
        def mapped(theta):
            y = np.tan(theta)
            with np.errstate(all="ignore"):
                return g(y) / np.cos(theta) ** 2

        lo, hi = -math.pi / 2, math.pi / 2
    elif mapping == "algebraic":
        def mapped(u):
            w = 1 - u * u
            with np.errstate(all="ignore"):
                return g(u / w) * (1 + u * u) / (w * w)

        lo, hi = -1.0, 1.0
    else:
        raise ValueError(f"unknown mapping {mapping!r}")
    edges = np.linspace(lo, hi, pieces + 1)
    res = integrate_many(mapped, edges[:-1], edges[1:], rtol=rtol, atol=atol, max_depth=max_depth)
    value = pairwise_sum(res.value)
    return value, bool(res.converged.all()) and bool(np.isfinite(value))


def integrate_half_line(g, rtol=1e-10, atol=ABS_FLOOR, pieces=8, max_depth=48):
    """Integrate ``g`` over ``[0, inf)`` through ``t = tan(theta)``."""
    def mapped(theta):
        t = np.tan(theta)
        with np.errstate(all="ignore"):
            return g(t) / np.cos(theta) ** 2

    edges = np.linspace(0.0, math.pi / 2, pieces + 1)
    res = integrate_many(mapped, edges[:-1], edges[1:], rtol=rtol, atol=atol, max_depth=max_depth)
    value = pairwise_sum(res.value)
    return value, bool(res.converged.all()) and bool(np.isfinite(value))


def pairwise_sum(x):
    """Sum with a fixed binary tree shape (order-independent of callers)."""
    x = list(np.ravel(x))
    if not x:
        return 0.0
    while len(x) > 1:
        nxt = [x[k] + x[k + 1] for k in range(0, len(x) - 1, 2)]
        if len(x) % 2:
            nxt.append(x[-1])
        x = nxt
    return x[0]
