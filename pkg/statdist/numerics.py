"""Quadrature, root finding and angle helpers shared by the distance modules"""

import math
from collections.abc import Callable
from typing import NamedTuple

import numpy as np

from statdist import BISECT_TOL, CLAMP_TOL, QUAD_MAX_DEPTH, QUAD_TOL
from statdist.errors import BracketError, ClampError


class Quadrature(NamedTuple):
    value: float
    error: float
    evaluations: int
    integrand_min: float | None
    integrand_max: float | None


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> Quadrature:
    """Adaptive Simpson's rule with interval bisection.

    Each half inherits half the tolerance; accepted panels get the Richardson
    correction (S2 - S1) / 15. Returns the integral with its error estimate,
    the number of integrand evaluations and the extrema of the sampled values.
    """
    if a == b:
        return Quadrature(0.0, 0.0, 0, None, None)
    if a > b:
        q = adaptive_simpson(f, b, a, tol, max_depth)
        return q._replace(value=-q.value)

    seen: list[float] = []

    def g(x: float) -> float:
        y = f(x)
        seen.append(y)
        return y

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, depth, tol) -> tuple[float, float]:
        m = (a + b) / 2.0
        h = (b - a) / 4.0
        flm = g((a + m) / 2.0)
        frm = g((m + b) / 2.0)
        left = simpson(fa, flm, fm, h)
        right = simpson(fm, frm, fb, h)
        delta = (left + right - whole) / 15.0
        if depth >= max_depth or abs(delta) <= tol:
            return left + right + delta, abs(delta)
        lv, le = recurse(a, m, fa, flm, fm, left, depth + 1, tol / 2.0)
        rv, re = recurse(m, b, fm, frm, fb, right, depth + 1, tol / 2.0)
        return lv + rv, le + re

    fa, fm, fb = g(a), g((a + b) / 2.0), g(b)
    whole = simpson(fa, fm, fb, (b - a) / 2.0)
    value, error = recurse(a, b, fa, fm, fb, whole, 0, tol)
    finite = [y for y in seen if math.isfinite(y)]
    return Quadrature(
        value,
        error,
        len(seen),
        min(finite) if finite else None,
        max(finite) if finite else None,
    )


def arcsine_substitution(
    f: Callable[[float], float], a: float, b: float
) -> Callable[[float], float]:
    """Integrand in φ for θ = mid + half·sin φ on [-π/2, π/2].

    The cos φ Jacobian vanishes at both ends, which absorbs 1/√(θ - a) type
    endpoint singularities; the endpoints themselves are never evaluated.
    """
    mid = (a + b) / 2.0
    half = (b - a) / 2.0

    def g(phi: float) -> float:
        jacobian = half * math.cos(phi)
        if abs(phi) >= math.pi / 2 or jacobian <= 0.0:
            return 0.0
        theta = min(max(mid + half * math.sin(phi), a), b)
        return f(theta) * jacobian

    return g


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> Quadrature:
    """∫_a^b f with the arcsine substitution applied"""
    if a == b:
        return Quadrature(0.0, 0.0, 0, None, None)
    g = arcsine_substitution(f, min(a, b), max(a, b))
    q = adaptive_simpson(g, -math.pi / 2, math.pi / 2, tol, max_depth)
    sign = 1.0 if b > a else -1.0
    return q._replace(value=sign * q.value)


def bisect(
    g: Callable[[float], float], lo: float, hi: float, tol: float = BISECT_TOL
) -> float:
    """Smallest x in [lo, hi] (to within tol) with g(x) >= 0.

    Requires g(lo) < 0 <= g(hi) and g monotone between them; the returned
    point always satisfies g(x) >= 0.
    """
    if g(lo) >= 0:
        return lo
    if g(hi) < 0:
        raise BracketError(lo, hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if mid <= lo or mid >= hi:
            break
        if g(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def clamped_arccos(x: float) -> float:
    if x > 1.0 + CLAMP_TOL or x < -1.0 - CLAMP_TOL:
        raise ClampError(x)
    return math.acos(min(1.0, max(-1.0, x)))


def angle_between(u: np.ndarray, v: np.ndarray) -> float:
    """arccos of Re⟨u, v⟩ for unit vectors u, v.

    Small angles come from the chord ‖u − v‖ = 2 sin(angle/2), which keeps
    full precision where arccos near 1 would not.
    """
    affinity = float(np.vdot(u, v).real)
    if affinity > 1.0 + CLAMP_TOL or affinity < -1.0 - CLAMP_TOL:
        raise ClampError(affinity)
    if affinity >= 0.5:
        chord = float(np.linalg.norm(u - v))
        return 2.0 * math.asin(min(1.0, chord / 2.0))
    return clamped_arccos(affinity)
