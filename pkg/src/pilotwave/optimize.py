"""Derivative-free bounded scalar minimization (golden section + parabolic steps)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))


@dataclass
class MinimizeResult:
    x: float
    fun: float
    nfev: int
    converged: bool
    trace: list[tuple[float, float]] = field(default_factory=list)


def brent_minimize(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    xtol: float = 1e-6,
    max_iter: int = 500,
) -> MinimizeResult:
    """Brent's method on [lower, upper].

    Stops when the bracket around the best point is within ``xtol`` (absolute,
    plus a tiny relative term).  Every evaluation is recorded in ``trace``.
    """
    if not lower < upper:
        raise ValueError(f"need lower < upper, got [{lower}, {upper}]")
    if xtol <= 0:
        raise ValueError("xtol must be > 0")

    trace: list[tuple[float, float]] = []

    def fx_of(x):
        v = float(f(x))
        trace.append((x, v))
        return v

    a, b = lower, upper
    x = w = v = a + GOLDEN * (b - a)
    fx = fw = fv = fx_of(x)
    d = e = 0.0
    converged = False

    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        tol1 = 1e-12 * abs(x) + xtol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - mid) <= tol2 - 0.5 * (b - a):
            converged = True
            break

        parabolic = False
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            e_prev, e = e, d
            if abs(p) < abs(0.5 * q * e_prev) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if (u - a) < tol2 or (b - u) < tol2:
                    d = tol1 if x < mid else -tol1
                parabolic = True
        if not parabolic:
            e = (b - x) if x < mid else (a - x)
            d = GOLDEN * e

        u = x + (d if abs(d) >= tol1 else math.copysign(tol1, d))
        fu = fx_of(u)

        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu

    return MinimizeResult(x=x, fun=fx, nfev=len(trace), converged=converged, trace=trace)
