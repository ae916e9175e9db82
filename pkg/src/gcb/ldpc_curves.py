"""Closed-form diagonal entropy curves for (d_L, d_R)-regular parity-check graphs.

The tilt parameter s is the natural coordinate: theta is the log of the
even-weight enumerator under the tilt, omega its normalized derivative
(strictly increasing in s), and h the per-symbol induced entropy along the
constant-marginal line.  The same h also gives the asymptotic growth rate
of the ensemble-average weight enumerator at relative weight omega(s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG2 = math.log(2.0)


def _even_weight_logterms(d_r: int, s: float) -> np.ndarray:
    ws = np.arange(0, d_r + 1, 2)
    return np.array([math.lgamma(d_r + 1) - math.lgamma(w + 1) - math.lgamma(d_r - w + 1) + s * w for w in ws]), ws


def theta(d_r: int, s: float) -> float:
    """log sum over even w of C(d_R, w) exp(s w), via log-sum-exp."""
    if d_r < 2:
        raise ValueError("d_R must be at least 2")
    terms, _ = _even_weight_logterms(d_r, s)
    mx = terms.max()
    return float(mx + math.log(np.exp(terms - mx).sum()))


def omega_of_s(d_r: int, s: float) -> float:
    """Mean weight of the tilted even-weight distribution, divided by d_R."""
    if d_r < 2:
        raise ValueError("d_R must be at least 2")
    terms, ws = _even_weight_logterms(d_r, s)
    mx = terms.max()
    p = np.exp(terms - mx)
    return float((p * ws).sum() / (p.sum() * d_r))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)


@dataclass
class RegularCurvePoint:
    s: float
    omega: float
    h_nats: float
    d2h_domega2: float | None = None

    @property
    def h_bits(self) -> float:
        return self.h_nats / LOG2


def h_curve(d_l: int, d_r: int, s: float) -> RegularCurvePoint:
    """Per-symbol induced entropy along the constant-marginal diagonal.

    h = -(d_L - 1) h2(omega) - d_L s omega + (d_L / d_R) theta, in nats.
    """
    if not 2 <= d_l < d_r:
        raise ValueError("need 2 <= d_L < d_R")
    w = omega_of_s(d_r, s)
    h = -(d_l - 1) * binary_entropy(w) - d_l * s * w + (d_l / d_r) * theta(d_r, s)
    return RegularCurvePoint(s, w, h)


def s_of_omega(d_r: int, target: float, tol: float = 1e-12) -> float:
    """Invert omega(s) by bisection; valid for target strictly inside (0, 1)."""
    if not 0 < target < 1:
        raise ValueError("omega must be strictly inside (0, 1)")
    lo, hi = -1.0, 1.0
    while omega_of_s(d_r, lo) > target:
        lo *= 2
        if lo < -1e6:
            raise ValueError("bisection bracket failed")
    while omega_of_s(d_r, hi) < target:
        hi *= 2
        if hi > 1e6:
            raise ValueError("bisection bracket failed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if omega_of_s(d_r, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class CurveShapeReport:
    points: list
    negative_near_zero: bool
    min_h_nats: float
    peak_omega: float
    peak_h_nats: float
    convex_intervals: list
    concave_intervals: list


def curve_scan(d_l: int, d_r: int, s_min: float, s_max: float, steps: int) -> CurveShapeReport:
    """Uniform s-grid of curve points plus a shape report.

    Curvature of h as a function of omega is flagged from second
    differences on the (omega, h) samples; intervals are reported as
    (omega_lo, omega_hi) spans where the sign is stable beyond a 1e-9
    threshold.
    """
    if steps < 3:
        raise ValueError("steps must be at least 3")
    grid = np.linspace(s_min, s_max, steps)
    points = [h_curve(d_l, d_r, float(s)) for s in grid]

    omegas = np.array([p.omega for p in points])
    hs = np.array([p.h_nats for p in points])
    second = np.full(len(points), np.nan)
    for i in range(1, len(points) - 1):
        w0, w1, w2 = omegas[i - 1], omegas[i], omegas[i + 1]
        if w2 - w0 <= 0:
            continue
        # divided differences handle the non-uniform omega spacing
        d1 = (hs[i] - hs[i - 1]) / (w1 - w0)
        d2 = (hs[i + 1] - hs[i]) / (w2 - w1)
        second[i] = 2.0 * (d2 - d1) / (w2 - w0)
        points[i].d2h_domega2 = float(second[i])

    threshold = 1e-9
    convex, concave = [], []
    run_sign = 0
    run_start = None
    for i in range(1, len(points) - 1):
        sign = 0
        if second[i] > threshold:
            sign = 1
        elif second[i] < -threshold:
            sign = -1
        if sign != run_sign:
            if run_sign != 0 and run_start is not None:
                span = (float(omegas[run_start]), float(omegas[i - 1]))
                (convex if run_sign > 0 else concave).append(span)
            run_sign = sign
            run_start = i if sign != 0 else None
    if run_sign != 0 and run_start is not None:
        span = (float(omegas[run_start]), float(omegas[len(points) - 2]))
        (convex if run_sign > 0 else concave).append(span)

    small = [p for p in points if 0 < p.omega <= 0.02]
    negative_near_zero = bool(small) and all(p.h_nats < 0 for p in small)
    peak = max(points, key=lambda p: p.h_nats)
    return CurveShapeReport(
        points=points,
        negative_near_zero=negative_near_zero,
        min_h_nats=float(hs.min()),
        peak_omega=peak.omega,
        peak_h_nats=peak.h_nats,
        convex_intervals=convex,
        concave_intervals=concave,
    )


def curve_csv(report: CurveShapeReport) -> str:
    lines = ["s,omega,h_nats,h_bits,d2h_domega2"]
    for p in report.points:
        d2 = "" if p.d2h_domega2 is None else f"{p.d2h_domega2:.12g}"
        lines.append(f"{p.s:.12g},{p.omega:.12g},{p.h_nats:.12g},{p.h_bits:.12g},{d2}")
    return "\n".join(lines) + "\n"
