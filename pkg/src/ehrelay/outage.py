"""Closed-form system outage probabilities for the adaptive relay schemes.

For the per-channel power-splitting scheme the success probability splits
into four disjoint cases by comparing each gain against its decode knee
(below the knee a link cannot ride on its own harvested energy alone).
Cases 1 to 3 reduce to one-dimensional integrals or a pure exponential; the
fourth is the probability mass of a region bounded by two hyperbola-like
broadcast-feasibility curves and two knee lines, handled by classifying the
curve intersections into scenarios first.

For the jointly optimized scheme the outage collapses, after a change of
variables to the combined uplink rate t2 = g_A/Z_A + g_B/Z_B and the product
term t3 = 1/(g_A*g_B), to a single quadrature over t3 with the t2 mass
inside a decode window.  The two variables are treated as independent,
which is the approximation the tolerance tests measure.

All remaining integrals use the same fixed-order Gauss-Chebyshev rule as
the published expressions, so quadrature order is a visible model knob, not
an implementation detail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import numerics
from .model import DerivedConstants, SystemParams, derive_constants
from .numerics import QuadratureRule, integrate_gc


class Scenario(enum.Enum):
    """Layout of the case-four success region relative to its bounding box."""

    One = "empty"
    TwoLow = "single-curve, A-side boundary"
    TwoHigh = "single-curve, B-side boundary"
    ThreeLow = "two-curve, A-side crossing"
    ThreeHigh = "two-curve, B-side crossing"


@dataclass(frozen=True)
class CaseFourGeometry:
    """Intersection points of the four region boundaries, plus the scenario.

    x coordinates live on the A-gain axis, y coordinates on the B-gain axis.
    x1/y1 are the knee lines; q1/q2, x_delta/y_delta, and x_plus/y_plus are
    where the two broadcast-feasibility curves meet the knees and each other.
    """

    x1: float
    y1: float
    q1: float
    q2: float
    x_delta: float
    y_delta: float
    x_plus: float
    y_plus: float
    scenario: Scenario


def _boundary_gain_a(consts: DerivedConstants, gain_b: float) -> float:
    """Smallest A gain that keeps the B-bound broadcast decodable, given g_B."""
    return consts.c_a / gain_b + consts.e_a - consts.d_ratio_a * gain_b


def _boundary_gain_b(consts: DerivedConstants, gain_a: float) -> float:
    """Smallest B gain that keeps the A-bound broadcast decodable, given g_A."""
    return consts.c_b / gain_a + consts.e_b - consts.d_ratio_b * gain_a


def _knee_crossing_b(consts: DerivedConstants) -> float:
    """B gain above which the A-side broadcast boundary sinks under A's knee.

    Positive root of boundary_gain_a(g_B) = delta_a; the same point bounds
    the curved edge of the case-four region on the B axis.
    """
    gap = consts.e_a - consts.delta_a
    return (gap + math.sqrt(gap * gap + 4.0 * consts.d_ratio_a * consts.c_a)) \
        / (2.0 * consts.d_ratio_a)


def _knee_crossing_a(consts: DerivedConstants) -> float:
    """Mirror of _knee_crossing_b: boundary_gain_b(g_A) = delta_b root."""
    gap = consts.e_b - consts.delta_b
    return (gap + math.sqrt(gap * gap + 4.0 * consts.d_ratio_b * consts.c_b)) \
        / (2.0 * consts.d_ratio_b)


def _rule(params: SystemParams) -> QuadratureRule:
    return QuadratureRule.build(params.quad_order)


def _clamp_unit(value: float) -> float:
    return float(min(max(value, 0.0), 1.0))


_PANEL_RATIO = 16.0
_DEAD_EXPONENT = 45.0


def _exp_curve_integral(rule: QuadratureRule, c_over: float, k_lin: float,
                        lo: float, hi: float) -> float:
    """Integral of exp(-(c_over/y + k_lin*y)) over (lo, hi).

    The quadrature rule's node layout cannot represent constants exactly, so
    feeding it the raw integrand costs a relative error near 1.7e-2 at order
    five regardless of smoothness.  Instead the exponent's chord on each
    panel is integrated in closed form and the rule sees only the bowing
    between curve and chord, which vanishes at panel edges.  The 1/y term
    also packs structure into layers narrower than any node spacing near the
    low end, so panels shrink geometrically toward it.
    """
    if not hi > lo:
        return 0.0
    if c_over == 0.0:
        # Pure exponential: the chord is the exponent itself.
        if k_lin == 0.0:
            return hi - lo
        return math.exp(-k_lin * lo) \
            * -math.expm1(-k_lin * (hi - lo)) / k_lin
    if lo <= 0.0:
        # The integrand underflows long before the pole; nudge off it.
        lo = min(hi, c_over / _DEAD_EXPONENT) * 2.0 ** -52

    def exponent(y: float) -> float:
        return c_over / y + k_lin * y

    # Panel edges, descending from hi to lo.  Below `floor` the 1/y term
    # alone keeps the integrand under exp(-45), so one panel suffices there.
    floor = min(hi, max(lo, c_over / _DEAD_EXPONENT))
    edges = [hi]
    while edges[-1] > _PANEL_RATIO * floor:
        edges.append(edges[-1] / _PANEL_RATIO)
    if edges[-1] > floor:
        edges.append(floor)
    if lo < floor:
        edges.append(lo)

    total = 0.0
    for a, b in zip(edges[1:], edges[:-1]):
        g_a = exponent(a)
        g_b = exponent(b)
        d_g = g_b - g_a
        if d_g == 0.0:
            total += (b - a) * math.exp(-g_a)
        elif abs(d_g) <= 30.0:
            total += math.exp(-g_a) * -math.expm1(-d_g) * (b - a) / d_g
        else:
            total += (math.exp(-g_a) - math.exp(-g_b)) * (b - a) / d_g
        slope = d_g / (b - a)

        def bowing(y: float, a: float = a, g_a: float = g_a,
                   slope: float = slope) -> float:
            return math.exp(-exponent(y)) - math.exp(-(g_a + slope * (y - a)))

        total += integrate_gc(rule, a, b, bowing)
    return total


def p_case1(params: SystemParams, consts: DerivedConstants) -> float:
    """Success mass of the strip where only the A gain clears its knee.

    The B gain runs between uplink feasibility and its knee; the A gain must
    clear both its own knee and the B-bound broadcast boundary.  Past the
    crossing where that boundary sinks under the knee the inner mass is a
    bare exponential, integrated in closed form; only the curved head goes
    through the quadrature rule.
    """
    lam_a = params.fading_mean_a
    lam_b = params.fading_mean_b
    lo = consts.varpi * consts.z_b
    hi = consts.delta_b
    if not hi > lo:
        return 0.0
    kink = min(max(_knee_crossing_b(consts), lo), hi)
    head = math.exp(-consts.e_a / lam_a) / lam_b \
        * _exp_curve_integral(_rule(params), consts.c_a / lam_a,
                              1.0 / lam_b - consts.d_ratio_a / lam_a, lo, kink)
    tail = math.exp(-consts.delta_a / lam_a) \
        * (math.exp(-kink / lam_b) - math.exp(-hi / lam_b))
    return _clamp_unit(head + tail)


def p_case2(params: SystemParams, consts: DerivedConstants) -> float:
    """Mirror of p_case1 with the roles of the two terminals swapped."""
    lam_a = params.fading_mean_a
    lam_b = params.fading_mean_b
    lo = consts.varpi * consts.z_a
    hi = consts.delta_a
    if not hi > lo:
        return 0.0
    kink = min(max(_knee_crossing_a(consts), lo), hi)
    head = math.exp(-consts.e_b / lam_b) / lam_a \
        * _exp_curve_integral(_rule(params), consts.c_b / lam_b,
                              1.0 / lam_a - consts.d_ratio_b / lam_b, lo, kink)
    tail = math.exp(-consts.delta_b / lam_b) \
        * (math.exp(-kink / lam_a) - math.exp(-hi / lam_a))
    return _clamp_unit(head + tail)


def p_case3(params: SystemParams, consts: DerivedConstants) -> float:
    """Success mass where both gains clear their knees; exact, no quadrature."""
    return math.exp(-consts.delta_a / params.fading_mean_a
                    - consts.delta_b / params.fading_mean_b)


def case4_geometry(params: SystemParams, consts: DerivedConstants) -> CaseFourGeometry:
    """Locate every boundary intersection and classify the region layout.

    Classification order matters: the empty layout is ruled out first, then
    the single-curve layouts, and only then the two-curve ones.  Boundary
    ties use the comparisons exactly as written so results are deterministic.
    """
    x1 = consts.delta_a
    y1 = consts.delta_b
    q1 = _boundary_gain_b(consts, x1)
    q2 = _boundary_gain_a(consts, y1)

    # Larger quadratic root of each curve meeting the opposite knee line.
    x_delta = _knee_crossing_a(consts)
    y_delta = _knee_crossing_b(consts)

    c_sum = consts.c_a + consts.c_b
    x_plus = (consts.c_b * consts.e_a
              + math.sqrt(consts.c_b ** 2 * consts.e_a ** 2
                          + 4.0 * consts.d_ratio_a * consts.c_b ** 2 * c_sum)) \
        / (2.0 * c_sum)
    y_plus = _boundary_gain_b(consts, x_plus)

    points = (x1, y1, q1, q2, x_delta, y_delta, x_plus, y_plus)
    if any(math.isnan(v) for v in points):
        raise ArithmeticError(
            f"case-four geometry produced NaN intersection points: {points!r}")

    if max(q2, x_delta) >= x1 or max(q1, y_delta) >= y1:
        scenario = Scenario.One
    elif x_plus <= max(q2, x_delta) or x_plus >= x1:
        scenario = Scenario.TwoLow if y_delta >= q1 else Scenario.TwoHigh
    else:
        scenario = Scenario.ThreeLow if y_delta >= q1 else Scenario.ThreeHigh

    return CaseFourGeometry(x1=x1, y1=y1, q1=q1, q2=q2, x_delta=x_delta,
                            y_delta=y_delta, x_plus=x_plus, y_plus=y_plus,
                            scenario=scenario)


def p_case4(params: SystemParams, consts: DerivedConstants,
            geom: CaseFourGeometry) -> float:
    """Success mass of the box where neither gain clears its knee.

    Each non-empty layout is covered by one or two curve-bounded strips plus,
    in the two-curve A-side layout, the rectangle beyond the crossing point.
    """
    if geom.scenario is Scenario.One:
        return 0.0

    lam_a = params.fading_mean_a
    lam_b = params.fading_mean_b
    rule = _rule(params)

    def slab_a(gain_a: float, lo: float, hi: float) -> float:
        # P(g_A >= gain_a) * P(lo <= g_B < hi)
        return math.exp(-gain_a / lam_a) * (math.exp(-lo / lam_b)
                                            - math.exp(-hi / lam_b))

    def slab_b(gain_b: float, lo: float, hi: float) -> float:
        return math.exp(-gain_b / lam_b) * (math.exp(-lo / lam_a)
                                            - math.exp(-hi / lam_a))

    def strip_over_b(lo: float, hi: float, a_cap: float) -> float:
        # Mass of {lo <= g_B < hi, boundary_a(g_B) <= g_A < a_cap}.
        if not hi > lo:
            return 0.0
        part = math.exp(-consts.e_a / lam_a) / lam_b \
            * _exp_curve_integral(rule, consts.c_a / lam_a,
                                  1.0 / lam_b - consts.d_ratio_a / lam_a,
                                  lo, hi)
        return part - slab_a(a_cap, lo, hi)

    def strip_over_a(lo: float, hi: float, b_cap: float) -> float:
        # Mass of {lo <= g_A < hi, boundary_b(g_A) <= g_B < b_cap}.
        if not hi > lo:
            return 0.0
        part = math.exp(-consts.e_b / lam_b) / lam_a \
            * _exp_curve_integral(rule, consts.c_b / lam_b,
                                  1.0 / lam_a - consts.d_ratio_b / lam_b,
                                  lo, hi)
        return part - slab_b(b_cap, lo, hi)

    if geom.scenario is Scenario.TwoLow:
        value = strip_over_b(geom.y_delta, geom.y1, geom.x1)
    elif geom.scenario is Scenario.TwoHigh:
        value = strip_over_a(geom.x_delta, geom.x1, geom.y1)
    elif geom.scenario is Scenario.ThreeLow:
        corner = (math.exp(-geom.x_plus / lam_a) - math.exp(-geom.x1 / lam_a)) \
            * (math.exp(-geom.y_plus / lam_b) - math.exp(-geom.y1 / lam_b))
        value = corner \
            + strip_over_a(geom.x_delta, geom.x_plus, geom.y1) \
            + strip_over_b(geom.y_delta, geom.y_plus, geom.x1)
    else:
        value = strip_over_a(geom.x_plus, geom.x1, geom.y_plus) \
            + strip_over_b(geom.y_plus, geom.y1, geom.x1)

    return _clamp_unit(value)


def outage_dynamic_ps(params: SystemParams, theta: float) -> float:
    """System outage probability of the per-channel power-splitting scheme.

    The four case probabilities are quadrature approximations, so their sum
    can stray outside [0, 1] by the rule's truncation error; at order 2 the
    overshoot reaches the percent scale.  The result is clamped rather than
    rejected so convergence studies can evaluate deliberately coarse orders.
    """
    consts = derive_constants(params, theta)
    success = (p_case1(params, consts)
               + p_case2(params, consts)
               + p_case3(params, consts)
               + p_case4(params, consts, case4_geometry(params, consts)))
    return _clamp_unit(1.0 - success)


def cdf_t2(consts: DerivedConstants, t: float) -> float:
    """CDF of the combined uplink variable g_A/Z_A + g_B/Z_B.

    Distinct-rate and equal-rate closed forms; the distinct branch is
    rearranged around expm1 because the printed form cancels catastrophically
    when the two rates approach each other.
    """
    if t < 0.0:
        raise ValueError("cdf_t2 requires t >= 0")
    if t == 0.0:
        return 0.0
    if math.isinf(t):
        return 1.0
    rate_a = consts.a_rate_a
    rate_b = consts.a_rate_b
    gap = rate_a - rate_b
    if abs(gap) <= 1e-9 * max(rate_a, rate_b):
        return 1.0 - math.exp(-rate_b * t) - rate_b * t * math.exp(-rate_a * t)
    # exp(-rate_a*t) - exp(-rate_b*t), anchored on the smaller rate so the
    # expm1 argument is never positive.
    if rate_a <= rate_b:
        diff = -math.exp(-rate_a * t) * math.expm1(-(rate_b - rate_a) * t)
    else:
        diff = math.exp(-rate_b * t) * math.expm1(-(rate_a - rate_b) * t)
    return 1.0 - math.exp(-rate_b * t) + (rate_b / gap) * diff


def cdf_t3(consts: DerivedConstants, t: float) -> float:
    """CDF of the reciprocal gain product 1/(g_A*g_B)."""
    if not t > 0.0:
        raise ValueError("cdf_t3 requires t > 0")
    if math.isinf(t):
        return 1.0
    lam_a = consts.z_a / consts.a_rate_a
    lam_b = consts.z_b / consts.a_rate_b
    z = math.sqrt(4.0 / (lam_a * lam_b * t))
    return z * numerics.bessel_k1(z)


def improved_integration_bound(consts: DerivedConstants, gamma_th: float) -> float:
    """Largest t3 for which the decode window of t2 can be nonempty.

    The first candidate is the positive root of the window-collapse
    quadratic, written in the subtraction-free form; the second is where the
    broadcast bound blows up.  The root always lands at or below the second
    candidate, which is kept as a guard.
    """
    root = 2.0 / (math.sqrt(consts.b_o ** 2 + 4.0 * consts.a_o) + consts.b_o)
    return min(root, consts.y_big / gamma_th)


def _improved_window(consts: DerivedConstants, gamma_th: float,
                     t: float) -> tuple[float, float]:
    """Decode window (upper, lower) of t2 at a given t3 value."""
    upper = 1.0 / (consts.varpi * consts.z_a * consts.z_b * t) + consts.varpi
    den = 1.0 - (gamma_th / consts.y_big) * t
    lower = 2.0 * consts.varpi / den if den > 0.0 else math.inf
    return upper, lower


def _improved_window_mass(consts: DerivedConstants, gamma_th: float,
                          t: float) -> float:
    """Probability that t2 falls inside the decode window at t3 = t."""
    upper, lower = _improved_window(consts, gamma_th, t)
    return cdf_t2(consts, upper) - cdf_t2(consts, lower)


def _improved_window_mass_deriv(consts: DerivedConstants, gamma_th: float,
                                t: float) -> float:
    """Derivative in t of the window mass, in closed form.

    Only valid strictly inside (0, integration bound), where both window
    edges are finite.
    """
    upper, lower = _improved_window(consts, gamma_th, t)
    d_upper = -1.0 / (consts.varpi * consts.z_a * consts.z_b * t * t)
    den = 1.0 - (gamma_th / consts.y_big) * t
    d_lower = 2.0 * consts.varpi * (gamma_th / consts.y_big) / (den * den)
    rate_a = consts.a_rate_a
    rate_b = consts.a_rate_b
    gap = rate_a - rate_b
    if abs(gap) <= 1e-9 * max(rate_a, rate_b):
        return rate_a ** 2 * (d_upper * upper * math.exp(-rate_a * upper)
                              - d_lower * lower * math.exp(-rate_a * lower))
    scale = rate_a * rate_b / gap
    return scale * (d_upper * (math.exp(-rate_b * upper) - math.exp(-rate_a * upper))
                    - d_lower * (math.exp(-rate_b * lower) - math.exp(-rate_a * lower)))


def _quantile_t3(consts: DerivedConstants, v: float, t_hi: float) -> float:
    """Value of the reciprocal gain product whose CDF equals v, below t_hi."""
    hi = t_hi
    lo = 0.5 * t_hi
    while cdf_t3(consts, lo) > v:
        hi = lo
        lo *= 0.5
    return brentq(lambda t: cdf_t3(consts, t) - v, lo, hi,
                  xtol=1e-30, rtol=1e-15, maxiter=200)


def outage_improved(params: SystemParams) -> float:
    """System outage probability of the jointly optimized scheme.

    The success mass is the decode-window probability of the combined uplink
    variable integrated against the reciprocal-product density up to the
    window-collapse bound.  The quadrature runs on the probability scale of
    that density, not on the t3 axis: at realistic link budgets the density
    mass and the window collapse live many orders of magnitude apart, so a
    fixed rule placed directly in t3 samples only flat regions.  On the
    probability scale the rule integrates the deviation from full window
    mass, which keeps the exactly known tail term out of the quadrature sum
    and lets the default order resolve every regime the sweeps visit.

    Derived constants are evaluated at the symmetric allocation; every field
    this expression touches is independent of the allocation ratio.
    """
    consts = derive_constants(params, 0.5)
    gamma_th = params.snr_threshold
    if gamma_th == 0.0:
        return 0.0
    t_max = improved_integration_bound(consts, gamma_th)
    if not math.isfinite(t_max):
        return 0.0
    v_max = cdf_t3(consts, t_max)
    rule = _rule(params)

    def miss_at_quantile(v: float) -> float:
        t = _quantile_t3(consts, v, t_max)
        return 1.0 - _improved_window_mass(consts, gamma_th, t)

    missed = integrate_gc(rule, 0.0, v_max, miss_at_quantile)
    return _clamp_unit((1.0 - v_max) + missed)


def outage_capacity(params: SystemParams, p_out: float) -> float:
    """Throughput discounted by outage over the effective transmission time."""
    if not 0.0 <= p_out <= 1.0:
        raise ValueError("p_out must lie in [0, 1]")
    beta = params.time_split
    effective_time = min(beta * params.block_duration,
                         (1.0 - 2.0 * beta) * params.block_duration)
    return (1.0 - p_out) * params.rate_bps_hz * effective_time


def energy_outage(params: SystemParams, consts: DerivedConstants) -> float:
    """Probability that neither link delivers usable harvested power.

    A link is dead when its received RF power under the adaptive split stays
    below the rectenna sensitivity; a missing sensitivity means the ideal
    zero-threshold circuit.
    """
    level = consts.varpi + params.sensitivity_w / params.tx_power_w
    miss_a = -math.expm1(-consts.a_rate_a * level)
    miss_b = -math.expm1(-consts.a_rate_b * level)
    return miss_a * miss_b


def diversity_slope(params: SystemParams, scheme, snr_grid,
                    theta: float = 0.5) -> float:
    """Least-squares slope of -log10(outage) against log10(transmit SNR).

    snr_grid lists transmit-SNR points in dB, ascending, at least three of
    them; each point rescales the transmit power against the fixed noise
    floor.  scheme is "dynamic_ps", "improved", or a callable mapping params
    to an outage probability (used for synthetic slope checks).
    """
    grid = [float(v) for v in snr_grid]
    if len(grid) < 3:
        raise ValueError("snr_grid needs at least 3 points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("snr_grid must be strictly ascending")

    if callable(scheme):
        evaluate = scheme
    elif scheme == "dynamic_ps":
        def evaluate(p: SystemParams) -> float:
            return outage_dynamic_ps(p, theta)
    elif scheme == "improved":
        evaluate = outage_improved
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    decades = []
    neg_log_out = []
    for snr_db in grid:
        point = replace(params, tx_power_dbm=params.noise_dbm + snr_db)
        p_out = evaluate(point)
        if p_out <= 0.0:
            raise ValueError(f"outage is zero at {snr_db} dB; slope undefined")
        decades.append(snr_db / 10.0)
        neg_log_out.append(-math.log10(p_out))
    slope, _ = np.polyfit(decades, neg_log_out, 1)
    return float(slope)
