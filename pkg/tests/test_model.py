"""Core model: parameter handling, derived constants, scheme decisions."""

import dataclasses
import math

import pytest
from hypothesis import given, strategies as st

from ehrelay import (
    ChannelRealization,
    SchemeDecision,
    SnrTuple,
    SystemParams,
    dbi_to_linear,
    dbm_to_watts,
    decide_dynamic_ps,
    decide_improved,
    decide_static_equal,
    derive_constants,
    downlink_snrs,
    outage_indicator,
    snr_tuple,
    uplink_snrs,
)

# Frozen by scripts/compute_reference_values.py (mpmath, 50 digits),
# reference operating point with theta = 0.5.
REF_LAMBDA_BIG = 0.027063221351946276
REF_Z_A = 2849.964970428562
REF_Z_B = 55343.536791276674
REF_VARPI = 3e-12
REF_X_FACTOR_A = 105264451.70829158
REF_X_FACTOR_B = 5420687.173127801
REF_Y_BIG = 3804.0377544097796
REF_C_A = 0.0015772714119476287
REF_C_B = 0.0015772714119476287
REF_E_A = 1.7099789822571373e-08
REF_E_B = 3.3206122074766005e-07
REF_DELTA_A = 0.009012384833197147
REF_DELTA_B = 0.1750117130450859
REF_A_O = 1.1195032981262697e-18
REF_B_O = 0.0007886357059752339

DEFAULTS = SystemParams()
CONSTS = derive_constants(DEFAULTS, 0.5)


def test_unit_conversions():
    assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-12)
    assert dbm_to_watts(0.0) == pytest.approx(1e-3, rel=1e-12)
    assert dbm_to_watts(-90.0) == pytest.approx(1e-12, rel=1e-12)
    assert dbi_to_linear(0.0) == 1.0
    assert dbi_to_linear(10.0) == pytest.approx(10.0, rel=1e-12)


def test_threshold_and_wavelength():
    assert DEFAULTS.snr_threshold == pytest.approx(3.0, rel=1e-15)
    assert DEFAULTS.wavelength_m == pytest.approx(299792458.0 / 915e6, rel=1e-15)
    assert DEFAULTS.sensitivity_w == 0.0
    with_floor = dataclasses.replace(DEFAULTS, circuit_sensitivity_dbm=-20.0)
    assert with_floor.sensitivity_w == pytest.approx(1e-5, rel=1e-12)


def test_normalized_threshold_is_three_picounits():
    # gamma_th * sigma^2_W / P_W with sigma^2_W = 1e-12 and P_W = 1.
    assert CONSTS.varpi == pytest.approx(REF_VARPI, rel=1e-12)


def test_derived_constants_reference_point():
    got = {
        "lambda_big_a": CONSTS.lambda_big_a,
        "lambda_big_b": CONSTS.lambda_big_b,
        "z_a": CONSTS.z_a,
        "z_b": CONSTS.z_b,
        "x_factor_a": CONSTS.x_factor_a,
        "x_factor_b": CONSTS.x_factor_b,
        "y_big": CONSTS.y_big,
        "c_a": CONSTS.c_a,
        "c_b": CONSTS.c_b,
        "e_a": CONSTS.e_a,
        "e_b": CONSTS.e_b,
        "delta_a": CONSTS.delta_a,
        "delta_b": CONSTS.delta_b,
        "a_o": CONSTS.a_o,
        "b_o": CONSTS.b_o,
    }
    want = {
        "lambda_big_a": REF_LAMBDA_BIG,
        "lambda_big_b": REF_LAMBDA_BIG,
        "z_a": REF_Z_A,
        "z_b": REF_Z_B,
        "x_factor_a": REF_X_FACTOR_A,
        "x_factor_b": REF_X_FACTOR_B,
        "y_big": REF_Y_BIG,
        "c_a": REF_C_A,
        "c_b": REF_C_B,
        "e_a": REF_E_A,
        "e_b": REF_E_B,
        "delta_a": REF_DELTA_A,
        "delta_b": REF_DELTA_B,
        "a_o": REF_A_O,
        "b_o": REF_B_O,
    }
    for name, value in want.items():
        assert got[name] == pytest.approx(value, rel=1e-12), name
    assert CONSTS.a_rate_a == pytest.approx(REF_Z_A, rel=1e-12)
    assert CONSTS.a_rate_b == pytest.approx(REF_Z_B, rel=1e-12)


def test_symmetric_geometry_collapses_link_constants():
    sym = dataclasses.replace(DEFAULTS, dist_a=10.0, dist_b=10.0)
    c = derive_constants(sym, 0.5)
    assert c.z_a == pytest.approx(c.z_b, rel=1e-15)
    assert c.delta_a == pytest.approx(c.delta_b, rel=1e-15)
    assert c.x_factor_a == pytest.approx(c.x_factor_b, rel=1e-15)


def test_half_theta_mix_identity():
    # At theta = 0.5 both broadcast factors reduce to hg / (2 z_i).
    assert CONSTS.x_factor_a * CONSTS.z_a == pytest.approx(
        CONSTS.x_factor_b * CONSTS.z_b, rel=1e-12)
    assert CONSTS.x_factor_a * CONSTS.z_a == pytest.approx(
        CONSTS.y_big * CONSTS.z_a * CONSTS.z_b / 2.0, rel=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(time_split=0.5)
    with pytest.raises(ValueError):
        SystemParams(time_split=0.0)
    with pytest.raises(ValueError):
        SystemParams(eh_efficiency=0.0)
    with pytest.raises(ValueError):
        SystemParams(eh_efficiency=1.2)
    with pytest.raises(ValueError):
        SystemParams(dist_a=-1.0)
    with pytest.raises(ValueError):
        SystemParams(rate_bps_hz=0.0)
    with pytest.raises(ValueError):
        SystemParams(quad_order=0)
    with pytest.raises(ValueError):
        SystemParams(quad_order=2.5)


def test_derive_constants_theta_domain():
    with pytest.raises(ValueError):
        derive_constants(DEFAULTS, 0.0)
    with pytest.raises(ValueError):
        derive_constants(DEFAULTS, 1.0)


def test_realization_and_decision_validation():
    with pytest.raises(ValueError):
        ChannelRealization(gain_sq_a=-1.0, gain_sq_b=1.0)
    with pytest.raises(ValueError):
        ChannelRealization(gain_sq_a=math.nan, gain_sq_b=1.0)
    with pytest.raises(ValueError):
        SchemeDecision(rho_a=1.1, rho_b=0.5, theta=0.5)
    with pytest.raises(ValueError):
        SchemeDecision(rho_a=0.5, rho_b=0.5, theta=1.0)
    with pytest.raises(ValueError):
        SnrTuple(uplink_a=-1.0, uplink_b=0.0, downlink_a=0.0, downlink_b=0.0)


def test_uplink_boundary_values():
    ch = ChannelRealization(gain_sq_a=CONSTS.varpi * CONSTS.z_a,
                            gain_sq_b=CONSTS.varpi * CONSTS.z_b)
    dec = SchemeDecision(rho_a=0.0, rho_b=0.0, theta=0.5)
    up_a, up_b = uplink_snrs(DEFAULTS, CONSTS, ch, dec)
    assert up_a == pytest.approx(DEFAULTS.snr_threshold, rel=1e-12)
    assert up_b == pytest.approx(DEFAULTS.snr_threshold, rel=1e-12)

    all_harvest = SchemeDecision(rho_a=1.0, rho_b=1.0, theta=0.5)
    up_a, up_b = uplink_snrs(DEFAULTS, CONSTS, ch, all_harvest)
    assert up_a == 0.0 and up_b == 0.0


def test_uplink_reference_value():
    # P / sigma^2 is exactly 1e12 at the reference point, so the value is
    # forced by the frozen z_a literal.
    ch = ChannelRealization(gain_sq_a=DEFAULTS.fading_mean_a, gain_sq_b=1.0)
    dec = SchemeDecision(rho_a=0.3, rho_b=0.0, theta=0.5)
    up_a, _ = uplink_snrs(DEFAULTS, CONSTS, ch, dec)
    assert up_a == pytest.approx(0.7e12 / REF_Z_A, rel=1e-12)


def test_downlink_zero_without_harvest():
    ch = ChannelRealization(gain_sq_a=2.0, gain_sq_b=1.0)
    dec = SchemeDecision(rho_a=0.0, rho_b=0.0, theta=0.5)
    down_a, down_b = downlink_snrs(DEFAULTS, CONSTS, ch, dec)
    assert down_a == 0.0 and down_b == 0.0


def test_downlink_reference_pair():
    """Downlink pair at gains (2, 1) with the optimal split ratios."""
    rho_a = 1.0 - REF_VARPI * REF_Z_A / 2.0
    rho_b = 1.0 - REF_VARPI * REF_Z_B
    ch = ChannelRealization(gain_sq_a=2.0, gain_sq_b=1.0)
    dec = SchemeDecision(rho_a=rho_a, rho_b=rho_b, theta=0.5)
    harvest = rho_a * 2.0 / REF_Z_A + rho_b * 1.0 / REF_Z_B
    down_a, down_b = downlink_snrs(DEFAULTS, CONSTS, ch, dec)
    assert down_a == pytest.approx(REF_X_FACTOR_A * 2.0 * harvest, rel=1e-12)
    assert down_b == pytest.approx(REF_X_FACTOR_B * 1.0 * harvest, rel=1e-12)


def test_static_equal_decision():
    assert decide_static_equal(DEFAULTS, CONSTS, 0.5) == SchemeDecision(0.5, 0.5, 0.5)
    assert decide_static_equal(DEFAULTS, CONSTS, 0.0) == SchemeDecision(0.0, 0.0, 0.5)
    assert decide_static_equal(DEFAULTS, CONSTS, 0.7) == SchemeDecision(0.7, 0.7, 0.5)


def test_dynamic_split_knee_values():
    knee_a = CONSTS.varpi * CONSTS.z_a
    knee_b = CONSTS.varpi * CONSTS.z_b
    at_knee = ChannelRealization(gain_sq_a=knee_a, gain_sq_b=knee_b)
    dec = decide_dynamic_ps(DEFAULTS, CONSTS, at_knee, 0.5)
    assert dec.rho_a == 0.0 and dec.rho_b == 0.0

    doubled = ChannelRealization(gain_sq_a=2.0 * knee_a, gain_sq_b=2.0 * knee_b)
    dec = decide_dynamic_ps(DEFAULTS, CONSTS, doubled, 0.5)
    assert dec.rho_a == pytest.approx(0.5, rel=1e-12)
    assert dec.rho_b == pytest.approx(0.5, rel=1e-12)

    below = ChannelRealization(gain_sq_a=0.5 * knee_a, gain_sq_b=0.1 * knee_b)
    dec = decide_dynamic_ps(DEFAULTS, CONSTS, below, 0.5)
    assert dec.rho_a == 0.0 and dec.rho_b == 0.0


def test_improved_theta_special_points():
    # Gains scaled so g_a * z_b equals g_b * z_a give the symmetric split.
    ch = ChannelRealization(gain_sq_a=1.0, gain_sq_b=REF_Z_B / REF_Z_A)
    dec = decide_improved(DEFAULTS, CONSTS, ch)
    assert dec.theta == pytest.approx(0.5, rel=1e-12)

    vanishing_b = ChannelRealization(gain_sq_a=1.0, gain_sq_b=1e-30)
    dec = decide_improved(DEFAULTS, CONSTS, vanishing_b)
    assert dec.theta > 0.999999
    assert dec.theta < 1.0


def test_improved_theta_reference_value():
    ch = ChannelRealization(gain_sq_a=2.0, gain_sq_b=1.0)
    dec = decide_improved(DEFAULTS, CONSTS, ch)
    want = math.sqrt(2.0 * REF_Z_B) / (math.sqrt(2.0 * REF_Z_B) + math.sqrt(REF_Z_A))
    assert dec.theta == pytest.approx(want, rel=1e-12)


def test_outage_indicator_inclusive_threshold():
    g = DEFAULTS.snr_threshold
    at = SnrTuple(uplink_a=g, uplink_b=g, downlink_a=g, downlink_b=g)
    assert outage_indicator(DEFAULTS, CONSTS, at) is False
    one_low = SnrTuple(uplink_a=g / 2.0, uplink_b=1e9, downlink_a=1e9, downlink_b=1e9)
    assert outage_indicator(DEFAULTS, CONSTS, one_low) is True


def test_outage_indicator_vanishing_threshold():
    tiny_rate = dataclasses.replace(DEFAULTS, rate_bps_hz=1e-9)
    c = derive_constants(tiny_rate, 0.5)
    snrs = SnrTuple(uplink_a=1e-6, uplink_b=1e-6, downlink_a=1e-6, downlink_b=1e-6)
    assert outage_indicator(tiny_rate, c, snrs) is False


def test_scale_consistency():
    """Shifting P and sigma^2 by the same dB amount changes nothing."""
    shifted = dataclasses.replace(DEFAULTS, tx_power_dbm=37.0, noise_dbm=-83.0)
    c2 = derive_constants(shifted, 0.5)
    assert c2.varpi == pytest.approx(CONSTS.varpi, rel=1e-12)
    ch = ChannelRealization(gain_sq_a=0.8, gain_sq_b=1.7)
    dec1 = decide_dynamic_ps(DEFAULTS, CONSTS, ch, 0.5)
    dec2 = decide_dynamic_ps(shifted, c2, ch, 0.5)
    s1 = snr_tuple(DEFAULTS, CONSTS, ch, dec1)
    s2 = snr_tuple(shifted, c2, ch, dec2)
    for a, b in zip((s1.uplink_a, s1.uplink_b, s1.downlink_a, s1.downlink_b),
                    (s2.uplink_a, s2.uplink_b, s2.downlink_a, s2.downlink_b)):
        assert b == pytest.approx(a, rel=1e-9)


@given(
    extra_a=st.floats(min_value=0.0, max_value=5.0),
    extra_b=st.floats(min_value=0.0, max_value=5.0),
    shrink_a=st.floats(min_value=0.0, max_value=1.0),
    shrink_b=st.floats(min_value=0.0, max_value=1.0),
)
def test_split_ratio_optimality(extra_a, extra_b, shrink_a, shrink_b):
    """No feasible smaller split beats the knee split; larger splits break the uplink."""
    ch = ChannelRealization(gain_sq_a=CONSTS.varpi * CONSTS.z_a + extra_a,
                            gain_sq_b=CONSTS.varpi * CONSTS.z_b + extra_b)
    best = decide_dynamic_ps(DEFAULTS, CONSTS, ch, 0.5)
    candidate = SchemeDecision(rho_a=shrink_a * best.rho_a,
                               rho_b=shrink_b * best.rho_b, theta=0.5)
    opt = downlink_snrs(DEFAULTS, CONSTS, ch, best)
    sub = downlink_snrs(DEFAULTS, CONSTS, ch, candidate)
    assert min(sub) <= min(opt) * (1.0 + 1e-12)

    if best.rho_a < 1.0:
        over = SchemeDecision(rho_a=best.rho_a + 0.5 * (1.0 - best.rho_a),
                              rho_b=best.rho_b, theta=0.5)
        up_a, _ = uplink_snrs(DEFAULTS, CONSTS, ch, over)
        assert up_a < DEFAULTS.snr_threshold


@given(
    g_a=st.floats(min_value=1e-12, max_value=20.0),
    g_b=st.floats(min_value=1e-12, max_value=20.0),
)
def test_improved_weight_equalizes_downlinks(g_a, g_b):
    ch = ChannelRealization(gain_sq_a=g_a, gain_sq_b=g_b)
    dec = decide_improved(DEFAULTS, CONSTS, ch)
    down_a, down_b = downlink_snrs(DEFAULTS, CONSTS, ch, dec)
    # Extreme gain ratios park theta within ~5e-8 of 1, where the 1-theta
    # cancellation caps the achievable equality at roughly eps/(1-theta).
    assert down_a == pytest.approx(down_b, rel=1e-6, abs=1e-30)


@given(
    g_a=st.floats(min_value=1e-9, max_value=20.0),
    g_b=st.floats(min_value=1e-9, max_value=20.0),
    rho_a=st.floats(min_value=0.0, max_value=1.0),
    rho_b=st.floats(min_value=0.0, max_value=1.0),
    bump_a=st.floats(min_value=0.0, max_value=1.0),
    bump_b=st.floats(min_value=0.0, max_value=1.0),
)
def test_downlinks_nondecreasing_in_split_ratios(g_a, g_b, rho_a, rho_b,
                                                 bump_a, bump_b):
    ch = ChannelRealization(gain_sq_a=g_a, gain_sq_b=g_b)
    lo = SchemeDecision(rho_a=rho_a, rho_b=rho_b, theta=0.5)
    hi = SchemeDecision(rho_a=rho_a + bump_a * (1.0 - rho_a),
                        rho_b=rho_b + bump_b * (1.0 - rho_b), theta=0.5)
    d_lo = downlink_snrs(DEFAULTS, CONSTS, ch, lo)
    d_hi = downlink_snrs(DEFAULTS, CONSTS, ch, hi)
    assert d_hi[0] >= d_lo[0] * (1.0 - 1e-12)
    assert d_hi[1] >= d_lo[1] * (1.0 - 1e-12)
