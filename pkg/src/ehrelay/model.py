"""System model for a three-step two-way relay network with RF energy harvesting.

Terminals A and B exchange messages through a decode-and-forward relay R that
has no power supply of its own.  Each block of length T is split into three
slots: A transmits for beta*T, B transmits for beta*T, and R broadcasts a
re-encoded combination of both messages for the remaining (1-2*beta)*T.  The
relay power-splits each received signal, harvesting a fraction rho_i of the
power and decoding from the rest; the broadcast weights the two re-encoded
messages by a power allocation ratio theta.

All arithmetic below is carried out in linear units (watts, dimensionless
gains).  dBm / dBi inputs are converted exactly once, when derived constants
are built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT_M_S = 299792458.0


def dbm_to_watts(value_dbm: float) -> float:
    """Convert a power from dBm to watts."""
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def dbi_to_linear(gain_dbi: float) -> float:
    """Convert an antenna gain from dBi to a linear ratio."""
    return 10.0 ** (gain_dbi / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol constants of one network configuration.

    Defaults reproduce the reference operating point used throughout the
    experiment suite.
    """

    tx_power_dbm: float = 30.0        # terminal transmit power P
    noise_dbm: float = -90.0          # noise variance sigma^2
    eh_efficiency: float = 0.6        # energy conversion efficiency eta, in (0, 1]
    time_split: float = 1.0 / 3.0     # time allocation ratio beta, in (0, 0.5)
    block_duration: float = 1.0       # block length T in seconds
    path_loss_exp: float = 2.7        # path loss exponent alpha
    dist_a: float = 5.0               # A-R distance in meters
    dist_b: float = 15.0              # B-R distance in meters
    ref_dist: float = 1.0             # close-in reference distance d0 in meters
    carrier_freq_hz: float = 915e6    # carrier frequency (sets the wavelength)
    gain_a_dbi: float = 8.0           # antenna gain at A
    gain_b_dbi: float = 8.0           # antenna gain at B
    gain_relay_dbi: float = 8.0       # antenna gain at R
    fading_mean_a: float = 1.0        # mean of the exponential |h_A|^2
    fading_mean_b: float = 1.0        # mean of the exponential |h_B|^2
    rate_bps_hz: float = 2.0          # transmission rate U in bit/s/Hz
    quad_order: int = 10              # Gauss-Chebyshev order M
    circuit_sensitivity_dbm: float | None = None  # rectenna threshold P_th; None = ideal

    def __post_init__(self) -> None:
        if not 0.0 < self.time_split < 0.5:
            raise ValueError("time_split must lie strictly between 0 and 0.5")
        if not 0.0 < self.eh_efficiency <= 1.0:
            raise ValueError("eh_efficiency must lie in (0, 1]")
        for name in ("block_duration", "path_loss_exp", "dist_a", "dist_b",
                     "ref_dist", "carrier_freq_hz", "fading_mean_a",
                     "fading_mean_b", "rate_bps_hz"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not (isinstance(self.quad_order, (int, np.integer)) and self.quad_order >= 1):
            raise ValueError("quad_order must be an integer >= 1")

    @property
    def snr_threshold(self) -> float:
        """Decoding threshold gamma_th; the rate is the single source of truth."""
        return 2.0 ** self.rate_bps_hz - 1.0

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.carrier_freq_hz

    @property
    def tx_power_w(self) -> float:
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def noise_w(self) -> float:
        return dbm_to_watts(self.noise_dbm)

    @property
    def sensitivity_w(self) -> float:
        """Rectenna activation threshold in watts; the ideal case maps to 0."""
        if self.circuit_sensitivity_dbm is None:
            return 0.0
        return dbm_to_watts(self.circuit_sensitivity_dbm)


@dataclass(frozen=True)
class DerivedConstants:
    """Precomputed linear-unit symbols for one (params, theta) configuration.

    Everything downstream (closed forms, region geometry, Monte Carlo
    kernels) reads these instead of redoing unit conversions.
    """

    lambda_big_a: float   # composite antenna/path factor for the A link
    lambda_big_b: float
    z_a: float            # d_i^alpha / Lambda_i
    z_b: float
    varpi: float          # gamma_th * sigma^2 / P
    x_factor_a: float     # downlink SNR coefficient, carries (1-theta)^2
    x_factor_b: float     # downlink SNR coefficient, carries theta^2
    y_big: float          # eta*beta*P / ((1-2*beta)*sigma^2*Z_A*Z_B)
    c_a: float            # gamma_th * Z_A / X_B
    c_b: float            # gamma_th * Z_B / X_A
    d_ratio_a: float      # Z_A / Z_B
    d_ratio_b: float      # Z_B / Z_A
    e_a: float            # 2 * varpi * Z_A
    e_b: float            # 2 * varpi * Z_B
    delta_a: float        # decode-feasibility knee of the A link
    delta_b: float
    a_rate_a: float       # Z_A / fading_mean_a
    a_rate_b: float
    a_o: float            # varpi^2 * Z_A * Z_B * gamma_th / Y
    b_o: float            # varpi^2 * Z_A * Z_B + gamma_th / Y


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the two squared channel gains |h_A|^2, |h_B|^2."""

    gain_sq_a: float
    gain_sq_b: float

    def __post_init__(self) -> None:
        for v in (self.gain_sq_a, self.gain_sq_b):
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError("squared channel gains must be finite and nonnegative")


@dataclass(frozen=True)
class SchemeDecision:
    """Control variables chosen by a relay scheme for one realization."""

    rho_a: float   # power-splitting ratio of the A link, in [0, 1]
    rho_b: float   # power-splitting ratio of the B link, in [0, 1]
    theta: float   # broadcast power allocation ratio, in (0, 1)

    def __post_init__(self) -> None:
        if not (0.0 <= self.rho_a <= 1.0 and 0.0 <= self.rho_b <= 1.0):
            raise ValueError("power-splitting ratios must lie in [0, 1]")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class SnrTuple:
    """The four link SNRs that jointly decide a system outage."""

    uplink_a: float
    uplink_b: float
    downlink_a: float
    downlink_b: float

    def __post_init__(self) -> None:
        for v in (self.uplink_a, self.uplink_b, self.downlink_a, self.downlink_b):
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError("SNRs must be finite and nonnegative")


def derive_constants(params: SystemParams, theta: float) -> DerivedConstants:
    """Evaluate every derived symbol for the given power allocation ratio.

    Raises ValueError for theta outside the open interval (0, 1).
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie strictly inside (0, 1)")

    alpha = params.path_loss_exp
    wavelength = params.wavelength_m
    g_relay = dbi_to_linear(params.gain_relay_dbi)
    # Close-in path loss factor: free-space at d0, exponent alpha beyond it.
    common = wavelength ** 2 * params.ref_dist ** (alpha - 2.0) / (4.0 * math.pi) ** 2
    lambda_big_a = dbi_to_linear(params.gain_a_dbi) * g_relay * common
    lambda_big_b = dbi_to_linear(params.gain_b_dbi) * g_relay * common
    z_a = params.dist_a ** alpha / lambda_big_a
    z_b = params.dist_b ** alpha / lambda_big_b

    p_w = params.tx_power_w
    n_w = params.noise_w
    gamma_th = params.snr_threshold
    varpi = gamma_th * n_w / p_w

    beta = params.time_split
    harvest_gain = params.eh_efficiency * beta * p_w / ((1.0 - 2.0 * beta) * n_w)
    mix = theta ** 2 + (1.0 - theta) ** 2
    x_factor_a = harvest_gain * (1.0 - theta) ** 2 / (z_a * mix)
    x_factor_b = harvest_gain * theta ** 2 / (z_b * mix)
    y_big = harvest_gain / (z_a * z_b)

    c_a = gamma_th * z_a / x_factor_b
    c_b = gamma_th * z_b / x_factor_a
    d_ratio_a = z_a / z_b
    d_ratio_b = z_b / z_a
    e_a = 2.0 * varpi * z_a
    e_b = 2.0 * varpi * z_b

    delta_a = 0.5 * (varpi + math.sqrt(varpi ** 2 + 4.0 * gamma_th / (z_a * x_factor_a))) * z_a
    delta_b = 0.5 * (varpi + math.sqrt(varpi ** 2 + 4.0 * gamma_th / (z_b * x_factor_b))) * z_b

    a_rate_a = z_a / params.fading_mean_a
    a_rate_b = z_b / params.fading_mean_b
    a_o = varpi ** 2 * z_a * z_b * gamma_th / y_big
    b_o = varpi ** 2 * z_a * z_b + gamma_th / y_big

    consts = DerivedConstants(
        lambda_big_a=lambda_big_a, lambda_big_b=lambda_big_b,
        z_a=z_a, z_b=z_b, varpi=varpi,
        x_factor_a=x_factor_a, x_factor_b=x_factor_b, y_big=y_big,
        c_a=c_a, c_b=c_b, d_ratio_a=d_ratio_a, d_ratio_b=d_ratio_b,
        e_a=e_a, e_b=e_b, delta_a=delta_a, delta_b=delta_b,
        a_rate_a=a_rate_a, a_rate_b=a_rate_b, a_o=a_o, b_o=b_o,
    )
    # The discriminant exceeds varpi^2, so each knee sits strictly above
    # the decode boundary; anything else means broken inputs.
    assert consts.delta_a > varpi * z_a and consts.delta_b > varpi * z_b
    return consts


def uplink_snrs(params: SystemParams, consts: DerivedConstants,
                ch: ChannelRealization, dec: SchemeDecision) -> tuple[float, float]:
    """SNRs of the terminal-to-relay links after power splitting."""
    scale = params.tx_power_w / params.noise_w
    up_a = ch.gain_sq_a * (1.0 - dec.rho_a) * scale / consts.z_a
    up_b = ch.gain_sq_b * (1.0 - dec.rho_b) * scale / consts.z_b
    return up_a, up_b


def _x_factors(params: SystemParams, consts: DerivedConstants,
               theta) -> tuple:
    """Downlink SNR coefficients for an arbitrary theta (scalar or array)."""
    beta = params.time_split
    harvest_gain = params.eh_efficiency * beta * params.tx_power_w \
        / ((1.0 - 2.0 * beta) * params.noise_w)
    mix = theta ** 2 + (1.0 - theta) ** 2
    x_a = harvest_gain * (1.0 - theta) ** 2 / (consts.z_a * mix)
    x_b = harvest_gain * theta ** 2 / (consts.z_b * mix)
    return x_a, x_b


def downlink_snrs(params: SystemParams, consts: DerivedConstants,
                  ch: ChannelRealization, dec: SchemeDecision) -> tuple[float, float]:
    """SNRs of the relay broadcast as decoded at A and B.

    The coefficients are rebuilt from dec.theta so the result always
    matches the decision being evaluated, independent of the theta the
    constants were derived with.
    """
    x_a, x_b = _x_factors(params, consts, dec.theta)
    harvest = dec.rho_a * ch.gain_sq_a / consts.z_a + dec.rho_b * ch.gain_sq_b / consts.z_b
    down_a = x_a * ch.gain_sq_a * harvest
    down_b = x_b * ch.gain_sq_b * harvest
    return down_a, down_b


def snr_tuple(params: SystemParams, consts: DerivedConstants,
              ch: ChannelRealization, dec: SchemeDecision) -> SnrTuple:
    """Convenience wrapper bundling the four link SNRs of one realization."""
    up_a, up_b = uplink_snrs(params, consts, ch, dec)
    down_a, down_b = downlink_snrs(params, consts, ch, dec)
    return SnrTuple(uplink_a=up_a, uplink_b=up_b, downlink_a=down_a, downlink_b=down_b)


def decide_static_equal(params: SystemParams, consts: DerivedConstants,
                        rho_fixed: float) -> SchemeDecision:
    """Channel-independent baseline: both links split at rho_fixed, theta 0.5."""
    if not 0.0 <= rho_fixed <= 1.0:
        raise ValueError("rho_fixed must lie in [0, 1]")
    return SchemeDecision(rho_a=rho_fixed, rho_b=rho_fixed, theta=0.5)


def decide_dynamic_ps(params: SystemParams, consts: DerivedConstants,
                      ch: ChannelRealization, theta: float) -> SchemeDecision:
    """Per-realization splitting: harvest everything beyond decode feasibility."""
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie strictly inside (0, 1)")
    rho_a = _optimal_rho(ch.gain_sq_a, consts.varpi * consts.z_a)
    rho_b = _optimal_rho(ch.gain_sq_b, consts.varpi * consts.z_b)
    return SchemeDecision(rho_a=rho_a, rho_b=rho_b, theta=theta)


def _optimal_rho(gain_sq: float, knee: float) -> float:
    # A zero gain cannot support decoding at all; harvest nothing.
    if gain_sq <= 0.0:
        return 0.0
    return max(1.0 - knee / gain_sq, 0.0)


# Smallest admissible values of an open-interval theta; used when one channel
# vanishes so the optimizer formula returns a boundary value.
_THETA_LO = float(np.nextafter(0.0, 1.0))
_THETA_HI = float(np.nextafter(1.0, 0.0))


def decide_improved(params: SystemParams, consts: DerivedConstants,
                    ch: ChannelRealization) -> SchemeDecision:
    """Joint splitting and broadcast-weight choice for one realization.

    The weight equalizes the two downlink SNRs.  When both gains vanish the
    outcome is an outage for every theta, so the symmetric 0.5 is returned
    for determinism; a single vanishing gain is nudged off the boundary to
    keep theta inside its open interval.
    """
    base = decide_dynamic_ps(params, consts, ch, theta=0.5)
    root_a = math.sqrt(ch.gain_sq_a) * math.sqrt(consts.z_b)
    root_b = math.sqrt(ch.gain_sq_b) * math.sqrt(consts.z_a)
    denom = root_a + root_b
    if denom == 0.0:
        theta = 0.5
    else:
        theta = min(max(root_a / denom, _THETA_LO), _THETA_HI)
    return SchemeDecision(rho_a=base.rho_a, rho_b=base.rho_b, theta=theta)


def outage_indicator(params: SystemParams, consts: DerivedConstants,
                     snrs: SnrTuple) -> bool:
    """True when any of the four links misses the decoding threshold.

    Equality counts as success; ties have probability zero but the
    convention is pinned for reproducibility.
    """
    worst = min(snrs.uplink_a, snrs.uplink_b, snrs.downlink_a, snrs.downlink_b)
    return worst < params.snr_threshold
