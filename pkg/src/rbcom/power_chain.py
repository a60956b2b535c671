"""
Gain-medium physics and power flow from the electrical pump to the
frequency-doubled carrier.

The spatially separated cavity is reduced to a two-mirror Rigrod laser whose
left mirror lumps RR1, the gain medium and diffraction, and whose right
mirror lumps the splitter M4, the air path and RR2. The splitter M4 taps a
fraction R4 of the intracavity beam as the fundamental beam for SHG.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from scipy import constants as const

from .diffraction import round_trip_diffraction_loss
from .errors import InvalidArgumentError, SingularConfigurationError, UnstableResonatorError
from .resonator_modes import (
    ResonatorGeometry,
    Stability,
    beam_propagation_factor,
    classify_stability,
    fundamental_waist_at_m1,
    w00_profile,
)

__all__ = [
    "ALPHA_AIR",
    "GainMediumSpec",
    "EfficiencyChain",
    "LossBudget",
    "ShgCrystalSpec",
    "EquivalentMirrors",
    "PowerReport",
    "ShgValidity",
    "saturation_intensity",
    "small_signal_gain",
    "threshold_met",
    "air_loss_factor",
    "equivalent_reflectances",
    "extraction_efficiency",
    "threshold_power",
    "rigrod_intracavity_intensity",
    "fundamental_beam_power",
    "shg_constant",
    "shg_power",
    "fundamental_beam_area",
    "shg_validity",
]

ALPHA_AIR = 1e-4  # clear-air loss coefficient, 1/m


@dataclass(frozen=True)
class GainMediumSpec:
    """Nd:YVO4 defaults. ``volume`` defaults to pi a_g^2 l_g."""

    sigma_s: float = 15.6e-23
    tau_f: float = 100e-6
    wavelength: float = 1064e-9
    a_g: float = 3e-3
    l_g: float = 1e-3
    volume: float | None = None

    def __post_init__(self):
        for name in ("sigma_s", "tau_f", "wavelength", "a_g", "l_g"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        if self.volume is not None and not self.volume > 0:
            raise InvalidArgumentError("volume must be > 0")

    @property
    def V(self) -> float:
        if self.volume is not None:
            return self.volume
        return math.pi * self.a_g**2 * self.l_g

    @property
    def area(self) -> float:
        """Beam cross section at the gain medium, A_g = pi a_g^2."""
        return math.pi * self.a_g**2


@dataclass(frozen=True)
class EfficiencyChain:
    eta_P: float = 0.75
    eta_t: float = 0.99
    eta_a: float = 0.91
    eta_Q: float = 0.95
    eta_S: float = 0.76
    eta_B: float = 0.90

    def __post_init__(self):
        for name in ("eta_P", "eta_t", "eta_a", "eta_Q", "eta_S", "eta_B"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidArgumentError(f"{name} must be in (0, 1], got {v}")

    @property
    def combined(self) -> float:
        return self.eta_P * self.eta_t * self.eta_a * self.eta_Q * self.eta_S * self.eta_B


@dataclass(frozen=True)
class LossBudget:
    """Round-trip survival factors.

    ``gamma_diff=None`` means "derive from the resonator geometry".
    """

    R4: float = 0.02
    gamma_RR1: float = 1.0
    gamma_RR2: float = 1.0
    gamma_g: float = 1.0
    gamma_diff: float | None = None
    alpha_air: float = ALPHA_AIR

    def __post_init__(self):
        if not 0.0 <= self.R4 < 1.0:
            raise InvalidArgumentError(f"R4 must be in [0, 1), got {self.R4}")
        for name in ("gamma_RR1", "gamma_RR2", "gamma_g"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidArgumentError(f"{name} must be in (0, 1], got {v}")
        if self.gamma_diff is not None and not 0.0 < self.gamma_diff <= 1.0:
            raise InvalidArgumentError(f"gamma_diff must be in (0, 1], got {self.gamma_diff}")
        if self.alpha_air < 0:
            raise InvalidArgumentError("alpha_air must be >= 0")

    @property
    def gamma_M4(self) -> float:
        return 1.0 - self.R4

    def gamma_air(self, d: float) -> float:
        return air_loss_factor(d, self.alpha_air)

    def delta(self, d: float) -> float:
        """Total round-trip loss coefficient -ln(product of survival factors)."""
        if self.gamma_diff is None:
            raise InvalidArgumentError("gamma_diff unresolved; use fundamental_beam_power")
        prod = (self.gamma_RR1 * self.gamma_diff * self.gamma_g * self.gamma_M4
                * self.gamma_air(d) * self.gamma_RR2)
        return -math.log(prod)


@dataclass(frozen=True)
class ShgCrystalSpec:
    """LiNbO3 defaults."""

    d_eff: float = 4.7e-12
    n0: float = 2.23
    l_s: float = 2e-3

    def __post_init__(self):
        if not (self.d_eff > 0 and self.n0 > 0 and self.l_s > 0):
            raise InvalidArgumentError("SHG crystal parameters must be > 0")


def air_loss_factor(d: float, alpha_air: float = ALPHA_AIR) -> float:
    """Round-trip air survival factor exp(-2 alpha d)."""
    return math.exp(-2.0 * alpha_air * d)


def saturation_intensity(gain: GainMediumSpec) -> float:
    """I_s = h nu / (sigma_s tau_f), W/m^2."""
    photon_energy = const.h * const.c / gain.wavelength
    return photon_energy / (gain.sigma_s * gain.tau_f)


def small_signal_gain(gain: GainMediumSpec, eff: EfficiencyChain, p_in: float) -> float:
    """g0 = eta_c P_in / (I_s V), 1/m."""
    if p_in < 0:
        raise InvalidArgumentError("P_in must be >= 0")
    return eff.combined * p_in / (saturation_intensity(gain) * gain.V)


def threshold_met(g0: float, l_g: float, delta: float) -> bool:
    return 2.0 * g0 * l_g >= delta


@dataclass(frozen=True)
class EquivalentMirrors:
    R1: float
    R2: float

    @property
    def r1(self) -> float:
        return math.sqrt(self.R1)

    @property
    def r2(self) -> float:
        return math.sqrt(self.R2)


def equivalent_reflectances(loss: LossBudget, d: float) -> EquivalentMirrors:
    """Lump the loss factors into two mirrors.

    R1 = Gamma_RR1 Gamma_g Gamma_diff (transmitter side),
    R2 = Gamma_M4 Gamma_air(d) Gamma_RR2 (splitter, air and receiver).
    """
    if loss.gamma_diff is None:
        raise InvalidArgumentError("gamma_diff unresolved")
    if loss.gamma_diff <= 0:
        raise InvalidArgumentError("gamma_diff must be > 0")
    return EquivalentMirrors(
        R1=loss.gamma_RR1 * loss.gamma_g * loss.gamma_diff,
        R2=loss.gamma_M4 * loss.gamma_air(d) * loss.gamma_RR2,
    )


def rigrod_intracavity_intensity(i_s: float, g0_lg: float, r1: float, r2: float) -> float:
    """Rightward intensity at the right mirror of a two-mirror laser.

    Zero below threshold. ``g0_lg`` is the single-pass small-signal gain
    exponent g0 * l_g.
    """
    net = g0_lg - math.log(1.0 / (r1 * r2))
    if net <= 0:
        return 0.0
    return i_s * net / ((1.0 + r2 / r1) * (1.0 - r1 * r2))


def extraction_efficiency(gain: GainMediumSpec, eff: EfficiencyChain, mirrors: EquivalentMirrors,
                          R4: float) -> float:
    """Slope efficiency eta_nu of P_nu above threshold."""
    r1, r2 = mirrors.r1, mirrors.r2
    num = gain.l_g * eff.combined * gain.area * mirrors.R2 * R4
    den = gain.V * (1.0 - R4) * (1.0 + r2 / r1) * (1.0 - r1 * r2)
    return num / den


def threshold_power(gain: GainMediumSpec, eff: EfficiencyChain, mirrors: EquivalentMirrors) -> float:
    """Electrical pump power at which 2 g0 l_g reaches the round-trip loss."""
    return (math.log(1.0 / (mirrors.r1 * mirrors.r2))
            * saturation_intensity(gain) * gain.V / (gain.l_g * eff.combined))


@dataclass(frozen=True)
class PowerReport:
    """Breakdown of the fundamental-beam power for one operating point."""

    p_in: float
    status: Stability | str
    gamma_diff: float
    R1: float
    R2: float
    delta: float
    g0: float
    p_th: float
    eta_nu: float
    p_nu: float

    @property
    def lasing(self) -> bool:
        return self.p_nu > 0.0

    @property
    def stable(self) -> bool:
        return self.status is Stability.STABLE


def fundamental_beam_power(gain: GainMediumSpec, eff: EfficiencyChain, loss: LossBudget,
                           geom: ResonatorGeometry, p_in: float) -> PowerReport:
    """Power of the fundamental beam tapped by M4.

    P_nu = eta_nu (P_in - P_th) above threshold, 0 otherwise. A geometry
    without a usable eigenmode yields ``p_nu = 0`` and a non-stable status
    instead of raising.
    """
    if p_in < 0:
        raise InvalidArgumentError("P_in must be >= 0")
    g0 = small_signal_gain(gain, eff, p_in)
    status = classify_stability(geom)
    if status is not Stability.STABLE:
        nan = math.nan
        return PowerReport(p_in, status, nan, nan, nan, nan, g0, math.inf, 0.0, 0.0)
    if loss.gamma_diff is None:
        gamma_diff = round_trip_diffraction_loss(geom)
    else:
        gamma_diff = loss.gamma_diff
    if gamma_diff <= 0.0:
        return PowerReport(p_in, status, gamma_diff, 0.0, math.nan, math.inf, g0, math.inf, 0.0, 0.0)
    loss = replace(loss, gamma_diff=gamma_diff)
    mirrors = equivalent_reflectances(loss, geom.d)
    eta_nu = extraction_efficiency(gain, eff, mirrors, loss.R4)
    p_th = threshold_power(gain, eff, mirrors)
    p_nu = eta_nu * (p_in - p_th) if p_in > p_th else 0.0
    return PowerReport(p_in, status, gamma_diff, mirrors.R1, mirrors.R2, loss.delta(geom.d),
                       g0, p_th, eta_nu, p_nu)


def shg_constant(shg: ShgCrystalSpec, wavelength: float) -> float:
    """K = 8 pi^2 d_eff^2 / (eps0 c lambda^2 n0^3), in 1/W."""
    return 8.0 * math.pi**2 * shg.d_eff**2 / (const.epsilon_0 * const.c * wavelength**2 * shg.n0**3)


def shg_power(shg: ShgCrystalSpec, p_nu: float, a_nu: float, wavelength: float = 1064e-9) -> float:
    """Plane-wave SHG output P_2nu = K l_s^2 P_nu^2 / A_nu.

    Capped at ``p_nu`` (with a RuntimeWarning) where the undepleted-pump
    formula would exceed unit conversion.
    """
    if not a_nu > 0:
        raise InvalidArgumentError(f"A_nu must be > 0, got {a_nu}")
    if p_nu < 0:
        raise InvalidArgumentError("P_nu must be >= 0")
    p2 = shg_constant(shg, wavelength) * shg.l_s**2 * p_nu**2 / a_nu
    if p2 > p_nu:
        warnings.warn(f"SHG formula gives conversion {p2 / p_nu:.3g} > 1; clamped to 1",
                      RuntimeWarning, stacklevel=2)
        return p_nu
    return p2


def fundamental_beam_area(geom: ResonatorGeometry, l_s: float) -> float:
    """A_nu = pi w(l_s)^2 with w = M w00, measured from the waist on the flat end mirror."""
    w = beam_propagation_factor(geom) * float(w00_profile(geom, l_s))
    return math.pi * w**2


@dataclass(frozen=True)
class ShgValidity:
    l_s: float
    rayleigh_range: float

    @property
    def plane_wave_valid(self) -> bool:
        return self.l_s < self.rayleigh_range


def shg_validity(shg: ShgCrystalSpec, geom: ResonatorGeometry) -> ShgValidity:
    """Compare the crystal length with the Rayleigh range of the TEM00 waist."""
    try:
        w0 = fundamental_waist_at_m1(geom)
    except (UnstableResonatorError, SingularConfigurationError):
        return ShgValidity(shg.l_s, math.nan)
    return ShgValidity(shg.l_s, math.pi * w0**2 / geom.wavelength)
