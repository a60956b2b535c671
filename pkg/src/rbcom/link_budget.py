"""Received power, photodetector noise and Shannon capacity of the carrier link."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as const

from .errors import InvalidArgumentError
from .power_chain import ALPHA_AIR

__all__ = ["DetectorSpec", "LinkBudget", "received_power", "noise_variances", "capacity"]


@dataclass(frozen=True)
class DetectorSpec:
    """PIN photodetector front end.

    Attributes
    ----------
    responsivity : float
        A/W.
    bandwidth : float
        Electrical bandwidth B in Hz (set by the modulator).
    temperature : float
        K.
    load_resistance : float
        Ohm.
    background_current : float
        Background-light photocurrent I_bk in A.
    """

    responsivity: float = 0.6
    bandwidth: float = 800e6
    temperature: float = 295.0
    load_resistance: float = 10e3
    background_current: float = 5100e-6

    def __post_init__(self):
        for name in ("responsivity", "bandwidth", "temperature", "load_resistance"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        if self.background_current < 0:
            raise InvalidArgumentError("background_current must be >= 0")


@dataclass(frozen=True)
class LinkBudget:
    p_r: float
    sigma_shot2: float
    sigma_thermal2: float
    bandwidth: float
    signal_current: float

    @property
    def sigma_total2(self) -> float:
        return self.sigma_shot2 + self.sigma_thermal2

    @property
    def snr(self) -> float:
        return self.signal_current**2 / self.sigma_total2

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.snr) if self.snr > 0 else -math.inf

    @property
    def spectral_efficiency(self) -> float:
        """bit/s/Hz."""
        return math.log2(1.0 + self.snr)

    @property
    def capacity(self) -> float:
        """bit/s."""
        return self.bandwidth * self.spectral_efficiency


def received_power(p_2nu: float, eta_dev: float = 1.0, d: float = 0.0,
                   alpha_air: float = ALPHA_AIR, papr: float = 1.0) -> float:
    """Average optical power on the detector.

    The carrier crosses the air gap once, so it sees the square root of the
    round-trip air factor. ``papr`` converts the peak power to the average
    power; 1 gives the upper bound.
    """
    if p_2nu < 0 or eta_dev < 0 or d < 0:
        raise InvalidArgumentError("received_power inputs must be >= 0")
    if papr < 1:
        raise InvalidArgumentError("papr must be >= 1")
    return eta_dev * math.exp(-alpha_air * d) * p_2nu / papr


def noise_variances(det: DetectorSpec, p_r: float) -> tuple[float, float]:
    """(shot, thermal) noise current variances in A^2."""
    if p_r < 0:
        raise InvalidArgumentError("P_r must be >= 0")
    shot = 2.0 * const.e * (det.responsivity * p_r + det.background_current) * det.bandwidth
    thermal = 4.0 * const.k * det.temperature * det.bandwidth / det.load_resistance
    return shot, thermal


def capacity(det: DetectorSpec, p_r: float) -> LinkBudget:
    shot, thermal = noise_variances(det, p_r)
    return LinkBudget(p_r=p_r, sigma_shot2=shot, sigma_thermal2=thermal,
                      bandwidth=det.bandwidth, signal_current=det.responsivity * p_r)
