"""
Closed-form round-trip diffraction loss of the TEM00 mode clipped by the
gain-medium aperture.

All loss is attributed to the gain aperture. The retroreflector on the
transmitter side has a vanishing B element and contributes nothing; the
right-hand side is replaced by an equivalent empty resonator whose mirrors
coincide with the beam's phase fronts at the gain medium and at the RR2
pupil, and whose length is the transmission distance ``d``.

Radii of curvature are carried together with their inverse. A flat phase
front has ``rho = math.inf`` and inverse exactly ``0.0``; the loss formulas
only ever use the inverses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError
from .resonator_modes import ResonatorGeometry, q_profile

__all__ = [
    "EquivalentEmptyResonator",
    "roc_from_q",
    "equivalent_mirror_rocs",
    "equivalent_fresnel",
    "fresnel_number",
    "equivalent_g",
    "round_trip_diffraction_loss",
    "diffraction_loss_from_equivalent",
]


@dataclass(frozen=True)
class EquivalentEmptyResonator:
    rho1: float
    rho2: float
    inv_rho1: float
    inv_rho2: float
    d: float
    a_g: float
    N_prime: float
    g1_prime: float
    g2_prime: float

    @property
    def stability_argument(self) -> float:
        g1, g2 = self.g1_prime, self.g2_prime
        ratio = g1 / g2 if g2 != 0.0 else 1.0  # g1' == g2' by construction
        return ratio * (1.0 - g1 * g2)

    @property
    def is_stable(self) -> bool:
        return self.stability_argument >= 0.0


def roc_from_q(q: complex, sign: float = 1.0) -> tuple[float, float]:
    """Signed ROC ``sign / Re[1/q]`` and its inverse. A waist gives (inf, 0.0)."""
    inv = sign * (1.0 / q).real
    if inv == 0.0:
        return math.inf, 0.0
    return 1.0 / inv, inv


def equivalent_mirror_rocs(geom: ResonatorGeometry) -> tuple[float, float]:
    """(rho1, rho2): rho1 = -1/Re[1/q(l+f)], rho2 = 1/Re[1/q(l+f+d)]."""
    q1, q2 = q_profile(geom, [geom.z_gain, geom.z_pupil2])
    return roc_from_q(complex(q1), -1.0)[0], roc_from_q(complex(q2), 1.0)[0]


def fresnel_number(a_g: float, wavelength: float, d: float, inv_rho2: float) -> float:
    """N' = a_g^2 / (2 lambda d (1 - d/rho2)); infinite where the bracket vanishes."""
    denom = 2.0 * wavelength * d * (1.0 - d * inv_rho2)
    return math.inf if denom == 0.0 else a_g**2 / denom


def equivalent_g(d: float, inv_rho1: float, inv_rho2: float) -> float:
    """g' = 1 - 2d (1/rho1 + 1/rho2 - d/(rho1 rho2))."""
    return 1.0 - 2.0 * d * (inv_rho1 + inv_rho2 - d * inv_rho1 * inv_rho2)


def equivalent_fresnel(geom: ResonatorGeometry) -> EquivalentEmptyResonator:
    """Equivalent Fresnel number N' and g-parameters of the empty resonator.

    N' may be negative; only its magnitude enters the loss.
    """
    q1, q2 = q_profile(geom, [geom.z_gain, geom.z_pupil2])
    rho1, k1 = roc_from_q(complex(q1), -1.0)
    rho2, k2 = roc_from_q(complex(q2), 1.0)
    d = geom.d
    n_prime = fresnel_number(geom.a_g, geom.wavelength, d, k2)
    g = equivalent_g(d, k1, k2)
    return EquivalentEmptyResonator(rho1, rho2, k1, k2, d, geom.a_g, n_prime, g, g)


def diffraction_loss_from_equivalent(eq: EquivalentEmptyResonator) -> float:
    """Survival factor 1 - exp(-2 pi |N'| sqrt(g1'(1 - g1'g2')/g2')) in [0, 1].

    An equivalent resonator outside its own stability range returns 0.0
    (total loss).
    """
    arg = eq.stability_argument
    if arg < 0.0:
        return 0.0
    exponent = 2.0 * math.pi * abs(eq.N_prime) * math.sqrt(arg)
    if math.isnan(exponent):
        raise InvalidArgumentError("diffraction exponent undefined (infinite N' with g' = +-1)")
    return min(1.0, max(0.0, -math.expm1(-exponent)))


def round_trip_diffraction_loss(geom: ResonatorGeometry) -> float:
    """Round-trip survival factor Gamma_diff of the TEM00 mode (1 = lossless)."""
    return diffraction_loss_from_equivalent(equivalent_fresnel(geom))
