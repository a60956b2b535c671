"""
Mode structure of the resonator formed by two telecentric cat's-eye
retroreflectors separated by a free-space gap ``d``.

Axial coordinate ``z`` is measured along the unfolded single pass from the
rear mirror M1 of the transmitter-side retroreflector:

    z = 0            M1 (flat rear mirror, beam waist)
    z = l            lens L1
    z = l + f        pupil of RR1 / gain medium
    z = l + f + d    pupil of RR2
    z = l + 2f + d   lens L2
    z = 2l + 2f + d  M2 (flat rear mirror)
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import optics_matrix as om
from .errors import InvalidArgumentError, SingularConfigurationError, UnstableResonatorError

__all__ = [
    "ResonatorGeometry",
    "EquivalentResonator",
    "Stability",
    "ComplexBeamParam",
    "ModeStructure",
    "equivalent_parameters",
    "classify_stability",
    "fundamental_waist_at_m1",
    "propagate_q",
    "q_profile",
    "w00_profile",
    "mode_radius_profile",
    "beam_propagation_factor",
    "receiver_beam_diameter",
    "allowed_modes",
    "CONFOCAL_RTOL",
]

# |d - 2 f_RR| below this fraction of f_RR counts as the confocal point
CONFOCAL_RTOL = 1e-9


@dataclass(frozen=True)
class ResonatorGeometry:
    """Two-retroreflector resonator.

    Parameters
    ----------
    f : float
        Focal length of both cat's-eye lenses (m).
    l : float
        Lens to rear-mirror interval (m).
    d : float
        Transmission distance between the two pupils (m).
    wavelength : float
        Fundamental wavelength (m).
    a_g : float
        Gain-medium aperture radius (m).
    """

    f: float
    l: float
    d: float
    wavelength: float = 1064e-9
    a_g: float = 3e-3

    def __post_init__(self):
        if not self.f > 0:
            raise InvalidArgumentError(f"f must be > 0, got {self.f}")
        if self.l < 0:
            raise InvalidArgumentError(f"l must be >= 0, got {self.l}")
        if self.d < 0:
            raise InvalidArgumentError(f"d must be >= 0, got {self.d}")
        if not self.wavelength > 0:
            raise InvalidArgumentError(f"wavelength must be > 0, got {self.wavelength}")
        if not self.a_g > 0:
            raise InvalidArgumentError(f"a_g must be > 0, got {self.a_g}")

    @classmethod
    def from_f_rr(cls, f: float, f_rr: float, d: float, wavelength: float = 1064e-9,
                  a_g: float = 3e-3) -> "ResonatorGeometry":
        return cls(f=f, l=om.interval_from_f_rr(f, f_rr), d=d, wavelength=wavelength, a_g=a_g)

    @property
    def f_rr(self) -> float:
        return om.f_rr_from_interval(self.f, self.l)

    @property
    def z_l1(self) -> float:
        return self.l

    @property
    def z_gain(self) -> float:
        return self.l + self.f

    @property
    def z_pupil2(self) -> float:
        return self.l + self.f + self.d

    @property
    def z_l2(self) -> float:
        return self.l + 2.0 * self.f + self.d

    @property
    def z_m2(self) -> float:
        return 2.0 * self.l + 2.0 * self.f + self.d

    def single_pass_matrix(self) -> om.RayMatrix:
        return om.single_pass_matrix(self.f, self.l, self.d)

    def partial_matrix(self, z: float) -> om.RayMatrix:
        """Composed matrix from M1 (z = 0) to the plane ``z``."""
        if not 0.0 <= z <= self.z_m2:
            raise InvalidArgumentError(f"z={z} outside [0, {self.z_m2}]")
        elems = [om.free_space(min(z, self.z_l1))]
        if z > self.z_l1:
            elems += [om.thin_lens(self.f), om.free_space(min(z, self.z_l2) - self.z_l1)]
        if z > self.z_l2:
            elems += [om.thin_lens(self.f), om.free_space(z - self.z_l2)]
        return om.compose(elems)


@dataclass(frozen=True)
class EquivalentResonator:
    g1_star: float
    g2_star: float
    L_star: float

    @property
    def g_product(self) -> float:
        return self.g1_star * self.g2_star


class Stability(enum.Enum):
    STABLE = "stable"
    CONFOCAL_BOUNDARY = "confocal"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class ComplexBeamParam:
    """Gaussian-beam q-parameter, ``1/q = 1/R - j lambda/(pi w^2)``."""

    q: complex
    wavelength: float

    def __post_init__(self):
        if not self.q.imag > 0:
            raise InvalidArgumentError(f"Im(q) must be > 0 for a physical beam, got {self.q}")

    @property
    def radius(self) -> float:
        return math.sqrt(-self.wavelength / (math.pi * (1.0 / self.q).imag))

    @property
    def curvature(self) -> float:
        """1/R in 1/m; zero at a waist."""
        return (1.0 / self.q).real

    @property
    def rayleigh_range(self) -> float:
        return self.q.imag

    @property
    def waist_offset(self) -> float:
        """Signed distance from the waist (positive past the waist)."""
        return self.q.real


def equivalent_parameters(geom: ResonatorGeometry) -> EquivalentResonator:
    """Equivalent two-mirror g-parameters and length read off the single-pass matrix."""
    m = geom.single_pass_matrix()
    return EquivalentResonator(g1_star=m.a, g2_star=m.d, L_star=m.b)


def classify_stability(geom: ResonatorGeometry) -> Stability:
    f_rr = geom.f_rr
    if 0 < f_rr < math.inf and abs(geom.d - 2.0 * f_rr) < CONFOCAL_RTOL * f_rr:
        return Stability.CONFOCAL_BOUNDARY
    eq = equivalent_parameters(geom)
    if 0.0 < eq.g_product < 1.0:
        return Stability.STABLE
    return Stability.UNSTABLE


def _require_stable(geom: ResonatorGeometry) -> EquivalentResonator:
    stab = classify_stability(geom)
    if stab is Stability.UNSTABLE:
        raise UnstableResonatorError(
            f"resonator unstable (d={geom.d} m, f_RR={geom.f_rr} m): need 0 < g1*g2* < 1")
    eq = equivalent_parameters(geom)
    if stab is Stability.CONFOCAL_BOUNDARY or eq.g1_star == 0.0:
        raise SingularConfigurationError(
            f"g1* = 0 at d = 2 f_RR = {geom.d} m; TEM00 radius formula is singular")
    return eq


def fundamental_waist_at_m1(geom: ResonatorGeometry) -> float:
    """TEM00 radius (m) on the flat mirror M1, where the beam has its waist."""
    eq = _require_stable(geom)
    g1, g2 = eq.g1_star, eq.g2_star
    root = math.sqrt(g2 / (g1 * (1.0 - g1 * g2)))
    return math.sqrt(geom.wavelength * abs(eq.L_star) / math.pi * root)


def _q0(geom: ResonatorGeometry) -> complex:
    w0 = fundamental_waist_at_m1(geom)
    return 1j * math.pi * w0**2 / geom.wavelength


def _through_lens(q, f):
    return q / (-q / f + 1.0)


def q_profile(geom: ResonatorGeometry, z) -> np.ndarray:
    """Vectorised piecewise q(z) for ``z`` in [0, z_M2]."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > geom.z_m2):
        raise InvalidArgumentError(f"z outside [0, {geom.z_m2}]")
    q0 = _q0(geom)
    q_l1 = q0 + geom.z_l1
    q_after_l1 = _through_lens(q_l1, geom.f)
    q_l2 = q_after_l1 + (geom.z_l2 - geom.z_l1)
    q_after_l2 = _through_lens(q_l2, geom.f)
    return np.where(
        z <= geom.z_l1,
        q0 + z,
        np.where(z <= geom.z_l2, q_after_l1 + (z - geom.z_l1), q_after_l2 + (z - geom.z_l2)),
    )


def propagate_q(geom: ResonatorGeometry, z: float) -> ComplexBeamParam:
    """q-parameter of the TEM00 mode at axial position ``z``.

    Raises
    ------
    InvalidArgumentError
        If ``z`` lies outside [0, z_M2].
    UnstableResonatorError, SingularConfigurationError
        If the geometry has no usable eigenmode.
    """
    return ComplexBeamParam(complex(q_profile(geom, z)), geom.wavelength)


def w00_profile(geom: ResonatorGeometry, z) -> np.ndarray:
    q = q_profile(geom, z)
    return np.sqrt(-geom.wavelength / (np.pi * (1.0 / q).imag))


def beam_propagation_factor(geom: ResonatorGeometry) -> float:
    """M = a_g / w00(l + f): the gain aperture sets how many modes fit."""
    return geom.a_g / float(w00_profile(geom, geom.z_gain))


def allowed_modes(m_squared: float) -> list[tuple[int, int]]:
    """Index pairs (m, n) >= 0 with 2m + n + 1 <= floor(M^2)."""
    top = math.floor(m_squared)
    return [(m, n) for m in range(top) for n in range(top) if 2 * m + n + 1 <= top]


def receiver_beam_diameter(geom: ResonatorGeometry) -> float:
    """Multimode beam diameter 2 M w00 at the pupil of RR2 (m)."""
    return 2.0 * beam_propagation_factor(geom) * float(w00_profile(geom, geom.z_pupil2))


@dataclass(frozen=True)
class ModeStructure:
    geometry: ResonatorGeometry
    z: np.ndarray = field(repr=False)
    w00: np.ndarray = field(repr=False)
    M: float

    @property
    def m_squared(self) -> float:
        return self.M**2

    @property
    def w(self) -> np.ndarray:
        return self.M * self.w00

    @property
    def supports_fundamental(self) -> bool:
        return self.M >= 1.0

    @cached_property
    def modes(self) -> list[tuple[int, int]]:
        return allowed_modes(self.m_squared)

    @property
    def mode_count_bound(self) -> int:
        return len(self.modes)

    def w00_at(self, z):
        return w00_profile(self.geometry, z)

    def w_at(self, z):
        return self.M * w00_profile(self.geometry, z)


def mode_radius_profile(geom: ResonatorGeometry, samples: int = 2048) -> ModeStructure:
    """TEM00 and multimode radius on a uniform grid over [0, z_M2]."""
    if samples < 2:
        raise InvalidArgumentError("samples must be >= 2")
    z = np.linspace(0.0, geom.z_m2, samples)
    return ModeStructure(geometry=geom, z=z, w00=w00_profile(geom, z),
                         M=beam_propagation_factor(geom))
