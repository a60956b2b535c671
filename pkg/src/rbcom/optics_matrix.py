"""
Paraxial 2x2 ray-transfer (ABCD) matrices.

Rays are column vectors ``(r, alpha)``: transverse displacement in metres and
slope in radians. Elements are listed in the order the light meets them;
:func:`compose` multiplies them right-to-left.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "RayMatrix",
    "CatsEyeSpec",
    "identity",
    "free_space",
    "thin_lens",
    "flat_mirror",
    "compose",
    "cats_eye_elements",
    "cats_eye_matrix",
    "f_rr_from_interval",
    "interval_from_f_rr",
    "single_pass_elements",
    "single_pass_matrix",
]


@dataclass(frozen=True)
class RayMatrix:
    """Immutable ABCD matrix.

    ``b`` is a length (m), ``c`` an inverse length (1/m); ``a`` and ``d`` are
    dimensionless.
    """

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_array(cls, m: np.ndarray) -> "RayMatrix":
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "RayMatrix") -> "RayMatrix":
        return RayMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply_ray(self, r: float, alpha: float) -> tuple[float, float]:
        """Map a ray ``(r, alpha)`` through the element."""
        return self.a * r + self.b * alpha, self.c * r + self.d * alpha

    def apply_q(self, q: complex) -> complex:
        """ABCD law for the Gaussian beam parameter: q' = (Aq + B)/(Cq + D)."""
        return (self.a * q + self.b) / (self.c * q + self.d)

    def allclose(self, other: "RayMatrix", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.as_array(), other.as_array(), rtol=rtol, atol=atol))


def identity() -> RayMatrix:
    return RayMatrix(1.0, 0.0, 0.0, 1.0)


def free_space(length: float) -> RayMatrix:
    """Propagation over ``length`` metres of free space (n = 1)."""
    return RayMatrix(1.0, float(length), 0.0, 1.0)


def thin_lens(focal_length: float) -> RayMatrix:
    if focal_length == 0:
        raise InvalidArgumentError("thin lens focal length must be non-zero")
    return RayMatrix(1.0, 0.0, -1.0 / focal_length, 1.0)


def flat_mirror() -> RayMatrix:
    """Plane mirror in the unfolded-path convention: the identity."""
    return identity()


def compose(elements: Sequence[RayMatrix] | Iterable[RayMatrix]) -> RayMatrix:
    """System matrix of ``elements`` traversed in listed order.

    The first element met by the ray ends up rightmost in the product.

    Raises
    ------
    InvalidArgumentError
        If ``elements`` is empty.
    """
    elements = list(elements)
    if not elements:
        raise InvalidArgumentError("compose() needs at least one element")
    out = elements[0]
    for m in elements[1:]:
        out = m @ out
    return out


@dataclass(frozen=True)
class CatsEyeSpec:
    """Telecentric cat's-eye retroreflector: lens of focal length ``f`` at
    distance ``l`` from a flat rear mirror, pupil at the lens's outer focus."""

    f: float
    l: float

    def __post_init__(self):
        if not self.f > 0:
            raise InvalidArgumentError(f"cat's-eye focal length must be > 0, got {self.f}")
        if self.l < 0:
            raise InvalidArgumentError(f"cat's-eye interval must be >= 0, got {self.l}")

    @property
    def f_rr(self) -> float:
        return f_rr_from_interval(self.f, self.l)

    @property
    def is_ideal(self) -> bool:
        """True when l == f, i.e. the retroreflector images with no residual power."""
        return self.l == self.f


def f_rr_from_interval(f: float, l: float) -> float:
    """Equivalent focal length of the cat's eye, 1/(2l/f^2 - 2/f).

    Returns ``math.inf`` for the ideal case l == f.
    """
    power = 2.0 * (l - f) / f**2
    if power == 0.0:
        return math.inf
    return 1.0 / power


def interval_from_f_rr(f: float, f_rr: float) -> float:
    """Inverse of :func:`f_rr_from_interval`: l = f + f^2 / (2 f_RR)."""
    if math.isinf(f_rr):
        return f
    if f_rr == 0:
        raise InvalidArgumentError("f_RR must be non-zero")
    return f + f**2 / (2.0 * f_rr)


def cats_eye_elements(spec: CatsEyeSpec) -> list[RayMatrix]:
    """The seven elements pupil -> lens -> rear mirror -> lens -> pupil, in
    the order the ray meets them."""
    return [
        free_space(spec.f),
        thin_lens(spec.f),
        free_space(spec.l),
        flat_mirror(),
        free_space(spec.l),
        thin_lens(spec.f),
        free_space(spec.f),
    ]


def cats_eye_matrix(spec: CatsEyeSpec) -> RayMatrix:
    """Closed-form round-trip matrix of the cat's eye seen from its pupil.

    Equals an imaging element (-I) followed by a lens of focal length f_RR:
    ``lens(f_RR) @ -I = [[-1, 0], [1/f_RR, -1]]``.
    """
    inv_f_rr = 2.0 * (spec.l - spec.f) / spec.f**2  # 2l/f^2 - 2/f without cancellation
    return RayMatrix(-1.0, 0.0, inv_f_rr, -1.0)


def single_pass_elements(f: float, l: float, d: float) -> list[RayMatrix]:
    """Elements from mirror M1 to mirror M2, in propagation order.

    The two inner focal lengths and the gap d merge into a single free-space
    segment of length 2f + d.
    """
    return [
        flat_mirror(),
        free_space(l),
        thin_lens(f),
        free_space(2.0 * f + d),
        thin_lens(f),
        free_space(l),
        flat_mirror(),
    ]


def single_pass_matrix(f: float, l: float, d: float) -> RayMatrix:
    """Closed-form single-pass matrix M1 -> M2 of the two-cat's-eye resonator."""
    if not f > 0:
        raise InvalidArgumentError(f"f must be > 0, got {f}")
    if d < 0 or l < 0:
        raise InvalidArgumentError("d and l must be >= 0")
    # written in e = (l - f)/f, which avoids cancellation near the ideal l = f
    e = (l - f) / f
    a = -1.0 + d * e / f
    b = -2.0 * f * e + d * e * e
    c = d / f**2
    return RayMatrix(a, b, c, a)
