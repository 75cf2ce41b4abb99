"""Momentum <-> (modulus, diffraction angles) change of variables.

Momenta are wavenumbers in rad/um.  The map ``to_angles`` is defined on the
half-space ``pz > 0`` only; its inverse covers the open square
``|theta_x|, |theta_y| < pi/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HBAR = 6.62607015e-34 / (2.0 * math.pi)  # J s
C_LIGHT = 299792458.0  # m / s
_PER_UM_TO_PER_M = 1e6

HALF_PI = 0.5 * math.pi


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class MomentumVec:
    px: float
    py: float
    pz: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.px, self.py, self.pz)):
            raise DomainError("momentum components must be finite")

    @property
    def modulus(self) -> float:
        return math.sqrt(self.px**2 + self.py**2 + self.pz**2)


@dataclass(frozen=True)
class MomentumDirection:
    p: float
    theta_x: float
    theta_y: float

    def __post_init__(self):
        if not self.p > 0:
            raise DomainError("momentum modulus must be > 0")
        if not (abs(self.theta_x) < HALF_PI and abs(self.theta_y) < HALF_PI):
            raise DomainError("diffraction angles must lie in (-pi/2, pi/2)")


@dataclass(frozen=True)
class ParticleKinematics:
    """Incident particle: rest mass (kg, 0 for photons) and wavenumber."""

    mass: float
    p0_modulus: float

    def __post_init__(self):
        if self.mass < 0:
            raise DomainError("mass must be >= 0")
        if not self.p0_modulus > 0:
            raise DomainError("p0_modulus must be > 0")

    @classmethod
    def from_wavelength(cls, wavelength_um: float, mass: float = 0.0) -> "ParticleKinematics":
        return cls(mass=mass, p0_modulus=2.0 * math.pi / wavelength_um)

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.p0_modulus


def deflection_angle(theta_x, theta_y):
    """Angle between the z axis and the direction (theta_x, theta_y)."""
    tx = np.tan(theta_x)
    ty = np.tan(theta_y)
    # arctan form is better conditioned near 0 than arccos of the cosine
    return np.arctan(np.hypot(tx, ty))


def cos_deflection(theta_x, theta_y):
    """cos(chi) = (1 + tan^2 tx + tan^2 ty)^-1/2, written with cosines so it
    stays accurate as either angle approaches +-pi/2."""
    cx, sx = np.cos(theta_x), np.sin(theta_x)
    cy, sy = np.cos(theta_y), np.sin(theta_y)
    cxy = cx * cy
    return np.abs(cxy) / np.sqrt(cxy * cxy + (sx * cy) ** 2 + (cx * sy) ** 2)


def from_angles_array(p, theta_x, theta_y):
    """Vectorised inverse map; returns ``(px, py, pz)``."""
    tx = np.tan(theta_x)
    ty = np.tan(theta_y)
    pz = p / np.sqrt(1.0 + tx * tx + ty * ty)
    return pz * tx, pz * ty, pz


def to_angles_array(px, py, pz):
    """Vectorised forward map; ``pz`` must be positive."""
    if np.any(np.asarray(pz) <= 0):
        raise DomainError("the angle variables are defined for pz > 0 only")
    p = np.sqrt(px * px + py * py + pz * pz)
    return p, np.arctan2(px, pz), np.arctan2(py, pz)


def to_angles(p: MomentumVec) -> MomentumDirection:
    if not p.pz > 0:
        raise DomainError("the angle variables are defined for pz > 0 only")
    modulus, tx, ty = to_angles_array(p.px, p.py, p.pz)
    return MomentumDirection(float(modulus), float(tx), float(ty))


def from_angles(d: MomentumDirection) -> MomentumVec:
    px, py, pz = from_angles_array(d.p, d.theta_x, d.theta_y)
    return MomentumVec(float(px), float(py), float(pz))


def angular_factor(theta_x, theta_y):
    """|Jacobian| / p^2 of the inverse map: cos(chi) / (1 - sin^2 tx sin^2 ty)."""
    cx, sx = np.cos(theta_x), np.sin(theta_x)
    cy = np.cos(theta_y)
    # 1 - sx^2 sy^2 == cx^2 + sx^2 cy^2 without cancellation near the corners
    return cos_deflection(theta_x, theta_y) / (cx * cx + (sx * cy) ** 2)


def _jacobian_det(p, tx, ty, h):
    cols = []
    for i in range(3):
        plus = [p, tx, ty]
        minus = [p, tx, ty]
        step = h * p if i == 0 else h
        plus[i] += step
        minus[i] -= step
        if i > 0 and (abs(plus[i]) >= HALF_PI or abs(minus[i]) >= HALF_PI):
            raise DomainError("finite-difference stencil leaves the angle domain")
        fp = np.array(from_angles_array(*plus))
        fm = np.array(from_angles_array(*minus))
        cols.append((fp - fm) / (2.0 * step))
    return np.linalg.det(np.column_stack(cols))


def jacobian_oracle(d: MomentumDirection, h: float = 1e-5, richardson: bool = False) -> float:
    """Central-difference estimate of |det d(px,py,pz)/d(p,tx,ty)| / p^2.

    With ``richardson`` the steps ``h`` and ``h/2`` are combined to cancel the
    leading O(h^2) truncation term.
    """
    det = abs(_jacobian_det(d.p, d.theta_x, d.theta_y, h))
    if richardson:
        det_half = abs(_jacobian_det(d.p, d.theta_x, d.theta_y, 0.5 * h))
        det = (4.0 * det_half - det) / 3.0
    return det / d.p**2


def energy(kin: ParticleKinematics, p_modulus: float) -> float:
    """Relativistic energy in joules for a wavenumber ``p_modulus`` (rad/um)."""
    if p_modulus < 0:
        raise DomainError("momentum modulus must be >= 0")
    momentum = HBAR * p_modulus * _PER_UM_TO_PER_M
    mc = kin.mass * C_LIGHT
    return C_LIGHT * math.sqrt(mc * mc + momentum * momentum)
