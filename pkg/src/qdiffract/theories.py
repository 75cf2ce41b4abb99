"""Relative-intensity predictions of the quantum model and of the classical
scalar theories (Fresnel-Kirchhoff, Rayleigh-Sommerfeld 1 and 2), plus the
Sommerfeld exact-slit formula.

Every prediction is assembled from the same components (T, L, Gamma and the
obliquity factor), so ratio identities such as QM/RS1 = 1/cos(chi) hold to
rounding error by construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .aperture import Rectangle, transverse_term
from .kinematics import angular_factor, cos_deflection, deflection_angle
from .longitudinal import Dirac, longitudinal_term
from .numerics import sinc


class Theory(str, enum.Enum):
    QM = "qm"
    FK = "fk"
    RS1 = "rs1"
    RS2 = "rs2"
    SOMMERFELD = "sommerfeld"

    @property
    def label(self) -> str:
        return {"qm": "QM", "fk": "FK", "rs1": "RS1", "rs2": "RS2", "sommerfeld": "Sommerfeld"}[self.value]


CLASSICAL = (Theory.FK, Theory.RS1, Theory.RS2)


class TheoryError(ValueError):
    pass


def _obliquity_from_cos(theory: Theory, c):
    if theory is Theory.FK:
        return 0.5 * (1.0 + c)
    if theory is Theory.RS1:
        return c
    if theory is Theory.RS2:
        return np.ones_like(c) if isinstance(c, np.ndarray) else 1.0
    raise TheoryError(f"{theory.label} has no obliquity factor")


def obliquity(theory: Theory, chi):
    """Obliquity factor Omega(chi) of a classical theory."""
    theory = Theory(theory)
    return _obliquity_from_cos(theory, np.cos(chi))


def classical_relative_intensity(theory: Theory, shape, p, theta_x, theta_y):
    """Omega(chi)^2 * T for FK, RS1 or RS2."""
    theory = Theory(theory)
    omega = _obliquity_from_cos(theory, cos_deflection(theta_x, theta_y))
    return omega * omega * transverse_term(shape, p, theta_x, theta_y)


def quantum_relative_intensity(filt, shape, p, theta_x, theta_y):
    """Gamma * T * L of the quantum-measurement model."""
    gamma = angular_factor(theta_x, theta_y)
    t = transverse_term(shape, p, theta_x, theta_y)
    ell = longitudinal_term(filt, p, deflection_angle(theta_x, theta_y))
    return gamma * t * ell


def sommerfeld_slit_relative_intensity(half_width_a: float, p, theta):
    """In-plane intensity for a slit from the exact wedge solution:
    ``cos(theta) * sinc^2(a p sin theta) + [2 a p cos(theta / 2)]^-2``.

    Not normalised: the forward value is ``1 + (2 a p)^-2``.
    """
    t = sinc(half_width_a * p * np.sin(theta)) ** 2
    return np.cos(theta) * t + (2.0 * half_width_a * p * np.cos(0.5 * theta)) ** -2


@dataclass(frozen=True)
class PredictionPoint:
    """All predictions and their components for one direction."""

    theta_x: float
    theta_y: float
    T: float
    L: float
    gamma: float
    omega2: dict
    intensity: dict


def predict(shape, filt, p: float, theta_x, theta_y, theories=tuple(Theory)):
    """Evaluate the requested theories on broadcastable angle arrays.

    Returns a dict with the component arrays ``T``, ``L``, ``Gamma``,
    ``Omega2`` (per classical theory) and ``I`` (per theory).
    """
    theories = [Theory(t) for t in theories]
    theta_x = np.asarray(theta_x, dtype=float)
    theta_y = np.asarray(theta_y, dtype=float)
    c = cos_deflection(theta_x, theta_y)
    chi = deflection_angle(theta_x, theta_y)
    t = transverse_term(shape, p, theta_x, theta_y)
    ell = longitudinal_term(filt, p, chi)
    gamma = angular_factor(theta_x, theta_y)
    omega2 = {th: _obliquity_from_cos(th, c) ** 2 for th in CLASSICAL}
    out = {}
    for th in theories:
        if th is Theory.QM:
            out[th] = gamma * t * ell
        elif th is Theory.SOMMERFELD:
            if not isinstance(shape, Rectangle):
                raise TheoryError("the Sommerfeld slit formula needs a rectangular aperture")
            if np.any(theta_y != 0.0):
                raise TheoryError("the Sommerfeld slit formula covers the in-plane slice only")
            # rescaled by the forward value so that every column starts at 1
            forward = sommerfeld_slit_relative_intensity(shape.half_width_a, p, 0.0)
            out[th] = sommerfeld_slit_relative_intensity(shape.half_width_a, p, theta_x) / forward
        else:
            out[th] = omega2[th] * t
    return {"T": t, "L": ell, "Gamma": gamma, "Omega2": omega2, "I": out}


def prediction_point(shape, filt, p: float, theta_x: float, theta_y: float, theories=tuple(Theory)):
    res = predict(shape, filt, p, theta_x, theta_y, theories)
    return PredictionPoint(
        theta_x=float(theta_x),
        theta_y=float(theta_y),
        T=float(res["T"]),
        L=float(res["L"]),
        gamma=float(res["Gamma"]),
        omega2={k: float(v) for k, v in res["Omega2"].items()},
        intensity={k: float(v) for k, v in res["I"].items()},
    )


def theory_ordering_check(shape, p: float, theta: float) -> bool:
    """RS2 >= FK >= QM(Dirac) >= RS1 in the plane theta_y = 0.

    Inequalities are strict for theta != 0 wherever T > 0; at theta = 0 or at
    a zero of T all four predictions coincide.
    """
    if not 0.0 <= theta < 0.5 * math.pi:
        raise ValueError("theta must lie in [0, pi/2)")
    res = predict(shape, Dirac(), p, theta, 0.0, (Theory.RS2, Theory.FK, Theory.QM, Theory.RS1))
    i = res["I"]
    vals = [float(i[Theory.RS2]), float(i[Theory.FK]), float(i[Theory.QM]), float(i[Theory.RS1])]
    if theta == 0.0 or float(res["T"]) == 0.0:
        return all(vals[k] >= vals[k + 1] for k in range(3))
    return all(vals[k] > vals[k + 1] for k in range(3))
