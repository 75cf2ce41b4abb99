"""Longitudinal position filtering along z and the longitudinal diffraction
term L.

Filters are symmetric and centred at z = 0.  ``longitudinal_ft`` drops the
``(2 pi hbar)^{-1/2}`` constant, exactly like the aperture transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Union

import numpy as np

from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, quad, sinc

# Gaussian sqrt(F) decays as exp(-z^2 / (4 sigma^2)); beyond 14 sigma it is
# below 1e-21 of its peak.
_GAUSS_SUPPORT_SIGMAS = 14.0


class DiracFilterError(ValueError):
    """sqrt(delta) is undefined; use longitudinal_term, whose Dirac value is
    the sigma -> 0 limit of the Gaussian result."""


@dataclass(frozen=True)
class Dirac:
    def density(self, z):
        raise DiracFilterError("the Dirac filter has no pointwise density")


@dataclass(frozen=True)
class Gaussian:
    sigma_z: float

    def __post_init__(self):
        if not self.sigma_z > 0:
            raise ValueError("sigma_z must be > 0")

    def density(self, z):
        s = self.sigma_z
        return np.exp(-np.square(z) / (2.0 * s * s)) / (s * math.sqrt(2.0 * math.pi))

    def support(self):
        half = _GAUSS_SUPPORT_SIGMAS * self.sigma_z
        return -half, half


@dataclass(frozen=True)
class Uniform:
    delta_z: float

    def __post_init__(self):
        if not self.delta_z > 0:
            raise ValueError("delta_z must be > 0")

    def density(self, z):
        half = 0.5 * self.delta_z
        return np.where(np.abs(z) <= half, 1.0 / self.delta_z, 0.0)

    def support(self):
        half = 0.5 * self.delta_z
        return -half, half


LongitudinalFilter = Union[Dirac, Gaussian, Uniform]


def effective_delta_z(filt, alpha: float = 0.01) -> float:
    """Width of the interval outside of which the filter holds mass ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if isinstance(filt, Dirac):
        return 0.0
    if isinstance(filt, Uniform):
        return filt.delta_z
    if isinstance(filt, Gaussian):
        return 2.0 * NormalDist().inv_cdf(1.0 - 0.5 * alpha) * filt.sigma_z
    raise TypeError("unknown filter %r" % (filt,))


def longitudinal_ft(filt, dq):
    """``int sqrt(F_L(z)) exp(-i dq z) dz`` in closed form.

    Gaussian: ``(8 pi)^{1/4} sqrt(sigma) exp(-sigma^2 dq^2)``;
    Uniform: ``sqrt(dz) sinc(dq dz / 2)``.  Both are real because the filters
    are even.
    """
    dq = np.asarray(dq, dtype=float)
    if isinstance(filt, Dirac):
        raise DiracFilterError("sqrt(delta) is undefined; use longitudinal_term for the Dirac filter")
    if isinstance(filt, Gaussian):
        s = filt.sigma_z
        out = (8.0 * math.pi) ** 0.25 * math.sqrt(s) * np.exp(-s * s * dq * dq)
    elif isinstance(filt, Uniform):
        out = math.sqrt(filt.delta_z) * sinc(0.5 * dq * filt.delta_z)
    else:
        raise TypeError("unknown filter %r" % (filt,))
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def longitudinal_ft_quadrature(filt, dq: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> complex:
    """Direct adaptive quadrature of the same transform (independent route)."""
    if isinstance(filt, Dirac):
        raise DiracFilterError("sqrt(delta) is undefined; use longitudinal_term for the Dirac filter")
    lo, hi = filt.support()

    def integrand(z):
        return np.sqrt(filt.density(z)) * np.exp(-1j * dq * z)

    value, _ = quad(integrand, lo, hi, spec)
    return complex(value)


def longitudinal_term(filt, p, chi):
    """Longitudinal diffraction term L(p, chi) in (0, 1]."""
    dq = p * (1.0 - np.cos(chi))
    if isinstance(filt, Dirac):
        out = np.ones_like(np.asarray(dq, dtype=float))
    elif isinstance(filt, Gaussian):
        s = filt.sigma_z
        out = np.exp(-2.0 * s * s * dq * dq)
    elif isinstance(filt, Uniform):
        out = sinc(0.5 * dq * filt.delta_z) ** 2
    else:
        raise TypeError("unknown filter %r" % (filt,))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out
