"""Momentum probability densities of the transitional and final states.

The final-state density in Cartesian wavenumbers is

    f(p) = N^-1 [pz > 0] peak(|p| - p0) |J_T(px, py)|^2 |J_L(pz - p0)|^2

and in (p, theta_x, theta_y) it picks up the factor ``p^2 Gamma``.  The
aperture and longitudinal transforms carry the package-wide convention of
dropped ``2 pi hbar`` constants; the normalisation N absorbs them, so every
density here is properly normalised.

The angular integrals use panelled Gauss-Legendre rules whose panel width
follows the lobe spacing ``pi / (extent * p)`` of the aperture pattern, with
geometrically graded panels towards +-pi/2 where Gamma has an integrable
singularity at the corners of the angle square.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass

import numpy as np

from .aperture import aperture_integral, area, transverse_ft
from .kinematics import angular_factor, cos_deflection
from .longitudinal import Dirac, DiracFilterError, Gaussian, Uniform, longitudinal_ft
from .numerics import DEFAULT_QUADRATURE, QuadratureSpec, gauss_legendre_nodes, quad

HALF_PI = 0.5 * math.pi
PEAK_HALF_WIDTH = 5.0  # window is p0 +- 5 delta_p
COLLAPSE_THRESHOLD = 1e-3  # delta_p / p0 below this uses the narrow-peak limit
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Transitional state (just after the position measurement)
# ---------------------------------------------------------------------------


def transitional_transverse_pdf(shape, px, py):
    """Density of (Px, Py) after the position measurement, in (rad/um)^-2.

    ``|FT of sqrt(F_T)|^2 / (2 pi)^2``; normalised to one by Parseval.
    """
    return np.abs(transverse_ft(shape, px, py)) ** 2 / _TWO_PI**2


def transitional_longitudinal_pdf(filt, pz, p0: float):
    """Density of Pz after the position measurement, in (rad/um)^-1.

    For a Gaussian filter of width sigma this is a Gaussian centred at p0 with
    standard deviation ``1 / (2 sigma)``.
    """
    if isinstance(filt, Dirac):
        raise DiracFilterError(
            "the transitional state is undefined for a Dirac filter; use a Gaussian and let sigma -> 0"
        )
    return np.asarray(longitudinal_ft(filt, np.asarray(pz) - p0)) ** 2 / _TWO_PI


def transitional_joint_pdf(shape, filt, p0: float, px, py, pz):
    """Joint density; it factorises into the two marginals above."""
    return transitional_transverse_pdf(shape, px, py) * transitional_longitudinal_pdf(filt, pz, p0)


def pz_nonpositive_mass(filt, p0: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """P(Pz <= 0) in the transitional state."""
    if isinstance(filt, Dirac):
        raise DiracFilterError("the transitional state is undefined for a Dirac filter")
    if isinstance(filt, Gaussian):
        std = 0.5 / filt.sigma_z
        lo = p0 - 40.0 * std
        if lo >= 0.0:
            return 0.0
        value, _ = quad(lambda pz: transitional_longitudinal_pdf(filt, pz, p0), lo, 0.0, spec)
        return float(value)
    if isinstance(filt, Uniform):
        # (1/pi) int_{u0}^inf sin^2 u / u^2 du, u0 = p0 dz / 2, by parts:
        # sin^2(u0)/u0 + pi/2 - Si(2 u0)
        from scipy.special import sici

        u0 = 0.5 * p0 * filt.delta_z
        if u0 == 0.0:
            return 0.5
        si, _ = sici(2.0 * u0)
        return float((math.sin(u0) ** 2 / u0 + HALF_PI - si) / math.pi)
    raise TypeError("unknown filter %r" % (filt,))


def pz_positive_mass(shape, filt, p0: float) -> float:
    """P(Pz > 0) in the transitional state (the shape does not enter)."""
    return 1.0 - pz_nonpositive_mass(filt, p0)


# ---------------------------------------------------------------------------
# Final state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentumPeak:
    """Normalised Gaussian peak in |p| - p0, truncated at +-5 delta_p."""

    p0: float
    delta_p: float

    def __post_init__(self):
        if not self.p0 > 0:
            raise ValueError("p0 must be > 0")
        if not self.delta_p > 0:
            raise ValueError("delta_p must be > 0")
        if self.delta_p > 0.05 * self.p0:
            warnings.warn("delta_p exceeds 5% of p0; the narrow-peak picture no longer applies", stacklevel=2)

    @property
    def window(self) -> tuple[float, float]:
        return self.p0 - PEAK_HALF_WIDTH * self.delta_p, self.p0 + PEAK_HALF_WIDTH * self.delta_p

    def __call__(self, p):
        u = (np.asarray(p, dtype=float) - self.p0) / self.delta_p
        norm = self.delta_p * math.sqrt(_TWO_PI) * math.erf(PEAK_HALF_WIDTH / math.sqrt(2.0))
        return np.where(np.abs(u) <= PEAK_HALF_WIDTH, np.exp(-0.5 * u * u) / norm, 0.0)


@dataclass(frozen=True)
class AngleRule:
    """Tensor Gauss-Legendre rule on (-pi/2, pi/2)^2."""

    theta_x: np.ndarray
    weight_x: np.ndarray
    theta_y: np.ndarray
    weight_y: np.ndarray

    @property
    def size(self) -> int:
        return self.theta_x.size * self.theta_y.size


def _axis_rule(lobes: float, nodes: int, panels_per_lobe: float, grading: int):
    n_pan = max(8, int(math.ceil(lobes * panels_per_lobe)))
    edges = list(np.linspace(-HALF_PI, HALF_PI, n_pan + 1))
    w = edges[1] - edges[0]
    # split the outer panels geometrically towards +-pi/2
    inner = [HALF_PI - w * 0.25**k for k in range(grading + 1)]
    right = inner + [HALF_PI]
    left = [-x for x in reversed(right)]
    breaks = np.array(left + edges[2:-2] + right)
    x, wt = gauss_legendre_nodes(nodes)
    lo, hi = breaks[:-1], breaks[1:]
    half = 0.5 * (hi - lo)[:, None]
    mid = 0.5 * (hi + lo)[:, None]
    return (mid + half * x).ravel(), (half * wt).ravel()


def angle_rule(shape, filt, p_max: float, nodes: int = 10, panels_per_lobe: float = 1.0, grading: int = 12) -> AngleRule:
    """Panelled rule resolving the aperture pattern at wavenumber ``p_max``."""
    x0, x1, y0, y1 = shape.bbox()
    ext_x = max(abs(x0), abs(x1))
    ext_y = max(abs(y0), abs(y1))
    ext_z = 0.5 * filt.delta_z if isinstance(filt, Uniform) else 0.0
    tx, wx = _axis_rule(max(ext_x, ext_z) * p_max, nodes, panels_per_lobe, grading)
    ty, wy = _axis_rule(max(ext_y, ext_z) * p_max, nodes, panels_per_lobe, grading)
    return AngleRule(tx, wx, ty, wy)


class FinalStatePdf:
    """Final-state momentum density for one aperture, filter and peak.

    Immutable apart from the memoised normalisation; concurrent callers may
    both compute it, which is harmless because the value is deterministic.
    """

    def __init__(self, p0: float, shape, filt, peak: MomentumPeak | None = None, delta_p_rel: float = 1e-3,
                 rule: AngleRule | None = None, p_nodes: int = 16):
        self.p0 = float(p0)
        self.shape = shape
        self.filt = filt
        self.peak = peak if peak is not None else MomentumPeak(self.p0, delta_p_rel * self.p0)
        if self.peak.p0 != self.p0:
            raise ValueError("peak must be centred on p0")
        self.p_nodes = int(p_nodes)
        self.rule = rule if rule is not None else angle_rule(shape, filt, self.peak.window[1])
        self._lock = threading.Lock()
        self._norm: float | None = None
        self._profile = None

    # -- building blocks ------------------------------------------------

    @property
    def collapsed(self) -> bool:
        return self.peak.delta_p / self.p0 < COLLAPSE_THRESHOLD

    def amplitude_sq(self, px, py, pz):
        """``|J^A(p - p0 z)|^2`` = ``|J_T(px, py)|^2 |J_L(pz - p0)|^2`` (Dirac: J_L = 1)."""
        jt = np.abs(aperture_integral(self.shape, px, py)) ** 2 / area(self.shape)
        if isinstance(self.filt, Dirac):
            return jt
        return jt * np.asarray(longitudinal_ft(self.filt, np.asarray(pz) - self.p0)) ** 2

    def angular_integral(self, p_values, rule: AngleRule | None = None, chunk: int = 200_000):
        """``A(p) = iint Gamma |J|^2 dtheta_x dtheta_y`` for each ``p``."""
        rule = rule or self.rule
        p_values = np.atleast_1d(np.asarray(p_values, dtype=float))
        out = np.zeros(p_values.shape)
        rows = max(1, chunk // rule.theta_y.size)
        ty = rule.theta_y
        wy = rule.weight_y
        t_y = np.tan(ty)[None, :]
        for start in range(0, rule.theta_x.size, rows):
            tx = rule.theta_x[start:start + rows]
            wx = rule.weight_x[start:start + rows]
            t_x = np.tan(tx)[:, None]
            cosc = cos_deflection(tx[:, None], ty[None, :])
            gamma = angular_factor(tx[:, None], ty[None, :])
            weights = wx[:, None] * wy[None, :] * gamma
            for k, p in enumerate(p_values):
                pz = p * cosc
                out[k] += np.sum(weights * self.amplitude_sq(pz * t_x, pz * t_y, pz))
        return out

    def _radial_nodes(self, n: int | None = None):
        lo, hi = self.peak.window
        x, w = gauss_legendre_nodes(n or self.p_nodes)
        half = 0.5 * (hi - lo)
        return 0.5 * (hi + lo) + half * x, half * w

    # -- normalisation ----------------------------------------------------

    def normalization(self) -> float:
        """N: integral of the unnormalised density over the half-space pz > 0."""
        if self._norm is None:
            if self.collapsed:
                value = self.p0**2 * float(self.angular_integral([self.p0])[0])
            else:
                p, w = self._radial_nodes()
                a = self.angular_integral(p)
                value = float(np.sum(w * p * p * self.peak(p) * a))
                with self._lock:
                    self._profile = (p, w, a)
            with self._lock:
                self._norm = value
        return self._norm

    def radial_profile(self):
        """``(p_nodes, weights, A(p_nodes))`` of the radial quadrature."""
        if self._profile is None:
            p, w = self._radial_nodes()
            a = self.angular_integral(p)
            with self._lock:
                self._profile = (p, w, a)
        return self._profile

    # -- densities ---------------------------------------------------------

    def density_cartesian(self, px, py, pz):
        px, py, pz = (np.asarray(v, dtype=float) for v in (px, py, pz))
        modulus = np.sqrt(px * px + py * py + pz * pz)
        positive = pz > 0
        val = self.peak(modulus) * self.amplitude_sq(px, py, pz) / self.normalization()
        return np.where(positive, val, 0.0)

    def density_angles(self, p, theta_x, theta_y):
        p = np.asarray(p, dtype=float)
        t_x = np.tan(theta_x)
        t_y = np.tan(theta_y)
        pz = p * cos_deflection(theta_x, theta_y)
        amp = self.amplitude_sq(pz * t_x, pz * t_y, pz)
        return p * p * self.peak(p) * angular_factor(theta_x, theta_y) * amp / self.normalization()


def final_pdf_cartesian(fs: FinalStatePdf, px, py, pz):
    """Final-state density in (px, py, pz); zero for pz <= 0."""
    return fs.density_cartesian(px, py, pz)


def final_pdf_angles(fs: FinalStatePdf, p, theta_x, theta_y):
    """Final-state density in (p, theta_x, theta_y)."""
    return fs.density_angles(p, theta_x, theta_y)


def normalization_constant(fs: FinalStatePdf) -> float:
    return fs.normalization()


def marginal_modulus_pdf(fs: FinalStatePdf, p_grid):
    """Density of |P| on ``p_grid`` (angles integrated out)."""
    p_grid = np.atleast_1d(np.asarray(p_grid, dtype=float))
    a = fs.angular_integral(p_grid)
    return p_grid * p_grid * fs.peak(p_grid) * a / fs.normalization()


def modulus_moments(fs: FinalStatePdf):
    """``(mass, mean, std)`` of |P| from the radial quadrature."""
    p, w, a = fs.radial_profile()
    dens = w * p * p * fs.peak(p) * a / fs.normalization()
    mass = float(np.sum(dens))
    mean = float(np.sum(dens * p) / mass)
    var = float(np.sum(dens * (p - mean) ** 2) / mass)
    return mass, mean, math.sqrt(var)


def total_probability(fs: FinalStatePdf, refine: float = 1.5) -> float:
    """Integral of the normalised density with a finer rule than the one
    used for N; the deviation from one measures the quadrature error."""
    rule = angle_rule(fs.shape, fs.filt, fs.peak.window[1], nodes=12, panels_per_lobe=refine, grading=16)
    if fs.collapsed:
        a = fs.angular_integral([fs.p0], rule)
        return float(fs.p0**2 * a[0] / fs.normalization())
    p, w = fs._radial_nodes(int(fs.p_nodes * refine) + 1)
    a = fs.angular_integral(p, rule)
    return float(np.sum(w * p * p * fs.peak(p) * a) / fs.normalization())


def directional_pdf(fs: FinalStatePdf, theta_x, theta_y, collapse: bool = True):
    """Density of the outgoing direction, in rad^-2.

    With ``collapse`` the momentum peak is replaced by delta(p - p0), which is
    how the relative-intensity formula is obtained; otherwise the peak is
    integrated over numerically.
    """
    theta_x = np.asarray(theta_x, dtype=float)
    theta_y = np.asarray(theta_y, dtype=float)
    t_x = np.tan(theta_x)
    t_y = np.tan(theta_y)
    cosc = cos_deflection(theta_x, theta_y)
    gamma = angular_factor(theta_x, theta_y)
    if collapse:
        pz = fs.p0 * cosc
        num = fs.p0**2 * gamma * fs.amplitude_sq(pz * t_x, pz * t_y, pz)
        norm = fs.p0**2 * float(fs.angular_integral([fs.p0])[0]) if not fs.collapsed else fs.normalization()
        return num / norm
    p, w = fs._radial_nodes()
    acc = np.zeros(np.broadcast(theta_x, theta_y).shape)
    for pk, wk in zip(p, w):
        pz = pk * cosc
        acc = acc + wk * pk * pk * fs.peak(pk) * gamma * fs.amplitude_sq(pz * t_x, pz * t_y, pz)
    return acc / fs.normalization()
