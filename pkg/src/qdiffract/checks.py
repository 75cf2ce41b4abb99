"""Self-check suite: every closed form is compared with an independent
numerical route (quadrature, Monte Carlo, finite differences, bisection).

``self_check`` returns a :class:`CheckReport`; the CLI turns a failure into
exit status 2.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .aperture import Circle, Polygon, Rectangle, Union, area, transverse_ft_mc_oracle, transverse_term
from .config import parse_config, preset_text
from .kinematics import MomentumDirection, angular_factor, jacobian_oracle
from .longitudinal import Dirac, Gaussian, longitudinal_ft_quadrature, longitudinal_term
from .momentum_pdf import FinalStatePdf, directional_pdf, modulus_moments, pz_nonpositive_mass, total_probability
from .numerics import McSpec, QuadratureSpec
from .scan import csv_text, run_scan
from .theories import Theory, predict, quantum_relative_intensity, theory_ordering_check

SLIT = Rectangle(5.0, 50.0)
SLIT_WAVELENGTH_UM = 0.6328
CIRCLE = Circle(2.0)
CIRCLE_WAVELENGTH_UM = 0.53245


def wavenumber(wavelength_um: float) -> float:
    return 2.0 * math.pi / wavelength_um


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name}: measured {self.measured:.3e} (tolerance {self.tolerance:.1e}, {self.seconds:.2f} s)"
        return text + (f"  [{self.detail}]" if self.detail else "")


@dataclass
class CheckReport:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __str__(self) -> str:
        return "\n".join(r.line() for r in self.results)


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    res = fn(*args, **kwargs)
    res.seconds = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def double_slit() -> Union:
    return Union((Rectangle(5.0, 50.0, center=(-20.0, 0.0)), Rectangle(5.0, 50.0, center=(20.0, 0.0))))


def square_polygon() -> Polygon:
    return Polygon(((-3.0, -3.0), (3.0, -3.0), (3.0, 3.0), (-3.0, 3.0)))


def check_forward_normalisation() -> CheckResult:
    p = wavenumber(SLIT_WAVELENGTH_UM)
    worst = 0.0
    for shape in (SLIT, CIRCLE, square_polygon(), double_slit()):
        theories = tuple(Theory) if isinstance(shape, Rectangle) else (Theory.QM, Theory.FK, Theory.RS1, Theory.RS2)
        for filt in (Dirac(), Gaussian(0.5)):
            res = predict(shape, filt, p, 0.0, 0.0, theories)
            worst = max(worst, max(abs(float(v) - 1.0) for v in res["I"].values()))
    return CheckResult("forward normalisation", worst <= 1e-12, worst, 1e-12)


def check_ratio_identities() -> CheckResult:
    p = wavenumber(SLIT_WAVELENGTH_UM)
    theta = np.radians(np.arange(10.0, 81.0, 1.0))
    res = predict(SLIT, Dirac(), p, theta, 0.0, (Theory.QM, Theory.FK, Theory.RS1, Theory.RS2))
    i = res["I"]
    keep = res["T"] > 1e-12
    inv_cos = 1.0 / np.cos(theta[keep])
    e1 = np.max(np.abs(i[Theory.QM][keep] / i[Theory.RS1][keep] / inv_cos - 1.0))
    e2 = np.max(np.abs(i[Theory.RS2][keep] / i[Theory.QM][keep] / inv_cos - 1.0))
    at60 = predict(SLIT, Dirac(), p, math.radians(60.0), 0.0, (Theory.QM, Theory.FK, Theory.RS1, Theory.RS2))["I"]
    e3 = abs(at60[Theory.QM] / at60[Theory.RS1] - 2.0) / 2.0
    e4 = abs(at60[Theory.FK] / at60[Theory.QM] - 9.0 / 8.0) / (9.0 / 8.0)
    worst = float(max(e1, e2, e3, e4))
    return CheckResult("ratio identities QM/RS1, RS2/QM, FK/QM", worst <= 1e-10, worst, 1e-10)


def check_slit_vs_polygon() -> CheckResult:
    p = wavenumber(SLIT_WAVELENGTH_UM)
    a, b = SLIT.half_width_a, SLIT.half_height_b
    poly = Polygon(((-a, -b), (a, -b), (a, b), (-a, b)))
    theta = np.radians(np.linspace(0.0, 89.0, 200))
    ty = np.radians(np.array([0.0, 0.3, 2.0]))
    tx, ty = np.meshgrid(theta, ty)
    # T is |FT|^2 / S^2 and peaks at 1, so its absolute error is relative to the peak
    err = float(np.max(np.abs(transverse_term(SLIT, p, tx, ty) - transverse_term(poly, p, tx, ty))))
    return CheckResult("slit closed form vs polygon edge sum", err <= 1e-12, err, 1e-12)


def check_circle_vs_mc(samples: int = 1_000_000, seed: int = 20240601, angles: int = 20) -> CheckResult:
    p = wavenumber(CIRCLE_WAVELENGTH_UM)
    s = area(CIRCLE)
    worst = 0.0
    for theta in np.radians(np.linspace(0.0, 60.0, angles)):
        px = p * math.sin(theta)  # theta_y = 0: px = p cos(chi) tan(theta) = p sin(theta)
        est, sigma = transverse_ft_mc_oracle(CIRCLE, px, 0.0, McSpec(samples, seed))
        t_mc = abs(est) ** 2 / s
        sigma_t = (2.0 * abs(est) * sigma + sigma * sigma) / s
        t_cf = transverse_term(CIRCLE, p, theta, 0.0)
        worst = max(worst, abs(t_mc - t_cf) / sigma_t)
    return CheckResult("circle closed form vs Monte Carlo", worst <= 4.0, worst, 4.0,
                       detail=f"{samples} samples, seed {seed}, in standard errors")


def _first_zero_deg(shape, p, lo_deg, hi_deg, tol_deg=1e-9):
    """Bisect the sign change of the real-valued amplitude on theta_y = 0."""
    from .aperture import aperture_integral

    def amp(deg):
        th = math.radians(deg)
        return float(np.real(aperture_integral(shape, p * math.sin(th), 0.0)))

    f_lo = amp(lo_deg)
    while hi_deg - lo_deg > tol_deg:
        mid = 0.5 * (lo_deg + hi_deg)
        if (amp(mid) > 0) == (f_lo > 0):
            lo_deg, f_lo = mid, amp(mid)
        else:
            hi_deg = mid
    return 0.5 * (lo_deg + hi_deg)


def first_zeros():
    slit = _first_zero_deg(SLIT, wavenumber(SLIT_WAVELENGTH_UM), 1.0, 5.0)
    circle = _first_zero_deg(CIRCLE, wavenumber(CIRCLE_WAVELENGTH_UM), 5.0, 12.0)
    return slit, circle


def check_first_zeros() -> CheckResult:
    slit, circle = first_zeros()
    slit_ref = math.degrees(math.asin(SLIT_WAVELENGTH_UM / (2.0 * SLIT.half_width_a)))
    # first zero of J1 is 3.8317059702075123
    circle_ref = math.degrees(math.asin(3.8317059702075123 / (wavenumber(CIRCLE_WAVELENGTH_UM) * CIRCLE.radius_r)))
    err = max(abs(slit - slit_ref), abs(circle - circle_ref))
    return CheckResult("first zeros (deg)", err <= 1e-6, err, 1e-6,
                       detail=f"slit {slit:.6f}, circle {circle:.6f}")


def check_gaussian_longitudinal() -> CheckResult:
    worst = 0.0
    spec = QuadratureSpec(adaptive_tolerance=1e-12)
    for sigma in (0.05, 0.5, 2.0):
        filt = Gaussian(sigma)
        p = wavenumber(SLIT_WAVELENGTH_UM)
        ref0 = abs(longitudinal_ft_quadrature(filt, 0.0, spec)) ** 2
        for chi in np.radians(np.arange(0.0, 86.0, 5.0)):
            dq = p * (1.0 - math.cos(chi))
            quad_l = abs(longitudinal_ft_quadrature(filt, -dq, spec)) ** 2 / ref0
            worst = max(worst, abs(longitudinal_term(filt, p, chi) - quad_l))
    return CheckResult("Gaussian L closed form vs quadrature", worst <= 1e-8, worst, 1e-8)


def check_gaussian_damping_scale() -> CheckResult:
    p = wavenumber(SLIT_WAVELENGTH_UM)
    value = longitudinal_term(Gaussian(0.5), p, 0.5 * math.pi)
    # at chi = 90 deg, dq = p, so L = exp(-2 sigma^2 p^2)
    ref = math.exp(-2.0 * 0.25 * p * p)
    rel = abs(value / ref - 1.0)
    return CheckResult("L(sigma=0.5 um, 90 deg) vs exp(-2 sigma^2 p^2)", rel <= 1e-2, rel, 1e-2,
                       detail=f"L = {value:.4e}")


def check_jacobian(gamma=angular_factor, points: int = 21) -> CheckResult:
    grid = np.radians(np.linspace(-85.0, 85.0, points))
    worst = 0.0
    for tx in grid:
        for ty in grid:
            ref = jacobian_oracle(MomentumDirection(1.0, float(tx), float(ty)))
            worst = max(worst, abs(float(gamma(tx, ty)) / ref - 1.0))
    return CheckResult("angular factor vs finite-difference Jacobian", worst <= 1e-7, worst, 1e-7)


def slit_final_state() -> FinalStatePdf:
    return FinalStatePdf(wavenumber(SLIT_WAVELENGTH_UM), SLIT, Gaussian(0.5), delta_p_rel=1e-3)


def check_final_state(fs: FinalStatePdf | None = None) -> list:
    fs = fs or slit_final_state()
    t0 = time.perf_counter()
    total = total_probability(fs)
    _, mean, std = modulus_moments(fs)
    p0, dp = fs.p0, fs.peak.delta_p
    px = np.array([0.0, 1.0, -2.0])
    zero = float(np.max(np.abs(fs.density_cartesian(px, px, np.array([0.0, -1.0, -p0])))))
    secs = time.perf_counter() - t0
    return [
        CheckResult("final-state total probability", abs(total - 1.0) <= 1e-6, abs(total - 1.0), 1e-6, secs),
        CheckResult("final-state mean |P| offset / p0", abs(mean - p0) <= 1e-3 * p0, abs(mean - p0) / p0, 1e-3),
        CheckResult("final-state std |P| / delta_p - 1", abs(std / dp - 1.0) <= 0.1, abs(std / dp - 1.0), 0.1),
        CheckResult("final-state density for pz <= 0", zero == 0.0, zero, 0.0),
    ]


def check_directional_pdf(fs: FinalStatePdf | None = None) -> CheckResult:
    fs = fs or slit_final_state()
    theta = np.radians(np.linspace(0.0, 89.0, 37))
    dens = directional_pdf(fs, theta, 0.0)
    ratio = dens / dens[0]
    qm = quantum_relative_intensity(fs.filt, fs.shape, fs.p0, theta, 0.0)
    err = float(np.max(np.abs(ratio - qm) / np.maximum(qm, 1e-12)))
    return CheckResult("direction pdf vs relative-intensity formula", err <= 1e-6, err, 1e-6)


def check_ordering(points: int = 1000) -> CheckResult:
    p = wavenumber(SLIT_WAVELENGTH_UM)
    grid = np.linspace(0.0, 0.5 * math.pi, points + 2)[1:-1]
    bad = sum(not theory_ordering_check(SLIT, p, float(t)) for t in grid)
    return CheckResult("ordering RS2 >= FK >= QM >= RS1", bad == 0, float(bad), 0.0, detail=f"{points} angles")


def check_transitional_pz() -> CheckResult:
    p0 = wavenumber(SLIT_WAVELENGTH_UM)
    sigma = 0.5 / p0  # 2 sigma p0 = 1
    mass = pz_nonpositive_mass(Gaussian(sigma), p0)
    ref = NormalDist().cdf(-2.0 * sigma * p0)
    err = abs(mass - ref)
    return CheckResult("transitional P(pz <= 0) vs Phi(-2 sigma p0)", err <= 1e-3, err, 1e-3,
                       detail=f"P = {mass:.6f}")


def check_determinism() -> CheckResult:
    spec = McSpec(200_000, 7)
    a = transverse_ft_mc_oracle(CIRCLE, 1.3, 0.4, spec)
    b = transverse_ft_mc_oracle(CIRCLE, 1.3, 0.4, spec)
    cfg = parse_config(preset_text("fig3"))
    same_csv = csv_text(run_scan(cfg)) == csv_text(run_scan(cfg, threads=3, chunk=111))
    ok = a == b and same_csv
    return CheckResult("seeded Monte Carlo and scan determinism", ok, 0.0 if ok else 1.0, 0.0)


def self_check(gamma=angular_factor, include_pdf: bool = True) -> CheckReport:
    """Run every check; ``gamma`` replaces the angular factor under test."""
    report = CheckReport()
    for fn in (check_forward_normalisation, check_ratio_identities, check_slit_vs_polygon, check_circle_vs_mc,
               check_first_zeros, check_gaussian_longitudinal, check_gaussian_damping_scale):
        report.results.append(_timed(fn))
    report.results.append(_timed(check_jacobian, gamma))
    if include_pdf:
        fs = slit_final_state()
        report.results.extend(check_final_state(fs))
        report.results.append(_timed(check_directional_pdf, fs))
    for fn in (check_ordering, check_transitional_pz, check_determinism):
        report.results.append(_timed(fn))
    return report


def config_checks(cfg) -> CheckReport:
    """Final-state and Monte Carlo checks for one scan configuration
    (``pdf_checks = on``), using its seed, sample count and tolerance."""
    report = CheckReport()
    fs = FinalStatePdf(cfg.p0, cfg.shape, cfg.filter, delta_p_rel=cfg.delta_p_rel)
    report.results.extend(check_final_state(fs))
    report.results.append(_timed(check_directional_pdf, fs))

    t0 = time.perf_counter()
    s = area(cfg.shape)
    worst = 0.0
    for theta in np.radians([0.0, 5.0, 20.0]):
        px = cfg.p0 * math.sin(theta)
        est, sigma = transverse_ft_mc_oracle(cfg.shape, px, 0.0, McSpec(cfg.mc_samples, cfg.mc_seed))
        t_mc = abs(est) ** 2 / s
        sigma_t = (2.0 * abs(est) * sigma + sigma * sigma) / s
        diff = abs(t_mc - transverse_term(cfg.shape, cfg.p0, theta, 0.0))
        worst = max(worst, diff / sigma_t if sigma_t > 0 else (0.0 if diff < 1e-12 else math.inf))
    report.results.append(CheckResult("T closed form vs Monte Carlo", worst <= 4.0, worst, 4.0,
                                      time.perf_counter() - t0, "in standard errors"))

    if not isinstance(cfg.filter, Dirac):
        from .momentum_pdf import pz_positive_mass

        spec = QuadratureSpec(adaptive_tolerance=cfg.quad_tolerance)
        mass = pz_positive_mass(cfg.shape, cfg.filter, cfg.p0)
        neg = pz_nonpositive_mass(cfg.filter, cfg.p0, spec)
        report.results.append(CheckResult("transitional P(pz > 0) (informational)", True, mass, 0.0,
                                          detail=f"P(pz <= 0) = {neg:.3e}"))
    return report
