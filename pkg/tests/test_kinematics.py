import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdiffract.kinematics import (
    HBAR,
    C_LIGHT,
    DomainError,
    MomentumDirection,
    MomentumVec,
    ParticleKinematics,
    angular_factor,
    deflection_angle,
    energy,
    from_angles,
    jacobian_oracle,
    to_angles,
)

angle = st.floats(-1.55, 1.55)


def test_to_angles_examples():
    d = to_angles(MomentumVec(0, 0, 1))
    assert (d.p, d.theta_x, d.theta_y) == (1.0, 0.0, 0.0)
    d = to_angles(MomentumVec(1, 0, 1))
    assert d.p == pytest.approx(math.sqrt(2)) and d.theta_x == pytest.approx(math.pi / 4) and d.theta_y == 0
    d = to_angles(MomentumVec(0.3, 0.4, 1.2))
    assert d.p == pytest.approx(1.3, abs=1e-15)
    assert d.theta_x == pytest.approx(math.atan(0.25), abs=1e-15)
    assert d.theta_y == pytest.approx(math.atan(1 / 3), abs=1e-15)


def test_from_angles_examples():
    v = from_angles(MomentumDirection(1, 0, 0))
    assert (v.px, v.py, v.pz) == (0.0, 0.0, 1.0)
    v = from_angles(MomentumDirection(1, math.pi / 4, 0))
    assert v.px == pytest.approx(math.sqrt(2) / 2) and v.py == 0 and v.pz == pytest.approx(math.sqrt(2) / 2)
    v = from_angles(MomentumDirection(2, math.pi / 6, math.pi / 6))
    assert v.pz == pytest.approx(2 * math.sqrt(3 / 5), abs=1e-14)
    assert v.px == pytest.approx(v.pz / math.sqrt(3), abs=1e-14)
    assert v.py == pytest.approx(v.pz / math.sqrt(3), abs=1e-14)


def test_domain_errors():
    with pytest.raises(DomainError):
        to_angles(MomentumVec(1, 0, 0))
    with pytest.raises(DomainError):
        to_angles(MomentumVec(0, 0, -1))
    with pytest.raises(DomainError):
        MomentumDirection(1, math.pi / 2, 0)
    with pytest.raises(DomainError):
        MomentumDirection(0, 0, 0)
    with pytest.raises(DomainError):
        MomentumVec(float("nan"), 0, 1)
    with pytest.raises(DomainError):
        jacobian_oracle(MomentumDirection(1, math.pi / 2 - 1e-6, 0))


def test_deflection_angle_examples():
    assert deflection_angle(0.0, 0.0) == 0.0
    assert deflection_angle(math.pi / 4, 0.0) == pytest.approx(math.pi / 4)
    assert deflection_angle(math.pi / 4, math.pi / 4) == pytest.approx(0.9553166181, abs=1e-10)
    assert deflection_angle(math.pi / 4, math.pi / 4) == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-15)


def test_angular_factor_examples():
    assert angular_factor(0.0, 0.0) == 1.0
    assert angular_factor(math.pi / 3, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert angular_factor(math.pi / 4, math.pi / 4) == pytest.approx(0.7698003589, abs=1e-10)


def test_angular_factor_stays_finite_at_the_corners():
    t = math.pi / 2 - 1e-9
    g = angular_factor(np.array([t, t, 0.3]), np.array([t, -t, t]))
    assert np.all(np.isfinite(g)) and np.all(g >= 0)


def test_jacobian_oracle_examples():
    assert jacobian_oracle(MomentumDirection(1, 0, 0)) == pytest.approx(1.0, abs=1e-8)
    assert jacobian_oracle(MomentumDirection(1, math.pi / 3, 0)) == pytest.approx(0.5, abs=1e-8)
    assert jacobian_oracle(MomentumDirection(1, math.pi / 4, math.pi / 4)) == pytest.approx(0.76980, abs=1e-5)
    assert jacobian_oracle(MomentumDirection(1, math.pi / 4, math.pi / 4), richardson=True) == pytest.approx(
        0.7698003589, abs=1e-9
    )


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 100.0), angle, angle)
def test_round_trip(p, tx, ty):
    d = to_angles(from_angles(MomentumDirection(p, tx, ty)))
    assert d.p == pytest.approx(p, rel=1e-12)
    assert d.theta_x == pytest.approx(tx, abs=1e-12)
    assert d.theta_y == pytest.approx(ty, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-1.4, 1.4), st.floats(-1.4, 1.4))
def test_angular_factor_matches_finite_differences(p, tx, ty):
    ref = jacobian_oracle(MomentumDirection(p, tx, ty), richardson=True)
    assert angular_factor(tx, ty) == pytest.approx(ref, rel=1e-7)


def test_energy():
    kin = ParticleKinematics.from_wavelength(0.6328)
    hc_over_lambda = 2 * math.pi * HBAR * C_LIGHT / 0.6328e-6
    assert energy(kin, kin.p0_modulus) == pytest.approx(hc_over_lambda, rel=1e-12)
    assert energy(kin, kin.p0_modulus) == pytest.approx(3.139e-19, rel=1e-3)
    assert energy(kin, 0.0) == 0.0
    electron = ParticleKinematics(mass=9.1093837015e-31, p0_modulus=1.0)
    assert energy(electron, 0.0) == pytest.approx(9.1093837015e-31 * C_LIGHT**2, rel=1e-15)
    assert kin.wavelength == pytest.approx(0.6328)
    with pytest.raises(DomainError):
        ParticleKinematics(mass=-1.0, p0_modulus=1.0)
