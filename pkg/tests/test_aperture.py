import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdiffract.aperture import (
    Circle,
    Polygon,
    Rectangle,
    ShapeError,
    Union,
    aperture_integral,
    area,
    centroid,
    contains,
    max_radius,
    transverse_filter_value,
    transverse_ft,
    transverse_ft_mc_oracle,
    transverse_term,
)
from qdiffract.numerics import McSpec

UNIT_SQUARE = Polygon(((0, 0), (1, 0), (1, 1), (0, 1)))
P_HENE = 2 * math.pi / 0.6328
P_GREEN = 2 * math.pi / 0.53245


def test_areas():
    assert area(Rectangle(5, 50)) == 1000.0
    assert area(Circle(2)) == pytest.approx(4 * math.pi)
    assert area(UNIT_SQUARE) == 1.0
    assert area(Union((Rectangle(1, 1, (-3, 0)), Circle(1, (3, 0))))) == pytest.approx(4 + math.pi)


def test_contains():
    assert contains(Rectangle(5, 50), 0.0, 0.0)
    assert not contains(Circle(2), 2.0001, 0.0)
    assert contains(UNIT_SQUARE, 0.5, 0.5)
    assert not contains(UNIT_SQUARE, 1.5, 0.5)
    mask = contains(Rectangle(1, 1), np.array([0.0, 2.0]), np.array([0.0, 0.0]))
    assert mask.tolist() == [True, False]


def test_filter_value():
    assert transverse_filter_value(Rectangle(5, 50), 1.0, 1.0) == pytest.approx(1e-3)
    assert transverse_filter_value(Rectangle(5, 50), 10.0, 0.0) == 0.0
    assert transverse_filter_value(Circle(2), 0.0, 0.0) == pytest.approx(1 / (4 * math.pi))


def test_shape_validation():
    with pytest.raises(ShapeError):
        Rectangle(0, 1)
    with pytest.raises(ShapeError):
        Circle(-1)
    with pytest.raises(ShapeError):
        Polygon(((0, 0), (1, 0)))
    with pytest.raises(ShapeError):
        Polygon(((0, 0), (1, 1), (1, 0), (0, 1)))  # bow tie
    with pytest.raises(ShapeError):
        Union((Rectangle(1, 1), Rectangle(1, 1, (0.5, 0))))


def test_clockwise_polygon_is_reoriented():
    cw = Polygon(((0, 0), (0, 1), (1, 1), (1, 0)))
    assert area(cw) == 1.0
    assert transverse_ft(cw, 0.7, -0.2) == pytest.approx(transverse_ft(UNIT_SQUARE, 0.7, -0.2), abs=1e-15)


def test_centroid_and_radius():
    assert centroid(UNIT_SQUARE) == pytest.approx((0.5, 0.5))
    assert max_radius(Rectangle(5, 50)) == pytest.approx(math.sqrt(25 + 2500))
    assert max_radius(Circle(2, (3, 4))) == pytest.approx(7.0)


def test_forward_value_is_sqrt_area():
    for shape in (Rectangle(5, 50), Circle(2), UNIT_SQUARE, Union((Rectangle(1, 2, (-5, 0)), Rectangle(1, 2, (5, 0))))):
        assert transverse_ft(shape, 0.0, 0.0) == pytest.approx(math.sqrt(area(shape)), rel=1e-15)


def test_closed_forms_along_px():
    px = np.linspace(0.01, 5, 50)
    a, b, r = 1.5, 4.0, 2.0
    np.testing.assert_allclose(transverse_ft(Rectangle(a, b), px, 0.0), math.sqrt(4 * a * b) * np.sin(a * px) / (a * px), atol=1e-14)
    from scipy.special import j1

    np.testing.assert_allclose(transverse_ft(Circle(r), px, 0.0), math.sqrt(math.pi) * r * 2 * j1(r * px) / (r * px), atol=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 20), st.floats(0.1, 20), st.floats(-30, 30), st.floats(-30, 30), st.floats(-5, 5), st.floats(-5, 5))
def test_polygon_edge_sum_matches_rectangle(a, b, px, py, cx, cy):
    rect = Rectangle(a, b, (cx, cy))
    poly = Polygon(((cx - a, cy - b), (cx + a, cy - b), (cx + a, cy + b), (cx - a, cy + b)))
    scale = math.sqrt(area(rect))
    assert abs(transverse_ft(rect, px, py) - transverse_ft(poly, px, py)) <= 1e-12 * scale


def test_polygon_small_frequency_branch_is_continuous():
    tri = Polygon(((0, 0), (3, 0), (1, 2)))
    q = np.array([1e-12, 1e-6, 0.33, 0.3334, 0.34])
    vals = aperture_integral(tri, q, 0.5 * q)
    # reference from a fine 2D midpoint rule over the triangle
    xs = np.linspace(0, 3, 1201)[:-1] + 3 / 2400
    ys = np.linspace(0, 2, 801)[:-1] + 2 / 1600
    X, Y = np.meshgrid(xs, ys)
    inside = contains(tri, X, Y)
    cell = (3 / 1200) * (2 / 800)
    for qi, v in zip(q, vals):
        ref = np.sum(np.exp(-1j * (qi * X + 0.5 * qi * Y))[inside]) * cell
        assert abs(v - ref) < 2e-2


def test_union_is_sum_of_members():
    members = (Rectangle(1, 2, (-4, 0)), Circle(1.5, (4, 1)))
    u = Union(members)
    px, py = 0.7, -1.1
    assert aperture_integral(u, px, py) == pytest.approx(sum(aperture_integral(m, px, py) for m in members), abs=1e-14)


def test_translation_changes_only_the_phase():
    t0 = transverse_term(Circle(2), P_GREEN, 0.3, 0.2)
    t1 = transverse_term(Circle(2, (7, -3)), P_GREEN, 0.3, 0.2)
    assert t1 == pytest.approx(t0, rel=1e-12)


def test_transverse_term_examples():
    for shape in (Rectangle(5, 50), Circle(2), UNIT_SQUARE):
        assert transverse_term(shape, P_HENE, 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    zero_slit = math.asin(0.6328 / 10)
    assert math.degrees(zero_slit) == pytest.approx(3.6285, abs=1e-3)
    assert transverse_term(Rectangle(5, 50), P_HENE, zero_slit, 0.0) < 1e-12
    zero_circ = math.asin(3.8317059702075123 / (P_GREEN * 2))
    assert math.degrees(zero_circ) == pytest.approx(9.343, abs=1e-3)
    assert transverse_term(Circle(2), P_GREEN, zero_circ, 0.0) < 1e-9


def test_mc_oracle_examples():
    spec = McSpec(1_000_000, 42)
    est, err = transverse_ft_mc_oracle(Rectangle(5, 50), 0.0, 0.0, spec)
    assert abs(est - math.sqrt(1000)) <= 3 * err + 1e-12
    for shape, px, py in ((Circle(2), 1.0, 0.0), (UNIT_SQUARE, 2.0, 3.0)):
        est, err = transverse_ft_mc_oracle(shape, px, py, spec)
        assert abs(est - transverse_ft(shape, px, py)) <= 3 * err


def test_mc_oracle_is_seeded():
    spec = McSpec(100_000, 9)
    assert transverse_ft_mc_oracle(Circle(2), 0.4, 0.1, spec) == transverse_ft_mc_oracle(Circle(2), 0.4, 0.1, spec)
