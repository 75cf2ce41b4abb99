"""Aperture shapes, uniform transverse filtering and the aperture Fourier
transform.

``transverse_ft`` returns ``S^{-1/2} * iint_A exp[-i (px x + py y)] dx dy``
(the ``(2 pi hbar)^{-1}`` prefactor is dropped; it cancels in every ratio).
Shapes are immutable; all functions broadcast over numpy arrays of
frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union as TypingUnion

import numpy as np

from .kinematics import from_angles_array
from .numerics import BoxSampler, McSpec, integrate_2d_mc, jinc, sinc


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class Rectangle:
    half_width_a: float
    half_height_b: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.half_width_a > 0 and self.half_height_b > 0):
            raise ShapeError("rectangle half-sizes must be > 0")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def bbox(self):
        cx, cy = self.center
        a, b = self.half_width_a, self.half_height_b
        return cx - a, cx + a, cy - b, cy + b


@dataclass(frozen=True)
class Circle:
    radius_r: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius_r > 0:
            raise ShapeError("circle radius must be > 0")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def bbox(self):
        cx, cy = self.center
        r = self.radius_r
        return cx - r, cx + r, cy - r, cy + r


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and on_seg(p1, p2, q1))
        or (o2 == 0 and on_seg(p1, p2, q2))
        or (o3 == 0 and on_seg(q1, q2, p1))
        or (o4 == 0 and on_seg(q1, q2, p2))
    )


@dataclass(frozen=True)
class Polygon:
    """Simple polygon; clockwise input is reoriented to counterclockwise."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) < 3:
            raise ShapeError("polygon needs at least 3 vertices")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise ShapeError("polygon vertices must be finite")
        n = len(verts)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(verts[i], verts[(i + 1) % n], verts[j], verts[(j + 1) % n]):
                    raise ShapeError("polygon must be simple (edges %d and %d intersect)" % (i, j))
        signed = _shoelace(verts)
        if signed == 0:
            raise ShapeError("polygon has zero area")
        if signed < 0:
            verts = tuple(reversed(verts))
        object.__setattr__(self, "vertices", verts)

    def bbox(self):
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), max(xs), min(ys), max(ys)


@dataclass(frozen=True)
class Union:
    """Disjoint union of shapes (e.g. a system of slits)."""

    members: tuple = field(default_factory=tuple)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ShapeError("union needs at least one member")
        object.__setattr__(self, "members", members)
        _check_disjoint(members)

    def bbox(self):
        boxes = [m.bbox() for m in self.members]
        return (
            min(b[0] for b in boxes),
            max(b[1] for b in boxes),
            min(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )


ApertureShape = TypingUnion[Rectangle, Circle, Polygon, Union]


def _shoelace(verts) -> float:
    s = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _check_disjoint(members, spot_checks: int = 1000, seed: int = 0x5EED):
    # Bounding-box screen, then a seeded spot check on overlapping boxes.
    # A precondition check, not a proof of disjointness.
    rng = np.random.Generator(np.random.PCG64(seed))
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            a, b = members[i].bbox(), members[j].bbox()
            x0, x1 = max(a[0], b[0]), min(a[1], b[1])
            y0, y1 = max(a[2], b[2]), min(a[3], b[3])
            if x0 >= x1 or y0 >= y1:
                continue
            xs = rng.uniform(x0, x1, spot_checks)
            ys = rng.uniform(y0, y1, spot_checks)
            both = contains(members[i], xs, ys) & contains(members[j], xs, ys)
            if np.any(both):
                raise ShapeError("union members %d and %d overlap" % (i, j))


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def area(shape) -> float:
    if isinstance(shape, Rectangle):
        return 4.0 * shape.half_width_a * shape.half_height_b
    if isinstance(shape, Circle):
        return math.pi * shape.radius_r**2
    if isinstance(shape, Polygon):
        return _shoelace(shape.vertices)
    if isinstance(shape, Union):
        return sum(area(m) for m in shape.members)
    raise TypeError("unknown shape %r" % (shape,))


def centroid(shape) -> tuple[float, float]:
    """Area centroid; informational only, coordinates are never shifted."""
    if isinstance(shape, (Rectangle, Circle)):
        return shape.center
    if isinstance(shape, Polygon):
        v = shape.vertices
        n = len(v)
        cx = cy = 0.0
        for i in range(n):
            x0, y0 = v[i]
            x1, y1 = v[(i + 1) % n]
            cross = x0 * y1 - x1 * y0
            cx += (x0 + x1) * cross
            cy += (y0 + y1) * cross
        a6 = 6.0 * area(shape)
        return cx / a6, cy / a6
    if isinstance(shape, Union):
        total = area(shape)
        cs = [(area(m), centroid(m)) for m in shape.members]
        return (sum(a * c[0] for a, c in cs) / total, sum(a * c[1] for a, c in cs) / total)
    raise TypeError("unknown shape %r" % (shape,))


def max_radius(shape) -> float:
    """Largest distance from the origin to a point of the aperture."""
    if isinstance(shape, Rectangle):
        x0, x1, y0, y1 = shape.bbox()
        return max(math.hypot(x, y) for x in (x0, x1) for y in (y0, y1))
    if isinstance(shape, Circle):
        return math.hypot(*shape.center) + shape.radius_r
    if isinstance(shape, Polygon):
        return max(math.hypot(x, y) for x, y in shape.vertices)
    if isinstance(shape, Union):
        return max(max_radius(m) for m in shape.members)
    raise TypeError("unknown shape %r" % (shape,))


def _winding_number(verts, x, y):
    wn = np.zeros(np.broadcast(x, y).shape, dtype=int)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        cross = (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0)
        up = (y0 <= y) & (y1 > y) & (cross > 0)
        down = (y0 > y) & (y1 <= y) & (cross < 0)
        wn = wn + up.astype(int) - down.astype(int)
    return wn


def _on_boundary(verts, x, y, eps=1e-12):
    hit = np.zeros(np.broadcast(x, y).shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        dx, dy = x1 - x0, y1 - y0
        cross = dx * (y - y0) - dy * (x - x0)
        dot = (x - x0) * dx + (y - y0) * dy
        length2 = dx * dx + dy * dy
        scale = eps * max(1.0, math.sqrt(length2))
        hit |= (np.abs(cross) <= scale * math.sqrt(length2)) & (dot >= 0) & (dot <= length2)
    return hit


def contains(shape, x, y):
    """Point-in-shape test, boundary counted inside.  Broadcasts."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(shape, Rectangle):
        cx, cy = shape.center
        out = (np.abs(x - cx) <= shape.half_width_a) & (np.abs(y - cy) <= shape.half_height_b)
    elif isinstance(shape, Circle):
        cx, cy = shape.center
        out = (x - cx) ** 2 + (y - cy) ** 2 <= shape.radius_r**2
    elif isinstance(shape, Polygon):
        out = (_winding_number(shape.vertices, x, y) != 0) | _on_boundary(shape.vertices, x, y)
    elif isinstance(shape, Union):
        out = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for m in shape.members:
            out = out | contains(m, x, y)
    else:
        raise TypeError("unknown shape %r" % (shape,))
    return bool(out) if out.ndim == 0 else out


def transverse_filter_value(shape, x, y):
    """Uniform transverse filtering function: 1/S inside, 0 outside."""
    inside = contains(shape, x, y)
    return np.where(inside, 1.0 / area(shape), 0.0) if np.ndim(inside) else (1.0 / area(shape) if inside else 0.0)


# ---------------------------------------------------------------------------
# Fourier transform
# ---------------------------------------------------------------------------


def _shift_phase(center, px, py):
    cx, cy = center
    if cx == 0.0 and cy == 0.0:
        return 1.0
    return np.exp(-1j * (px * cx + py * cy))


def _polygon_integral(verts, px, py):
    # Divergence theorem: exp(-i q.r) = div(i q exp(-i q.r) / |q|^2), so the
    # area integral is (i/|q|^2) sum_edges (q . n_edge) int_edge exp(-i q.r) ds.
    # For the straight edge r0 -> r1 (CCW, outward normal * ds = (dy, -dx)):
    #   (px dy - py dx) exp(-i q.m) sinc(q.d / 2),  m = midpoint, d = r1 - r0.
    # The edge terms cancel to O(|q| R) relative, so for |q| R < 1 the Taylor
    # series below is used instead.
    px, py = np.broadcast_arrays(np.asarray(px, dtype=float), np.asarray(py, dtype=float))
    radius = max(math.hypot(x, y) for x, y in verts)
    small = np.hypot(px, py) * radius < 1.0
    q2 = np.where(small, 1.0, px * px + py * py)
    acc = np.zeros(px.shape, dtype=complex)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        dx, dy = x1 - x0, y1 - y0
        mx, my = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        acc += (px * dy - py * dx) * np.exp(-1j * (px * mx + py * my)) * sinc(0.5 * (px * dx + py * dy))
    out = 1j * acc / q2
    if np.any(small):
        out = np.where(small, _polygon_series(verts, px, py), out)
    return out


_SERIES_TERMS = 24


def _polygon_series(verts, px, py):
    # Fan of signed triangles (0, r0, r1).  For a linear form L on a triangle
    # with vertex values (0, b, c):  int L^k dA = 2 A k! / (k+2)! h_k(b, c),
    # h_k the complete homogeneous polynomial.  Summing (-i)^k / k! times that
    # gives 2 A sum_k (-i)^k h_k(b, c) / (k+2)!.
    total = np.zeros(px.shape, dtype=complex)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        signed_area = 0.5 * (x0 * y1 - x1 * y0)
        if signed_area == 0.0:
            continue
        b = px * x0 + py * y0
        c = px * x1 + py * y1
        h = np.ones(px.shape)
        c_pow = np.ones(px.shape)
        edge = np.full(px.shape, 0.5, dtype=complex)
        factor = 0.5
        phase = 1.0 + 0j
        for k in range(1, _SERIES_TERMS):
            c_pow = c_pow * c
            h = b * h + c_pow
            factor /= k + 2
            phase *= -1j
            edge = edge + phase * factor * h
        total = total + 2.0 * signed_area * edge
    return total


def aperture_integral(shape, px, py):
    """``iint_A exp[-i (px x + py y)] dx dy`` (not normalised)."""
    if isinstance(shape, Rectangle):
        a, b = shape.half_width_a, shape.half_height_b
        return 4.0 * a * b * sinc(a * np.asarray(px)) * sinc(b * np.asarray(py)) * _shift_phase(shape.center, px, py)
    if isinstance(shape, Circle):
        r = shape.radius_r
        rho = np.hypot(px, py)
        return math.pi * r * r * jinc(rho * r) * _shift_phase(shape.center, px, py)
    if isinstance(shape, Polygon):
        return _polygon_integral(shape.vertices, px, py)
    if isinstance(shape, Union):
        return sum(aperture_integral(m, px, py) for m in shape.members)
    raise TypeError("unknown shape %r" % (shape,))


def transverse_ft(shape, px, py):
    """Normalised aperture transform ``S^{-1/2} iint_A exp[-i(px x + py y)]``.

    Equals ``sqrt(S)`` at the origin.  Rectangles and circles use their
    sinc / Airy closed forms, polygons an exact edge sum, unions the sum of
    member integrals.
    """
    out = aperture_integral(shape, px, py) / math.sqrt(area(shape))
    out = np.asarray(out, dtype=complex)
    return complex(out) if out.ndim == 0 else out


def transverse_ft_mc_oracle(shape, px: float, py: float, spec: McSpec):
    """Monte Carlo estimate of :func:`transverse_ft` at one frequency.

    Uniform sampling of the shape's bounding box with the indicator as
    weight.  Returns ``(estimate, std_error)``.
    """
    x0, x1, y0, y1 = shape.bbox()
    norm = 1.0 / math.sqrt(area(shape))

    def integrand(x, y):
        inside = contains(shape, x, y)
        return np.where(inside, norm * np.exp(-1j * (px * x + py * y)), 0.0)

    est, err = integrate_2d_mc(integrand, BoxSampler(x0, x1, y0, y1), spec)
    return complex(est), float(err)


def transverse_term(shape, p, theta_x, theta_y):
    """Transverse diffraction term T in [0, 1] for direction (theta_x, theta_y)."""
    px, py, _ = from_angles_array(p, theta_x, theta_y)
    val = np.abs(aperture_integral(shape, px, py)) ** 2 / area(shape) ** 2
    return float(val) if np.ndim(val) == 0 else val
