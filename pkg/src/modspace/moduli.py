"""Geometry of the real moduli plane (sigma1, sigma2).

Ideal boundary points, the lines on which a fixed point has a prescribed
multiplier, the numerator choice for large periods, inversion of moduli
coordinates to a representative map, and the barrier curve used to show
that an entropy level set has two components.
"""

from __future__ import annotations

import cmath
import io
import math
from dataclasses import dataclass
from math import gcd

import numpy as np
from scipy.optimize import brentq

from .ratmap import (
    DegenerateMapError,
    MixedNormalForm,
    ModuliPoint,
    QuadMap,
    fixed_point_data,
    mixed_a_squared,
    multiplier_cubic,
)

BLOWUP_THRESHOLD = 1e3
BARRIER_TOL = 1e-6


# ---------------------------------------------------------------- ideal points

@dataclass(frozen=True)
class IdealPoint:
    variant: str  # "RealSegment" | "UnitArc"
    value: float

    def __post_init__(self):
        if self.variant == "RealSegment":
            if not -1.0 <= self.value <= 1.0:
                raise ValueError("RealSegment value must lie in [-1, 1]")
        elif self.variant == "UnitArc":
            if not 0.0 <= self.value <= math.pi:
                raise ValueError("UnitArc angle must lie in [0, pi]")
        else:
            raise ValueError(f"unknown variant {self.variant!r}")

    def to_dict(self) -> dict:
        return {"variant": self.variant, "value": self.value}


def ideal_point_from_multipliers(mults, blowup_threshold: float = BLOWUP_THRESHOLD):
    mults = sorted((complex(m) for m in mults), key=abs)
    if abs(mults[-1]) < blowup_threshold:
        return None
    mu = mults[0]
    if abs(mu.imag) <= 1e-9 * max(1.0, abs(mu)):
        r = mu.real
        if abs(r) > 1.0:
            r = 1.0 / r
        return IdealPoint("RealSegment", r)
    return IdealPoint("UnitArc", abs(cmath.phase(mu)))


def ideal_point(m: QuadMap, blowup_threshold: float = BLOWUP_THRESHOLD):
    """Boundary coordinate of m when one multiplier has blown up, else None."""
    return ideal_point_from_multipliers(fixed_point_data(m).multipliers, blowup_threshold)


# ---------------------------------------------------------------- multiplier lines

@dataclass(frozen=True)
class Per1Line:
    """sigma2 = slope * sigma1 + intercept: some fixed point has multiplier mu."""

    mu: float
    slope: float
    intercept: float

    def sigma2_at(self, sigma1: float) -> float:
        return self.slope * sigma1 + self.intercept

    def point_at(self, sigma1: float) -> ModuliPoint:
        return ModuliPoint(sigma1, self.sigma2_at(sigma1))


def per1_line(mu: float) -> Per1Line:
    if mu == 0:
        raise ValueError("mu must be nonzero")
    return Per1Line(mu, (mu * mu + 1.0) / mu, -(mu ** 3 + 2.0) / mu)


def choose_numerator(q: int) -> int:
    """A numerator p coprime to q with 1/3 < p/q < 1/2."""
    if q <= 12:
        raise ValueError("q must exceed 12")
    if q % 2 == 1:
        p = (q - 1) // 2
    elif q % 4 == 2:
        p = q // 2 - 2
    else:
        p = q // 2 - 1
    assert gcd(p, q) == 1 and 3 * p > q and 2 * p < q
    return p


# ---------------------------------------------------------------- inversion

def real_multiplier_roots(sigma1: float, sigma2: float):
    """Real roots of the multiplier cubic, Newton-polished."""
    c = multiplier_cubic(sigma1, sigma2)
    out = []
    for r in np.roots(c):
        if abs(r.imag) > 1e-7 * max(1.0, abs(r)):
            continue
        x = r.real
        for _ in range(3):
            f = ((x - sigma1) * x + sigma2) * x - (sigma1 - 2.0)
            df = (3.0 * x - 2.0 * sigma1) * x + sigma2
            if df == 0:
                break
            x -= f / df
        out.append(float(x))
    return out


def representative_form(sigma1: float, sigma2: float) -> MixedNormalForm:
    """A normal form in the conjugacy class (sigma1, sigma2).

    Uses the real multiplier of largest modulus; the plus form when the
    required a^2 is nonnegative and the minus form otherwise.
    """
    roots = real_multiplier_roots(sigma1, sigma2)
    if not roots:
        raise DegenerateMapError("no real multiplier")
    mu = max(roots, key=abs)
    if mu == 0:
        raise DegenerateMapError("zero multiplier")
    a2 = mixed_a_squared(sigma1, mu)
    if a2 >= 0:
        return MixedNormalForm(mu, math.sqrt(a2))
    return MixedNormalForm(mu, math.sqrt(-a2), "minus")


def representative_map(pt) -> QuadMap:
    s1, s2 = pt.as_tuple() if isinstance(pt, ModuliPoint) else pt
    return representative_form(s1, s2).to_map()


# ---------------------------------------------------------------- barrier

def _on_segment_distance(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / L2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _ray_distance(px, py, ax, ay, ux, uy):
    t = max(0.0, (px - ax) * ux + (py - ay) * uy)
    return math.hypot(px - (ax + t * ux), py - (ay + t * uy))


def _segments_cross(p1, p2, p3, p4):
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    o1, o2 = orient(p1, p2, p3), orient(p1, p2, p4)
    o3, o4 = orient(p3, p4, p1), orient(p3, p4, p2)
    return o1 * o2 < 0 and o3 * o4 < 0


@dataclass(frozen=True)
class BarrierCurve:
    """Upward vertical ray from ``start`` plus a polyline from ``start``
    continued past its last vertex along its final direction.

    The two pieces bound a wedge opening toward the upper left.  Points in
    the wedge are on the "Right" of the barrier (right of the path that
    comes down the ray and leaves along the polyline); all others are "Left".
    """

    start: tuple
    vertices: tuple  # (sigma1, sigma2) pairs, vertices[0] == start
    end_ideal_angle: float | None = None

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise ValueError("polyline needs at least two vertices")
        if tuple(self.vertices[0]) != tuple(self.start):
            raise ValueError("polyline must start at the stored start point")
        if not self.is_simple():
            raise ValueError("polyline self-intersects")

    def is_simple(self) -> bool:
        v = self.vertices
        segs = list(zip(v[:-1], v[1:]))
        for i in range(len(segs)):
            for j in range(i + 2, len(segs)):
                if _segments_cross(*segs[i], *segs[j]):
                    return False
        return True

    @property
    def end_direction(self):
        (x0, y0), (x1, y1) = self.vertices[-2], self.vertices[-1]
        n = math.hypot(x1 - x0, y1 - y0)
        return ((x1 - x0) / n, (y1 - y0) / n)

    def distance(self, pt) -> float:
        px, py = pt.as_tuple() if isinstance(pt, ModuliPoint) else pt
        sx, sy = self.start
        d = _ray_distance(px, py, sx, sy, 0.0, 1.0)
        v = self.vertices
        for (ax, ay), (bx, by) in zip(v[:-1], v[1:]):
            d = min(d, _on_segment_distance(px, py, ax, ay, bx, by))
        ux, uy = self.end_direction
        d = min(d, _ray_distance(px, py, v[-1][0], v[-1][1], ux, uy))
        return d

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("sigma1,sigma2\n")
        for x, y in self.vertices:
            out.write(f"{x!r},{y!r}\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BarrierCurve":
        rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
        verts = tuple((float(a), float(b)) for a, b in rows)
        return cls(verts[0], verts)


def side_of_barrier(pt, L: BarrierCurve, tol: float = BARRIER_TOL) -> str:
    """"Left", "Right" or "OnBarrier" (within ``tol``)."""
    px, py = pt.as_tuple() if isinstance(pt, ModuliPoint) else pt
    if L.distance((px, py)) <= tol:
        return "OnBarrier"
    # close the wedge far away and take the winding number
    xs = [abs(c) for v in L.vertices for c in v] + [abs(px), abs(py)]
    R = 1e6 * (1.0 + max(xs))
    sx, sy = L.start
    ux, uy = L.end_direction
    ex, ey = L.vertices[-1]
    poly = [(sx, sy + R)] + list(L.vertices) + [(ex + R * ux, ey + R * uy)]
    total = 0.0
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i][0] - px, poly[i][1] - py
        bx, by = poly[(i + 1) % n][0] - px, poly[(i + 1) % n][1] - py
        total += math.atan2(ax * by - ay * bx, ax * bx + ay * by)
    inside = abs(total) > math.pi
    return "Right" if inside else "Left"


def _period3_defect(mu, a, c):
    x = c
    for _ in range(3):
        if x == 0.0:
            return math.pi
        x = (x + 1.0 / x) / mu + a
    return (2 * math.atan(x) - 2 * math.atan(c) + math.pi) % (2 * math.pi) - math.pi


def build_barrier(center, mu_max: float = 5000.0, max_step: float = 0.1) -> BarrierCurve:
    """Barrier through the period-3 center ``center`` (a PcfCenter for 1/3).

    The curve part follows maps on which the critical point +1 stays
    periodic of period three, parametrized by log|mu| from the center out
    to |mu| = mu_max.  Along it the attracting 3-cycle persists, so the
    whole curve lies in the hyperbolic component of the center.
    """
    mu0, a0 = center.params.mu, center.params.a
    lg, a = math.log(-mu0), a0
    lmax = math.log(mu_max)
    pts = [(lg, a)]
    h = 0.05
    while lg < lmax:
        slope = 0.0 if len(pts) < 2 else (pts[-1][1] - pts[-2][1]) / (pts[-1][0] - pts[-2][0])
        ln = min(lg + h, lmax)
        pred = a + slope * (ln - lg)
        mu = -math.exp(ln)
        w = max(1e-6, 0.5 * abs(slope * h) + 1e-5)
        lo, hi = pred - w, pred + w
        ok = False
        if _period3_defect(mu, lo, 1.0) * _period3_defect(mu, hi, 1.0) < 0:
            an = brentq(lambda x: _period3_defect(mu, x, 1.0), lo, hi, xtol=1e-15)
            ok = abs(an - pred) < w
        if not ok:
            h /= 2
            if h < 1e-9:
                break
            continue
        lg, a = ln, an
        pts.append((lg, a))
        h = min(1.5 * h, max_step)
    verts = [center.moduli.as_tuple()]
    for lg, a in pts[1:]:
        verts.append(MixedNormalForm(-math.exp(lg), a).sigmas())
    verts = [tuple(map(float, v)) for v in verts]
    lgl, al = pts[-1]
    ip = ideal_point(MixedNormalForm(-math.exp(lgl), al).to_map(), min(BLOWUP_THRESHOLD, 0.5 * mu_max))
    angle = ip.value if ip is not None and ip.variant == "UnitArc" else None
    return BarrierCurve(verts[0], tuple(verts), angle)
