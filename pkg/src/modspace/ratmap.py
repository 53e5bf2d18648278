"""Real quadratic rational maps on the Riemann sphere.

Points of the sphere are Python numbers; the point at infinity is
``INF`` (a float infinity).  Real maps act on the real circle
R u {oo}, which we parametrize by the angle ``theta = 2*atan(x)`` so
that circular order is plain order in ``(-pi, pi]``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf

IDENTITY_TOL = 1e-9
GEOMETRY_TOL = 1e-6
END_COEFF_TOL = 1e-15


class DegenerateMapError(ValueError):
    """Raised for coefficient sets that do not define a degree-two map."""


class ToleranceError(ValueError):
    """A quantity that should be real or zero is not, within tolerance."""


def is_inf(z) -> bool:
    return not cmath.isfinite(z)


def circle_angle(x: float) -> float:
    """Angle coordinate of a point of the real circle; oo -> pi."""
    if is_inf(x):
        return math.pi
    return 2.0 * math.atan(x)


def angle_to_point(theta: float) -> float:
    theta = wrap_angle(theta)
    if abs(theta - math.pi) < 1e-300 or theta == -math.pi:
        return INF
    return math.tan(theta / 2.0)


def wrap_angle(theta: float) -> float:
    """Reduce to (-pi, pi]."""
    t = math.fmod(theta + math.pi, 2.0 * math.pi)
    if t <= 0.0:
        t += 2.0 * math.pi
    return t - math.pi


def chordal(z, w) -> float:
    """Chordal distance on the sphere (diameter 2)."""
    if is_inf(z) and is_inf(w):
        return 0.0
    if is_inf(z):
        return 2.0 / math.sqrt(1.0 + abs(w) ** 2)
    if is_inf(w):
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


# ---------------------------------------------------------------- polynomials

def _quadratic_roots(a, b, c):
    """Roots of a z^2 + b z + c with a != 0, cancellation-free."""
    disc = cmath.sqrt(b * b - 4 * a * c)
    s = -b - disc if (b.conjugate() * disc).real >= 0 else -b + disc
    if s == 0:
        return [0j, 0j]
    return [s / (2 * a), 2 * c / s]


def _polish(roots, coeffs, steps=2):
    """Newton steps on each root, in the chart (z or 1/z) where it is bounded."""
    fwd = np.asarray(coeffs, dtype=complex)
    rev = fwd[::-1]
    out = []
    for r in roots:
        r = complex(r)
        poly, x = (fwd, r) if abs(r) <= 1.0 else (rev, 1.0 / r)
        dpoly = np.polyder(poly)
        for _ in range(steps):
            f, df = np.polyval(poly, x), np.polyval(dpoly, x)
            if df == 0:
                break
            nx = x - f / df
            if abs(np.polyval(poly, nx)) >= abs(f):
                break
            x = nx
        out.append(complex(x) if abs(r) <= 1.0 else (INF if x == 0 else 1.0 / complex(x)))
    return out


def binary_form_roots(coeffs, real: bool = False):
    """Roots on the sphere of a binary form given highest degree first.

    Vanishing leading coefficients contribute roots at ``INF``.  The
    polynomial is solved in whichever chart (z or 1/z) keeps the roots
    bounded by one in modulus where possible.
    """
    cs = [complex(x) for x in coeffs]
    n = len(cs) - 1
    scale = max(abs(x) for x in cs)
    if scale == 0:
        raise DegenerateMapError("identically zero form")
    cs = [x / scale for x in cs]
    roots = []
    # end coefficients at rounding level put a root within that distance of oo or 0
    while cs and abs(cs[0]) < END_COEFF_TOL:
        roots.append(INF)
        cs = cs[1:]
    zeros = 0
    while cs and abs(cs[-1]) < END_COEFF_TOL:
        zeros += 1
        cs = cs[:-1]
    roots.extend([0.0] * zeros)
    flip = len(cs) > 1 and abs(cs[0]) < abs(cs[-1])
    work = cs[::-1] if flip else cs
    deg = len(work) - 1
    if deg == 1:
        found = [-work[1] / work[0]]
    elif deg == 2:
        found = _quadratic_roots(*work)
    elif deg == 0:
        found = []
    else:
        # companion-matrix eigenvalues stay accurate when root sizes differ wildly
        found = _polish(np.roots(work), work)
    if flip:
        found = [INF if r == 0 else 1.0 / r for r in found]
    if real:
        found = _snap_conjugates(found, cs if not flip else cs)
    roots.extend(found)
    assert len(roots) == n
    return roots


def _snap_conjugates(roots, coeffs):
    """Enforce the conjugate symmetry that a real polynomial's roots must have."""
    finite = [r for r in roots if not is_inf(r)]
    others = [r for r in roots if is_inf(r)]
    deg = len(finite)
    if deg == 0:
        return roots
    if deg == 1:
        return [finite[0].real] + others
    if deg == 2:
        c = [complex(x).real for x in coeffs]
        # the disc of the form decides real vs. conjugate pair
        if len(c) == 3:
            disc = c[1] * c[1] - 4 * c[0] * c[2]
        else:
            disc = -1.0 if abs(finite[0].imag) > 1e-12 * (1 + abs(finite[0])) else 1.0
        if disc >= 0:
            return sorted(r.real for r in finite) + others
        z = 0.5 * (finite[0] + finite[1].conjugate())
        return [z, z.conjugate()] + others
    # cubic: one real root plus either two real or a conjugate pair
    order = sorted(finite, key=lambda r: abs(r.imag))
    r0 = order[0].real
    a, b = order[1], order[2]
    if abs(a.imag) <= 1e-9 * (1 + abs(a)) and abs(b.imag) <= 1e-9 * (1 + abs(b)):
        return [r0, a.real, b.real] + others
    z = 0.5 * (a + b.conjugate())
    return [r0, z, z.conjugate()] + others


# ---------------------------------------------------------------- maps

@dataclass(frozen=True)
class QuadMap:
    """f(z) = (num2 z^2 + num1 z + num0) / (den2 z^2 + den1 z + den0).

    Coefficients are rescaled on construction so that the largest has
    absolute value one and the first nonzero numerator coefficient is
    positive; equality of maps up to scaling then becomes equality of
    stored coefficients.
    """

    num2: float
    num1: float
    num0: float
    den2: float
    den1: float
    den0: float

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if not np.all(np.isfinite(c)):
            raise DegenerateMapError("non-finite coefficient")
        s = np.max(np.abs(c))
        if s == 0:
            raise DegenerateMapError("all coefficients vanish")
        lead = next(x for x in c if x != 0.0)
        c = c / (s if lead > 0 else -s)
        for name, v in zip(("num2", "num1", "num0", "den2", "den1", "den0"), c):
            object.__setattr__(self, name, float(v))
        if abs(self.resultant()) < 1e-14:
            raise DegenerateMapError("numerator and denominator share a root")

    @property
    def coeffs(self):
        return (self.num2, self.num1, self.num0, self.den2, self.den1, self.den0)

    @property
    def num(self):
        return (self.num2, self.num1, self.num0)

    @property
    def den(self):
        return (self.den2, self.den1, self.den0)

    def resultant(self) -> float:
        a2, a1, a0 = self.num
        b2, b1, b0 = self.den
        # Sylvester determinant of two quadratics, expanded
        return (a2 * b0 - a0 * b2) ** 2 - (a2 * b1 - a1 * b2) * (a1 * b0 - a0 * b1)

    def __call__(self, z):
        return eval_map(self, z)

    def to_dict(self) -> dict:
        return dict(zip(("num2", "num1", "num0", "den2", "den1", "den0"), self.coeffs))

    @classmethod
    def from_dict(cls, d: dict) -> "QuadMap":
        return cls(*(float(d[k]) for k in ("num2", "num1", "num0", "den2", "den1", "den0")))

    def max_diff(self, other: "QuadMap") -> float:
        """Max-norm distance between normalized coefficient vectors."""
        return float(np.max(np.abs(np.subtract(self.coeffs, other.coeffs))))


def eval_map(m: QuadMap, z):
    """Evaluate on the sphere, switching to the 1/z chart when |z| > 1."""
    n2, n1, n0 = m.num
    d2, d1, d0 = m.den
    if is_inf(z):
        return INF if d2 == 0 else n2 / d2
    if abs(z) > 1.0:
        w = 1.0 / z
        top = (n0 * w + n1) * w + n2
        bot = (d0 * w + d1) * w + d2
    else:
        top = (n2 * z + n1) * z + n0
        bot = (d2 * z + d1) * z + d0
    if bot == 0:
        return INF
    return top / bot


def wronskian(m: QuadMap):
    """Coefficients (z^2, z, 1) of N'D - ND', the numerator of f'."""
    n2, n1, n0 = m.num
    d2, d1, d0 = m.den
    return (n2 * d1 - n1 * d2, 2.0 * (n2 * d0 - n0 * d2), n1 * d0 - n0 * d1)


def derivative(m: QuadMap, z):
    """f'(z) for finite z with finite image; INF at poles."""
    a, b, c = wronskian(m)
    d2, d1, d0 = m.den
    bot = (d2 * z + d1) * z + d0
    if bot == 0:
        return INF
    return ((a * z + b) * z + c) / (bot * bot)


def orientation_sign(m: QuadMap, x: float) -> int:
    """Sign of the derivative of the circle map at a finite real x.

    Valid through poles: in the chart -1/f the derivative has the sign of
    the Wronskian as well.
    """
    a, b, c = wronskian(m)
    w = (a * x + b) * x + c
    return (w > 0) - (w < 0)


def multiplier(m: QuadMap, z) -> complex:
    """Derivative at a fixed point, in the chart where the point is bounded."""
    if is_inf(z) or abs(z) > 1.0:
        # g(w) = 1/f(1/w) = (d2 + d1 w + d0 w^2)/(n2 + n1 w + n0 w^2)
        w = 0.0 if is_inf(z) else 1.0 / z
        n2, n1, n0 = m.num
        d2, d1, d0 = m.den
        top = (d0 * w + d1) * w + d2
        bot = (n0 * w + n1) * w + n2
        dtop = 2.0 * d0 * w + d1
        dbot = 2.0 * n0 * w + n1
        return complex((dtop * bot - top * dbot) / (bot * bot))
    return complex(derivative(m, z))


def critical_points(m: QuadMap):
    """The two critical points: reals ascending with oo last, else Im > 0 first."""
    a, b, c = wronskian(m)
    if a == 0 and b == 0 and c == 0:
        raise DegenerateMapError("Wronskian vanishes identically")
    pts = binary_form_roots((a, b, c), real=True)
    return _order_points(pts)


def _order_points(pts):
    def key(z):
        if is_inf(z):
            return (1, 0.0, 0.0)
        z = complex(z)
        return (0, -z.imag if z.imag != 0 else 0.0, z.real)

    out = []
    for z in sorted(pts, key=key):
        if not is_inf(z) and complex(z).imag == 0:
            z = complex(z).real
        out.append(z)
    return tuple(out)


@dataclass(frozen=True)
class FixedPointSet:
    points: tuple
    multipliers: tuple
    parabolic: bool = False

    def formula_residual(self) -> float:
        """|sum 1/(1 - mu_i) - 1|; nan when some multiplier is 1."""
        if any(abs(1 - mu) < 1e-6 for mu in self.multipliers):
            return math.nan
        return abs(sum(1.0 / (1.0 - mu) for mu in self.multipliers) - 1.0)

    def symmetric_functions(self):
        m1, m2, m3 = self.multipliers
        return (m1 + m2 + m3, m1 * m2 + m2 * m3 + m3 * m1, m1 * m2 * m3)


def fixed_point_data(m: QuadMap, tol: float = GEOMETRY_TOL) -> FixedPointSet:
    n2, n1, n0 = m.num
    d2, d1, d0 = m.den
    # z D(z) - N(z), highest degree first
    cubic = (d2, d1 - n2, d0 - n1, -n0)
    pts = binary_form_roots(cubic, real=True)
    pts = list(_order_points(pts))
    mults = tuple(multiplier(m, z) for z in pts)
    parabolic = any(
        chordal(pts[i], pts[j]) < tol for i in range(3) for j in range(i + 1, 3)
    )
    return FixedPointSet(tuple(pts), mults, parabolic)


@dataclass(frozen=True)
class ModuliPoint:
    sigma1: float
    sigma2: float

    def as_tuple(self):
        return (self.sigma1, self.sigma2)

    def distance(self, other: "ModuliPoint") -> float:
        return math.hypot(self.sigma1 - other.sigma1, self.sigma2 - other.sigma2)


def sigmas_from_multipliers(mults, tol: float = IDENTITY_TOL):
    m1, m2, m3 = mults
    s1 = m1 + m2 + m3
    s2 = m1 * m2 + m2 * m3 + m3 * m1
    s3 = m1 * m2 * m3
    for s in (s1, s2):
        if abs(s.imag) > tol * max(1.0, abs(s)):
            raise ToleranceError(f"imaginary part {s.imag:g} in symmetric function")
    return s1.real, s2.real, s3


def moduli_point(m: QuadMap, tol: float = IDENTITY_TOL) -> ModuliPoint:
    """(sigma1, sigma2) of the conjugacy class of m."""
    fp = fixed_point_data(m)
    s1, s2, s3 = sigmas_from_multipliers(fp.multipliers, tol)
    scale = max(1.0, abs(s1), abs(s3))
    if abs(s3 - (s1 - 2.0)) > 1e3 * tol * scale:
        raise ToleranceError("sigma3 != sigma1 - 2; fixed points inaccurate")
    return ModuliPoint(s1, s2)


def multiplier_cubic(sigma1: float, sigma2: float):
    """Coefficients of z^3 - s1 z^2 + s2 z - (s1 - 2)."""
    return (1.0, -sigma1, sigma2, -(sigma1 - 2.0))


# ---------------------------------------------------------------- normal forms

@dataclass(frozen=True)
class MixedNormalForm:
    """z -> (z + 1/z)/mu + a  (variant "plus") or (z - 1/z)/mu + a ("minus")."""

    mu: float
    a: float
    variant: str = "plus"

    def __post_init__(self):
        if self.mu == 0:
            raise ValueError("mu must be nonzero")
        if self.variant not in ("plus", "minus"):
            raise ValueError(f"unknown variant {self.variant!r}")

    def to_map(self) -> QuadMap:
        sign = 1.0 if self.variant == "plus" else -1.0
        return QuadMap(1.0, self.a * self.mu, sign, 0.0, self.mu, 0.0)

    def sigmas(self):
        """Closed-form (sigma1, sigma2)."""
        mu = self.mu
        a2 = self.a ** 2 if self.variant == "plus" else -(self.a ** 2)
        s1 = mu * (1.0 - a2) - 2.0 + 4.0 / mu
        s2 = (mu + 1.0 / mu) * s1 - (mu ** 2 + 2.0 / mu)
        return s1, s2

    def to_dict(self) -> dict:
        return {"variant": self.variant, "mu": self.mu, "a": self.a}

    @classmethod
    def from_dict(cls, d: dict) -> "MixedNormalForm":
        return cls(float(d["mu"]), float(d["a"]), d.get("variant", "plus"))


def from_mixed_normal(nf: MixedNormalForm):
    m = nf.to_map()
    return m, ModuliPoint(*nf.sigmas())


def mixed_a_squared(sigma1: float, mu: float) -> float:
    """a^2 solving the sigma1 formula for a fixed point of multiplier mu."""
    return 1.0 - (sigma1 + 2.0 - 4.0 / mu) / mu


# ---------------------------------------------------------------- Möbius

def mobius_conjugate(m: QuadMap, mob) -> QuadMap:
    """phi o f o phi^-1 for phi(z) = (a z + b)/(c z + d), mob = ((a, b), (c, d))."""
    (a, b), (c, d) = mob
    # phi^-1(z) = (d z - b)/(-c z + a); substitute into homogeneous N, D
    X = np.array([d, -b])  # d z - b, highest first
    Y = np.array([-c, a])

    def homog(p2, p1, p0):
        return p2 * np.convolve(X, X) + p1 * np.convolve(X, Y) + p0 * np.convolve(Y, Y)

    N = homog(*m.num)
    D = homog(*m.den)
    top = a * N + b * D
    bot = c * N + d * D
    return QuadMap(*np.real(top), *np.real(bot))


def mobius_apply(mob, z):
    (a, b), (c, d) = mob
    if is_inf(z):
        return INF if c == 0 else a / c
    bot = c * z + d
    if bot == 0:
        return INF
    return (a * z + b) / bot


# ---------------------------------------------------------------- classification

class RealClass(enum.Enum):
    CoveringDegPlus2 = "covering+2"
    CoveringDegMinus2 = "covering-2"
    MonotoneIncreasing = "monotone+"
    MonotoneDecreasing = "monotone-"
    Unimodal = "unimodal"
    BimodalPlusMinusPlus = "bimodal+-+"
    BimodalMinusPlusMinus = "bimodal-+-"

    @property
    def is_covering(self) -> bool:
        return self in (RealClass.CoveringDegPlus2, RealClass.CoveringDegMinus2)

    @property
    def is_monotone(self) -> bool:
        return self in (RealClass.MonotoneIncreasing, RealClass.MonotoneDecreasing)


@dataclass(frozen=True)
class RealDynamicsClass:
    kind: RealClass
    symmetric: bool = False
    boundary_ambiguous: bool = False
    # image arc f(R^) as (start, end) angles, positive orientation; None if covering
    image_arc: tuple | None = field(default=None, compare=False)


def in_arc(theta: float, start: float, end: float, tol: float = 0.0) -> bool:
    """Whether theta lies on the closed positively oriented arc start -> end."""
    span = (end - start) % (2 * math.pi)
    off = (theta - start) % (2 * math.pi)
    return off <= span + tol or off >= 2 * math.pi - tol


def image_arc(m: QuadMap):
    """The arc f(R^) bounded by the two (real) critical values, or None if covering."""
    cps = critical_points(m)
    if any(not is_inf(c) and isinstance(c, complex) for c in cps):
        return None
    v0, v1 = (eval_map(m, c) for c in cps)
    t0, t1 = circle_angle(_real(v0)), circle_angle(_real(v1))
    # f of a generic non-critical point lies inside the image
    probe = None
    for x in (0.123456789, -0.7654321, 2.71828, -3.14159):
        if all(is_inf(c) or abs(x - c) > 1e-3 for c in cps):
            probe = circle_angle(_real(eval_map(m, x)))
            break
    if in_arc(probe, t0, t1):
        return (t0, t1)
    return (t1, t0)


def _real(z):
    if is_inf(z):
        return INF
    return complex(z).real


def symmetry_flag(m: QuadMap, tol: float = GEOMETRY_TOL) -> bool:
    """True when m is conjugate to (z +- 1/z)/mu, i.e. a = 0 for some real multiplier."""
    fp = fixed_point_data(m)
    try:
        s1, _, _ = sigmas_from_multipliers(fp.multipliers, 1e-6)
    except ToleranceError:
        return False
    for mu in fp.multipliers:
        if abs(mu.imag) > 1e-9 * max(1.0, abs(mu)) or abs(mu) < 1e-12:
            continue
        mu = mu.real
        if abs(mixed_a_squared(s1, mu)) < tol * max(1.0, abs(mu)):
            return True
    return False


def classify_real(m: QuadMap, tol: float = GEOMETRY_TOL) -> RealDynamicsClass:
    """Which of the seven real-dynamics regions m belongs to.

    Critical points on the boundary of the image arc count as contained
    in it; ``boundary_ambiguous`` records that this happened.
    """
    sym = symmetry_flag(m)
    arc = image_arc(m)
    if arc is None:
        # the Wronskian has no real root, so its leading sign is the sign of f'
        a = wronskian(m)[0]
        kind = RealClass.CoveringDegPlus2 if a > 0 else RealClass.CoveringDegMinus2
        return RealDynamicsClass(kind, sym, False, None)
    start, end = arc
    cps = critical_points(m)
    ambiguous = False
    inside = []
    for c in cps:
        th = circle_angle(_real(c))
        if in_arc(th, start, end, tol):
            inside.append(th)
            d = min(abs(wrap_angle(th - start)), abs(wrap_angle(th - end)))
            if d <= tol:
                ambiguous = True
    inside.sort(key=lambda th: (th - start) % (2 * math.pi))
    span = (end - start) % (2 * math.pi)
    first_stop = (inside[0] - start) % (2 * math.pi) if inside else span
    flip = 1
    if first_stop < tol:
        # critical point at the start of the arc: it bounds a degenerate first
        # lap whose sign is opposite to the lap that follows
        nxt = ((inside[1] - start) % (2 * math.pi)) if len(inside) > 1 else span
        mid = first_stop + 0.5 * (nxt - first_stop)
        flip = -1
    else:
        mid = 0.5 * first_stop
    x = angle_to_point(start + mid)
    if is_inf(x):
        x = angle_to_point(start + 0.49 * first_stop)
    sgn = flip * orientation_sign(m, x)
    n = len(inside)
    if n == 0:
        kind = RealClass.MonotoneIncreasing if sgn > 0 else RealClass.MonotoneDecreasing
    elif n == 1:
        kind = RealClass.Unimodal
    else:
        kind = RealClass.BimodalPlusMinusPlus if sgn > 0 else RealClass.BimodalMinusPlusMinus
    return RealDynamicsClass(kind, sym, ambiguous, arc)


# ---------------------------------------------------------------- center form

def normalize_center_form(m: QuadMap, c0_index: int = 0) -> QuadMap:
    """Conjugate m by a real orientation-preserving Möbius map so that the
    chosen critical point goes to 0 and the non-real fixed points to +-i.
    """
    cps = critical_points(m)
    if any(not is_inf(c) and isinstance(c, complex) for c in cps):
        raise ValueError("critical points must be real")
    fp = fixed_point_data(m)
    nonreal = [z for z in fp.points if not is_inf(z) and abs(complex(z).imag) > 1e-12]
    if len(nonreal) != 2:
        raise ValueError("need exactly one real fixed point and a conjugate pair")
    c0 = cps[c0_index]
    # first move c0 to 0 (orientation preserving)
    T = ((0.0, -1.0), (1.0, 0.0)) if is_inf(c0) else ((1.0, -c0), (0.0, 1.0))
    r = mobius_apply(T, complex(max(nonreal, key=lambda z: complex(z).imag)))
    u = -r.real / r.imag
    v = abs(r) ** 2 / r.imag
    S = ((1.0, 0.0), (u, v))
    comp = np.array(S) @ np.array(T)
    return mobius_conjugate(m, tuple(map(tuple, comp)))
