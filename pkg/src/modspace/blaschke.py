"""Quadratic Blaschke products fixing 0 and 1, and their second iterate.

B_a(w) = (1 - conj(a))/(1 - a) * w (w - a)/(1 - conj(a) w).  For real
t in [0, 1) this is B_t(w) = w (w - t)/(1 - t w).  The return map
G_t = B_t o B_t has fixed points 0, 1, infinity and a conjugate pair
rho_+, rho_- on the unit circle, whose common multiplier is
1 + (t - 1)(t - 3).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

DISK_TOL = 1e-12


@dataclass(frozen=True)
class BlaschkeParam:
    a: complex

    def __post_init__(self):
        if not abs(self.a) < 1.0:
            raise ValueError("parameter must lie in the open unit disk")

    @property
    def is_real(self) -> bool:
        return complex(self.a).imag == 0.0

    @property
    def t(self) -> float:
        if not self.is_real or complex(self.a).real < 0:
            raise ValueError("not a parameter of the real family t in [0, 1)")
        return complex(self.a).real


def blaschke_apply(a, w):
    a = complex(a.a if isinstance(a, BlaschkeParam) else a)
    w = complex(w)
    if not abs(a) < 1.0:
        raise ValueError("parameter must lie in the open unit disk")
    if abs(w) > 1.0 + DISK_TOL:
        raise ValueError("point must lie in the closed unit disk")
    ac = a.conjugate()
    return (1 - ac) / (1 - a) * w * (w - a) / (1 - ac * w)


def blaschke_derivative(t: float, w):
    """B_t'(w) = (-t w^2 + 2w - t)/(1 - t w)^2."""
    w = complex(w)
    return (-t * w * w + 2 * w - t) / (1 - t * w) ** 2


def disk_critical_point(t: float) -> float:
    """The zero of B_t' inside the unit disk."""
    if not 0.0 <= t < 1.0:
        raise ValueError("t must lie in [0, 1)")
    if t == 0.0:
        return 0.0
    # roots of t w^2 - 2 w + t; the product of the roots is 1
    s = math.sqrt(1.0 - t * t)
    big = (1.0 + s) / t
    small = t / (1.0 + s)
    roots = [r for r in (small, big) if abs(r) < 1.0]
    assert len(roots) == 1
    return roots[0]


def _return_map_fixed_poly(t: float):
    """Coefficients (highest first) of P(P - tQ) - w Q(Q - tP),
    where B_t = P/Q with P = w^2 - t w and Q = 1 - t w."""
    P = np.array([1.0, -t, 0.0])
    Q = np.array([-t, 1.0])
    top = np.polymul(P, np.polysub(P, t * Q))
    bot = np.polymul(Q, np.polysub(Q, t * P))
    return np.polysub(top, np.polymul([1.0, 0.0], bot))


@dataclass(frozen=True)
class ReturnMapAnalysis:
    t: float
    multiplier_at_0: float
    multiplier_at_1: float
    rho_plus: complex
    rho_minus: complex
    lambda_numeric: float
    lambda_formula: float
    identity_residual: float

    @property
    def lambda_error(self) -> float:
        return abs(self.lambda_numeric - self.lambda_formula)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "multiplier_at_0": self.multiplier_at_0,
            "multiplier_at_1": self.multiplier_at_1,
            "rho_plus_re": self.rho_plus.real,
            "rho_plus_im": self.rho_plus.imag,
            "lambda_numeric": self.lambda_numeric,
            "lambda_formula": self.lambda_formula,
            "identity_residual": self.identity_residual,
        }


def lambda_formula(t: float) -> float:
    return 1.0 + (t - 1.0) * (t - 3.0)


def return_map_analysis(t: float, tol: float = 1e-8) -> ReturnMapAnalysis:
    if not 0.0 <= t < 1.0:
        raise ValueError("t must lie in [0, 1)")
    # multiplier at 0: B_t'(0) = -t, squared
    m0 = abs(blaschke_derivative(t, 0.0)) ** 2
    d1 = blaschke_derivative(t, 1.0).real
    m1 = d1 * d1
    poly = _return_map_fixed_poly(t)
    # strip the root at 0, deflate the root at 1, leaving a quadratic
    if abs(poly[-1]) > 1e-14:
        raise ArithmeticError("expected a root at 0")
    cubic = poly[:-1]
    quad, rem = np.polydiv(cubic, [1.0, -1.0])
    if abs(rem[-1]) > 1e-9 * np.max(np.abs(cubic)):
        raise ArithmeticError(f"w = 1 is not a root (remainder {rem[-1]:g})")
    A, B, C = quad
    disc = B * B - 4 * A * C
    if disc >= 0:
        raise ArithmeticError("return map fixed points are not a conjugate pair")
    rho = complex(-B, math.sqrt(-disc)) / (2 * A)
    rho_p, rho_m = rho, rho.conjugate()
    if abs(abs(rho_p) - 1.0) > tol or abs(rho_p - 1.0) < 1e-6:
        raise ArithmeticError("fixed pair not isolated on the unit circle")
    # rho_+ and rho_- are a 2-cycle of B_t
    lam = blaschke_derivative(t, rho_p) * blaschke_derivative(t, rho_m)
    lam_num = lam.real
    lf = lambda_formula(t)
    ident = 2.0 / (1.0 - lam_num) + 2.0 / (1.0 - m0) + 1.0 / (1.0 - m1) - 1.0
    return ReturnMapAnalysis(t, m0, m1, rho_p, rho_m, lam_num, lf, abs(ident))


@dataclass(frozen=True)
class PetersenDisk:
    center: complex
    radius: float
    limit_multiplier: complex
    modulus_range: tuple  # (exp(-r), exp(r))
    angle_range: tuple  # argument interval of the exponentiated disk

    def contains(self, log_multiplier: complex) -> bool:
        return abs(log_multiplier - self.center) < self.radius


def petersen_disk(t: float, p: int, q: int) -> PetersenDisk:
    """Disk in log-multiplier space that holds the log of the multiplier of
    the non-real fixed points along the degenerating family."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    if q < 2 or math.gcd(p, q) != 1:
        raise ValueError("need q >= 2 and gcd(p, q) = 1")
    r = math.log(lambda_formula(t))
    c = 2j * math.pi * p / q
    ang = 2 * math.pi * p / q
    return PetersenDisk(c, r, cmath.exp(c), (math.exp(-r), math.exp(r)), (ang - r, ang + r))
