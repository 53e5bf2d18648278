"""Bitransitive post-critically finite centers and hyperbolic-type detection.

Centers are located in the mixed normal form z -> (z + 1/z)/mu + a with the
critical points pinned at c0 = +1 and c1 = -1.  The real fixed point is then
at infinity, which lies in the interval I_0 = [x_0, x_1] running from +1
upward through infinity to -1; the remaining orbit points sit inside (-1, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .ratmap import (
    INF,
    MixedNormalForm,
    ModuliPoint,
    QuadMap,
    angle_to_point,
    chordal,
    circle_angle,
    critical_points,
    eval_map,
    is_inf,
    orientation_sign,
)

TWO_PI = 2.0 * math.pi
ACCEPT_RESIDUAL = 1e-10
FD_STEP = 1e-7
NEWTON_ITERS = 60


class CenterNotFound(RuntimeError):
    """Raised when no seed converges to a center with the right combinatorics.

    ``best`` holds the lowest-residual candidate seen (or None).
    """

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


def _wrap(t):
    return (t + math.pi) % TWO_PI - math.pi


def _step(mu, a, x):
    if is_inf(x):
        return INF
    if x == 0.0:
        return INF
    return (x + 1.0 / x) / mu + a


def _theta(x):
    return math.pi if is_inf(x) else 2.0 * math.atan(x)


def _orbit(mu, a, x, n):
    out = [x]
    for _ in range(n):
        x = _step(mu, a, x)
        out.append(x)
    return out


def _residual_vector(v, q, pp):
    """(f^{p'}(c0) - c1, f^q(c0) - c0) measured as wrapped circle angles."""
    mu, a = -math.exp(v[0]), v[1]
    try:
        o = _orbit(mu, a, 1.0, q)
    except OverflowError:
        return np.array([math.pi, math.pi])
    return np.array([_wrap(_theta(o[pp]) + math.pi / 2), _wrap(_theta(o[q]) - math.pi / 2)])


def _grid_residuals(L, A, q, pp):
    """Squared residual norms over a whole (log(-mu), a) grid at once."""
    mu = -np.exp(L)
    x = np.ones_like(mu)
    r1 = None
    with np.errstate(all="ignore"):
        for k in range(1, q + 1):
            x = (x + 1.0 / x) / mu + A
            if k == pp:
                r1 = np.mod(2 * np.arctan(x) + math.pi / 2 + math.pi, TWO_PI) - math.pi
        r2 = np.mod(2 * np.arctan(x) - math.pi / 2 + math.pi, TWO_PI) - math.pi
        out = r1 * r1 + r2 * r2
    out[~np.isfinite(out)] = np.inf
    return out


def _newton(v, q, pp, iters=NEWTON_ITERS, h=FD_STEP):
    """Damped Newton with a central-difference Jacobian.  Returns (v, |R|, cond)."""
    v = np.array(v, dtype=float)
    cond = math.inf
    for _ in range(iters):
        r = _residual_vector(v, q, pp)
        if np.max(np.abs(r)) < 1e-14:
            break
        J = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            J[:, k] = (_residual_vector(v + e, q, pp) - _residual_vector(v - e, q, pp)) / (2 * h)
        try:
            d = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return v, math.inf, math.inf
        if not np.all(np.isfinite(d)):
            return v, math.inf, math.inf
        n = np.max(np.abs(d))
        if n > 0.5:
            d *= 0.5 / n
        v = v + d
    r = _residual_vector(v, q, pp)
    J = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        J[:, k] = (_residual_vector(v + e, q, pp) - _residual_vector(v - e, q, pp)) / (2 * h)
    if np.all(np.isfinite(J)):
        cond = float(np.linalg.cond(J))
    return v, float(np.max(np.abs(r))), cond


def _orbit_points(mu, a, q, p):
    """x_0..x_{q-1} with x_{jp} = f^j(c0)."""
    o = _orbit(mu, a, 1.0, q - 1)
    x = [0.0] * q
    for j in range(q):
        x[(j * p) % q] = o[j]
    return x


def _circular_offsets(xs, base):
    t0 = _theta(base)
    return [(_theta(x) - t0) % TWO_PI for x in xs]


def _order_ok(xs) -> bool:
    off = _circular_offsets(xs, xs[0])
    off[0] = 0.0
    return all(b > a for a, b in zip(off, off[1:])) and abs(xs[1] + 1.0) < 1e-8


@dataclass(frozen=True)
class SeedStrategy:
    """How find_center generates Newton starting points.

    ``continuation`` reuses centers already located for the same numerator
    (extrapolated in 1/q) and for the nearest rotation number; ``grid`` is a
    coarse (log|mu|, a) scan whose best cells are tried in order.
    """

    continuation: bool = True
    grid: tuple = (80, 80)
    mu_range: tuple = (2.0, 400.0)
    a_range: tuple = (-1.5, 1.5)
    max_starts: int = 400
    extra: tuple = ()  # user seeds as (mu, a) pairs
    mirror: bool = True


@dataclass(frozen=True)
class PcfCenter:
    q: int
    p: int
    pprime: int
    params: MixedNormalForm
    map: QuadMap
    orbit: tuple
    moduli: ModuliPoint
    residual: float
    zeta_cycle: tuple | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_record(self) -> dict:
        return {
            "q": self.q,
            "p": self.p,
            "mu": self.params.mu,
            "a": self.params.a,
            "sigma1": self.moduli.sigma1,
            "sigma2": self.moduli.sigma2,
            "residual": self.residual,
        }


# solved (q, p) -> (log(-mu), a); feeds continuation seeds
_SOLVED: dict = {}


def _make_center(q, p, v, cond, how):
    mu, a = -math.exp(v[0]), float(v[1])
    pp = pow(p, -1, q)
    nf = MixedNormalForm(mu, a)
    m, mp = nf.to_map(), ModuliPoint(*nf.sigmas())
    xs = _orbit_points(mu, a, q, p)
    res = float(np.max(np.abs(_residual_vector(v, q, pp))))
    diag = {"condition": cond, "seed": how}
    zs = _zeta_cycle(mu, a, xs, q, p) if q > 2 else None
    return PcfCenter(q, p, pp, nf, m, tuple(xs), mp, res, zs, diag)


def _seeds(q, p, strategy):
    pp = pow(p, -1, q)
    for mu, a in strategy.extra:
        yield (math.log(-mu if mu < 0 else mu), a), "user"
    if strategy.continuation:
        same = sorted(k for k in _SOLVED if k[1] == p and k[0] < q)
        if len(same) >= 2:
            (q0, _), (q1, _) = same[-2], same[-1]
            v0, v1 = np.array(_SOLVED[same[-2]]), np.array(_SOLVED[same[-1]])
            s = (1.0 / q - 1.0 / q1) / (1.0 / q1 - 1.0 / q0)
            ex = v1 + (v1 - v0) * s
            for f in (1.0, 0.0, 0.5, 1.5):
                yield tuple(v1 + (ex - v1) * f), "extrapolation"
        near = sorted(
            (k for k in _SOLVED if k != (q, p)),
            key=lambda k: (abs(k[1] / k[0] - p / q), -k[0], k[1]),
        )[:3]
        local = []
        for k in near:
            v = _SOLVED[k]
            for dl in np.linspace(-0.3, 0.3, 13):
                for da in np.linspace(-0.08, 0.08, 13):
                    local.append((v[0] + dl, v[1] + da))
        if local:
            arr = np.array(local)
            r = _grid_residuals(arr[:, 0], arr[:, 1], q, pp)
            for i in np.argsort(r, kind="stable")[:60]:
                yield tuple(arr[i]), "continuation"
    nx, ny = strategy.grid
    L = np.linspace(math.log(strategy.mu_range[0]), math.log(strategy.mu_range[1]), nx)
    A = np.linspace(strategy.a_range[0], strategy.a_range[1], ny)
    LL, AA = np.meshgrid(L, A, indexing="ij")
    r = _grid_residuals(LL.ravel(), AA.ravel(), q, pp)
    for i in np.argsort(r, kind="stable")[: strategy.max_starts]:
        yield (LL.ravel()[i], AA.ravel()[i]), "grid"


def _solve_marked(q, p, strategy):
    pp = pow(p, -1, q)
    best = None
    for seed, how in _seeds(q, p, strategy):
        v, res, cond = _newton(seed, q, pp)
        if not np.isfinite(res):
            continue
        if best is None or res < best[1]:
            best = (v, res, cond, how)
        if res < ACCEPT_RESIDUAL:
            xs = _orbit_points(-math.exp(v[0]), v[1], q, p)
            if _order_ok(xs):
                return v, res, cond, how, None
    return None, None, None, None, best


def find_center(q: int, p: int, seeds: SeedStrategy | None = None) -> PcfCenter:
    """Locate the center whose critical cycle has period q and rotation p/q."""
    if q < 2 or not 1 <= p < q or gcd(p, q) != 1:
        raise ValueError(f"need q >= 2, 1 <= p < q, gcd(p, q) = 1; got q={q}, p={p}")
    strategy = seeds or SeedStrategy()
    if q == 2:
        v = np.array([math.log(2.0), 0.0])
        _SOLVED[(2, 1)] = tuple(v)
        return _make_center(2, 1, v, 1.0, "exact")
    v, res, cond, how, best = _solve_marked(q, p, strategy)
    if v is None and strategy.mirror:
        # other labeling: c0 = -1 is the (q, q-p) problem reflected by z -> -z
        v2, res, cond, how, best2 = _solve_marked(q, q - p, strategy)
        if v2 is not None:
            v = np.array([v2[0], -v2[1]])
            how = "mirror-" + how
            xs = _orbit_points(-math.exp(v[0]), v[1], q, p)
            if not _order_ok(xs):
                v = None
        if best is None or (best2 is not None and best2[1] < best[1]):
            best = best2
    if v is None:
        cand = None
        if best is not None:
            try:
                cand = _make_center(q, p, best[0], best[2], best[3])
            except Exception:
                cand = None
        raise CenterNotFound(f"no center found for p/q = {p}/{q}", cand)
    _SOLVED[(q, p)] = (float(v[0]), float(v[1]))
    return _make_center(q, p, v, cond, how)


# ---------------------------------------------------------------- verification

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    q: int
    p: int
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self):
        return [
            f"{c.name}: {'pass' if c.passed else 'FAIL'} ({c.measured:.3g}){' ' + c.detail if c.detail else ''}"
            for c in self.checks
        ]


def _in_open_arc(x, lo, hi):
    """x strictly inside the arc running counterclockwise from lo to hi."""
    t, a, b = _theta(x), _theta(lo), _theta(hi)
    return 0.0 < (t - a) % TWO_PI < (b - a) % TWO_PI


def _fq(mu, a, x, q):
    for _ in range(q):
        x = _step(mu, a, x)
    return x


def _zeta_cycle(mu, a, xs, q, p, n_scan=4000):
    """Repelling q-cycle on the basin boundaries, starting from the first
    fixed point of f^q above x_0 with expanding derivative."""
    t_lo, t_hi = math.pi / 2, 3 * math.pi / 2  # I_0 in angle: +1 -> oo -> -1

    def g(t):
        x = math.tan(t / 2)
        return _wrap(_theta(_fq(mu, a, x, q)) - t)

    prev_t, prev_g = None, None
    for i in range(1, n_scan):
        t = t_lo + (t_hi - t_lo) * i / n_scan
        gv = g(t)
        if prev_g is not None and prev_g < 0 <= gv and abs(gv - prev_g) < math.pi:
            lo, hi = prev_t, t
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                if g(mid) < 0:
                    lo = mid
                else:
                    hi = mid
            z0 = math.tan(0.5 * (lo + hi) / 2)
            # expanding in angle coordinates
            h = 1e-7
            d = _wrap(_theta(_fq(mu, a, math.tan((0.5 * (lo + hi) + h) / 2), q))
                      - _theta(_fq(mu, a, math.tan((0.5 * (lo + hi) - h) / 2), q))) / (2 * h)
            if d > 1.0:
                zs = [0.0] * q
                z = z0
                for j in range(q):
                    zs[(j * p) % q] = z
                    z = _step(mu, a, z)
                return tuple(zs)
        prev_t, prev_g = t, gv
    return None


def _local_degree(mu, a, xs, q, p, eps=(1e-2, 1e-3, 1e-4, 1e-5)):
    """log-log slope of |f^q(c0 + e) - c0| against e.

    The deviation from the stored orbit is propagated directly,
    f(x + d) - f(x) = d (x(x + d) - 1) / (mu x (x + d)),
    with x(x + d) - 1 = (x - 1)(x + 1) + x d and the critical points taken
    as exactly +-1, so tiny deviations keep their relative precision.
    """
    logs_e, logs_d = [], []
    for e in eps:
        d = e
        for j in range(q):
            k = (j * p) % q
            x = 1.0 if k == 0 else (-1.0 if k == 1 else xs[k])
            d = d * ((x - 1.0) * (x + 1.0) + x * d) / (mu * x * (x + d))
        logs_e.append(math.log(e))
        logs_d.append(math.log(abs(d)))
    slope = np.polyfit(logs_e, logs_d, 1)[0]
    return float(slope)


def verify_center(c: PcfCenter) -> VerificationReport:
    q, p, pp = c.q, c.p, c.pprime
    mu, a = c.params.mu, c.params.a
    xs = list(c.orbit)
    checks = []

    # (d) exact period q
    o = _orbit(mu, a, 1.0, q)
    close = chordal(o[q], 1.0)
    early = min((chordal(o[k], 1.0) for k in range(1, q)), default=math.inf)
    checks.append(CheckResult("d", close < 1e-9 and early > 1e-6, close,
                              f"closest earlier return {early:.3g}"))

    # (e) circular order and f(x_j) = x_{j+p}
    order = True
    if q > 2:
        off = _circular_offsets(xs, xs[0])
        off[0] = 0.0
        order = all(y > x for x, y in zip(off, off[1:]))
    shift = max(chordal(_step(mu, a, xs[j]), xs[(j + p) % q]) for j in range(q))
    checks.append(CheckResult("e", order and shift < 1e-9, shift))

    # (f) c1 = x_1 and f^{p'}(c0) = c1
    cps = critical_points(c.map)
    c_err = min(max(chordal(cps[0], 1.0), chordal(cps[1], -1.0)),
                max(chordal(cps[1], 1.0), chordal(cps[0], -1.0)))
    f_err = max(chordal(xs[1], -1.0), chordal(o[pp], -1.0), c_err)
    checks.append(CheckResult("f", f_err < 1e-9, f_err))

    # (g) I_j -> I_{j+p} homeomorphically preserving orientation for j != 0;
    # I_0 reversed and mapped onto the complement of I_p
    g_ok, worst = True, 0.0
    for j in range(q):
        lo, hi = xs[j], xs[(j + 1) % q]
        t0, t1 = _theta(lo), _theta(hi)
        span = (t1 - t0) % TWO_PI
        for s in (0.25, 0.5, 0.75):
            y = math.tan((t0 + s * span) / 2)
            sign = orientation_sign(c.map, y)
            fy = _step(mu, a, y)
            inside = _in_open_arc(fy, xs[(j + p) % q], xs[(j + 1 + p) % q])
            if j == 0:
                ok = sign < 0 and not inside
            else:
                ok = sign > 0 and inside
            if not ok:
                g_ok = False
                worst = max(worst, 1.0)
    checks.append(CheckResult("g", g_ok, worst))

    # (j) deployment of the repelling cycle
    zs = c.zeta_cycle
    if q == 2:
        # the basin boundary point is the repelling fixed point oo, not a 2-cycle
        checks.append(CheckResult("j", True, math.nan, "not applicable for q = 2"))
    elif zs is None:
        checks.append(CheckResult("j", False, math.nan, "no repelling cycle found"))
    else:
        bad = []
        if not (_in_open_arc(zs[0], xs[0], xs[1]) and _in_open_arc(zs[1], zs[0], xs[1])):
            bad.append("I")
        for j in range(1, pp + 1):
            k = (j * p) % q
            if not _in_open_arc(zs[k], xs[(k - 1) % q], xs[k]):
                bad.append(f"II@{k}")
        for j in range(1, q - pp + 1):
            k = (1 + j * p) % q
            if not _in_open_arc(zs[k], xs[k], xs[(k + 1) % q]):
                bad.append(f"III@{k}")
        per = chordal(_fq(mu, a, zs[0], q), zs[0])
        checks.append(CheckResult("j", not bad and per < 1e-8, per, ",".join(bad)))

    # (k) local degree four of f^q at c0
    slope = _local_degree(mu, a, xs, q, p)
    checks.append(CheckResult("k", abs(slope - 4.0) <= 0.1, slope))
    return VerificationReport(q, p, tuple(checks))


# ---------------------------------------------------------------- hyperbolic type

def _sph_derivative(m, z, h=1e-7):
    """|f'| in the spherical metric, by a chordal difference quotient."""
    if is_inf(z):
        w = complex(1.0 / h)
        return chordal(eval_map(m, w), eval_map(m, INF)) / chordal(w, INF)
    z = complex(z)
    step = h * max(1.0, abs(z))
    return chordal(eval_map(m, z + step), eval_map(m, z - step)) / chordal(z + step, z - step)


@dataclass
class _Cycle:
    points: list
    multiplier: float  # spherical derivative product, |multiplier| of the cycle

    def index_of(self, z, tol):
        for i, w in enumerate(self.points):
            if chordal(z, w) < tol:
                return i
        return None


def _attracting_cycle(m, c, budget, tol):
    """Follow the orbit of c; return (cycle, steps) or (None, steps)."""
    z = c
    hist = [z]
    max_period = 64
    for n in range(1, budget + 1):
        z = eval_map(m, z)
        hist.append(z)
        if n >= 2 and n % 4 == 0:
            for k in range(1, min(max_period, n) + 1):
                if chordal(hist[-1], hist[-1 - k]) < tol:
                    pts = hist[-1 - k:-1]
                    # confirm: the cycle closes within tolerance
                    w = pts[0]
                    for _ in range(k):
                        w = eval_map(m, w)
                    if chordal(w, pts[0]) > 10 * tol:
                        continue
                    mult = 1.0
                    for u in pts:
                        mult *= _sph_derivative(m, u)
                    if mult < 1.0:
                        return _Cycle(pts, mult), n
                    return None, n
    return None, budget


def _same_cycle(A, B, tol):
    return len(A.points) == len(B.points) and A.index_of(B.points[0], tol * 100) is not None


def _phase(m, c, cyc, tol, budget):
    """Index of the cycle point attracting c under f^k."""
    k = len(cyc.points)
    z = c
    for n in range(budget):
        i = cyc.index_of(z, tol * 100)
        if i is not None:
            # c reaches point i after n steps: its f^k-attractor is i - n mod k
            return (i - n) % k
        z = eval_map(m, z)
    return None


def _in_immediate_basin(m, c, cyc, phase, tol, budget, samples=33):
    """Sample the short real arc (or segment) from c to its attracting point."""
    P = cyc.points[phase]
    k = len(cyc.points)
    if chordal(c, P) < tol * 100:
        return True
    real = (is_inf(c) or abs(complex(c).imag) < 1e-12) and (is_inf(P) or abs(complex(P).imag) < 1e-12)
    if real:
        tc = circle_angle(c if is_inf(c) else complex(c).real)
        tp = circle_angle(P if is_inf(P) else complex(P).real)
        d = _wrap(tp - tc)
        pts = [angle_to_point(tc + d * s / (samples - 1)) for s in range(samples)]
    else:
        if is_inf(c) or is_inf(P):
            return False
        pts = [complex(c) + (complex(P) - complex(c)) * s / (samples - 1) for s in range(samples)]
    for z in pts:
        w = z
        hit = False
        for _ in range(max(1, budget // k)):
            if chordal(w, P) < 1e-4:
                hit = True
                break
            for _ in range(k):
                w = eval_map(m, w)
        if not hit:
            return False
    return True


def _cycles_and_phases(m, budget, tol):
    cps = critical_points(m)
    info = []
    for c in cps:
        cyc, _ = _attracting_cycle(m, c, budget, tol)
        info.append((c, cyc))
    return info


def hyperbolic_type(m: QuadMap, budget: int = 2000, tol: float = 1e-9) -> str:
    """One of "B", "C", "D", "E", "Unknown"."""
    info = _cycles_and_phases(m, budget, tol)
    (c0, A), (c1, B) = info
    if A is None or B is None:
        return "Unknown"
    if not _same_cycle(A, B, tol):
        return "D"
    k = len(A.points)
    if k == 1:
        return "E"
    ph0 = _phase(m, c0, A, tol, budget)
    ph1 = _phase(m, c1, A, tol, budget)
    if ph0 is None or ph1 is None:
        return "Unknown"
    im0 = _in_immediate_basin(m, c0, A, ph0, tol, budget)
    im1 = _in_immediate_basin(m, c1, A, ph1, tol, budget)
    if im0 and im1:
        return "B" if ph0 != ph1 else "E"
    if im0 or im1:
        return "C"
    return "Unknown"


def attracting_rotation_number(m: QuadMap, budget: int = 2000, tol: float = 1e-9) -> Fraction | None:
    """Rotation number of a real attracting cycle, reduced into (0, 1/2]."""
    for c, cyc in _cycles_and_phases(m, budget, tol):
        if cyc is None or len(cyc.points) < 2:
            continue
        pts = cyc.points
        if any(not is_inf(z) and abs(complex(z).imag) > 1e-9 for z in pts):
            continue
        reals = [z if is_inf(z) else complex(z).real for z in pts]
        k = len(reals)
        order = sorted(range(k), key=lambda i: circle_angle(reals[i]))
        pos = {i: r for r, i in enumerate(order)}
        # pts[i + 1] = f(pts[i])
        shifts = {(pos[(i + 1) % k] - pos[i]) % k for i in range(k)}
        if len(shifts) != 1:
            continue
        r = Fraction(shifts.pop(), k)
        if r > Fraction(1, 2):
            r = 1 - r
        return r
    return None
