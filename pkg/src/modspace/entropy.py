"""Topological entropy: Markov transition matrices, the root r_q, and lap counting."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from math import gcd

import numpy as np

from .ratmap import (
    QuadMap,
    RealClass,
    circle_angle,
    classify_real,
    critical_points,
    eval_map,
    is_inf,
)

LOG2 = math.log(2.0)


class ConvergenceError(RuntimeError):
    def __init__(self, msg, spread):
        super().__init__(msg)
        self.spread = spread


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    method: str  # "MarkovEigen" | "PolyRoot" | "LapCount"
    error_bound: float
    iterations: int
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "error_bound": self.error_bound,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class MarkovData:
    q: int
    p: int
    matrix: np.ndarray

    def to_csv(self) -> str:
        return "\n".join(",".join(str(int(v)) for v in row) for row in self.matrix) + "\n"


def markov_matrix(q: int, p: int) -> MarkovData:
    """Transition matrix of the partition I_0..I_{q-1}: entry (i, j) is 1
    when f(I_j) covers I_i.  I_0 covers everything but I_p; I_j -> I_{j+p}.
    """
    if q < 2 or not 1 <= p <= q - 1 or gcd(p, q) != 1:
        raise ValueError(f"need q >= 2, 1 <= p < q, gcd(p, q) = 1; got q={q}, p={p}")
    A = np.zeros((q, q), dtype=np.int64)
    A[:, 0] = 1
    A[p, 0] = 0
    for j in range(1, q):
        A[(j + p) % q, j] = 1
    return MarkovData(q, p, A)


def char_poly(md: MarkovData) -> list[int]:
    """Exact integer characteristic polynomial det(tI - A), highest degree first.

    Faddeev-LeVerrier over Python integers; every division is exact.
    """
    A = [[int(v) for v in row] for row in md.matrix]
    n = len(A)

    def matmul(X, Y):
        return [[sum(X[i][k] * Y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    coeffs = [1]
    M = [[0] * n for _ in range(n)]
    c = 1
    for k in range(1, n + 1):
        M = matmul(A, M)
        for i in range(n):
            M[i][i] += c
        AM = matmul(A, M)
        tr = sum(AM[i][i] for i in range(n))
        assert tr % k == 0
        c = -tr // k
        coeffs.append(c)
    return coeffs


def expected_char_poly(q: int) -> list[int]:
    """t (t^{q-1} - t^{q-2} - ... - t - 1) as integer coefficients."""
    return [1] + [-1] * (q - 1) + [0]


def spectral_radius(md: MarkovData, tol: float = 1e-12, max_iter: int = 100_000) -> float:
    """Perron root by power iteration with Collatz-Wielandt bracketing."""
    A = md.matrix.astype(float)
    x = np.ones(A.shape[0])
    spread = math.inf
    for _ in range(max_iter):
        y = A @ x
        support = x > 0
        ratios = y[support] / x[support]
        lo, hi = ratios.min(), ratios.max()
        spread = hi - lo
        if spread <= tol:
            return 0.5 * (lo + hi)
        x = y / np.linalg.norm(y)
        x[x < 1e-300] = 0.0
    raise ConvergenceError(f"power iteration stalled with spread {spread:g}", spread)


def markov_entropy(q: int, p: int, tol: float = 1e-12) -> EntropyEstimate:
    """log of the Perron root of the transition matrix."""
    r = spectral_radius(markov_matrix(q, p), tol)
    return EntropyEstimate(math.log(r), "MarkovEigen", tol / r, 0)


def pq_value(q: int, t: float) -> float:
    """P_q(t) = t^q - 2 t^{q-1} + 1 in the product form t^{q-1}(t - 2) + 1."""
    return t ** (q - 1) * (t - 2.0) + 1.0


def pq_root(q: int, tol: float = 1e-15):
    """(r_q, bracket width, iterations) by bisection on (2(q-1)/q, 2)."""
    if q < 3:
        raise ValueError("q must be at least 3")
    lo, hi = 2.0 * (q - 1) / q, 2.0
    it = 0
    while hi - lo > tol * hi and it < 200:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pq_value(q, mid) < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), hi - lo, it


def root_of_Pq(q: int, tol: float = 1e-15) -> EntropyEstimate:
    r, width, it = pq_root(q, tol)
    return EntropyEstimate(math.log(r), "PolyRoot", width / r, it)


# ---------------------------------------------------------------- lap counting

class _Orbits:
    """Labelled forward orbits of the critical points on the image arc.

    Points are kept as arc offsets in [0, span].  A newly computed point
    closer than ``snap`` to an existing one reuses its label, which makes
    the orbit graph of a post-critically finite map exactly finite.
    """

    def __init__(self, f, start, span, snap):
        self.f = f
        self.start = start
        self.span = span
        self.snap = snap
        self.pos: list[float] = []
        self.point: list = []
        self.succ: list[int | None] = []
        self.collided = False

    def offset(self, x):
        th = circle_angle(x)
        off = (th - self.start) % (2 * math.pi)
        if off > self.span:
            # numerically just outside the arc: clamp to the nearer end
            off = self.span if off - self.span < 2 * math.pi - off else 0.0
        return off

    def label(self, x, critical=False):
        off = self.offset(x)
        for i, p in enumerate(self.pos):
            if abs(p - off) <= self.snap:
                if critical:
                    self.collided = True
                return i
        self.pos.append(off)
        self.point.append(x)
        self.succ.append(None)
        return len(self.pos) - 1

    def next(self, i):
        if self.succ[i] is None:
            x = self.point[i]
            y = eval_map(self.f, x)
            y = y if is_inf(y) else complex(y).real
            self.succ[i] = self.label(y)
        return self.succ[i]


def lap_counts(f: QuadMap, n_max: int = 24, budget: int = 2_000_000, snap: float = 1e-9):
    """Lap numbers l(f^n|J), n = 1..n_max, on the invariant arc J = f(R^).

    Each lap of f^n is tracked only through its image interval, whose
    endpoints are critical-orbit points; laps with equal images evolve
    identically, so the state is a multiset of labelled intervals.
    Returns (counts, flags).
    """
    cls = classify_real(f)
    start, end = cls.image_arc
    span = (end - start) % (2 * math.pi)
    orb = _Orbits(f, start, span, snap)
    cps = critical_points(f)
    crit = []
    for c in cps:
        off = orb.offset(c)
        if snap < off < span - snap:
            crit.append(orb.label(c))
    lo = orb.label(angle_point(start))
    hi = orb.label(angle_point(end))
    state = Counter({(lo, hi): 1})
    counts = []
    flags = set()
    frozen = 0  # laps whose image shrank below snap; each stays a single lap
    for _ in range(n_max):
        new = Counter()
        for (u, v), k in state.items():
            a, b = orb.pos[u], orb.pos[v]
            if a > b:
                a, b, u, v = b, a, v, u
            cuts = sorted(
                (c for c in crit if a < orb.pos[c] < b and c != u and c != v),
                key=lambda c: orb.pos[c],
            )
            ends = [u] + cuts + [v]
            for s, t in zip(ends[:-1], ends[1:]):
                fs, ft = orb.next(s), orb.next(t)
                if fs == ft:
                    frozen += k
                    continue
                key = (fs, ft) if orb.pos[fs] <= orb.pos[ft] else (ft, fs)
                new[key] += k
        state = new
        counts.append(sum(state.values()) + frozen)
        if len(state) > budget:
            flags.add("budget")
            break
    if orb.collided:
        flags.add("collision")
    return counts, flags


def angle_point(theta):
    from .ratmap import angle_to_point

    return angle_to_point(theta)


def _slope(logs):
    """Least-squares growth rate over the last half, one pass of outlier rejection."""
    n = len(logs)
    idx = np.arange(n // 2, n)
    y = np.asarray(logs)[idx]
    x = idx.astype(float) + 1.0
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    mad = np.median(np.abs(resid - np.median(resid)))
    keep = np.abs(resid) <= 3.0 * 1.4826 * mad + 1e-12
    if keep.sum() >= 3 and not keep.all():
        slope, icpt = np.polyfit(x[keep], y[keep], 1)
    return float(slope)


def lap_entropy(
    f: QuadMap, n_max: int = 24, budget: int = 2_000_000, snap: float = 1e-9
) -> EntropyEstimate:
    """Entropy of the real restriction of f from the growth of lap numbers."""
    cls = classify_real(f)
    if cls.kind.is_covering:
        return EntropyEstimate(LOG2, "LapCount", 0.0, 0)
    if cls.kind.is_monotone:
        return EntropyEstimate(0.0, "LapCount", 0.0, 0)
    counts, flags = lap_counts(f, n_max, budget, snap)
    logs = [math.log(c) for c in counts]
    n = len(logs)
    if n < 4:
        return EntropyEstimate(logs[-1] / n, "LapCount", LOG2, n, tuple(sorted(flags | {"budget"})))
    value = _slope(logs)
    incs = np.diff(logs)
    tail = incs[-max(2, n // 4):]
    err = float(tail.max() - tail.min())
    err = max(err, 1e-12)
    if "budget" in flags:
        err = max(2.0 * err, 1.0 / n)
    value = min(max(value, 0.0), LOG2)
    return EntropyEstimate(value, "LapCount", err, n, tuple(sorted(flags)))
