"""Parameter-plane sweeps, the sigma1 = -6 profile, the centers table and
the two-component isentrope demonstration."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import gcd

import numpy as np

from .config import Config
from .entropy import lap_entropy, root_of_Pq
from .moduli import (
    BarrierCurve,
    build_barrier,
    choose_numerator,
    representative_form,
    side_of_barrier,
)
from .pcf import CenterNotFound, SeedStrategy, attracting_rotation_number, find_center, hyperbolic_type
from .ratmap import DegenerateMapError, QuadMap, ToleranceError, classify_real

MODES = ("Entropy", "HyperbolicType", "RotationNumber")
STATUSES = ("OK", "Budget", "Degenerate", "SymmetryLocus")
TYPE_CODES = {"Unknown": 0, "B": 1, "C": 2, "D": 3, "E": 4}
SCHEMA = "# modspace-grid v1"
SYMMETRY_TOL = 1e-9


# ---------------------------------------------------------------- cell kernel

def _entropy_of_map(m: QuadMap, cfg: Config):
    e = lap_entropy(m, cfg.lap_steps, cfg.lap_budget, cfg.snap)
    return e.value, e.error_bound, ("Budget" if "budget" in e.flags else "OK")


def evaluate_point(sigma1: float, sigma2: float, mode: str, cfg: Config):
    """(value, error, status) for the conjugacy class (sigma1, sigma2)."""
    try:
        nf = representative_form(sigma1, sigma2)
        m = nf.to_map()
    except (DegenerateMapError, ValueError, ZeroDivisionError, OverflowError):
        return math.nan, math.nan, "Degenerate"
    symmetric = nf.a * nf.a < SYMMETRY_TOL * max(1.0, abs(nf.mu))
    try:
        if mode == "Entropy":
            value, err, status = _entropy_of_map(m, cfg)
        elif mode == "HyperbolicType":
            value, err, status = float(TYPE_CODES[hyperbolic_type(m, cfg.hyperbolic_budget)]), 0.0, "OK"
        elif mode == "RotationNumber":
            r = attracting_rotation_number(m, cfg.hyperbolic_budget)
            value, err, status = (math.nan if r is None else float(r)), 0.0, "OK"
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except (DegenerateMapError, ToleranceError, ZeroDivisionError, OverflowError):
        return math.nan, math.nan, "Degenerate"
    if symmetric and status == "OK":
        status = "SymmetryLocus"
    return value, err, status


def _eval_chunk(args):
    pts, mode, cfg = args
    return [evaluate_point(s1, s2, mode, cfg) for s1, s2 in pts]


def _parallel_map(points, mode, cfg: Config):
    workers = cfg.resolved_workers()
    if workers <= 1 or len(points) < 2:
        return _eval_chunk((points, mode, cfg))
    n_chunks = min(len(points), 4 * workers)
    bounds = np.linspace(0, len(points), n_chunks + 1).astype(int)
    chunks = [(points[a:b], mode, cfg) for a, b in zip(bounds[:-1], bounds[1:])]
    out = []
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for res in ex.map(_eval_chunk, chunks):  # results come back in submission order
            out.extend(res)
    return out


# ---------------------------------------------------------------- sweeps

@dataclass(frozen=True)
class SweepGrid:
    region: tuple  # (s1_min, s1_max, s2_min, s2_max)
    nx: int
    ny: int
    mode: str
    cells: tuple  # (sigma1, sigma2, value, error, status), row-major in sigma2

    def __post_init__(self):
        if len(self.cells) != self.nx * self.ny:
            raise ValueError("cell count does not match resolution")

    def to_csv(self) -> str:
        return rows_to_csv(
            ("sigma1", "sigma2", "value", "error", "status"),
            self.cells,
            f"{SCHEMA} mode={self.mode} nx={self.nx} ny={self.ny}",
        )

    def values(self) -> np.ndarray:
        return np.array([c[2] for c in self.cells]).reshape(self.ny, self.nx)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, np.floating):
        return repr(float(v))
    return str(v)


def rows_to_csv(header, rows, comment: str | None = None) -> str:
    out = io.StringIO()
    if comment:
        out.write(comment + "\n")
    out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(_fmt(v) for v in r) + "\n")
    return out.getvalue()


def cell_centers(region, nx: int, ny: int):
    s1a, s1b, s2a, s2b = region
    xs = [s1a + (i + 0.5) * (s1b - s1a) / nx for i in range(nx)]
    ys = [s2a + (j + 0.5) * (s2b - s2a) / ny for j in range(ny)]
    return [(x, y) for y in ys for x in xs]


def sweep(region, nx: int, ny: int, mode: str = "Entropy", config: Config | None = None) -> SweepGrid:
    cfg = config or Config()
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be at least 1")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not all(math.isfinite(v) for v in region) or region[0] >= region[1] or region[2] >= region[3]:
        raise ValueError("region must be a finite nonempty rectangle")
    pts = cell_centers(region, nx, ny)
    res = _parallel_map(pts, mode, cfg)
    cells = tuple((float(x), float(y), float(v), float(e), s) for (x, y), (v, e, s) in zip(pts, res))
    return SweepGrid(tuple(region), nx, ny, mode, cells)


def gnuplot_script(csv_path: str, grid: SweepGrid, bands=None) -> str:
    """Plain gnuplot text drawing the grid as a heat map with contour bands."""
    bands = list(bands or Config().plot_bands)
    s1a, s1b, s2a, s2b = grid.region
    title = {"Entropy": "real entropy", "HyperbolicType": "hyperbolic type code",
             "RotationNumber": "rotation number"}[grid.mode]
    return "\n".join([
        "# generated by modspace; render with: gnuplot <this file>",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set terminal pngcairo size 900,800",
        f"set output '{csv_path}.png'",
        f"set title '{title}'",
        "set xlabel 'sigma1'",
        "set ylabel 'sigma2'",
        f"set xrange [{s1a}:{s1b}]",
        f"set yrange [{s2a}:{s2b}]",
        f"set dgrid3d {grid.ny},{grid.nx}",
        "set view map",
        "set contour base",
        "set cntrparam levels discrete " + ",".join(repr(b) for b in bands),
        "set pm3d at b",
        f"splot '{csv_path}' every ::1 using 1:2:3 with pm3d notitle",
        "",
    ])


def line_profile_sigma6(b_min: float, b_max: float, n: int, config: Config | None = None):
    """Rows (b, sigma2, entropy, error, status) for x -> b + 1/x^2, sorted by sigma2."""
    cfg = config or Config()
    if not b_min < b_max or n < 2:
        raise ValueError("need b_min < b_max and n >= 2")
    bs = [float(b) for b in np.linspace(b_min, b_max, n)]
    res = _parallel_profile(bs, cfg)
    rows = [(b, 4.0 * b ** 3 + 12.0) + r for b, r in zip(bs, res)]
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows


def _profile_chunk(args):
    bs, cfg = args
    out = []
    for b in bs:
        try:
            m = QuadMap(b, 0.0, 1.0, 1.0, 0.0, 0.0)
            out.append(_entropy_of_map(m, cfg))
        except DegenerateMapError:
            out.append((math.nan, math.nan, "Degenerate"))
    return out


def _parallel_profile(bs, cfg):
    workers = cfg.resolved_workers()
    if workers <= 1:
        return _profile_chunk((bs, cfg))
    bounds = np.linspace(0, len(bs), min(len(bs), 4 * workers) + 1).astype(int)
    out = []
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for r in ex.map(_profile_chunk, [(bs[a:b], cfg) for a, b in zip(bounds[:-1], bounds[1:])]):
            out.extend(r)
    return out


def profile_violations(rows):
    """Pairs (i, j), sigma2_i < sigma2_j, whose entropies increase by more
    than twice the larger error bound."""
    bad = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            ei, ej = rows[i][3], rows[j][3]
            if rows[j][1] > rows[i][1] and rows[j][2] - rows[i][2] > 2.0 * max(ei, ej):
                bad.append((i, j))
    return bad


PROFILE_HEADER = ("b", "sigma2", "entropy", "error", "status")


# ---------------------------------------------------------------- centers table

CENTER_HEADER = ("q", "p", "mu", "a", "sigma1", "sigma2", "h_lap", "h_root", "residual", "status")


def coprime_pairs(q_max: int):
    return [(q, p) for q in range(3, q_max + 1) for p in range(1, q) if 2 * p < q and gcd(p, q) == 1]


def center_seed_strategy(cfg: Config) -> SeedStrategy:
    return SeedStrategy(extra=tuple(tuple(s) for s in cfg.center_seeds))


def centers_table(q_max: int, config: Config | None = None):
    """Rows for every coprime p/q in (0, 1/2) with q <= q_max."""
    cfg = config or Config()
    if q_max < 3:
        raise ValueError("q_max must be at least 3")
    rows = []
    for q, p in coprime_pairs(q_max):
        h_root = root_of_Pq(q).value
        try:
            c = find_center(q, p, center_seed_strategy(cfg))
        except CenterNotFound:
            rows.append((q, p, math.nan, math.nan, math.nan, math.nan, math.nan, h_root, math.nan, "NoConvergence"))
            continue
        h = lap_entropy(c.map, cfg.lap_steps, cfg.lap_budget, cfg.snap)
        rows.append((q, p, c.params.mu, c.params.a, c.moduli.sigma1, c.moduli.sigma2,
                     h.value, h_root, c.residual, "OK"))
    return rows


def bundled_centers():
    """The precomputed table shipped in ``modspace/data/centers.csv`` (q <= 13)."""
    text = resources.files("modspace").joinpath("data/centers.csv").read_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        rec = {k: (int(v) if k in ("q", "p") else v if k == "status" else float(v)) for k, v in r.items()}
        out.append(rec)
    return out


# ---------------------------------------------------------------- demonstration

@dataclass(frozen=True)
class Witness:
    level: float
    side: str
    point: tuple
    entropy: float


@dataclass
class DemoReport:
    q: int
    p: int
    h3: float
    hq_root: float
    centers: dict  # label -> (sigma1, sigma2)
    center_entropies: dict
    center_sides: dict
    barrier: BarrierCurve | None
    barrier_entropies: list = field(default_factory=list)
    anchors: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    tol: float = 0.02

    @property
    def level_pairs(self):
        """Levels with witnesses on both sides."""
        by = {}
        for w in self.witnesses:
            by.setdefault(w.level, set()).add(w.side)
        return sorted(h for h, s in by.items() if {"Left", "Right"} <= s)

    def checks(self):
        out = []
        e = self.center_entropies
        lo, hi = f"1/{self.q}", f"{self.p}/{self.q}"
        if lo in e and hi in e:
            out.append(("equal center entropies", abs(e[lo] - e[hi]) <= self.tol))
            out.append(("centers above h3 + 0.05", min(e[lo], e[hi]) > self.h3 + 0.05))
            out.append(("centers on opposite sides",
                        self.center_sides.get(lo) != self.center_sides.get(hi)
                        and "OnBarrier" not in (self.center_sides.get(lo), self.center_sides.get(hi))))
        else:
            out.append(("centers located", False))
        out.append(("barrier entropy <= h3 + 0.01",
                    bool(self.barrier_entropies) and max(v for _, v in self.barrier_entropies) <= self.h3 + 0.01))
        out.append(("three levels with opposite-side witnesses", len(self.level_pairs) >= 3))
        return out

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks()) and not self.failures

    def text(self) -> str:
        ln = [
            "Two-component isentrope demonstration (numerical evidence, not a proof)",
            f"q = {self.q}, p = {self.p}",
            f"h3 = {self.h3:.6f}, log r_q = {self.hq_root:.6f}",
        ]
        for k, v in self.centers.items():
            ln.append(f"center {k}: sigma = ({v[0]:.6f}, {v[1]:.6f}), lap entropy "
                      f"{self.center_entropies.get(k, math.nan):.5f}, side {self.center_sides.get(k)}")
        if self.barrier is not None:
            ln.append(f"barrier: {len(self.barrier.vertices)} vertices, end ideal angle "
                      f"{self.barrier.end_ideal_angle}")
        if self.barrier_entropies:
            ln.append(f"barrier samples: {len(self.barrier_entropies)}, max entropy "
                      f"{max(v for _, v in self.barrier_entropies):.5f}")
        for side, a in self.anchors.items():
            ln.append(f"anchor {side}: ({a[0]:.6f}, {a[1]:.6f})")
        for w in self.witnesses:
            ln.append(f"level {w.level:.5f} side {w.side}: ({w.point[0]:.6f}, {w.point[1]:.6f}) "
                      f"entropy {w.entropy:.5f}")
        for f in self.failures:
            ln.append(f"FAILURE: {f}")
        for name, ok in self.checks():
            ln.append(f"[{'pass' if ok else 'FAIL'}] {name}")
        return "\n".join(ln) + "\n"


def _entropy_at(pt, cfg):
    v, _, status = evaluate_point(pt[0], pt[1], "Entropy", cfg)
    return v


def _segment(a, b, s):
    return (a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]))


def _segment_side_constant(a, b, L, side, n=200):
    return all(side_of_barrier(_segment(a, b, k / n), L) == side for k in range(n + 1))


def _is_covering(pt):
    try:
        return classify_real(representative_form(*pt).to_map()).kind.is_covering
    except (DegenerateMapError, ValueError):
        return False


def find_anchor(center, L: BarrierCurve, ceiling: float, cfg: Config, margin: float = 0.1):
    """A point on the center's side of L with entropy below ``ceiling - margin``,
    joined to the center by a segment that stays on that side.

    Scans upward in sigma2 along a few columns; when a column runs into the
    covering region the class boundary is bisected and points just below it
    (where the entropy tends to zero) are tried.
    """
    side = side_of_barrier(center, L)
    scale = max(1.0, abs(center[0]) / 20.0)
    target = ceiling - margin
    for ds in (0.0, 1.0, 2.0, 4.0, -1.0, -2.0, -4.0):
        x = center[0] + ds * scale
        step = max(0.5, 0.02 * abs(center[1]))
        y_prev = center[1]
        for k in range(1, 200):
            y = center[1] + k * step
            pt = (x, y)
            if side_of_barrier(pt, L) != side:
                break
            if _is_covering(pt):
                lo, hi = y_prev, y
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if _is_covering((x, mid)):
                        hi = mid
                    else:
                        lo = mid
                for d in (1e-7, 1e-5, 1e-3, 0.1, 0.3):
                    cand = (x, lo - d * max(1.0, abs(lo)) if d < 0.01 else lo - d)
                    if (_entropy_at(cand, cfg) < target
                            and _segment_side_constant(center, cand, L, side)):
                        return cand
                break
            if _entropy_at(pt, cfg) < target and _segment_side_constant(center, pt, L, side):
                return pt
            y_prev = y
    return None


def probe_level(a, b, h, cfg: Config, tol: float):
    """A point on segment a -> b with lap entropy within tol of h, or None."""
    n = cfg.probe_samples
    ss = [k / n for k in range(n + 1)]
    vals = [_entropy_at(_segment(a, b, s), cfg) for s in ss]
    for k in range(n):
        e0, e1 = vals[k] - h, vals[k + 1] - h
        if not (math.isfinite(e0) and math.isfinite(e1)) or e0 * e1 > 0:
            continue
        lo, hi, flo = ss[k], ss[k + 1], e0
        best = min(((abs(e0), ss[k]), (abs(e1), ss[k + 1])))
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            fm = _entropy_at(_segment(a, b, mid), cfg) - h
            if not math.isfinite(fm):
                break
            best = min(best, (abs(fm), mid))
            if best[0] < 0.25 * tol:
                break
            if fm * flo > 0:
                lo, flo = mid, fm
            else:
                hi = mid
        if best[0] < tol:
            pt = _segment(a, b, best[1])
            return pt, _entropy_at(pt, cfg)
    return None


def barrier_samples(L: BarrierCurve, n: int):
    """n points on L: a fifth on the vertical ray, the rest along the polyline."""
    n_ray = max(1, n // 5)
    sx, sy = L.start
    pts = [(sx, sy + 0.25 * k) for k in range(n_ray)]
    v = L.vertices
    idx = np.linspace(0, len(v) - 1, n - n_ray).round().astype(int)
    pts += [tuple(v[i]) for i in idx]
    return pts


def nonmono_demo(q: int, levels=None, config: Config | None = None) -> DemoReport:
    cfg = config or Config()
    p = choose_numerator(q)
    tol = cfg.demo_tol
    h3 = root_of_Pq(3).value
    hq = root_of_Pq(q).value
    lo_key, hi_key = f"1/{q}", f"{p}/{q}"
    rep = DemoReport(q, p, h3, hq, {}, {}, {}, None, tol=tol)
    seeds = center_seed_strategy(cfg)
    centers = {}
    for key, (qq, pp) in ((lo_key, (q, 1)), (hi_key, (q, p)), ("1/3", (3, 1))):
        try:
            c = find_center(qq, pp, seeds)
        except CenterNotFound as exc:
            best = exc.best
            cond = best.diagnostics.get("condition") if best is not None else None
            rep.failures.append(f"center {key} not located (condition {cond})")
            continue
        centers[key] = c
        rep.centers[key] = c.moduli.as_tuple()
        rep.center_entropies[key] = lap_entropy(c.map, cfg.lap_steps, cfg.lap_budget, cfg.snap).value
    if "1/3" not in centers:
        return rep
    L = build_barrier(centers["1/3"], cfg.barrier_mu_max)
    rep.barrier = L
    for key, pt in rep.centers.items():
        rep.center_sides[key] = side_of_barrier(pt, L)
    rep.barrier_entropies = [(pt, _entropy_at(pt, cfg)) for pt in barrier_samples(L, cfg.barrier_samples)]
    if lo_key not in centers or hi_key not in centers:
        return rep
    if levels is None:
        levels = cfg.demo_levels or (h3 + 1e-3, 0.5 * (h3 + hq), hq - 0.01)
    overrides = {"Right": cfg.anchor_right, "Left": cfg.anchor_left}
    for key in (lo_key, hi_key):
        c = rep.centers[key]
        side = rep.center_sides[key]
        anchor = tuple(overrides.get(side) or ()) or find_anchor(c, L, h3, cfg)
        if not anchor:
            rep.failures.append(f"no low-entropy anchor found for center {key}")
            continue
        rep.anchors[side] = anchor
        for h in levels:
            hit = probe_level(c, anchor, h, cfg, tol)
            if hit is None:
                rep.failures.append(f"level {h:.5f} not bracketed on the {side} side")
                continue
            pt, val = hit
            rep.witnesses.append(Witness(float(h), side_of_barrier(pt, L), pt, val))
    return rep


def fraction_str(r: Fraction | None) -> str:
    return "none" if r is None else f"{r.numerator}/{r.denominator}"
