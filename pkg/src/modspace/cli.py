"""Command-line entry point: ``python -m modspace <subcommand> ...``.

Exit status: 0 on success, 2 when some items failed (cells, rows, checks),
1 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments as ex
from .blaschke import petersen_disk, return_map_analysis
from .config import load_config, parse_assignments
from .entropy import lap_entropy, markov_entropy, root_of_Pq
from .moduli import ideal_point, representative_form
from .pcf import CenterNotFound, attracting_rotation_number, find_center, hyperbolic_type, verify_center
from .ratmap import (
    DegenerateMapError,
    MixedNormalForm,
    QuadMap,
    classify_real,
    fixed_point_data,
    moduli_point,
)

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text, n=None):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) not in (n if isinstance(n, tuple) else (n,)):
        raise UsageError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _map_from_args(args) -> QuadMap:
    given = [x for x in (args.coeffs, args.normal, args.sigma) if x]
    if len(given) != 1:
        raise UsageError("give exactly one of --coeffs, --normal, --sigma")
    try:
        if args.coeffs:
            return QuadMap(*_floats(args.coeffs, 6))
        if args.normal:
            parts = args.normal.split(",")
            variant = parts[2] if len(parts) == 3 else "plus"
            mu, a = _floats(",".join(parts[:2]), 2)
            return MixedNormalForm(mu, a, variant).to_map()
        return representative_form(*_floats(args.sigma, 2)).to_map()
    except (DegenerateMapError, ValueError) as exc:
        raise UsageError(str(exc))


def _add_map_args(p):
    p.add_argument("--coeffs", help="n2,n1,n0,d2,d1,d0 of (n2 z^2+n1 z+n0)/(d2 z^2+d1 z+d0)")
    p.add_argument("--normal", help="mu,a[,plus|minus] for z -> (z +- 1/z)/mu + a")
    p.add_argument("--sigma", help="sigma1,sigma2 (a representative map is built)")


def _write(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args, cfg):
    m = _map_from_args(args)
    cls = classify_real(m)
    fp = fixed_point_data(m)
    mp = moduli_point(m)
    ip = ideal_point(m, cfg.blowup_threshold)
    rot = attracting_rotation_number(m, cfg.hyperbolic_budget)
    out = {
        "map": m.to_dict(),
        "class": cls.kind.value,
        "symmetric": cls.symmetric,
        "boundary_ambiguous": cls.boundary_ambiguous,
        "sigma1": mp.sigma1,
        "sigma2": mp.sigma2,
        "multipliers": [[complex(z).real, complex(z).imag] for z in fp.multipliers],
        "hyperbolic_type": hyperbolic_type(m, cfg.hyperbolic_budget),
        "rotation_number": ex.fraction_str(rot),
        "ideal_point": ip.to_dict() if ip else None,
    }
    _write(args, json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_entropy(args, cfg):
    if args.method == "lap":
        e = lap_entropy(_map_from_args(args), cfg.lap_steps, cfg.lap_budget, cfg.snap)
    else:
        if args.q is None:
            raise UsageError("--q is required for the markov and root methods")
        if args.method == "root":
            e = root_of_Pq(args.q)
        else:
            e = markov_entropy(args.q, args.p or 1)
    d = e.to_dict()
    d["flags"] = list(getattr(e, "flags", ()))
    _write(args, json.dumps(d, indent=2) + "\n")
    return EXIT_OK if "budget" not in d["flags"] else EXIT_PARTIAL


def _center(args, cfg):
    try:
        return find_center(args.q, args.p, ex.center_seed_strategy(cfg))
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_center(args, cfg):
    try:
        c = _center(args, cfg)
    except CenterNotFound as exc:
        rec = {"q": args.q, "p": args.p, "status": "NoConvergence"}
        if exc.best is not None:
            rec.update(exc.best.to_record())
            rec["condition"] = exc.best.diagnostics.get("condition")
        _write(args, json.dumps(rec, indent=2) + "\n")
        return EXIT_PARTIAL
    rec = c.to_record()
    rec["orbit"] = list(c.orbit)
    rec["condition"] = c.diagnostics.get("condition")
    rec["status"] = "OK"
    _write(args, json.dumps(rec, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args, cfg):
    try:
        c = _center(args, cfg)
    except CenterNotFound:
        _write(args, f"no center located for {args.p}/{args.q}\n")
        return EXIT_PARTIAL
    rep = verify_center(c)
    _write(args, "\n".join(rep.lines()) + "\n")
    return EXIT_OK if rep.passed else EXIT_PARTIAL


def cmd_blaschke(args, cfg):
    r = return_map_analysis(args.t)
    d = r.to_dict()
    if args.q is not None and 0 < args.t:
        pd = petersen_disk(args.t, args.p or 1, args.q)
        d["petersen_center_im"] = pd.center.imag
        d["petersen_radius"] = pd.radius
        d["modulus_range"] = list(pd.modulus_range)
        d["angle_range"] = list(pd.angle_range)
    _write(args, json.dumps(d, indent=2) + "\n")
    return EXIT_OK


def cmd_sweep(args, cfg):
    region = _floats(args.region, 4)
    try:
        grid = ex.sweep(tuple(region), args.nx, args.ny, args.mode, cfg)
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(args, grid.to_csv())
    if args.plot:
        with open(args.plot, "w") as fh:
            fh.write(ex.gnuplot_script(args.out or "grid.csv", grid, cfg.plot_bands))
    bad = sum(1 for c in grid.cells if c[4] in ("Degenerate", "Budget"))
    return EXIT_PARTIAL if bad else EXIT_OK


def cmd_profile(args, cfg):
    try:
        rows = ex.line_profile_sigma6(args.b_min, args.b_max, args.n, cfg)
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(args, ex.rows_to_csv(ex.PROFILE_HEADER, rows))
    return EXIT_PARTIAL if any(r[4] != "OK" for r in rows) else EXIT_OK


def cmd_demo(args, cfg):
    levels = _floats(args.levels) if args.levels else None
    try:
        rep = ex.nonmono_demo(args.q, levels, cfg)
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(args, rep.text())
    if args.barrier_csv and rep.barrier is not None:
        with open(args.barrier_csv, "w") as fh:
            fh.write(rep.barrier.to_csv())
    return EXIT_OK if rep.passed else EXIT_PARTIAL


def cmd_centers_table(args, cfg):
    try:
        rows = ex.centers_table(args.q_max, cfg)
    except ValueError as exc:
        raise UsageError(str(exc))
    _write(args, ex.rows_to_csv(ex.CENTER_HEADER, rows))
    return EXIT_PARTIAL if any(r[-1] != "OK" for r in rows) else EXIT_OK


def build_parser():
    p = _Parser(prog="modspace", description="Real entropy of real quadratic rational maps.")
    p.add_argument("--config", help="key = value file (default: $MODSPACE_CONFIG)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key; repeatable")
    p.add_argument("--workers", type=int, help="worker processes for sweeps (0: one per CPU)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", help="real-dynamics class, moduli point and hyperbolic type")
    _add_map_args(s)
    s.add_argument("--out")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("entropy", help="entropy by lap counting, Markov eigenvalue or polynomial root")
    _add_map_args(s)
    s.add_argument("--method", choices=("lap", "markov", "root"), default="lap")
    s.add_argument("--q", type=int)
    s.add_argument("--p", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_entropy)

    for name, func, hlp in (("center", cmd_center, "locate the center with rotation p/q"),
                            ("verify", cmd_verify, "locate and verify a center")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("q", type=int)
        s.add_argument("p", type=int)
        s.add_argument("--out")
        s.set_defaults(func=func)

    s = sub.add_parser("blaschke", help="return-map analysis of B_t and the Petersen disk")
    s.add_argument("t", type=float)
    s.add_argument("--p", type=int)
    s.add_argument("--q", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_blaschke)

    s = sub.add_parser("sweep", help="CSV grid over a (sigma1, sigma2) rectangle")
    s.add_argument("--region", required=True, help="s1_min,s1_max,s2_min,s2_max")
    s.add_argument("--nx", type=int, default=64)
    s.add_argument("--ny", type=int, default=64)
    s.add_argument("--mode", choices=ex.MODES, default="Entropy")
    s.add_argument("--out")
    s.add_argument("--plot", help="also write a gnuplot script here")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("profile-sigma6", help="entropy of b + 1/z^2 along sigma1 = -6")
    s.add_argument("--b-min", type=float, default=-3.0)
    s.add_argument("--b-max", type=float, default=1.0)
    s.add_argument("-n", type=int, default=200)
    s.add_argument("--out")
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("demo", help="two-component isentrope demonstration")
    s.add_argument("--q", type=int, default=13)
    s.add_argument("--levels", help="comma-separated entropy levels")
    s.add_argument("--barrier-csv", help="write the barrier polyline here")
    s.add_argument("--out")
    s.set_defaults(func=cmd_demo)

    s = sub.add_parser("centers-table", help="table of located centers")
    s.add_argument("--q-max", type=int, default=13)
    s.add_argument("--out")
    s.set_defaults(func=cmd_centers_table)
    return p


_LIST_OPTIONS = ("--coeffs", "--normal", "--sigma", "--region", "--levels")


def _join_negative_lists(argv):
    """Turn ``--sigma -6,8`` into ``--sigma=-6,8`` so argparse does not read
    the value as an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_lists(argv))
    try:
        cfg = load_config(args.config)
        cfg = parse_assignments(args.set, cfg)
        if args.workers is not None:
            cfg = cfg.with_overrides(workers=args.workers)
        return args.func(args, cfg)
    except (UsageError, ValueError, OSError) as exc:
        print(f"modspace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
