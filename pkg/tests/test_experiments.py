import math

import numpy as np
import pytest

from modspace import experiments as ex
from modspace.config import Config, load_config, parse_assignments
from modspace.entropy import LOG2
from modspace.moduli import side_of_barrier

FAST = Config(lap_steps=18, workers=1)


def test_cell_centers_are_row_major():
    pts = ex.cell_centers((0.0, 4.0, 0.0, 2.0), 4, 2)
    assert pts[0] == (0.5, 0.5) and pts[3] == (3.5, 0.5) and pts[4] == (0.5, 1.5)


def test_sweep_csv_layout():
    g = ex.sweep((-8.0, -4.0, 4.0, 12.0), 3, 2, "Entropy", FAST)
    lines = g.to_csv().splitlines()
    assert lines[0].startswith(ex.SCHEMA) and "nx=3" in lines[0]
    assert lines[1] == "sigma1,sigma2,value,error,status"
    assert len(lines) == 2 + 6
    assert g.values().shape == (2, 3)
    assert all(c[4] in ex.STATUSES for c in g.cells)


def test_sweep_deterministic_across_workers():
    region = (-20.0, 5.0, -10.0, 30.0)
    one = ex.sweep(region, 6, 5, "Entropy", FAST).to_csv()
    again = ex.sweep(region, 6, 5, "Entropy", FAST).to_csv()
    two = ex.sweep(region, 6, 5, "Entropy", Config(lap_steps=18, workers=2)).to_csv()
    assert one == again == two


@pytest.mark.parametrize("mode", ["HyperbolicType", "RotationNumber"])
def test_other_modes(mode):
    g = ex.sweep((-7.0, -5.0, 7.0, 9.0), 2, 2, mode, FAST)
    assert len(g.cells) == 4
    codes = {c[2] for c in g.cells if c[4] == "OK"}
    if mode == "HyperbolicType":
        assert codes <= set(float(v) for v in ex.TYPE_CODES.values())


def test_sweep_rejects_bad_arguments():
    with pytest.raises(ValueError):
        ex.sweep((0.0, 1.0, 0.0, 1.0), 0, 3)
    with pytest.raises(ValueError):
        ex.sweep((1.0, 0.0, 0.0, 1.0), 2, 2)
    with pytest.raises(ValueError):
        ex.sweep((0.0, 1.0, 0.0, 1.0), 2, 2, "Colour")


def test_symmetry_locus_flagged():
    # a = 0 with mu = -3: sigma from the closed formula
    from modspace.ratmap import MixedNormalForm

    s1, s2 = MixedNormalForm(-30.0, 0.0).sigmas()
    _, _, status = ex.evaluate_point(s1, s2, "Entropy", FAST)
    assert status == "SymmetryLocus"


def test_gnuplot_script_mentions_bands():
    g = ex.sweep((-8.0, -4.0, 4.0, 12.0), 2, 2, "Entropy", FAST)
    text = ex.gnuplot_script("grid.csv", g, (0.1, 0.3))
    assert "levels discrete 0.1,0.3" in text and "'grid.csv'" in text


def test_profile_small():
    rows = ex.line_profile_sigma6(-3.0, 1.0, 21, FAST)
    assert [r[1] for r in rows] == sorted(r[1] for r in rows)
    assert all(r[1] == pytest.approx(4 * r[0] ** 3 + 12) for r in rows)
    assert not ex.profile_violations(rows)
    top = [r for r in rows if r[0] >= 0]
    assert all(r[2] == pytest.approx(0.0, abs=1e-2) for r in top)
    assert rows[0][2] == pytest.approx(LOG2, abs=1e-2)


def test_profile_violation_detector():
    rows = [(0.0, 1.0, 0.1, 0.001, "OK"), (0.0, 2.0, 0.3, 0.001, "OK")]
    assert ex.profile_violations(rows) == [(0, 1)]


def test_centers_table_small():
    rows = ex.centers_table(5)
    assert [(r[0], r[1]) for r in rows] == [(3, 1), (4, 1), (5, 1), (5, 2)]
    assert all(r[-1] == "OK" for r in rows)
    with pytest.raises(ValueError):
        ex.centers_table(2)


def test_bundled_centers_agree_with_solver():
    table = ex.bundled_centers()
    assert len(table) == len(ex.coprime_pairs(13))
    fresh = {(r[0], r[1]): r for r in ex.centers_table(7)}
    for rec in table:
        key = (rec["q"], rec["p"])
        if key in fresh:
            assert rec["sigma1"] == pytest.approx(fresh[key][4], abs=1e-8)
            assert rec["sigma2"] == pytest.approx(fresh[key][5], abs=1e-6 * max(1, abs(rec["sigma2"])))


def test_demo_q13():
    rep = ex.nonmono_demo(13, None, Config())
    assert rep.passed, rep.text()
    for w in rep.witnesses:
        assert side_of_barrier(w.point, rep.barrier) == w.side
        assert abs(w.entropy - w.level) < rep.tol
    assert len(rep.barrier_entropies) == 50
    assert "FAIL" not in rep.text()


def test_demo_failure_is_reported():
    rep = ex.nonmono_demo(13, (5.0,), Config())
    assert not rep.passed
    assert any("not bracketed" in f for f in rep.failures)


# ---------------------------------------------------------------- configuration

def test_config_parsing(tmp_path, monkeypatch):
    path = tmp_path / "modspace.cfg"
    path.write_text("lap_steps = 12  # shorter\nworkers = 3\ncenter_seeds = -4.6:-0.57, -8:0.2\n")
    cfg = load_config(str(path))
    assert cfg.lap_steps == 12 and cfg.workers == 3
    assert cfg.center_seeds == ((-4.6, -0.57), (-8.0, 0.2))
    monkeypatch.setenv("MODSPACE_CONFIG", str(path))
    assert load_config().lap_steps == 12
    cfg2 = parse_assignments(["demo_levels=0.5,0.6"], cfg)
    assert cfg2.demo_levels == (0.5, 0.6) and cfg2.lap_steps == 12
    with pytest.raises(ValueError):
        parse_assignments(["nope=1"])
    with pytest.raises(ValueError):
        parse_assignments(["lap_steps"])
