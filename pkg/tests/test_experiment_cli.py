import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest
from scipy import stats

from modphi.cli import main, parse_int_list, read_config
from modphi.experiment import (
    COLUMNS,
    CSV_SCHEMA,
    ExperimentRow,
    ExperimentSpec,
    emit_constants_table,
    emit_plot_data,
    rows_to_csv,
    rows_to_json,
    run_experiment,
)
from modphi.models.functional_graphs import EULER_GAMMA


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0] == CSV_SCHEMA
    return list(csv.DictReader(lines[1:]))


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


# ----------------------------------------------------------------------
# integer lists and config files
# ----------------------------------------------------------------------


def test_parse_int_list():
    assert parse_int_list("10,100,1000") == [10, 100, 1000]
    assert parse_int_list("1:5") == [1, 2, 3, 4, 5]
    assert parse_int_list("0:10:5") == [0, 5, 10]
    assert parse_int_list("1e5") == [100000]
    assert parse_int_list("2, 4:6") == [2, 4, 5, 6]
    for bad in ("", "1.5", "1:2:0", "1:2:3:4", "x"):
        with pytest.raises(ValueError):
            parse_int_list(bad)


def test_read_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nmodel=ewens\nparam=theta=2\nn=10,20\nbounds=false\nlambda_convention=exact-sum\n")
    assert read_config(str(cfg)) == [
        "--model", "ewens", "--param", "theta=2", "--n", "10,20", "--no-bounds",
        "--lambda-convention", "exact-sum",
    ]
    bad = tmp_path / "bad.cfg"
    bad.write_text("model\n")
    with pytest.raises(ValueError):
        read_config(str(bad))


# ----------------------------------------------------------------------
# the runner
# ----------------------------------------------------------------------


def test_bernoulli_ratio_at_ten_thousand():
    rows = run_experiment(ExperimentSpec("bernoulli", {"a": 0.6}, (10**4,), (1,), ("tv",)))
    assert len(rows) == 1
    assert rows[0].r_eff == 1
    assert 0.85 <= rows[0].ratio <= 1.15


def test_ewens_distance_decreases_with_order():
    rows = run_experiment(ExperimentSpec("ewens", {}, (100,), (0, 1, 2, 3), ("tv",)))
    tv = {r.order: r.measured for r in rows}
    # e_1 vanishes, so the order-0 and order-1 schemes coincide
    assert tv[0] == tv[1]
    assert tv[1] > tv[2] > tv[3]


def test_omega_tiny_instance():
    rows = run_experiment(ExperimentSpec("omega", {}, (10,), (0,)))
    lam = math.log(math.log(10)) + EULER_GAMMA
    assert [r.kind for r in rows] == ["local", "kolmogorov", "tv"]
    law = {0: 0.1, 1: 0.7, 2: 0.2}
    pois = stats.poisson.pmf(range(60), lam)
    tv = sum(abs(law.get(k, 0.0) - pois[k]) for k in range(60))
    loc = max(abs(law.get(k, 0.0) - pois[k]) for k in range(60))
    by_kind = {r.kind: r for r in rows}
    assert by_kind["tv"].measured == pytest.approx(tv, abs=1e-13)
    assert by_kind["local"].measured == pytest.approx(loc, abs=1e-13)
    assert all(math.isfinite(r.measured) and r.lam == pytest.approx(lam) for r in rows)


def test_rows_are_sorted_and_bounds_hold():
    rows = run_experiment(ExperimentSpec("ewens", {}, (1000, 100), (2, 0)))
    keys = [(r.n, r.order, r.kind) for r in rows]
    rank = {"local": 0, "kolmogorov": 1, "tv": 2}
    assert keys == sorted(keys, key=lambda k: (k[0], k[1], rank[k[2]]))
    for r in rows:
        if r.kind == "tv":
            assert r.bound_respected is True
        else:
            assert r.bound is None and r.bound_respected is None


def test_workers_do_not_change_results():
    spec = ExperimentSpec("fgraph", {}, (10, 20, 30), (0, 2), workers=1)
    a = rows_to_csv(run_experiment(spec))
    b = rows_to_csv(run_experiment(ExperimentSpec("fgraph", {}, (10, 20, 30), (0, 2), workers=4)))
    assert a == b


def test_two_dimensional_runs_skip_kolmogorov():
    rows = run_experiment(ExperimentSpec("coloured-perm", {}, (50,), (1,)))
    assert [r.kind for r in rows] == ["local", "tv"]
    assert all(r.predicted_alt is not None and r.bound is None for r in rows)
    rows = run_experiment(ExperimentSpec("omega-residue", {"a": 4}, (1000,), (0,)))
    assert all(r.predicted is None and r.ratio is None for r in rows)


@pytest.mark.parametrize(
    "spec",
    [
        ExperimentSpec("nope", {}, (10,)),
        ExperimentSpec("ewens", {}, ()),
        ExperimentSpec("ewens", {}, (0,)),
        ExperimentSpec("fgraph", {}, (41,)),
        ExperimentSpec("coloured-perm", {}, (10,), distances=("kolmogorov",)),
        ExperimentSpec("ewens", {}, (10,), distances=("hellinger",)),
        ExperimentSpec("ewens", {}, (10,), lambda_convention="other"),
        ExperimentSpec("ewens", {}, (10,), tol=0.5),
        ExperimentSpec("ewens", {}, (10,), orders=(-1,)),
    ],
)
def test_invalid_specs(spec):
    with pytest.raises(ValueError):
        run_experiment(spec)


def test_csv_and_json_formats():
    rows = run_experiment(ExperimentSpec("omega-residue", {"a": 4}, (100,), (0,)))
    table = parse_csv(rows_to_csv(rows))
    assert list(table[0]) == list(COLUMNS)
    assert table[0]["predicted"] == "n/a" and table[0]["bound"] == "n/a"
    payload = json.loads(rows_to_json(rows))
    assert payload["columns"] == list(COLUMNS)
    assert payload["rows"][0]["predicted"] is None
    assert float(table[0]["measured"]) == rows[0].measured


def test_determinism_of_csv():
    spec = ExperimentSpec("bernoulli", {"a": 0.6}, (100, 1000), (0, 1, 2))
    assert rows_to_csv(run_experiment(spec)) == rows_to_csv(run_experiment(spec))


# ----------------------------------------------------------------------
# plot data and constants
# ----------------------------------------------------------------------


def row(model="ewens", kind="tv", n=10, order=0, alt=None):
    return ExperimentRow(model, n, 2.0, order, 1, kind, 0.1, 1e-15, 0.09, 0.1 / 0.09, None, alt)


def test_single_row_gives_single_data_line(tmp_path):
    paths = emit_plot_data([row()], str(tmp_path))
    assert [os.path.basename(p) for p in paths] == ["ewens_tv.dat"]
    data = [l for l in open(paths[0]).read().splitlines() if l and not l.startswith("#")]
    assert data == ["10 2.0 0.1 0.09"]


def test_two_models_give_two_files(tmp_path):
    paths = emit_plot_data([row("ewens"), row("fgraph")], str(tmp_path))
    assert sorted(os.path.basename(p) for p in paths) == ["ewens_tv.dat", "fgraph_tv.dat"]


def test_orders_become_blocks(tmp_path):
    (path,) = emit_plot_data([row(order=0), row(order=2), row(order=0, n=20)], str(tmp_path))
    text = open(path).read()
    assert "# order 0" in text and "# order 2" in text and "\n\n\n" in text


def test_coloured_ratio_file_lists_both_candidates(tmp_path):
    rows = run_experiment(ExperimentSpec("coloured-perm", {}, (50, 100), (1,)))
    paths = emit_plot_data(rows, str(tmp_path))
    names = sorted(os.path.basename(p) for p in paths)
    assert "coloured-perm_local_ratio.dat" in names and "coloured-perm_tv_ratio.dat" in names
    text = open(os.path.join(tmp_path, "coloured-perm_local_ratio.dat")).read()
    assert repr(math.pi / 3) in text
    data = [l.split() for l in text.splitlines() if not l.startswith("#")]
    assert len(data) == 2 and all(len(d) == 6 for d in data)


def test_plot_data_needs_rows(tmp_path):
    with pytest.raises(ValueError):
        emit_plot_data([], str(tmp_path))


def test_constants_table():
    lines = emit_constants_table().splitlines()
    table = list(csv.DictReader(lines[1:]))
    assert len(table) == 11
    assert float(table[0]["M_r"]) == pytest.approx(1.0) and float(table[0]["V_r"]) == pytest.approx(2.0)
    assert float(table[1]["M_r"]) == pytest.approx(math.exp(-0.5))
    assert float(table[1]["V_r"]) == pytest.approx(4 * math.exp(-0.5))
    assert float(table[4]["M_r"]) == pytest.approx(3.0)
    assert float(table[0]["z_r_plus_1"]) == 0.0 and float(table[1]["z_r_plus_1"]) == pytest.approx(1.0)


# ----------------------------------------------------------------------
# command line
# ----------------------------------------------------------------------


def test_cli_constants(capsys):
    code, out, _ = run_cli(["constants", "--max-order", "4"], capsys)
    assert code == 0 and len(out.splitlines()) == 7


def test_cli_experiment_to_file_and_plots(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, err = run_cli(["experiment", "--model", "ewens", "--n", "10,100", "--order", "0:2",
                            "--out", str(out), "--plot-dir", str(tmp_path / "plots")], capsys)
    assert code == 0
    table = parse_csv(out.read_text())
    assert len(table) == 2 * 3 * 3
    assert "wrote" in err and (tmp_path / "plots" / "ewens_tv.dat").exists()


def test_cli_experiment_json(capsys):
    code, out, _ = run_cli(["experiment", "--model", "fqpoly-mult", "--param", "q=3", "--n", "12",
                            "--dist", "tv", "--format", "json", "--no-bounds"], capsys)
    payload = json.loads(out)
    assert code == 0 and len(payload["rows"]) == 1 and payload["rows"][0]["bound"] is None


def test_cli_is_deterministic(capsys):
    args = ["experiment", "--model", "bernoulli", "--param", "a=0.6", "--n", "50,500", "--order", "0,2"]
    _, a, _ = run_cli(args, capsys)
    _, b, _ = run_cli(args, capsys)
    assert a == b


def test_cli_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("model=ewens\nn=50\norder=0,2\ndist=tv\n")
    code, out, _ = run_cli(["--config", str(cfg), "experiment"], capsys)
    assert code == 0 and len(parse_csv(out)) == 2
    # flags on the command line win over the file
    code, out, _ = run_cli(["--config", str(cfg), "experiment", "--n", "60"], capsys)
    assert {r["n"] for r in parse_csv(out)} == {"60"}
    cfg2 = tmp_path / "d.cfg"
    cfg2.write_text("command=predict\nmodel=omega\nn=1000\n")
    code, out, _ = run_cli(["--config", str(cfg2)], capsys)
    assert code == 0 and "predicted" in out.splitlines()[0]


def test_cli_predict_and_bound(capsys):
    code, out, _ = run_cli(["predict", "--model", "coloured-perm", "--n", "100", "--order", "1"], capsys)
    table = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["kind"] for r in table] == ["local", "tv"]
    assert table[0]["predicted_alt"] != "n/a"
    code, out, _ = run_cli(["bound", "--model", "bernoulli", "--param", "lam=1", "--n", "10",
                            "--format", "json"], capsys)
    (b,) = json.loads(out)
    assert code == 0 and b["norm_bound"] is None
    assert b["le_cam"] == pytest.approx(0.2) and b["chen_steele"] == pytest.approx(0.1264, abs=1e-4)
    code, out, _ = run_cli(["bound", "--model", "ewens", "--n", "1000", "--order", "2"], capsys)
    (b,) = list(csv.DictReader(io.StringIO(out)))
    assert b["r_bound"] == "1" and float(b["norm_bound"]) > 0 and b["le_cam"] == "n/a"


def test_cli_errors(capsys):
    code, _, err = run_cli(["experiment", "--model", "fgraph", "--n", "100"], capsys)
    assert code == 2 and "outside" in err
    code, _, err = run_cli(["experiment", "--model", "coloured-perm", "--n", "10", "--dist", "kolmogorov"], capsys)
    assert code == 2 and "one-dimensional" in err
    with pytest.raises(SystemExit):
        main(["experiment", "--model", "nope", "--n", "10"])
    with pytest.raises(SystemExit):
        main(["--config", "/nonexistent/file", "experiment"])


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "modphi", "constants", "--max-order", "2"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[1] == "r,z_r_plus_1,M_r,V_r"
