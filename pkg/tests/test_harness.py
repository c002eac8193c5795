import csv
import io
import json
import math

import numpy as np
import pytest

from svstokes import cli, harness


def test_fmt_forms():
    assert harness._fmt(1.0) == "1.000000e+00"
    assert harness._fmt(np.float64(2.5e-7)) == "2.500000e-07"
    assert harness._fmt(3) == "3"
    assert harness._fmt(None) == ""
    assert harness._fmt(True) == "True"


def test_csv_shape_and_determinism():
    rows = harness.run_convergence(Ns=(2, 4))
    a, b = harness.to_csv(rows), harness.to_csv(harness.run_convergence(Ns=(2, 4)))
    assert a == b
    parsed = list(csv.reader(io.StringIO(a)))
    assert parsed[0] == harness.REPORT_COLUMNS
    assert len(parsed) == 3
    assert float(parsed[1][parsed[0].index("h")]) == pytest.approx(3.0 * math.sqrt(2), rel=1e-6)


def test_build_mesh_rejects_unknown_mode():
    with pytest.raises(ValueError):
        harness.build_mesh(4, "sideways")


def test_singular_run_records_error_status():
    rows = harness.run_convergence(mesh_mod="none", Ns=(4,))
    assert rows[0]["status"].startswith("error")
    assert math.isnan(rows[0]["err_l2_u"])


def test_convergence_orders():
    rows = [{"N": 4, "e": 1.6e-4}, {"N": 8, "e": 1e-5}, {"N": 16, "e": 1e-12}]
    assert harness.convergence_orders(rows, "e") == pytest.approx([4.0])


def test_table1_small():
    rows = harness.run_convergence(Ns=(4, 8))
    assert all(r["status"] == "ok" for r in rows)
    assert max(r["div_norm"] for r in rows) <= 1e-9
    assert harness.convergence_orders(rows, "err_h1_u")[0] >= 3.5


def test_ipm_rows_collect_logs():
    logs = []
    rows = harness.run_convergence(method="ipm", Ns=(4,), logs=logs)
    assert rows[0]["status"] == "converged"
    assert logs[0]["N"] == 4 and len(logs[0]["records"]) == rows[0]["iterations"]


def test_elementwise_divergence_bounds_l2(m3_meshes):
    from svstokes.manufactured import divergence_norm
    from svstokes.stokes import StokesConfig, solve_graddiv
    from svstokes.manufactured import manufactured

    c = manufactured()
    u = solve_graddiv(StokesConfig(), m3_meshes[4], c.g, c.f)
    cell = harness.elementwise_divergence(u)
    assert cell.shape == (m3_meshes[4].triangles.shape[0],)
    assert divergence_norm(u) <= cell.max() * 6.0 * (1 + 1e-12)


@pytest.fixture(scope="module")
def study():
    return harness.run_mesh_mod_study(N=8)


def test_mesh_mod_study_structure(study):
    rows = harness.mesh_mod_rows(study)
    assert [r["mode"] for r in rows] == ["M1", "M2", "M3"]
    assert study["M3"].log.status == "converged"
    dump = json.loads(json.dumps(harness.mesh_mod_dump(study)))
    assert len(dump["M1"]["cells"]) == study["M1"].cell_div.size


def test_mesh_mod_linf_at_matched_iteration():
    # the unmodified mesh leaves an order of magnitude more local divergence
    # after the same number of iterations that M3 needed to converge
    s = harness.run_mesh_mod_study(N=16)
    n3 = s["M3"].log.iterations
    m1 = harness.run_mesh_mod_study(N=16, max_iter=n3)["M1"]
    assert m1.linf_div >= 10 * s["M3"].linf_div


def test_cli_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["--help"])
    assert e.value.code == 0


@pytest.mark.parametrize("argv", [["--rho", "-1"], ["--nu", "0"], ["--k", "0"], ["--max-iter", "0"],
                                  ["--n", "0,4"], ["--method", "nope"]])
def test_cli_bad_args_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(argv)
    assert e.value.code == 2


def test_cli_table1_to_file(tmp_path):
    out = tmp_path / "t1.csv"
    assert cli.main(["--experiment", "table1", "--n", "2,4", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["N"] for r in rows] == ["2", "4"]
    assert all(r["status"] == "ok" for r in rows)


def test_cli_ipm_log(tmp_path):
    out, lg = tmp_path / "t.csv", tmp_path / "log.json"
    assert cli.main(["--experiment", "table3", "--n", "4", "--out", str(out), "--log", str(lg),
                     "--seed", "7"]) == 0
    doc = json.loads(lg.read_text())
    assert doc["seed"] == 7 and doc["runs"][0]["status"] == "converged"


def test_cli_warns_and_fails_on_singular(tmp_path):
    with pytest.warns(UserWarning, match="unmodified"):
        code = cli.main(["--method", "mixed-sv", "--mesh-mod", "none", "--n", "4",
                         "--out", str(tmp_path / "x.csv")])
    assert code == 1
