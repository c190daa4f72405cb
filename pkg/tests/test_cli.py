import csv
import json

import numpy as np
import pytest

from gksl_reduce import zoo_build
from gksl_reduce.cli import main
from gksl_reduce.io import load_model, model_to_dict


def _emit(tmp_path, name, *params):
    path = tmp_path / f"{name}.json"
    args = ["zoo", "--emit", name, str(path)]
    for p in params:
        args += ["--param", p]
    assert main(args) == 0
    return path


def _run_json(capsys, args):
    code = main(args)
    return code, json.loads(capsys.readouterr().out) if code == 0 else None


def _strip_timestamp(report):
    report = dict(report)
    report.pop("generated_at")
    return report


def test_zoo_list(capsys):
    code, listing = _run_json(capsys, ["zoo", "--list"])
    assert code == 0
    assert len(listing["models"]) == 5
    two_photon = listing["models"][-1]
    assert two_photon["truncation_check"]["stable"]


def test_zoo_emit_unknown_name(tmp_path, capsys):
    assert main(["zoo", "--emit", "nope", str(tmp_path / "x.json")]) == 1
    assert "unknown zoo model" in capsys.readouterr().err


def test_zoo_emit_bad_param(tmp_path):
    assert main(["zoo", "--emit", "damped_qubit", str(tmp_path / "x.json"), "--param", "colour=1"]) == 1
    assert main(["zoo", "--emit", "damped_qubit", str(tmp_path / "x.json"), "--param", "kappa"]) == 1


def test_emitted_purcell_round_trips(tmp_path):
    path = _emit(tmp_path, "purcell_two_qubit", "g=0.5")
    mf = load_model(path)
    np.testing.assert_array_equal(mf.model.slow.hamiltonian, zoo_build("purcell_two_qubit", g=0.5).slow.hamiltonian)


def test_reduce_damped_qubit(tmp_path, capsys):
    path = _emit(tmp_path, "damped_qubit")
    code, report = _run_json(capsys, ["reduce", str(path), "--order", "3"])
    assert code == 0
    assert report["split"]["dbar"] == 1
    assert [o["F"] for o in report["expansion"]["orders"]] == [[[0.0]]] * 3
    assert all(c["passed"] for c in report["criteria"].values())


def test_reduce_purcell_second_order(tmp_path, capsys):
    path = _emit(tmp_path, "purcell_two_qubit")
    code, report = _run_json(capsys, ["reduce", str(path), "--order", "2"])
    assert code == 0
    orders = report["expansion"]["orders"]
    assert len(orders) == 2 and np.abs(np.array(orders[1]["F"])).max() > 1
    assert max(o["slow_residual"] for o in orders) < 1e-9
    assert report["model"]["digest"]
    assert "fast_gauge" in report["conventions"]


def test_reduce_zero_fast_generator_exits_2(tmp_path, capsys):
    data = model_to_dict(zoo_build("damped_qubit"))
    data["fast"]["collapse"] = []
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(data))
    assert main(["reduce", str(path)]) == 2
    assert "hypothesis violated: no spectral gap" in capsys.readouterr().err


def test_reduce_parse_error_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2,\n  "fast": }')
    assert main(["reduce", str(path)]) == 1
    assert "line 2, column" in capsys.readouterr().err


def test_reduce_missing_file_exits_1(tmp_path):
    assert main(["reduce", str(tmp_path / "missing.json")]) == 1


def test_recursion_failure_exits_3(tmp_path, capsys):
    path = _emit(tmp_path, "lambda_system")
    assert main(["reduce", str(path), "--residual-tol", "1e-30"]) == 3
    assert "residual" in capsys.readouterr().err


def test_usage_error_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["reduce"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_report_is_deterministic(tmp_path):
    path = _emit(tmp_path, "lambda_system")
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["reduce", str(path), "--order", "3", "--out", str(out)]) == 0
        outs.append(_strip_timestamp(json.loads(out.read_text())))
    assert json.dumps(outs[0]) == json.dumps(outs[1])


def test_flags_override_file_settings(tmp_path, capsys):
    data = model_to_dict(zoo_build("purcell_two_qubit"), order=3, tolerances={"residual_tol": 1e-8})
    path = tmp_path / "m.json"
    path.write_text(json.dumps(data))
    _, report = _run_json(capsys, ["reduce", str(path)])
    assert report["settings"]["order"] == 3 and report["settings"]["residual_tol"] == 1e-8
    _, report = _run_json(capsys, ["reduce", str(path), "--order", "2", "--residual-tol", "1e-7"])
    assert report["settings"]["order"] == 2 and report["settings"]["residual_tol"] == 1e-7


def test_validate_unperturbed_passes_at_floor(tmp_path, capsys):
    path = _emit(tmp_path, "purcell_two_qubit", "g=0")
    code, report = _run_json(capsys, ["validate", str(path)])
    assert code == 0
    assert report["criteria"]["closeness"]["status"] == ["pass_at_floor"]
    assert report["criteria"]["second_order"]["status"] == "pass_at_floor"
    assert all(c["passed"] for c in report["criteria"].values())


def test_validate_purcell_slope(tmp_path, capsys):
    path = _emit(tmp_path, "purcell_two_qubit")
    code, report = _run_json(capsys, ["validate", str(path), "--tbar", "1"])
    assert code == 0
    slope = report["validation"]["second_order"]["state_error"]["slope"]
    assert 1.7 <= slope <= 2.3


def test_validate_single_time_point_warns(tmp_path, capsys):
    path = _emit(tmp_path, "purcell_two_qubit")
    code, report = _run_json(capsys, ["validate", str(path), "--tgrid", "3.0"])
    assert code == 0
    assert report["criteria"]["closeness"]["status"] == ["fit_skipped"]
    assert any("fewer than two points" in w for w in report["warnings"])


def test_sweep_empty_epsilon_list_exits_1(tmp_path, capsys):
    path = _emit(tmp_path, "purcell_two_qubit")
    assert main(["sweep", str(path), "--epsilons", ""]) == 1
    assert main(["sweep", str(path), "--epsilons", ",", "--orders", "1"]) == 1


def test_sweep_csv_round_trip_and_ordering(tmp_path, capsys):
    path = _emit(tmp_path, "purcell_two_qubit")
    csv_path, json_path = tmp_path / "s.csv", tmp_path / "s.json"
    args = ["sweep", str(path), "--epsilons", "0.04,0.02", "--orders", "2,1,4",
            "--csv", str(csv_path), "--out", str(json_path), "--workers", "3"]
    assert main(args) == 0
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    records = json.loads(json_path.read_text())["sweep"]["records"]
    assert [(float(r["epsilon"]), int(r["order"])) for r in rows] == [
        (0.02, 1), (0.02, 2), (0.02, 4), (0.04, 1), (0.04, 2), (0.04, 4)]
    assert list(rows[0]) == ["epsilon", "order", "slow_coord_error", "state_error", "min_choi_eig",
                             "trace_defect", "fitted_rate"]
    for row, rec in zip(rows, records):
        for key in ("slow_coord_error", "state_error", "min_choi_eig", "trace_defect"):
            assert float(row[key]) == rec[key]


def test_sweep_error_decreases_with_order(tmp_path, capsys):
    path = _emit(tmp_path, "purcell_two_qubit")
    code, report = _run_json(capsys, ["sweep", str(path), "--epsilons", "0.02", "--orders", "1,2,3,4"])
    assert code == 0
    errors = [r["slow_coord_error"] for r in report["sweep"]["records"]]
    assert all(b <= a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < errors[0]


def test_sweep_worker_count_does_not_change_results(tmp_path, capsys):
    path = _emit(tmp_path, "lambda_system")
    base = ["sweep", str(path), "--epsilons", "0.01,0.02", "--orders", "1,2"]
    _, one = _run_json(capsys, base + ["--workers", "1"])
    _, four = _run_json(capsys, base + ["--workers", "4"])
    assert one["sweep"] == four["sweep"]


def test_log_level_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GKSL_REDUCE_LOG_LEVEL", "not-a-level")
    path = _emit(tmp_path, "damped_qubit")
    assert main(["reduce", str(path)]) == 0
