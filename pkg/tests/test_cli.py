import json
import subprocess
import sys
from fractions import Fraction

import pytest

from permlab.bounds import construct_extremal
from permlab.cli import main
from permlab.matrix import identity, make_matrix, save_matrix

H = Fraction(1, 2)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, a in {
        "id4": identity(4),
        "example": construct_extremal(9, 5),
        "diag": make_matrix(3, [[H, Fraction(1, 4), 0], [0, 0, H], [Fraction(1, 3), 0, Fraction(1, 3)]]),
    }.items():
        paths[name] = tmp_path / f"{name}.mat"
        save_matrix(a, paths[name])
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_permanent_identity(capsys, files):
    code, out, _ = run(capsys, "permanent", "--input", files["id4"], "--format", "text")
    assert code == 0 and out == "1\n"


def test_permanent_all_methods(capsys, files):
    code, out, _ = run(capsys, "permanent", "--input", files["example"], "--of", "i-minus", "--method", "all")
    values = json.loads(out)["values"]
    assert code == 0 and values["naive"] == values["ryser"] == "5/1" and values["gray"] == pytest.approx(5.0)


def test_bound_json(capsys):
    code, out, _ = run(capsys, "bound", "--n", 9, "--s", 5, "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["value"] == "5/1" and rep["hypotheses_met"] is True


def test_bound_csv_columns(capsys):
    code, out, _ = run(capsys, "bound", "--n", 5, "--conjecture", "odd_substochastic", "--s", "9/2",
                       "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "n,s,e,value,source,hypotheses_met,reading,supremum,note"
    assert len(lines) == 3 and ",consistent," in lines[2]


def test_construct_text_is_a_matrix_file(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "--n", 9, "--s", 5, "--format", "text")
    assert code == 0 and out.splitlines()[0] == "9"
    code, out, _ = run(capsys, "construct", "--kind", "circulant3", "--x", "1/2")
    assert json.loads(out)["per_i_minus"] == "3/2"


def test_classify_and_decompose(capsys, files):
    code, out, _ = run(capsys, "classify", "--input", files["example"])
    assert code == 0 and json.loads(out)["sub_defect"] == 4
    code, out, _ = run(capsys, "decompose", "--input", files["example"], "--format", "csv")
    dec = json.loads(out)  # always JSON
    assert [c["length"] for c in dec["cycles"]] == [2, 2, 2] and dec["per_i_minus"] == "5/1"


def test_transform_prints_step_log(capsys, files):
    code, out, _ = run(capsys, "transform", "--op", "zero_diagonalize", "--input", files["diag"])
    rep = json.loads(out)
    assert code == 0 and all(rep["output"][i][i] == "0/1" for i in range(3))
    assert Fraction(rep["per_after"]) >= Fraction(rep["per_before"])
    assert rep["steps"][0]["kind"] == "epsilon_shift"


def test_domain_error_exit_1(capsys, files):
    code, _, err = run(capsys, "construct", "--n", 5, "--s", 5)
    assert code == 1 and "PreconditionError" in err
    code, _, _ = run(capsys, "transform", "--op", "zero_diagonalize", "--preserve", "doubly_substochastic",
                     "--input", files["id4"])
    assert code == 1


def test_missing_files_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "search", "--config", tmp_path / "miss.json")
    assert code == 2 and "miss.json" in err
    code, _, err = run(capsys, "permanent", "--input", tmp_path / "nope.mat")
    assert code == 2 and "nope.mat" in err


def test_malformed_inputs_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.mat"
    bad.write_text("2\n0 1\n")
    assert run(capsys, "classify", "--input", bad)[0] == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"n": 3, "s": 3, "colour": "red"}')
    assert run(capsys, "search", "--config", cfg)[0] == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bound", "--n", "3", "--unknown"])
    assert exc.value.code == 2
    assert run(capsys, "construct", "--kind", "circulant3")[0] == 2


def test_search_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "s": 3, "class": "doubly_stochastic", "restarts": 2,
                               "steps_per_restart": 2000, "seed": 11}))
    code, out, _ = run(capsys, "search", "--config", cfg)
    rep = json.loads(out)
    assert code == 0 and rep["config"]["seed"] == 11 and rep["best_value"] <= 1.5 + 1e-9
    out_path = tmp_path / "res.csv"
    code, out, _ = run(capsys, "search", "--config", cfg, "--format", "csv", "--output", out_path)
    assert code == 0 and out == "" and out_path.read_text().startswith("n,s,class,seed")


def test_evidence_omega3_table(capsys):
    code, out, _ = run(capsys, "evidence", "--omega3", "--s", "3", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "s,points,best_value,candidate_a0,candidate_a1,envelope,excess"
    assert lines[1].split(",")[2] == "3/2"


def test_verify_deterministic(capsys):
    code1, out1, _ = run(capsys, "verify")
    code2, out2, _ = run(capsys, "verify")
    assert code1 == code2 == 0 and out1 == out2
    assert json.loads(out1)["passed"] is True


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "permlab.cli", "bound", "--n", "4", "--s", "3", "--format", "text"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "5/2"
