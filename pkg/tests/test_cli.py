import json

import pytest

import cli


def write(tmp_path, name, document):
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_check_identity(tmp_path, capsys):
    path = write(tmp_path, "identity.json", {"form": [[1, 0], [0, 1]], "T": [[1, 0], [0, 1]]})
    code, report = run(capsys, "check", path)
    assert code == 0
    assert report["isometric"] is True


def test_check_failure_exits_two(tmp_path, capsys):
    path = write(tmp_path, "double.json", {"form": [[1, 0], [0, 1]], "T": [[2, 0], [0, 2]]})
    code, report = run(capsys, "check", path)
    assert code == 2
    assert report["success"] is False


def test_check_symmetrizable(tmp_path, capsys):
    path = write(
        tmp_path, "op.json", {"form": [[2, 0], [0, 1]], "operator": [[1, 2], [4, 3]]}
    )
    code, report = run(capsys, "check", path, "--kind", "symmetrizable")
    assert code == 0
    assert report["a_symmetric"] is True


def test_project_hand_case(tmp_path, capsys):
    path = write(tmp_path, "proj.json", {"form": [[2, 1], [1, 1]], "basis": [[1], [0]]})
    code, report = run(capsys, "project", path)
    assert code == 0
    assert [pair[0] for pair in report["Q"]["data"]] == pytest.approx([1.0, 0.5, 0.0, 0.0])


def test_extend_forced_instance(tmp_path, capsys):
    path = write(tmp_path, "krein.json", {"X": [[0, 1], [1, 0.7]], "P": [[1, 0], [0, 0]]})
    code, report = run(capsys, "extend", path, "--method", "paper")
    assert code == 0
    assert report["method"] == "paper_construction"
    assert abs(report["Z"]["data"][3][0]) < 1e-10


def test_geodesic_and_race(tmp_path, capsys):
    document = {"form": [[1, 0], [0, 1]], "T": [[1, 0], [0, 1]], "H": [[0, 1], [1, 0]]}
    path = write(tmp_path, "tangent.json", document)
    code, report = run(capsys, "geodesic", path, "--t1", "1.0")
    assert code == 0
    assert report["length"] == pytest.approx(1.0, abs=1e-6)
    code, report = run(capsys, "race", path, "--t1", "2.0", "--trials", "3", "--seed", "1")
    assert code == 0
    assert report["violations"] == 0 and report["trials"] == 3


def test_seq_adjoint_of_ustar(capsys):
    code, report = run(capsys, "seq", "adjoint", "example_242_Ustar", "--horizon", "4096")
    assert code == 0
    assert report["verdict"] == "non_adjointable_evidence"


def test_seq_wold_and_demo(capsys):
    code, report = run(capsys, "seq", "wold", "dirichlet_shift", "--horizon", "64")
    assert code == 0 and report["wandering"] == [1]
    code, report = run(capsys, "seq", "demo", "--K", "10")
    assert code == 0 and report["monotone"] is True


def test_unknown_operator_is_an_input_error(capsys):
    code, report = run(capsys, "seq", "adjoint", "no_such_map")
    assert code == 1
    assert report["error"]["code"] == "unknown_builtin"


def test_missing_file_is_an_input_error(tmp_path, capsys):
    code, report = run(capsys, "douglas", str(tmp_path / "missing.json"))
    assert code == 1
    assert report["error"]["code"] == "input_error"


def test_non_positive_tolerance_is_rejected(tmp_path, capsys):
    path = write(tmp_path, "identity.json", {"form": [[1]], "T": [[1]]})
    code, report = run(capsys, "check", path, "--tol", "-1")
    assert code == 1
    assert "error" in report


def test_too_far_is_a_computation_error(tmp_path, capsys):
    document = {
        "form": [[1, 0], [0, 1]],
        "source": [[1]],
        "T0": [[1], [0]],
        "T": [[0], [1]],
    }
    code, report = run(capsys, "section", write(tmp_path, "far.json", document))
    assert code == 2
    assert report["error"]["code"] == "too_far"


def test_out_file_and_suite(tmp_path, capsys):
    out = tmp_path / "reports" / "suite.json"
    code = cli.main(["suite", "--only", "douglas", "--scale", "0.01", "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["items"][0]["name"] == "douglas"
