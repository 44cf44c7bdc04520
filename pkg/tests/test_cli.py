import json
import os

import numpy as np
import pytest

from cutloci import cli, serialize


def run(argv):
    return cli.main(argv)


def test_matrix_json_roundtrip():
    m = np.array([[1.5, -2.0], [0.25, 1e-17]])
    blob = serialize.matrix_to_json(m)
    back = serialize.matrix_from_json(blob)
    assert np.array_equal(back, m)
    z = np.array([[1 + 2j, 0], [0, -1j]])
    back = serialize.matrix_from_json(serialize.matrix_to_json(z))
    assert np.array_equal(back, z)


def test_float_formatting_17_digits():
    assert serialize.fmt_float(np.pi) == "3.1415926535897931"
    text = serialize.dumps({"x": [1.0 / 3.0, 2]})
    assert text == '{"x":[0.33333333333333331,2]}'


def test_atomic_write_no_partial_file(tmp_path):
    target = tmp_path / "out.json"
    serialize.write_atomic(str(target), "hello")
    assert target.read_text() == "hello"
    leftovers = [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]
    assert not leftovers


def test_sample_command_writes_expected_rhos(tmp_path, capsys):
    out = tmp_path / "eq.json"
    code = run([
        "sample", "--manifold", "sphere:3", "--submanifold", "equator:1",
        "--feet", "8", "--dirs", "8", "--seed", "7", "--output", str(out),
    ])
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["submanifold"] == "equator:1" and blob["seed"] == 7
    rhos = [s["rho"] for s in blob["samples"]]
    assert len(rhos) == 64
    assert max(abs(r - np.pi / 2) for r in rhos) <= 1e-8
    summary = capsys.readouterr().out
    assert "separating_fraction" in summary


def test_sample_csv_header_marks_lossy(tmp_path):
    out = tmp_path / "h.csv"
    code = run([
        "sample", "--manifold", "sphere:3", "--submanifold", "hopflink",
        "--feet", "2", "--dirs", "2", "--seed", "1", "--format", "csv",
        "--output", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#") and "lossy" in lines[0]
    assert lines[1] == "foot,dir,rho,cut,mult,saturated,class"


def test_dist_command_orthogonal(tmp_path, capsys):
    a = tmp_path / "A.json"
    a.write_text(json.dumps({"rows": 2, "cols": 2, "field": "real", "data": [2, 0, 0, 3]}))
    code = run([
        "dist", "--manifold", "matspace:2", "--submanifold", "orthogonal:2",
        "--input", str(a),
    ])
    assert code == 0
    blob = json.loads(capsys.readouterr().out.strip())
    assert blob["distance"] ** 2 == pytest.approx(5.0)
    assert blob["multiplicity"] == 1
    assert blob["minimizers"][0] == [1, 0, 0, 1]


def test_dist_command_hopf_tie(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(json.dumps([0.5, 0.5, 0.5, 0.5]))
    code = run([
        "dist", "--manifold", "sphere:3", "--submanifold", "hopflink",
        "--input", str(p),
    ])
    assert code == 0
    blob = json.loads(capsys.readouterr().out.strip())
    assert blob["distance"] == pytest.approx(np.pi / 4)
    assert blob["multiplicity"] == 2


def test_flow_command_decay(tmp_path):
    a = tmp_path / "A.json"
    a.write_text(json.dumps({"rows": 2, "cols": 2, "field": "real", "data": [2, 0, 0, 3]}))
    out = tmp_path / "traj.json"
    code = run([
        "flow", "--flow-kind", "orthogonal", "--input", str(a),
        "--times", "0,10", "--output", str(out),
    ])
    assert code == 0
    blob = json.loads(out.read_text())
    end = np.array(blob["states"][-1]["position"]).reshape(2, 2)
    assert np.linalg.norm(end - np.eye(2)) <= 1e-8


def test_flow_command_morse_bott(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps([0.8, 0.0, 0.6]))
    out = tmp_path / "traj.json"
    code = run([
        "flow", "--flow-kind", "morse-bott", "--manifold", "sphere:2",
        "--submanifold", "equator:1", "--input", str(p),
        "--times", "0,1,5", "--output", str(out),
    ])
    assert code == 0
    blob = json.loads(out.read_text())
    dists = [s["distance_to_n"] for s in blob["states"]]
    assert dists[0] == pytest.approx(np.arcsin(0.6))
    assert dists[-1] == pytest.approx(np.arcsin(0.6) * np.exp(-10.0))


def test_verify_command_exit_codes(tmp_path):
    out = tmp_path / "rep.json"
    code = run(["verify", "--suite", "matfun", "--output", str(out)])
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["suite"] == "matfun"
    assert all(c["pass"] for c in blob["checks"])


def test_verify_command_params(tmp_path, capsys):
    code = run(["verify", "--suite", "fermat", "--params", "n=1,d=3"])
    assert code == 0
    blob = json.loads(capsys.readouterr().out.strip())
    names = {c["name"] for c in blob["checks"]}
    assert "fermat_d3_n1_tie" in names


def test_unsupported_pair_exits_3(capsys):
    code = run([
        "sample", "--manifold", "sphere:2", "--submanifold", "ellipse:2,1",
        "--feet", "2", "--dirs", "2",
    ])
    assert code == 3
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "UnsupportedAmbient"


def test_parse_error_exits_2(capsys):
    code = run([
        "sample", "--manifold", "sphere:2", "--submanifold", "wedge:1",
        "--feet", "2", "--dirs", "2",
    ])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert "wedge" in err["message"]


def test_points_file_descriptor(tmp_path):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps({"points": [[0.5, 0.5]]}))
    out = tmp_path / "cloud.json"
    code = run([
        "sample", "--manifold", "torus:2", "--submanifold", f"points:{pts}",
        "--feet", "1", "--dirs", "16", "--seed", "2", "--output", str(out),
    ])
    assert code == 0
    blob = json.loads(out.read_text())
    assert len(blob["samples"]) == 16
    for s in blob["samples"]:
        cut = np.array(s["cut"])
        assert min(np.minimum(cut, 1.0 - cut)) <= 1e-6


def test_explore_command_is_labeled(tmp_path):
    out = tmp_path / "exp.json"
    code = run([
        "explore", "--params", "n=2,d=3", "--samples", "4", "--seed", "5",
        "--output", str(out),
    ])
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["mode"] == "exploration"
    assert "no pass/fail" in blob["note"]


def test_identical_config_same_bytes(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        code = run([
            "sample", "--manifold", "sphere:3", "--submanifold", "hopflink",
            "--feet", "4", "--dirs", "8", "--seed", "9", "--output", str(out),
        ])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
