import json
import subprocess
import sys

import numpy as np
import pytest

from dynrmat import constructors as C
from dynrmat import matrixfile as MF
from dynrmat.cli import main
from dynrmat.errors import InputError


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_verify_qdyb_example(capsys):
    code, doc = run(["verify", "qdyb", "--family", "trig_hecke", "--N", "3", "--X", "1-3", "--q", "2", "--samples", "20", "--seed", "7"], capsys)
    assert code == 0
    assert doc["seed"] == 7
    assert all(c["pass"] and c["residual"] < 1e-8 for c in doc["checks"])
    assert doc["summary"] == {"passed": len(doc["checks"]), "failed": 0}


def test_report_layout_isolates_timestamp(capsys):
    code, doc = run(["verify", "hecke", "--family", "rational_hecke", "--N", "2", "--samples", "3"], capsys)
    assert code == 0
    assert list(doc)[0] == "schema" and list(doc)[-1] == "timestamp"


def test_zero_dimension_is_a_usage_error(capsys):
    assert main(["verify", "qdyb", "--N", "0"]) == 2


def test_unknown_suite_is_a_usage_error(capsys):
    assert main(["suite", "nonsense"]) == 2


def test_malformed_input_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["classify", "--input", str(p)]) == 2


def test_failing_check_exits_one(capsys):
    # the rational family is not unitary only if broken; use a tolerance no residual can meet
    code, doc = run(["verify", "qdyb", "--family", "rational_hecke", "--N", "3", "--samples", "3", "--tol", "1e-300"], capsys)
    assert code == 1 and doc["summary"]["failed"] >= 1


def test_pole_exits_three(tmp_path, capsys):
    doc = MF.export_family(C.identity_family(2), [{"lambda": [0.0, 0.0]}])
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc))
    # sampling asks for points the file does not hold
    assert main(["verify", "qdyb", "--input", str(p), "--samples", "2"]) == 3


def test_identity_export_is_identity(tmp_path, capsys):
    out = tmp_path / "id.json"
    code = main(["export", "--family", "identity", "--N", "2", "--samples", "4", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["N"] == 2 and len(doc["points"]) == 4
    for pt in doc["points"]:
        M = np.array([MF.decode_complex(x) for x in pt["matrix"]]).reshape(4, 4)
        np.testing.assert_array_equal(M, np.eye(4))


def test_exported_family_reclassifies_identically(tmp_path, capsys):
    args = ["--family", "trig_hecke", "--N", "3", "--X", "1-2", "--q", "1.5", "--mu", "[1, 2, 0.5]"]
    code, direct = run(["classify", *args], capsys)
    assert code == 0
    f = tmp_path / "pts.json"
    assert main(["export", *args, "--classify-points", "--samples", "1", "--out", str(f)]) == 0
    code, again = run(["classify", "--input", str(f)], capsys)
    assert code == 0
    for k in ("case", "q", "sigma", "X", "mu"):
        assert again[k] == direct[k]


def test_matrix_file_round_trip_is_bit_exact(rng):
    fam = C.spectral_rational_R(C.IntervalDecomposition.full(2), 0.7)
    pts = [{"lambda": rng.normal(size=2) + 1j * rng.normal(size=2), "z": complex(rng.normal(), rng.normal())} for _ in range(3)]
    doc = json.loads(MF.dump(MF.export_family(fam, pts)))
    back = MF.read_matrix_file(doc)
    for pt in pts:
        np.testing.assert_array_equal(back.dense(pt["z"], pt["lambda"]), fam.dense(pt["z"], pt["lambda"]))
    assert json.loads(MF.dump(MF.export_family(back, pts))) == doc


@pytest.mark.parametrize(
    "doc",
    [[], {"N": 2}, {"N": 2, "legs": 3, "gamma": [1, 0], "points": [{}]}, {"N": 2, "legs": 2, "gamma": [1, 0], "points": [{"lambda": [[0, 0]], "matrix": []}]}],
)
def test_malformed_matrix_files(doc):
    with pytest.raises(InputError):
        MF.read_matrix_file(doc)


def test_gauge_output_is_reusable_descriptor(tmp_path, capsys):
    chain = json.dumps([{"kind": "perm", "sigma": [2, 0, 1]}, {"kind": "scale", "c": 2.0}])
    code, doc = run(["gauge", "--family", "rational_hecke", "--N", "3", "--X", "1-2", "--chain", chain, "--samples", "3"], capsys)
    assert code == 0
    p = tmp_path / "d.json"
    p.write_text(json.dumps(doc["descriptor"]))
    code, cf = run(["classify", "--input", str(p)], capsys)
    assert code == 0 and cf["X"] == [[0, 1]]


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("DYNRMAT_SEED", "11")
    code, doc = run(["verify", "hecke", "--family", "identity", "--N", "2", "--samples", "2"], capsys)
    assert doc["seed"] == 11


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "rational_hecke", "N": 2, "samples": 2, "seed": 5}))
    code, doc = run(["verify", "qdyb", "--config", str(cfg)], capsys)
    assert code == 0 and doc["seed"] == 5


def test_limits_suite_runs(capsys):
    code, doc = run(["suite", "limits", "--seed", "1"], capsys)
    assert code == 0
    names = {c["name"].split("/")[0] for c in doc["checks"]}
    assert doc["suite"] == "limits" and len(names) > 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "dynrmat", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()


def test_rigidity_reports_closed_form_at_sample_point(capsys):
    code, doc = run(["rigidity", "--family", "trig_hecke", "--N", "2", "--q", "2", "--lambda", "[2, 0]"], capsys)
    assert code == 0
    Q = [complex(*x) for x in doc["rigidity"]["Q"]]
    assert Q == [pytest.approx(2 / 3), pytest.approx(7 / 3)]
    assert complex(*doc["closed_form"]["Qp"][0]) == pytest.approx(3)
