import json
import subprocess
import sys

import pytest

from cee.algebra import tensor_product
from cee.cli import main
from cee.report import canonical, dumps
from cee.tpm import noise_tpm, not_tpm, tpm_to_dict
from conftest import two_nor_pairs


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "not": write(tmp_path / "not.json", tpm_to_dict(not_tpm())),
        "noise": write(tmp_path / "noise.json", tpm_to_dict(noise_tpm(2))),
        "notnot": write(tmp_path / "notnot.json", tpm_to_dict(tensor_product(not_tpm(), not_tpm()))),
        "bad": write(tmp_path / "bad.json", {"n": 1, "convention": "little-endian", "tpm": [[0.5, 0.4], [0, 1]]}),
        "sim0": write(tmp_path / "sim0.json", {"num_particles": 2, "steps": 20000, "coupling": 0.0, "seed": 1}),
        "sim1": write(tmp_path / "sim1.json", {"num_particles": 2, "steps": 20000, "coupling": 1.0, "seed": 1}),
        "still": write(tmp_path / "still.json", {"num_particles": 2, "steps": 100, "hop_prob": 0.0}),
    }


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else None


def test_analyze_not(files, tmp_path):
    code, text = run(["analyze", files["not"], "--state", "1"], tmp_path)
    assert code == 0
    rep = json.loads(text)
    assert len(rep["complexes"]) == 1 and rep["complexes"][0]["elements"] == [0]
    assert rep["phi_metric"] == "emd" and rep["phi_mode"] == "mip"
    assert len(rep["ces"]["0"]["distinctions"]) == 1


def test_analyze_noise_empty(files, tmp_path):
    code, text = run(["analyze", files["noise"], "--state", "00"], tmp_path)
    assert code == 0 and json.loads(text)["complexes"] == []


def test_analyze_malformed(files, capsys):
    assert main(["analyze", files["bad"], "--state", "1"]) == 2
    assert "row-not-stochastic" in capsys.readouterr().err


def test_analyze_bad_state(files, capsys):
    assert main(["analyze", files["not"], "--state", "10"]) == 2
    assert "bad-state" in capsys.readouterr().err


def test_analyze_metric_flag(files, tmp_path):
    _, text = run(["analyze", files["not"], "--state", "1", "--metric", "id"], tmp_path)
    assert json.loads(text)["complexes"][0]["big_phi"] == 1.0


def test_compose_then_factorize(files, tmp_path):
    composed = tmp_path / "composed.json"
    assert main(["compose", files["not"], files["not"], "--out", str(composed)]) == 0
    code, text = run(["factorize", str(composed), "--epsilon", "1e-9"], tmp_path)
    f = json.loads(text)["factorization"]
    assert code == 0 and f["groups"] == [[0], [1]] and f["residual"] <= 1e-9


def test_grain_exit_codes(files, tmp_path):
    code, text = run(["grain", files["notnot"], "--state", "10"], tmp_path)
    assert code == 0
    rep = json.loads(text)
    assert rep["partial"] is False
    assert {"groups": [[0], [1]], "stride": 1, "thresholds": [1, 1]} in [m["grain"] for m in rep["grain_search"]["maximal"]]
    code, text = run(["grain", files["notnot"], "--state", "10", "--budget", "3"], tmp_path, "partial.json")
    assert code == 3 and json.loads(text)["partial"] is True


def test_grain_csv(files, tmp_path):
    csv_path = tmp_path / "g.csv"
    main(["grain", files["notnot"], "--state", "10", "--stride-set", "1", "--csv", str(csv_path), "--out", str(tmp_path / "g.json")])
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "groups,thresholds,stride,big_phi,maximal"
    assert len(lines) == 1 + 3


def test_simulate_twice_identical(files, tmp_path):
    _, a = run(["simulate", files["sim0"], "--seed", "5"], tmp_path, "a.json")
    _, b = run(["simulate", files["sim0"], "--seed", "5"], tmp_path, "b.json")
    assert a == b
    assert json.loads(a)["config"]["seed"] == 5


def test_pipeline_uncoupled_two_groups(files, tmp_path):
    _, text = run(["pipeline", files["sim0"]], tmp_path)
    rep = json.loads(text)
    assert rep["factorization"]["groups"] == [[0], [1]]
    assert rep["ledger"]["physicality"] == {"physical": False, "regime": "euclidean", "work": 0.0}
    assert len(rep["empirical_tpm"]["sha256"]) == 64


def test_pipeline_coupled_one_group(files, tmp_path):
    _, text = run(["pipeline", files["sim1"]], tmp_path)
    assert json.loads(text)["factorization"]["groups"] == [[0, 1]]


def test_pipeline_still_zero_bits(files, tmp_path):
    _, text = run(["pipeline", files["still"]], tmp_path)
    assert json.loads(text)["ledger"]["bits"] == 0


def test_sweep_csv(files, tmp_path):
    code, text = run(["sweep", files["sim0"], "--couplings", "0,1", "--seeds", "2"], tmp_path, "s.csv")
    assert code == 0
    assert text.splitlines()[0] == "coupling,seed,residual" and len(text.splitlines()) == 5


def test_bad_config(tmp_path, capsys):
    p = write(tmp_path / "c.json", {"num_particles": 2, "colour": "red"})
    assert main(["simulate", p]) == 2
    assert "bad-config" in capsys.readouterr().err


def test_canonical_floats():
    assert canonical(0.1 + 0.2) == 0.3
    assert canonical(-0.0) == 0.0
    assert dumps({"b": 1, "a": [1.0]}).startswith('{\n  "a"')


def test_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "cee.cli", "analyze", files["not"], "--state", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["command"] == "analyze"


def test_two_nor_pairs_grain_report(tmp_path):
    p = write(tmp_path / "nn.json", tpm_to_dict(two_nor_pairs()))
    code, text = run(["grain", p, "--state", "1010"], tmp_path)
    assert code == 0
    maximal = [m["grain"] for m in json.loads(text)["grain_search"]["maximal"]]
    assert {"groups": [[0, 1], [2, 3]], "thresholds": [1, 1], "stride": 1} in maximal
