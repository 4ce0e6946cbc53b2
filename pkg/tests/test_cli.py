import json

import numpy as np
import pytest

from weakbesov.cli import main


@pytest.fixture
def zeros_file(tmp_path):
    path = tmp_path / "z.json"
    assert main(["gen", "--kind", "exponential", "--m", "1", "--depth", "6", "--out", str(path)]) == 0
    return path


def test_gen_kinds(tmp_path):
    for kind, extra in (("growing", ["--s", "1"]), ("stacked", ["--k", "30"])):
        out = tmp_path / f"{kind}.json"
        assert main(["gen", "--kind", kind, "--depth", "5", "--out", str(out)] + extra) == 0
        assert json.loads(out.read_text())["zeros"]


def test_eval_csv(zeros_file, tmp_path):
    out = tmp_path / "e.csv"
    assert main(["eval", "--zeros", str(zeros_file), "--nr", "4", "--nt", "8", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "re,im,B_re,B_im,dB_re,dB_im"
    assert len(lines) == 1 + 4 * 8
    row = np.array(lines[1].split(","), dtype=float)
    assert np.all(np.isfinite(row))


def test_classify(zeros_file, tmp_path):
    out = tmp_path / "c.json"
    assert main(["classify", "--zeros", str(zeros_file), "--depth", "6", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "exponential" and doc["M"] == 1


def test_norm(zeros_file, tmp_path):
    out = tmp_path / "n.json"
    assert main(["norm", "--zeros", str(zeros_file), "--steps", "3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["value"] > 0 and doc["verdict"] in ("finite", "inconclusive", "diverging")


def test_verify_and_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"stack_K": [100], "samples": 20}))
    out = tmp_path / "r.json"
    assert main(["verify", "--scenario", "lemma3", "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert main(["verify", "--scenario", "lemma3", "--config", str(bad), "--out", str(out)]) == 2
    assert main(["verify", "--scenario", "lemma3", "--p", "0.5", "--out", str(out)]) == 2
    assert main(["classify", "--zeros", str(tmp_path / "missing.json"), "--depth", "4"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_failing_scenario_exits_one(tmp_path):
    # one zero per K makes max |B| non-decreasing, so the predicate fails
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"stack_K": [1, 1], "samples": 10}))
    out = tmp_path / "r.json"
    assert main(["verify", "--scenario", "lemma3", "--config", str(cfg), "--out", str(out)]) == 1
    assert json.loads(out.read_text())["passed"] is False
