import io
import json
import sys

import pytest

from qkneser.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_counts(capsys):
    rc, out, _ = run(capsys, "counts", "--q", "3")
    doc = json.loads(out)
    assert rc == 0
    assert doc["gaussian_table"]["4,2"] == 130
    assert doc["gaussian_table"]["3,1"] == 13
    assert doc["flags"] == {"2,3": 15730, "2,4": 15730}
    assert doc["e0_23"] == 637


def test_counts_rejects_non_prime_power(capsys):
    rc, _, err = run(capsys, "counts", "--q", "6")
    assert rc == 1 and "prime power" in err


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["graph", "--q", "2", "--omega", "3,2"])
    assert exc.value.code == 1


def test_graph(capsys, tmp_path):
    path = tmp_path / "g.dimacs"
    rc, out, _ = run(capsys, "graph", "--q", "2", "--omega", "2,3", "--out", str(path))
    assert rc == 0
    meta = json.loads(out)
    assert meta["edges"] == 138880 and meta["degree"] == 256
    assert path.read_text().startswith("p edge 1085 138880\n")


def test_graph_limit(capsys):
    rc, _, err = run(capsys, "graph", "--q", "2", "--omega", "2,3", "--limit", "10")
    assert rc == 1 and "limit" in err


def test_color_then_verify(capsys, tmp_path, monkeypatch):
    rc, out, _ = run(capsys, "color", "--q", "2", "--construction", "line23", "--classes-expected", "13")
    assert rc == 0
    doc = json.loads(out)
    assert len(doc["classes"]) == 13
    good = tmp_path / "good.json"
    good.write_text(out)
    rc, _, err = run(capsys, "verify", str(good))
    assert rc == 0 and "passed" in err

    monkeypatch.setattr(sys, "stdin", io.StringIO(out))
    rc, _, _ = run(capsys, "verify", "-")
    assert rc == 0

    doc["classes"].pop(0)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    rc, _, err = run(capsys, "verify", str(bad))
    assert rc == 2 and "FAILED" in err


def test_color_wrong_class_count(capsys):
    rc, _, _ = run(capsys, "color", "--q", "2", "--construction", "covering24", "--classes-expected", "14")
    assert rc == 2


@pytest.mark.parametrize("construction", ["covering24", "plane23", "mixed23"])
def test_color_verify_flag(capsys, construction):
    argv = ["color", "--q", "2", "--construction", construction, "--verify", "--proper"]
    if construction == "mixed23":
        argv += ["--R", "0,2"]
    rc, out, _ = run(capsys, *argv)
    assert rc == 0
    assert "colors" in json.loads(out)


def test_color_bad_incidence(capsys):
    rc, _, err = run(capsys, "color", "--q", "2", "--construction", "line23", "--solid", "0", "--line", "154")
    assert rc == 1


def test_ekr(capsys):
    rc, out, _ = run(capsys, "ekr", "--q", "2", "--kind", "SP")
    assert rc == 0
    assert len(json.loads(out)["family"]["members"]) == 133


def test_alpha_exit_codes(capsys):
    rc, out, _ = run(capsys, "alpha", "--q", "2", "--omega", "2,4", "--max-nodes", "100", "--require-exact")
    assert rc == 3
    assert json.loads(out)["lower"] >= 105
    rc, _, _ = run(capsys, "alpha", "--q", "2", "--omega", "2,4", "--max-nodes", "100")
    assert rc == 0


def test_chi(capsys):
    rc, out, _ = run(capsys, "chi", "--q", "2", "--omega", "2,4", "--alpha-upper", "217", "--no-dsatur")
    doc = json.loads(out)
    assert rc == 0 and doc["upper"] <= 15 and doc["lower"] >= 5


def test_falsify(capsys):
    rc, out, _ = run(capsys, "falsify", "--q", "2", "--omega", "2,4", "--restarts", "200")
    assert rc == 0
    assert json.loads(out)["best_size"] <= 77


def test_identity(capsys):
    rc, out, _ = run(capsys, "identity")
    assert rc == 0
    assert all(r["equal"] for r in json.loads(out)["identity"])


def test_heavy_solid(capsys):
    rc, out, _ = run(capsys, "heavy-solid", "--q", "3", "--P1", "[[1,0,0,0,0]]", "--P2", "[[0,1,0,0,0]]",
                     "--P3", "[[0,0,1,0,0]]", "--m", "5", "--lines-n", "9", "--d", "0.25")
    doc = json.loads(out)
    assert rc == 0 and doc["satisfiable_at_this_q"] is False
