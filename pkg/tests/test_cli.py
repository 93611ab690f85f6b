import json
import subprocess
import sys

import pytest

from infotop.cli import run
from infotop.fixtures import fixture_discrete_pair, fixture_hellwig, fixture_sgn
from infotop.io import dumps, measure_to_doc
from infotop.measure import DiscreteMeasure, FiniteMetricSpace, ProductSpace


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(dumps(doc))
    return str(path)


@pytest.fixture
def pair_files(tmp_path):
    mu_n, nu_n, _, _ = fixture_discrete_pair(2)
    return write(tmp_path, "mu.json", measure_to_doc(mu_n)), write(tmp_path, "nu.json", measure_to_doc(nu_n))


def test_fixture_hellwig(capsys):
    assert run(["fixture", "hellwig"]) == 0
    assert capsys.readouterr().out.splitlines() == ["lhs=0.25", "rhs=0"]


def test_dist_tv_self(capsys, pair_files):
    mu, _ = pair_files
    assert run(["dist", "--metric", "tv", mu, mu]) == 0
    assert capsys.readouterr().out.strip() == "0"


@pytest.mark.parametrize("metric, expected", [("w1", 2 / 3), ("info", 2 / 3)])
def test_dist_values(capsys, tmp_path, metric, expected):
    mu_n, mu_0 = fixture_sgn(3)
    a = write(tmp_path, "a.json", measure_to_doc(mu_n))
    b = write(tmp_path, "b.json", measure_to_doc(mu_0))
    if metric == "info":
        from infotop.measure import marginal
        a = write(tmp_path, "a2.json", measure_to_doc(marginal(mu_n, ("A", "B"))))
        b = write(tmp_path, "b2.json", measure_to_doc(marginal(mu_0, ("A", "B"))))
        expected = 0.25 + 1 / 3
    assert run(["dist", "--metric", metric, a, b]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(expected, abs=1e-11)


def test_phi_inconsistent(capsys, tmp_path):
    A = FiniteMetricSpace("A", ["a1", "a2"])
    B = FiniteMetricSpace("B", ["b1"])
    C = FiniteMetricSpace("C", ["c1"])
    mu = DiscreteMeasure(ProductSpace([A, B]), {("a1", "b1"): 0.5, ("a2", "b1"): 0.5})
    nu = DiscreteMeasure(ProductSpace([A, C]), {("a1", "c1"): 0.8, ("a2", "c1"): 0.2})
    code = run(["phi", write(tmp_path, "mu.json", measure_to_doc(mu)), write(tmp_path, "nu.json", measure_to_doc(nu))])
    assert code == 3
    err = capsys.readouterr().err
    assert "gap=0.6" in err and "A" in err


def test_phi_output(capsys, pair_files):
    assert run(["phi", *pair_files]) == 0
    doc = json.loads(capsys.readouterr().out)
    atoms = {tuple(a["point"]): a["weight"] for a in doc["atoms"]}
    assert atoms == {("0.5", "b_lo", "c_lo"): 0.5, ("0.0", "b_hi", "c_hi"): 0.5}


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"spaces": [\n  {"name": "A",, }\n]}')
    assert run(["dist", "--metric", "tv", str(bad), str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err and "bad.json" in err


def test_invalid_measure(capsys, tmp_path):
    doc = {"spaces": [{"name": "A", "points": ["x", "y"]}], "atoms": [{"point": ["x"], "weight": 0.7}]}
    assert run(["dist", "--metric", "tv", write(tmp_path, "m.json", doc), write(tmp_path, "n.json", doc)]) == 2
    assert "sum" in capsys.readouterr().err


def test_missing_file(capsys, tmp_path):
    assert run(["condind", str(tmp_path / "nope.json"), "--given", "A", "--b", "B", "--c", "C"]) == 2


def test_unknown_flag():
    with pytest.raises(SystemExit) as exc:
        run(["dist", "--metric", "tv", "--bogus", "a", "b"])
    assert exc.value.code == 2


def test_lift_glue_condind(capsys, tmp_path):
    mu0 = fixture_sgn(1)[1]
    path = write(tmp_path, "mu0.json", measure_to_doc(mu0))
    assert run(["condind", path, "--given", "A", "--b", "B", "--c", "C"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    rec = fixture_hellwig()
    nu = write(tmp_path, "nu.json", measure_to_doc(rec.nu))
    assert run(["lift", nu]) == 0
    lifted = json.loads(capsys.readouterr().out)
    assert len(lifted["atoms"]) == 2 and lifted["functional"] is True
    mu = write(tmp_path, "mu.json", measure_to_doc(rec.mu))
    assert run(["glue", nu, mu, "--shared", "A"]) == 0
    glued = json.loads(capsys.readouterr().out)
    assert [s["name"] for s in glued["spaces"]] == ["B", "A", "C"]


def test_solve(capsys, tmp_path):
    A = FiniteMetricSpace("A", ["a1", "a2"])
    B = FiniteMetricSpace("B", ["b1", "b2"])
    prior = DiscreteMeasure(ProductSpace([A, B]), {(a, b): 0.25 for a in A.ids for b in B.ids})
    gamma = {"a1": "c2", "a2": "c1"}
    cost = [{"point": [a, b, c], "value": float(c != gamma[a])} for a in A.ids for b in B.ids for c in ("c1", "c2")]
    path = write(tmp_path, "p.json", {"prior": measure_to_doc(prior), "cost": cost})
    for method in ("decompose", "lp"):
        assert run(["solve", path, "--method", method]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["value"] == 0 and doc["deterministic"] == gamma


def test_fixture_verify(capsys):
    assert run(["fixture", "verify", "jordan", "--cap", "16"]) == 0
    out = capsys.readouterr().out
    assert "MISMATCH" not in out and out.strip().endswith("golden values reproduced")


def test_fixture_output_file(capsys, tmp_path):
    out = tmp_path / "sgn.json"
    assert run(["fixture", "sgn", "--n", "4", "-o", str(out)]) == 0
    assert "w1=0.5" in capsys.readouterr().out
    assert set(json.loads(out.read_text())) == {"mu_n", "mu_0"}


def test_converge_fixture(capsys):
    assert run(["converge", "--fixture", "sgn", "--n", "1:60", "--metrics", "w1,info", "--tol-conv", "0.05"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["report"]["verdicts"] == {"w1": "converging-evidence", "info": "non-converging-evidence"}


def test_converge_bad_metric(capsys):
    assert run(["converge", "--fixture", "sgn", "--metrics", "hellinger"]) == 2
    assert "hellinger" in capsys.readouterr().err


def test_converge_seq_file(capsys, tmp_path):
    mu = fixture_sgn(1)[1]
    doc = {"limit": measure_to_doc(mu), "members": {str(n): measure_to_doc(mu) for n in range(1, 6)}}
    assert run(["converge", "--seq", write(tmp_path, "s.json", doc), "--metrics", "tv,w1"]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    assert rep["verdicts"] == {"tv": "converging-evidence", "w1": "converging-evidence"}


def test_env_tolerance(capsys, tmp_path, monkeypatch):
    A = FiniteMetricSpace("A", ["a1", "a2"])
    B, C = FiniteMetricSpace("B", ["b"]), FiniteMetricSpace("C", ["c"])
    mu = DiscreteMeasure(ProductSpace([A, B]), {("a1", "b"): 0.5, ("a2", "b"): 0.5})
    nu = DiscreteMeasure(ProductSpace([A, C]), {("a1", "c"): 0.5 + 1e-6, ("a2", "c"): 0.5 - 1e-6})
    args = ["phi", write(tmp_path, "mu.json", measure_to_doc(mu)), write(tmp_path, "nu.json", measure_to_doc(nu))]
    assert run(args) == 3
    monkeypatch.setenv("INFOTOP_TOL", "1e-5")
    assert run(args) == 0
    monkeypatch.setenv("INFOTOP_TOL", "abc")
    assert run(args) == 2


def test_byte_identical_stdout(pair_files):
    cmd = [sys.executable, "-m", "infotop.cli", "phi", *pair_files]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
