import json
import os

import pytest

from daha_opuc import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_envelope(capsys):
    code, out, _ = run(capsys, "daha", "verify", "--check", "derivation")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == 1 and doc["command"] == "daha verify"
    assert doc["params"]["beta"] == [0.6, 0.5, -0.5, -0.4]
    assert doc["result"]["passed"]


def test_csv_table(capsys):
    code, out, _ = run(capsys, "daha", "coeffs", "--n", "6", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# schema=1") and lines[1].startswith("# params=")
    assert lines[2] == "n,a_n,r_n,alpha_n,rho_n,z_n"
    assert float(lines[3].split(",")[1]) == pytest.approx(-53 / 235)
    assert len(lines) == 3 + 6


def test_exit_codes(capsys):
    assert run(capsys, "daha", "verify", "--check", "product", "--n", "8")[0] == 2
    assert run(capsys, "algebra", "casimir")[0] == 2
    assert run(capsys, "algebra", "casimir", "--mode", "free", "--q", "0.64")[0] == 0
    # a tolerance nobody can meet turns a pass into a failed check
    assert run(capsys, "daha", "verify", "--check", "derivation", "--tol", "1e-30")[0] == 1
    assert run(capsys, "trunc", "solve", "--kind", "g")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["daha", "build", "--which", "R1", "--n", "3"])
    assert exc.value.code == 2


def test_outdir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path))
    assert cli.main(["trunc", "spectrum", "--m", "2", "--format", "csv", "--out", "spec.csv"]) == 0
    text = (tmp_path / "spec.csv").read_text()
    assert "theta_s,rho_s" in text
    assert capsys.readouterr().out == ""
    assert not [f for f in os.listdir(tmp_path) if f.startswith(".tmp-")]


@pytest.mark.parametrize("argv", [
    ["daha", "build", "--which", "T3", "--n", "8"],
    ["opuc", "phi", "--n", "3", "--at", "0.6,0.8"],
    ["opuc", "cmv", "--check"],
    ["interval", "rec", "--family", "s3"],
    ["interval", "check", "--identity", "ss-ct"],
    ["interval", "check", "--identity", "s3-ct"],
    ["interval", "check", "--identity", "split"],
    ["aw", "eval", "--x", "0.1", "0.2", "--n", "3"],
    ["aw", "identify", "--family", "q2", "--nmax", "6", "--samples", "5"],
    ["aw", "spectrum"],
    ["algebra", "xy"],
    ["algebra", "fit", "--sector", "odd"],
    ["algebra", "central"],
    ["trunc", "orth", "--kind", "even:2,4", "--m", "2"],
    ["plot", "coefficients", "--mode", "free", "--q", "0.5"],
    ["plot", "nodes", "--n", "8"],
    ["plot", "spectrum", "--m", "3"],
    ["suite", "--preset", "truncation"],
])
def test_commands(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    assert out


def test_params_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"beta": [0.3, 0.6, -0.2, -0.8], "q": 0.6}))
    code, out, _ = run(capsys, "daha", "verify", "--check", "involution", "--params", str(f))
    assert code == 0
    assert json.loads(out)["params"]["q"] == 0.6
