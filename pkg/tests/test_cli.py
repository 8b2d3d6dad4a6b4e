import csv
import io

import pytest

from qmc.cli import main
from qmc.codes import read_codeword
from qmc.gf import build_tower
from qmc.poly import random_poly, to_text

F13 = build_tower(13)
UNI_FLAGS = ["--p", "13", "--m", "1", "--s", "6", "--k", "12", "--A-size", "12"]


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_params_report(capsys):
    code, out, _ = _run(capsys, ["params", *UNI_FLAGS])
    assert code == 0
    assert "r=2 d=16 T_min=6" in out
    assert "block_size=6" in out and "[3]_q=183" in out
    code, out, _ = _run(capsys, ["params", "--p", "2", "--e", "2", "--m", "1", "--s", "3",
                                 "--k", "3", "--A-size", "3"])
    assert code == 0 and "distance_lb=7/9" in out


def test_params_regime_violation(capsys):
    code, _, err = _run(capsys, ["params", "--p", "13", "--m", "1", "--s", "14", "--k", "3",
                                 "--A-size", "3"])
    assert code == 2 and "s ≤ q required" in err
    code, _, _ = _run(capsys, ["params", "--p", "3", "--m", "1", "--s", "2", "--k", "2",
                               "--A-size", "2"])
    assert code == 2


def test_round_trip(tmp_path, capsys):
    f = random_poly(F13, 1, 12, 3)
    msg = tmp_path / "msg.txt"
    msg.write_text(F13.header() + "\n" + to_text(f) + "\n")
    cw, bad, res = tmp_path / "cw.txt", tmp_path / "bad.txt", tmp_path / "res.txt"
    assert main(["encode", "--in", str(msg), "--out", str(cw), *UNI_FLAGS[2:]]) == 0
    assert main(["corrupt", "--in", str(cw), "--out", str(bad), "--errors", "0"]) == 0
    assert bad.read_text() == cw.read_text()
    assert main(["decode", "--in", str(bad), "--out", str(res), "--r", "2"]) == 0
    text = res.read_text()
    assert f"agreement=12 {to_text(f)}" in text
    # five errors, still recovered
    assert main(["corrupt", "--in", str(cw), "--out", str(bad), "--errors", "5",
                 "--seed", "4"]) == 0
    w = read_codeword(bad.read_text())
    assert sum(1 for a, b in zip(w.data.tolist(), read_codeword(cw.read_text()).data.tolist())
               if a != b) == 5
    assert main(["decode", "--in", str(bad), "--out", str(res), "--r", "2"]) == 0
    assert to_text(f) in res.read_text()


def test_message_without_header_needs_tower(tmp_path):
    msg = tmp_path / "msg.txt"
    msg.write_text(to_text(random_poly(F13, 1, 4, 0)) + "\n")
    out = tmp_path / "cw.txt"
    assert main(["encode", "--in", str(msg), "--out", str(out), "--m", "1", "--s", "2",
                 "--k", "4", "--A-size", "3"]) == 2
    assert main(["encode", "--in", str(msg), "--out", str(out), "--p", "13", "--m", "1",
                 "--s", "2", "--k", "4", "--A-size", "3", "--code", "frm"]) == 0
    assert "code=frm" in out.read_text()


def test_determinism(tmp_path):
    msg = tmp_path / "msg.txt"
    msg.write_text(F13.header() + "\n" + to_text(random_poly(F13, 1, 12, 5)) + "\n")
    outs = []
    for i in range(2):
        cw, bad, res = (tmp_path / f"{n}{i}.txt" for n in ("cw", "bad", "res"))
        main(["encode", "--in", str(msg), "--out", str(cw), *UNI_FLAGS[2:]])
        main(["corrupt", "--in", str(cw), "--out", str(bad), "--errors", "4", "--seed", "9"])
        main(["decode", "--in", str(bad), "--out", str(res), "--r", "2"])
        outs.append([p.read_bytes() for p in (cw, bad, res)])
    assert outs[0] == outs[1]


def test_malformed_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("QMC1 p=13 e=1 fqmod=0,1 kmod=2,0,0,1 Q=15\nparams m=1 s=2 k=2 A=1,2\n0: 1\n")
    assert main(["decode", "--in", str(bad), "--r", "1"]) == 3
    assert main(["decode", "--in", str(tmp_path / "missing.txt"), "--r", "1"]) == 3
    msg = tmp_path / "msg.txt"
    msg.write_text("not a polynomial\n")
    assert main(["encode", "--in", str(msg), "--p", "13", *UNI_FLAGS[2:]]) == 3
    cw = tmp_path / "cw.txt"
    msg.write_text(to_text(random_poly(F13, 1, 4, 0)) + "\n")
    main(["encode", "--in", str(msg), "--out", str(cw), "--p", "13", "--m", "1", "--s", "2",
          "--k", "4", "--A-size", "3"])
    assert main(["corrupt", "--in", str(cw), "--errors", "3"]) == 2
    capsys.readouterr()


def test_experiment(tmp_path, capsys):
    out = tmp_path / "exp.csv"
    argv = ["experiment", *UNI_FLAGS, "--r", "2", "--errors", "5", "--trials", "50",
            "--seed", "1", "--out", str(out)]
    code, stdout, _ = _run(capsys, argv)
    assert code == 0 and "success_rate=50/50" in stdout
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 50
    assert all(r["success"] == "1" and r["agreement"] == "7" for r in rows)
    assert [r["trial_seed"] for r in rows[:3]] == ["1", "2", "3"]
    first = out.read_bytes()
    _run(capsys, argv)
    assert out.read_bytes() == first


def test_selftest(capsys):
    code, out, _ = _run(capsys, ["selftest"])
    assert code == 0
    assert out.count(": pass") == 7


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
