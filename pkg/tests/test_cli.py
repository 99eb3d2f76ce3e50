import json
import subprocess
import sys

import numpy as np
import pytest

from bbtpolar.cli import main, parse_bits


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_bits():
    assert parse_bits("0101").tolist() == [0, 1, 0, 1]
    assert parse_bits("0x5", 6).tolist() == [0, 0, 0, 1, 0, 1]
    with pytest.raises(ValueError):
        parse_bits("012")
    with pytest.raises(ValueError):
        parse_bits("0xff", 4)


def test_gen_matrix(capsys, tmp_path):
    code, out, _ = run(capsys, "gen-matrix", "--n", "9")
    assert code == 0
    rows = out.split()
    assert len(rows) == 9 and rows[4] == "110110000" and rows[8] == "111101111"
    target = tmp_path / "g.txt"
    run(capsys, "gen-matrix", "--n", "9", "--out", str(target))
    assert target.read_text() == out


def test_construct_json(capsys, tmp_path):
    _, out, _ = run(capsys, "construct", "--n", "6", "--k", "3", "--construction", "pw")
    assert json.loads(out) == {"n": 6, "k": 3, "method": "pw", "active": [3, 4, 5]}
    path = tmp_path / "p.json"
    run(capsys, "construct", "--n", "24", "--k", "10", "--construction", "ga", "--out", str(path))
    d = json.loads(path.read_text())
    assert d["method"] == "ga" and d["design_snr_db"] == 3.0 and len(d["active"]) == 10


def test_encode_worked_example(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"n": 6, "k": 6, "method": "pw", "active": [0, 1, 2, 3, 4, 5]}))
    _, out, _ = run(capsys, "encode", "--profile", str(path), "--data", "010011")
    assert out.strip() == "101011"


def test_encode_decode_roundtrip(capsys):
    _, cw, _ = run(capsys, "encode", "--n", "64", "--k", "32", "--data", "0xdeadbeef")
    cw = cw.strip()
    assert len(cw) == 64
    for extra in ([], ["--list-size", "4"], ["--psc", "--tau", "2"], ["--psc", "--tau", "3", "--list-size", "4"]):
        _, out, _ = run(capsys, "decode", "--n", "64", "--k", "32", "--codeword", cw, "--format", "hex", *extra)
        assert out.strip() == "0xdeadbeef"


def test_crc_decode_reports_status(capsys):
    _, cw, _ = run(capsys, "encode", "--n", "96", "--k", "32", "--crc", "11", "--data", "0xdeadbeef")
    for extra in ([], ["--psc", "--tau", "2"]):
        _, out, err = run(capsys, "decode", "--n", "96", "--k", "32", "--crc", "11", "--list-size", "8", "--codeword", cw.strip(), "--format", "hex", *extra)
        assert out.strip() == "0xdeadbeef" and "crc: pass" in err


def test_decode_from_llrs(capsys, tmp_path):
    _, out, _ = run(capsys, "decode", "--n", "2", "--k", "1", "--llrs", "1.0,-0.3")
    assert out.strip() == "0"
    f = tmp_path / "llr.txt"
    f.write_text("1.0 -1.3\n")
    _, out, _ = run(capsys, "decode", "--n", "2", "--k", "1", "--llr-file", str(f))
    assert out.strip() == "1"


def test_decode_needs_input(capsys):
    with pytest.raises(SystemExit):
        main(["decode", "--n", "8", "--k", "4"])
    with pytest.raises(SystemExit):
        main(["decode", "--n", "8", "--k", "4", "--psc", "--llrs", "1 1 1 1 1 1 1 1"])


def test_simulate_json_and_csv(capsys, tmp_path):
    args = ["simulate", "--n", "48", "--k", "24", "--decoder", "psc", "--tau", "2", "--ebn0", "1.0,2.0", "--max-trials", "500", "--batch-size", "250"]
    _, out, _ = run(capsys, *args)
    d = json.loads(out)
    assert d["config"]["decoder"] == "psc" and len(d["results"]) == 2
    target = tmp_path / "r.csv"
    run(capsys, *args, "--out", str(target))
    lines = target.read_text().splitlines()
    assert lines[0] == "ebn0_db,trials,frame_errors,bit_errors,fer,ber,llr_ops" and len(lines) == 3


def test_simulate_config_error():
    with pytest.raises(SystemExit):
        main(["simulate", "--n", "48", "--k", "24", "--decoder", "psc", "--ebn0", "1.0"])


def test_bounds_csv(capsys):
    _, out, _ = run(capsys, "bounds", "--n", "96", "--k", "48", "--tau", "1", "--ebn0", "2,3")
    lines = out.splitlines()
    assert lines[0] == "ebn0_db,g_ub,b_ub,lb"
    vals = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert vals.shape == (2, 4)
    assert np.all(vals[:, 3] <= vals[:, 1])


def test_analyze_op_count(capsys):
    _, out, _ = run(capsys, "analyze", "--op-count")
    assert out.splitlines() == [
        "decoder,R=1/4,R=1/2,R=3/4",
        "SC,3328,3328,3328",
        "PSC tau=1,1965,2586,3023",
        "PSC tau=2,1674,2322,2778",
        "PSC tau=3,1602,2148,2490",
    ]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "bbtpolar", "gen-matrix", "--n", "2"], capture_output=True, text=True, check=True)
    assert out.stdout == "10\n11\n"
