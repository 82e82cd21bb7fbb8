import json
import subprocess
import sys

import pytest

from mantlelab.cli import main
from mantlelab.welding import NeretinElement, multiply


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


F = {"a": ["1/2", "0"], "b": ["1/8", "0"], "c": ["0", "0"], "d": ["1", "0"]}


def test_envelope_and_mobius(tmp_path, capsys):
    f = write(tmp_path, "f.json", F)
    code, out, _ = run(capsys, "mobius", "compose", f, f)
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "1" and doc["command"] == "mobius compose"
    # (z/2 + 1/8) composed with itself: z/4 + 3/16
    assert doc["result"]["composite"] == {"a": ["1", "0"], "b": ["3/4", "0"], "c": ["0", "0"], "d": ["4", "0"]}
    assert doc["result"]["strict"]


def test_table_flags_exit_one(capsys):
    code, out, _ = run(capsys, "algebra", "table")
    assert code == 1 and json.loads(out)["result"]["flags"] == 16


def test_cocycle_and_roots(capsys):
    _, out, _ = run(capsys, "algebra", "cocycle", "e3", "e-3")
    assert json.loads(out)["result"]["coefficient_of_2pi"] == ["0", "-27"]
    _, out, _ = run(capsys, "verma", "roots", "--c", "1/2")
    assert json.loads(out)["result"]["roots"] == ["0", "1/16", "1/2"]


def test_parse_error_reports_position(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", '{"a": 1,\n  "b": }')
    code, out, err = run(capsys, "mobius", "check", bad)
    assert code == 2 and out == ""
    msg = json.loads(err)["message"]
    assert msg.startswith(f"{bad}:2:8:")


def test_bad_arguments_exit_two(tmp_path, capsys):
    assert run(capsys, "qpft", "primary", "1", "1")[0] == 2
    assert run(capsys, "qpft", "axioms", "--h", "1/2")[0] == 2
    word = write(tmp_path, "w.json", ["trinion", "trinion"])
    code, _, err = run(capsys, "train", "genus", word)
    assert code == 2 and "[1]" in json.loads(err)["message"]


def test_weld_round_trip(tmp_path, capsys):
    paths = []
    for seed in (1, 2):
        code, out, _ = run(capsys, "weld", "random", "--seed", str(seed))
        assert code == 0
        paths.append(write(tmp_path, f"e{seed}.json", out))
    code, out, _ = run(capsys, "weld", "mul", *paths)
    assert code == 0
    got = NeretinElement.from_json(json.loads(out)["result"])
    a, b = (NeretinElement.from_json(json.loads(open(p).read())["result"]) for p in paths)
    assert got.distance(multiply(a, b)) == 0


def test_train_commands(tmp_path, capsys):
    veil = write(tmp_path, "veil.json", ["antitrinion", {"perm": [1, 0]}, "trinion"])
    _, out, _ = run(capsys, "train", "genus", veil)
    assert json.loads(out)["result"]["genus"] == 1
    functor = write(tmp_path, "F.json", {"N": 3, "exact": True, "annuli": {"a": {"lam": "1/2", "c": "1/4"}, "b": {"mobius": F | {"b": ["0", "0"], "c": ["-1/5", "0"]}}}})
    a, b = write(tmp_path, "a.json", ["annulus:a"]), write(tmp_path, "b.json", ["annulus:b"])
    code, out, _ = run(capsys, "train", "defect", a, b, "--functor", functor)
    assert code == 0 and json.loads(out)["result"]["defect"]["exact_zero"]


def test_same_seed_same_bytes(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        code = main(["conformance", "--only", "mobius", "algebra", "--seed", "3", "--out", str(path)])
        assert code == 1
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["summary"]["flags"] == ["algebra.table.hc", "algebra.table.sc"]
    assert not doc["summary"]["failures"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mantlelab.cli", "verma", "gram", "--algebra", "sl2", "--h", "3/2", "--level", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["gram"] == [["3"]]


@pytest.mark.parametrize("argv", [["nosuch"], ["verma", "gram", "--h", "x"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
