import io
import json
import subprocess
import sys

import pytest

from zerosum import GroupSpec, verify_family
from zerosum.cli import run
from zerosum.partition import family_from_json, parse_annex


def call(argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = run(argv, out=out)
    return code, out.getvalue()


def test_partition_annex():
    code, text = call(["partition", "--group", "Z4xZ2^2", "--sizes", "3,3,4,5"])
    assert code == 0
    blocks = parse_annex(text)
    g = GroupSpec((4, 2, 2))
    assert verify_family(g, blocks[0].family(g), expected_sizes=[3, 3, 4, 5]).ok


def test_partition_json_and_trace(tmp_path):
    trace = tmp_path / "trace.json"
    code, text = call(["partition", "--group", "Z2^8", "--triple", "5,0,48", "--format", "json", "--trace", str(trace)])
    assert code == 0
    fam = family_from_json(text)
    assert verify_family(fam.group, fam).ok
    assert json.loads(trace.read_text())[0]["node"] == "elementary"


def test_partition_cyclic_is_negative():
    assert call(["partition", "--group", "Z8", "--sizes", "3,4"])[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["partition", "--group", "Z4xZ2", "--sizes", "3,4", "--triple", "1,1,0"],
        ["partition", "--group", "Z4xZ2", "--sizes", "3,3"],
        ["partition", "--group", "Q8", "--sizes", "3,4"],
        ["partition", "--group", "Z4xZ2"],
        ["partition", "--group", "Z64xZ32", "--triple", "682,1,0"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors(argv):
    assert call(argv)[0] == 2


def test_verify_roundtrip(tmp_path, monkeypatch):
    _, text = call(["partition", "--group", "Z4xZ2^2", "--sizes", "3,3,4,5"])
    path = tmp_path / "star.txt"
    path.write_text(text)
    code, out = call(["verify", "--group", "Z4xZ2^2", "--sizes", "3,3,4,5", "--input", str(path)])
    assert code == 0 and out.startswith("ok")
    code, out = call(["verify", "--group", "Z4xZ2^2", "--target", "0"], stdin=text, monkeypatch=monkeypatch)
    assert code == 0


def test_verify_cyclic_diagnostic(monkeypatch):
    star = "(1), (7)\n(2), (6)\n(3), (4), (5)\nA partition for sets of sizes: 3*2 1*3\n"
    code, out = call(["verify", "--group", "Z8", "--target", "0"], stdin=star, monkeypatch=monkeypatch)
    assert code == 1
    assert "unique involution" in out and "(4)" in out


def test_verify_detects_tampering(monkeypatch):
    _, text = call(["partition", "--group", "Z4xZ2^2", "--sizes", "3,3,4,5"])
    lines = text.splitlines()
    lines[0] += ", (0, 0, 0)"
    code, out = call(["verify", "--group", "Z4xZ2^2"], stdin="\n".join(lines) + "\n", monkeypatch=monkeypatch)
    assert code == 1 and "outside-ground" in out


def test_search_command():
    code, text = call(["search", "--group", "Z2^4", "--triple", "0,0,3", "--seed", "4"])
    assert code == 0
    assert parse_annex(text)[0].triple == (0, 0, 3)
    assert call(["search", "--group", "Z8", "--sizes", "3,4"])[0] == 1
    assert call(["search", "--group", "Z2^6", "--sizes", "3," * 20 + "3", "--budget", "3"])[0] in (0, 3)


def test_tables_commands(tmp_path):
    code, out = call(["--cache-dir", str(tmp_path), "tables", "check"])
    assert code == 0 and "0 failing" in out
    dest = tmp_path / "table.txt"
    code, out = call(["--cache-dir", str(tmp_path), "tables", "gen", "--group", "Z2^4", "--output", str(dest)])
    assert code == 0 and "Z2^4*" in out
    assert [b.triple for b in parse_annex(dest.read_text())] == [(5, 0, 0), (1, 3, 0), (2, 1, 1), (0, 0, 3)]
    assert call(["--cache-dir", str(tmp_path), "tables", "gen", "--group", "Z8"])[0] == 1


def test_label_commands(tmp_path):
    code, out = call(["label", "dmagic", "--group", "Z2^3", "--classes", "3,5"])
    assert code == 0 and len(out.splitlines()) == 8
    tree = tmp_path / "t.txt"
    tree.write_text("tree 8\n" + "".join(f"{v} 0\n" for v in range(1, 8)))
    assert call(["label", "tree", "--group", "Z4xZ2", "--graph", str(tree), "--format", "json"])[0] == 0
    dg = tmp_path / "d.txt"
    dg.write_text("digraph 3\n0 1\n1 2\n2 0\n")
    assert call(["label", "digraph", "--group", "Z2^2", "--graph", str(dg)])[0] == 0
    assert call(["label", "digraph", "--group", "Z8", "--graph", str(dg)])[0] == 1
    assert call(["label", "tree", "--group", "Z2^3", "--graph", str(dg)])[0] == 2


def test_explore_command():
    code, out = call(["explore", "constant-sum", "--group", "Z16", "--sizes", "1,2,2,3,7"])
    assert code == 0 and out.startswith("found: common sum")
    code, out = call(["explore", "constant-sum", "--group", "Z2^3", "--sizes", "3,2,2"])
    assert code == 1 and out.startswith("counterexample")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zerosum", "partition", "--group", "Z2^3", "--sizes", "3,4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1].startswith("A partition for sets of sizes:")
