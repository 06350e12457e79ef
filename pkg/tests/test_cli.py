import json
import subprocess
import sys

import pytest

from spldp.cli import main

from conftest import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_round_trips(capsys):
    code, out, _ = run(capsys, "parse", DATA / "gcd.spl")
    assert code == 0 and out.startswith("while x >= 1")


def test_decompose_shape(capsys):
    code, out, _ = run(capsys, "decompose", DATA / "gcd.spl")
    assert out.strip() == "Loop(Parallel(Series(A_ε, A_break), Series(A_ε, A_continue)))"


def test_decompose_json_is_an_instance_skeleton(capsys):
    _, out, _ = run(capsys, "decompose", DATA / "gcd.spl", "--json")
    data = json.loads(out)
    assert len(data["vertices"]) == 10 and "decomposition" in data


def test_cfg_listing_and_dot(capsys):
    _, out, _ = run(capsys, "cfg", DATA / "gcd.spl")
    assert "|V|=10 |E|=9" in out
    _, dot, _ = run(capsys, "cfg", DATA / "gcd.spl", "--dot")
    assert dot.startswith("digraph")


def test_regalloc(capsys):
    code, out, _ = run(capsys, "regalloc", DATA / "six_vars.spl", "--json")
    data = json.loads(out)
    assert code == 0 and data["min_registers"] == 4 and len(data["interference"]) == 10
    code, out, _ = run(capsys, "regalloc", DATA / "six_vars.spl", "--registers", 3, "--json")
    assert json.loads(out)["cost"] == 1
    code, _, _ = run(capsys, "regalloc", DATA / "six_vars.spl", "--registers", 3, "--spill-free")
    assert code == 3
    code, out, _ = run(capsys, "regalloc", DATA / "six_vars.spl", "--max-regs", 2)
    assert code == 3 and "more than 2" in out


def test_lospre_from_instance_and_program(capsys):
    code, out, _ = run(capsys, "lospre", "--instance", DATA / "lospre_diamond.json", "--json")
    data = json.loads(out)
    assert data["cost"] == [2, 2] and data["life"] == [2, 3]
    code, out, _ = run(capsys, "lospre", DATA / "redundant.spl", "--expr", "a + b")
    assert code == 0 and "cost: 2" in out


def test_bankselect(capsys):
    code, out, _ = run(capsys, "bankselect", "--instance", DATA / "bank_path.json")
    assert code == 0 and "cost: 3" in out and "(selecting before every use: 6)" in out


@pytest.mark.parametrize("cmd", ["pcsp", "oracle"])
def test_pcsp_and_oracle_agree(capsys, cmd):
    for name, cost in (("lospre_diamond.json", [2, 2]), ("bank_path.json", 3), ("minimal.json", 0)):
        code, out, _ = run(capsys, cmd, "--instance", DATA / name, "--json")
        assert code == 0 and json.loads(out)["cost"] == cost


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--shape", "wide-ifs", "--sizes", 4, 8, "--repeat", 1)
    lines = out.strip().split("\n")
    assert code == 0 and len(lines) == 3 and lines[0].startswith("shape\tsize")


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "parse", tmp_path / "missing.spl")[0] == 1
    assert run(capsys, "lospre", "--expr", "a")[0] == 1
    assert run(capsys, "bogus")[0] == 1
    bad = tmp_path / "bad.spl"
    bad.write_text("x = = 1")
    code, _, err = run(capsys, "parse", bad)
    assert code == 2 and "1:5" in err
    code, _, err = run(capsys, "oracle", "--instance", DATA / "bank_path.json", "--limit", 1)
    assert code == 2 and "exceed" in err
    infeasible = tmp_path / "inf.json"
    infeasible.write_text(json.dumps({"vertices": ["s", "t"], "edges": [["s", "t"]], "domains": [0],
                                      "edge_costs": {"default": "inf"}}))
    assert run(capsys, "pcsp", "--instance", infeasible)[0] == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spldp", "decompose", str(DATA / "gcd.spl")],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("Loop(")
