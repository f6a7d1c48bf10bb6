import io
import json
import os
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

from mbmlat.cli import run

GOLDEN_DIR = Path(__file__).parent / "golden"

# the golden suite: every subcommand, every output format in use
GOLDEN_COMMANDS = [
    ("info_k3.json", ["info", "--lattice", "K3"]),
    ("info_ua.txt", ["info", "--lattice", "U+A1m2", "--format", "text"]),
    ("enumerate_e8_roots.json", ["enumerate", "--lattice", "E8m1", "--min-square", "-2"]),
    ("enumerate_box.json", ["enumerate", "--lattice", "U+A1m2", "--square", "-2", "--box", "1"]),
    ("separate.json", ["separate", "--lattice", "U+A1m2", "--v0", "1,1,0", "--v1", "3,2,2", "--squares", "-2"]),
    ("reduce.json", ["reduce", "--lattice", "U+A1m2", "--v", "3,2,2", "--base", "1,1,0", "--squares", "-2"]),
    ("facets.json", ["facets", "--lattice", "U+A1m2", "--witness", "5,3,2", "--squares", "-2",
                     "--search-bound", "24"]),
    ("flag.json", ["flag", "--lattice", "U+A1m2+A1m2", "--chain", "0,0,1,0;0,0,0,1", "--squares", "-2"]),
    ("explore_d2.json", ["explore", "--lattice", "U+A1m2", "--base", "5,3,2", "--squares", "-2",
                         "--depth", "2"]),
    ("explore_d1.dot", ["explore", "--lattice", "U+A1m2", "--base", "5,3,2", "--squares", "-2",
                        "--depth", "1", "--format", "dot"]),
    ("orbits.json", ["orbits", "--lattice", "U+A1m2", "--v", "0,0,1", "--reflections", "0,0,1;1,-1,0"]),
    ("kneser.json", ["kneser", "--lattice", "Z0+A1m2", "--r", "-8", "--base-reps", "0,2"]),
    ("census_d3.txt", ["census", "--lattice", "U+A1m2", "--base", "5,3,2", "--squares", "-2",
                       "--depth", "3", "--format", "text"]),
    ("census_d2.json", ["census", "--lattice", "U+A1m2", "--base", "5,3,2", "--squares", "-2",
                        "--depth", "2"]),
    ("validate_catalog.txt", ["validate-catalog", "--format", "text"]),
]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = run(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("fname,argv", GOLDEN_COMMANDS, ids=[f for f, _ in GOLDEN_COMMANDS])
def test_golden(fname, argv):
    code, out, err = invoke(argv)
    assert code == 0, err
    path = GOLDEN_DIR / fname
    if os.environ.get("GOLDEN_REGEN"):
        path.write_text(out)
    assert path.exists(), f"golden file {fname} missing; run with GOLDEN_REGEN=1"
    assert out == path.read_text()


def test_repeat_runs_byte_identical():
    for _, argv in GOLDEN_COMMANDS:
        c1, o1, _ = invoke(argv)
        c2, o2, _ = invoke(argv)
        assert c1 == c2 == 0
        assert o1 == o2


def test_thread_flag_does_not_change_bytes():
    for _, argv in GOLDEN_COMMANDS[:6]:
        _, o1, _ = invoke(["--threads", "1"] + argv)
        _, o4, _ = invoke(["--threads", "4"] + argv)
        assert o1 == o4


def test_json_outputs_reparse():
    for fname, argv in GOLDEN_COMMANDS:
        if not fname.endswith(".json"):
            continue
        _, out, _ = invoke(argv)
        json.loads(out)


def test_domain_error_exit_code_and_stderr():
    code, out, err = invoke(["info", "--lattice", "NO_SUCH_ENTRY"])
    assert code == 1
    assert out == ""
    payload = json.loads(err)
    assert payload["error"] == "CatalogError"
    assert "NO_SUCH_ENTRY" in payload["message"]


def test_wall_incidence_error_is_domain_error():
    code, _, err = invoke(["explore", "--lattice", "U+A1m2", "--base", "1,1,0",
                           "--squares", "-2", "--depth", "1"])
    assert code == 1
    assert json.loads(err)["error"] == "WallIncidenceError"


def test_usage_error_exit_code():
    code, _, _ = invoke(["no-such-command"])
    assert code == 2
    code, _, _ = invoke(["separate", "--lattice", "U"])  # missing required args
    assert code == 2
    code, _, _ = invoke(["--threads", "0", "info", "--lattice", "U"])
    assert code == 2


def test_enumerate_mode_conflict_is_domain_error():
    code, _, err = invoke(["enumerate", "--lattice", "U", "--min-square", "-2", "--square", "-2"])
    assert code == 1
    assert json.loads(err)["error"] == "ValidationError"


def test_lattice_from_file(tmp_path):
    p = tmp_path / "lat.json"
    p.write_text(json.dumps({"name": "mine", "gram": [[0, 1], [1, 0]]}))
    code, out, _ = invoke(["info", "--lattice", str(p)])
    assert code == 0
    assert json.loads(out)["signature"] == [1, 1]


def test_catalog_env_override(tmp_path, monkeypatch):
    p = tmp_path / "cat.json"
    p.write_text(json.dumps([{
        "name": "ONLY", "gram": [[2]], "signature": [1, 0], "discriminant": 2,
        "fujiki_constant": "unknown", "mbm_square_bound": -2, "notes": "",
    }]))
    monkeypatch.setenv("MBM_CATALOG_PATH", str(p))
    code, out, _ = invoke(["validate-catalog"])
    assert code == 0
    assert [e["name"] for e in json.loads(out)] == ["ONLY"]


def test_generator_file_input(tmp_path):
    gens = [[[1, 0, 0], [0, 1, 0], [0, 0, -1]]]
    p = tmp_path / "gens.json"
    p.write_text(json.dumps(gens))
    code, out, _ = invoke(["orbits", "--lattice", "U+A1m2", "--v", "0,0,1",
                           "--generators", str(p)])
    assert code == 0
    assert json.loads(out)["representative"] == [0, 0, -1]


def test_rational_witness_accepted():
    code, out, _ = invoke(["separate", "--lattice", "U+A1m2", "--v0", "1,1,0",
                           "--v1", "3/2,1,1", "--squares", "-2"])
    assert code == 0
    assert json.loads(out) == [[0, 1, 1], [1, 0, 1]]
