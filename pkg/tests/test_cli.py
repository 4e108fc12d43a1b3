import json
import subprocess
import sys

import pytest

from salvetti.cli import ingest_arrangement, InputError, main


def run(tmp_path, *argv, name="out.txt"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_salvetti_braid3(tmp_path):
    code, text = run(tmp_path, "salvetti", "--input", "braid:3", "--ell", "1", name="sal.json")
    assert code == 0
    data = json.loads(text)
    assert data["n_cells"] == 24
    assert data["f_vector"] == [6, 12, 6]
    assert data["boundary_squared_zero"] and data["embedding_avoids_hyperplanes"]
    assert data["meta"]["version"] and data["meta"]["conventions"]["braid_normals"].startswith("e_i - e_j")
    assert len(data["vertices"]) == 24


def test_homology_braid2(tmp_path):
    code, text = run(tmp_path, "homology", "--input", "braid:2", "--ell", "1")
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# {")
    cell = lines[lines.index("# cellular") + 1: lines.index("# simplicial")]
    assert cell == ["degree,betti,torsion", "0,1,", "1,1,"]


def test_homology_field_and_skip(tmp_path):
    code, text = run(tmp_path, "homology", "--input", "braid:3", "--coeff", "Fp:3", "--no-simplicial")
    assert code == 0
    assert "# simplicial" not in text
    assert "2,2," in text


def test_verify_reports_pass(tmp_path):
    code, text = run(tmp_path, "verify", "--input", "braid:3", "--ell", "2", "--seed", "7")
    assert code == 0
    assert "verification passed" in text
    assert "FAIL" not in text
    assert "NOTE" in text  # level-permutation finding


def test_faces_and_filtration(tmp_path):
    code, text = run(tmp_path, "faces", "--input", "braid:3")
    data = json.loads(text)
    assert code == 0 and len(data["covectors"]["vectors"]) == 13 and len(data["cocircuits"]) == 6
    assert len(data["circuits"]["vectors"]) == 2
    code, text = run(tmp_path, "filtration", "--input", "braid:3")
    assert code == 0
    assert [s["cells"] for s in json.loads(text)["stages"]] == [6, 18, 24]


def test_pages_and_symbols(tmp_path):
    code, text = run(tmp_path, "pages", "--coeffs", "0", "--k-max", "3")
    assert code == 0
    blocks = json.loads(text)["blocks"]
    e2 = {}
    for row in blocks[2]["E2"]:
        e2[row["s"]] = e2.get(row["s"], 0) + row["dim"]
    assert e2 == {3: 1, 2: 1, 1: 0}
    code, text = run(tmp_path, "symbols", "--k", "3")
    assert code == 0 and text.count("┌") >= 24


def test_json_input(tmp_path):
    f = tmp_path / "arr.json"
    f.write_text('{"dim": 2, "normals": [["1", "0"], ["0", "1"], ["1/3", "1"]]}')
    code, text = run(tmp_path, "homology", "--input", str(f))
    assert code == 0
    assert "1,3," in text  # three lines through the origin in C^2: b1 = 3
    assert ingest_arrangement(str(f)).normals[2][0].denominator == 3


def test_deterministic_output(tmp_path):
    _, a = run(tmp_path, "salvetti", "--input", "braid:3", name="a.json")
    _, b = run(tmp_path, "salvetti", "--input", "braid:3", name="b.json")
    assert a == b


@pytest.mark.parametrize("argv", [
    ["homology", "--coeff", "Fp:4"],
    ["salvetti", "--input", "braid:9"],
    ["salvetti", "--ell", "4"],
    ["pages", "--coeff", "Z"],
    ["pages", "--k-max", "7"],
    ["pages", "--coeffs", "x"],
    ["symbols", "--k", "6"],
    ["filtration", "--input", "missing.json"],
    ["bogus"],
])
def test_input_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_bad_json_files(tmp_path):
    f = tmp_path / "zero.json"
    f.write_text('{"dim": 2, "normals": [["0", "0"]]}')
    assert main(["faces", "--input", str(f)]) == 2
    f.write_text('{"dim": 2, "normals": [')
    assert main(["faces", "--input", str(f)]) == 2
    f.write_text(json.dumps({"dim": 1, "normals": [["1"]] * 16}))
    with pytest.raises(InputError):
        ingest_arrangement(str(f))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "salvetti.cli", "homology", "--input", "braid:2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "1,1," in res.stdout
