import subprocess
import sys

import pytest

from prickliness.cli import main
from prickliness.generators import gen_random, gen_theorem4_2d, gen_grid
from prickliness.io import save_terrain, serialize

from conftest import pyramid


@pytest.fixture
def pyr_file(tmp_path):
    p = tmp_path / "pyramid.off"
    save_terrain(pyramid(), p)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prickliness_pyramid(capsys, pyr_file):
    code, out, _ = run(capsys, "prickliness", pyr_file)
    assert code == 0
    assert out.strip() == "pi=1 witness=(0,0,1)"


@pytest.mark.parametrize("algo", ["sweep", "brute"])
def test_prickliness_check_random(capsys, tmp_path, algo):
    p = tmp_path / "r.off"
    save_terrain(gen_random(40, 11), p)
    code, out, _ = run(capsys, "prickliness", "--algo", algo, "--check", p)
    assert code == 0
    assert out.startswith("pi=") and "check=ok" in out


def test_prickliness_1d(capsys, tmp_path):
    p = tmp_path / "peak.txt"
    p.write_text("0 0\n1 1\n2 0\n")
    code, out, _ = run(capsys, "prickliness", "--check", p)
    assert code == 0 and out.startswith("pi=1 ")


def test_validate(capsys, pyr_file, tmp_path):
    code, out, _ = run(capsys, "validate", pyr_file)
    assert code == 0 and "5 vertices" in out
    bad = tmp_path / "bad.off"
    bad.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 q\n3 0 1 2\n")
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and "line 5" in err
    # not monotone: a vertical triangle
    vert = tmp_path / "vert.off"
    vert.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n2 0 1\n3 0 1 2\n")
    code, _, _ = run(capsys, "validate", vert)
    assert code == 1
    code, _, _ = run(capsys, "validate", tmp_path / "missing.off")
    assert code == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["prickliness", "--algo", "quantum", "x.off"])
    assert e.value.code == 2
    assert "usage" in capsys.readouterr().err
    code, _, _ = run(capsys, "generate", "--family", "nope")
    assert code == 2


def test_generate_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.off", tmp_path / "b.off"
    assert main(["generate", "--family", "random", "--params", "n=30", "seed=4", "--out", str(a)]) == 0
    assert main(["generate", "--family", "random", "--params", "n=30", "seed=4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text() == serialize(gen_random(30, 4))
    code, out, _ = run(capsys, "generate", "--family", "zigzag", "--params", "n=20")
    assert code == 0 and len(out.splitlines()) == 20


def test_heatmap_writes_csv_and_pgm(capsys, pyr_file, tmp_path):
    prefix = tmp_path / "hm"
    code, _, _ = run(capsys, "heatmap", pyr_file, "--res", 5, "--max-offset", 10, "--out", prefix)
    assert code == 0
    csv = (tmp_path / "hm.csv").read_text().splitlines()
    assert csv[0] == "east_deg,north_deg,value" and len(csv) == 26
    pgm = (tmp_path / "hm.pgm").read_text().splitlines()
    assert pgm[0] == "P2" and pgm[1].startswith("# max=")
    first = (tmp_path / "hm.csv").read_bytes()
    run(capsys, "heatmap", pyr_file, "--res", 5, "--max-offset", 10, "--out", prefix)
    assert (tmp_path / "hm.csv").read_bytes() == first


def test_viewshed_csv(capsys, pyr_file, tmp_path):
    code, out, _ = run(capsys, "viewshed", pyr_file, "--viewpoint", 4)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "terrain_id,viewpoint_id,type1,type2,type3,total,pi,n"
    assert lines[1] == "pyramid,4,5,0,0,5,1,5"
    code, out, _ = run(capsys, "viewshed", pyr_file, "--auto", 2)
    assert code == 0 and len(out.splitlines()) == 3
    code, _, _ = run(capsys, "viewshed", pyr_file, "--viewpoint", 99)
    assert code == 2


def test_viewshed_1d(capsys, tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("0 0\n1 2\n2 0\n3 7\n4 0\n")
    code, out, _ = run(capsys, "viewshed", p, "--viewpoint", 0)
    assert code == 0
    assert out.splitlines() == ["intervals=2", "0 1", "2.8 3"]


def test_experiment_pipeline(capsys, tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for k in (2, 3):
        save_terrain(gen_theorem4_2d(k, 3)[0], corpus / f"mountains_k{k}.off")
    save_terrain(gen_grid([[0] * 3] * 3), corpus / "flat.off")
    (corpus / "broken.off").write_text("OFF\n1 0 0\n")
    out = tmp_path / "rows.csv"
    code, _, _ = run(capsys, "experiment", "--inputs", corpus, "--viewpoints", 3, "--out", out)
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "terrain_id,n,pi,complexities,median,error"
    by_id = {r.split(",")[0]: r.split(",") for r in rows[1:]}
    assert by_id["flat"][2] == "0"
    assert by_id["broken"][-1] != ""
    assert int(by_id["mountains_k2"][2]) < int(by_id["mountains_k3"][2])


def test_module_entry_point(pyr_file):
    r = subprocess.run([sys.executable, "-m", "prickliness", "prickliness", str(pyr_file)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("pi=1")
