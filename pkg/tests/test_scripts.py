import csv
import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def run(name, *args):
    r = subprocess.run([sys.executable, str(SCRIPTS / name), *map(str, args)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    return r.stdout


def test_selection_curves():
    rows = list(csv.DictReader(run("selection_curves.py", "--nmax", "2", "--seeds", "0").splitlines()))
    assert {r["method"] for r in rows} == {"Exhaustive", "Greedy", "RandomSwap"}
    assert all(float(r["lower"]) <= float(r["upper"]) for r in rows)


def test_export_attractors(tmp_path):
    run("export_attractors.py", "--depth", "3", "--outdir", tmp_path)
    files = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert len(files) == 4
    lines = (tmp_path / files[0]).read_text().splitlines()
    assert lines[0] == "x1,x2" and len(lines) == 65


def test_delta_table():
    out = run("delta_table.py", "--depth", "4").splitlines()
    assert out[0] == "triple,depth,level_min,running_min" and len(out) == 9
