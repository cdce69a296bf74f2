import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def script(name, *args):
    return subprocess.run([sys.executable, str(SCRIPTS / name), *map(str, args)],
                          capture_output=True, text=True)


def table(path):
    rows = [l.split("\t") for l in Path(path).read_text().splitlines()]
    return rows[0], rows[1:]


def test_desk_pipeline_writes_all_reports(tmp_path):
    proc = script("desk_scale_pipeline.py", "--out", tmp_path, "--blocks", 6, "--block-size", 20,
                  "--max-bridges", 60, "--sweep-sizes", "30,60")
    assert proc.returncode == 0, proc.stderr[-500:]

    head, rows = table(tmp_path / "table1.tsv")
    assert head == ["space", "dataset", "r", "rho", "evaluated", "oov"]
    assert {r[0] for r in rows} == {"deepwalk", "node2vec", "corpus"} and len(rows) == 6

    head, rows = table(tmp_path / "table2.tsv")
    assert head[:2] == ["dataset", "row"] and head[-1] == "coverage"
    initial, enriched = rows
    assert int(initial[3]) > 0 and int(enriched[3]) == 0
    assert float(enriched[-1]) == 1.0 and 0 <= float(enriched[6]) <= 1

    sweep = [l.split("\t") for l in (tmp_path / "sweep.tsv").read_text().splitlines()
             if not l.startswith("#")]
    assert len(sweep) == 2 * 2 * 2 * 2  # kb spaces x methods x sizes x datasets
    manifests = {p.name for p in tmp_path.glob("*.manifest")}
    for stage in ("deepwalk.walks", "node2vec.vec", "node2vec.cca.map", "enriched.vec", "sweep.tsv", "t2"):
        assert f"{stage}.manifest" in manifests
    assert len((tmp_path / "bridges.txt").read_text().split()) == 60


def test_full_scale_script_reports_missing_resources(tmp_path):
    proc = script("reproduce_full_scale.py", "--resources", tmp_path)
    assert proc.returncode == 2
    assert "wordnet.edges.tsv" in proc.stderr and "rw.tsv" in proc.stderr
