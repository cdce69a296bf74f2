"""End-to-end driver shared by the desk-scale and full-scale scripts.

Every stage runs through the ``lexbridge`` command line in a subprocess, so
each step leaves its own manifest. The driver then collects three reports in
``out``:

* ``table1.tsv``: KB spaces (MaxSim) and the corpus space on each dataset.
* ``table2.tsv``: the rare-word dataset before and after enrichment.
* ``sweep.tsv``: cross-space correlation against bridge set size.
"""

from __future__ import annotations

import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

from lexbridge.evaluation import load_records, paired_significance


@dataclass
class PipelineConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    p: float = 1.0
    q: float = 1.0
    dim: int = 100
    window: int = 10
    epochs: int = 5
    seed: int = 0
    method: str = "cca"
    kb_for_enrichment: str = "node2vec"
    max_bridges: int = 5000
    sweep_sizes: list = field(default_factory=lambda: [500, 1000, 3000, 5000, 10000])


def cli(*args) -> str:
    cmd = [sys.executable, "-m", "lexbridge", *map(str, args)]
    print("$ lexbridge " + " ".join(map(str, args)), file=sys.stderr)
    proc = subprocess.run(cmd, capture_output=True, text=True)
    sys.stderr.write(proc.stderr)
    if proc.returncode:
        raise SystemExit(f"lexbridge {args[0]} failed with exit status {proc.returncode}")
    return proc.stdout


def run(graph, lemma_map, corpus_space, datasets, rare_dataset, out, cfg: PipelineConfig) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    kb = {}
    for label, mode in (("deepwalk", "uniform"), ("node2vec", "biased")):
        walks = out / f"{label}.walks"
        cli("walk", "--graph", graph, "--mode", mode, "--p", cfg.p, "--q", cfg.q,
            "--walks-per-node", cfg.walks_per_node, "--walk-length", cfg.walk_length,
            "--seed", cfg.seed, "--out", walks)
        kb[label] = out / f"{label}.vec"
        cli("embed", "--corpus", walks, "--dim", cfg.dim, "--window", cfg.window,
            "--epochs", cfg.epochs, "--seed", cfg.seed, "--out", kb[label])

    table1 = [("space", "dataset", "r", "rho", "evaluated", "oov")]
    for label, space in [*kb.items(), ("corpus", corpus_space)]:
        extra = ["--sim", "maxsim", "--lemma-map", lemma_map] if label in kb else []
        prefix = out / f"t1.{label}"
        cli("eval", "--space", space, *sum((["--dataset", d] for d in datasets), []), *extra,
            "--records", prefix, "--manifest", f"{prefix}.manifest")
        for d in datasets:
            rep = load_records(f"{prefix}.{Path(d).stem}.space.tsv")
            table1.append((label, rep.name, f"{rep.pearson:.4f}", f"{rep.spearman:.4f}",
                           str(rep.n_evaluated), str(rep.n_oov)))
    _write(out / "table1.tsv", table1)

    sweep = out / "sweep.tsv"
    cli("sweep", "--corpus-space", corpus_space, "--lemma-map", lemma_map,
        *sum((["--kb-space", f"{k}={v}"] for k, v in kb.items()), []),
        *sum((["--dataset", d] for d in datasets), []),
        "--sizes", ",".join(map(str, cfg.sweep_sizes)), "--out", sweep)

    space_map = out / f"{cfg.kb_for_enrichment}.{cfg.method}.map"
    cli("map", "--method", cfg.method, "--corpus-space", corpus_space,
        "--kb-space", kb[cfg.kb_for_enrichment], "--lemma-map", lemma_map,
        "--max-bridges", cfg.max_bridges, "--bridges-out", out / "bridges.txt", "--out", space_map)
    enriched = out / "enriched.vec"
    cli("enrich", "--map", space_map, "--corpus-space", corpus_space,
        "--kb-space", kb[cfg.kb_for_enrichment], "--lemma-map", lemma_map, "--out", enriched)

    prefix = out / "t2"
    print(cli("eval", "--dataset", rare_dataset, "--before", corpus_space, "--after", enriched,
              "--records", prefix, "--manifest", f"{prefix}.manifest"))
    name = Path(rare_dataset).stem
    before = load_records(f"{prefix}.{name}.before.tsv")
    after = load_records(f"{prefix}.{name}.after.tsv")
    sig = paired_significance(before, after)
    table2 = [("dataset", "row", "pairs", "oov", "r", "rho", "p_one_tailed", "coverage")]
    for row, rep, p in (("initial", before, ""), ("enriched", after, f"{sig.p:.4g}")):
        table2.append((name, row, str(rep.total), str(rep.n_oov), f"{rep.pearson:.4f}",
                       f"{rep.spearman:.4f}", p, f"{1 - rep.n_oov / rep.total:.4f}"))
    _write(out / "table2.tsv", table2)
    return {"table1": out / "table1.tsv", "table2": out / "table2.tsv", "sweep": sweep}


def _write(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write("\t".join(r) + "\n")
