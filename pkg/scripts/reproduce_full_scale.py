"""Full-scale run on real resources.

Expected layout under ``--resources`` (each path can be overridden):

    wordnet.edges.tsv        from scripts/export_wordnet.py
    wordnet.lemmas.tsv       from scripts/export_wordnet.py
    corpus.vec               pre-trained word vectors, word2vec text format
    datasets/rg65.tsv        word1<TAB>word2<TAB>score, optional "# scale: lo hi"
    datasets/wss353.tsv
    datasets/simlex999.tsv
    datasets/rw.tsv          the rare-word dataset enriched in table2.tsv

    python3 scripts/reproduce_full_scale.py --resources resources --out runs/full

Walks and SGNS use their library defaults (p = q = 1, 10 walks of 80 steps,
dim 100, window 10). Expect hours of CPU time on the full WordNet graph.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import pipeline

DATASETS = ("rg65", "wss353", "simlex999")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--resources", required=True, help="resource directory")
    ap.add_argument("--out", default="runs/full", help="output directory")
    ap.add_argument("--graph", help="edge list (default: <resources>/wordnet.edges.tsv)")
    ap.add_argument("--lemma-map", help="lemma map (default: <resources>/wordnet.lemmas.tsv)")
    ap.add_argument("--corpus-space", help="pre-trained space (default: <resources>/corpus.vec)")
    ap.add_argument("--dataset", action="append",
                    help="benchmark dataset, repeatable (default: <resources>/datasets/{%s}.tsv)"
                    % ",".join(DATASETS))
    ap.add_argument("--rare-dataset", help="rare-word dataset (default: <resources>/datasets/rw.tsv)")
    ap.add_argument("--method", choices=("cca", "ls"), default="cca", help="enrichment mapping")
    ap.add_argument("--max-bridges", type=int, default=5000, help="bridges for the enrichment map")
    ap.add_argument("--sweep-sizes", default="500,1000,3000,5000,10000",
                    help="comma-separated bridge counts for sweep.tsv")
    ap.add_argument("--seed", type=int, default=0, help="random seed")
    args = ap.parse_args(argv)

    res = Path(args.resources)
    graph = Path(args.graph or res / "wordnet.edges.tsv")
    lemmas = Path(args.lemma_map or res / "wordnet.lemmas.tsv")
    corpus = Path(args.corpus_space or res / "corpus.vec")
    datasets = [Path(d) for d in args.dataset] if args.dataset else \
        [res / "datasets" / f"{name}.tsv" for name in DATASETS]
    rare = Path(args.rare_dataset or res / "datasets" / "rw.tsv")
    missing = [str(p) for p in (graph, lemmas, corpus, *datasets, rare) if not p.exists()]
    if missing:
        ap.error("missing resources: " + ", ".join(missing))

    cfg = pipeline.PipelineConfig(seed=args.seed, method=args.method, max_bridges=args.max_bridges,
                                  sweep_sizes=[int(x) for x in args.sweep_sizes.split(",")])
    paths = pipeline.run(graph, lemmas, corpus, datasets, rare, Path(args.out), cfg)
    for key, p in paths.items():
        print(f"== {key}: {p}")
        print(Path(p).read_text())


if __name__ == "__main__":
    main()
