"""Desk-scale run of the whole pipeline on generated resources.

A block-structured graph stands in for the lexical KB. Lemmas name one
synset, or two synsets in different blocks for a polysemous minority. A
"corpus" space is trained on lemma-level walks with a different seed, and
its rarest lemmas are removed to create out-of-vocabulary words. Gold
similarity decays with graph distance between the lemmas' first synsets.

    python3 scripts/desk_scale_pipeline.py --out runs/desk

writes table1.tsv, table2.tsv and sweep.tsv shaped like the full-scale
reports, plus every intermediate file and manifest.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from lexbridge.graph import KnowledgeGraph, LemmaMap, save_graph, save_lemma_map
from lexbridge.sgns import SgnsConfig, export_space, train
from lexbridge.vecspace import save_space
from lexbridge.walker import WalkConfig, WalkCorpus, generate_walks

import pipeline


def block_graph(n_blocks, block_size, p_in, p_out, rng) -> KnowledgeGraph:
    n = n_blocks * block_size
    names = [f"syn{i:05d}" for i in range(n)]
    block = np.arange(n) // block_size
    edges = []
    for i in range(n):
        # a ring inside each block keeps every block connected
        j = block[i] * block_size + (i + 1) % block_size
        edges.append((names[i], names[j]))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < (p_in if block[i] == block[j] else p_out):
                edges.append((names[i], names[j]))
    return KnowledgeGraph.from_edges(edges, nodes=names)


def make_lemmas(graph: KnowledgeGraph, block_size, polysemous_frac, rng) -> LemmaMap:
    lm = LemmaMap()
    n = len(graph)
    pos_cycle = ["noun"] * 6 + ["adjective"] * 3 + ["verb"]
    for i, syn in enumerate(graph.nodes):
        lemma = f"lemma{i:05d}"
        synsets = [syn]
        if rng.random() < polysemous_frac:
            other = int(rng.integers(0, n))
            if other // block_size != i // block_size:
                synsets.append(graph.nodes[other])
        lm.entries[lemma] = synsets
        lm.pos[lemma] = pos_cycle[i % len(pos_cycle)]
    return lm


def lemma_walks(graph, lemma_map, cfg, rng) -> WalkCorpus:
    """Node walks re-tokenized as lemma walks (each synset emits one of its lemmas)."""
    lemmas_of = {}
    for lemma, synsets in lemma_map.entries.items():
        for s in synsets:
            lemmas_of.setdefault(s, []).append(lemma)
    node_walks = generate_walks(graph, cfg)
    walks = [[lemmas_of[s][int(rng.integers(len(lemmas_of[s])))] for s in w] for w in node_walks.walks]
    return WalkCorpus.from_walks(walks)


def write_dataset(path, pairs, dist, lemma_map, graph):
    with open(path, "w", encoding="utf-8") as f:
        f.write("# scale: 0 10\n")
        for a, b in pairs:
            i = graph.index[lemma_map.synsets(a)[0]]
            j = graph.index[lemma_map.synsets(b)[0]]
            f.write(f"{a}\t{b}\t{10 * np.exp(-(dist[i, j] - 1) / 2):.4f}\n")


def sample_pairs(words_a, words_b, n, rng):
    seen, out = set(), []
    while len(out) < n:
        a, b = words_a[int(rng.integers(len(words_a)))], words_b[int(rng.integers(len(words_b)))]
        if a != b and frozenset((a, b)) not in seen:
            seen.add(frozenset((a, b)))
            out.append((a, b))
    return out


def build_resources(d: Path, n_blocks, block_size, hidden_frac, seed):
    rng = np.random.default_rng(seed)
    graph = block_graph(n_blocks, block_size, 0.25, 0.004, rng)
    lm = make_lemmas(graph, block_size, 0.15, rng)
    corpus = lemma_walks(graph, lm, WalkConfig(walks_per_node=10, walk_length=40, seed=seed + 1), rng)
    space = export_space(train(corpus, SgnsConfig(dim=48, window=5, epochs=3, seed=seed + 1)))
    # the tail of the frequency-ordered vocabulary plays the rare words
    n_hidden = int(hidden_frac * len(space))
    visible, hidden = space.words[:-n_hidden], space.words[-n_hidden:]
    d.mkdir(parents=True, exist_ok=True)
    save_graph(graph, d / "kb.edges.tsv")
    save_lemma_map(lm, d / "kb.lemmas.tsv")
    save_space(space.subset(visible), d / "corpus.vec")

    idx = [graph.index[s] for s in graph.nodes]
    adj = csr_matrix((np.ones(2 * graph.edge_count),
                      ([i for i in idx for _ in graph.neighbors(i)],
                       [j for i in idx for j in graph.neighbors(i)])), shape=(len(graph),) * 2)
    dist = shortest_path(adj, unweighted=True)
    datasets = []
    for name in ("simA", "simB"):
        datasets.append(d / f"{name}.tsv")
        write_dataset(datasets[-1], sample_pairs(visible, visible, 150, rng), dist, lm, graph)
    # rare-word analogue: most pairs covered initially, a quarter touching a removed lemma
    rare = sample_pairs(visible, visible, 150, rng)
    seen = {frozenset(p) for p in rare}
    rare += [p for p in sample_pairs(hidden, visible + hidden, 60, rng) if frozenset(p) not in seen][:50]
    datasets.append(d / "rw.tsv")
    write_dataset(datasets[-1], rare, dist, lm, graph)
    return d / "kb.edges.tsv", d / "kb.lemmas.tsv", d / "corpus.vec", datasets[:2], datasets[2]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--out", default="runs/desk", help="output directory")
    ap.add_argument("--blocks", type=int, default=16, help="graph blocks")
    ap.add_argument("--block-size", type=int, default=30, help="synsets per block")
    ap.add_argument("--hidden", type=float, default=0.2, help="fraction of lemmas removed")
    ap.add_argument("--max-bridges", type=int, default=200, help="bridges for the enrichment map")
    ap.add_argument("--sweep-sizes", default="50,100,150,200",
                    help="comma-separated bridge counts for sweep.tsv")
    ap.add_argument("--seed", type=int, default=0, help="random seed")
    args = ap.parse_args(argv)
    out = Path(args.out)
    graph, lemmas, corpus, datasets, rare = build_resources(
        out / "resources", args.blocks, args.block_size, args.hidden, args.seed)
    cfg = pipeline.PipelineConfig(walks_per_node=10, walk_length=40, dim=48, window=5, epochs=3,
                                  seed=args.seed, max_bridges=args.max_bridges,
                                  sweep_sizes=[int(x) for x in args.sweep_sizes.split(",")])
    paths = pipeline.run(graph, lemmas, corpus, datasets, rare, out, cfg)
    for key, p in paths.items():
        print(f"== {key}: {p}")
        print(Path(p).read_text())


if __name__ == "__main__":
    main()
