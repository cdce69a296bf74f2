"""Synthetic aligned spaces with a known ground truth.

A "true" space is drawn (optionally with cluster structure); the KB space is an
orthogonal transform of it plus Gaussian noise, keyed by synset ids, and
the corpus space is the true space with some words hidden.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluation import SimilarityDataset
from .graph import LemmaMap, save_lemma_map
from .vecspace import EmbeddingSpace, save_space


@dataclass
class SyntheticSetup:
    true_space: EmbeddingSpace
    corpus_space: EmbeddingSpace
    kb_space: EmbeddingSpace
    lemma_map: LemmaMap
    hidden: list
    rotation: np.ndarray


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def make_setup(n_words: int = 1500, dim: int = 50, n_hidden: int = 300, noise: float = 0.01,
               n_clusters: int = 0, seed: int = 0) -> SyntheticSetup:
    """``n_clusters=0`` draws the true space i.i.d. standard normal."""
    rng = np.random.default_rng(seed)
    words = [f"w{i:05d}" for i in range(n_words)]
    T = rng.standard_normal((n_words, dim))
    if n_clusters:
        centers = rng.standard_normal((n_clusters, dim))
        T = centers[rng.integers(0, n_clusters, n_words)] + 0.8 * T
    R = random_orthogonal(dim, rng)
    K = T @ R + noise * rng.standard_normal((n_words, dim))
    hidden_idx = np.sort(rng.choice(n_words, n_hidden, replace=False))
    hidden = [words[i] for i in hidden_idx]
    visible = np.setdiff1d(np.arange(n_words), hidden_idx)
    lm = LemmaMap()
    for w in words:
        lm.entries[w] = [f"syn:{w}"]
        lm.pos[w] = "noun"
    return SyntheticSetup(
        true_space=EmbeddingSpace(words, T),
        corpus_space=EmbeddingSpace([words[i] for i in visible], T[visible]),
        kb_space=EmbeddingSpace([f"syn:{w}" for w in words], K),
        lemma_map=lm,
        hidden=hidden,
        rotation=R,
    )


def similarity_dataset(setup: SyntheticSetup, n_pairs: int = 400, seed: int = 1,
                       name: str = "synthetic") -> SimilarityDataset:
    """Random word pairs scored by their cosine in the true space."""
    rng = np.random.default_rng(seed)
    words = setup.true_space.words
    unit = setup.true_space.unit_rows()
    pairs, seen = [], set()
    while len(pairs) < n_pairs:
        i, j = rng.choice(len(words), 2, replace=False)
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        pairs.append((words[i], words[j], float(np.clip(unit[i] @ unit[j], -1, 1))))
    return SimilarityDataset(name, pairs, (-1.0, 1.0))


def write_setup(setup: SyntheticSetup, directory, n_pairs: int = 400, seed: int = 1) -> dict:
    """Write the setup as pipeline input files; returns their paths by role."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus_space": d / "corpus.vec",
        "kb_space": d / "kb.vec",
        "lemma_map": d / "lemmas.tsv",
        "dataset": d / "similarity.tsv",
    }
    save_space(setup.corpus_space, paths["corpus_space"], digits=9)
    save_space(setup.kb_space, paths["kb_space"], digits=9)
    save_lemma_map(setup.lemma_map, paths["lemma_map"])
    data = similarity_dataset(setup, n_pairs, seed)
    with open(paths["dataset"], "w", encoding="utf-8") as f:
        f.write(f"# scale: {data.scale[0]:g} {data.scale[1]:g}\n")
        for w1, w2, g in data.pairs:
            f.write(f"{w1}\t{w2}\t{g:.9g}\n")
    return {k: str(v) for k, v in paths.items()}
