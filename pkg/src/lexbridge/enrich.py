"""Enrich a corpus space with mapped KB vectors for words it lacks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .bridge import ResolutionError, kb_vector_for_word
from .graph import LemmaMap
from .mapping import CcaMap, LsMap, SpaceMap, project
from .vecspace import EmbeddingSpace, save_space

CORPUS = "corpus"
INDUCED = "induced"


class EnrichedSpace(EmbeddingSpace):
    """Embedding space whose tokens carry a ``corpus`` / ``induced`` tag."""

    def __init__(self, words, matrix, provenance, space_map=None, skipped=()):
        super().__init__(words, matrix)
        if len(provenance) != len(self.words):
            raise ValueError("one provenance tag per token is required")
        self.provenance = list(provenance)
        self.space_map = space_map
        self.skipped = list(skipped)

    @property
    def n_corpus(self) -> int:
        return self.provenance.count(CORPUS)

    @property
    def n_induced(self) -> int:
        return self.provenance.count(INDUCED)

    def induced_words(self) -> list[str]:
        return [w for w, p in zip(self.words, self.provenance) if p == INDUCED]


def enrich(corpus_space: EmbeddingSpace, kb_space: EmbeddingSpace, lemma_map: LemmaMap,
           space_map: SpaceMap, words: Optional[Iterable[str]] = None,
           polysemy: str = "first") -> EnrichedSpace:
    """Union of the (mapped) corpus space and mapped KB vectors of missing words.

    ``words`` defaults to every lemma in ``lemma_map``. A word counts as
    missing only if neither its verbatim nor its case-folded form is in the
    corpus space. Polysemous words use their first listed synset, or the
    synset average with ``polysemy="average"``. Unresolvable words are
    listed in ``skipped``.
    """
    mode = {"first": "first-synset", "average": "average"}.get(polysemy)
    if mode is None:
        raise ValueError(f"polysemy must be 'first' or 'average', got {polysemy!r}")
    if isinstance(space_map, LsMap):
        if (space_map.d_kb, space_map.d_corpus) != (kb_space.dim, corpus_space.dim):
            raise ValueError("LS map dimensions do not match the spaces")
        corpus_rows = corpus_space.matrix
    elif isinstance(space_map, CcaMap):
        if (space_map.d_kb, space_map.d_corpus) != (kb_space.dim, corpus_space.dim):
            raise ValueError("CCA map dimensions do not match the spaces")
        corpus_rows = project(space_map, corpus_space.matrix, "corpus")
    else:
        raise TypeError(f"unsupported map type {type(space_map).__name__}")

    requested = list(lemma_map) if words is None else list(words)
    new_words, kb_rows, skipped = [], [], []
    seen = set()
    for w in requested:
        if w in corpus_space:
            continue
        key = w.casefold()
        if key in seen:
            continue
        try:
            kb_rows.append(kb_vector_for_word(w, lemma_map, kb_space, mode=mode))
        except ResolutionError:
            skipped.append(w)
            continue
        seen.add(key)
        new_words.append(w)

    if kb_rows:
        induced = project(space_map, np.vstack(kb_rows), "kb")
        matrix = np.vstack([corpus_rows, induced])
    else:
        matrix = corpus_rows
    prov = [CORPUS] * len(corpus_space) + [INDUCED] * len(new_words)
    return EnrichedSpace(corpus_space.words + new_words, matrix, prov, space_map, skipped)


def save_enriched(space: EnrichedSpace, path, provenance_path=None) -> str:
    """Save in the headered text format plus a ``token<TAB>tag`` sidecar."""
    save_space(space, path)
    provenance_path = provenance_path or f"{path}.provenance"
    with open(provenance_path, "w", encoding="utf-8") as f:
        for w, p in zip(space.words, space.provenance):
            f.write(f"{w}\t{p}\n")
    return str(provenance_path)


def load_provenance(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                w, p = line.rstrip("\n").split("\t")
                out[w] = p
    return out


@dataclass(frozen=True)
class Coverage:
    total: int
    oov_pairs: int
    oov_words: list

    @property
    def covered_fraction(self) -> float:
        return 1.0 - self.oov_pairs / self.total if self.total else 1.0


def coverage_report(space: EmbeddingSpace, dataset) -> Coverage:
    """Count pairs with at least one word missing from ``space``."""
    oov_pairs = 0
    missing = []
    seen = set()
    for w1, w2, _ in dataset.pairs:
        bad = [w for w in (w1, w2) if w not in space]
        if bad:
            oov_pairs += 1
        for w in bad:
            if w not in seen:
                seen.add(w)
                missing.append(w)
    return Coverage(len(dataset.pairs), oov_pairs, missing)
