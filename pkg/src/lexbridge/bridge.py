"""Semantic bridge selection and word -> synset vector resolution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import LemmaMap, normalize_pos
from .vecspace import EmbeddingSpace, cosine


class ResolutionError(KeyError):
    """A word cannot be resolved to a vector in the requested space."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


@dataclass
class BridgeSet:
    """Paired bridge rows: ``corpus_rows[i]`` and ``kb_rows[i]`` belong to ``words[i]``."""

    words: list
    corpus_rows: np.ndarray
    kb_rows: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.words)
        if n < 1:
            raise ValueError("bridge set must be non-empty")
        if self.corpus_rows.shape[0] != n or self.kb_rows.shape[0] != n:
            raise ValueError("bridge row matrices must have one row per word")

    def __len__(self):
        return len(self.words)

    def prefix(self, n: int) -> "BridgeSet":
        if n > len(self):
            raise ValueError(f"requested {n} bridges but only {len(self)} available")
        meta = dict(self.metadata, size=n)
        return BridgeSet(self.words[:n], self.corpus_rows[:n], self.kb_rows[:n], meta)


def _kb_rows_for(lemma_map: LemmaMap, kb_space: EmbeddingSpace, word: str) -> list[int]:
    return [i for i in (kb_space.index.get(s) for s in lemma_map.synsets(word)) if i is not None]


def bridge_candidates(lemma_map: LemmaMap, corpus_space: EmbeddingSpace,
                      kb_space: EmbeddingSpace, pos_filter=None) -> list[tuple[str, int, int]]:
    """All ``(lemma, corpus_row, kb_row)`` triples eligible as bridges, unordered."""
    allowed = None if not pos_filter else {normalize_pos(p) for p in pos_filter}
    out = []
    for lemma, synsets in lemma_map.entries.items():
        if len(synsets) != 1:
            continue
        if allowed is not None and lemma_map.pos.get(lemma) not in allowed:
            continue
        kb_row = kb_space.index.get(synsets[0])
        if kb_row is None:
            continue
        # multi-word lemmas need the exact token; no case-folded fallback
        c_row = corpus_space.index.get(lemma) if "_" in lemma else corpus_space.find(lemma)
        if c_row is None:
            continue
        out.append((lemma, c_row, kb_row))
    return out


def select_bridges(lemma_map: LemmaMap, corpus_space: EmbeddingSpace, kb_space: EmbeddingSpace,
                   pos_filter=("noun", "adjective"), max_n: Optional[int] = None,
                   frequency_sorted: bool = True) -> BridgeSet:
    """Pick monosemous lemmas present in both spaces.

    Candidates are ordered by corpus vocabulary rank (the usual frequency
    order of pre-trained releases) or lexicographically when the corpus file
    is not frequency sorted; the first ``max_n`` are kept.
    """
    cands = bridge_candidates(lemma_map, corpus_space, kb_space, pos_filter)
    if not cands:
        raise ValueError("no bridge candidates: no monosemous lemma is present in both spaces")
    if frequency_sorted:
        cands.sort(key=lambda t: (t[1], t[0]))
    else:
        cands.sort(key=lambda t: t[0])
    if max_n is not None:
        cands = cands[:max_n]
    words = [c[0] for c in cands]
    meta = {
        "pos_filter": sorted(normalize_pos(p) for p in pos_filter) if pos_filter else None,
        "max_n": max_n,
        "order": "corpus-rank" if frequency_sorted else "lexicographic",
        "size": len(words),
    }
    return BridgeSet(words,
                     corpus_space.matrix[[c[1] for c in cands]],
                     kb_space.matrix[[c[2] for c in cands]], meta)


def bridges_from_words(words, lemma_map: LemmaMap, corpus_space: EmbeddingSpace,
                       kb_space: EmbeddingSpace) -> BridgeSet:
    """Rebuild a bridge set from a saved word list, keeping its order."""
    c_rows, k_rows = [], []
    for w in words:
        c = corpus_space.find(w)
        if c is None:
            raise ResolutionError(f"bridge word {w!r} is not in the corpus space")
        c_rows.append(c)
        k_rows.append(kb_vector_for_word(w, lemma_map, kb_space, mode="monosemous-only"))
    return BridgeSet(list(words), corpus_space.matrix[c_rows], np.vstack(k_rows), {"size": len(words)})


def save_bridge_words(bridges: BridgeSet, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for w in bridges.words:
            f.write(w + "\n")


def load_bridge_words(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip()]


def kb_vector_for_word(word: str, lemma_map: LemmaMap, kb_space: EmbeddingSpace,
                       mode: str = "first-synset", reference=None) -> np.ndarray:
    """Resolve ``word`` to one synset vector.

    ``mode`` is ``monosemous-only``, ``first-synset`` (first listed synset
    with a vector), ``average`` (mean of available synset vectors) or
    ``maxsim-vs`` (synset closest in cosine to ``reference``).
    """
    if word not in lemma_map:
        raise ResolutionError(f"{word!r} is not in the lemma map")
    synsets = lemma_map.synsets(word)
    if mode == "monosemous-only" and len(synsets) != 1:
        raise ResolutionError(f"{word!r} is polysemous ({len(synsets)} synsets)")
    rows = _kb_rows_for(lemma_map, kb_space, word)
    if not rows:
        raise ResolutionError(f"no synset of {word!r} has a vector in the KB space")
    if mode in ("monosemous-only", "first-synset"):
        return kb_space.matrix[rows[0]]
    if mode == "average":
        return kb_space.matrix[rows].mean(axis=0)
    if mode == "maxsim-vs":
        if reference is None:
            raise ValueError("maxsim-vs mode needs a reference vector")
        sims = [cosine(kb_space.matrix[r], reference) for r in rows]
        return kb_space.matrix[rows[int(np.argmax(sims))]]
    raise ValueError(f"unknown resolution mode {mode!r}")


def maxsim_similarity(w1: str, w2: str, lemma_map: LemmaMap, kb_space: EmbeddingSpace) -> float:
    """Maximum cosine over all synset pairs of the two words."""
    rows = []
    for w in (w1, w2):
        if w not in lemma_map:
            raise ResolutionError(f"{w!r} is not in the lemma map")
        r = _kb_rows_for(lemma_map, kb_space, w)
        if not r:
            raise ResolutionError(f"no synset of {w!r} has a vector in the KB space")
        rows.append(r)
    unit = kb_space.unit_rows()
    # elementwise product then sum: exactly symmetric in (w1, w2)
    sims = (unit[rows[0]][:, None, :] * unit[rows[1]][None, :, :]).sum(axis=-1)
    return float(np.clip(sims.max(), -1.0, 1.0))
