"""Embedding spaces: text (de)serialization, cosine and nearest neighbours."""

from __future__ import annotations

import logging
import warnings

import numpy as np

log = logging.getLogger(__name__)


class SpaceFormatError(ValueError):
    pass


class EmbeddingSpace:
    """Vocabulary-indexed dense matrix, one row per token.

    Lookups via :meth:`find` try the verbatim token first, then its
    case-folded form (first vocabulary entry with that folding wins).
    """

    def __init__(self, words, matrix, validate: bool = True):
        self.words = list(words)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.words):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {len(self.words)} words")
        self.index = {}
        for i, w in enumerate(self.words):
            if w in self.index:
                raise SpaceFormatError(f"duplicate token {w!r}")
            self.index[w] = i
        if validate:
            if not self.words:
                raise SpaceFormatError("embedding space must contain at least one vector")
            if not np.all(np.isfinite(self.matrix)):
                raise SpaceFormatError("embedding space contains non-finite values")
        self._folded = None
        self._unit = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return self.find(word) is not None

    def __getitem__(self, word) -> np.ndarray:
        i = self.find(word)
        if i is None:
            raise KeyError(word)
        return self.matrix[i]

    def find(self, word: str):
        """Row index of ``word`` (verbatim, else case-folded), or None."""
        i = self.index.get(word)
        if i is not None:
            return i
        if self._folded is None:
            folded = {}
            for k, w in enumerate(self.words):
                folded.setdefault(w.casefold(), k)
            self._folded = folded
        return self._folded.get(word.casefold())

    def unit_rows(self) -> np.ndarray:
        if self._unit is None:
            self._unit = self.matrix / np.linalg.norm(self.matrix, axis=1, keepdims=True)
        return self._unit

    def normalized(self) -> "EmbeddingSpace":
        return EmbeddingSpace(self.words, self.unit_rows().copy())

    def subset(self, words) -> "EmbeddingSpace":
        rows = [self.find(w) for w in words]
        return EmbeddingSpace([self.words[r] for r in rows], self.matrix[rows])


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("cosine undefined for a zero vector")
    # elementwise product keeps the result exactly symmetric in (u, v)
    c = float(np.sum(u * v)) / (nu * nv)
    return min(1.0, max(-1.0, c))


def nearest(space: EmbeddingSpace, word: str, k: int = 10):
    """Top-``k`` ``(word, cosine)`` neighbours of ``word``, excluding itself."""
    if k < 1:
        raise ValueError("k must be >= 1")
    i = space.find(word)
    if i is None:
        raise KeyError(f"{word!r} is not in the vocabulary")
    unit = space.unit_rows()
    sims = np.clip(unit @ unit[i], -1.0, 1.0)
    order = np.lexsort((np.arange(len(space)), -sims))
    out = [(space.words[j], float(sims[j])) for j in order if j != i]
    return out[:k]


def _is_header(fields) -> bool:
    if len(fields) != 2:
        return False
    try:
        return int(fields[0]) >= 0 and int(fields[1]) > 0
    except ValueError:
        return False


def load_space(path, format: str = "auto") -> EmbeddingSpace:
    """Load a whitespace-separated text embedding file.

    ``format`` is ``headered`` (first line ``"<count> <dim>"``),
    ``headerless`` or ``auto``. Zero-norm rows are skipped with a warning.
    """
    if format not in ("auto", "headered", "headerless"):
        raise ValueError(f"unknown space format {format!r}")
    words, rows = [], []
    seen = set()
    dim = None
    declared = None
    skipped = 0
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split(" ")
            if "" in fields:
                fields = line.split()
            if lineno == 1 and format != "headerless":
                if _is_header(fields):
                    declared = int(fields[0])
                    dim = int(fields[1])
                    continue
                if format == "headered":
                    raise SpaceFormatError(f"{path}: line 1: expected '<count> <dim>' header")
            if "\t" in fields[0]:
                raise SpaceFormatError(f"{path}: line {lineno}: token contains whitespace")
            token, values = fields[0], fields[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise SpaceFormatError(f"{path}: line {lineno}: no vector values")
            if len(values) != dim:
                raise SpaceFormatError(
                    f"{path}: line {lineno}: expected {dim} values, got {len(values)} "
                    f"(token {token!r} may contain whitespace)")
            try:
                vec = np.array(values, dtype=np.float64)
            except ValueError:
                raise SpaceFormatError(f"{path}: line {lineno}: non-numeric value") from None
            if not np.all(np.isfinite(vec)):
                raise SpaceFormatError(f"{path}: line {lineno}: non-finite value")
            if token in seen:
                raise SpaceFormatError(f"{path}: line {lineno}: duplicate token {token!r}")
            seen.add(token)
            if not np.any(vec):
                skipped += 1
                continue
            words.append(token)
            rows.append(vec)
    if skipped:
        warnings.warn(f"{path}: skipped {skipped} zero-norm vector(s)")
    if declared is not None and declared != len(words) + skipped:
        log.warning("%s: header declares %d vectors, read %d", path, declared, len(words) + skipped)
    if not words:
        raise SpaceFormatError(f"{path}: no vectors")
    return EmbeddingSpace(words, np.vstack(rows))


def save_space(space: EmbeddingSpace, path, format: str = "headered", digits: int = 6) -> None:
    if len(space) == 0:
        raise SpaceFormatError("refusing to save an empty embedding space")
    for w in space.words:
        if not w or any(c.isspace() for c in w):
            raise SpaceFormatError(f"token {w!r} contains whitespace")
    fmt = f"%.{digits}g"
    with open(path, "w", encoding="utf-8") as f:
        if format == "headered":
            f.write(f"{len(space)} {space.dim}\n")
        elif format != "headerless":
            raise ValueError(f"unknown space format {format!r}")
        for w, row in zip(space.words, space.matrix):
            f.write(w + " " + " ".join(fmt % x for x in row) + "\n")
