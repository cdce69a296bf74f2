"""Word-similarity evaluation: in-space, cross-space, bridge sweeps, significance."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .bridge import ResolutionError, maxsim_similarity, select_bridges
from .graph import LemmaMap
from .mapping import LsMap, SpaceMap, fit_cca, fit_ls, project
from .vecspace import EmbeddingSpace, cosine


class UndefinedCorrelationWarning(RuntimeWarning):
    pass


@dataclass
class SimilarityDataset:
    name: str
    pairs: list
    scale: Optional[tuple] = None

    def __post_init__(self):
        seen = set()
        for w1, w2, gold in self.pairs:
            key = frozenset((w1, w2)) if w1 != w2 else (w1,)
            if key in seen:
                raise ValueError(f"{self.name}: duplicate pair ({w1}, {w2})")
            seen.add(key)
            if self.scale is not None and not self.scale[0] <= gold <= self.scale[1]:
                raise ValueError(f"{self.name}: score {gold} for ({w1}, {w2}) outside {self.scale}")

    def __len__(self):
        return len(self.pairs)


def load_dataset(path, name: Optional[str] = None, scale: Optional[tuple] = None) -> SimilarityDataset:
    """Read ``word1<TAB>word2<TAB>score`` lines.

    A ``# scale: <low> <high>`` comment declares the gold bounds unless
    ``scale`` is passed explicitly.
    """
    pairs = []
    declared = None
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.lower().startswith("scale"):
                    lo, hi = body[5:].lstrip(":= ").split()[:2]
                    declared = (float(lo), float(hi))
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) < 3:
                raise ValueError(f"{path}: line {lineno}: expected word1<TAB>word2<TAB>score")
            try:
                gold = float(parts[2])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: bad score {parts[2]!r}") from None
            pairs.append((parts[0].strip(), parts[1].strip(), gold))
    return SimilarityDataset(name or Path(path).stem, pairs, scale or declared)


def _check_pair(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-d vectors of equal length")
    if x.size < 2:
        raise ValueError("need at least two observations")
    return x, y


def pearson(x, y) -> float:
    """Product-moment correlation; NaN with a warning if an input is constant."""
    x, y = _check_pair(x, y)
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = np.sum(dx * dx), np.sum(dy * dy)
    if sxx == 0 or syy == 0:
        warnings.warn("correlation undefined for constant input", UndefinedCorrelationWarning,
                      stacklevel=2)
        return float("nan")
    r = np.sum(dx * dy) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def average_ranks(x) -> np.ndarray:
    """1-based ranks, ties sharing the mean of the positions they occupy."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size)
    sx = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    x, y = _check_pair(x, y)
    rx, ry = average_ranks(x), average_ranks(y)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UndefinedCorrelationWarning)
        r = pearson(rx, ry)
    if np.isnan(r):
        warnings.warn("correlation undefined for constant input", UndefinedCorrelationWarning,
                      stacklevel=2)
    return r


@dataclass
class PairRecord:
    w1: str
    w2: str
    gold: float
    pred: float
    direction: str = "in-space"
    provenance: str = ""


@dataclass
class EvalReport:
    name: str
    pearson: float
    spearman: float
    n_evaluated: int
    n_oov: int
    records: list = field(default_factory=list)
    scale: Optional[tuple] = None

    @property
    def total(self) -> int:
        return self.n_evaluated + self.n_oov


def _report(name, records, n_oov, scale, imputed=()) -> EvalReport:
    pts = list(records) + list(imputed)
    if len(pts) < 2:
        raise ValueError(f"{name}: fewer than two evaluable pairs ({len(pts)} evaluable, "
                         f"{n_oov} out of vocabulary)")
    gold = [r.gold for r in pts]
    pred = [r.pred for r in pts]
    return EvalReport(name, pearson(gold, pred), spearman(gold, pred), len(records), n_oov,
                      list(records), scale)


def eval_in_space(space: EmbeddingSpace, dataset: SimilarityDataset, sim: str = "cosine",
                  lemma_map: Optional[LemmaMap] = None, oov: str = "exclude") -> EvalReport:
    """Correlate gold scores with similarities computed inside one space.

    ``sim="maxsim"`` treats ``space`` as a synset space and needs
    ``lemma_map``. OOV pairs are excluded and counted, or scored 0.0 with
    ``oov="impute"``.
    """
    if sim not in ("cosine", "maxsim"):
        raise ValueError(f"sim must be 'cosine' or 'maxsim', got {sim!r}")
    if sim == "maxsim" and lemma_map is None:
        raise ValueError("maxsim similarity needs a lemma map")
    if oov not in ("exclude", "impute"):
        raise ValueError(f"oov must be 'exclude' or 'impute', got {oov!r}")
    prov = getattr(space, "provenance", None)
    records, imputed, n_oov = [], [], 0
    for w1, w2, gold in dataset.pairs:
        try:
            if sim == "cosine":
                i, j = space.find(w1), space.find(w2)
                if i is None or j is None:
                    raise ResolutionError(w1 if i is None else w2)
                pred = cosine(space.matrix[i], space.matrix[j])
                tag = f"{prov[i]}/{prov[j]}" if prov else ""
            else:
                pred = maxsim_similarity(w1, w2, lemma_map, space)
                tag = "kb"
        except ResolutionError:
            n_oov += 1
            if oov == "impute":
                imputed.append(PairRecord(w1, w2, gold, 0.0, "imputed"))
            continue
        records.append(PairRecord(w1, w2, gold, pred, "in-space", tag))
    return _report(dataset.name, records, n_oov, dataset.scale, imputed)


class _CrossResolver:
    def __init__(self, space_map, corpus_space, kb_space, lemma_map, kb_resolution):
        self.map = space_map
        self.corpus = corpus_space
        self.kb = kb_space
        self.lemma_map = lemma_map
        self.kb_resolution = kb_resolution
        self._kb_cache = {}

    def corpus_vec(self, w):
        i = self.corpus.find(w)
        if i is None:
            raise ResolutionError(w)
        v = self.corpus.matrix[i]
        return v if isinstance(self.map, LsMap) else project(self.map, v, "corpus")

    def kb_vecs(self, w):
        if w not in self._kb_cache:
            if w not in self.lemma_map:
                raise ResolutionError(w)
            rows = [r for r in (self.kb.index.get(s) for s in self.lemma_map.synsets(w))
                    if r is not None]
            if not rows:
                raise ResolutionError(w)
            if self.kb_resolution == "first":
                rows = rows[:1]
            self._kb_cache[w] = project(self.map, self.kb.matrix[rows], "kb")
        return self._kb_cache[w]

    def similarity(self, w_kb, w_corpus):
        c = self.corpus_vec(w_corpus)
        return max(cosine(v, c) for v in self.kb_vecs(w_kb))


def eval_cross_space(space_map: SpaceMap, corpus_space: EmbeddingSpace, kb_space: EmbeddingSpace,
                     lemma_map: LemmaMap, dataset: SimilarityDataset, directions: str = "both",
                     combine: str = "pool", kb_resolution: str = "maxsim") -> EvalReport:
    """Score each pair as the cosine between a mapped KB vector and a corpus vector.

    Forward uses the first word on the KB side and the second on the corpus
    side; reverse swaps them. With ``directions="both"`` the two directions
    are pooled as separate datapoints (``combine="pool"``) or averaged per
    pair (``combine="average"``). Polysemous KB words take the synset whose
    mapped vector is closest to the corpus vector (``kb_resolution="maxsim"``)
    or their first synset.
    """
    if directions not in ("forward", "reverse", "both"):
        raise ValueError(f"directions must be forward, reverse or both, got {directions!r}")
    if combine not in ("pool", "average"):
        raise ValueError(f"combine must be 'pool' or 'average', got {combine!r}")
    if kb_resolution not in ("maxsim", "first"):
        raise ValueError(f"kb_resolution must be 'maxsim' or 'first', got {kb_resolution!r}")
    res = _CrossResolver(space_map, corpus_space, kb_space, lemma_map, kb_resolution)
    dirs = ["forward", "reverse"] if directions == "both" else [directions]
    records, n_oov = [], 0
    for w1, w2, gold in dataset.pairs:
        preds = []
        for d in dirs:
            a, b = (w1, w2) if d == "forward" else (w2, w1)
            try:
                preds.append((d, res.similarity(a, b)))
            except ResolutionError:
                if combine == "pool":
                    n_oov += 1
        if combine == "pool":
            records.extend(PairRecord(w1, w2, gold, p, d, "cross") for d, p in preds)
        elif preds:
            records.append(PairRecord(w1, w2, gold, float(np.mean([p for _, p in preds])),
                                      "+".join(d for d, _ in preds), "cross"))
        else:
            n_oov += 1
    return _report(dataset.name, records, n_oov, dataset.scale)


@dataclass(frozen=True)
class SweepRow:
    method: str
    size: int
    dataset: str
    r: float
    rho: float


def bridge_sweep(corpus_space: EmbeddingSpace, kb_spaces, lemma_map: LemmaMap,
                 datasets: Sequence[SimilarityDataset], sizes: Sequence[int],
                 methods: Sequence[str] = ("ls", "cca"), lam: float = 1.0,
                 k: Optional[int] = None, reg: Optional[float] = None,
                 pos_filter=("noun", "adjective"), frequency_sorted: bool = True,
                 directions: str = "both") -> list[SweepRow]:
    """Refit each map on growing prefixes of the bridge order and evaluate.

    ``kb_spaces`` maps a label (e.g. ``deepwalk``) to a KB space; a bare
    space is labelled ``kb``. Method labels are ``<kb label>+<method>``.
    """
    if isinstance(kb_spaces, EmbeddingSpace):
        kb_spaces = {"kb": kb_spaces}
    sizes = list(sizes)
    if not sizes or sizes != sorted(sizes) or sizes[0] < 2:
        raise ValueError("sizes must be ascending integers >= 2")
    for m in methods:
        if m not in ("ls", "cca"):
            raise ValueError(f"unknown mapping method {m!r}")
    rows = []
    for label, kb in kb_spaces.items():
        pool = select_bridges(lemma_map, corpus_space, kb, pos_filter, None, frequency_sorted)
        if sizes[-1] > len(pool):
            raise ValueError(f"{label}: size {sizes[-1]} exceeds the {len(pool)} available bridges")
        for size in sizes:
            bridges = pool.prefix(size)
            for m in methods:
                fitted = fit_ls(bridges, lam) if m == "ls" else fit_cca(
                    bridges, None if k is None else min(k, size - 1), reg)
                for ds in datasets:
                    rep = eval_cross_space(fitted, corpus_space, kb, lemma_map, ds, directions)
                    rows.append(SweepRow(f"{label}+{m}", size, ds.name, rep.pearson, rep.spearman))
    return rows


def save_sweep(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("# method\tsize\tdataset\tr\trho\n")
        for r in rows:
            f.write(f"{r.method}\t{r.size}\t{r.dataset}\t{r.r:.9g}\t{r.rho:.9g}\n")


def load_sweep(path) -> list[SweepRow]:
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip() and not line.startswith("#"):
                m, size, ds, r, rho = line.rstrip("\n").split("\t")
                rows.append(SweepRow(m, int(size), ds, float(r), float(rho)))
    return rows


def save_records(report: EvalReport, path) -> None:
    """One ``w1<TAB>w2<TAB>gold<TAB>pred<TAB>direction`` line per datapoint."""
    with open(path, "w", encoding="utf-8") as f:
        scale = "" if report.scale is None else f"\tscale={report.scale[0]:g},{report.scale[1]:g}"
        f.write(f"# dataset={report.name}\tpearson={report.pearson:.9g}\t"
                f"spearman={report.spearman:.9g}\tevaluated={report.n_evaluated}\t"
                f"oov={report.n_oov}{scale}\n")
        for r in report.records:
            f.write(f"{r.w1}\t{r.w2}\t{r.gold:.9g}\t{r.pred:.9g}\t{r.direction}\n")


def load_records(path) -> EvalReport:
    meta, records = {}, []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                for kv in line.lstrip("# ").split("\t"):
                    if "=" in kv:
                        key, val = kv.split("=", 1)
                        meta[key] = val
                continue
            w1, w2, gold, pred, direction = line.split("\t")
            records.append(PairRecord(w1, w2, float(gold), float(pred), direction))
    scale = tuple(float(v) for v in meta["scale"].split(",")) if "scale" in meta else None
    if "pearson" in meta:
        return EvalReport(meta.get("dataset", ""), float(meta["pearson"]), float(meta["spearman"]),
                          int(meta["evaluated"]), int(meta["oov"]), records, scale)
    return _report(meta.get("dataset", ""), records, 0, scale)


@dataclass(frozen=True)
class Significance:
    t: float
    p: float
    n: int


def paired_t_test(errors_a, errors_b) -> Significance:
    """One-tailed paired t-test that system b has lower error than system a."""
    a = np.asarray(errors_a, dtype=np.float64)
    b = np.asarray(errors_b, dtype=np.float64)
    if a.shape != b.shape or a.size < 2:
        raise ValueError("need at least two paired observations")
    d = a - b
    n = d.size
    mean = d.mean()
    sd = d.std(ddof=1)
    if sd == 0:
        if mean == 0:
            return Significance(0.0, 0.5, n)
        return Significance(float(np.inf if mean > 0 else -np.inf), 0.0 if mean > 0 else 1.0, n)
    t = mean / (sd / np.sqrt(n))
    return Significance(float(t), float(stats.t.sf(t, n - 1)), n)


def _scaled_errors(records, scale):
    gold = np.array([r.gold for r in records])
    if scale is None:
        lo, hi = gold.min(), gold.max()
    else:
        lo, hi = scale
    g = (gold - lo) / (hi - lo) if hi > lo else np.zeros_like(gold)
    pred = (np.array([r.pred for r in records]) + 1.0) / 2.0
    return np.abs(g - pred)


def paired_significance(report_a: EvalReport, report_b: EvalReport) -> Significance:
    """Is ``report_b`` better than ``report_a`` on the datapoints both evaluate?

    Gold scores are rescaled to [0, 1] with the dataset bounds and cosines
    via (c + 1) / 2; the test compares per-datapoint absolute errors.
    """
    a = {(r.w1, r.w2, r.direction): r for r in report_a.records}
    b = {(r.w1, r.w2, r.direction): r for r in report_b.records}
    shared = [key for key in a if key in b]
    if not shared:
        raise ValueError("the two reports share no evaluated pairs")
    scale = report_a.scale or report_b.scale
    if scale is None:
        golds = [a[k].gold for k in shared]
        scale = (min(golds), max(golds))
    ea = _scaled_errors([a[k] for k in shared], scale)
    eb = _scaled_errors([b[k] for k in shared], scale)
    return paired_t_test(ea, eb)


def format_report(report: EvalReport) -> str:
    return (f"{report.name}: r={report.pearson:.4f} rho={report.spearman:.4f} "
            f"evaluated={report.n_evaluated} oov={report.n_oov}")


def format_comparison(rows: Sequence[tuple[str, EvalReport]]) -> str:
    """Table with one line per labelled report: OOV, r, rho."""
    width = max(len(label) for label, _ in rows)
    lines = [f"{'':<{width}}  {'OOV':>6}  {'r':>6}  {'rho':>6}"]
    for label, rep in rows:
        lines.append(f"{label:<{width}}  {rep.n_oov:>6d}  {rep.pearson:>6.3f}  {rep.spearman:>6.3f}")
    return "\n".join(lines)
