"""Skip-gram with negative sampling over walk corpora."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import expit

from .alias import alias_draw, next_int, stream_state, vose_build
from .vecspace import EmbeddingSpace
from .walker import WalkCorpus


@dataclass(frozen=True)
class SgnsConfig:
    dim: int = 100
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    noise_exponent: float = 0.75
    min_count: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("dim, window, negatives and epochs must all be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.min_count < 0:
            raise ValueError("min_count must be non-negative")


@dataclass
class Vocab:
    words: list
    counts: np.ndarray
    index: dict = field(init=False)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self):
        return len(self.words)

    def noise_distribution(self, exponent: float = 0.75) -> np.ndarray:
        w = self.counts.astype(np.float64) ** exponent
        return w / w.sum()


def build_vocab(corpus: WalkCorpus, min_count: int = 0) -> Vocab:
    """Count node occurrences; order by count descending, ties by first appearance."""
    counts = np.bincount(corpus.tokens, minlength=len(corpus.nodes))
    seen = np.zeros(len(corpus.nodes), dtype=bool)
    seen[corpus.tokens] = True
    keep = [i for i in range(len(corpus.nodes)) if seen[i] and counts[i] >= max(min_count, 1)]
    keep.sort(key=lambda i: -counts[i])
    if not keep:
        raise ValueError("vocabulary is empty after min_count filtering")
    return Vocab([corpus.nodes[i] for i in keep], counts[keep].astype(np.int64))


def _neg_log_sigmoid(x):
    # -log(sigmoid(x)), stable for large |x|
    return np.logaddexp(0.0, -x)


def pair_loss(u, v, negatives) -> float:
    """``-log s(u.v) - sum_k log s(-u.n_k)`` with s the logistic function."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    n = np.atleast_2d(np.asarray(negatives, dtype=np.float64))
    if v.shape != u.shape or (n.size and n.shape[1] != u.shape[0]):
        raise ValueError("dimension mismatch between center, context and negative vectors")
    loss = _neg_log_sigmoid(u @ v)
    if n.size:
        loss += _neg_log_sigmoid(-(n @ u)).sum()
    return float(loss)


def pair_loss_grad(u, v, negatives):
    """Gradients of :func:`pair_loss` w.r.t. ``u``, ``v`` and each negative."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    n = np.atleast_2d(np.asarray(negatives, dtype=np.float64))
    g_pos = expit(u @ v) - 1.0
    g_neg = expit(n @ u)
    gu = g_pos * v + g_neg @ n
    gv = g_pos * u
    gn = g_neg[:, None] * u[None, :]
    return gu, gv, gn


@njit(cache=True)
def _sig(x):
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def _nls(x):
    # -log(sigmoid(x))
    if x > 0:
        return np.log1p(np.exp(-x))
    return -x + np.log1p(np.exp(x))


@njit(cache=True, nogil=True)
def _train_shard(tokens, offsets, lo, hi, W, C, nprob, nalias, window, negatives,
                 alpha0, epoch_start, total_work, nshards, seed, stream, stats):
    """One epoch over walks ``lo..hi``; stats <- (loss sum, pair count)."""
    dim = W.shape[1]
    V = W.shape[0]
    state = np.zeros(1, dtype=np.uint64)
    state[0] = stream_state(seed, stream)
    grad_u = np.zeros(dim)
    done = 0
    loss = 0.0
    pairs = 0
    min_alpha = alpha0 * 1e-4
    for w in range(lo, hi):
        s = offsets[w]
        L = offsets[w + 1] - s
        alpha = alpha0 * (1.0 - (epoch_start + done * nshards) / total_work)
        if alpha < min_alpha:
            alpha = min_alpha
        for i in range(L):
            center = tokens[s + i]
            r = window - next_int(state, window)
            for j in range(max(0, i - r), min(L, i + r + 1)):
                if j == i:
                    continue
                ctx = tokens[s + j]
                for d in range(dim):
                    grad_u[d] = 0.0
                for k in range(negatives + 1):
                    if k == 0:
                        tgt = ctx
                        label = 1.0
                    else:
                        tgt = alias_draw(nprob, nalias, 0, V, state)
                        label = 0.0
                    dot = 0.0
                    for d in range(dim):
                        dot += W[center, d] * C[tgt, d]
                    if label > 0:
                        loss += _nls(dot)
                    else:
                        loss += _nls(-dot)
                    g = (_sig(dot) - label) * alpha
                    for d in range(dim):
                        grad_u[d] += g * C[tgt, d]
                        C[tgt, d] -= g * W[center, d]
                for d in range(dim):
                    W[center, d] -= grad_u[d]
                pairs += 1
        done += L
    stats[0] = loss
    stats[1] = pairs


@dataclass
class SgnsModel:
    """Trained vectors plus per-epoch diagnostics.

    ``epoch_losses`` is the running mean pair loss seen during each epoch;
    ``epoch_objectives`` (when tracked) is :func:`corpus_objective` evaluated
    with frozen parameters after each epoch.
    """

    vocab: Vocab
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    noise: np.ndarray
    config: SgnsConfig
    epoch_losses: list = field(default_factory=list)
    epoch_objectives: list = field(default_factory=list)


def _encode(corpus: WalkCorpus, vocab: Vocab):
    remap = np.full(len(corpus.nodes), -1, dtype=np.int64)
    for i, n in enumerate(corpus.nodes):
        remap[i] = vocab.index.get(n, -1)
    ids = remap[corpus.tokens]
    keep = ids >= 0
    walk_of = np.repeat(np.arange(len(corpus)), np.diff(corpus.offsets))
    lengths = np.bincount(walk_of[keep], minlength=len(corpus))
    offsets = np.zeros(len(corpus) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)
    return ids[keep].astype(np.int64), offsets


def _objective(W, C, tokens, offsets, noise, window, negatives):
    walk_of = np.repeat(np.arange(offsets.size - 1), np.diff(offsets))
    neg_term = negatives * (np.logaddexp(0.0, W @ C.T) @ noise)
    total = 0.0
    weight = 0.0
    for d in range(1, window + 1):
        same = walk_of[:-d] == walk_of[d:]
        a, b = tokens[:-d][same], tokens[d:][same]
        # a dynamic window of radius r ~ U{1..window} reaches distance d w.p. this
        reach = (window - d + 1) / window
        for c, x in ((a, b), (b, a)):
            pos = np.logaddexp(0.0, -np.einsum("ij,ij->i", W[c], C[x]))
            total += reach * (pos.sum() + neg_term[c].sum())
            weight += reach * c.size
    return total / weight if weight else 0.0


def corpus_objective(model: "SgnsModel", corpus: WalkCorpus) -> float:
    """Expected per-pair loss over ``corpus`` with frozen parameters.

    Every (center, context) pair is weighted by the probability that the
    shrunk window includes it, and the negative term is taken in
    expectation under the noise distribution.
    """
    tokens, offsets = _encode(corpus, model.vocab)
    return _objective(model.input_vectors, model.output_vectors, tokens, offsets, model.noise,
                      model.config.window, model.config.negatives)


def train(corpus: WalkCorpus, config: SgnsConfig = SgnsConfig(), threads: int = 1,
          track_objective: bool = False) -> SgnsModel:
    """Train node vectors; ``threads=1`` is deterministic for a fixed seed.

    With more threads, walks are sharded and updated without locking, so
    results vary between runs.
    """
    vocab = build_vocab(corpus, config.min_count)
    tokens, offsets = _encode(corpus, vocab)
    rng = np.random.default_rng(config.seed)
    V, dim = len(vocab), config.dim
    W = (rng.random((V, dim)) - 0.5) / dim
    C = np.zeros((V, dim))
    noise = vocab.noise_distribution(config.noise_exponent)
    nprob, nalias = vose_build(noise)
    total_work = float(max(1, tokens.size * config.epochs))
    threads = max(1, min(int(threads), len(corpus)))
    bounds = np.linspace(0, len(corpus), threads + 1).astype(np.int64)
    model = SgnsModel(vocab, W, C, noise, config)
    for epoch in range(config.epochs):
        stats = np.zeros((threads, 2))

        def run(k):
            _train_shard(tokens, offsets, bounds[k], bounds[k + 1], W, C, nprob, nalias,
                         config.window, config.negatives, config.learning_rate, epoch * tokens.size,
                         total_work, threads, config.seed, epoch * threads + k, stats[k])

        if threads == 1:
            run(0)
        else:
            with ThreadPoolExecutor(threads) as ex:
                list(ex.map(run, range(threads)))
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(C))):
            raise FloatingPointError(f"non-finite vectors after epoch {epoch}")
        pairs = stats[:, 1].sum()
        model.epoch_losses.append(float(stats[:, 0].sum() / pairs) if pairs else 0.0)
        if track_objective:
            model.epoch_objectives.append(_objective(W, C, tokens, offsets, noise,
                                                     config.window, config.negatives))
    return model


def export_space(model: SgnsModel, use: str = "input") -> EmbeddingSpace:
    if use == "input":
        m = model.input_vectors.copy()
    elif use == "average":
        m = (model.input_vectors + model.output_vectors) / 2.0
    else:
        raise ValueError(f"use must be 'input' or 'average', got {use!r}")
    return EmbeddingSpace(model.vocab.words, m)
