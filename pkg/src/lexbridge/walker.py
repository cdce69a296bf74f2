"""Uniform (DeepWalk) and second-order biased (node2vec) random walks."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .alias import alias_draw, next_float, stream_state, vose_build
from .graph import KnowledgeGraph


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 80
    p: float = 1.0
    q: float = 1.0
    mode: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("uniform", "biased"):
            raise ValueError(f"mode must be 'uniform' or 'biased', got {self.mode!r}")
        if not self.p > 0 or not self.q > 0:
            raise ValueError("p and q must be positive")
        if self.walk_length < 1 or self.walks_per_node < 1:
            raise ValueError("walk_length and walks_per_node must be >= 1")

    @property
    def biased(self) -> bool:
        return self.mode == "biased"


@dataclass
class WalkCorpus:
    """Walks stored flat: walk ``i`` is ``tokens[offsets[i]:offsets[i+1]]``."""

    nodes: list
    tokens: np.ndarray
    offsets: np.ndarray
    config: Optional[WalkConfig] = None

    def __len__(self):
        return len(self.offsets) - 1

    def walk(self, i: int) -> list:
        return [self.nodes[t] for t in self.tokens[self.offsets[i]:self.offsets[i + 1]]]

    @property
    def walks(self) -> list:
        return [self.walk(i) for i in range(len(self))]

    @classmethod
    def from_walks(cls, walks, config=None) -> "WalkCorpus":
        index, nodes, toks, offsets = {}, [], [], [0]
        for w in walks:
            for n in w:
                if n not in index:
                    index[n] = len(nodes)
                    nodes.append(n)
                toks.append(index[n])
            offsets.append(len(toks))
        return cls(nodes, np.asarray(toks, dtype=np.int32), np.asarray(offsets, dtype=np.int64), config)


def transition_distribution(graph: KnowledgeGraph, prev: Optional[int], current: int,
                            config: WalkConfig):
    """Next-step distribution from ``current`` given the previous node.

    Returns ``(neighbors, probabilities)``. Uniform mode and the first step
    of a walk (``prev is None``) are weight-proportional; biased mode scales
    an edge weight by 1/p for the return edge, 1 for neighbors adjacent to
    ``prev`` and 1/q otherwise.
    """
    adj = graph.adjacency[current]
    if not adj:
        raise LookupError(f"node {graph.nodes[current]!r} has no neighbors")
    nbrs = [j for j, _ in adj]
    if not config.biased or prev is None:
        w = np.array([w for _, w in adj], dtype=np.float64)
    else:
        prev_nbrs = {j for j, _ in graph.adjacency[prev]}
        w = np.empty(len(adj))
        for k, (x, wx) in enumerate(adj):
            if x == prev:
                w[k] = wx / config.p
            elif x in prev_nbrs:
                w[k] = wx
            else:
                w[k] = wx / config.q
    return nbrs, w / w.sum()


class _Tables:
    """CSR arrays plus one first-order alias table per node."""

    def __init__(self, graph: KnowledgeGraph):
        self.indptr, self.indices, self.weights = graph.csr()
        self.aprob, self.aalias = _node_alias_tables(self.indptr, self.weights)


@njit(cache=True)
def _node_alias_tables(indptr, weights):
    aprob = np.ones(weights.shape[0], dtype=np.float64)
    aalias = np.zeros(weights.shape[0], dtype=np.int64)
    for i in range(indptr.shape[0] - 1):
        s, e = indptr[i], indptr[i + 1]
        if e > s:
            pr, al = vose_build(weights[s:e])
            aprob[s:e] = pr
            aalias[s:e] = al
    return aprob, aalias


@njit(cache=True)
def _is_neighbor(indptr, indices, a, x):
    row = indices[indptr[a]:indptr[a + 1]]
    k = np.searchsorted(row, x)
    return k < row.shape[0] and row[k] == x


@njit(cache=True)
def _step(indptr, indices, weights, aprob, aalias, prev, cur, p, q, biased, state):
    s = indptr[cur]
    d = indptr[cur + 1] - s
    if d == 0:
        return -1
    if not biased or prev < 0:
        return indices[s + alias_draw(aprob, aalias, s, d, state)]
    total = 0.0
    for k in range(d):
        x = indices[s + k]
        w = weights[s + k]
        if x == prev:
            total += w / p
        elif _is_neighbor(indptr, indices, prev, x):
            total += w
        else:
            total += w / q
    u = next_float(state) * total
    acc = 0.0
    for k in range(d):
        x = indices[s + k]
        w = weights[s + k]
        if x == prev:
            acc += w / p
        elif _is_neighbor(indptr, indices, prev, x):
            acc += w
        else:
            acc += w / q
        if u < acc:
            return x
    return indices[s + d - 1]


@njit(cache=True, nogil=True)
def _walk_block(indptr, indices, weights, aprob, aalias, starts, rounds, wpn,
                walk_length, p, q, biased, seed, out, lengths, lo, hi):
    state = np.zeros(1, dtype=np.uint64)
    for w in range(lo, hi):
        start = starts[w]
        state[0] = stream_state(seed, start * wpn + rounds[w])
        prev = -1
        cur = start
        out[w, 0] = cur
        n = 1
        while n < walk_length:
            nxt = _step(indptr, indices, weights, aprob, aalias, prev, cur, p, q, biased, state)
            if nxt < 0:
                break
            out[w, n] = nxt
            prev = cur
            cur = nxt
            n += 1
        lengths[w] = n


@njit(cache=True)
def _sample_steps(indptr, indices, weights, aprob, aalias, prev, cur, p, q, biased, seed, n):
    state = np.zeros(1, dtype=np.uint64)
    state[0] = stream_state(seed, 0)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = _step(indptr, indices, weights, aprob, aalias, prev, cur, p, q, biased, state)
    return out


def sample_next(graph: KnowledgeGraph, prev: Optional[int], current: int, config: WalkConfig,
                n: int, seed: int = 0) -> np.ndarray:
    """Draw ``n`` next-step node indices with the same sampler the walks use."""
    t = _Tables(graph)
    return _sample_steps(t.indptr, t.indices, t.weights, t.aprob, t.aalias,
                         -1 if prev is None else prev, current, float(config.p),
                         float(config.q), config.biased, seed, n)


def generate_walks(graph: KnowledgeGraph, config: WalkConfig, threads: int = 1) -> WalkCorpus:
    """Run ``walks_per_node`` walks from every non-isolated node.

    Each walk's RNG stream is derived from (seed, start node, round), so the
    corpus is identical for any thread count. Start order is shuffled once
    per round with a generator seeded from ``config.seed``.
    """
    t = _Tables(graph)
    deg = np.diff(t.indptr)
    active = np.flatnonzero(deg > 0)
    if active.size == 0:
        raise ValueError("graph has no non-isolated nodes to start walks from")
    rng = np.random.default_rng(config.seed)
    starts, rounds = [], []
    for r in range(config.walks_per_node):
        starts.append(rng.permutation(active))
        rounds.append(np.full(active.size, r))
    starts = np.concatenate(starts).astype(np.int64)
    rounds = np.concatenate(rounds).astype(np.int64)
    n = starts.size
    out = np.full((n, config.walk_length), -1, dtype=np.int32)
    lengths = np.zeros(n, dtype=np.int64)
    args = (t.indptr, t.indices, t.weights, t.aprob, t.aalias, starts, rounds,
            config.walks_per_node, config.walk_length, float(config.p), float(config.q),
            config.biased, config.seed, out, lengths)
    threads = max(1, int(threads))
    if threads == 1:
        _walk_block(*args, 0, n)
    else:
        bounds = np.linspace(0, n, threads + 1).astype(np.int64)
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(lambda k: _walk_block(*args, bounds[k], bounds[k + 1]), range(threads)))
    offsets = np.zeros(n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)
    mask = np.arange(config.walk_length)[None, :] < lengths[:, None]
    return WalkCorpus(list(graph.nodes), out[mask], offsets, config)


def save_walks(corpus: WalkCorpus, path) -> None:
    for n in corpus.nodes:
        if any(c.isspace() for c in n):
            raise ValueError(f"node id {n!r} contains whitespace; cannot write walk file")
    nodes = corpus.nodes
    with open(path, "w", encoding="utf-8") as f:
        for i in range(len(corpus)):
            f.write(" ".join(nodes[t] for t in corpus.tokens[corpus.offsets[i]:corpus.offsets[i + 1]]))
            f.write("\n")


def load_walks(path) -> WalkCorpus:
    with open(path, encoding="utf-8") as f:
        walks = [line.split() for line in f if line.strip()]
    if not walks:
        raise ValueError(f"{path}: empty walk corpus")
    return WalkCorpus.from_walks(walks)

