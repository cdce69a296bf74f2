"""Knowledge graph and lemma map loading.

Nodes are opaque identifiers (typically synset ids); the graph is stored as
per-node adjacency lists with positive weights. Node order is the order of
first appearance in the input file.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)

POS_TAGS = {"noun", "adjective", "verb", "adverb"}
_POS_ALIASES = {
    "n": "noun", "noun": "noun",
    "a": "adjective", "s": "adjective", "adj": "adjective", "adjective": "adjective",
    "v": "verb", "verb": "verb",
    "r": "adverb", "adv": "adverb", "adverb": "adverb",
}


class GraphFormatError(ValueError):
    """Raised when an edge list or lemma map file is malformed."""


def normalize_pos(tag: str) -> str:
    try:
        return _POS_ALIASES[tag.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown part-of-speech tag {tag!r}") from None


class KnowledgeGraph:
    """Weighted graph over opaque node identifiers.

    ``adjacency[i]`` is a list of ``(neighbor_index, weight)`` sorted by
    neighbor index. Undirected graphs hold every edge in both lists.
    """

    def __init__(self, nodes: list[str], adjacency: list[list[tuple[int, float]]],
                 directed: bool = False):
        self.nodes = list(nodes)
        self.adjacency = adjacency
        self.directed = directed
        self.index = {n: i for i, n in enumerate(self.nodes)}
        self._csr = None

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], directed: bool = False,
                   nodes: Iterable[str] = ()) -> "KnowledgeGraph":
        """Build a graph from ``(a, b)`` or ``(a, b, weight)`` tuples.

        Duplicate edges are merged by summing weights; self-loops are dropped
        (the node is still registered).
        """
        index: dict[str, int] = {}
        order: list[str] = []

        def intern(n):
            n = str(n)
            if n not in index:
                index[n] = len(order)
                order.append(n)
            return index[n]

        for n in nodes:
            intern(n)
        weights: dict[tuple[int, int], float] = {}
        for e in edges:
            a, b = intern(e[0]), intern(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if not w > 0 or not np.isfinite(w):
                raise GraphFormatError(f"non-positive weight {w} on edge {e[0]!r}-{e[1]!r}")
            if a == b:
                log.warning("dropping self-loop on %s", e[0])
                continue
            key = (a, b) if directed or a < b else (b, a)
            weights[key] = weights.get(key, 0.0) + w

        adjacency: list[list[tuple[int, float]]] = [[] for _ in order]
        for (a, b), w in weights.items():
            adjacency[a].append((b, w))
            if not directed:
                adjacency[b].append((a, w))
        for adj in adjacency:
            adj.sort()
        return cls(order, adjacency, directed)

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node):
        return node in self.index

    def neighbors(self, i: int) -> list[int]:
        return [j for j, _ in self.adjacency[i]]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def weight(self, i: int, j: int) -> float:
        """Weight of edge i->j, or 0.0 when absent."""
        for k, w in self.adjacency[i]:
            if k == j:
                return w
        return 0.0

    @property
    def edge_count(self) -> int:
        total = sum(len(a) for a in self.adjacency)
        return total if self.directed else total // 2

    def csr(self):
        """Return cached ``(indptr, indices, weights)`` arrays, neighbors sorted per row."""
        if self._csr is None:
            indptr = np.zeros(len(self.nodes) + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(a) for a in self.adjacency])
            indices = np.empty(indptr[-1], dtype=np.int64)
            weights = np.empty(indptr[-1], dtype=np.float64)
            for i, adj in enumerate(self.adjacency):
                for k, (j, w) in enumerate(adj):
                    indices[indptr[i] + k] = j
                    weights[indptr[i] + k] = w
            self._csr = (indptr, indices, weights)
        return self._csr

    def edges(self):
        """Yield each edge once as ``(i, j, weight)``."""
        for i, adj in enumerate(self.adjacency):
            for j, w in adj:
                if self.directed or i < j:
                    yield i, j, w


def _parse_edge_lines(lines: Iterable[str]):
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 1:
            yield lineno, (parts[0].strip(),)
            continue
        if len(parts) not in (2, 3) or not parts[0].strip() or not parts[1].strip():
            raise GraphFormatError(f"line {lineno}: expected node_a<TAB>node_b[<TAB>weight], got {line!r}")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: bad weight {parts[2]!r}") from None
            if not w > 0 or not np.isfinite(w):
                raise GraphFormatError(f"line {lineno}: non-positive weight {parts[2]!r}")
            yield lineno, (parts[0].strip(), parts[1].strip(), w)
        else:
            yield lineno, (parts[0].strip(), parts[1].strip())


def load_graph(path, directed: bool = False) -> KnowledgeGraph:
    """Load a tab-separated edge list.

    A line holding a single field declares a (possibly isolated) node.
    """
    nodes, edges = [], []
    with open(path, encoding="utf-8") as f:
        for _, rec in _parse_edge_lines(f):
            if len(rec) == 1:
                nodes.append(rec[0])
            else:
                nodes.extend(rec[:2])
                edges.append(rec)
    if not nodes:
        raise GraphFormatError(f"{path}: empty edge list")
    return KnowledgeGraph.from_edges(edges, directed=directed, nodes=nodes)


def save_graph(graph: KnowledgeGraph, path) -> None:
    # Declaring every node first pins first-appearance order on reload.
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# {'directed' if graph.directed else 'undirected'} graph: "
                f"{len(graph)} nodes, {graph.edge_count} edges\n")
        for n in graph.nodes:
            f.write(n + "\n")
        for i, j, w in graph.edges():
            if w == 1.0:
                f.write(f"{graph.nodes[i]}\t{graph.nodes[j]}\n")
            else:
                f.write(f"{graph.nodes[i]}\t{graph.nodes[j]}\t{w:.17g}\n")


@dataclass(frozen=True)
class DegreeStats:
    nodes: int
    edges: int
    min_degree: int
    max_degree: int
    mean_degree: float
    isolated: int


def degree_stats(graph: KnowledgeGraph) -> DegreeStats:
    if len(graph) == 0:
        return DegreeStats(0, 0, 0, 0, 0.0, 0)
    deg = [graph.degree(i) for i in range(len(graph))]
    return DegreeStats(
        nodes=len(graph),
        edges=graph.edge_count,
        min_degree=min(deg),
        max_degree=max(deg),
        mean_degree=sum(deg) / len(deg),
        isolated=sum(1 for d in deg if d == 0),
    )


@dataclass
class LemmaMap:
    """Case-folded lemma -> ordered synset ids, with an optional POS per lemma."""

    entries: dict[str, list[str]] = field(default_factory=dict)
    pos: dict[str, str] = field(default_factory=dict)

    def __contains__(self, lemma):
        return lemma.casefold() in self.entries

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def synsets(self, lemma: str) -> list[str]:
        return self.entries[lemma.casefold()]

    def is_monosemous(self, lemma: str) -> bool:
        return len(self.entries.get(lemma.casefold(), ())) == 1

    def monosemous(self) -> list[str]:
        return [w for w, s in self.entries.items() if len(s) == 1]


def load_lemma_map(path, graph: KnowledgeGraph | None = None) -> LemmaMap:
    """Load ``lemma[<TAB>pos]<TAB>node_id(,node_id)*`` lines.

    When ``graph`` is given, every referenced node must exist in it.
    """
    lm = LemmaMap()
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) == 2:
                lemma, ids, pos = parts[0], parts[1], None
            elif len(parts) == 3:
                lemma, pos, ids = parts
                try:
                    pos = normalize_pos(pos)
                except ValueError as e:
                    raise GraphFormatError(f"line {lineno}: {e}") from None
            else:
                raise GraphFormatError(f"line {lineno}: expected lemma[<TAB>pos]<TAB>ids, got {line!r}")
            lemma = lemma.strip().casefold()
            synsets = [s.strip() for s in ids.split(",") if s.strip()]
            if not lemma or not synsets:
                raise GraphFormatError(f"line {lineno}: empty lemma or node list")
            if lemma in lm.entries:
                raise GraphFormatError(f"line {lineno}: duplicate lemma {lemma!r}")
            if graph is not None:
                for s in synsets:
                    if s not in graph:
                        raise GraphFormatError(
                            f"line {lineno}: lemma {lemma!r} references unknown node {s!r}")
            lm.entries[lemma] = synsets
            if pos is not None:
                lm.pos[lemma] = pos
    return lm


def save_lemma_map(lemma_map: LemmaMap, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for lemma, synsets in lemma_map.entries.items():
            if lemma in lemma_map.pos:
                f.write(f"{lemma}\t{lemma_map.pos[lemma]}\t{','.join(synsets)}\n")
            else:
                f.write(f"{lemma}\t{','.join(synsets)}\n")
