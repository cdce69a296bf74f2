import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lexbridge.graph import KnowledgeGraph
from lexbridge.walker import (WalkConfig, WalkCorpus, generate_walks, load_walks, sample_next,
                              save_walks, transition_distribution)


def random_graph(n, density, seed, weighted=True):
    rng = np.random.default_rng(seed)
    edges = [(f"v{i}", f"v{i + 1}", 1.0) for i in range(n - 1)]
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < density:
                edges.append((f"v{i}", f"v{j}", float(rng.uniform(0.5, 3.0)) if weighted else 1.0))
    return KnowledgeGraph.from_edges(edges)


def chi_square_pvalue(samples, nbrs, probs):
    counts = np.array([np.sum(samples == j) for j in nbrs])
    assert counts.sum() == samples.size, "sampled outside the neighbour set"
    return stats.chisquare(counts, probs * samples.size).pvalue


def test_uniform_equal_weights():
    g = KnowledgeGraph.from_edges([("c", "x"), ("c", "y"), ("c", "z")])
    nbrs, p = transition_distribution(g, None, g.index["c"], WalkConfig())
    np.testing.assert_allclose(p, [1 / 3] * 3)


def test_biased_unit_pq_equals_uniform():
    g = random_graph(20, 0.3, seed=3)
    cur = 5
    prev = g.neighbors(cur)[0]
    _, pu = transition_distribution(g, prev, cur, WalkConfig(mode="uniform"))
    _, pb = transition_distribution(g, prev, cur, WalkConfig(mode="biased", p=1.0, q=1.0))
    np.testing.assert_allclose(pu, pb, atol=1e-15)


def test_biased_path_graph_hand_values(path_graph):
    # prev=0 is a return (weight 1/p = 1/4); 2 is at distance 2 from prev (1/q = 4)
    nbrs, p = transition_distribution(path_graph, 0, 1, WalkConfig(mode="biased", p=4, q=0.25))
    assert nbrs == [0, 2]
    np.testing.assert_allclose(p, [1 / 17, 16 / 17], atol=1e-15)


def test_distribution_sums_to_one_on_neighbours():
    g = random_graph(30, 0.2, seed=1)
    cfg = WalkConfig(mode="biased", p=0.3, q=2.5)
    for cur in range(len(g)):
        for prev in g.neighbors(cur):
            nbrs, p = transition_distribution(g, prev, cur, cfg)
            assert abs(p.sum() - 1) < 1e-12
            assert nbrs == g.neighbors(cur)


def test_no_neighbours_signals_termination():
    g = KnowledgeGraph.from_edges([("a", "b")], directed=True)
    with pytest.raises(LookupError):
        transition_distribution(g, 0, 1, WalkConfig())


@pytest.mark.parametrize("p, q", [(1, 1), (4, 0.25), (0.25, 4)])
def test_sampler_matches_distribution(p, q):
    g = random_graph(50, 0.12, seed=11)
    cfg = WalkConfig(mode="biased", p=p, q=q)
    rng = np.random.default_rng(0)
    for cur in rng.choice(len(g), 4, replace=False):
        prev = int(rng.choice(g.neighbors(cur)))
        nbrs, probs = transition_distribution(g, prev, cur, cfg)
        s = sample_next(g, prev, int(cur), cfg, 10**5, seed=int(cur))
        assert chi_square_pvalue(s, nbrs, probs) > 0.001


def test_first_step_weight_proportional():
    g = random_graph(20, 0.3, seed=2)
    cfg = WalkConfig(mode="biased", p=0.25, q=4)
    nbrs, probs = transition_distribution(g, None, 3, cfg)
    s = sample_next(g, None, 3, cfg, 10**5, seed=9)
    assert chi_square_pvalue(s, nbrs, probs) > 0.001


def test_path_from_end_goes_to_middle(path_graph):
    corpus = generate_walks(path_graph, WalkConfig(walks_per_node=20, walk_length=5, seed=1))
    for w in corpus.walks:
        if w[0] == "0":
            assert w[1] == "1"


def test_walk_count():
    g = KnowledgeGraph.from_edges([(f"n{i}", f"n{(i + 1) % 34}") for i in range(34)])
    corpus = generate_walks(g, WalkConfig(walks_per_node=10, walk_length=80))
    assert len(corpus) == 340
    assert all(len(w) == 80 for w in corpus.walks)


@pytest.mark.parametrize("mode", ["uniform", "biased"])
def test_two_node_graph_alternates(mode):
    g = KnowledgeGraph.from_edges([("a", "b")])
    corpus = generate_walks(g, WalkConfig(walks_per_node=3, walk_length=7, mode=mode, p=2, q=3))
    for w in corpus.walks:
        assert all(x != y for x, y in zip(w, w[1:]))


def test_isolated_nodes_skipped():
    g = KnowledgeGraph.from_edges([("a", "b")], nodes=["lonely"])
    corpus = generate_walks(g, WalkConfig(walks_per_node=2, walk_length=4))
    assert len(corpus) == 4
    assert all("lonely" not in w for w in corpus.walks)


def test_all_isolated_is_an_error():
    with pytest.raises(ValueError):
        generate_walks(KnowledgeGraph.from_edges([], nodes=["x", "y"]), WalkConfig())


def test_directed_dead_end_truncates():
    g = KnowledgeGraph.from_edges([("a", "b"), ("b", "c")], directed=True)
    corpus = generate_walks(g, WalkConfig(walks_per_node=1, walk_length=10))
    assert sorted(corpus.walks) == [["a", "b", "c"], ["b", "c"]]


@pytest.mark.parametrize("bad", [dict(p=0), dict(q=-1), dict(walk_length=0),
                                 dict(walks_per_node=0), dict(mode="teleport")])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        WalkConfig(**bad)


def test_deterministic_and_thread_independent():
    g = random_graph(40, 0.1, seed=5)
    cfg = WalkConfig(walks_per_node=4, walk_length=30, mode="biased", p=0.5, q=2, seed=42)
    a = generate_walks(g, cfg)
    b = generate_walks(g, cfg)
    c = generate_walks(g, cfg, threads=3)
    assert np.array_equal(a.tokens, b.tokens) and np.array_equal(a.offsets, b.offsets)
    assert np.array_equal(a.tokens, c.tokens) and np.array_equal(a.offsets, c.offsets)
    d = generate_walks(g, WalkConfig(walks_per_node=4, walk_length=30, mode="biased",
                                     p=0.5, q=2, seed=43))
    assert not np.array_equal(a.tokens, d.tokens)


def test_unit_pq_biased_matches_uniform_statistically():
    g = random_graph(50, 0.12, seed=21)
    rng = np.random.default_rng(1)
    for cur in rng.choice(len(g), 4, replace=False):
        prev = int(rng.choice(g.neighbors(cur)))
        nbrs = g.neighbors(cur)
        u = sample_next(g, prev, int(cur), WalkConfig(mode="uniform"), 10**5, seed=1)
        b = sample_next(g, prev, int(cur), WalkConfig(mode="biased"), 10**5, seed=2)
        table = np.array([[np.sum(u == j) for j in nbrs], [np.sum(b == j) for j in nbrs]])
        assert stats.chi2_contingency(table).pvalue > 0.001


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 10))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                          min_size=1, max_size=30))
    pairs = [(a, b) for a, b in pairs if a != b]
    if not pairs:
        pairs = [(0, 1)]
    return KnowledgeGraph.from_edges([(str(a), str(b)) for a, b in pairs],
                                     directed=draw(st.booleans()))


@given(g=small_graphs(), p=st.floats(0.1, 10), q=st.floats(0.1, 10),
       length=st.integers(1, 15), mode=st.sampled_from(["uniform", "biased"]))
@settings(max_examples=80, deadline=None)
def test_walks_follow_edges(g, p, q, length, mode):
    corpus = generate_walks(g, WalkConfig(walks_per_node=2, walk_length=length, p=p, q=q, mode=mode))
    active = sum(1 for i in range(len(g)) if g.degree(i) > 0)
    assert len(corpus) == 2 * active
    for w in corpus.walks:
        assert 1 <= len(w) <= length
        for x, y in zip(w, w[1:]):
            assert g.index[y] in g.neighbors(g.index[x])


def test_walk_file_round_trip(tmp_path):
    g = random_graph(15, 0.2, seed=4)
    corpus = generate_walks(g, WalkConfig(walks_per_node=2, walk_length=6))
    save_walks(corpus, tmp_path / "walks.txt")
    back = load_walks(tmp_path / "walks.txt")
    assert back.walks == corpus.walks
    assert (tmp_path / "walks.txt").read_text().splitlines()[0] == " ".join(corpus.walk(0))


def test_from_walks():
    c = WalkCorpus.from_walks([["a", "b", "a"], ["c"]])
    assert c.nodes == ["a", "b", "c"] and c.walks == [["a", "b", "a"], ["c"]]
