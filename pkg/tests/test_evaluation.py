import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexbridge.evaluation import (EvalReport, PairRecord, SimilarityDataset, SweepRow,
                                  UndefinedCorrelationWarning, average_ranks, bridge_sweep,
                                  eval_cross_space, eval_in_space, format_comparison,
                                  load_dataset, load_records, load_sweep, paired_significance,
                                  paired_t_test, pearson, save_records, save_sweep, spearman)
from lexbridge.graph import LemmaMap
from lexbridge.mapping import LsMap, fit_ls
from lexbridge.bridge import select_bridges
from lexbridge.synthetic import similarity_dataset
from lexbridge.vecspace import EmbeddingSpace

from conftest import write


# brute-force definitional oracles, written without numpy vector algebra

def pearson_oracle(x, y):
    n = len(x)
    mx, my = math.fsum(x) / n, math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def ranks_oracle(x):
    # rank = 1 + (#strictly smaller) + (#ties - 1) / 2
    return [1 + sum(v < a for v in x) + (sum(v == a for v in x) - 1) / 2 for a in x]


def spearman_oracle(x, y):
    return pearson_oracle(ranks_oracle(x), ranks_oracle(y))


def test_pearson_examples():
    x = [0.3, 1.7, 2.2, 9.0]
    assert pearson(x, x) == pytest.approx(1.0, abs=1e-15)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)
    # hand value: sxy = 9, sxx = 8.75, syy = 10
    assert pearson([1, 2, 3, 5], [1, 2, 4, 5]) == pytest.approx(9 / math.sqrt(87.5), abs=1e-15)
    assert round(pearson([1, 2, 3, 5], [1, 2, 4, 5]), 4) == 0.9621


def test_spearman_examples():
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == 0.8
    assert spearman([1, 2, 3, 4], [10, 100, 1000, 1e6]) == pytest.approx(1.0, abs=1e-15)
    assert list(average_ranks([1, 1, 2])) == [1.5, 1.5, 3.0]
    assert spearman([1, 1, 2], [1, 2, 3]) == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    assert round(spearman([1, 1, 2], [1, 2, 3]), 4) == 0.8660


def test_constant_input_is_nan_with_warning():
    with pytest.warns(UndefinedCorrelationWarning):
        assert math.isnan(pearson([1, 1, 1], [1, 2, 3]))
    with pytest.warns(UndefinedCorrelationWarning):
        assert math.isnan(spearman([1, 2, 3], [4, 4, 4]))
    with pytest.raises(ValueError):
        pearson([1], [1])
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2, 3])


def test_correlations_match_oracles_on_1000_instances():
    rng = np.random.default_rng(0)
    for i in range(1000):
        n = int(rng.integers(2, 40))
        if i % 2:
            # small integer support forces ties
            x = rng.integers(0, 5, n).astype(float)
            y = rng.integers(0, 5, n).astype(float)
        else:
            x, y = rng.standard_normal(n), rng.standard_normal(n)
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            continue
        xl, yl = list(map(float, x)), list(map(float, y))
        assert abs(pearson(x, y) - pearson_oracle(xl, yl)) <= 1e-12
        assert abs(spearman(x, y) - spearman_oracle(xl, yl)) <= 1e-12
        assert list(average_ranks(x)) == ranks_oracle(xl)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-10_000, 10_000), min_size=3, max_size=30, unique=True),
       st.integers(0, 2**31))
def test_spearman_monotone_invariance(ints, seed):
    # grid values stay distinct under the transforms below in floating point
    x = [i / 100 for i in ints]
    y = np.random.default_rng(seed).standard_normal(len(x))
    base = spearman(x, y)
    assert spearman(np.exp(np.asarray(x) / 50), y) == pytest.approx(base, abs=1e-12)
    assert spearman(x, 3 * y ** 3 + 1) == pytest.approx(base, abs=1e-12)


# datasets

def test_dataset_validation_and_loading(tmp_path):
    with pytest.raises(ValueError, match="duplicate"):
        SimilarityDataset("d", [("a", "b", 1), ("b", "a", 2)])
    with pytest.raises(ValueError, match="outside"):
        SimilarityDataset("d", [("a", "b", 11)], (0, 10))
    p = write(tmp_path / "rw.txt", "# scale: 0 10\n# comment\ncat\tdog\t7.5\n\nsun moon 2\n")
    d = load_dataset(p)
    assert d.name == "rw" and d.scale == (0.0, 10.0)
    assert d.pairs == [("cat", "dog", 7.5), ("sun", "moon", 2.0)]
    assert load_dataset(p, name="x", scale=(0, 100)).scale == (0, 100)
    bad = write(tmp_path / "bad.txt", "cat\tdog\n")
    with pytest.raises(ValueError, match="line 1"):
        load_dataset(bad)


# in-space evaluation

@pytest.fixture(scope="module")
def toy():
    rng = np.random.default_rng(1)
    words = [f"w{i}" for i in range(30)]
    space = EmbeddingSpace(words, rng.standard_normal((30, 6)))
    unit = space.unit_rows()
    pairs = [(words[i], words[j], float(unit[i] @ unit[j]))
             for i in range(30) for j in range(i + 1, 30) if (i * 7 + j) % 5 == 0]
    return space, SimilarityDataset("toy", pairs, (-1.0, 1.0))


def test_self_consistent_gold_gives_r_one(toy):
    space, data = toy
    rep = eval_in_space(space, data)
    assert abs(rep.pearson - 1.0) <= 1e-12
    assert rep.n_oov == 0 and rep.total == len(data)


def test_scale_invariance(toy):
    space, data = toy
    rep = eval_in_space(space, data)
    scaled = eval_in_space(EmbeddingSpace(space.words, 3.7 * space.matrix), data)
    assert scaled.pearson == pytest.approx(rep.pearson, abs=1e-12)
    assert scaled.spearman == pytest.approx(rep.spearman, abs=1e-12)


def test_oov_exclusion_and_imputation(toy):
    space, data = toy
    extra = SimilarityDataset("x", data.pairs + [("w0", "zzz", 0.5), ("qq", "w1", -0.2)], (-1, 1))
    rep = eval_in_space(space, extra)
    assert (rep.n_evaluated, rep.n_oov, rep.total) == (len(data), 2, len(extra))
    imp = eval_in_space(space, extra, oov="impute")
    assert imp.n_oov == 2
    gold = [p[2] for p in extra.pairs]
    pred = [r.pred for r in rep.records] + [0.0, 0.0]
    assert imp.pearson == pytest.approx(pearson(gold, pred), abs=1e-12)


def test_all_oov_is_an_error(toy):
    space, _ = toy
    with pytest.raises(ValueError, match="out of vocabulary"):
        eval_in_space(space, SimilarityDataset("o", [("a", "b", 1.0), ("c", "d", 2.0)]))


def test_maxsim_mode_needs_lemma_map(toy):
    space, data = toy
    with pytest.raises(ValueError):
        eval_in_space(space, data, sim="maxsim")
    lm = LemmaMap({w: [w] for w in space.words})
    rep = eval_in_space(space, data, sim="maxsim", lemma_map=lm)
    assert abs(rep.pearson - 1.0) <= 1e-12


# cross-space evaluation

def test_identity_map_equals_in_space(toy):
    space, data = toy
    lm = LemmaMap({w: [w] for w in space.words})
    d = space.dim
    cross = eval_cross_space(LsMap(np.eye(d), 0.0), space, space, lm, data, directions="forward")
    ins = eval_in_space(space, data)
    assert cross.pearson == ins.pearson and cross.spearman == ins.spearman


def test_both_directions_count_bound_and_swap_invariance(synthetic):
    s = synthetic
    data = similarity_dataset(s, n_pairs=200)
    m = fit_ls(select_bridges(s.lemma_map, s.corpus_space, s.kb_space, max_n=600))
    rep = eval_cross_space(m, s.corpus_space, s.kb_space, s.lemma_map, data)
    assert rep.n_evaluated <= 2 * len(data)
    assert rep.n_evaluated + rep.n_oov == 2 * len(data)
    swapped = SimilarityDataset("sw", [(b, a, g) for a, b, g in data.pairs], data.scale)
    rep2 = eval_cross_space(m, s.corpus_space, s.kb_space, s.lemma_map, swapped)
    assert rep2.n_evaluated == rep.n_evaluated
    assert rep2.pearson == pytest.approx(rep.pearson, abs=1e-12)
    assert rep2.spearman == pytest.approx(rep.spearman, abs=1e-12)
    avg = eval_cross_space(m, s.corpus_space, s.kb_space, s.lemma_map, data, combine="average")
    assert avg.n_evaluated + avg.n_oov == len(data)


def test_cross_space_option_validation(toy):
    space, data = toy
    lm = LemmaMap({w: [w] for w in space.words})
    m = LsMap(np.eye(space.dim), 0.0)
    for kw in ({"directions": "sideways"}, {"combine": "max"}, {"kb_resolution": "random"}):
        with pytest.raises(ValueError):
            eval_cross_space(m, space, space, lm, data, **kw)


# sweeps

def test_sweep_rows_and_errors(tmp_path, synthetic):
    s = synthetic
    data = [similarity_dataset(s, 100, seed=2, name="a"), similarity_dataset(s, 100, seed=3, name="b")]
    rows = bridge_sweep(s.corpus_space, {"dw": s.kb_space}, s.lemma_map, data, [50, 100, 300])
    assert len(rows) == 3 * 2 * 2
    assert {(r.method, r.dataset) for r in rows} == {(m, d) for m in ("dw+ls", "dw+cca") for d in "ab"}
    assert [r.size for r in rows if r.method == "dw+ls" and r.dataset == "a"] == [50, 100, 300]
    p = tmp_path / "sweep.tsv"
    save_sweep(rows, p)
    back = load_sweep(p)
    assert [(r.method, r.size, r.dataset) for r in back] == [(r.method, r.size, r.dataset) for r in rows]
    assert np.allclose([r.r for r in back], [r.r for r in rows], atol=1e-8)
    with pytest.raises(ValueError, match="exceeds"):
        bridge_sweep(s.corpus_space, s.kb_space, s.lemma_map, data, [100, 10**6])
    with pytest.raises(ValueError):
        bridge_sweep(s.corpus_space, s.kb_space, s.lemma_map, data, [300, 100])
    with pytest.raises(ValueError):
        bridge_sweep(s.corpus_space, s.kb_space, s.lemma_map, data, [100], methods=["svd"])


# significance

def report(preds, gold, scale=(0.0, 1.0)):
    recs = [PairRecord(f"a{i}", f"b{i}", g, p) for i, (g, p) in enumerate(zip(gold, preds))]
    return EvalReport("r", pearson(gold, preds), spearman(gold, preds), len(recs), 0, recs, scale)


def test_identical_reports_p_half():
    rng = np.random.default_rng(2)
    gold, pred = rng.uniform(0, 1, 20), rng.uniform(-1, 1, 20)
    sig = paired_significance(report(pred, gold), report(pred, gold))
    assert (sig.t, sig.p, sig.n) == (0.0, 0.5, 20)


def test_constant_improvement_is_significant():
    gold = np.linspace(0.2, 0.8, 30)
    a = 2 * gold - 1 + 0.4  # maps to scaled error 0.2 everywhere
    b = 2 * gold - 1 + 0.2  # scaled error 0.1
    sig = paired_significance(report(a, gold), report(b, gold))
    assert sig.p < 0.001 and sig.t > 0
    assert paired_significance(report(b, gold), report(a, gold)).p > 0.999


def test_t_test_hand_values():
    assert paired_t_test([1.0, 0.0], [0.0, 1.0]) == paired_t_test([1.0, 0.0], [0.0, 1.0])
    sig = paired_t_test([1.0, 0.0], [0.0, 1.0])
    assert (sig.t, sig.p) == (0.0, 0.5)
    # differences [1, 2, 3]: mean 2, sd 1, t = 2 * sqrt(3)
    sig = paired_t_test([1, 2, 3], [0, 0, 0])
    assert sig.t == pytest.approx(2 * math.sqrt(3))
    from scipy import stats
    assert sig.p == pytest.approx(stats.t.sf(2 * math.sqrt(3), 2))
    with pytest.raises(ValueError):
        paired_t_test([1.0], [2.0])


def test_significance_needs_shared_pairs():
    a = report([0.1, 0.2], [0.3, 0.4])
    b = EvalReport("r", 0, 0, 1, 0, [PairRecord("x", "y", 0.1, 0.1)], (0, 1))
    with pytest.raises(ValueError, match="share no"):
        paired_significance(a, b)


# files and formatting

def test_records_round_trip(tmp_path, toy):
    space, data = toy
    rep = eval_in_space(space, data)
    p = tmp_path / "rec.tsv"
    save_records(rep, p)
    back = load_records(p)
    assert (back.name, back.n_evaluated, back.n_oov, back.scale) == ("toy", rep.n_evaluated, 0, (-1.0, 1.0))
    assert back.pearson == pytest.approx(rep.pearson, abs=1e-8)
    for a, b in zip(rep.records, back.records):
        assert (a.w1, a.w2, a.direction) == (b.w1, b.w2, b.direction)
        assert abs(a.pred - b.pred) <= 1e-8 and abs(a.gold - b.gold) <= 1e-8
    lines = p.read_text().splitlines()
    assert len(lines) == 1 + len(rep.records)
    assert lines[1].count("\t") == 4


def test_comparison_table(toy):
    space, data = toy
    rep = eval_in_space(space, data)
    rows = format_comparison([("Initial", rep), ("Enriched", rep)]).splitlines()
    assert len(rows) == 3 and rows[0].split() == ["OOV", "r", "rho"]
    assert rows[1].startswith("Initial") and rows[2].startswith("Enriched")


def test_sweep_row_is_plain_data():
    assert SweepRow("m", 5, "d", 0.5, 0.4).size == 5
