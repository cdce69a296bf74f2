"""Command-line front end: walk, embed, map, enrich, eval, sweep, info.

Exit status is 0 on success, 1 on runtime failure and 2 on usage errors.
Every run writes a ``key<TAB>value`` manifest next to its main output.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bridge import save_bridge_words, select_bridges
from .enrich import coverage_report, enrich, save_enriched
from .evaluation import (bridge_sweep, eval_cross_space, eval_in_space, format_comparison,
                         format_report, load_dataset, paired_significance, save_records,
                         save_sweep)
from .graph import degree_stats, load_graph, load_lemma_map
from .mapping import LsMap, fit_cca, fit_ls, load_map, save_map
from .sgns import SgnsConfig, export_space, train
from .vecspace import load_space, save_space
from .walker import WalkConfig, generate_walks, load_walks, save_walks

log = logging.getLogger("lexbridge")


def _positive_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _nonneg_float(s):
    v = float(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _existing(s):
    if not Path(s).is_file():
        raise argparse.ArgumentTypeError(f"no such file: {s}")
    return s


def _labelled(s):
    label, sep, path = s.partition("=")
    if not sep:
        label, path = Path(s).stem, s
    return label, _existing(path)


def _csv_ints(s):
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _csv(s):
    return [x.strip() for x in s.split(",") if x.strip()]


def _default_threads():
    try:
        return max(1, int(os.environ.get("LEXBRIDGE_THREADS", "1")))
    except ValueError:
        return 1


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(path, args, inputs, started, argv) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"subcommand\t{args.command}\n")
        f.write(f"version\t{__version__}\n")
        f.write(f"argv\t{' '.join(argv)}\n")
        for key, val in sorted(vars(args).items()):
            if key in ("func", "command"):
                continue
            f.write(f"param.{key}\t{val}\n")
        for key, p in inputs:
            f.write(f"input.{key}\t{p}\tsha256:{_digest(p)}\n")
        f.write(f"seed\t{getattr(args, 'seed', '')}\n")
        f.write(f"duration_seconds\t{time.time() - started:.3f}\n")


def _load_spaces(args):
    corpus = load_space(args.corpus_space)
    kb = load_space(args.kb_space)
    if args.normalize:
        corpus, kb = corpus.normalized(), kb.normalized()
    return corpus, kb


def cmd_walk(args):
    graph = load_graph(args.graph, directed=args.directed)
    cfg = WalkConfig(args.walks_per_node, args.walk_length, args.p, args.q, args.mode, args.seed)
    corpus = generate_walks(graph, cfg, threads=args.threads)
    save_walks(corpus, args.out)
    print(f"wrote {len(corpus)} walks to {args.out}", file=sys.stderr)
    return [("graph", args.graph)]


def cmd_embed(args):
    corpus = load_walks(args.corpus)
    cfg = SgnsConfig(dim=args.dim, window=args.window, negatives=args.negatives,
                     epochs=args.epochs, learning_rate=args.learning_rate,
                     min_count=args.min_count, seed=args.seed)
    model = train(corpus, cfg, threads=args.threads)
    for e, loss in enumerate(model.epoch_losses, 1):
        print(f"epoch {e}: mean pair loss {loss:.4f}", file=sys.stderr)
    save_space(export_space(model, args.export), args.out)
    return [("corpus", args.corpus)]


def cmd_map(args):
    corpus, kb = _load_spaces(args)
    lemma_map = load_lemma_map(args.lemma_map)
    bridges = select_bridges(lemma_map, corpus, kb, args.pos, args.max_bridges,
                             frequency_sorted=not args.unsorted)
    if args.max_bridges is not None and len(bridges) < args.max_bridges:
        log.warning("only %d bridges available (requested %d); proceeding",
                    len(bridges), args.max_bridges)
    if args.method == "ls":
        m = fit_ls(bridges, args.lam)
        print(f"LS map on {len(bridges)} bridges, lambda={args.lam}, residual={m.residual:.6g}",
              file=sys.stderr)
    else:
        k = None if args.k is None else min(args.k, len(bridges) - 1)
        m = fit_cca(bridges, k, args.reg, args.power)
        print(f"CCA map on {len(bridges)} bridges, k={m.k}, "
              f"top correlations {', '.join(f'{c:.3f}' for c in m.correlations[:5])}",
              file=sys.stderr)
    save_map(m, args.out)
    if args.bridges_out:
        save_bridge_words(bridges, args.bridges_out)
    return [("corpus_space", args.corpus_space), ("kb_space", args.kb_space),
            ("lemma_map", args.lemma_map)]


def cmd_enrich(args):
    corpus, kb = _load_spaces(args)
    lemma_map = load_lemma_map(args.lemma_map)
    m = load_map(args.map)
    words = None
    inputs = [("map", args.map), ("corpus_space", args.corpus_space),
              ("kb_space", args.kb_space), ("lemma_map", args.lemma_map)]
    if args.words:
        with open(args.words, encoding="utf-8") as f:
            words = [w.strip() for w in f if w.strip()]
        inputs.append(("words", args.words))
    out = enrich(corpus, kb, lemma_map, m, words, polysemy=args.polysemy)
    sidecar = save_enriched(out, args.out)
    print(f"corpus tokens {out.n_corpus}, induced {out.n_induced}, skipped {len(out.skipped)}; "
          f"provenance in {sidecar}", file=sys.stderr)
    return inputs


def cmd_eval(args):
    datasets = [load_dataset(p) for p in args.dataset]
    inputs = [("dataset", p) for p in args.dataset]
    lemma_map = load_lemma_map(args.lemma_map) if args.lemma_map else None
    reports = []
    if args.map:
        for name in ("corpus_space", "kb_space", "lemma_map"):
            if getattr(args, name) is None:
                raise UsageError(f"--map needs --{name.replace('_', '-')}")
        corpus, kb = _load_spaces(args)
        m = load_map(args.map)
        inputs += [("map", args.map), ("corpus_space", args.corpus_space),
                   ("kb_space", args.kb_space), ("lemma_map", args.lemma_map)]
        for ds in datasets:
            rep = eval_cross_space(m, corpus, kb, lemma_map, ds, args.directions, args.combine)
            print(format_report(rep))
            reports.append(("cross", rep))
    elif args.before or args.after:
        if not (args.before and args.after):
            raise UsageError("--before and --after must be given together")
        before, after = load_space(args.before), load_space(args.after)
        inputs += [("before", args.before), ("after", args.after)]
        for ds in datasets:
            rb = eval_in_space(before, ds, args.sim, lemma_map, args.oov)
            ra = eval_in_space(after, ds, args.sim, lemma_map, args.oov)
            print(f"== {ds.name} ({len(ds)} pairs)")
            print(format_comparison([("initial", rb), ("enriched", ra)]))
            sig = paired_significance(rb, ra)
            print(f"one-tailed paired t-test (enriched better): t={sig.t:.3f} p={sig.p:.4g} "
                  f"n={sig.n}")
            reports += [("before", rb), ("after", ra)]
    elif args.space:
        space = load_space(args.space)
        inputs.append(("space", args.space))
        if args.sim == "maxsim" and lemma_map is None:
            raise UsageError("--sim maxsim needs --lemma-map")
        for ds in datasets:
            rep = eval_in_space(space, ds, args.sim, lemma_map, args.oov)
            cov = coverage_report(space, ds)
            print(format_report(rep) + f" coverage={cov.covered_fraction:.2%}")
            reports.append(("space", rep))
    else:
        raise UsageError("give --space, --before/--after, or --map")
    if args.lemma_map:
        inputs.append(("lemma_map", args.lemma_map))
    if args.records:
        for tag, rep in reports:
            path = f"{args.records}.{rep.name}.{tag}.tsv"
            save_records(rep, path)
    return inputs


def cmd_sweep(args):
    corpus = load_space(args.corpus_space)
    kbs = {label: load_space(p) for label, p in args.kb_space}
    if args.normalize:
        corpus = corpus.normalized()
        kbs = {k: v.normalized() for k, v in kbs.items()}
    lemma_map = load_lemma_map(args.lemma_map)
    datasets = [load_dataset(p) for p in args.dataset]
    rows = bridge_sweep(corpus, kbs, lemma_map, datasets, args.sizes, args.methods, args.lam,
                        args.k, args.reg, args.pos, not args.unsorted, args.directions)
    save_sweep(rows, args.out)
    for r in rows:
        print(f"{r.method}\t{r.size}\t{r.dataset}\t{r.r:.4f}\t{r.rho:.4f}")
    return ([("corpus_space", args.corpus_space), ("lemma_map", args.lemma_map)]
            + [(f"kb_space.{label}", p) for label, p in args.kb_space]
            + [("dataset", p) for p in args.dataset])


def cmd_info(args):
    inputs = []
    if args.graph:
        s = degree_stats(load_graph(args.graph, args.directed))
        print(f"graph {args.graph}: nodes={s.nodes} edges={s.edges} degree min/mean/max="
              f"{s.min_degree}/{s.mean_degree:.3f}/{s.max_degree} isolated={s.isolated}")
        inputs.append(("graph", args.graph))
    if args.space:
        sp = load_space(args.space)
        print(f"space {args.space}: vectors={len(sp)} dim={sp.dim}")
        inputs.append(("space", args.space))
    if args.lemma_map:
        lm = load_lemma_map(args.lemma_map)
        print(f"lemma map {args.lemma_map}: lemmas={len(lm)} monosemous={len(lm.monosemous())}")
        inputs.append(("lemma_map", args.lemma_map))
    if args.map:
        m = load_map(args.map)
        if isinstance(m, LsMap):
            print(f"map {args.map}: LS d_K={m.d_kb} d_C={m.d_corpus} lambda={m.lam:g}")
        else:
            print(f"map {args.map}: CCA d_C={m.d_corpus} d_K={m.d_kb} k={m.k} "
                  f"max correlation={m.correlations.max():.4f}")
        inputs.append(("map", args.map))
    if args.corpus:
        c = load_walks(args.corpus)
        print(f"walks {args.corpus}: walks={len(c)} tokens={c.tokens.size} nodes={len(c.nodes)}")
        inputs.append(("corpus", args.corpus))
    if not inputs:
        raise UsageError("nothing to describe; pass --graph, --space, --lemma-map, --map or --corpus")
    return inputs


class UsageError(Exception):
    pass


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    """Append each flag's default once, in the form the flag accepts."""

    def _get_help_string(self, action):
        text = action.help or ""
        if "(default:" in text or action.default is argparse.SUPPRESS or not action.option_strings:
            return text
        if action.required:
            return text + " (default: none, required)"
        default = action.default
        if isinstance(default, list):
            default = ",".join(map(str, default))
        return f"{text} (default: {default})"


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = argparse.ArgumentParser(prog="lexbridge", description=__doc__.splitlines()[0],
                                     formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt)
        p.set_defaults(func=func)
        p.add_argument("--manifest", default=None,
                       help="manifest path (default: <out>.manifest, or lexbridge-<command>.manifest)")
        return p

    def add_normalize(p):
        p.add_argument("--no-normalize", dest="normalize", action="store_false",
                       help="use raw vectors instead of unit-normalizing both spaces "
                            "(default: normalize)")

    def add_bridge_flags(p):
        p.add_argument("--pos", type=_csv, default=["noun", "adjective"],
                       help="comma-separated POS tags allowed for bridges (empty string: any)")
        p.add_argument("--unsorted", action="store_true",
                       help="corpus space is not frequency sorted; order bridges lexicographically")
        p.add_argument("--lam", type=_nonneg_float, default=1.0, help="ridge lambda for LS")
        p.add_argument("--k", type=_positive_int, default=None,
                       help="CCA components (default: min(d_C, d_K, n-1))")
        p.add_argument("--reg", type=_nonneg_float, default=None,
                       help="CCA covariance ridge (default: 1e-8 * trace / d)")

    p = add("walk", cmd_walk, "generate a random-walk corpus from an edge list")
    p.add_argument("--graph", type=_existing, required=True, help="edge list file")
    p.add_argument("--directed", action="store_true", help="treat edges as directed")
    p.add_argument("--mode", choices=["uniform", "biased"], default="uniform",
                   help="uniform (DeepWalk) or biased second-order (node2vec) walks")
    p.add_argument("--p", type=_positive_float, default=1.0, help="return parameter")
    p.add_argument("--q", type=_positive_float, default=1.0, help="in-out parameter")
    p.add_argument("--walks-per-node", type=_positive_int, default=10, help="walks per start node")
    p.add_argument("--walk-length", type=_positive_int, default=80, help="maximum walk length")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--threads", type=_positive_int, default=_default_threads(),
                   help="worker threads (env LEXBRIDGE_THREADS)")
    p.add_argument("--out", required=True, help="walk corpus output file")

    p = add("embed", cmd_embed, "train skip-gram node vectors on a walk corpus")
    p.add_argument("--corpus", type=_existing, required=True, help="walk corpus file")
    p.add_argument("--dim", type=_positive_int, default=100, help="vector dimensionality")
    p.add_argument("--window", type=_positive_int, default=10, help="maximum context window")
    p.add_argument("--negatives", type=_positive_int, default=5, help="negative samples per pair")
    p.add_argument("--epochs", type=_positive_int, default=5, help="training epochs")
    p.add_argument("--learning-rate", type=_positive_float, default=0.025,
                   help="initial learning rate (linear decay)")
    p.add_argument("--min-count", type=int, default=0, help="drop nodes seen fewer times")
    p.add_argument("--export", choices=["input", "average"], default="input",
                   help="export input vectors or the input/output average")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--threads", type=_positive_int, default=_default_threads(),
                   help="worker threads; 1 is deterministic (env LEXBRIDGE_THREADS)")
    p.add_argument("--out", required=True, help="output embedding file (headered text)")

    p = add("map", cmd_map, "learn an LS or CCA map from semantic bridges")
    p.add_argument("--method", choices=["ls", "cca"], default="cca", help="mapping method")
    p.add_argument("--corpus-space", type=_existing, required=True, help="corpus embedding file")
    p.add_argument("--kb-space", type=_existing, required=True, help="KB (synset) embedding file")
    p.add_argument("--lemma-map", type=_existing, required=True, help="lemma map file")
    p.add_argument("--max-bridges", type=_positive_int, default=5000, help="bridge set size cap")
    p.add_argument("--power", type=float, default=0.0,
                   help="scale CCA components by correlation**power")
    p.add_argument("--bridges-out", default=None, help="write selected bridge words here")
    add_bridge_flags(p)
    add_normalize(p)
    p.add_argument("--out", required=True, help="map output file")

    p = add("enrich", cmd_enrich, "add mapped KB vectors for words missing from the corpus space")
    p.add_argument("--map", type=_existing, required=True, help="map file")
    p.add_argument("--corpus-space", type=_existing, required=True, help="corpus embedding file")
    p.add_argument("--kb-space", type=_existing, required=True, help="KB (synset) embedding file")
    p.add_argument("--lemma-map", type=_existing, required=True, help="lemma map file")
    p.add_argument("--words", type=_existing, default=None,
                   help="only induce these words (one per line; default: all lemmas)")
    p.add_argument("--polysemy", choices=["first", "average"], default="first",
                   help="synset choice for polysemous induced words")
    add_normalize(p)
    p.add_argument("--out", required=True, help="enriched space output file")

    p = add("eval", cmd_eval, "word-similarity evaluation (in-space, before/after, cross-space)")
    p.add_argument("--dataset", type=_existing, action="append", required=True,
                   help="similarity dataset file (repeatable)")
    p.add_argument("--space", type=_existing, default=None, help="evaluate this space")
    p.add_argument("--before", type=_existing, default=None, help="initial space")
    p.add_argument("--after", type=_existing, default=None, help="enriched space")
    p.add_argument("--sim", choices=["cosine", "maxsim"], default="cosine",
                   help="maxsim treats the space as a synset space (needs --lemma-map)")
    p.add_argument("--oov", choices=["exclude", "impute"], default="exclude",
                   help="OOV pair policy")
    p.add_argument("--map", type=_existing, default=None, help="cross-space evaluation map")
    p.add_argument("--corpus-space", type=_existing, default=None, help="corpus space (with --map)")
    p.add_argument("--kb-space", type=_existing, default=None, help="KB space (with --map)")
    p.add_argument("--lemma-map", type=_existing, default=None, help="lemma map file")
    p.add_argument("--directions", choices=["forward", "reverse", "both"], default="both",
                   help="cross-space directions")
    p.add_argument("--combine", choices=["pool", "average"], default="pool",
                   help="how both directions enter the correlation")
    p.add_argument("--records", default=None,
                   help="prefix for per-pair record files (<prefix>.<dataset>.<tag>.tsv)")
    add_normalize(p)

    p = add("sweep", cmd_sweep, "refit maps on growing bridge prefixes and evaluate each")
    p.add_argument("--corpus-space", type=_existing, required=True, help="corpus embedding file")
    p.add_argument("--kb-space", type=_labelled, action="append", required=True,
                   help="LABEL=PATH KB space (repeatable, e.g. node2vec=n2v.txt)")
    p.add_argument("--lemma-map", type=_existing, required=True, help="lemma map file")
    p.add_argument("--dataset", type=_existing, action="append", required=True,
                   help="similarity dataset file (repeatable)")
    p.add_argument("--sizes", type=_csv_ints, default=[500, 1000, 3000, 5000, 10000],
                   help="comma-separated bridge set sizes")
    p.add_argument("--methods", type=_csv, default=["ls", "cca"], help="mapping methods")
    p.add_argument("--directions", choices=["forward", "reverse", "both"], default="both",
                   help="cross-space directions")
    add_bridge_flags(p)
    add_normalize(p)
    p.add_argument("--out", required=True, help="sweep table output file")

    p = add("info", cmd_info, "describe graphs, spaces, lemma maps, maps and walk corpora")
    p.add_argument("--graph", type=_existing, default=None, help="edge list file")
    p.add_argument("--directed", action="store_true", help="treat edges as directed")
    p.add_argument("--space", type=_existing, default=None, help="embedding file")
    p.add_argument("--lemma-map", type=_existing, default=None, help="lemma map file")
    p.add_argument("--map", type=_existing, default=None, help="map file")
    p.add_argument("--corpus", type=_existing, default=None, help="walk corpus file")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "methods", None):
        bad = [m for m in args.methods if m not in ("ls", "cca")]
        if bad:
            parser.error(f"unknown method(s): {', '.join(bad)}")
    started = time.time()
    try:
        inputs = args.func(args)
    except UsageError as e:
        parser.error(str(e))
    except (OSError, ValueError, KeyError, ArithmeticError) as e:
        print(f"lexbridge {args.command}: error: {e}", file=sys.stderr)
        return 1
    out = getattr(args, "out", None)
    manifest = args.manifest or (f"{out}.manifest" if out else f"lexbridge-{args.command}.manifest")
    write_manifest(manifest, args, inputs, started, ["lexbridge"] + argv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
