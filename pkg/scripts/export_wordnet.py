"""Export WordNet as a synset edge list and a lemma map.

    pip install nltk && python3 -c "import nltk; nltk.download('wordnet')"
    python3 scripts/export_wordnet.py --out resources

writes ``wordnet.edges.tsv`` (one undirected edge per line, every synset
declared first so isolated synsets survive) and ``wordnet.lemmas.tsv``
(``lemma<TAB>pos<TAB>synset,synset,...`` with synsets in WordNet's sense
order and the POS of the first sense). Multi-word lemmas keep their
underscores. The relation set is a flag; the default is the
hypernym/hyponym taxonomy plus instance links.
"""

from __future__ import annotations

import argparse
from pathlib import Path

RELATIONS = {
    "hypernyms": lambda s: s.hypernyms() + s.instance_hypernyms(),
    "meronyms": lambda s: s.part_meronyms() + s.member_meronyms() + s.substance_meronyms(),
    "similar": lambda s: s.also_sees() + s.similar_tos() + s.verb_groups(),
    "entailments": lambda s: s.entailments() + s.causes(),
}


def export(out: Path, relations: list[str]) -> tuple[int, int, int]:
    from nltk.corpus import wordnet as wn  # optional dependency, only this script needs it

    synsets = list(wn.all_synsets())
    edges = set()
    for s in synsets:
        for rel in relations:
            for t in RELATIONS[rel](s):
                if t.name() != s.name():
                    edges.add(tuple(sorted((s.name(), t.name()))))
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "wordnet.edges.tsv", "w", encoding="utf-8") as f:
        for s in synsets:
            f.write(s.name() + "\n")
        for a, b in sorted(edges):
            f.write(f"{a}\t{b}\n")

    lemmas = sorted({name.lower() for name in wn.all_lemma_names()})
    with open(out / "wordnet.lemmas.tsv", "w", encoding="utf-8") as f:
        for lemma in lemmas:
            senses = wn.synsets(lemma)
            if senses:
                f.write(f"{lemma}\t{senses[0].pos()}\t{','.join(s.name() for s in senses)}\n")
    return len(synsets), len(edges), len(lemmas)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--out", default="resources", help="output directory")
    ap.add_argument("--relations", default="hypernyms",
                    help=f"comma-separated subset of {','.join(RELATIONS)}")
    args = ap.parse_args(argv)
    relations = [r for r in args.relations.split(",") if r]
    unknown = set(relations) - set(RELATIONS)
    if unknown:
        ap.error(f"unknown relations: {', '.join(sorted(unknown))}")
    n_syn, n_edges, n_lemmas = export(Path(args.out), relations)
    print(f"{n_syn} synsets, {n_edges} edges, {n_lemmas} lemmas -> {args.out}")


if __name__ == "__main__":
    main()
