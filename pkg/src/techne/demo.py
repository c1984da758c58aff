"""Deterministic generator for the self-contained demonstration dataset.

Builds a synthetic English-Chinese corpus covering all ten techniques, the
matching rule resources, a toy bitext for the EM aligner, and a small
embedding table. Every generated record is constructed so the rule cascade
reproduces its intended label, which keeps the shipped corpus and the
annotator consistent. Regenerate the shipped files with::

    python -m techne.demo --out data/demo --records 200 --seed 7
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

import numpy as np

from .corpus import AlignedUnit, PairRecord, Technique, make_sentence, save_corpus
from .resources import Markers, Relation, RuleResources, save_resources

DEMO_SEED = 7

# (english, gloss) pools; glosses are also the literal targets.
NOUNS = [
    ("dog", "狗"), ("cat", "猫"), ("book", "书"), ("house", "房子"),
    ("water", "水"), ("tea", "茶"), ("road", "路"), ("tree", "树"),
    ("bird", "鸟"), ("fish", "鱼"), ("school", "学校"), ("city", "城市"),
    ("friend", "朋友"), ("door", "门"), ("mountain", "山"), ("river", "河"),
    ("moon", "月亮"), ("sun", "太阳"), ("rice", "米饭"), ("garden", "花园"),
]
VERBS = [
    ("run", "跑"), ("eat", "吃"), ("read", "读"), ("write", "写"),
    ("drink", "喝"), ("open", "打开"), ("close", "关闭"), ("find", "找到"),
    ("hear", "听到"), ("wash", "洗"),
]
ADJS = [
    ("big", "大"), ("small", "小"), ("good", "好"), ("new", "新"),
    ("old", "旧"), ("red", "红"), ("tall", "高"), ("happy", "开心"),
    ("cold", "冷"), ("hot", "热"),
]

# The second gloss column is the non-literal target of the good record;
# the lexicon carries only the first column, so synthesized literal twins
# differ from the good rendering.
PLURAL_DROP = [("books", "书"), ("cats", "猫"), ("birds", "鸟"), ("friends", "朋友")]
PLURAL_ADD = [("teachers", "老师", "老师们"), ("students", "学生", "学生们"),
              ("workers", "工人", "工人们")]
TENSE = [("walked", "走"), ("looked", "看"), ("listened", "听")]
PASSIVE_DROP = [("eaten", "吃"), ("found", "找到"), ("opened", "打开")]

# TRA sources carry an exact inflected entry (used by synthesis) plus a
# lemma entry whose gloss appears, with a different POS, in the target.
TRA_VERB_NOUN = [
    ("decided", "decide", "决定了", "决定"),
    ("helped", "help", "帮助了", "帮助"),
    ("answered", "answer", "回答了", "回答"),
    ("changed", "change", "改变了", "改变"),
]
TRA_ADV_ADJ = [
    ("quickly", "quick", "快速地", "快"),
    ("suddenly", "sudden", "突然地", "突然"),
]

IDIOMS = [
    ("kick the bucket", "翘辫子", [("kick", "VERB"), ("the", "DET"), ("bucket", "NOUN")]),
    ("piece of cake", "小菜一碟", [("piece", "NOUN"), ("of", "ADP"), ("cake", "NOUN")]),
    ("break the ice", "打破僵局", [("break", "VERB"), ("the", "DET"), ("ice", "NOUN")]),
    ("spill the beans", "泄露秘密", [("spill", "VERB"), ("the", "DET"), ("beans", "NOUN")]),
]

GEN_HYPERNYM = [
    ("sedan", "轿车", "车辆"), ("rose", "玫瑰", "花"),
    ("sparrow", "麻雀", "鸟"), ("oak", "橡树", "树"),
]
GEN_PRONOUN = [("teacher", "他"), ("student", "她"), ("worker", "他们")]

PAR_HYPONYM = [
    ("vehicle", "车辆", "轿车"), ("flower", "花", "玫瑰"),
    ("animal", "动物", "狗"), ("fruit", "水果", "苹果"),
]
PAR_PRONOUN = [("he", "他", "医生"), ("she", "她", "老师"), ("they", "他们", "学生们")]

MOD_NEGATION = [("bad", "坏", "很好"), ("small", "小", "很大"),
                ("slow", "慢", "很快"), ("cold", "冷", "很热")]
MOD_VOICE = [("saw", "看见了", "看见"), ("heard", "听到了", "听到"),
             ("washed", "洗了", "洗")]
MOD_BAND = [("buy", "买", "卖", 0.30), ("begin", "开始", "出发", 0.40),
            ("cry", "哭", "喊", 0.45)]

MOT_CASES = [
    ("against", "ADP", "反对", "靠", 0.10),
    ("across", "ADP", "对面", "穿过", 0.20),
    ("success", "NOUN", "成就", "成功", 0.50),
    ("need", "NOUN", "需求", "需要", 0.50),
]

EXP_CONNECTIVES = ["因此", "然而", "所以", "而且", "但是"]
EXP_PARTICLES = ["就", "也"]
EXP_RESUMPTIVES = ["这", "那"]

FUNCTION_WORDS = {
    "the": "这", "a": "一个", "of": "的", "in": "在", "is": "是",
    "it": "它", "he": "他", "she": "她", "they": "他们", "not": "不",
    "very": "很", "fact": "事实",
}


def build_demo_resources() -> RuleResources:
    lexicon: dict = {}

    def add(word, *glosses):
        existing = lexicon.get(word, ())
        lexicon[word] = existing + tuple(g for g in glosses if g not in existing)

    for w, g in NOUNS + VERBS + ADJS:
        add(w, g)
    for w, g in FUNCTION_WORDS.items():
        add(w, g)
    for w, lemma, exact_gloss, lemma_gloss in TRA_VERB_NOUN + TRA_ADV_ADJ:
        add(w, exact_gloss)
        add(lemma, lemma_gloss)
    # plural forms (teachers, books, ...) stay out of the lexicon on purpose:
    # the lemma entry is what makes them lexical shifts rather than literals
    add("teacher", "老师")
    add("student", "学生")
    add("worker", "工人")
    add("walk", "走")
    add("look", "看")
    add("listen", "听")
    add("kick", "踢")
    add("bucket", "桶")
    add("piece", "块")
    add("cake", "蛋糕")
    add("break", "打破")
    add("ice", "冰")
    add("spill", "洒")
    add("beans", "豆子")
    for w, g, _ in GEN_HYPERNYM:
        add(w, g)
    for w, g, _ in PAR_HYPONYM:
        add(w, g)
    add("apple", "苹果")
    for w, g, _ in MOD_NEGATION:
        add(w, g)
    for w, exact_gloss, _ in MOD_VOICE:
        add(w, exact_gloss)
    for w, g, _, _ in MOD_BAND:
        add(w, g)
    for w, _pos, g, _t, _s in MOT_CASES:
        add(w, g)

    relations = {
        "轿车": Relation(frozenset({"车辆"}), frozenset()),
        "玫瑰": Relation(frozenset({"花"}), frozenset()),
        "麻雀": Relation(frozenset({"鸟"}), frozenset()),
        "橡树": Relation(frozenset({"树"}), frozenset()),
        "狗": Relation(frozenset({"动物"}), frozenset()),
        "苹果": Relation(frozenset({"水果"}), frozenset()),
    }

    similarity = {}
    for _w, a, b, score in MOD_BAND:
        similarity[(a, b)] = score
    for _w, _pos, a, b, score in MOT_CASES:
        similarity[(a, b)] = score

    idioms = {phrase: (target,) for phrase, target, _ in IDIOMS}
    idioms["asap"] = ("尽快",)

    markers = Markers(
        aspect=frozenset({"了", "过", "着"}),
        plural=frozenset({"们"}),
        passive=frozenset({"被"}),
        connectives=frozenset(EXP_CONNECTIVES),
        particles=frozenset(EXP_PARTICLES + ["都", "的", "地", "得"]),
        resumptives=frozenset(EXP_RESUMPTIVES),
        determiners=frozenset({"the", "a", "an", "this", "that", "these", "those"}),
        copulas=frozenset({"is", "are", "was", "were", "be", "been", "am"}),
        anticipatory_it=frozenset({"it"}),
        negation_src=frozenset({"not", "no", "never", "n't", "without", "none"}),
        negation_tgt=frozenset({"不", "没", "没有", "别", "未", "无"}),
    )
    return RuleResources(lexicon, relations, similarity, idioms, markers)


def _record(rid, src_pairs, tgt_pairs, src_span, tgt_span, technique) -> PairRecord:
    src = make_sentence(src_pairs, "en")
    tgt = make_sentence(tgt_pairs, "zh")
    unit = AlignedUnit.from_spans(src, tgt, src_span, tgt_span)
    return PairRecord(rid, src, tgt, unit, technique)


def _lit(rng, rid):
    kind = rng.choice(["noun", "verb", "adj", "pair"])
    if kind == "noun":
        w, g = rng.choice(NOUNS)
        adj, adj_g = rng.choice(ADJS)
        src = [("the", "DET"), (w, "NOUN"), ("is", "AUX"), (adj, "ADJ")]
        tgt = [(g, "NOUN"), ("很", "ADV"), (adj_g, "ADJ")]
        return _record(rid, src, tgt, (1, 2), (0, 1), Technique.LIT)
    if kind == "verb":
        w, g = rng.choice(VERBS)
        n, n_g = rng.choice(NOUNS)
        src = [("the", "DET"), (n, "NOUN"), ("can", "AUX"), (w, "VERB")]
        tgt = [(n_g, "NOUN"), ("会", "AUX"), (g, "VERB")]
        return _record(rid, src, tgt, (3, 4), (2, 3), Technique.LIT)
    if kind == "adj":
        w, g = rng.choice(ADJS)
        n, n_g = rng.choice(NOUNS)
        src = [("the", "DET"), (n, "NOUN"), ("is", "AUX"), (w, "ADJ")]
        tgt = [(n_g, "NOUN"), ("很", "ADV"), (g, "ADJ")]
        return _record(rid, src, tgt, (3, 4), (2, 3), Technique.LIT)
    a, a_g = rng.choice(ADJS)
    n, n_g = rng.choice(NOUNS)
    src = [("the", "DET"), (a, "ADJ"), (n, "NOUN"), ("is", "AUX"), ("here", "ADV")]
    tgt = [(a_g, "ADJ"), (n_g, "NOUN"), ("在", "ADP"), ("这里", "PRON")]
    return _record(rid, src, tgt, (1, 3), (0, 2), Technique.LIT)


def _lex(rng, rid):
    kind = rng.choice(["plural_drop", "plural_add", "tense", "passive"])
    if kind == "plural_drop":
        w, g = rng.choice(PLURAL_DROP)
        v, v_g = rng.choice(VERBS)
        src = [("the", "DET"), (w, "NOUN"), ("can", "AUX"), (v, "VERB")]
        tgt = [(g, "NOUN"), ("会", "AUX"), (v_g, "VERB")]
        return _record(rid, src, tgt, (1, 2), (0, 1), Technique.LEX)
    if kind == "plural_add":
        w, _lemma_g, full = rng.choice(PLURAL_ADD)
        src = [("the", "DET"), (w, "NOUN"), ("are", "AUX"), ("here", "ADV")]
        tgt = [(full[:-1], "NOUN"), ("们", "PART"), ("在", "ADP"), ("这里", "PRON")]
        return _record(rid, src, tgt, (1, 2), (0, 2), Technique.LEX)
    if kind == "tense":
        w, g = rng.choice(TENSE)
        src = [("he", "PRON"), (w, "VERB"), ("yesterday", "ADV")]
        tgt = [("他", "PRON"), ("昨天", "ADV"), (g, "VERB"), ("了", "PART")]
        return _record(rid, src, tgt, (1, 2), (2, 4), Technique.LEX)
    w, g = rng.choice(PASSIVE_DROP)
    n, n_g = rng.choice(NOUNS)
    src = [("the", "DET"), (n, "NOUN"), ("was", "AUX"), (w, "VERB")]
    tgt = [(n_g, "NOUN"), (g, "VERB"), ("了", "PART")]
    return _record(rid, src, tgt, (2, 4), (1, 3), Technique.LEX)


def _tra(rng, rid):
    if rng.random() < 0.67:
        w, _lemma, _exact_g, g = rng.choice(TRA_VERB_NOUN)
        src = [("he", "PRON"), (w, "VERB"), ("today", "ADV")]
        tgt = [("他", "PRON"), ("今天", "ADV"), ("做出", "VERB"), ("了", "PART"), (g, "NOUN")]
        return _record(rid, src, tgt, (1, 2), (4, 5), Technique.TRA)
    w, _lemma, _exact_g, g = rng.choice(TRA_ADV_ADJ)
    v, v_g = rng.choice(VERBS)
    src = [("he", "PRON"), ("can", "AUX"), (v, "VERB"), (w, "ADV")]
    tgt = [("他", "PRON"), ("会", "AUX"), ("很", "ADV"), (g, "ADJ"), ("地", "PART"), (v_g, "VERB")]
    return _record(rid, src, tgt, (3, 4), (3, 4), Technique.TRA)


def _equ(rng, rid):
    phrase, target, tokens = rng.choice(IDIOMS)
    src = [("he", "PRON"), ("will", "AUX")] + tokens
    tgt = [("他", "PRON"), ("快要", "ADV"), (target, "VERB")]
    return _record(rid, src, tgt, (2, 2 + len(tokens)), (2, 3), Technique.EQU)


def _gen(rng, rid):
    if rng.random() < 0.6:
        w, _g, hyper = rng.choice(GEN_HYPERNYM)
        src = [("the", "DET"), (w, "NOUN"), ("is", "AUX"), ("here", "ADV")]
        tgt = [(hyper, "NOUN"), ("在", "ADP"), ("这里", "PRON")]
        return _record(rid, src, tgt, (1, 2), (0, 1), Technique.GEN)
    w, pron = rng.choice(GEN_PRONOUN)
    src = [("the", "DET"), (w, "NOUN"), ("can", "AUX"), ("read", "VERB")]
    tgt = [(pron, "PRON"), ("会", "AUX"), ("读", "VERB")]
    return _record(rid, src, tgt, (0, 2), (0, 1), Technique.GEN)


def _par(rng, rid):
    if rng.random() < 0.6:
        w, _g, hypo = rng.choice(PAR_HYPONYM)
        src = [("the", "DET"), (w, "NOUN"), ("is", "AUX"), ("here", "ADV")]
        tgt = [(hypo, "NOUN"), ("在", "ADP"), ("这里", "PRON")]
        return _record(rid, src, tgt, (1, 2), (0, 1), Technique.PAR)
    w, _pron_g, referent = rng.choice(PAR_PRONOUN)
    if referent.endswith("们"):
        tgt = [(referent[:-1], "NOUN"), ("们", "PART"), ("会", "AUX"), ("读", "VERB")]
        span = (0, 2)
    else:
        tgt = [(referent, "NOUN"), ("会", "AUX"), ("读", "VERB")]
        span = (0, 1)
    src = [(w, "PRON"), ("can", "AUX"), ("read", "VERB")]
    return _record(rid, src, tgt, (0, 1), span, Technique.PAR)


def _mod(rng, rid):
    kind = rng.choice(["negation", "voice", "band"])
    if kind == "negation":
        w, _g, target = rng.choice(MOD_NEGATION)
        n, n_g = rng.choice(NOUNS)
        src = [("the", "DET"), (n, "NOUN"), ("is", "AUX"), ("not", "PART"), (w, "ADJ")]
        tgt = [(n_g, "NOUN"), (target[0], "ADV"), (target[1:], "ADJ")]
        return _record(rid, src, tgt, (3, 5), (1, 3), Technique.MOD)
    if kind == "voice":
        w, _exact_g, base = rng.choice(MOD_VOICE)
        n, n_g = rng.choice(NOUNS)
        src = [("he", "PRON"), (w, "VERB"), ("the", "DET"), (n, "NOUN")]
        tgt = [(n_g, "NOUN"), ("被", "PART"), (base, "VERB")]
        return _record(rid, src, tgt, (1, 2), (1, 3), Technique.MOD)
    w, _g, target, _score = rng.choice(MOD_BAND)
    src = [("he", "PRON"), ("can", "AUX"), (w, "VERB")]
    tgt = [("他", "PRON"), ("会", "AUX"), (target, "VERB")]
    return _record(rid, src, tgt, (2, 3), (2, 3), Technique.MOD)


def _mot(rng, rid):
    w, pos, _g, target, _score = rng.choice(MOT_CASES)
    if pos == "ADP":
        n, n_g = rng.choice(NOUNS)
        src = [("he", "PRON"), ("is", "AUX"), (w, "ADP"), ("the", "DET"), (n, "NOUN")]
        tgt = [("他", "PRON"), (target, "VERB"), ("着", "PART"), (n_g, "NOUN")]
        return _record(rid, src, tgt, (2, 3), (1, 2), Technique.MOT)
    src = [("the", "DET"), (w, "NOUN"), ("is", "AUX"), ("here", "ADV")]
    tgt = [("他", "PRON"), (target, "VERB"), ("了", "PART")]
    return _record(rid, src, tgt, (1, 2), (1, 2), Technique.MOT)


def _exp(rng, rid):
    pool = rng.choice([EXP_CONNECTIVES, EXP_PARTICLES, EXP_RESUMPTIVES])
    word = rng.choice(pool)
    pos = "CONJ" if word in EXP_CONNECTIVES else "PART"
    n, n_g = rng.choice(NOUNS)
    a, a_g = rng.choice(ADJS)
    src = [("the", "DET"), (n, "NOUN"), ("is", "AUX"), (a, "ADJ")]
    tgt = [(word, pos), (n_g, "NOUN"), ("很", "ADV"), (a_g, "ADJ")]
    return _record(rid, src, tgt, None, (0, 1), Technique.EXP)


def _red(rng, rid):
    kind = rng.choice(["det", "adp", "copula", "it", "noun"])
    if kind == "det":
        d = rng.choice(["the", "a"])
        n, n_g = rng.choice(NOUNS)
        v, v_g = rng.choice(VERBS)
        src = [(d, "DET"), (n, "NOUN"), ("can", "AUX"), (v, "VERB")]
        tgt = [(n_g, "NOUN"), ("会", "AUX"), (v_g, "VERB")]
        return _record(rid, src, tgt, (0, 1), None, Technique.RED)
    if kind == "adp":
        n1, g1 = rng.choice(NOUNS)
        n2, g2 = rng.choice(NOUNS)
        src = [("the", "DET"), (n1, "NOUN"), ("of", "ADP"), ("the", "DET"), (n2, "NOUN")]
        tgt = [(g2, "NOUN"), ("的", "PART"), (g1, "NOUN")]
        return _record(rid, src, tgt, (2, 3), None, Technique.RED)
    if kind == "copula":
        n, n_g = rng.choice(NOUNS)
        a, a_g = rng.choice(ADJS)
        src = [("the", "DET"), (n, "NOUN"), ("is", "AUX"), (a, "ADJ")]
        tgt = [(n_g, "NOUN"), ("很", "ADV"), (a_g, "ADJ")]
        return _record(rid, src, tgt, (2, 3), None, Technique.RED)
    if kind == "it":
        v, v_g = rng.choice(VERBS)
        src = [("it", "PRON"), ("is", "AUX"), ("good", "ADJ"), ("to", "PART"), (v, "VERB")]
        tgt = [(v_g, "VERB"), ("很", "ADV"), ("好", "ADJ")]
        return _record(rid, src, tgt, (0, 1), None, Technique.RED)
    n, n_g = rng.choice(NOUNS)
    a, a_g = rng.choice(ADJS)
    src = [("in", "ADP"), ("fact", "NOUN"), ("the", "DET"), (n, "NOUN"), ("is", "AUX"), (a, "ADJ")]
    tgt = [(n_g, "NOUN"), ("很", "ADV"), (a_g, "ADJ")]
    return _record(rid, src, tgt, (0, 2), None, Technique.RED)


_GENERATORS = {
    Technique.LIT: _lit,
    Technique.LEX: _lex,
    Technique.TRA: _tra,
    Technique.EQU: _equ,
    Technique.GEN: _gen,
    Technique.PAR: _par,
    Technique.MOD: _mod,
    Technique.MOT: _mot,
    Technique.EXP: _exp,
    Technique.RED: _red,
}

_TECHNIQUE_ORDER = (
    Technique.LIT, Technique.LEX, Technique.TRA, Technique.EQU, Technique.GEN,
    Technique.PAR, Technique.MOD, Technique.MOT, Technique.EXP, Technique.RED,
)


def generate_demo_corpus(n: int = 200, seed: int = DEMO_SEED):
    """``n`` labeled records, techniques round-robin, deterministic per seed."""
    rng = random.Random(seed)
    records = []
    for i in range(n):
        technique = _TECHNIQUE_ORDER[i % len(_TECHNIQUE_ORDER)]
        rid = f"rec-{i:06d}"
        records.append(_GENERATORS[technique](rng, rid))
    return records


def build_demo_bitext(n: int = 60, seed: int = DEMO_SEED):
    """Short parallel sentences (surface-aligned) for the EM aligner demo."""
    rng = random.Random(seed + 1)
    pairs = []
    for _ in range(n):
        n_w, n_g = rng.choice(NOUNS)
        if rng.random() < 0.5:
            v_w, v_g = rng.choice(VERBS)
            pairs.append((["the", n_w, "can", v_w], [n_g, "会", v_g]))
        else:
            a_w, a_g = rng.choice(ADJS)
            pairs.append((["the", n_w, "is", a_w], [n_g, "很", a_g]))
    return pairs


def build_demo_embeddings(dim: int = 16, seed: int = DEMO_SEED):
    """Paired vectors: each English word sits close to its gloss."""
    rng = np.random.default_rng(seed)
    vectors = {}
    for w, g in NOUNS + VERBS + ADJS:
        base = rng.standard_normal(dim)
        base /= np.linalg.norm(base)
        noise = rng.standard_normal(dim) * 0.05
        vectors[w] = base
        paired = base + noise
        vectors[g] = paired / np.linalg.norm(paired)
    return vectors, dim


def write_demo_dataset(out_dir, n: int = 200, seed: int = DEMO_SEED) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_corpus(generate_demo_corpus(n, seed), out_dir / "corpus.jsonl")
    save_resources(build_demo_resources(), out_dir / "resources")
    with (out_dir / "bitext.tsv").open("w", encoding="utf-8") as fh:
        for src_words, tgt_words in build_demo_bitext(seed=seed):
            fh.write(" ".join(src_words) + "\t" + " ".join(tgt_words) + "\n")
    vectors, dim = build_demo_embeddings(seed=seed)
    with (out_dir / "embeddings.txt").open("w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {dim}\n")
        for word, vec in vectors.items():
            fh.write(word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Write the demo dataset")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--records", type=int, default=200)
    parser.add_argument("--seed", type=int, default=DEMO_SEED)
    args = parser.parse_args(argv)
    write_demo_dataset(args.out, args.records, args.seed)
    print(f"wrote demo dataset ({args.records} records) to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
