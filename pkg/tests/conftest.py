"""Shared fixtures: a hand-built golden annotation suite and its resources.

The golden suite is independent of the shipped demo data: every pair below
was labeled by hand-applying the cascade rules, and the resources contain
exactly the entries those derivations used.
"""

from __future__ import annotations

import pytest

from techne.corpus import AlignedUnit, PairRecord, Technique, make_sentence
from techne.resources import Markers, Relation, RuleResources


def build_record(rid, src_pairs, tgt_pairs, src_span, tgt_span, technique=None, quality=None):
    src = make_sentence(src_pairs, "en")
    tgt = make_sentence(tgt_pairs, "zh")
    unit = AlignedUnit.from_spans(src, tgt, src_span, tgt_span)
    return PairRecord(rid, src, tgt, unit, technique, quality)


@pytest.fixture(scope="session")
def golden_resources() -> RuleResources:
    lexicon = {
        "dog": ("狗",),
        "run": ("跑",),
        "big": ("大",),
        "house": ("房子",),
        "not": ("不",),
        "good": ("好",),
        "bad": ("坏",),
        "book": ("书",),
        "teacher": ("老师",),
        "decide": ("决定",),
        "decided": ("决定了",),  # exact entry must not shadow the lemma gloss
        "quick": ("快",),
        "help": ("帮助",),
        "walk": ("走",),
        "eat": ("吃",),
        "see": ("看见",),
        "sedan": ("轿车",),
        "rose": ("玫瑰",),
        "vehicle": ("车辆",),
        "flower": ("花",),
        "it": ("它",),
        "he": ("他",),
        "buy": ("买",),
        "against": ("反对",),
        "in": ("在",),
        "success": ("成就",),
        "the": ("这",),
        "kick": ("踢",),
        "bucket": ("桶",),
        "piece": ("块",),
        "cake": ("蛋糕",),
    }
    relations = {
        "轿车": Relation(frozenset({"车辆"}), frozenset()),
        "玫瑰": Relation(frozenset({"花"}), frozenset()),
    }
    similarity = {
        ("买", "卖"): 0.30,
        ("反对", "靠"): 0.10,
        ("在", "进入"): 0.20,
        ("成就", "成功"): 0.50,
    }
    idioms = {
        "kick the bucket": ("翘辫子",),
        "piece of cake": ("小菜一碟",),
        "asap": ("尽快",),
    }
    markers = Markers(
        aspect=frozenset({"了", "过", "着"}),
        plural=frozenset({"们"}),
        passive=frozenset({"被"}),
        connectives=frozenset({"因此", "所以", "但是"}),
        particles=frozenset({"就", "也", "的", "地", "得"}),
        resumptives=frozenset({"这", "那"}),
        determiners=frozenset({"the", "a", "an", "this", "that"}),
        copulas=frozenset({"is", "are", "was", "were", "be", "been", "am"}),
        anticipatory_it=frozenset({"it"}),
        negation_src=frozenset({"not", "no", "never", "n't"}),
        negation_tgt=frozenset({"不", "没", "没有", "别", "未"}),
    )
    return RuleResources(lexicon, relations, similarity, idioms, markers)


def golden_cases():
    """(record, expected technique) pairs; >= 3 per technique, 34 total."""
    D, N, V, A, R, P, X, C, J = "DET", "NOUN", "VERB", "ADJ", "ADV", "PRON", "AUX", "ADP", "PART"
    cases = [
        # ---- RED: empty target span, droppable source head
        ("red-det", [("the", D), ("dog", N), ("runs", V)],
         [("狗", N), ("跑", V)], (0, 1), None, Technique.RED),
        ("red-prep", [("the", D), ("door", N), ("of", C), ("the", D), ("house", N)],
         [("房子", N), ("的", J), ("门", N)], (2, 3), None, Technique.RED),
        ("red-it", [("it", P), ("is", X), ("good", A), ("to", J), ("read", V)],
         [("读", V), ("很", R), ("好", A)], (0, 1), None, Technique.RED),
        ("red-copula", [("the", D), ("tea", N), ("is", X), ("hot", A)],
         [("茶", N), ("很", R), ("热", A)], (2, 3), None, Technique.RED),
        # ---- EXP: empty source span, additive target word
        ("exp-connective", [("the", D), ("water", N), ("is", X), ("cold", A)],
         [("因此", "CONJ"), ("水", N), ("很", R), ("冷", A)], None, (0, 1), Technique.EXP),
        ("exp-particle", [("the", D), ("water", N), ("is", X), ("cold", A)],
         [("就", J), ("水", N), ("很", R), ("冷", A)], None, (0, 1), Technique.EXP),
        ("exp-resumptive", [("the", D), ("water", N), ("is", X), ("cold", A)],
         [("这", P), ("水", N), ("很", R), ("冷", A)], None, (0, 1), Technique.EXP),
        # ---- EQU: fixed expressions
        ("equ-idiom", [("he", P), ("will", X), ("kick", V), ("the", D), ("bucket", N)],
         [("他", P), ("快要", R), ("翘辫子", V)], (2, 5), (2, 3), Technique.EQU),
        ("equ-idiom2", [("it", P), ("is", X), ("a", D), ("piece", N), ("of", C), ("cake", N)],
         [("这", P), ("是", V), ("小菜一碟", N)], (3, 6), (2, 3), Technique.EQU),
        ("equ-abbrev", [("reply", V), ("asap", R)],
         [("尽快", R), ("回复", V)], (1, 2), (0, 1), Technique.EQU),
        # ---- LIT: word-for-word, same head POS, no residue
        ("lit-noun", [("the", D), ("dog", N), ("is", X), ("big", A)],
         [("狗", N), ("很", R), ("大", A)], (1, 2), (0, 1), Technique.LIT),
        ("lit-verb", [("the", D), ("dog", N), ("can", X), ("run", V)],
         [("狗", N), ("会", X), ("跑", V)], (3, 4), (2, 3), Technique.LIT),
        ("lit-phrase", [("the", D), ("big", A), ("house", N)],
         [("大", A), ("房子", N)], (1, 3), (0, 2), Technique.LIT),
        ("lit-negative", [("the", D), ("tea", N), ("is", X), ("not", J), ("good", A)],
         [("茶", N), ("不", R), ("好", A)], (3, 5), (1, 3), Technique.LIT),
        # ---- LEX: morphosyntactic-only differences
        ("lex-plural-drop", [("the", D), ("books", N), ("are", X), ("here", R)],
         [("书", N), ("在", C), ("这里", P)], (1, 2), (0, 1), Technique.LEX),
        ("lex-plural-add", [("the", D), ("teachers", N), ("are", X), ("here", R)],
         [("老师", N), ("们", J), ("在", C), ("这里", P)], (1, 2), (0, 2), Technique.LEX),
        ("lex-tense", [("he", P), ("walked", V), ("home", R)],
         [("他", P), ("走", V), ("了", J)], (1, 2), (1, 3), Technique.LEX),
        ("lex-passive-drop", [("the", D), ("fish", N), ("was", X), ("eaten", V)],
         [("鱼", N), ("吃", V), ("了", J)], (2, 4), (1, 3), Technique.LEX),
        # ---- TRA: gloss kept, head POS changes
        ("tra-verb-noun", [("he", P), ("decided", V), ("today", R)],
         [("他", P), ("做出", V), ("了", J), ("决定", N)], (1, 2), (3, 4), Technique.TRA),
        ("tra-adv-adj", [("he", P), ("can", X), ("run", V), ("quickly", R)],
         [("他", P), ("跑", V), ("得", J), ("很", R), ("快", A)], (3, 4), (4, 5), Technique.TRA),
        ("tra-verb-noun2", [("he", P), ("helped", V), ("me", P)],
         [("他", P), ("给", V), ("了", J), ("我", P), ("帮助", N)], (1, 2), (4, 5), Technique.TRA),
        # ---- GEN: generalization
        ("gen-hypernym", [("the", D), ("sedan", N), ("is", X), ("new", A)],
         [("车辆", N), ("很", R), ("新", A)], (1, 2), (0, 1), Technique.GEN),
        ("gen-hypernym2", [("the", D), ("rose", N), ("is", X), ("red", A)],
         [("花", N), ("很", R), ("红", A)], (1, 2), (0, 1), Technique.GEN),
        ("gen-pronoun", [("the", D), ("teacher", N), ("can", X), ("read", V)],
         [("他", P), ("会", X), ("读", V)], (0, 2), (0, 1), Technique.GEN),
        ("gen-metaphor", [("he", P), ("will", X), ("kick", V), ("the", D), ("bucket", N)],
         [("他", P), ("快要", R), ("死", V)], (2, 5), (2, 3), Technique.GEN),
        # ---- PAR: particularization
        ("par-hyponym", [("the", D), ("vehicle", N), ("is", X), ("new", A)],
         [("轿车", N), ("很", R), ("新", A)], (1, 2), (0, 1), Technique.PAR),
        ("par-hyponym2", [("the", D), ("flower", N), ("is", X), ("red", A)],
         [("玫瑰", N), ("很", R), ("红", A)], (1, 2), (0, 1), Technique.PAR),
        ("par-pronoun", [("he", P), ("can", X), ("read", V)],
         [("学生", N), ("会", X), ("读", V)], (0, 1), (0, 1), Technique.PAR),
        # ---- MOT: semantic shift with POS change, ADP/NOUN sources
        ("mot-prep", [("he", P), ("is", X), ("against", C), ("the", D), ("wall", N)],
         [("他", P), ("靠", V), ("着", J), ("墙", N)], (2, 3), (1, 2), Technique.MOT),
        ("mot-prep2", [("he", P), ("is", X), ("in", C), ("the", D), ("garden", N)],
         [("他", P), ("进入", V), ("了", J), ("花园", N)], (2, 3), (1, 2), Technique.MOT),
        ("mot-noun", [("the", D), ("success", N), ("is", X), ("big", A)],
         [("他", P), ("成功", V), ("了", J)], (1, 2), (1, 2), Technique.MOT),
        # ---- MOD: voice/negation flips and the similarity band
        ("mod-negation", [("the", D), ("tea", N), ("is", X), ("not", J), ("bad", A)],
         [("茶", N), ("很", R), ("好", A)], (3, 5), (1, 3), Technique.MOD),
        ("mod-voice", [("he", P), ("saw", V), ("the", D), ("dog", N)],
         [("狗", N), ("被", J), ("看见", V)], (1, 2), (1, 3), Technique.MOD),
        ("mod-band", [("he", P), ("will", X), ("buy", V)],
         [("他", P), ("会", X), ("卖", V)], (2, 3), (2, 3), Technique.MOD),
    ]
    return [
        (build_record(rid, src, tgt, ss, ts), expected)
        for rid, src, tgt, ss, ts, expected in cases
    ]


@pytest.fixture(scope="session")
def golden_suite():
    return golden_cases()


@pytest.fixture(scope="session")
def demo_dir():
    """The shipped demo dataset at the repository root."""
    from pathlib import Path

    root = Path(__file__).resolve().parent.parent / "data" / "demo"
    if not root.exists():
        pytest.skip("demo dataset not generated")
    return root
