import math
from fractions import Fraction

import numpy as np
import pytest

from techne.align import (
    Alignment,
    EmbeddingTable,
    TranslationTable,
    cosine,
    embed_align,
    intersect_alignments,
    lexical_align,
    load_embeddings,
    train_lexical_model,
)
from techne.corpus import make_sentence


def sent(words, lang="en"):
    return make_sentence([(w, "OTHER") for w in words], lang)


def bitext(pairs):
    return [(sent(s.split()), sent(t.split(), "zh")) for s, t in pairs]


TOY = [("dog runs", "狗 跑"), ("cat runs", "猫 跑")]


# ---------------------------------------------------------------------------
# independent oracle: the same EM recurrences in exact rational arithmetic


def em_oracle(pairs, iterations):
    cooc = {}
    for s_words, t_words in pairs:
        for s in s_words:
            cooc.setdefault(s, set()).update(t_words)
    probs = {
        (s, t): Fraction(1, len(ts)) for s, ts in cooc.items() for t in ts
    }
    for _ in range(iterations):
        counts, totals = {}, {}
        for s_words, t_words in pairs:
            for t in t_words:
                z = sum(probs.get((s, t), Fraction(0)) for s in s_words)
                for s in s_words:
                    p = probs.get((s, t))
                    if p:
                        share = p / z
                        counts[(s, t)] = counts.get((s, t), Fraction(0)) + share
                        totals[s] = totals.get(s, Fraction(0)) + share
        probs = {k: v / totals[k[0]] for k, v in counts.items()}
    return probs


def test_single_pair_one_iteration_certainty():
    table = train_lexical_model(bitext([("dog", "狗")]), iterations=1)
    assert table.prob("dog", "狗") == pytest.approx(1.0, abs=1e-12)


def test_uniform_initialization_contract():
    table = train_lexical_model(bitext(TOY), iterations=0)
    assert table.prob("dog", "狗") == pytest.approx(0.5, abs=1e-12)
    assert table.prob("dog", "跑") == pytest.approx(0.5, abs=1e-12)
    for t in ("狗", "跑", "猫"):
        assert table.prob("runs", t) == pytest.approx(1 / 3, abs=1e-12)


def test_em_matches_hand_run_values():
    # iteration 1 and 2 values derived by hand for the two-pair corpus
    t1 = train_lexical_model(bitext(TOY), iterations=1)
    assert t1.prob("runs", "跑") == pytest.approx(1 / 2, abs=1e-9)
    assert t1.prob("runs", "狗") == pytest.approx(1 / 4, abs=1e-9)
    assert t1.prob("dog", "狗") == pytest.approx(1 / 2, abs=1e-9)
    t2 = train_lexical_model(bitext(TOY), iterations=2)
    assert t2.prob("runs", "跑") == pytest.approx(3 / 5, abs=1e-9)
    assert t2.prob("dog", "狗") == pytest.approx(4 / 7, abs=1e-9)
    assert t2.prob("cat", "猫") == pytest.approx(4 / 7, abs=1e-9)


@pytest.mark.parametrize("iterations", [1, 2, 3, 5])
def test_em_matches_rational_oracle(iterations):
    pairs = [(s.split(), t.split()) for s, t in TOY]
    oracle = em_oracle(pairs, iterations)
    table = train_lexical_model(bitext(TOY), iterations=iterations)
    for key, value in oracle.items():
        assert table.probs[key] == pytest.approx(float(value), abs=1e-9)


def test_em_dominates_alternatives_after_five_iterations():
    table = train_lexical_model(bitext(TOY), iterations=5)
    assert table.prob("runs", "跑") > table.prob("runs", "狗")
    assert table.prob("runs", "跑") > table.prob("runs", "猫")


def test_rows_stochastic_every_iteration():
    for k in range(1, 6):
        table = train_lexical_model(bitext(TOY), iterations=k)
        table.check_rows(tol=1e-9)


def test_log_likelihood_non_decreasing():
    table = train_lexical_model(bitext(TOY), iterations=10)
    history = table.log_likelihood_history
    assert len(history) == 11
    for before, after in zip(history, history[1:]):
        assert after >= before - 1e-9


def test_train_rejects_bad_bitext():
    with pytest.raises(ValueError):
        train_lexical_model([], iterations=1)
    with pytest.raises(ValueError):
        train_lexical_model([(sent([]), sent(["狗"], "zh"))], iterations=1)


# ---------------------------------------------------------------------------
# cosine


def test_cosine_basics():
    assert cosine((1, 0), (1, 0)) == 1.0
    assert cosine((1, 0), (0, 1)) == 0.0
    assert cosine((1, 2, 2), (2, 1, 2)) == pytest.approx(8 / 9, abs=1e-12)
    assert cosine((1, 2, 2), (2, 1, 2)) == cosine((2, 1, 2), (1, 2, 2))


def test_cosine_errors():
    with pytest.raises(ValueError):
        cosine((1, 0), (1, 0, 0))
    with pytest.raises(ValueError):
        cosine((0, 0), (1, 0))


# ---------------------------------------------------------------------------
# embedding aligner


def table_of(vectors, dim):
    return EmbeddingTable({w: np.asarray(v, dtype=float) for w, v in vectors.items()}, dim)


def test_embed_align_identical_vectors():
    emb = table_of({"dog": (1.0, 0.0), "狗": (1.0, 0.0)}, 2)
    a = embed_align(sent(["dog"]), sent(["狗"], "zh"), emb)
    assert a.links == ((0, 0),)
    assert a.unaligned_source == () and a.unaligned_target == ()


def test_embed_align_threshold_filters():
    emb = table_of({"dog": (1.0, 0.0), "狗": (0.0, 1.0)}, 2)
    a = embed_align(sent(["dog"]), sent(["狗"], "zh"), emb, threshold=0.5)
    assert a.links == ()
    assert a.unaligned_source == (0,) and a.unaligned_target == (0,)


def test_embed_align_two_by_two_matches_brute_force():
    # unit source vectors with prescribed cosines to orthonormal targets
    vectors = {
        "t0": (1.0, 0.0, 0.0),
        "t1": (0.0, 1.0, 0.0),
        "s0": (0.3, 0.9, math.sqrt(1 - 0.3 ** 2 - 0.9 ** 2)),
        "s1": (0.8, 0.2, math.sqrt(1 - 0.8 ** 2 - 0.2 ** 2)),
    }
    emb = table_of(vectors, 3)
    src, tgt = sent(["s0", "s1"]), sent(["t0", "t1"], "zh")

    links = []
    for i, s in enumerate(("s0", "s1")):
        scores = [cosine(vectors[s], vectors[t]) for t in ("t0", "t1")]
        best = max(range(2), key=lambda j: (scores[j], -j))
        if scores[best] >= 0.5:
            links.append((i, best))
    assert links == [(0, 1), (1, 0)]  # brute-force oracle over all 4 cosines

    a = embed_align(src, tgt, emb, threshold=0.5)
    assert sorted(a.links) == links


def test_embed_align_missing_word_unaligned():
    emb = table_of({"dog": (1.0, 0.0), "狗": (1.0, 0.0)}, 2)
    a = embed_align(sent(["dog", "ghost"]), sent(["狗"], "zh"), emb)
    assert a.links == ((0, 0),)
    assert a.unaligned_source == (1,)


def test_embed_align_scale_invariance():
    emb = table_of({"a": (0.2, 0.5), "b": (0.9, 0.1), "x": (0.21, 0.52), "y": (1.0, 0.2)}, 2)
    scaled = table_of({w: tuple(3.7 * v for v in vec) for w, vec in
                       {"a": (0.2, 0.5), "b": (0.9, 0.1), "x": (0.21, 0.52), "y": (1.0, 0.2)}.items()}, 2)
    src, tgt = sent(["a", "b"]), sent(["x", "y"], "zh")
    assert embed_align(src, tgt, emb, 0.3) == embed_align(src, tgt, scaled, 0.3)


def test_embed_align_tie_breaks_to_smaller_index():
    emb = table_of({"s": (1.0, 0.0), "u": (1.0, 0.0), "v": (1.0, 0.0)}, 2)
    a = embed_align(sent(["s"]), sent(["u", "v"], "zh"), emb, threshold=0.5)
    assert a.links == ((0, 0),)


def test_embed_align_threshold_validation():
    emb = table_of({"a": (1.0, 0.0)}, 2)
    with pytest.raises(ValueError):
        embed_align(sent(["a"]), sent(["a"], "zh"), emb, threshold=1.5)


# ---------------------------------------------------------------------------
# lexical aligner


def test_lexical_align_certain_link():
    table = TranslationTable({("dog", "狗"): 1.0}, frozenset({"dog"}), frozenset({"狗"}))
    a = lexical_align(sent(["dog"]), sent(["狗"], "zh"), table)
    assert a.links == ((0, 0),)


def test_lexical_align_all_below_threshold():
    table = TranslationTable({("dog", "狗"): 0.2}, frozenset({"dog"}), frozenset({"狗"}))
    a = lexical_align(sent(["dog"]), sent(["狗"], "zh"), table, threshold=0.5)
    assert a.links == ()
    assert a.unaligned_source == (0,) and a.unaligned_target == (0,)


def test_lexical_align_from_trained_toy_model():
    table = train_lexical_model(bitext(TOY), iterations=5)
    a = lexical_align(sent(["dog", "runs"]), sent(["狗", "跑"], "zh"), table, threshold=0.3)
    assert (1, 1) in a.links  # "runs" links to 跑


def test_alignment_partition_invariant():
    table = train_lexical_model(bitext(TOY), iterations=3)
    src, tgt = sent(["dog", "runs", "ghost"]), sent(["狗", "跑"], "zh")
    a = lexical_align(src, tgt, table, threshold=0.4)
    src_seen = sorted([i for i, _ in a.links] + list(a.unaligned_source))
    assert src_seen == list(range(len(src)))
    tgt_seen = sorted(set(j for _, j in a.links) | set(a.unaligned_target))
    assert tgt_seen == list(range(len(tgt)))


def test_intersect_alignments():
    a = Alignment(((0, 0), (1, 1)), (), ())
    b = Alignment(((0, 0), (1, 0)), (), (1,))
    merged = intersect_alignments(a, b, 2, 2)
    assert merged.links == ((0, 0),)
    assert merged.unaligned_source == (1,) and merged.unaligned_target == (1,)


# ---------------------------------------------------------------------------
# embedding file loader


def test_load_embeddings_with_header(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("2 3\ndog 1 0 0\n狗 0.9 0.1 0\n", encoding="utf-8")
    emb = load_embeddings(path)
    assert emb.dim == 3 and set(emb.vectors) == {"dog", "狗"}


def test_load_embeddings_headerless_and_errors(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("dog 1 0\ncat 0 1\n", encoding="utf-8")
    assert load_embeddings(path).dim == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("dog 1 0\ncat 1\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_embeddings(bad)
