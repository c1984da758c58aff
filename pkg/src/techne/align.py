"""Sub-sentence word alignment.

Two aligners over pre-tokenized sentence pairs:

* an expectation-maximization lexical translation model estimating
  t(target word | source word) from a bitext, decoded by per-source argmax;
* an embedding aligner linking each source token to its highest-cosine
  target token.

Both leave tokens unaligned when the best score falls below a threshold;
there is no NULL word, so empty alignment sides arise only from thresholding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Sentence


@dataclass
class TranslationTable:
    """Lexical translation probabilities t(target | source).

    ``probs`` maps (source word, target word) pairs that co-occur somewhere
    in the training bitext; rows sum to one over the stored entries.
    ``log_likelihood_history`` holds the corpus log-likelihood under the
    table after 0, 1, ... EM iterations.
    """

    probs: dict
    source_vocab: frozenset
    target_vocab: frozenset
    log_likelihood_history: list = field(default_factory=list)

    def prob(self, source: str, target: str) -> float:
        return self.probs.get((source, target), 0.0)

    def check_rows(self, tol: float = 1e-9) -> None:
        """Raise if any source row fails to sum to 1 within ``tol``."""
        totals: dict = {}
        for (s, _t), p in self.probs.items():
            if not (0.0 <= p <= 1.0 + tol):
                raise ValueError(f"probability out of range for {s!r}: {p}")
            totals[s] = totals.get(s, 0.0) + p
        for s, total in totals.items():
            if abs(total - 1.0) > tol:
                raise ValueError(f"row for {s!r} sums to {total}, not 1")


@dataclass
class EmbeddingTable:
    vectors: dict
    dim: int


@dataclass(frozen=True)
class Alignment:
    links: tuple
    unaligned_source: tuple
    unaligned_target: tuple


def _surfaces(sentence: Sentence) -> list:
    return [t.surface for t in sentence.tokens]


def _word_pair_log_likelihood(pairs, table: TranslationTable) -> float:
    total = 0.0
    for src_words, tgt_words in pairs:
        for t_word in tgt_words:
            z = sum(table.prob(s_word, t_word) for s_word in src_words)
            total += math.log(z / len(src_words)) if z > 0.0 else float("-inf")
    return total


def corpus_log_likelihood(bitext, table: TranslationTable) -> float:
    """Sum over target tokens of log( mean_i t(t_j | s_i) )."""
    return _word_pair_log_likelihood(
        [(_surfaces(s), _surfaces(t)) for s, t in bitext], table
    )


def train_lexical_model(bitext, iterations: int = 10) -> TranslationTable:
    """Estimate t(target|source) by EM over a sentence-aligned bitext.

    Initialization is uniform over the target words co-occurring with each
    source word; ``iterations == 0`` returns that initial table. The corpus
    log-likelihood is recorded after every iteration and is non-decreasing.
    """
    if not bitext:
        raise ValueError("bitext is empty")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    pairs = []
    for src, tgt in bitext:
        if len(src) == 0 or len(tgt) == 0:
            raise ValueError("bitext contains a sentence with zero tokens")
        pairs.append((_surfaces(src), _surfaces(tgt)))

    cooc: dict = {}
    for src_words, tgt_words in pairs:
        for s in src_words:
            cooc.setdefault(s, set()).update(tgt_words)
    probs = {}
    for s, targets in cooc.items():
        p0 = 1.0 / len(targets)
        for t in targets:
            probs[(s, t)] = p0

    source_vocab = frozenset(cooc)
    target_vocab = frozenset(t for ts in cooc.values() for t in ts)
    table = TranslationTable(probs, source_vocab, target_vocab)
    table.log_likelihood_history.append(_word_pair_log_likelihood(pairs, table))

    for _ in range(iterations):
        counts: dict = {}
        totals: dict = {}
        for src_words, tgt_words in pairs:
            for t in tgt_words:
                z = sum(table.probs.get((s, t), 0.0) for s in src_words)
                for s in src_words:
                    p = table.probs.get((s, t), 0.0)
                    if p == 0.0:
                        continue
                    share = p / z
                    counts[(s, t)] = counts.get((s, t), 0.0) + share
                    totals[s] = totals.get(s, 0.0) + share
        new_probs = {key: c / totals[key[0]] for key, c in counts.items()}
        # words whose rows received no mass keep their previous distribution
        for key, p in table.probs.items():
            if key[0] not in totals:
                new_probs[key] = p
        table = TranslationTable(
            new_probs, source_vocab, target_vocab, table.log_likelihood_history
        )
        table.log_likelihood_history.append(_word_pair_log_likelihood(pairs, table))
    return table


def cosine(u, v) -> float:
    """Cosine similarity of two equal-length, non-zero vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for a zero vector")
    value = float(np.dot(u, v)) / (nu * nv)
    return max(-1.0, min(1.0, value))


def load_embeddings(path) -> EmbeddingTable:
    """Read a text embedding file: one `word v1 ... vd` line per word.

    An optional first line holding exactly two integers (`count dim`) is
    treated as a header and skipped.
    """
    path = Path(path)
    vectors: dict = {}
    dim = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                    continue  # header
                except ValueError:
                    pass
            word, values = parts[0], parts[1:]
            try:
                vec = np.array([float(x) for x in values], dtype=float)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad vector value ({exc})") from None
            if dim is None:
                dim = len(vec)
            if len(vec) != dim:
                raise ValueError(
                    f"{path}:{lineno}: vector for {word!r} has length {len(vec)}, expected {dim}"
                )
            vectors[word] = vec
    if dim is None:
        raise ValueError(f"{path}: no vectors found")
    return EmbeddingTable(vectors=vectors, dim=dim)


def _argmax_align(src: Sentence, tgt: Sentence, score, threshold: float) -> Alignment:
    """Shared decoder: per-source argmax with ties toward the smaller index.

    ``score(i, j)`` returns a similarity or None when the pair is unscorable
    (e.g. a missing embedding); unscorable source tokens stay unaligned.
    """
    links = []
    unaligned_source = []
    linked_targets = set()
    for i in range(len(src)):
        best_j = None
        best = None
        for j in range(len(tgt)):
            s = score(i, j)
            if s is None:
                continue
            if best is None or s > best:
                best, best_j = s, j
        if best is None or best < threshold:
            unaligned_source.append(i)
        else:
            links.append((i, best_j))
            linked_targets.add(best_j)
    unaligned_target = [j for j in range(len(tgt)) if j not in linked_targets]
    return Alignment(tuple(links), tuple(unaligned_source), tuple(unaligned_target))


def embed_align(
    src: Sentence, tgt: Sentence, emb: EmbeddingTable, threshold: float = 0.5
) -> Alignment:
    """Link each source token to its highest-cosine target token.

    Tokens missing from the table (or with a zero vector) are unaligned,
    as are source tokens whose best cosine falls below ``threshold``.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")

    def get(word):
        vec = emb.vectors.get(word)
        if vec is None or not np.any(vec):
            return None
        return vec

    src_vecs = [get(t.surface) for t in src.tokens]
    tgt_vecs = [get(t.surface) for t in tgt.tokens]

    def score(i, j):
        if src_vecs[i] is None or tgt_vecs[j] is None:
            return None
        return cosine(src_vecs[i], tgt_vecs[j])

    return _argmax_align(src, tgt, score, threshold)


def lexical_align(
    src: Sentence, tgt: Sentence, table: TranslationTable, threshold: float = 0.5
) -> Alignment:
    """Argmax decoding of the EM table: link source i to argmax_j t(tgt_j|src_i)."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")

    def score(i, j):
        return table.prob(src.tokens[i].surface, tgt.tokens[j].surface)

    return _argmax_align(src, tgt, score, threshold)


def intersect_alignments(a: Alignment, b: Alignment, n_src: int, n_tgt: int) -> Alignment:
    """Keep only links present in both alignments."""
    links = tuple(sorted(set(a.links) & set(b.links)))
    linked_src = {i for i, _ in links}
    linked_tgt = {j for _, j in links}
    return Alignment(
        links,
        tuple(i for i in range(n_src) if i not in linked_src),
        tuple(j for j in range(n_tgt) if j not in linked_tgt),
    )


__all__ = [
    "TranslationTable",
    "EmbeddingTable",
    "Alignment",
    "corpus_log_likelihood",
    "train_lexical_model",
    "cosine",
    "load_embeddings",
    "embed_align",
    "lexical_align",
    "intersect_alignments",
]
