"""Token-sequence layouts and fixed-length feature vectors for the classifiers.

Two layouts feed the classifiers (a separator token splits the segments):

    INPUT1   [source unit] SEP [source sentence]
    INPUT2   [source unit] SEP [source sentence] SEP [target unit] SEP [target sentence]

Feature vectors share one layout for both formats so a single encoder can
read either: four hashed n-gram blocks (source unit, source sentence, target
unit, target sentence), a dense linguistic block, and optional mean-pooled
embedding blocks. Under INPUT1 every target-derived slot is held at zero, so
the from-scratch task never sees the target side.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .align import EmbeddingTable
from .corpus import POS_TAGS, PairRecord
from .lingo import CONTENT_POS, family_match, has_any, head_token, is_passive_english
from .resources import RuleResources

SEP = "[SEP]"
EMPTY_UNIT = "[EMPTY]"

#: Layout revision, part of the feature fingerprint.
FEATURE_LAYOUT_VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_BIGRAM_JOINER = "\x1f"

DENSE_FEATURES = (
    "src_unit_len",        # token counts are scaled by 1/10
    "src_sent_len",
    "tgt_unit_len",
    "tgt_sent_len",
    "src_unit_pos_ratio",
    "tgt_unit_pos_ratio",
    *(f"src_head_pos_{t}" for t in POS_TAGS),
    *(f"tgt_head_pos_{t}" for t in POS_TAGS),
    "head_pos_change",
    "tgt_aspect_marker",
    "tgt_plural_marker",
    "tgt_passive_marker",
    "gloss_match_score",
    "similarity_score",
    "hypernym_flag",
    "hyponym_flag",
    "negation_parity",
    "src_span_empty",
    "tgt_span_empty",
    "resource_missing",
)

#: Dense slots computed from the target side, zeroed under INPUT1.
_TARGET_DEPENDENT = frozenset(
    name
    for name in DENSE_FEATURES
    if name.startswith("tgt_") or name in (
        "head_pos_change", "gloss_match_score", "similarity_score",
        "hypernym_flag", "hyponym_flag", "negation_parity",
    )
)


class InputFormat(str, Enum):
    INPUT1 = "INPUT1"
    INPUT2 = "INPUT2"


@dataclass(frozen=True)
class FeatureConfig:
    hash_dim: int = 2 ** 14
    use_embeddings: bool = False
    embedding_dim: int = 0

    def __post_init__(self):
        if self.hash_dim < 2 or self.hash_dim & (self.hash_dim - 1):
            raise ValueError("hash_dim must be a power of two >= 2")
        if self.use_embeddings and self.embedding_dim <= 0:
            raise ValueError("use_embeddings requires a positive embedding_dim")


@dataclass
class EncodedInput:
    format: InputFormat
    token_sequence: list
    feature_vector: "np.ndarray | None" = None


def feature_dim(config: FeatureConfig) -> int:
    d = 4 * config.hash_dim + len(DENSE_FEATURES)
    if config.use_embeddings:
        d += 4 * config.embedding_dim
    return d


def feature_fingerprint(config: FeatureConfig) -> str:
    """Short stable identifier for (layout, config); stored in checkpoints."""
    payload = json.dumps(
        {
            "layout": FEATURE_LAYOUT_VERSION,
            "hash_dim": config.hash_dim,
            "use_embeddings": config.use_embeddings,
            "embedding_dim": config.embedding_dim,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _unit_or_placeholder(tokens) -> list:
    return [t.surface for t in tokens] if tokens else [EMPTY_UNIT]


def build_input1(record: PairRecord) -> EncodedInput:
    """Source unit, separator, source sentence. Never any target content."""
    seq = (
        _unit_or_placeholder(record.source_unit_tokens())
        + [SEP]
        + [t.surface for t in record.source_sentence.tokens]
    )
    return EncodedInput(InputFormat.INPUT1, seq)


def build_input2(record: PairRecord) -> EncodedInput:
    """Both units and both sentences, three separators."""
    seq = (
        _unit_or_placeholder(record.source_unit_tokens())
        + [SEP]
        + [t.surface for t in record.source_sentence.tokens]
        + [SEP]
        + _unit_or_placeholder(record.target_unit_tokens())
        + [SEP]
        + [t.surface for t in record.target_sentence.tokens]
    )
    return EncodedInput(InputFormat.INPUT2, seq)


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _hash_block(tokens, dim: int) -> np.ndarray:
    """L2-normalized counts of hashed unigrams and bigrams."""
    block = np.zeros(dim)
    mask = dim - 1
    for term in tokens:
        block[fnv1a64(term.encode("utf-8")) & mask] += 1.0
    for a, b in zip(tokens, tokens[1:]):
        block[fnv1a64((a + _BIGRAM_JOINER + b).encode("utf-8")) & mask] += 1.0
    norm = np.linalg.norm(block)
    if norm > 0.0:
        block /= norm
    return block


def _segments(encoded: EncodedInput) -> list:
    segs = []
    current: list = []
    for tok in encoded.token_sequence:
        if tok == SEP:
            segs.append(current)
            current = []
        else:
            current.append(tok)
    segs.append(current)
    expected = 2 if encoded.format is InputFormat.INPUT1 else 4
    if len(segs) != expected:
        raise ValueError(
            f"{encoded.format.value} must contain {expected - 1} separator(s), "
            f"found {len(segs) - 1}"
        )
    return segs


def _dense_block(record: PairRecord, resources, fmt: InputFormat) -> np.ndarray:
    values = dict.fromkeys(DENSE_FEATURES, 0.0)
    src_tokens = record.source_unit_tokens()
    tgt_tokens = record.target_unit_tokens()
    src_sent = record.source_sentence
    tgt_sent = record.target_sentence

    values["src_unit_len"] = len(src_tokens) / 10.0
    values["src_sent_len"] = len(src_sent) / 10.0
    if record.unit.source_span is not None:
        values["src_unit_pos_ratio"] = record.unit.source_span[0] / max(1, len(src_sent))
    else:
        values["src_span_empty"] = 1.0
    if src_tokens:
        values[f"src_head_pos_{head_token(src_tokens).pos}"] = 1.0
    values["resource_missing"] = 0.0 if resources is not None else 1.0

    if fmt is InputFormat.INPUT2:
        values["tgt_unit_len"] = len(tgt_tokens) / 10.0
        values["tgt_sent_len"] = len(tgt_sent) / 10.0
        if record.unit.target_span is not None:
            values["tgt_unit_pos_ratio"] = record.unit.target_span[0] / max(1, len(tgt_sent))
        else:
            values["tgt_span_empty"] = 1.0
        if tgt_tokens:
            values[f"tgt_head_pos_{head_token(tgt_tokens).pos}"] = 1.0
        if src_tokens and tgt_tokens:
            values["head_pos_change"] = float(
                head_token(src_tokens).pos != head_token(tgt_tokens).pos
            )
        if resources is not None:
            m = resources.markers
            tgt_text = record.unit.target_text
            values["tgt_aspect_marker"] = float(has_any(tgt_text, m.aspect))
            values["tgt_plural_marker"] = float(has_any(tgt_text, m.plural))
            values["tgt_passive_marker"] = float(has_any(tgt_text, m.passive))
            content = [t for t in src_tokens if t.pos in CONTENT_POS]
            if content:
                hits = sum(
                    1 for t in content
                    if family_match(resources.lexicon, t.surface, tgt_text)
                )
                values["gloss_match_score"] = hits / len(content)
            if src_tokens and tgt_tokens:
                src_head = head_token(src_tokens)
                tgt_head = head_token(tgt_tokens)
                score = resources.sim(src_head.surface.lower(), tgt_head.surface)
                if score is None:
                    for g in resources.lexicon.get(src_head.surface.lower(), ()):
                        score = resources.sim(g, tgt_head.surface)
                        if score is not None:
                            break
                values["similarity_score"] = score or 0.0
                glosses = resources.lexicon.get(src_head.surface.lower(), ()) + (
                    src_head.surface.lower(),
                )
                for g in glosses:
                    if resources.is_hypernym(tgt_head.surface, g):
                        values["hypernym_flag"] = 1.0
                    if resources.is_hypernym(g, tgt_head.surface):
                        values["hyponym_flag"] = 1.0
            src_neg = any(t.surface.lower() in m.negation_src for t in src_tokens)
            tgt_neg = has_any(tgt_text, m.negation_tgt)
            values["negation_parity"] = float(src_neg != tgt_neg)
    return np.array([values[name] for name in DENSE_FEATURES])


def _embedding_block(tokens, emb: EmbeddingTable, dim: int) -> np.ndarray:
    vecs = [emb.vectors[t] for t in tokens if t in emb.vectors]
    if not vecs:
        return np.zeros(dim)
    return np.mean(np.asarray(vecs, dtype=float), axis=0)


def featurize(
    encoded: EncodedInput,
    record: PairRecord,
    resources: "RuleResources | None" = None,
    config: FeatureConfig = FeatureConfig(),
    embeddings: "EmbeddingTable | None" = None,
) -> np.ndarray:
    """Deterministic feature vector of length ``feature_dim(config)``.

    Missing resources never fail: affected dense slots read zero and the
    missing-resource flag is set instead.
    """
    segs = _segments(encoded)
    if encoded.format is InputFormat.INPUT1:
        segs = segs + [[], []]
    blocks = [_hash_block(seg, config.hash_dim) for seg in segs]
    blocks.append(_dense_block(record, resources, encoded.format))
    if config.use_embeddings:
        if embeddings is not None and embeddings.dim != config.embedding_dim:
            raise ValueError(
                f"embedding table dim {embeddings.dim} != configured {config.embedding_dim}"
            )
        for seg in segs:
            if embeddings is None:
                blocks.append(np.zeros(config.embedding_dim))
            else:
                blocks.append(_embedding_block(seg, embeddings, config.embedding_dim))
    vec = np.concatenate(blocks)
    encoded.feature_vector = vec
    return vec


def encode_record(
    record: PairRecord,
    fmt: InputFormat,
    resources: "RuleResources | None" = None,
    config: FeatureConfig = FeatureConfig(),
    embeddings: "EmbeddingTable | None" = None,
) -> EncodedInput:
    """Build the token sequence and fill in its feature vector."""
    encoded = build_input1(record) if fmt is InputFormat.INPUT1 else build_input2(record)
    featurize(encoded, record, resources, config, embeddings)
    return encoded


def featurize_corpus(records, fmt, resources=None, config=FeatureConfig(), embeddings=None):
    """Stack feature vectors for many records into one (N, D) matrix."""
    n = len(records)
    x = np.empty((n, feature_dim(config)))
    for i, rec in enumerate(records):
        x[i] = encode_record(rec, fmt, resources, config, embeddings).feature_vector
    return x


__all__ = [
    "SEP",
    "EMPTY_UNIT",
    "FEATURE_LAYOUT_VERSION",
    "DENSE_FEATURES",
    "InputFormat",
    "FeatureConfig",
    "EncodedInput",
    "feature_dim",
    "feature_fingerprint",
    "build_input1",
    "build_input2",
    "fnv1a64",
    "featurize",
    "encode_record",
    "featurize_corpus",
]
