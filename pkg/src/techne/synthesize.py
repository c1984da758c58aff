"""Turn good non-literal translations into bad literal ones.

A bad twin keeps the source side and the corrective technique label but
replaces the target unit with a word-by-word gloss of the source unit (the
first lexicon gloss of each token, exact surface lookup, source order).
Twins carry quality BAD; originals are never mutated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .align import TranslationTable, lexical_align
from .corpus import (
    NON_LITERAL,
    AlignedUnit,
    PairRecord,
    Quality,
    Sentence,
    Technique,
    Token,
)
from .lingo import CONTENT_POS

#: Table 1-style BAD:non-literal proportion used when none is configured.
DEFAULT_BAD_FRACTION = 0.74

BAD_ID_SUFFIX = ".bad"


class SynthesisSkip(Exception):
    """Record cannot be synthesized; carries the reason for the report."""

    def __init__(self, record_id: str, reason: str):
        super().__init__(f"{record_id}: {reason}")
        self.record_id = record_id
        self.reason = reason


@dataclass(frozen=True)
class SynthesisConfig:
    bad_fraction: float = DEFAULT_BAD_FRACTION
    seed: int = 0
    require_full_gloss: bool = True

    def __post_init__(self):
        if not 0.0 <= self.bad_fraction <= 1.0:
            raise ValueError("bad_fraction must lie in [0, 1]")


@dataclass
class SynthesisReport:
    quality_counts: dict = field(default_factory=dict)
    sampled: int = 0
    skips: list = field(default_factory=list)  # (record id, reason)


def _unit_glosses(record: PairRecord, lexicon, require_full_gloss: bool):
    """First lexicon gloss per source-unit token (exact surface lookup).

    Tokens without an entry contribute nothing unless they are content
    words under ``require_full_gloss``, which makes the record a skip.
    """
    out = []
    for tok in record.source_unit_tokens():
        glosses = lexicon.get(tok.surface.lower())
        if glosses:
            out.append((glosses[0], tok.pos))
        elif require_full_gloss and tok.pos in CONTENT_POS:
            raise SynthesisSkip(record.id, f"no lexicon gloss for {tok.surface!r}")
    if not out:
        raise SynthesisSkip(record.id, "no glossable tokens in source unit")
    return out


def _red_insert_position(record: PairRecord, table) -> int:
    """Where a reduction twin re-inserts the omitted words.

    With a translation table: align the sentences and use the target link of
    the nearest aligned source neighbour of the span (after it when the
    neighbour sits left of the span, before it otherwise). Without a table,
    or with no aligned neighbour, fall back to the end of the sentence.
    """
    n_tgt = len(record.target_sentence)
    if table is None:
        return n_tgt
    start, end = record.unit.source_span
    alignment = lexical_align(record.source_sentence, record.target_sentence, table, threshold=0.0)
    linked = dict(alignment.links)
    n_src = len(record.source_sentence)
    neighbours = sorted(
        (i for i in range(n_src) if (i < start or i >= end) and i in linked),
        key=lambda i: (min(abs(i - start), abs(i - (end - 1))), i),
    )
    if not neighbours:
        return n_tgt
    i = neighbours[0]
    j = linked[i]
    return j + 1 if i < start else j


def make_bad_literal(
    record: PairRecord,
    lexicon,
    table: "TranslationTable | None" = None,
    require_full_gloss: bool = True,
) -> PairRecord:
    """Build the BAD twin of a non-literal record.

    The twin's target unit is the gloss concatenation; the target sentence is
    rebuilt around it. Raises :class:`SynthesisSkip` for explicitation
    records (nothing to gloss) and for missing glosses under
    ``require_full_gloss``; raises ``ValueError`` for records whose technique
    is absent or literal.
    """
    if record.technique is None:
        raise ValueError(f"record {record.id} has no technique label")
    if record.technique not in NON_LITERAL:
        raise ValueError(f"record {record.id} is literal; only non-literal records are synthesized")
    if record.unit.source_span is None:
        raise SynthesisSkip(record.id, "explicitation record has no source material to gloss")

    glosses = _unit_glosses(record, lexicon, require_full_gloss)
    old = record.target_sentence
    if record.unit.target_span is None:
        at = _red_insert_position(record, table)
        old_end = at
    else:
        at, old_end = record.unit.target_span

    rebuilt = (
        [(t.surface, t.pos) for t in old.tokens[:at]]
        + glosses
        + [(t.surface, t.pos) for t in old.tokens[old_end:]]
    )
    tokens = tuple(
        Token(surface=s, pos=p, index=i) for i, (s, p) in enumerate(rebuilt)
    )
    new_target = Sentence(tokens=tokens, lang=old.lang)
    new_span = (at, at + len(glosses))
    unit = AlignedUnit.from_spans(
        record.source_sentence, new_target, record.unit.source_span, new_span
    )
    return PairRecord(
        id=record.id + BAD_ID_SUFFIX,
        source_sentence=record.source_sentence,
        target_sentence=new_target,
        unit=unit,
        technique=record.technique,
        quality=Quality.BAD,
    )


def build_pe_dataset(
    records,
    lexicon,
    config: SynthesisConfig = SynthesisConfig(),
    table: "TranslationTable | None" = None,
):
    """Quality-label the input records and add synthesized BAD twins.

    Originals pass through with GOOD_LIT (literal technique) or GOOD_NONLIT;
    twins come from a seeded sample of the non-literal records sized
    ``bad_fraction``. Output is sorted by id; deterministic per seed.
    """
    for rec in records:
        if rec.technique is None:
            raise ValueError(f"record {rec.id} has no technique label")

    report = SynthesisReport()
    out = []
    for rec in records:
        quality = Quality.GOOD_LIT if rec.technique is Technique.LIT else Quality.GOOD_NONLIT
        out.append(
            PairRecord(rec.id, rec.source_sentence, rec.target_sentence, rec.unit,
                       rec.technique, quality)
        )
        report.quality_counts[quality.value] = report.quality_counts.get(quality.value, 0) + 1

    nonliteral = sorted(
        (r for r in records if r.technique in NON_LITERAL), key=lambda r: r.id
    )
    k = int(config.bad_fraction * len(nonliteral) + 0.5)
    rng = random.Random(config.seed)
    sample = rng.sample(nonliteral, k) if k else []
    report.sampled = len(sample)
    for rec in sorted(sample, key=lambda r: r.id):
        try:
            twin = make_bad_literal(rec, lexicon, table, config.require_full_gloss)
        except SynthesisSkip as skip:
            report.skips.append((skip.record_id, skip.reason))
            continue
        out.append(twin)
        report.quality_counts[Quality.BAD.value] = (
            report.quality_counts.get(Quality.BAD.value, 0) + 1
        )
    out.sort(key=lambda r: r.id)
    return out, report


__all__ = [
    "DEFAULT_BAD_FRACTION",
    "BAD_ID_SUFFIX",
    "SynthesisSkip",
    "SynthesisConfig",
    "SynthesisReport",
    "make_bad_literal",
    "build_pe_dataset",
]
