"""Data model and file I/O for aligned English-Chinese pair records.

A pair record couples a source (English) and target (Chinese) sentence with
one aligned sub-sentence unit and optional technique/quality labels. Records
live on disk as JSONL (one object per line, fixed key order); a flat TSV
layout is accepted read-only for bulk import.

JSONL schema (key order is part of the format):
    id          unique string
    src_tokens  array of {"surface": str, "pos": str}
    tgt_tokens  array of {"surface": str, "pos": str}
    src_span    [start, end) into src_tokens, or null for an empty span
    tgt_span    [start, end) into tgt_tokens, or null
    technique   one of the ten technique codes, or null
    quality     "GOOD_LIT" | "GOOD_NONLIT" | "BAD", or null
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

Span = "tuple[int, int] | None"

POS_TAGS = (
    "VERB", "NOUN", "ADJ", "ADV", "PRON", "ADP",
    "DET", "PART", "CONJ", "NUM", "AUX", "OTHER",
)

# Fine-grained tags from external taggers map down to the coarse set.
POS_ALIASES = {
    "PREP": "ADP",
    "PROPN": "NOUN",
    "CCONJ": "CONJ",
    "SCONJ": "CONJ",
    "INTJ": "OTHER",
    "SYM": "OTHER",
    "PUNCT": "OTHER",
    "X": "OTHER",
}


class Technique(str, Enum):
    """The ten retained translation technique codes."""

    LIT = "LIT"
    EQU = "EQU"
    TRA = "TRA"
    MOD = "MOD"
    MOT = "MOT"
    PAR = "PAR"
    GEN = "GEN"
    LEX = "LEX"
    EXP = "EXP"
    RED = "RED"


#: Every technique except literal translation.
NON_LITERAL = tuple(t for t in Technique if t is not Technique.LIT)


class Quality(str, Enum):
    GOOD_LIT = "GOOD_LIT"
    GOOD_NONLIT = "GOOD_NONLIT"
    BAD = "BAD"


class CorpusError(ValueError):
    """Raised for unrecoverable corpus-level problems (bad path, bad format)."""


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    index: int


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    lang: str  # "en" or "zh"

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self, start: int = 0, end: int | None = None) -> str:
        """Join token surfaces: no separator for Chinese, single space otherwise."""
        end = len(self.tokens) if end is None else end
        sep = "" if self.lang == "zh" else " "
        return sep.join(t.surface for t in self.tokens[start:end])


@dataclass(frozen=True)
class AlignedUnit:
    source_span: tuple[int, int] | None
    target_span: tuple[int, int] | None
    source_text: str
    target_text: str

    @classmethod
    def from_spans(
        cls,
        source: Sentence,
        target: Sentence,
        source_span: tuple[int, int] | None,
        target_span: tuple[int, int] | None,
    ) -> "AlignedUnit":
        src_text = "" if source_span is None else source.text(*source_span)
        tgt_text = "" if target_span is None else target.text(*target_span)
        return cls(source_span, target_span, src_text, tgt_text)


@dataclass(frozen=True)
class PairRecord:
    id: str
    source_sentence: Sentence
    target_sentence: Sentence
    unit: AlignedUnit
    technique: Technique | None = None
    quality: Quality | None = None

    def source_unit_tokens(self) -> tuple[Token, ...]:
        if self.unit.source_span is None:
            return ()
        a, b = self.unit.source_span
        return self.source_sentence.tokens[a:b]

    def target_unit_tokens(self) -> tuple[Token, ...]:
        if self.unit.target_span is None:
            return ()
        a, b = self.unit.target_span
        return self.target_sentence.tokens[a:b]


@dataclass(frozen=True)
class CorpusIssue:
    """One rejected input line with enough context to locate it."""

    line: int
    record_id: str | None
    message: str


def normalize_pos(tag: str) -> str:
    tag = tag.strip().upper()
    tag = POS_ALIASES.get(tag, tag)
    if tag not in POS_TAGS:
        raise ValueError(f"unknown POS tag {tag!r}")
    return tag


def make_sentence(pairs: "list[tuple[str, str]]", lang: str) -> Sentence:
    """Build a Sentence from (surface, pos) pairs, assigning indices."""
    tokens = tuple(
        Token(surface=s, pos=normalize_pos(p), index=i) for i, (s, p) in enumerate(pairs)
    )
    return Sentence(tokens=tokens, lang=lang)


def validate_record(rec: PairRecord) -> list[str]:
    """Return a list of invariant violations (empty when the record is valid)."""
    problems: list[str] = []
    for sent, name in ((rec.source_sentence, "source"), (rec.target_sentence, "target")):
        for i, tok in enumerate(sent.tokens):
            if not tok.surface.strip():
                problems.append(f"{name} token {i} has empty surface")
            if tok.index != i:
                problems.append(f"{name} token {i} has index {tok.index}")
            if tok.pos not in POS_TAGS and tok.pos != "":
                problems.append(f"{name} token {i} has unknown POS {tok.pos!r}")

    unit = rec.unit
    if unit.source_span is None and unit.target_span is None:
        problems.append("both unit spans are empty")
    for span, sent, name in (
        (unit.source_span, rec.source_sentence, "source"),
        (unit.target_span, rec.target_sentence, "target"),
    ):
        if span is None:
            continue
        a, b = span
        if not (0 <= a < b <= len(sent)):
            problems.append(f"{name} span [{a},{b}) out of range for {len(sent)} tokens")
    if not problems:
        if unit.source_span is not None and unit.source_text != rec.source_sentence.text(*unit.source_span):
            problems.append("source_text does not match source span")
        if unit.source_span is None and unit.source_text != "":
            problems.append("source_text non-empty for empty source span")
        if unit.target_span is not None and unit.target_text != rec.target_sentence.text(*unit.target_span):
            problems.append("target_text does not match target span")
        if unit.target_span is None and unit.target_text != "":
            problems.append("target_text non-empty for empty target span")

    # On BAD records the technique is the *corrective* label, so the
    # empty-span requirements apply only to good/unlabeled-quality records
    # (a synthesized RED twin re-inserts the omitted words).
    if rec.quality is not Quality.BAD:
        if rec.technique is Technique.EXP and unit.source_span is not None:
            problems.append("EXP requires an empty source span")
        if rec.technique is Technique.RED and unit.target_span is not None:
            problems.append("RED requires an empty target span")
    if rec.quality is Quality.BAD and rec.technique is not None and rec.technique not in NON_LITERAL:
        problems.append("BAD record carries a non-corrective technique (LIT)")
    return problems


# ---------------------------------------------------------------------------
# JSONL serialization


def _tokens_to_obj(sent: Sentence) -> list[dict]:
    return [{"surface": t.surface, "pos": t.pos} for t in sent.tokens]


def _span_to_obj(span: tuple[int, int] | None):
    return None if span is None else [span[0], span[1]]


def record_to_obj(rec: PairRecord) -> dict:
    return {
        "id": rec.id,
        "src_tokens": _tokens_to_obj(rec.source_sentence),
        "tgt_tokens": _tokens_to_obj(rec.target_sentence),
        "src_span": _span_to_obj(rec.unit.source_span),
        "tgt_span": _span_to_obj(rec.unit.target_span),
        "technique": rec.technique.value if rec.technique else None,
        "quality": rec.quality.value if rec.quality else None,
    }


def _obj_to_sentence(objs: list, lang: str) -> Sentence:
    tokens = []
    for i, o in enumerate(objs):
        if not isinstance(o, dict) or "surface" not in o or "pos" not in o:
            raise ValueError(f"token {i} must be an object with surface and pos")
        tokens.append(Token(surface=str(o["surface"]), pos=str(o["pos"]), index=i))
    return Sentence(tokens=tuple(tokens), lang=lang)


def _obj_to_span(obj) -> tuple[int, int] | None:
    if obj is None:
        return None
    if not (isinstance(obj, list) and len(obj) == 2):
        raise ValueError(f"span must be null or [start, end), got {obj!r}")
    return int(obj[0]), int(obj[1])


def obj_to_record(obj: dict) -> PairRecord:
    required = ("id", "src_tokens", "tgt_tokens", "src_span", "tgt_span")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ValueError(f"missing keys: {', '.join(missing)}")
    src = _obj_to_sentence(obj["src_tokens"], "en")
    tgt = _obj_to_sentence(obj["tgt_tokens"], "zh")
    unit = AlignedUnit.from_spans(src, tgt, _obj_to_span(obj["src_span"]), _obj_to_span(obj["tgt_span"]))
    technique = Technique(obj["technique"]) if obj.get("technique") else None
    quality = Quality(obj["quality"]) if obj.get("quality") else None
    return PairRecord(
        id=str(obj["id"]),
        source_sentence=src,
        target_sentence=tgt,
        unit=unit,
        technique=technique,
        quality=quality,
    )


# ---------------------------------------------------------------------------
# TSV import (read-only)
#
# Columns: id, src_tokens, tgt_tokens, src_span, tgt_span, technique, quality.
# Tokens are space-separated surface/POS items (surfaces must not contain
# whitespace or "/"); spans are "start:end" or "-"; labels use "-" for null.


def _tsv_tokens(cell: str, lang: str) -> Sentence:
    pairs = []
    for item in cell.split():
        if "/" not in item:
            raise ValueError(f"token {item!r} lacks a /POS suffix")
        surface, _, pos = item.rpartition("/")
        pairs.append((surface, pos))
    return make_sentence(pairs, lang)


def _tsv_span(cell: str) -> tuple[int, int] | None:
    cell = cell.strip()
    if cell == "-":
        return None
    a, _, b = cell.partition(":")
    return int(a), int(b)


def _tsv_record(line: str) -> PairRecord:
    cols = line.rstrip("\n").split("\t")
    if len(cols) != 7:
        raise ValueError(f"expected 7 tab-separated columns, got {len(cols)}")
    rid, src_c, tgt_c, ss_c, ts_c, tech_c, qual_c = cols
    src = _tsv_tokens(src_c, "en")
    tgt = _tsv_tokens(tgt_c, "zh")
    unit = AlignedUnit.from_spans(src, tgt, _tsv_span(ss_c), _tsv_span(ts_c))
    technique = None if tech_c.strip() == "-" else Technique(tech_c.strip())
    quality = None if qual_c.strip() == "-" else Quality(qual_c.strip())
    return PairRecord(rid, src, tgt, unit, technique, quality)


# ---------------------------------------------------------------------------
# load / save


def load_corpus(path, fmt: str = "jsonl") -> "tuple[list[PairRecord], list[CorpusIssue]]":
    """Load records from ``path``.

    Malformed lines are collected as :class:`CorpusIssue` entries (with line
    numbers) rather than silently dropped; well-formed records are returned
    regardless.
    """
    path = Path(path)
    if fmt not in ("jsonl", "tsv"):
        raise CorpusError(f"unsupported corpus format {fmt!r}")
    records: list[PairRecord] = []
    issues: list[CorpusIssue] = []
    seen_ids: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rid = None
            try:
                if fmt == "jsonl":
                    obj = json.loads(line)
                    rid = obj.get("id") if isinstance(obj, dict) else None
                    rec = obj_to_record(obj)
                else:
                    rec = _tsv_record(line)
                rid = rec.id
                problems = validate_record(rec)
                if problems:
                    raise ValueError("; ".join(problems))
                if rec.id in seen_ids:
                    raise ValueError(f"duplicate record id {rec.id!r}")
            except (ValueError, KeyError) as exc:
                issues.append(CorpusIssue(line=lineno, record_id=rid, message=str(exc)))
                continue
            seen_ids.add(rec.id)
            records.append(rec)
    return records, issues


def save_corpus(records: "list[PairRecord]", path, fmt: str = "jsonl") -> None:
    """Write records as JSONL with a byte-stable field order."""
    if fmt != "jsonl":
        raise CorpusError("only the jsonl format is writable (tsv is import-only)")
    path = Path(path)
    for rec in records:
        problems = validate_record(rec)
        if problems:
            raise CorpusError(f"record {rec.id}: {'; '.join(problems)}")
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_obj(rec), ensure_ascii=False))
            fh.write("\n")


# ---------------------------------------------------------------------------
# stratified splitting


def _strat_key(rec: PairRecord) -> str:
    t = rec.technique.value if rec.technique else "-"
    q = rec.quality.value if rec.quality else "-"
    return f"{t}|{q}"


def split(
    records: "list[PairRecord]",
    ratios: "tuple[float, float, float]",
    seed: int,
) -> "tuple[list[PairRecord], list[PairRecord], list[PairRecord]]":
    """Split into train/dev/test, stratified by (technique, quality).

    The allocation is a per-class largest-remainder scheme with carry
    propagation across classes, so each split's total lands within one record
    of ``len(records) * ratio`` while every class is spread proportionally.
    Classes with fewer than 3 members go entirely to train (with a warning).
    Deterministic for fixed (records, ratios, seed); the three lists are an
    exact partition of the input.
    """
    if not records:
        raise ValueError("cannot split an empty record list")
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ValueError("ratios must be three non-negative fractions")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1.0, got {sum(ratios)!r}")
    for rec in records:
        if rec.technique is None and rec.quality is None:
            raise ValueError(f"record {rec.id} is unlabeled; split requires labels")

    groups: dict[str, list[PairRecord]] = {}
    for rec in records:
        groups.setdefault(_strat_key(rec), []).append(rec)

    rng = random.Random(seed)
    out: tuple[list[PairRecord], ...] = ([], [], [])
    carry = [0.0, 0.0, 0.0]
    for key in sorted(groups):
        members = list(groups[key])
        rng.shuffle(members)
        m = len(members)
        if m < 3:
            warnings.warn(
                f"class {key!r} has only {m} member(s); placing all in train",
                stacklevel=2,
            )
            out[0].extend(members)
            continue
        exact = [m * r + c for r, c in zip(ratios, carry)]
        alloc = [max(0, int(x)) for x in exact]  # carries keep exact[i] > -1
        leftover = m - sum(alloc)
        by_frac = sorted(range(3), key=lambda i: (-(exact[i] - alloc[i]), i))
        for i in by_frac[:leftover]:
            alloc[i] += 1
        carry = [x - a for x, a in zip(exact, alloc)]
        pos = 0
        for i, n in enumerate(alloc):
            out[i].extend(members[pos:pos + n])
            pos += n
    return out


__all__ = [
    "POS_TAGS",
    "POS_ALIASES",
    "Technique",
    "NON_LITERAL",
    "Quality",
    "CorpusError",
    "Token",
    "Sentence",
    "AlignedUnit",
    "PairRecord",
    "CorpusIssue",
    "normalize_pos",
    "make_sentence",
    "validate_record",
    "record_to_obj",
    "obj_to_record",
    "load_corpus",
    "save_corpus",
    "split",
]
