"""Deterministic rule cascade assigning one technique label per aligned pair.

Rules are tried in a fixed priority order and the first match wins, so every
labeled pair carries exactly one technique. Structural evidence (an empty
span) outranks lexical evidence; literal matching outranks the weaker
semantic rules. A pair no rule covers raises :class:`UnlabelableError` with
the per-rule near-miss notes — there is no silent default label.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .corpus import PairRecord, Technique
from .lingo import (
    CONTENT_POS,
    STRUCTURAL_PARTICLES,
    family_glosses,
    family_match,
    gloss_in_text,
    has_any,
    head_token,
    is_passive_english,
    remove_glosses,
    strip_particles,
)
from .resources import RuleResources, normalize_phrase

#: Similarity below this counts as a semantic shift.
DEFAULT_THETA_SIM = 0.55
#: Similarity below this is too weak even for the modulation catch-all.
DEFAULT_THETA_LOW = 0.25


@dataclass(frozen=True)
class RuleTrace:
    fired_rule: str
    evidence: str


class AnnotationError(ValueError):
    """Base class for per-record annotation failures."""

    def __init__(self, record_id: str, message: str):
        super().__init__(f"record {record_id}: {message}")
        self.record_id = record_id


class MissingPosError(AnnotationError):
    pass


class UnlabelableError(AnnotationError):
    def __init__(self, record_id: str, near_misses):
        self.near_misses = tuple(near_misses)
        detail = "; ".join(self.near_misses)
        super().__init__(record_id, f"no rule fired ({detail})")


@dataclass
class AnnotationReport:
    total: int = 0
    label_counts: dict = None
    errors: list = None

    def __post_init__(self):
        if self.label_counts is None:
            self.label_counts = {}
        if self.errors is None:
            self.errors = []

    @property
    def labeled(self) -> int:
        return sum(self.label_counts.values())


def _require_pos(record: PairRecord) -> None:
    for sent, name in (
        (record.source_sentence, "source"),
        (record.target_sentence, "target"),
    ):
        for tok in sent.tokens:
            if not tok.pos:
                raise MissingPosError(
                    record.id, f"{name} token {tok.index} ({tok.surface!r}) has no POS tag"
                )


def _sim_lookup(res: RuleResources, src_head, tgt_head):
    """Try (source surface, target) directly, then each lemma-family gloss."""
    score = res.sim(src_head.surface.lower(), tgt_head.surface)
    if score is not None:
        return score
    for g, _exact in family_glosses(res.lexicon, src_head.surface):
        score = res.sim(g, tgt_head.surface)
        if score is not None:
            return score
    return None


def _source_glosses(res: RuleResources, src_head):
    glosses = tuple(g for g, _ in family_glosses(res.lexicon, src_head.surface))
    return glosses + (src_head.surface.lower(),)


def classify_pair(
    record: PairRecord,
    resources: RuleResources,
    theta_sim: float = DEFAULT_THETA_SIM,
    theta_low: float = DEFAULT_THETA_LOW,
):
    """Assign one technique to ``record`` and explain which rule fired.

    Returns ``(Technique, RuleTrace)``; raises :class:`MissingPosError` or
    :class:`UnlabelableError`. Deterministic for fixed inputs.
    """
    _require_pos(record)
    src_tokens = record.source_unit_tokens()
    tgt_tokens = record.target_unit_tokens()
    if not src_tokens and not tgt_tokens:
        raise AnnotationError(record.id, "both unit spans are empty")
    misses = []
    m = resources.markers

    # 1. RED: nothing on the target side, and the dropped head is droppable.
    if not tgt_tokens:
        head = head_token(src_tokens)
        surface = head.surface.lower()
        kind = None
        if surface in m.anticipatory_it:
            kind = "anticipatory it"
        elif surface in m.copulas:
            kind = "copula"
        elif head.pos in ("ADP", "DET", "NOUN", "PRON"):
            kind = {"ADP": "preposition", "DET": "determiner",
                    "NOUN": "noun", "PRON": "pronoun"}[head.pos]
        if kind:
            return Technique.RED, RuleTrace(
                "red_removal", f"empty target span; source head {head.surface!r} is a {kind}"
            )
        raise UnlabelableError(
            record.id,
            [f"red_removal: head {head.surface!r}/{head.pos} is not a removable category"],
        )

    # 2. EXP: nothing on the source side, and the target unit is an additive word.
    if not src_tokens:
        text = record.unit.target_text
        surfaces = [t.surface for t in tgt_tokens]
        for kind, words in (
            ("connective", m.connectives),
            ("resumptive anaphor", m.resumptives),
            ("Chinese-specific particle", m.particles),
        ):
            if text in words or all(s in words for s in surfaces):
                return Technique.EXP, RuleTrace(
                    "exp_addition", f"empty source span; target {text!r} is a {kind}"
                )
        raise UnlabelableError(
            record.id,
            [f"exp_addition: target {text!r} is not a known connective/anaphor/particle"],
        )

    src_text = record.unit.source_text
    tgt_text = record.unit.target_text
    src_head = head_token(src_tokens)
    tgt_head = head_token(tgt_tokens)

    # 3. EQU: fixed expression (idiom / proverb / cultural / abbreviation) match.
    phrase = normalize_phrase(src_text)
    fixed = resources.idioms.get(phrase)
    if fixed is not None and tgt_text in fixed:
        return Technique.EQU, RuleTrace(
            "equ_fixed_expression", f"{phrase!r} -> {tgt_text!r} is a fixed expression"
        )
    misses.append("equ_fixed_expression: no fixed-expression entry matches")

    content = [t for t in src_tokens if t.pos in CONTENT_POS]

    # 4. LIT: every content word literally glossed, same head POS, no residue
    # beyond structural particles.
    if content:
        exact_hits = []
        for tok in content:
            glosses = resources.lexicon.get(tok.surface.lower())
            match = gloss_in_text(glosses, tgt_text) if glosses else None
            exact_hits.append(match)
        if all(exact_hits):
            residue = remove_glosses(src_tokens, resources.lexicon, tgt_text)
            residue = strip_particles(residue, STRUCTURAL_PARTICLES)
            if residue:
                misses.append(f"lit_word_for_word: residue {residue!r} after gloss removal")
            elif src_head.pos != tgt_head.pos:
                misses.append(
                    f"lit_word_for_word: head POS {src_head.pos} vs {tgt_head.pos}"
                )
            else:
                return Technique.LIT, RuleTrace(
                    "lit_word_for_word",
                    f"all content words glossed in {tgt_text!r}; head POS {src_head.pos} kept",
                )
        else:
            misses.append("lit_word_for_word: some content word has no matching gloss")
    else:
        misses.append("lit_word_for_word: no content words in source unit")

    # Shared lemma-level matching for rules 5 and 6.
    lemma_hits = []
    inflection_used = False
    for tok in content:
        match = family_match(resources.lexicon, tok.surface, tgt_text)
        lemma_hits.append(match)
        if match and not match[1]:
            inflection_used = True
    all_lemma_match = bool(content) and all(lemma_hits)

    # 5. LEX: same meaning and POS, differing only in morphosyntactic marking.
    if all_lemma_match and src_head.pos == tgt_head.pos:
        residue = remove_glosses(src_tokens, resources.lexicon, tgt_text)
        residue = strip_particles(residue, STRUCTURAL_PARTICLES)
        morph_markers = m.aspect | m.plural
        leftover = strip_particles(residue, morph_markers)
        marker_residue = bool(residue) and not leftover
        passive_dropped = is_passive_english(src_tokens) and not has_any(tgt_text, m.passive)
        if not leftover and (inflection_used or marker_residue or passive_dropped):
            why = []
            if inflection_used:
                why.append("inflection absorbed")
            if marker_residue:
                why.append(f"marker residue {residue!r}")
            if passive_dropped:
                why.append("passive marker dropped")
            return Technique.LEX, RuleTrace("lex_morph_shift", "; ".join(why))
        misses.append("lex_morph_shift: residue or difference not purely morphosyntactic")
    else:
        misses.append("lex_morph_shift: no lemma gloss match with identical head POS")

    # 6. TRA: meaning kept (lemma-family gloss present) but the POS changes.
    if src_head.pos != tgt_head.pos:
        head_match = family_match(resources.lexicon, src_head.surface, tgt_text)
        if head_match:
            return Technique.TRA, RuleTrace(
                "tra_pos_change",
                f"gloss {head_match[0]!r} kept while head POS {src_head.pos} -> {tgt_head.pos}",
            )
        misses.append("tra_pos_change: POS differs but no lemma gloss matches")
    else:
        misses.append("tra_pos_change: head POS unchanged")

    # 7. GEN: more general rendering.
    src_glosses = _source_glosses(resources, src_head)
    for g in src_glosses:
        for target_word in (tgt_head.surface, tgt_text):
            if resources.is_hypernym(target_word, g):
                return Technique.GEN, RuleTrace(
                    "gen_generalize", f"{target_word!r} is a hypernym of {g!r}"
                )
    if fixed is not None and tgt_text not in fixed:
        return Technique.GEN, RuleTrace(
            "gen_generalize", f"metaphorical image of {phrase!r} dropped in {tgt_text!r}"
        )
    if tgt_head.pos == "PRON" and src_head.pos != "PRON":
        return Technique.GEN, RuleTrace(
            "gen_generalize", f"referent {src_head.surface!r} replaced by pronoun {tgt_head.surface!r}"
        )
    misses.append("gen_generalize: no hypernym/metaphor/pronoun evidence")

    # 8. PAR: more specific rendering.
    for g in src_glosses:
        for target_word in (tgt_head.surface, tgt_text):
            if resources.is_hypernym(g, target_word):
                return Technique.PAR, RuleTrace(
                    "par_particularize", f"{target_word!r} is a hyponym of {g!r}"
                )
    if src_head.pos == "PRON" and tgt_head.pos != "PRON":
        return Technique.PAR, RuleTrace(
            "par_particularize",
            f"pronoun {src_head.surface!r} replaced by referent {tgt_head.surface!r}",
        )
    misses.append("par_particularize: no hyponym/referent evidence")

    # 9. MOT: semantic shift plus POS change, for preposition/noun sources.
    sim = _sim_lookup(resources, src_head, tgt_head)
    sim_score = 0.0 if sim is None else sim
    head_gloss_match = family_match(resources.lexicon, src_head.surface, tgt_text)
    if (
        src_head.pos in ("ADP", "NOUN")
        and src_head.pos != tgt_head.pos
        and not head_gloss_match
        and sim_score < theta_sim
    ):
        return Technique.MOT, RuleTrace(
            "mot_shift_with_pos_change",
            f"similarity {sim_score:.2f} < {theta_sim} and POS {src_head.pos} -> {tgt_head.pos}",
        )
    misses.append("mot_shift_with_pos_change: conditions not met")

    # 10. MOD: remaining semantic shifts.
    src_passive = is_passive_english(src_tokens)
    tgt_passive = has_any(tgt_text, m.passive)
    if src_passive != tgt_passive:
        return Technique.MOD, RuleTrace(
            "mod_point_of_view",
            f"voice flip: source passive={src_passive}, target passive marker={tgt_passive}",
        )
    src_neg = any(t.surface.lower() in m.negation_src for t in src_tokens)
    tgt_neg = has_any(tgt_text, m.negation_tgt)
    if src_neg != tgt_neg:
        return Technique.MOD, RuleTrace(
            "mod_point_of_view",
            f"negation of the opposite: source negated={src_neg}, target negated={tgt_neg}",
        )
    if sim is not None and theta_low <= sim_score < theta_sim and src_head.pos == tgt_head.pos:
        return Technique.MOD, RuleTrace(
            "mod_point_of_view",
            f"low-confidence MOD: similarity {sim_score:.2f} in [{theta_low}, {theta_sim})",
        )
    misses.append(
        f"mod_point_of_view: no voice/negation flip; similarity {sim_score:.2f} "
        f"outside [{theta_low}, {theta_sim}) or POS differs"
    )

    raise UnlabelableError(record.id, misses)


def annotate_corpus(
    records,
    resources: RuleResources,
    theta_sim: float = DEFAULT_THETA_SIM,
    theta_low: float = DEFAULT_THETA_LOW,
):
    """Label every record it can; collect failures instead of aborting.

    Returns ``(labeled_records, report)`` with the output sorted by record
    id. Input records are never mutated.
    """
    report = AnnotationReport(total=len(records))
    labeled = []
    for rec in sorted(records, key=lambda r: r.id):
        try:
            technique, _trace = classify_pair(rec, resources, theta_sim, theta_low)
        except AnnotationError as exc:
            report.errors.append((rec.id, str(exc)))
            continue
        labeled.append(replace(rec, technique=technique))
        report.label_counts[technique.value] = report.label_counts.get(technique.value, 0) + 1
    return labeled, report


__all__ = [
    "DEFAULT_THETA_SIM",
    "DEFAULT_THETA_LOW",
    "RuleTrace",
    "AnnotationError",
    "MissingPosError",
    "UnlabelableError",
    "AnnotationReport",
    "classify_pair",
    "annotate_corpus",
]
