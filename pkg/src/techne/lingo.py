"""Light linguistic helpers shared by the rule cascade and the featurizer.

English lemmatization here is a deliberately small suffix stripper plus an
irregular-form table: records arrive pre-tokenized and tagged, and the rules
only need the lemma *family* of a word to query the bilingual lexicon, not a
full morphological analysis.
"""

from __future__ import annotations

from .corpus import Token

#: POS tags whose tokens count as content words for gloss-matching.
CONTENT_POS = frozenset({"NOUN", "VERB", "ADJ", "ADV", "PRON", "NUM", "ADP"})

#: Chinese structural particles ignored as residue in literal matching.
STRUCTURAL_PARTICLES = ("的", "地", "得")

IRREGULAR_FORMS = {
    "saw": "see", "seen": "see",
    "ate": "eat", "eaten": "eat",
    "went": "go", "gone": "go",
    "made": "make",
    "took": "take", "taken": "take",
    "ran": "run",
    "came": "come",
    "gave": "give", "given": "give",
    "found": "find",
    "bought": "buy",
    "sold": "sell",
    "thought": "think",
    "knew": "know", "known": "know",
    "wrote": "write", "written": "write",
    "spoke": "speak", "spoken": "speak",
    "broke": "break", "broken": "break",
    "left": "leave",
    "felt": "feel",
    "kept": "keep",
    "met": "meet",
    "paid": "pay",
    "said": "say",
    "told": "tell",
    "got": "get",
    "did": "do", "done": "do",
    "had": "have", "has": "have",
    "was": "be", "were": "be", "been": "be", "is": "be", "are": "be", "am": "be",
    "children": "child",
    "men": "man",
    "women": "woman",
    "feet": "foot",
    "teeth": "tooth",
    "mice": "mouse",
}

#: Participle endings / forms used for a rough English passive check.
_PARTICIPLE_IRREGULAR = frozenset(
    form for form, _ in IRREGULAR_FORMS.items() if form.endswith("en")
) | {"done", "made", "found", "bought", "sold", "told", "kept", "paid", "left", "got"}


def lemma_candidates(word: str) -> list:
    """Lowercased lemma-family candidates, most specific first, deduplicated."""
    w = word.lower()
    out = [w]
    if w in IRREGULAR_FORMS:
        out.append(IRREGULAR_FORMS[w])
    if w.endswith("ies") and len(w) > 4:
        out.append(w[:-3] + "y")
    if w.endswith("es") and len(w) > 3:
        out.append(w[:-2])
    if w.endswith("s") and len(w) > 2:
        out.append(w[:-1])
    if w.endswith("ed") and len(w) > 3:
        out.append(w[:-2])
        out.append(w[:-1])  # decided -> decide
        if len(w) > 4 and w[-3] == w[-4]:
            out.append(w[:-3])  # stopped -> stop
    if w.endswith("ing") and len(w) > 4:
        out.append(w[:-3])
        out.append(w[:-3] + "e")  # making -> make
        if len(w) > 5 and w[-4] == w[-5]:
            out.append(w[:-4])  # running -> run
    if w.endswith("ly") and len(w) > 3:
        out.append(w[:-2])
    seen = set()
    uniq = []
    for c in out:
        if c not in seen:
            seen.add(c)
            uniq.append(c)
    return uniq


def head_token(tokens) -> Token:
    """Last NOUN/VERB/ADJ/ADV token, else the last token."""
    if not tokens:
        raise ValueError("cannot take the head of an empty span")
    for tok in reversed(tokens):
        if tok.pos in ("NOUN", "VERB", "ADJ", "ADV"):
            return tok
    return tokens[-1]


def family_glosses(lexicon, word: str) -> list:
    """All glosses across the word's lemma family, as (gloss, exact) pairs.

    ``exact`` marks glosses contributed by the surface form itself rather
    than a stripped lemma. Order: candidate order, then lexicon file order.
    """
    out = []
    for i, cand in enumerate(lemma_candidates(word)):
        for g in lexicon.get(cand, ()):
            out.append((g, i == 0))
    return out


def family_match(lexicon, word: str, text: str):
    """First lemma-family gloss contained in ``text`` as (gloss, exact), or None."""
    for g, exact in family_glosses(lexicon, word):
        if g and g in text:
            return g, exact
    return None


def gloss_in_text(glosses, text: str):
    """First gloss that is a substring of ``text``, or None."""
    for g in glosses:
        if g and g in text:
            return g
    return None


def remove_glosses(tokens, lexicon, text: str) -> str:
    """Strip each token's first matching lemma-family gloss out of ``text`` once.

    What remains is the residue the literal/lexical-shift rules inspect.
    """
    remaining = text
    for tok in tokens:
        match = family_match(lexicon, tok.surface, remaining)
        if match:
            remaining = remaining.replace(match[0], "", 1)
    return remaining.strip()


def strip_particles(text: str, particles) -> str:
    for p in particles:
        text = text.replace(p, "")
    return text.strip()


def is_passive_english(tokens) -> bool:
    """Rough check: an auxiliary 'be' form followed somewhere by a participle."""
    aux_at = None
    for i, tok in enumerate(tokens):
        w = tok.surface.lower()
        if w in ("is", "are", "was", "were", "be", "been", "being", "am", "get", "got"):
            aux_at = i
        elif aux_at is not None and tok.pos == "VERB":
            if w.endswith("ed") or w.endswith("en") or w in _PARTICIPLE_IRREGULAR:
                return True
    return False


def has_any(text: str, markers) -> bool:
    return any(m in text for m in markers)


def token_surfaces(tokens) -> list:
    return [t.surface for t in tokens]
