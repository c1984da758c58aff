"""Lexical resources backing the rule cascade.

All files are UTF-8 text under one directory:

    lexicon.tsv       src_word<TAB>gloss1|gloss2|...     (keys lowercase)
    relations.tsv     word<TAB>hyp1|hyp2<TAB>hypo1|...   (hypernyms, hyponyms)
    similarity.tsv    word1<TAB>word2<TAB>score          (score in [0,1])
    idioms.tsv        src phrase<TAB>tgt1|tgt2|...
    markers/<name>.txt  one item per line, one list per named file

The shipped demonstration set is small; real resources are user-supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

MARKER_NAMES = (
    "aspect",          # Chinese aspect/tense particles: 了 过 着 ...
    "plural",          # plural marker: 们
    "passive",         # passive marker: 被
    "connectives",     # Chinese logical connectives
    "particles",       # other Chinese-specific particles
    "resumptives",     # resumptive anaphors
    "determiners",     # English determiners (reduction check)
    "copulas",         # English copula forms (reduction check)
    "anticipatory_it", # anticipatory "it" forms (reduction check)
    "negation_src",    # English negation markers
    "negation_tgt",    # Chinese negation markers
)


class ResourceError(ValueError):
    """Raised when a resource file is missing or malformed."""


@dataclass(frozen=True)
class Relation:
    hypernyms: frozenset
    hyponyms: frozenset


@dataclass(frozen=True)
class Markers:
    aspect: frozenset
    plural: frozenset
    passive: frozenset
    connectives: frozenset
    particles: frozenset
    resumptives: frozenset
    determiners: frozenset
    copulas: frozenset
    anticipatory_it: frozenset
    negation_src: frozenset
    negation_tgt: frozenset


@dataclass
class RuleResources:
    lexicon: dict       # lowercase source word -> tuple of glosses (file order)
    relations: dict     # word -> Relation
    similarity: dict    # (word, word) -> score in [0, 1]
    idioms: dict        # normalized source phrase -> tuple of fixed targets
    markers: Markers

    def sim(self, a: str, b: str):
        """Similarity score, checking both key orders; None when absent."""
        if (a, b) in self.similarity:
            return self.similarity[(a, b)]
        return self.similarity.get((b, a))

    def is_hypernym(self, general: str, specific: str) -> bool:
        """True when ``general`` is recorded as a hypernym of ``specific``."""
        rel = self.relations.get(specific)
        if rel and general in rel.hypernyms:
            return True
        rel = self.relations.get(general)
        return bool(rel and specific in rel.hyponyms)


def _read_lines(path: Path):
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def _split_set(cell: str):
    return tuple(x for x in (s.strip() for s in cell.split("|")) if x)


def load_lexicon(path) -> dict:
    lexicon: dict = {}
    for lineno, line in _read_lines(Path(path)):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ResourceError(f"{path}:{lineno}: expected 2 columns")
        word, glosses = cols[0].strip(), _split_set(cols[1])
        if word != word.lower():
            raise ResourceError(f"{path}:{lineno}: lexicon key {word!r} must be lowercase")
        if not glosses:
            raise ResourceError(f"{path}:{lineno}: empty gloss set for {word!r}")
        existing = lexicon.get(word, ())
        merged = existing + tuple(g for g in glosses if g not in existing)
        lexicon[word] = merged
    return lexicon


def load_relations(path) -> dict:
    relations: dict = {}
    for lineno, line in _read_lines(Path(path)):
        cols = line.split("\t")
        if len(cols) != 3:
            raise ResourceError(f"{path}:{lineno}: expected 3 columns")
        word = cols[0].strip()
        relations[word] = Relation(
            hypernyms=frozenset(_split_set(cols[1])),
            hyponyms=frozenset(_split_set(cols[2])),
        )
    return relations


def load_similarity(path) -> dict:
    sim: dict = {}
    for lineno, line in _read_lines(Path(path)):
        cols = line.split("\t")
        if len(cols) != 3:
            raise ResourceError(f"{path}:{lineno}: expected 3 columns")
        a, b = cols[0].strip(), cols[1].strip()
        try:
            score = float(cols[2])
        except ValueError:
            raise ResourceError(f"{path}:{lineno}: bad score {cols[2]!r}") from None
        if not 0.0 <= score <= 1.0:
            raise ResourceError(f"{path}:{lineno}: score {score} outside [0, 1]")
        if (b, a) in sim and sim[(b, a)] != score:
            raise ResourceError(
                f"{path}:{lineno}: asymmetric scores for ({a!r}, {b!r})"
            )
        sim[(a, b)] = score
    return sim


def load_idioms(path) -> dict:
    idioms: dict = {}
    for lineno, line in _read_lines(Path(path)):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ResourceError(f"{path}:{lineno}: expected 2 columns")
        phrase = normalize_phrase(cols[0])
        targets = _split_set(cols[1])
        if not targets:
            raise ResourceError(f"{path}:{lineno}: empty target set for {phrase!r}")
        idioms[phrase] = idioms.get(phrase, ()) + tuple(
            t for t in targets if t not in idioms.get(phrase, ())
        )
    return idioms


def normalize_phrase(text: str) -> str:
    return " ".join(text.lower().split())


def load_markers(directory) -> Markers:
    directory = Path(directory)
    values = {}
    missing = []
    for name in MARKER_NAMES:
        path = directory / f"{name}.txt"
        if not path.exists():
            missing.append(path.name)
            continue
        values[name] = frozenset(line.strip() for _, line in _read_lines(path))
    if missing:
        raise ResourceError(f"missing marker file(s) in {directory}: {', '.join(missing)}")
    return Markers(**values)


def load_resources(directory) -> RuleResources:
    """Load the full resource bundle from ``directory``."""
    directory = Path(directory)
    required = ["lexicon.tsv", "relations.tsv", "similarity.tsv", "idioms.tsv"]
    missing = [n for n in required if not (directory / n).exists()]
    if not (directory / "markers").is_dir():
        missing.append("markers/")
    if missing:
        raise ResourceError(f"missing resource file(s) in {directory}: {', '.join(missing)}")
    return RuleResources(
        lexicon=load_lexicon(directory / "lexicon.tsv"),
        relations=load_relations(directory / "relations.tsv"),
        similarity=load_similarity(directory / "similarity.tsv"),
        idioms=load_idioms(directory / "idioms.tsv"),
        markers=load_markers(directory / "markers"),
    )


def save_resources(res: RuleResources, directory) -> None:
    """Write a resource bundle in the on-disk layout (used by the demo tools)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with (directory / "lexicon.tsv").open("w", encoding="utf-8") as fh:
        for word in sorted(res.lexicon):
            fh.write(f"{word}\t{'|'.join(res.lexicon[word])}\n")
    with (directory / "relations.tsv").open("w", encoding="utf-8") as fh:
        for word in sorted(res.relations):
            rel = res.relations[word]
            fh.write(f"{word}\t{'|'.join(sorted(rel.hypernyms))}\t{'|'.join(sorted(rel.hyponyms))}\n")
    with (directory / "similarity.tsv").open("w", encoding="utf-8") as fh:
        for (a, b) in sorted(res.similarity):
            fh.write(f"{a}\t{b}\t{res.similarity[(a, b)]:.6f}\n")
    with (directory / "idioms.tsv").open("w", encoding="utf-8") as fh:
        for phrase in sorted(res.idioms):
            fh.write(f"{phrase}\t{'|'.join(res.idioms[phrase])}\n")
    markers_dir = directory / "markers"
    markers_dir.mkdir(exist_ok=True)
    for f in fields(Markers):
        items = sorted(getattr(res.markers, f.name))
        (markers_dir / f"{f.name}.txt").write_text(
            "".join(f"{x}\n" for x in items), encoding="utf-8"
        )


__all__ = [
    "MARKER_NAMES",
    "ResourceError",
    "Relation",
    "Markers",
    "RuleResources",
    "normalize_phrase",
    "load_resources",
    "save_resources",
    "load_lexicon",
    "load_relations",
    "load_similarity",
    "load_idioms",
    "load_markers",
]
