"""Text pre-processing: tokenization, punctuation and stopword removal,
lowercasing, and dictionary-based word segmentation.

A sentence is cleaned in a fixed order: tokenize, drop punctuation, drop
stopwords (matched case-insensitively), lowercase, segment. Segmentation
joins runs of syllables that form a known multi-syllable word with "_",
the convention used by common Vietnamese NLP tools, so pre-segmented
corpora pass through unchanged.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

__all__ = [
    "DEFAULT_PUNCTUATION",
    "SENTENCE_BREAKS",
    "DictionarySegmenter",
    "PreprocessConfig",
    "ProcessedText",
    "WordList",
    "load_lexicon",
    "load_stopwords",
    "preprocess_sentence",
    "preprocess_text",
    "segment_words",
    "split_sentences",
    "tokenize",
]

WordList = list[str]

# "_" is reserved as the segmentation join marker and must never be treated
# as punctuation, otherwise segmented words would be torn apart again.
DEFAULT_PUNCTUATION = frozenset(string.punctuation + "“”‘’‚„«»…–—―·¡¿。、，；：！？（）【】「」『』") - {"_"}

SENTENCE_BREAKS = (".", "!", "?", "…", "\n")

Segmenter = Callable[[Sequence[str]], WordList]


class DictionarySegmenter:
    """Greedy longest-match segmenter over a fixed word list.

    Scans left to right and joins the longest run of syllables (up to
    `max_syllables`) found in the lexicon. Tokens that already contain "_"
    are opaque: they pass through unchanged and no run may span them.
    """

    def __init__(self, lexicon: Iterable[str] = (), max_syllables: int = 4):
        self.max_syllables = max_syllables
        self.lexicon = frozenset(w.strip().lower().replace(" ", "_") for w in lexicon if w.strip())

    def __call__(self, tokens: Sequence[str]) -> WordList:
        out: WordList = []
        n = len(tokens)
        i = 0
        while i < n:
            if "_" in tokens[i]:
                out.append(tokens[i])
                i += 1
                continue
            match_len = 1
            limit = min(self.max_syllables, n - i)
            for size in range(limit, 1, -1):
                run = tokens[i : i + size]
                if any("_" in t for t in run):
                    continue
                if "_".join(run) in self.lexicon:
                    match_len = size
                    break
            out.append("_".join(tokens[i : i + match_len]))
            i += match_len
        return out


@dataclass(frozen=True)
class PreprocessConfig:
    """Cleaning configuration shared by every pipeline stage."""

    stopwords: frozenset[str] = frozenset()
    punctuation: frozenset[str] = DEFAULT_PUNCTUATION
    segmenter: Segmenter = field(default_factory=DictionarySegmenter)

    def __post_init__(self):
        if not self.punctuation:
            raise ValueError("punctuation set must not be empty")
        # stopwords are matched case-insensitively
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))


@dataclass(frozen=True)
class ProcessedText:
    """A reading text after cleaning: per-sentence words plus the flat
    token sequence the scoring functions operate on."""

    sentences: tuple[tuple[str, ...], ...]
    flat: tuple[str, ...]

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sequence[str]]) -> "ProcessedText":
        sents = tuple(tuple(s) for s in sentences if s)
        flat = tuple(w for s in sents for w in s)
        return cls(sentences=sents, flat=flat)


def tokenize(text: str, punctuation: frozenset[str] = DEFAULT_PUNCTUATION) -> list[str]:
    """Split on whitespace and punctuation characters; punctuation is
    consumed, everything else is preserved verbatim."""
    tokens: list[str] = []
    current: list[str] = []
    for ch in text:
        if ch.isspace() or ch in punctuation:
            if current:
                tokens.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        tokens.append("".join(current))
    return tokens


def split_sentences(text: str) -> list[str]:
    """Split a text on sentence-final marks and newlines. Quote and bracket
    characters stay attached to their tokens; they are stripped later as
    punctuation."""
    sentences: list[str] = []
    current: list[str] = []
    for ch in text:
        if ch in SENTENCE_BREAKS:
            if current:
                sentences.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        sentences.append("".join(current))
    return [s for s in sentences if s.strip()]


def preprocess_sentence(sentence: str, cfg: PreprocessConfig) -> WordList:
    """Clean one sentence into a list of lowercase segmented words.

    Degenerate input (empty, punctuation-only, all stopwords) yields an
    empty list.
    """
    tokens = tokenize(sentence, cfg.punctuation)
    if cfg.stopwords:
        tokens = [t for t in tokens if t.lower() not in cfg.stopwords]
    tokens = [t.lower() for t in tokens]
    return cfg.segmenter(tokens)


def preprocess_text(text: str, cfg: PreprocessConfig) -> ProcessedText:
    """Clean a whole reading text sentence by sentence; sentences that end
    up empty are dropped."""
    return ProcessedText.from_sentences(
        preprocess_sentence(s, cfg) for s in split_sentences(text)
    )


def segment_words(tokens: Sequence[str], lexicon: Iterable[str]) -> WordList:
    """Greedy longest-match segmentation of a lowercase syllable sequence."""
    return DictionarySegmenter(lexicon)(tokens)


def _read_word_file(path: str | Path) -> list[str]:
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            words.append(entry)
    return words


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Stopword file: UTF-8, one word per line, '#' starts a comment."""
    return frozenset(w.lower() for w in _read_word_file(path))


def load_lexicon(path: str | Path) -> frozenset[str]:
    """Lexicon file: one word per line, syllables joined by '_' or spaces."""
    return frozenset(w.lower().replace(" ", "_") for w in _read_word_file(path))
