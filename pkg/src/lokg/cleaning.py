"""Text cleaning shared by the taxonomy filter and the mining pipeline.

Cleaning keeps letters, digits, whitespace and sentence punctuation
``. , ; : ? ! -`` and drops everything else.  Runs of one punctuation mark
collapse to a single mark and whitespace collapses to single spaces, so
sentence boundaries survive cleaning untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from lokg.providers.base import LanguageVerdict

SENTENCE_PUNCT = ".,;:?!-"
_PUNCT_RUN = re.compile(r"([.,;:?!\-])\1+")
_WS_RUN = re.compile(r"\s+")
_SENTENCE_SPLIT = re.compile(r"[.?!;:]")
_WORD = re.compile(r"[\w-]+", re.UNICODE)


def clean_text(text: str) -> str:
    kept = [
        ch if (ch.isalnum() or ch.isspace() or ch in SENTENCE_PUNCT) else " "
        for ch in text
    ]
    s = _PUNCT_RUN.sub(r"\1", "".join(kept))
    return _WS_RUN.sub(" ", s).strip()


def sentences(cleaned: str) -> list[str]:
    """Split cleaned text at sentence punctuation; no segment is ever merged."""
    return [part.strip() for part in _SENTENCE_SPLIT.split(cleaned) if part.strip()]


def words(segment: str) -> list[str]:
    """Word tokens of one segment; interior hyphens stay part of the word."""
    return [w.strip("-_") for w in _WORD.findall(segment) if w.strip("-_")]


@dataclass
class CleanedText:
    original: str
    cleaned: str
    lang: Optional[LanguageVerdict] = None

    @property
    def is_empty(self) -> bool:
        """True when nothing word-like survived cleaning (flagged, not an error)."""
        return not words(self.cleaned)


def clean(text: str, declared_language: str | None = None, detector=None) -> CleanedText:
    """Clean ``text`` and attach a language verdict.

    A declared language wins over detection; detection only runs when a
    detector is supplied and the cleaned text is non-empty.
    """
    cleaned = clean_text(text)
    result = CleanedText(original=text, cleaned=cleaned)
    if result.is_empty:
        return result
    if declared_language:
        result.lang = LanguageVerdict(lang=declared_language, confidence=1.0)
    elif detector is not None:
        result.lang = detector.detect(cleaned)
    return result
