"""Deterministic built-in text services: language detection, translation, embedding.

These replace external models so the pipeline runs offline and every test is
reproducible.  The detector combines character-trigram profiles built from
bundled corpora with stopword counts; the translator substitutes words from a
bundled de->en lexicon; the embedder hashes character 3-grams and word
unigrams into a fixed 256-dim term-frequency vector (hash key ``lokg-v1``).
"""

from __future__ import annotations

import hashlib
import math
import re
from functools import lru_cache
from importlib import resources

import numpy as np

from lokg.errors import EmptyText, UnsupportedPair
from lokg.providers.base import (
    SUPPORTED_LANGUAGES,
    EmbeddingVector,
    LanguageVerdict,
    TranslationResult,
)

_TOKEN = re.compile(r"[\w-]+", re.UNICODE)

BUILTIN_EMBED_DIM = 256
BUILTIN_EMBED_TAG = "builtin:hash3g-256"
_HASH_KEY = b"lokg-v1"


def _data_text(name: str) -> str:
    return resources.files("lokg.providers.data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def stopwords(lang: str) -> frozenset[str]:
    if lang not in SUPPORTED_LANGUAGES:
        raise ValueError(f"no bundled stopwords for {lang!r}")
    return frozenset(
        line.strip() for line in _data_text(f"stopwords_{lang}.txt").splitlines() if line.strip()
    )


def _tokens(text: str) -> list[str]:
    return [t.strip("-_").lower() for t in _TOKEN.findall(text) if t.strip("-_")]


def _char_trigrams(tokens: list[str]) -> list[str]:
    joined = " ".join(tokens)
    return [joined[i : i + 3] for i in range(len(joined) - 2)]


# --- language detection -----------------------------------------------------


def _trigram_counts(text_lines) -> dict[str, int]:
    counts: dict[str, int] = {}
    for line in text_lines:
        for tri in _char_trigrams(_tokens(line)):
            counts[tri] = counts.get(tri, 0) + 1
    return counts


@lru_cache(maxsize=None)
def _language_profile(lang: str) -> dict[str, int]:
    return _trigram_counts(_data_text(f"profile_{lang}.txt").splitlines())


def _sparse_cosine(a: dict[str, int], b: dict[str, int]) -> float:
    if not a or not b:
        return 0.0
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    dot = sum(v * large.get(k, 0) for k, v in small.items())
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    return dot / (na * nb)


class BuiltinDetector:
    """en/de detector: stopword hit rate plus trigram-profile cosine."""

    provider_tag = "builtin:detect-en-de"
    stopword_weight = 2.0

    def detect(self, text: str) -> LanguageVerdict:
        toks = _tokens(text)
        if not toks:
            raise EmptyText("cannot detect language of empty text")
        tris = _trigram_counts([text])
        scores = {}
        for lang in SUPPORTED_LANGUAGES:
            hit = sum(1 for t in toks if t in stopwords(lang)) / len(toks)
            scores[lang] = self.stopword_weight * hit + _sparse_cosine(tris, _language_profile(lang))
        total = sum(scores.values())
        if total == 0.0:
            return LanguageVerdict(lang="en", confidence=0.5)
        # ties resolve to the first supported language (en)
        best = max(SUPPORTED_LANGUAGES, key=lambda l: scores[l])
        return LanguageVerdict(lang=best, confidence=scores[best] / total)

    def detect_batch(self, texts: list[str]) -> list[LanguageVerdict]:
        return [self.detect(t) for t in texts]


# --- translation ------------------------------------------------------------


def load_lexicon(path=None) -> dict[str, str]:
    """Read a tab-separated source->target word lexicon."""
    if path is None:
        raw = _data_text("lexicon_de_en.tsv")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    lexicon = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line:
            continue
        src, _, dst = line.partition("\t")
        if not dst:
            raise ValueError(f"lexicon line without tab separator: {line!r}")
        lexicon[src.strip().lower()] = dst.strip()
    return lexicon


class BuiltinTranslator:
    """Word-by-word de->en substitution; unknown words pass through unchanged.

    Good enough to exercise the pipeline's translation path, not for fidelity.
    Extra lexicons (e.g. the synthetic-corpus sidecar) extend the bundled one.
    """

    provider_tag = "builtin:lexicon-de-en"

    def __init__(self, extra_lexicons: list | None = None):
        self._lexicon = load_lexicon()
        for extra in extra_lexicons or []:
            self._lexicon.update(extra if isinstance(extra, dict) else load_lexicon(extra))

    def translate(self, text: str, source: str, target: str) -> TranslationResult:
        if source == target:
            raise UnsupportedPair(f"source and target are both {source!r}")
        if (source, target) != ("de", "en"):
            raise UnsupportedPair(f"builtin translator only supports de->en, got {source}->{target}")
        out = []
        for token in re.split(r"(\s+)", text):
            key = token.strip("-_").lower() if _TOKEN.fullmatch(token) else None
            out.append(self._lexicon.get(key, token) if key else token)
        return TranslationResult(
            text="".join(out), source=source, target=target, translated_by="builtin"
        )

    def translate_batch(self, texts: list[str], source: str, target: str) -> list[TranslationResult]:
        return [self.translate(t, source, target) for t in texts]


# --- embedding ---------------------------------------------------------------


def _bucket(feature: str) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8, key=_HASH_KEY).digest()
    return int.from_bytes(digest, "big") % BUILTIN_EMBED_DIM


def hashed_features(text: str) -> list[str]:
    """Feature strings of the built-in embedder: word unigrams + char 3-grams."""
    toks = _tokens(text)
    return [f"w:{t}" for t in toks] + [f"c:{g}" for g in _char_trigrams(toks)]


class BuiltinEmbedder:
    """Hashed 3-gram/unigram TF embedder; pure function of the input text."""

    provider_tag = BUILTIN_EMBED_TAG
    dim = BUILTIN_EMBED_DIM

    def embed(self, text: str) -> EmbeddingVector:
        feats = hashed_features(text)
        if not feats:
            raise EmptyText(f"no embeddable content in {text!r}")
        values = np.zeros(self.dim, dtype=np.float64)
        for feat in feats:
            values[_bucket(feat)] += 1.0
        values /= np.linalg.norm(values)
        return EmbeddingVector(values=values, dim=self.dim, provider_tag=self.provider_tag)

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        return [self.embed(t) for t in texts]
