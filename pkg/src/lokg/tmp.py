"""Text mining pipeline: titles and descriptions to semantic-relation verdicts.

Titles are embedded directly (translated to English first when a pair mixes
languages).  Descriptions go through topic extraction: 1-2-gram candidates,
ranked by cosine against the whole description, then diversified with maximal
marginal relevance.  A pair's description score is the symmetric best-match
average over the topic-pair cosine matrix; the combined score is a weighted
mix of title and description scores, and a relation passes when the combined
score clears the configured threshold.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from typing import Optional

from lokg.cleaning import CleanedText, clean, sentences, words
from lokg.errors import (
    EmptyDescription,
    EmptyTitle,
    EmptyTopicSet,
    LevelNotEnabled,
    LokgError,
    ProviderTagMismatch,
)
from lokg.providers import (
    BuiltinDetector,
    BuiltinEmbedder,
    BuiltinTranslator,
    EmbeddingVector,
    cosine,
    stopwords,
)
from lokg.taxonomy import Level, LearningObject, TaxonomyForest

DEFAULT_LEVEL_PAIRS = ((Level.COURSE, Level.COURSE), (Level.TOPIC, Level.TOPIC))


@dataclass
class TmpConfig:
    threshold: float = 0.88
    title_weight: float = 0.5
    description_weight: float = 0.5
    k_max: int = 5
    mmr_lambda: float = 0.5
    level_pairs: tuple = DEFAULT_LEVEL_PAIRS
    blocking: bool = False

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        pairs = set()
        for a, b in self.level_pairs:
            a, b = (a, b) if a.depth <= b.depth else (b, a)
            pairs.add((a, b))
        self.level_pairs = tuple(sorted(pairs, key=lambda p: (p[0].depth, p[1].depth)))

    def enabled_levels(self) -> tuple[Level, ...]:
        levels = {l for pair in self.level_pairs for l in pair}
        return tuple(sorted(levels, key=lambda l: l.depth))

    def allows(self, a: Level, b: Level) -> bool:
        a, b = (a, b) if a.depth <= b.depth else (b, a)
        return (a, b) in self.level_pairs


@dataclass
class Providers:
    detector: object = None
    translator: object = None
    embedder: object = None

    @classmethod
    def builtin(cls, extra_lexicons=None) -> "Providers":
        return cls(
            detector=BuiltinDetector(),
            translator=BuiltinTranslator(extra_lexicons=extra_lexicons),
            embedder=BuiltinEmbedder(),
        )


class EmbeddingCache:
    """Read-mostly map (provider_tag, sha256(text)) -> vector with hit counters."""

    def __init__(self):
        self._store: dict[tuple[str, str], EmbeddingVector] = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(tag: str, text: str) -> tuple[str, str]:
        return tag, hashlib.sha256(text.encode("utf-8")).hexdigest()

    def get(self, text: str, embedder) -> EmbeddingVector:
        key = self._key(embedder.provider_tag, text)
        vec = self._store.get(key)
        if vec is not None:
            self.hits += 1
            return vec
        self.misses += 1
        vec = embedder.embed(text)
        self._store[key] = vec
        return vec

    def __len__(self):
        return len(self._store)

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0

    def to_jsonable(self) -> dict:
        out: dict[str, dict] = {}
        for (tag, sha), vec in self._store.items():
            out.setdefault(tag, {})[sha] = list(vec.values)
        return out

    def load_jsonable(self, data: dict):
        import numpy as np

        for tag, entries in data.items():
            for sha, values in entries.items():
                arr = np.asarray(values, dtype=np.float64)
                self._store[(tag, sha)] = EmbeddingVector(
                    values=arr, dim=arr.shape[0], provider_tag=tag
                )


@dataclass
class TopicSet:
    owner_id: str
    topics: list  # [(phrase, EmbeddingVector)]

    @property
    def k(self) -> int:
        return len(self.topics)

    @property
    def provider_tag(self) -> str:
        return self.topics[0][1].provider_tag

    @property
    def phrases(self) -> list[str]:
        return [p for p, _ in self.topics]


@dataclass(frozen=True)
class SimilarityVerdict:
    id_a: str
    id_b: str
    level_a: Level
    level_b: Level
    title_score: float
    desc_score: Optional[float]
    combined: float
    passed: bool
    threshold_used: float
    intra_journey: bool = False

    def __post_init__(self):
        if self.id_a >= self.id_b:
            raise ValueError("verdict pair must be stored with id_a < id_b")

    @property
    def pair(self) -> tuple[str, str]:
        return self.id_a, self.id_b

    def sort_key(self):
        return (
            min(self.level_a.depth, self.level_b.depth),
            max(self.level_a.depth, self.level_b.depth),
            -self.combined,
            self.id_a,
            self.id_b,
        )


@dataclass
class PairError:
    id_a: str
    id_b: str
    error: str


@dataclass
class MiningResult:
    verdicts: list  # every evaluated pair, sorted
    errors: list
    cache: EmbeddingCache
    pairs_from_cache: int = 0

    @property
    def passed(self) -> list:
        return [v for v in self.verdicts if v.passed]


def _maximal_phrases(candidates: list[str], doc_sim: dict[str, float]) -> list[str]:
    """Drop candidates contained word-wise in a longer candidate that matches
    the document at least as well (prefer maximal phrases)."""

    def contained(short: str, long: str) -> bool:
        sw, lw = short.split(), long.split()
        return len(sw) < len(lw) and any(
            lw[i : i + len(sw)] == sw for i in range(len(lw) - len(sw) + 1)
        )

    dropped = {
        c for c in candidates
        for d in candidates
        if contained(c, d) and doc_sim[d] >= doc_sim[c]
    }
    return [c for c in candidates if c not in dropped]


# --- core scoring -------------------------------------------------------------


def best_match_average(matrix: list[list[float]]) -> float:
    """Two-sided best-match mean of a similarity matrix:
    (sum of row maxima + sum of column maxima) / (rows + columns)."""
    rows = len(matrix)
    cols = len(matrix[0])
    row_best = sum(max(row) for row in matrix)
    col_best = sum(max(matrix[i][j] for i in range(rows)) for j in range(cols))
    return (row_best + col_best) / (rows + cols)


def description_similarity(a: TopicSet, b: TopicSet) -> float:
    """Symmetric best-match average over the topic-pair cosine matrix."""
    if not a.topics or not b.topics:
        raise EmptyTopicSet("both topic sets must be non-empty")
    if a.provider_tag != b.provider_tag:
        raise ProviderTagMismatch(f"{a.provider_tag!r} vs {b.provider_tag!r}")
    return best_match_average(
        [[cosine(va, vb) for _, vb in b.topics] for _, va in a.topics]
    )


def combine_scores(title_score: float, desc_score: Optional[float],
                   config: TmpConfig) -> float:
    """Weighted title+description mix; title-only when a description is missing."""
    if desc_score is None:
        return title_score
    return config.title_weight * title_score + config.description_weight * desc_score


class TextMiner:
    """Stateful pipeline front: caches cleanings, embeddings, topics, translations."""

    def __init__(self, config: TmpConfig | None = None, providers: Providers | None = None,
                 cache: EmbeddingCache | None = None):
        self.config = config or TmpConfig()
        self.providers = providers or Providers.builtin()
        self.cache = cache or EmbeddingCache()
        self._cleaned: dict[tuple[str, str], CleanedText] = {}
        self._topics: dict[str, Optional[TopicSet]] = {}
        self._translations: dict[tuple[str, str, str], str] = {}

    # -- helpers --

    def cleaned(self, obj: LearningObject, which: str) -> CleanedText:
        key = (obj.id, which)
        if key not in self._cleaned:
            text = obj.title if which == "title" else obj.description
            self._cleaned[key] = clean(text, obj.declared_language, self.providers.detector)
        return self._cleaned[key]

    @staticmethod
    def _lang(cleaned: CleanedText) -> str:
        return cleaned.lang.lang if cleaned.lang else "en"

    def _translate(self, text: str, source: str, target: str = "en") -> str:
        key = (text, source, target)
        if key not in self._translations:
            self._translations[key] = self.providers.translator.translate(
                text, source, target
            ).text
        return self._translations[key]

    def _embed(self, text: str) -> EmbeddingVector:
        return self.cache.get(text, self.providers.embedder)

    # -- topic extraction --

    def extract_topics(self, desc: CleanedText, k_max: int | None = None,
                       owner_id: str = "") -> TopicSet:
        """Up to ``k_max`` keyphrases: 1-2-grams ranked by document cosine, MMR-diversified.

        Non-English phrases are translated to English after selection so every
        stored topic set lives in one comparable space.
        """
        if desc.is_empty:
            raise EmptyDescription(f"{owner_id or 'description'} is empty after cleaning")
        if k_max is None:
            k_max = self.config.k_max
        if k_max < 1:
            raise ValueError("k_max must be >= 1")
        lang = self._lang(desc)
        stop = stopwords(lang if lang in ("en", "de") else "en")
        candidates: list[str] = []
        seen = set()
        for sent in sentences(desc.cleaned):
            toks = [w.lower() for w in words(sent)]
            for n in (1, 2):
                for i in range(len(toks) - n + 1):
                    gram = toks[i : i + n]
                    if gram[0] in stop or gram[-1] in stop:
                        continue
                    phrase = " ".join(gram)
                    if phrase not in seen:
                        seen.add(phrase)
                        candidates.append(phrase)
        if not candidates:
            # stopword-only description: fall back to the whole text as one topic
            candidates = [" ".join(w.lower() for w in words(desc.cleaned))]
        doc_vec = self._embed(desc.cleaned)
        vecs = {c: self._embed(c) for c in candidates}
        doc_sim = {c: cosine(vecs[c], doc_vec) for c in candidates}
        candidates = _maximal_phrases(candidates, doc_sim)

        lam = self.config.mmr_lambda
        selected: list[str] = []
        remaining = sorted(candidates)
        while remaining and len(selected) < k_max:
            def mmr(c):
                redundancy = max((cosine(vecs[c], vecs[s]) for s in selected), default=0.0)
                return lam * doc_sim[c] - (1.0 - lam) * redundancy

            best = min(remaining, key=lambda c: (-mmr(c), c))  # ties: lexicographic
            selected.append(best)
            remaining.remove(best)

        topics: list[tuple[str, EmbeddingVector]] = []
        used = set()
        for phrase in selected:
            if lang == "de":
                phrase = self._translate(phrase, "de").lower()
            if phrase not in used:
                used.add(phrase)
                topics.append((phrase, self._embed(phrase)))
        return TopicSet(owner_id=owner_id, topics=topics)

    def topic_set(self, obj: LearningObject) -> Optional[TopicSet]:
        if obj.id not in self._topics:
            desc = self.cleaned(obj, "description")
            self._topics[obj.id] = (
                None if desc.is_empty else self.extract_topics(desc, owner_id=obj.id)
            )
        return self._topics[obj.id]

    # -- pair scoring --

    def title_similarity(self, a: LearningObject, b: LearningObject) -> float:
        ta, tb = self.cleaned(a, "title"), self.cleaned(b, "title")
        for obj, cleaned_title in ((a, ta), (b, tb)):
            if cleaned_title.is_empty:
                raise EmptyTitle(f"{obj.id}: title empty after cleaning")
        la, lb = self._lang(ta), self._lang(tb)
        text_a, text_b = ta.cleaned, tb.cleaned
        if la != lb:
            if la != "en":
                text_a = self._translate(text_a, la)
            if lb != "en":
                text_b = self._translate(text_b, lb)
        return cosine(self._embed(text_a), self._embed(text_b))

    def combined_score(self, a: LearningObject, b: LearningObject
                       ) -> tuple[float, Optional[float], float]:
        """(title_score, desc_score, combined); combined falls back to the
        title score when either description is empty."""
        title_score = self.title_similarity(a, b)
        topics_a, topics_b = self.topic_set(a), self.topic_set(b)
        desc_score = (None if topics_a is None or topics_b is None
                      else description_similarity(topics_a, topics_b))
        return title_score, desc_score, combine_scores(title_score, desc_score, self.config)

    def decide_relation(self, a: LearningObject, b: LearningObject,
                        journeys_a: frozenset = frozenset(),
                        journeys_b: frozenset = frozenset()) -> SimilarityVerdict:
        if a.id == b.id:
            raise ValueError("cannot relate an object to itself")
        if not self.config.allows(a.level, b.level):
            raise LevelNotEnabled(f"{a.level.value}-{b.level.value} pairs are not enabled")
        if a.id > b.id:
            a, b = b, a
            journeys_a, journeys_b = journeys_b, journeys_a
        title_score, desc_score, combined = self.combined_score(a, b)
        return SimilarityVerdict(
            id_a=a.id,
            id_b=b.id,
            level_a=a.level,
            level_b=b.level,
            title_score=title_score,
            desc_score=desc_score,
            combined=combined,
            passed=combined >= self.config.threshold,
            threshold_used=self.config.threshold,
            intra_journey=bool(journeys_a & journeys_b),
        )

    # -- corpus mining --

    def candidate_pairs(self, forest: TaxonomyForest) -> list[tuple[str, str]]:
        pairs: set[tuple[str, str]] = set()
        by_level = {level: sorted(o.id for o in forest.at_level(level))
                    for level in self.config.enabled_levels()}
        for la, lb in self.config.level_pairs:
            ids_a, ids_b = by_level[la], by_level[lb]
            if la is lb:
                pairs.update((x, y) for i, x in enumerate(ids_a) for y in ids_a[i + 1:])
            else:
                pairs.update(tuple(sorted((x, y))) for x in ids_a for y in ids_b if x != y)
        if self.config.blocking:
            pairs = {p for p in pairs if self._shares_title_token(forest, *p)}
        return sorted(pairs)

    def _shares_title_token(self, forest: TaxonomyForest, x: str, y: str) -> bool:
        def tokens(oid):
            obj = forest.objects[oid]
            stop = stopwords(self._lang(self.cleaned(obj, "title")))
            return {w.lower() for w in words(self.cleaned(obj, "title").cleaned)} - stop

        return bool(tokens(x) & tokens(y))

    def mine(self, forest: TaxonomyForest,
             pair_cache: dict | None = None) -> MiningResult:
        """Evaluate every enabled candidate pair; fail-soft with an error ledger."""
        pair_cache = pair_cache or {}
        journeys = {oid: forest.journeys_of(oid) for oid in forest.objects}
        verdicts: list[SimilarityVerdict] = []
        errors: list[PairError] = []
        from_cache = 0
        for ida, idb in self.candidate_pairs(forest):
            cached = pair_cache.get((ida, idb))
            if cached is not None:
                verdicts.append(cached)
                from_cache += 1
                continue
            try:
                verdicts.append(self.decide_relation(
                    forest.objects[ida], forest.objects[idb],
                    journeys[ida], journeys[idb],
                ))
            except LokgError as exc:
                errors.append(PairError(ida, idb, f"{type(exc).__name__}: {exc}"))
        verdicts.sort(key=SimilarityVerdict.sort_key)
        return MiningResult(verdicts=verdicts, errors=errors, cache=self.cache,
                            pairs_from_cache=from_cache)


# --- one-shot convenience wrappers (fresh miner, builtin providers) -----------


def extract_topics(desc: CleanedText, k_max: int, miner: TextMiner | None = None) -> TopicSet:
    return (miner or TextMiner()).extract_topics(desc, k_max)


def title_similarity(a: LearningObject, b: LearningObject,
                     miner: TextMiner | None = None) -> float:
    return (miner or TextMiner()).title_similarity(a, b)


def decide_relation(a: LearningObject, b: LearningObject,
                    config: TmpConfig | None = None,
                    miner: TextMiner | None = None) -> SimilarityVerdict:
    return (miner or TextMiner(config=config)).decide_relation(a, b)


def mine_relations(forest: TaxonomyForest, config: TmpConfig | None = None,
                   providers: Providers | None = None,
                   cache: EmbeddingCache | None = None,
                   pair_cache: dict | None = None) -> MiningResult:
    return TextMiner(config=config, providers=providers, cache=cache).mine(
        forest, pair_cache=pair_cache
    )


# --- verdict ledger -------------------------------------------------------------

LEDGER_FIELDS = ["id_a", "id_b", "level_a", "level_b", "title_score", "desc_score",
                 "combined", "threshold", "passed", "intra_journey"]


def ledger_to_csv(verdicts) -> str:
    """One auditable row per evaluated pair; floats kept at full precision."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LEDGER_FIELDS)
    for v in verdicts:
        writer.writerow([
            v.id_a, v.id_b, v.level_a.value, v.level_b.value,
            repr(v.title_score),
            "" if v.desc_score is None else repr(v.desc_score),
            repr(v.combined), repr(v.threshold_used),
            int(v.passed), int(v.intra_journey),
        ])
    return buf.getvalue()


def ledger_from_csv(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != LEDGER_FIELDS:
        raise ValueError(f"unexpected ledger header: {header}")
    verdicts = []
    for row in reader:
        verdicts.append(SimilarityVerdict(
            id_a=row[0], id_b=row[1],
            level_a=Level(row[2]), level_b=Level(row[3]),
            title_score=float(row[4]),
            desc_score=None if row[5] == "" else float(row[5]),
            combined=float(row[6]), passed=bool(int(row[8])),
            threshold_used=float(row[7]), intra_journey=bool(int(row[9])),
        ))
    return verdicts
