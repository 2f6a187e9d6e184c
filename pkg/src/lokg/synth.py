"""Deterministic synthetic taxonomies with controllable vocabulary clustering.

Domains get disjoint letter alphabets, so cross-domain texts share almost no
embedder features; objects instantiated from the same "concept" (a fixed word
tuple) are near-duplicates across journeys, which is exactly the structure
the mining pipeline is supposed to rediscover.  German variants are produced
by a reversible word transform (reverse + "qx", letters q/x appear nowhere
else) and the matching de->en lexicon is emitted as a sidecar.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from lokg.taxonomy import Level, LearningObject, TaxonomyForest

_DOMAIN_ALPHABETS = ["abcd", "efgh", "ijkl", "mnop", "rstu"]
_SHARED_ALPHABET = "wyz"
MAX_DOMAINS = len(_DOMAIN_ALPHABETS)

_VOCAB_PER_DOMAIN = 24
_SHARED_POOL = 30
_COURSE_CONCEPTS = 3
_TOPIC_CONCEPTS = 4
_WORD_LEN = 6


@dataclass
class GeneratorSpec:
    seed: int = 0
    journeys: int = 20
    courses_per_journey: int = 3
    topics_per_course: int = 2
    packages_per_topic: int = 2
    contents_per_package: int = 2
    n_domains: int = 4
    overlap: float = 0.2
    bilingual_fraction: float = 0.0

    def __post_init__(self):
        for name in ("journeys", "courses_per_journey", "topics_per_course",
                     "packages_per_topic", "contents_per_package"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 1 <= self.n_domains <= MAX_DOMAINS:
            raise ValueError(f"n_domains must be in [1, {MAX_DOMAINS}]")
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError("overlap must be in [0, 1]")
        if not 0.0 <= self.bilingual_fraction <= 1.0:
            raise ValueError("bilingual_fraction must be in [0, 1]")


@dataclass(frozen=True)
class Concept:
    name: str
    words: tuple[str, ...]   # the title tuple, identical for every instance
    filler: str              # deterministic companion word in sentence 1
    support: tuple[str, ...]  # word pool for sentence 2


@dataclass
class GroundTruth:
    domain_of: dict[str, int] = field(default_factory=dict)
    concept_of: dict[str, str] = field(default_factory=dict)
    journey_domains: dict[str, int] = field(default_factory=dict)

    def same_domain(self, a: str, b: str) -> bool:
        return self.domain_of[a] == self.domain_of[b]

    def to_json(self) -> str:
        doc = {
            "domain_of": dict(sorted(self.domain_of.items())),
            "concept_of": dict(sorted(self.concept_of.items())),
            "journey_domains": dict(sorted(self.journey_domains.items())),
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        doc = json.loads(text)
        return cls(domain_of=doc["domain_of"], concept_of=doc["concept_of"],
                   journey_domains=doc["journey_domains"])


def to_german(word: str) -> str:
    return word[::-1] + "qx"


def _words_from(alphabet: str, count: int, rng: random.Random) -> list[str]:
    out: list[str] = []
    seen = set()
    while len(out) < count:
        w = "".join(rng.choice(alphabet) for _ in range(_WORD_LEN))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


class _Vocabulary:
    def __init__(self, spec: GeneratorSpec):
        self.spec = spec
        self.domain_words: list[list[str]] = []
        self.unique_streams: list[list[str]] = []
        self.course_concepts: list[list[Concept]] = []
        self.topic_concepts: list[list[Concept]] = []
        for d in range(spec.n_domains):
            rng = random.Random(f"{spec.seed}-vocab-{d}")
            words = _words_from(_DOMAIN_ALPHABETS[d], _VOCAB_PER_DOMAIN, rng)
            self.domain_words.append(words)
            self.unique_streams.append(
                _words_from(_DOMAIN_ALPHABETS[d], 4096, random.Random(f"{spec.seed}-uniq-{d}"))
            )
            self.course_concepts.append(self._concepts(d, "course", _COURSE_CONCEPTS, words))
            self.topic_concepts.append(self._concepts(d, "topic", _TOPIC_CONCEPTS, words))
        self.shared_pool = _words_from(
            _SHARED_ALPHABET, _SHARED_POOL, random.Random(f"{spec.seed}-shared"))

    def _concepts(self, d: int, kind: str, count: int, words: list[str]) -> list[Concept]:
        rng = random.Random(f"{self.spec.seed}-concepts-{kind}-{d}")
        out = []
        for i in range(count):
            picked = rng.sample(words, 6)
            out.append(Concept(
                name=f"d{d}-{kind}-{i}",
                words=tuple(picked[:2]),
                filler=picked[2],
                support=tuple(picked[3:6]),
            ))
        return out

    def take_unique(self, d: int, cursor: dict) -> str:
        i = cursor.setdefault(d, 0)
        cursor[d] = i + 1
        return self.unique_streams[d][i]


def generate(spec: GeneratorSpec) -> tuple[TaxonomyForest, GroundTruth, dict[str, str]]:
    """Build (forest, ground truth, de->en lexicon for the German variants)."""
    vocab = _Vocabulary(spec)
    rng = random.Random(f"{spec.seed}-corpus")
    truth = GroundTruth()
    lexicon: dict[str, str] = {}
    objects: list[LearningObject] = []
    cursor: dict[int, int] = {}

    def sentence2_words(concept: Concept, domain: int) -> list[str]:
        out = []
        for slot in range(3):
            if spec.overlap > 0 and rng.random() < spec.overlap:
                out.append(rng.choice(vocab.shared_pool))
            else:
                out.append(concept.support[slot % len(concept.support)])
        return out

    def emit(oid: str, level: Level, title_words: list[str], sentences: list[list[str]],
             parents: tuple[str, ...], domain: int, concept_name: str = "") -> None:
        german = spec.bilingual_fraction > 0 and rng.random() < spec.bilingual_fraction
        if german:
            for w in set(title_words) | {w for s in sentences for w in s}:
                lexicon[to_german(w)] = w
            title = " ".join(to_german(w) for w in title_words)
            desc = " ".join(" ".join(to_german(w) for w in s) + "." for s in sentences)
            lang = "de"
        else:
            title = " ".join(title_words)
            desc = " ".join(" ".join(s) + "." for s in sentences)
            lang = "en"
        objects.append(LearningObject(
            id=oid, level=level, title=title, description=desc,
            declared_language=lang, parent_ids=parents,
        ))
        truth.domain_of[oid] = domain
        if concept_name:
            truth.concept_of[oid] = concept_name

    topic_slot = 0
    course_slot = 0
    for j in range(spec.journeys):
        domain = j % spec.n_domains
        jid = f"j{j:03d}"
        j_words = [vocab.take_unique(domain, cursor) for _ in range(2)]
        emit(jid, Level.JOURNEY, j_words, [j_words + [vocab.domain_words[domain][0]]],
             (), domain)
        truth.journey_domains[jid] = domain
        for c in range(spec.courses_per_journey):
            concept = vocab.course_concepts[domain][course_slot % _COURSE_CONCEPTS]
            course_slot += 1
            cid = f"{jid}-c{c}"
            emit(cid, Level.COURSE, list(concept.words), [
                list(concept.words) + [concept.filler],
                list(concept.words) + sentence2_words(concept, domain),
                [vocab.take_unique(domain, cursor)],
            ], (jid,), domain, concept.name)
            for t in range(spec.topics_per_course):
                concept_t = vocab.topic_concepts[domain][topic_slot % _TOPIC_CONCEPTS]
                topic_slot += 1
                tid = f"{cid}-t{t}"
                emit(tid, Level.TOPIC, list(concept_t.words), [
                    list(concept_t.words) + [concept_t.filler],
                    list(concept_t.words) + sentence2_words(concept_t, domain),
                    [vocab.take_unique(domain, cursor)],
                ], (cid,), domain, concept_t.name)
                for p in range(spec.packages_per_topic):
                    pid = f"{tid}-p{p}"
                    emit(pid, Level.EDUCATIONAL_PACKAGE,
                         [concept_t.words[0], vocab.take_unique(domain, cursor)],
                         [], (tid,), domain)
                    for e in range(spec.contents_per_package):
                        eid = f"{pid}-e{e}"
                        emit(eid, Level.EDUCATIONAL_CONTENT,
                             [concept_t.words[1], vocab.take_unique(domain, cursor)],
                             [], (pid,), domain)
    return TaxonomyForest(objects), truth, lexicon


def lexicon_tsv(lexicon: dict[str, str]) -> str:
    return "".join(f"{de}\t{en}\n" for de, en in sorted(lexicon.items()))
