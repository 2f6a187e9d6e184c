"""Relation-quality evaluation: journey-internal similarity averages and the
pass-fraction of mined relations against the journey-pair averages.

A journey's internal similarity is the mean raw combined score over all
unordered pairs of its enabled-level objects (thresholds play no role here).
Each cross-journey semantic edge is then compared to the arithmetic mean of
the two journeys' internal similarities; it passes when its own score is
equal or higher.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from itertools import combinations

from lokg.errors import (
    JourneyTooSmall,
    NoSemanticEdges,
    UndefinedJourneySimilarity,
)
from lokg.kg import KnowledgeGraph
from lokg.taxonomy import Level, TaxonomyForest
from lokg.tmp import TextMiner


@dataclass(frozen=True)
class JourneySimilarity:
    journey_id: str
    j_sim: float
    pair_count: int


@dataclass(frozen=True)
class RelationAssessment:
    id_a: str
    id_b: str
    sr_sim: float
    journey_i: str
    journey_j: str
    j_i: float
    j_j: float

    @property
    def j_avg(self) -> float:
        return (self.j_i + self.j_j) / 2.0

    @property
    def passed(self) -> bool:
        return self.sr_sim >= self.j_avg  # equality counts as comparable


@dataclass
class EvaluationReport:
    assessments: list
    pass_fraction: float
    sample_size: int
    population_size: int
    journey_sims: list
    seed: int

    def to_dict(self) -> dict:
        return {
            "pass_fraction": self.pass_fraction,
            "sample_size": self.sample_size,
            "population_size": self.population_size,
            "seed": self.seed,
            "journey_sims": [
                {"journey_id": js.journey_id, "j_sim": js.j_sim, "pair_count": js.pair_count}
                for js in self.journey_sims
            ],
        }


def journey_members(forest: TaxonomyForest, journey_id: str, levels) -> list[str]:
    levels = set(levels)
    return sorted(
        oid for oid in forest.descendants(journey_id)
        if forest.objects[oid].level in levels
    )


def journey_similarity(forest: TaxonomyForest, journey_id: str,
                       miner: TextMiner | None = None) -> JourneySimilarity:
    """Mean combined score over all unordered intra-journey pairs at the
    enabled levels (raw scores; the decision threshold is ignored)."""
    miner = miner or TextMiner()
    members = journey_members(forest, journey_id, miner.config.enabled_levels())
    if len(members) < 2:
        raise JourneyTooSmall(
            f"{journey_id}: needs >= 2 objects at enabled levels, found {len(members)}")
    total = 0.0
    count = 0
    for ida, idb in combinations(members, 2):
        _, _, combined = miner.combined_score(forest.objects[ida], forest.objects[idb])
        total += combined
        count += 1
    return JourneySimilarity(journey_id=journey_id, j_sim=total / count, pair_count=count)


def journey_similarity_by_level(forest: TaxonomyForest, journey_id: str,
                                miner: TextMiner | None = None) -> dict:
    """Per-level breakdown of the journey-internal similarity."""
    miner = miner or TextMiner()
    out = {}
    for level in miner.config.enabled_levels():
        members = journey_members(forest, journey_id, [level])
        if len(members) < 2:
            continue
        total = 0.0
        count = 0
        for ida, idb in combinations(members, 2):
            _, _, combined = miner.combined_score(forest.objects[ida], forest.objects[idb])
            total += combined
            count += 1
        out[level.value] = JourneySimilarity(journey_id, total / count, count)
    return out


def all_journey_similarities(forest: TaxonomyForest,
                             miner: TextMiner | None = None) -> dict[str, JourneySimilarity]:
    """j_sim for every Journey with at least one comparable pair."""
    miner = miner or TextMiner()
    out = {}
    for obj in forest.at_level(Level.JOURNEY):
        try:
            out[obj.id] = journey_similarity(forest, obj.id, miner)
        except JourneyTooSmall:
            continue
    return out


def _kg_journeys(kg: KnowledgeGraph) -> dict[str, frozenset[str]]:
    parents: dict[str, list[str]] = {nid: [] for nid in kg.nodes}
    for e in kg.hierarchical_edges():
        parents[e.dst].append(e.src)
    journeys: dict[str, frozenset[str]] = {}

    def resolve(nid):
        if nid in journeys:
            return journeys[nid]
        if kg.nodes[nid].level is Level.JOURNEY:
            journeys[nid] = frozenset({nid})
            return journeys[nid]
        found = frozenset()
        for pid in parents[nid]:
            found |= resolve(pid)
        journeys[nid] = found
        return found

    for nid in sorted(kg.nodes):
        resolve(nid)
    return journeys


def assess_relations(kg: KnowledgeGraph, journey_sims: dict[str, JourneySimilarity],
                     sample_size: int = 240, seed: int = 0) -> EvaluationReport:
    """Compare each cross-journey semantic edge against the mean internal
    similarity of the two journeys it bridges; a multi-journey relation is
    assessed once per bridged journey pair."""
    journeys = _kg_journeys(kg)
    population: list[RelationAssessment] = []
    for e in kg.semantic_edges():
        bridged = sorted(
            (ji, jj)
            for ji in journeys[e.src]
            for jj in journeys[e.dst]
            if ji != jj
        )
        for ji, jj in {tuple(sorted(p)) for p in bridged}:
            for jid in (ji, jj):
                if jid not in journey_sims:
                    raise UndefinedJourneySimilarity(
                        f"journey {jid} (touched by {e.src}-{e.dst}) has no defined j_sim")
            population.append(RelationAssessment(
                id_a=e.src, id_b=e.dst, sr_sim=e.weight,
                journey_i=ji, journey_j=jj,
                j_i=journey_sims[ji].j_sim, j_j=journey_sims[jj].j_sim,
            ))
    if not population:
        raise NoSemanticEdges("no cross-journey semantic edges to assess")
    population.sort(key=lambda a: (a.id_a, a.id_b, a.journey_i, a.journey_j))
    if sample_size < len(population):
        sampled = random.Random(seed).sample(population, sample_size)
        sampled.sort(key=lambda a: (a.id_a, a.id_b, a.journey_i, a.journey_j))
    else:
        sampled = population
    passed = sum(1 for a in sampled if a.passed)
    return EvaluationReport(
        assessments=sampled,
        pass_fraction=passed / len(sampled),
        sample_size=len(sampled),
        population_size=len(population),
        journey_sims=sorted(journey_sims.values(), key=lambda js: js.journey_id),
        seed=seed,
    )


def evaluate_kg(kg: KnowledgeGraph, forest: TaxonomyForest,
                miner: TextMiner | None = None, sample_size: int = 240,
                seed: int = 0) -> EvaluationReport:
    """End-to-end: journey similarities from raw texts, then edge assessment."""
    miner = miner or TextMiner()
    return assess_relations(kg, all_journey_similarities(forest, miner),
                            sample_size=sample_size, seed=seed)


def assessments_csv(report: EvaluationReport) -> str:
    """Plot-ready export: one row per assessed relation."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id_a", "id_b", "sr_sim", "j_i", "j_j", "j_avg", "passed"])
    for a in report.assessments:
        writer.writerow([a.id_a, a.id_b, repr(a.sr_sim), repr(a.j_i), repr(a.j_j),
                         repr(a.j_avg), int(a.passed)])
    return buf.getvalue()
