import json
import random

import pytest

from lokg.kg import Edge, EdgeKind, KnowledgeGraph, Node
from lokg.providers import BuiltinDetector, BuiltinEmbedder, BuiltinTranslator
from lokg.taxonomy import Level, LearningObject, TaxonomyForest

LEVELS = list(Level)
LEVEL_PREFIX = {
    Level.JOURNEY: "j",
    Level.COURSE: "c",
    Level.TOPIC: "t",
    Level.EDUCATIONAL_PACKAGE: "p",
    Level.EDUCATIONAL_CONTENT: "e",
}


def lo(oid, level, title, description="", parents=(), language=None):
    return LearningObject(
        id=oid,
        level=level,
        title=title,
        description=description,
        declared_language=language,
        parent_ids=tuple(parents),
    )


def chain(suffix, journey_title=None, titles=None):
    """One full Journey->...->EducationalContent chain, ids suffixed."""
    titles = titles or {}
    objs = []
    prev = None
    for level in LEVELS:
        oid = f"{LEVEL_PREFIX[level]}-{suffix}"
        title = titles.get(level, f"{level.value} {suffix}")
        if level is Level.JOURNEY and journey_title:
            title = journey_title
        objs.append(lo(oid, level, title, f"About {title}.", parents=(prev,) if prev else ()))
        prev = oid
    return objs


def forest_of(*object_lists):
    objs = []
    for entry in object_lists:
        objs.extend(entry if isinstance(entry, list) else [entry])
    return TaxonomyForest(objs)


def records_json(objects):
    records = []
    for o in objects:
        rec = {
            "id": o.id,
            "level": o.level.value,
            "title": o.title,
            "description": o.description,
            "parents": list(o.parent_ids),
        }
        if o.declared_language:
            rec["language"] = o.declared_language
        records.append(rec)
    return json.dumps(records)


def make_kg(pairs=(), directed_pairs=(), extra_nodes=(), weights=None):
    """Ad-hoc graph: undirected pairs become semantic edges, directed ones
    hierarchical; all nodes at Topic level."""
    weights = weights or {}
    ids = {x for p in list(pairs) + list(directed_pairs) for x in p} | set(extra_nodes)
    nodes = {i: Node(id=i, level=Level.TOPIC, label=i) for i in sorted(ids)}
    edges = [
        Edge(src=min(u, v), dst=max(u, v), kind=EdgeKind.SEMANTIC,
             weight=weights.get((min(u, v), max(u, v)), 1.0))
        for u, v in pairs
    ]
    edges += [
        Edge(src=u, dst=v, kind=EdgeKind.HIERARCHICAL,
             weight=weights.get((u, v), 1.0))
        for u, v in directed_pairs
    ]
    return KnowledgeGraph(nodes=nodes, edges=edges)


def random_kg(n, p, seed):
    """Seeded Erdos-Renyi-style graph on n nodes as semantic edges."""
    rng = random.Random(seed)
    ids = [f"n{i:03d}" for i in range(n)]
    pairs = [
        (a, b)
        for i, a in enumerate(ids)
        for b in ids[i + 1:]
        if rng.random() < p
    ]
    return make_kg(pairs, extra_nodes=ids)


@pytest.fixture(scope="session")
def embedder():
    return BuiltinEmbedder()


@pytest.fixture(scope="session")
def detector():
    return BuiltinDetector()


@pytest.fixture(scope="session")
def translator():
    return BuiltinTranslator()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = str(getattr(rep, "nodeid", ""))
            if "test_acceptance" in nodeid and "::" in nodeid:
                lines[nodeid.split("::")[-1]] = status
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name in sorted(lines):
            verdict = "PASS" if lines[name] == "passed" else "FAIL"
            terminalreporter.write_line(f"{verdict}  {name}")
