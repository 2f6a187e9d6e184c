"""Five-level learning-object taxonomy: parsing, validation, filtering.

Dataset schema: a UTF-8 JSON document whose top level is a flat array of
objects ``{id, level, title, description, language?, parents: [ids]}``.
Canonical serialization sorts objects by id, so parse -> serialize -> parse
is the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from lokg.cleaning import clean_text
from lokg.errors import DuplicateId, LevelViolation, SchemaError

MAX_TITLE_LEN = 512


class Level(Enum):
    JOURNEY = "Journey"
    COURSE = "Course"
    TOPIC = "Topic"
    EDUCATIONAL_PACKAGE = "EducationalPackage"
    EDUCATIONAL_CONTENT = "EducationalContent"

    @property
    def depth(self) -> int:
        return _DEPTHS[self]

    @property
    def parent_level(self) -> Optional["Level"]:
        return _ORDER[self.depth - 1] if self.depth > 0 else None

    @classmethod
    def from_name(cls, name: str) -> "Level":
        try:
            return cls(name)
        except ValueError:
            raise SchemaError(f"unknown level {name!r}; expected one of "
                              f"{[l.value for l in cls]}") from None


_ORDER = list(Level)
_DEPTHS = {level: i for i, level in enumerate(_ORDER)}


@dataclass(frozen=True)
class LearningObject:
    id: str
    level: Level
    title: str
    description: str = ""
    declared_language: Optional[str] = None
    parent_ids: tuple[str, ...] = ()

    @property
    def clean_title(self) -> str:
        return clean_text(self.title)

    @property
    def clean_description(self) -> str:
        return clean_text(self.description)


@dataclass
class FilterReport:
    no_content: int = 0
    duplicates: int = 0
    isolated: int = 0
    removed_no_content: list[str] = field(default_factory=list)
    removed_duplicates: list[str] = field(default_factory=list)
    removed_isolated: list[str] = field(default_factory=list)

    @property
    def total_removed(self) -> int:
        return self.no_content + self.duplicates + self.isolated

    def to_dict(self) -> dict:
        return {
            "counts": {
                "no_content": self.no_content,
                "duplicates": self.duplicates,
                "isolated": self.isolated,
            },
            "removed_ids": {
                "no_content": self.removed_no_content,
                "duplicates": self.removed_duplicates,
                "isolated": self.removed_isolated,
            },
        }


class TaxonomyForest:
    """Validated hierarchy; immutable once constructed."""

    def __init__(self, objects: Iterable[LearningObject]):
        self.objects: dict[str, LearningObject] = {}
        for obj in sorted(objects, key=lambda o: o.id):
            if obj.id in self.objects:
                raise DuplicateId(f"duplicate object id {obj.id!r}")
            self.objects[obj.id] = obj
        self.hierarchy_edges: list[tuple[str, str]] = sorted(
            (pid, obj.id) for obj in self.objects.values() for pid in obj.parent_ids
        )
        self._children: dict[str, list[str]] = {oid: [] for oid in self.objects}
        for pid, cid in self.hierarchy_edges:
            if pid not in self.objects:
                raise SchemaError(f"{cid}: unknown parent id {pid!r}")
            self._children[pid].append(cid)
        self._validate()

    def _validate(self):
        for obj in self.objects.values():
            if len(obj.clean_title) > MAX_TITLE_LEN:
                raise SchemaError(f"{obj.id}: cleaned title exceeds {MAX_TITLE_LEN} characters")
            if obj.level is not Level.EDUCATIONAL_CONTENT and not obj.clean_title:
                raise SchemaError(f"{obj.id}: empty title only allowed for EducationalContent")
            if obj.level is Level.JOURNEY and obj.parent_ids:
                raise LevelViolation(f"{obj.id}: Journey objects have no parents")
            for pid in obj.parent_ids:
                parent = self.objects.get(pid)
                if parent is None:
                    raise SchemaError(f"{obj.id}: unknown parent id {pid!r}")
                if parent.level is not obj.level.parent_level:
                    raise LevelViolation(
                        f"{obj.id} ({obj.level.value}) lists {pid} "
                        f"({parent.level.value}) as parent; expected a "
                        f"{obj.level.parent_level.value if obj.level.parent_level else 'nothing'}"
                    )
        self._check_acyclic()

    def _check_acyclic(self):
        # level ordering forbids cycles already; checked independently anyway
        state: dict[str, int] = {}
        for start in self.objects:
            if state.get(start):
                continue
            stack = [(start, iter(self._children[start]))]
            state[start] = 1
            while stack:
                node, it = stack[-1]
                child = next(it, None)
                if child is None:
                    state[node] = 2
                    stack.pop()
                elif state.get(child, 0) == 1:
                    raise SchemaError(f"hierarchy contains a cycle through {child!r}")
                elif state.get(child, 0) == 0:
                    state[child] = 1
                    stack.append((child, iter(self._children[child])))

    def children_of(self, oid: str) -> list[str]:
        return list(self._children[oid])

    def parents_of(self, oid: str) -> tuple[str, ...]:
        return self.objects[oid].parent_ids

    def descendants(self, oid: str) -> set[str]:
        seen: set[str] = set()
        stack = list(self._children[oid])
        while stack:
            node = stack.pop()
            if node not in seen:
                seen.add(node)
                stack.extend(self._children[node])
        return seen

    def journeys_of(self, oid: str) -> frozenset[str]:
        """All Journey ids reachable upward from ``oid`` (itself, for a Journey)."""
        if self.objects[oid].level is Level.JOURNEY:
            return frozenset({oid})
        found: set[str] = set()
        stack = list(self.objects[oid].parent_ids)
        seen: set[str] = set()
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            if self.objects[node].level is Level.JOURNEY:
                found.add(node)
            else:
                stack.extend(self.objects[node].parent_ids)
        return frozenset(found)

    def at_level(self, level: Level) -> list[LearningObject]:
        return [o for o in self.objects.values() if o.level is level]

    def level_counts(self) -> dict[str, int]:
        counts = {level.value: 0 for level in Level}
        for obj in self.objects.values():
            counts[obj.level.value] += 1
        return counts

    def __eq__(self, other):
        return isinstance(other, TaxonomyForest) and self.objects == other.objects

    def __len__(self):
        return len(self.objects)


# --- parsing / serialization -------------------------------------------------


def _record_to_object(record, index: int) -> LearningObject:
    if not isinstance(record, dict):
        raise SchemaError(f"record {index}: expected an object, got {type(record).__name__}")
    where = f"record {index} (id={record.get('id')!r})"
    oid = record.get("id")
    if not isinstance(oid, str) or not oid:
        raise SchemaError(f"{where}: 'id' must be a non-empty string")
    level = record.get("level")
    if not isinstance(level, str):
        raise SchemaError(f"{where}: 'level' must be a string")
    title = record.get("title", "")
    description = record.get("description", "")
    if not isinstance(title, str) or not isinstance(description, str):
        raise SchemaError(f"{where}: 'title' and 'description' must be strings")
    language = record.get("language")
    if language is not None and not (isinstance(language, str) and len(language) == 2):
        raise SchemaError(f"{where}: 'language' must be a two-letter code")
    parents = record.get("parents", [])
    if not isinstance(parents, list) or not all(isinstance(p, str) and p for p in parents):
        raise SchemaError(f"{where}: 'parents' must be a list of non-empty id strings")
    known = {"id", "level", "title", "description", "language", "parents"}
    unknown = set(record) - known
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")
    return LearningObject(
        id=oid,
        level=Level.from_name(level),
        title=title,
        description=description,
        declared_language=language,
        parent_ids=tuple(parents),
    )


def parse_taxonomy(source) -> TaxonomyForest:
    """Parse a dataset document (path, file object, or JSON string) into a forest."""
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, list):
        raise SchemaError(f"top level must be an array of objects, got {type(data).__name__}")
    seen: set[str] = set()
    objects = []
    for i, record in enumerate(data):
        obj = _record_to_object(record, i)
        if obj.id in seen:
            raise DuplicateId(f"record {i}: duplicate object id {obj.id!r}")
        seen.add(obj.id)
        objects.append(obj)
    return TaxonomyForest(objects)


def serialize_taxonomy(forest: TaxonomyForest) -> str:
    """Canonical dataset document: array sorted by id, stable key order."""
    records = []
    for obj in sorted(forest.objects.values(), key=lambda o: o.id):
        record = {
            "id": obj.id,
            "level": obj.level.value,
            "title": obj.title,
            "description": obj.description,
            "parents": list(obj.parent_ids),
        }
        if obj.declared_language is not None:
            record["language"] = obj.declared_language
        records.append(record)
    return json.dumps(records, ensure_ascii=False, indent=2) + "\n"


# --- filtering ----------------------------------------------------------------


def _drop(forest: TaxonomyForest, removed: set[str],
          repoint: dict[str, str] | None = None) -> TaxonomyForest:
    repoint = repoint or {}
    survivors = []
    for obj in forest.objects.values():
        if obj.id in removed:
            continue
        parents = []
        for pid in obj.parent_ids:
            pid = repoint.get(pid, pid)
            if pid not in removed and pid not in parents:
                parents.append(pid)
        survivors.append(
            obj if tuple(parents) == obj.parent_ids
            else LearningObject(obj.id, obj.level, obj.title, obj.description,
                                obj.declared_language, tuple(parents))
        )
    return TaxonomyForest(survivors)


def _pass_no_content(forest: TaxonomyForest) -> tuple[TaxonomyForest, list[str]]:
    """Drop every non-content object whose subtree holds no EducationalContent."""
    has_content: set[str] = set()
    frontier = [o.id for o in forest.objects.values() if o.level is Level.EDUCATIONAL_CONTENT]
    has_content.update(frontier)
    while frontier:
        nxt = []
        for oid in frontier:
            for pid in forest.objects[oid].parent_ids:
                if pid not in has_content:
                    has_content.add(pid)
                    nxt.append(pid)
        frontier = nxt
    removed = {oid for oid in forest.objects if oid not in has_content}
    return _drop(forest, removed), sorted(removed)


def _pass_duplicates(forest: TaxonomyForest) -> tuple[TaxonomyForest, list[str]]:
    """Merge exact duplicates (level + cleaned title + cleaned description).

    The lowest id survives; children of a removed twin are re-pointed to it.
    """
    groups: dict[tuple, list[str]] = {}
    for obj in forest.objects.values():
        groups.setdefault((obj.level, obj.clean_title, obj.clean_description), []).append(obj.id)
    removed: set[str] = set()
    repoint: dict[str, str] = {}
    for ids in groups.values():
        if len(ids) > 1:
            keep, *dups = sorted(ids)
            for dup in dups:
                removed.add(dup)
                repoint[dup] = keep
    return _drop(forest, removed, repoint), sorted(removed)


def _pass_isolated(forest: TaxonomyForest) -> tuple[TaxonomyForest, list[str]]:
    """Drop objects with no hierarchy edges at all (childless Journeys included)."""
    degree = {oid: len(forest.objects[oid].parent_ids) for oid in forest.objects}
    for pid, _ in forest.hierarchy_edges:
        degree[pid] += 1
    removed = {oid for oid, deg in degree.items() if deg == 0}
    return _drop(forest, removed), sorted(removed)


def filter_dataset(forest: TaxonomyForest) -> tuple[TaxonomyForest, FilterReport]:
    """Clean a forest in three fixed passes: no-content, duplicates, isolated.

    Idempotent; an empty forest is a legal result.
    """
    report = FilterReport()
    forest, report.removed_no_content = _pass_no_content(forest)
    report.no_content = len(report.removed_no_content)
    forest, report.removed_duplicates = _pass_duplicates(forest)
    report.duplicates = len(report.removed_duplicates)
    forest, report.removed_isolated = _pass_isolated(forest)
    report.isolated = len(report.removed_isolated)
    return forest, report
