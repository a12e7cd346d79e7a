"""Hierarchical information service: per-resource publishers, site and top
aggregating indexes, TTL-gated registration, and filtered search.

Every node owns a small directory of entries it published itself; index
nodes additionally aggregate the views of their registered children while
those registrations are fresh (`last_seen + ttl >= now`). Multiple sources
may publish the same dn: the copy with the latest `published_at` wins, and
on equal timestamps the lexicographically smallest source id wins, so the
final state never depends on load order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

from ..errors import AllIndexesDown, CycleDetected, DuplicateSourceId, UnknownNode
from .filters import MatchAll, QueryFilter
from .model import DirectoryEntry, DistinguishedName, Schema, validate_entry
from .records import format_entries

DEFAULT_TTL = 60.0
DEFAULT_REFRESH_PERIOD = 30.0


class Scope(Enum):
    BASE = "base"
    SUBTREE = "subtree"


class Level(Enum):
    GRIS = "gris"
    SITE_GIIS = "site-giis"
    TOP_GIIS = "top-giis"


@dataclass
class InfoSource:
    """A publisher feeding one node: fixed records or a provider callback."""

    id: str
    entries: list[DirectoryEntry] = field(default_factory=list)
    provider: Callable[[], list[DirectoryEntry]] | None = None
    refresh_period: float = DEFAULT_REFRESH_PERIOD

    def produce(self) -> list[DirectoryEntry]:
        produced = list(self.provider()) if self.provider is not None else list(self.entries)
        for entry in produced:
            entry.source_id = self.id
        return produced


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: list[tuple[DirectoryEntry, str]] = field(default_factory=list)


@dataclass
class IndexNode:
    id: str
    level: Level
    # child id -> (last_seen, ttl)
    registrants: dict[str, tuple[float, float]] = field(default_factory=dict)
    backup_of: str | None = None
    entries: dict[tuple, DirectoryEntry] = field(default_factory=dict)

    def fresh_children(self, now: float) -> list[str]:
        return [
            child
            for child, (last_seen, ttl) in self.registrants.items()
            if last_seen + ttl >= now
        ]


def _wins(challenger: DirectoryEntry, incumbent: DirectoryEntry) -> bool:
    if challenger.published_at != incumbent.published_at:
        return challenger.published_at > incumbent.published_at
    return challenger.source_id < incumbent.source_id


class InformationService:
    """All index nodes of one grid, sharing a schema and a clock."""

    def __init__(self, schema: Schema, clock, reachable: Callable[[str], bool] | None = None):
        self.schema = schema
        self.clock = clock
        self.nodes: dict[str, IndexNode] = {}
        # injected by the fabric; nodes are reachable unless failure windows say otherwise
        self._reachable = reachable or (lambda node_id: True)

    # -- node management -------------------------------------------------

    def add_node(self, node_id: str, level: Level, backup_of: str | None = None) -> IndexNode:
        node = IndexNode(id=node_id, level=level, backup_of=backup_of)
        self.nodes[node_id] = node
        return node

    def node(self, node_id: str) -> IndexNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no such index node {node_id!r}") from None

    # -- ingestion --------------------------------------------------------

    def load_sources(self, node_id: str, sources: Iterable[InfoSource]) -> IngestReport:
        """Replace `node_id` entries with the union of all valid source entries.

        Every source contributes; schema violations are reported per entry
        and never abort the batch.
        """
        node = self.node(node_id)
        sources = list(sources)
        seen_ids = set()
        for src in sources:
            if src.id in seen_ids:
                raise DuplicateSourceId(f"source id {src.id!r} repeated")
            seen_ids.add(src.id)
        report = IngestReport()
        merged: dict[tuple, DirectoryEntry] = {}
        for src in sorted(sources, key=lambda s: s.id):
            for entry in src.produce():
                reasons = validate_entry(entry, self.schema)
                if reasons:
                    report.rejected.append((entry, "; ".join(reasons)))
                    continue
                key = entry.dn.sort_key()
                incumbent = merged.get(key)
                if incumbent is None or _wins(entry, incumbent):
                    merged[key] = entry
                report.accepted += 1
        node.entries = merged
        return report

    def publish(self, node_id: str, entries: Iterable[DirectoryEntry]):
        """Direct publication bypassing source bookkeeping (tests, fixtures)."""
        node = self.node(node_id)
        for entry in entries:
            key = entry.dn.sort_key()
            incumbent = node.entries.get(key)
            if incumbent is None or _wins(entry, incumbent):
                node.entries[key] = entry

    # -- registration hierarchy -------------------------------------------

    def register(self, node_id: str, child_id: str, ttl: float = DEFAULT_TTL):
        node = self.node(node_id)
        child = self.node(child_id)
        if node_id == child_id or node_id in self._transitive_registrants(child):
            raise CycleDetected(f"registering {child_id!r} under {node_id!r} would form a cycle")
        node.registrants[child.id] = (self.clock.now, float(ttl))

    def _transitive_registrants(self, node: IndexNode) -> set[str]:
        seen: set[str] = set()
        stack = list(node.registrants)
        while stack:
            cur = stack.pop()
            if cur in seen or cur not in self.nodes:
                continue
            seen.add(cur)
            stack.extend(self.nodes[cur].registrants)
        return seen

    # -- views and search --------------------------------------------------

    def aggregated_entries(self, node_id: str) -> list[DirectoryEntry]:
        """The node's own entries plus all fresh registrants' views."""
        now = self.clock.now
        merged: dict[tuple, DirectoryEntry] = {}

        def collect(nid: str, trail: frozenset):
            if nid in trail or nid not in self.nodes:
                return
            node = self.nodes[nid]
            for key, entry in node.entries.items():
                incumbent = merged.get(key)
                if incumbent is None or _wins(entry, incumbent):
                    merged[key] = entry
            for child in node.fresh_children(now):
                collect(child, trail | {nid})

        collect(node_id, frozenset())
        return list(merged.values())

    def search(
        self,
        node_id: str,
        base: DistinguishedName,
        scope: Scope = Scope.SUBTREE,
        query: QueryFilter | None = None,
    ) -> list[DirectoryEntry]:
        """Entries under `base` (component-wise dn matching) satisfying `query`."""
        query = query or MatchAll()
        hits = []
        for entry in self.aggregated_entries(node_id):
            if scope is Scope.BASE:
                if entry.dn != base:
                    continue
            elif not entry.dn.is_under(base):
                continue
            if query.matches(entry, self.schema):
                hits.append(entry)
        hits.sort(key=lambda e: e.dn.sort_key())
        return hits

    def effective_top(self, primary_id: str, backup_id: str) -> str:
        """The serving top index: primary when reachable, else the backup."""
        primary = self.node(primary_id)
        backup = self.node(backup_id)
        for node in (primary, backup):
            if node.level is not Level.TOP_GIIS:
                raise UnknownNode(f"{node.id!r} is not a top-level index")
        if self._reachable(primary_id):
            return primary_id
        if self._reachable(backup_id):
            return backup_id
        raise AllIndexesDown(f"neither {primary_id!r} nor {backup_id!r} is reachable")

    def serialize(self, node_id: str) -> str:
        """Deterministic text dump of a node's aggregated view."""
        return format_entries(self.aggregated_entries(node_id))
