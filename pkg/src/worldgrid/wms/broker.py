"""Resource broker: authorization -> requirements -> data location -> rank.

Candidates come from the broker's information index (primary with failover
to the backup). A candidate survives when the job's VO is authorized at the
CE, the owner holds a grid-mapfile entry there, and the job requirements
evaluate to exactly true. Candidates are ordered by (data-closeness desc,
rank desc, CE id asc); an undefined rank sorts below every defined value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..auth import GridMapfile
from ..datamgmt import LogicalFileName, ReplicaCatalog
from ..errors import BadLfn, NoMatchingResources
from ..infosys import (
    BOOLEAN,
    DirectoryEntry,
    DistinguishedName,
    INTEGER,
    InformationService,
    ObjectClassIs,
    RESOURCE_SCHEMA,
    Scope,
    STRING_LIST,
)
from ..jdl import AttrRef, Expr, JdlDocument, evaluate, is_number, requirements_satisfied
from .lifecycle import Job

DEFAULT_RANK: Expr = AttrRef("other", "FreeCPUs")

EDG_CE_CLASS = "ComputingElement"
GLUE_CE_CLASS = "GlueCE"
EDG_BASE = DistinguishedName.parse("o=grid")
GLUE_BASE = DistinguishedName.parse("o=glue")


@dataclass
class BrokerConfig:
    id: str
    info_primary: str
    info_backup: str
    replica_catalog: str = ""
    glue_aware: bool = False
    strict_data: bool = False
    default_rank: Expr = DEFAULT_RANK
    site: str = ""


@dataclass
class RankedCandidate:
    ce_id: str
    rank: float | None  # None = undefined, below all defined values
    data_close: bool


@dataclass
class MatchResult:
    ranked: list[RankedCandidate] = field(default_factory=list)

    @property
    def chosen(self) -> RankedCandidate:
        return self.ranked[0]


def entry_eval_env(entry: DirectoryEntry) -> dict:
    """Typed attribute map for expression evaluation over a CE entry."""
    env = {}
    for name, values in entry.attributes.items():
        typ = RESOURCE_SCHEMA.attribute_type(name)
        if typ == INTEGER:
            env[name] = int(values[0])
        elif typ == BOOLEAN:
            env[name] = values[0].lower() == "true"
        elif typ == STRING_LIST:
            env[name] = list(values)
        else:
            env[name] = values[0]
    return env


class ResourceBroker:
    def __init__(
        self,
        config: BrokerConfig,
        infosys: InformationService,
        gridmap_lookup: Callable[[str], GridMapfile | None],
        catalog: ReplicaCatalog,
    ):
        self.config = config
        self.infosys = infosys
        self.gridmap_lookup = gridmap_lookup
        self.catalog = catalog

    def ce_entries(self) -> list[DirectoryEntry]:
        top = self.infosys.effective_top(self.config.info_primary, self.config.info_backup)
        if self.config.glue_aware:
            return self.infosys.search(top, GLUE_BASE, Scope.SUBTREE, ObjectClassIs(GLUE_CE_CLASS))
        return self.infosys.search(top, EDG_BASE, Scope.SUBTREE, ObjectClassIs(EDG_CE_CLASS))

    def _data_close(self, entry: DirectoryEntry, jdl: JdlDocument) -> bool:
        if not jdl.input_data:
            return True
        close_ses = set(entry.attr("CloseSEs") or ())
        if not close_ses:
            return False
        for lfn_text in jdl.input_data:
            try:
                lfn = LogicalFileName(lfn_text)
            except BadLfn:
                continue
            for pfn in self.catalog.replicas(lfn):
                if pfn.se in close_ses:
                    return True
        return False

    def match(self, job: Job) -> MatchResult:
        """Rank all eligible CEs for the job.

        CEs recorded in `job.failed_ces` (earlier dispatch failures) are
        skipped, so a re-match never returns to a resource that just
        rejected the job.
        """
        candidates: list[RankedCandidate] = []
        for entry in self.ce_entries():
            ce_id = entry.first("CEId")
            if ce_id is None or ce_id in job.failed_ces:
                continue
            authorized_vos = entry.attr("AuthorizedVOs") or ()
            if job.vo not in authorized_vos:
                continue
            mapfile = self.gridmap_lookup(ce_id)
            if mapfile is None or mapfile.account_for(job.owner) is None:
                continue
            env = entry_eval_env(entry)
            if not requirements_satisfied(job.jdl, env):
                continue
            rank_value = evaluate(job.jdl.rank or self.config.default_rank, job.jdl.eval_env(env))
            rank = float(rank_value) if is_number(rank_value) else None
            candidates.append(RankedCandidate(ce_id, rank, self._data_close(entry, job.jdl)))
        if self.config.strict_data:
            candidates = [c for c in candidates if c.data_close]
        if not candidates:
            raise NoMatchingResources(f"no computing element matches job {job.id}")
        candidates.sort(key=_candidate_sort_key)
        return MatchResult(ranked=candidates)


def _candidate_sort_key(c: RankedCandidate):
    rank_key = -c.rank if c.rank is not None else float("inf")
    return (0 if c.data_close else 1, rank_key, c.ce_id)
