"""Workload management: broker matchmaking, dispatch, lifecycle bookkeeping."""

from .broker import (
    BrokerConfig,
    DEFAULT_RANK,
    EDG_BASE,
    EDG_CE_CLASS,
    GLUE_BASE,
    GLUE_CE_CLASS,
    MatchResult,
    RankedCandidate,
    ResourceBroker,
    entry_eval_env,
)
from .lifecycle import (
    CE,
    JSS,
    Job,
    JobState,
    LBEvent,
    LEGAL_TRANSITIONS,
    LoggingBookkeeping,
    RB,
    TERMINAL,
    UI,
    transition,
)
from .manager import (
    ACCEPT_DELAY,
    HANDOFF_DELAY,
    MATCH_DELAY,
    MAX_DISPATCH_ATTEMPTS,
    RETRY_DELAY,
    RoundRobinSubmitter,
    WorkloadManager,
)

__all__ = [
    "BrokerConfig", "DEFAULT_RANK", "EDG_BASE", "EDG_CE_CLASS", "GLUE_BASE",
    "GLUE_CE_CLASS", "MatchResult", "RankedCandidate", "ResourceBroker",
    "entry_eval_env",
    "CE", "JSS", "Job", "JobState", "LBEvent", "LEGAL_TRANSITIONS",
    "LoggingBookkeeping", "RB", "TERMINAL", "UI", "transition",
    "ACCEPT_DELAY", "HANDOFF_DELAY", "MATCH_DELAY", "MAX_DISPATCH_ATTEMPTS",
    "RETRY_DELAY", "RoundRobinSubmitter", "WorkloadManager",
]
