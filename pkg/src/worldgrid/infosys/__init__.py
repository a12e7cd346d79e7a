"""In-memory hierarchical resource directory with aggregating indexes."""

from .filters import (
    And,
    Cmp,
    Equality,
    MatchAll,
    Not,
    ObjectClassIs,
    Or,
    Presence,
    QueryFilter,
    parse_filter,
)
from .model import (
    BOOLEAN,
    EDG_SCHEMA,
    EDG_SUFFIX,
    GLUE_SCHEMA,
    GLUE_SUFFIX,
    INTEGER,
    RESOURCE_SCHEMA,
    STRING,
    STRING_LIST,
    DirectoryEntry,
    DistinguishedName,
    Rdn,
    Schema,
    validate_entry,
)
from .records import format_entries, format_entry, parse_records
from .service import (
    DEFAULT_REFRESH_PERIOD,
    DEFAULT_TTL,
    IndexNode,
    InformationService,
    InfoSource,
    IngestReport,
    Level,
    Scope,
)

__all__ = [
    "And", "Cmp", "Equality", "MatchAll", "Not", "ObjectClassIs", "Or", "Presence",
    "QueryFilter", "parse_filter",
    "BOOLEAN", "INTEGER", "STRING", "STRING_LIST",
    "EDG_SCHEMA", "GLUE_SCHEMA", "RESOURCE_SCHEMA", "EDG_SUFFIX", "GLUE_SUFFIX",
    "DirectoryEntry", "DistinguishedName", "Rdn", "Schema", "validate_entry",
    "format_entries", "format_entry", "parse_records",
    "DEFAULT_REFRESH_PERIOD", "DEFAULT_TTL",
    "IndexNode", "InformationService", "InfoSource", "IngestReport", "Level", "Scope",
]
