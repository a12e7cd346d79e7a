"""Directory data model: RDNs, distinguished names, entries, and schemas.

Attribute and object-class *names* compare case-insensitively (directory
convention); attribute *values* compare exactly. A distinguished name is an
ordered, leaf-first list of RDNs and two DNs are equal only component-wise:
`hostname=grid001` never matches `mds-hostname=grid001`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# attribute value types
STRING = "string"
INTEGER = "integer"
BOOLEAN = "boolean"
STRING_LIST = "list-of-string"

_TYPES = {STRING, INTEGER, BOOLEAN, STRING_LIST}


@dataclass(frozen=True)
class Rdn:
    """One relative distinguished name component, e.g. ceid=host:2119/pbs-long."""

    attribute: str
    value: str

    def __post_init__(self):
        if not self.attribute or not self.attribute.strip():
            raise ValueError("rdn attribute must be non-empty")
        if not self.value:
            raise ValueError("rdn value must be non-empty")
        object.__setattr__(self, "attribute", self.attribute.strip().lower())
        object.__setattr__(self, "value", self.value.strip())

    def __str__(self):
        return f"{self.attribute}={self.value}"


@dataclass(frozen=True)
class DistinguishedName:
    """Ordered leaf-first RDN sequence. Equality is component-wise and exact."""

    components: tuple[Rdn, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("dn must have at least one component")
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def parse(cls, text: str) -> "DistinguishedName":
        parts = [p.strip() for p in text.split(",")]
        rdns = []
        for part in parts:
            if "=" not in part:
                raise ValueError(f"bad rdn {part!r} in dn {text!r}")
            attr, _, value = part.partition("=")
            rdns.append(Rdn(attr, value))
        return cls(tuple(rdns))

    @property
    def leaf(self) -> Rdn:
        return self.components[0]

    def is_under(self, base: "DistinguishedName") -> bool:
        """True iff self equals base or extends it by one or more leaf-side RDNs."""
        n = len(base.components)
        if len(self.components) < n:
            return False
        return self.components[-n:] == base.components

    def __str__(self):
        return ", ".join(str(r) for r in self.components)

    def sort_key(self):
        return tuple((r.attribute, r.value) for r in self.components)


class Schema:
    """Object-class definitions plus attribute typing.

    `object_classes` maps class name to (required, optional) attribute name
    sets; the two sets are disjoint per class and every referenced attribute
    carries a declared type.
    """

    def __init__(self, object_classes, attribute_types):
        self.object_classes = {}
        self.attribute_types = {}
        self._class_index = {}
        self._attr_index = {}
        for name, typ in attribute_types.items():
            if typ not in _TYPES:
                raise ValueError(f"unknown attribute type {typ!r} for {name!r}")
            self.attribute_types[name] = typ
            self._attr_index[name.lower()] = name
        for cls_name, (required, optional) in object_classes.items():
            required = frozenset(required)
            optional = frozenset(optional)
            if required & optional:
                raise ValueError(f"class {cls_name!r}: required/optional overlap")
            for attr in required | optional:
                if attr.lower() not in self._attr_index:
                    raise ValueError(f"class {cls_name!r} references untyped attribute {attr!r}")
            self.object_classes[cls_name] = (required, optional)
            self._class_index[cls_name.lower()] = cls_name

    def has_class(self, name: str) -> bool:
        return name.lower() in self._class_index

    def class_def(self, name: str):
        return self.object_classes[self._class_index[name.lower()]]

    def attribute_type(self, name: str):
        canonical = self._attr_index.get(name.lower())
        return self.attribute_types[canonical] if canonical else None

    def merged(self, other: "Schema") -> "Schema":
        """Combined schema; overlapping names must agree."""
        attrs = dict(self.attribute_types)
        for name, typ in other.attribute_types.items():
            existing = self.attribute_type(name)
            if existing is not None and existing != typ:
                raise ValueError(f"conflicting type for attribute {name!r}")
            attrs.setdefault(name, typ)
        classes = dict(self.object_classes)
        classes.update(other.object_classes)
        return Schema(classes, attrs)


@dataclass
class DirectoryEntry:
    """One published resource description."""

    dn: DistinguishedName
    object_classes: tuple[str, ...]
    attributes: dict[str, list[str]]
    source_id: str = ""
    published_at: float = 0.0

    def attr(self, name: str):
        """Case-insensitive attribute lookup; None when absent."""
        low = name.lower()
        for key, values in self.attributes.items():
            if key.lower() == low:
                return values
        return None

    def has_class(self, name: str) -> bool:
        low = name.lower()
        return any(c.lower() == low for c in self.object_classes)

    def first(self, name: str, default=None):
        values = self.attr(name)
        return values[0] if values else default


def validate_entry(entry: DirectoryEntry, schema: Schema) -> list[str]:
    """All schema-violation reasons for `entry` (empty list means valid)."""
    reasons = []
    if not entry.object_classes:
        reasons.append("no object class declared")
    for cls in entry.object_classes:
        if not schema.has_class(cls):
            reasons.append(f"unknown object class {cls}")
            continue
        required, _ = schema.class_def(cls)
        for attr in sorted(required):
            if entry.attr(attr) is None:
                reasons.append(f"missing required attribute {attr} for class {cls}")
    for name, values in entry.attributes.items():
        typ = schema.attribute_type(name)
        if typ is None:
            reasons.append(f"undeclared attribute {name}")
            continue
        if typ in (STRING, INTEGER, BOOLEAN) and len(values) != 1:
            reasons.append(f"attribute {name} must be single-valued")
        if typ == INTEGER:
            for v in values:
                try:
                    int(v)
                except ValueError:
                    reasons.append(f"attribute {name} value {v!r} is not an integer")
        if typ == BOOLEAN:
            for v in values:
                if v.lower() not in ("true", "false"):
                    reasons.append(f"attribute {name} value {v!r} is not a boolean")
    leaf = entry.dn.leaf
    leaf_values = entry.attr(leaf.attribute)
    if leaf_values is None or leaf.value not in leaf_values:
        reasons.append(f"dn leaf {leaf} not present among attributes")
    return reasons


def _resource_attribute_types():
    return {
        "CEId": STRING,
        "LRMSType": STRING,
        "TotalCPUs": INTEGER,
        "FreeCPUs": INTEGER,
        "RunningJobs": INTEGER,
        "WaitingJobs": INTEGER,
        "RunTimeEnvironment": STRING_LIST,
        "AuthorizedVOs": STRING_LIST,
        "CloseSEs": STRING_LIST,
        "SEId": STRING,
        "TotalBytes": INTEGER,
        "UsedBytes": INTEGER,
        "Protocols": STRING_LIST,
        "mds-vo-name": STRING,
        "o": STRING,
    }


_CE_REQUIRED = ("CEId", "LRMSType", "TotalCPUs", "FreeCPUs", "RunningJobs", "WaitingJobs")
_CE_OPTIONAL = ("RunTimeEnvironment", "AuthorizedVOs", "CloseSEs")
_SE_REQUIRED = ("SEId", "TotalBytes", "UsedBytes")
_SE_OPTIONAL = ("Protocols",)

# The two resource description dialects publish the same attribute set under
# different object-class names (and distinct directory suffixes), so brokers
# can be pointed at either one.
EDG_SCHEMA = Schema(
    {
        "ComputingElement": (_CE_REQUIRED, _CE_OPTIONAL),
        "StorageElement": (_SE_REQUIRED, _SE_OPTIONAL),
    },
    _resource_attribute_types(),
)

GLUE_SCHEMA = Schema(
    {
        "GlueCE": (_CE_REQUIRED, _CE_OPTIONAL),
        "GlueSE": (_SE_REQUIRED, _SE_OPTIONAL),
    },
    _resource_attribute_types(),
)

RESOURCE_SCHEMA = EDG_SCHEMA.merged(GLUE_SCHEMA)

EDG_SUFFIX = "o=grid"
GLUE_SUFFIX = "o=glue"
