"""Line-oriented source record format (ldif-like).

One record:

    dn: ceid=ce.bologna.example:2119/pbs-long, mds-vo-name=bologna, o=grid
    objectClass: ComputingElement
    CEId: ce.bologna.example:2119/pbs-long
    FreeCPUs: 4

Records are blank-line separated; repeated attribute lines build
multi-valued attributes.
"""

from __future__ import annotations

from .model import DirectoryEntry, DistinguishedName


def parse_records(text: str, source_id: str = "", published_at: float = 0.0) -> list[DirectoryEntry]:
    entries = []
    block: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip():
            if block:
                entries.append(_parse_block(block, source_id, published_at))
                block = []
            continue
        if line.lstrip().startswith("#"):
            continue
        block.append((lineno, line))
    if block:
        entries.append(_parse_block(block, source_id, published_at))
    return entries


def _parse_block(block, source_id, published_at) -> DirectoryEntry:
    dn = None
    classes: list[str] = []
    attributes: dict[str, list[str]] = {}
    for lineno, line in block:
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected 'name: value', got {line!r}")
        name, _, value = line.partition(":")
        name = name.strip()
        value = value.strip()
        if name.lower() == "dn":
            if dn is not None:
                raise ValueError(f"line {lineno}: duplicate dn line")
            dn = DistinguishedName.parse(value)
        elif name.lower() == "objectclass":
            classes.append(value)
        else:
            attributes.setdefault(name, []).append(value)
    if dn is None:
        raise ValueError(f"line {block[0][0]}: record without dn line")
    return DirectoryEntry(
        dn=dn,
        object_classes=tuple(classes),
        attributes=attributes,
        source_id=source_id,
        published_at=published_at,
    )


def format_entry(entry: DirectoryEntry) -> str:
    lines = [f"dn: {entry.dn}"]
    lines.extend(f"objectClass: {c}" for c in entry.object_classes)
    for name in sorted(entry.attributes, key=str.lower):
        for value in entry.attributes[name]:
            lines.append(f"{name}: {value}")
    return "\n".join(lines)


def format_entries(entries) -> str:
    """Deterministic dump: entries sorted by dn, blank-line separated."""
    blocks = [format_entry(e) for e in sorted(entries, key=lambda e: e.dn.sort_key())]
    return "\n\n".join(blocks) + ("\n" if blocks else "")
