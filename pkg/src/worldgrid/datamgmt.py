"""Replica catalogue and replica manager.

The catalogue maps VO-scoped logical file names to the physical copies
held on storage elements; the manager performs point-to-point copies
between UI/CE/WN endpoints and SEs, registering the result. Worker-node
and CE-head sources need outbound connectivity at their site; copies out
of an SE or the UI never do.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BadLfn,
    ConnectivityDenied,
    NoSpace,
    SourceMissing,
    UnknownLfn,
    UnknownPair,
)
from .fabric.model import Endpoint, Fabric

DEFAULT_PROTOCOL = "gsiftp"


@dataclass(frozen=True)
class LogicalFileName:
    """`lfn:/<vo>/<path>` in a VO-scoped namespace."""

    text: str

    def __post_init__(self):
        if not self.text.startswith("lfn:/"):
            raise BadLfn(f"{self.text!r} does not start with lfn:/")
        rest = self.text[len("lfn:/"):]
        parts = rest.split("/", 1)
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise BadLfn(f"{self.text!r} needs both a vo and a path component")

    @property
    def vo(self) -> str:
        return self.text[len("lfn:/"):].split("/", 1)[0]

    @property
    def path(self) -> str:
        return self.text[len("lfn:/"):].split("/", 1)[1]

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class PhysicalFileName:
    protocol: str
    se: str
    path: str
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("file size must be non-negative")

    def url(self) -> str:
        return f"{self.protocol}://{self.se}{self.path}"


class ReplicaCatalog:
    """Logical name -> set of physical replicas, all of equal size."""

    def __init__(self, catalog_id: str):
        self.id = catalog_id
        # lfn text -> {(se, path): PhysicalFileName}
        self.entries: dict[str, dict[tuple[str, str], PhysicalFileName]] = {}

    def register(self, lfn: LogicalFileName, pfn: PhysicalFileName):
        replicas = self.entries.setdefault(lfn.text, {})
        if replicas:
            existing = next(iter(replicas.values()))
            if existing.size != pfn.size:
                raise BadLfn(
                    f"replica size {pfn.size} differs from {existing.size} for {lfn}"
                )
        replicas[(pfn.se, pfn.path)] = pfn

    def unregister(self, lfn: LogicalFileName, pfn: PhysicalFileName):
        replicas = self.entries.get(lfn.text)
        if not replicas or (pfn.se, pfn.path) not in replicas:
            raise UnknownPair(f"{lfn} is not registered at {pfn.se}:{pfn.path}")
        del replicas[(pfn.se, pfn.path)]
        if not replicas:
            del self.entries[lfn.text]

    def replicas(self, lfn: LogicalFileName) -> list[PhysicalFileName]:
        replicas = self.entries.get(lfn.text, {})
        return [replicas[k] for k in sorted(replicas)]

    def known(self, lfn: LogicalFileName) -> bool:
        return lfn.text in self.entries

    def lfns(self) -> list[str]:
        return sorted(self.entries)

    def dump(self) -> str:
        """`lfn pfn size` triples, sorted, for diffable fixtures."""
        lines = []
        for lfn_text in sorted(self.entries):
            for key in sorted(self.entries[lfn_text]):
                pfn = self.entries[lfn_text][key]
                lines.append(f"{lfn_text} {pfn.url()} {pfn.size}")
        return "".join(line + "\n" for line in lines)


class ReplicaManager:
    """edg-replica-manager analogue bound to one fabric and one catalogue."""

    def __init__(self, fabric: Fabric, catalog: ReplicaCatalog):
        self.fabric = fabric
        self.catalog = catalog

    def _replica_path(self, lfn: LogicalFileName) -> str:
        return f"/data/{lfn.vo}/{lfn.path}"

    def copy_and_register(
        self, source: Endpoint, dest_se: str, lfn: LogicalFileName
    ) -> PhysicalFileName:
        """Copy `source` onto `dest_se` and register it under `lfn`.

        Idempotent when the replica already exists there. The catalogue is
        left untouched by any failure.
        """
        se = self.fabric.se(dest_se)
        files = self.fabric.endpoint_files(source)
        if source.path not in files:
            raise SourceMissing(f"no file {source.path!r} at {source.kind} endpoint")
        size = files[source.path]
        if source.kind in ("wn", "ce"):
            site = self.fabric.site(source.location)
            if not site.connectivity.wn_outbound:
                raise ConnectivityDenied(
                    f"outbound connectivity disabled at site {site.id!r}"
                )
        path = self._replica_path(lfn)
        existing = self.catalog.entries.get(lfn.text, {})
        if (se.id, path) in existing:
            return existing[(se.id, path)]
        if existing:
            first = next(iter(existing.values()))
            if first.size != size:
                raise BadLfn(f"replica size {size} differs from {first.size} for {lfn}")
        self._ensure_fits(se, path, size)
        se.store(path, size)
        pfn = PhysicalFileName(DEFAULT_PROTOCOL, se.id, path, size)
        self.catalog.register(lfn, pfn)
        return pfn

    @staticmethod
    def _ensure_fits(se, path, size):
        if se.used_bytes - se.files.get(path, 0) + size > se.total_bytes:
            raise NoSpace(f"se {se.id!r} cannot hold {size} more bytes")

    def replicate(self, lfn: LogicalFileName, dest_se: str) -> PhysicalFileName:
        """New replica copied from the nearest existing one (same site first)."""
        replicas = self.catalog.replicas(lfn)
        if not replicas:
            raise UnknownLfn(f"{lfn} has no registered replica")
        se = self.fabric.se(dest_se)
        for pfn in replicas:
            if pfn.se == se.id:
                return pfn  # already there
        same_site = [p for p in replicas if self.fabric.se(p.se).site_id == se.site_id]
        source = same_site[0] if same_site else replicas[0]
        self._ensure_fits(se, source.path, source.size)
        se.store(source.path, source.size)
        pfn = PhysicalFileName(DEFAULT_PROTOCOL, se.id, source.path, source.size)
        self.catalog.register(lfn, pfn)
        return pfn

    def list_replicas(self, lfn: LogicalFileName) -> list[PhysicalFileName]:
        return self.catalog.replicas(lfn)

    def unregister(self, lfn: LogicalFileName, pfn: PhysicalFileName):
        self.catalog.unregister(lfn, pfn)
        self.fabric.se(pfn.se).remove(pfn.path)

    def transfer_seconds(self, source: Endpoint, dest_se: str, size: int) -> float:
        src_site = self.fabric.endpoint_site(source)
        dst_site = self.fabric.se(dest_se).site_id
        return self.fabric.transfer_seconds(src_site, dst_site, size)

    def check_consistency(self):
        """Every registered replica exists on its SE with the recorded size."""
        for lfn_text in self.catalog.entries:
            for pfn in self.catalog.entries[lfn_text].values():
                se = self.fabric.se(pfn.se)
                actual = se.files.get(pfn.path)
                if actual != pfn.size:
                    raise AssertionError(
                        f"catalogue/fabric drift: {lfn_text} -> {pfn.url()} "
                        f"(recorded {pfn.size}, on disk {actual})"
                    )
                if se.used_bytes > se.total_bytes:
                    raise AssertionError(f"se {se.id!r} over capacity")
