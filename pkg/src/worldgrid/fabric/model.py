"""Site fabric model: sites, services, simulated CEs/SEs, connectivity,
bandwidth, and failure-injection windows.

Two site architectures federate here. An EDG-flavor site runs a CE head
node, a separate SE host, and one or more worker nodes. A VDT-flavor site
runs one combined server playing CE and SE at the same time (same published
host) with client nodes acting as workers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from ..auth import Crl, GridFlavor, GridMapfile, SitePolicy
from ..errors import NoSpace, UnknownCe, UnknownSe, UnknownService, UnknownSite

MB = 1_000_000
GB = 1_000_000_000


class ServiceKind(str, Enum):
    GATEKEEPER = "gatekeeper"
    GRIDFTP = "gridftp"
    GRIS = "gris"
    RB = "rb"
    RC = "rc"
    II = "ii"
    CRL = "crl"


@dataclass
class ServiceInstance:
    id: str
    kind: ServiceKind
    site: str
    host: str


@dataclass
class Connectivity:
    wn_outbound: bool = True
    inbound_ports_open: bool = True


@dataclass
class FailureInjection:
    """The named service rejects all interactions during [t_start, t_end)."""

    site: str
    service: str  # service instance id, or a kind name to cover all of that kind
    t_start: float
    t_end: float

    def covers(self, svc: ServiceInstance, now: float) -> bool:
        if svc.site != self.site:
            return False
        if self.service not in (svc.id, svc.kind.value):
            return False
        return self.t_start <= now < self.t_end


@dataclass
class ComputingElementSim:
    """A gatekeeper plus one LRM queue; the unit the broker schedules onto."""

    id: str  # <host>:<port>/<lrms>-<queue>
    site_id: str
    host: str
    lrms: str  # PBS | LSF | Condor
    total_cpus: int
    runtime_environment: list[str] = field(default_factory=list)
    authorized_vos: list[str] = field(default_factory=list)
    close_ses: list[str] = field(default_factory=list)
    queue: deque = field(default_factory=deque)  # (job_id, duration)
    running: dict = field(default_factory=dict)  # job_id -> duration
    completed: int = 0
    cancelled: int = 0
    enqueued_total: int = 0

    @property
    def free_cpus(self) -> int:
        return self.total_cpus - len(self.running)

    @property
    def running_jobs(self) -> int:
        return len(self.running)

    @property
    def waiting_jobs(self) -> int:
        return len(self.queue)

    def drop_job(self, job_id) -> bool:
        """Remove a queued or running job (cancellation)."""
        for item in list(self.queue):
            if item[0] == job_id:
                self.queue.remove(item)
                self.cancelled += 1
                return True
        if job_id in self.running:
            del self.running[job_id]
            self.cancelled += 1
            return True
        return False


@dataclass
class StorageElementSim:
    id: str  # published host
    site_id: str
    total_bytes: int
    protocols: list[str] = field(default_factory=lambda: ["gsiftp"])
    files: dict[str, int] = field(default_factory=dict)  # path -> size

    @property
    def used_bytes(self) -> int:
        return sum(self.files.values())

    def store(self, path: str, size: int):
        previous = self.files.get(path, 0)
        if self.used_bytes - previous + size > self.total_bytes:
            raise NoSpace(f"se {self.id!r} cannot hold {size} more bytes")
        self.files[path] = size

    def remove(self, path: str):
        self.files.pop(path, None)


@dataclass
class Site:
    id: str
    country: str
    continent: str  # EU | US
    coords: tuple[float, float]  # latitude, longitude degrees
    flavor: GridFlavor
    lrms: str
    worker_nodes: int
    connectivity: Connectivity = field(default_factory=Connectivity)
    glue_publishing: bool = False
    supported_vos: list[str] = field(default_factory=list)
    overrides: list[tuple[str, str]] = field(default_factory=list)
    brokerable: bool = True
    os_name: str = ""  # inert metadata
    kerberos_like_local_auth: bool = False  # recorded, deliberately unused
    services: list[ServiceInstance] = field(default_factory=list)
    scratch: dict[str, int] = field(default_factory=dict)  # CE/WN-side files
    gridmap: GridMapfile = field(default_factory=GridMapfile)
    crl_copies: dict[str, Crl] = field(default_factory=dict)

    def policy(self) -> SitePolicy:
        return SitePolicy(supported_vos=list(self.supported_vos), overrides=list(self.overrides))


@dataclass
class BandwidthModel:
    """bytes/second between site pairs; scenario may pin specific pairs."""

    intra_site: float = 100 * MB
    same_continent: float = 50 * MB
    intercontinental: float = 10 * MB
    pair_overrides: dict[tuple[str, str], float] = field(default_factory=dict)

    def rate(self, a: Site, b: Site) -> float:
        key = tuple(sorted((a.id, b.id)))
        if key in self.pair_overrides:
            return self.pair_overrides[key]
        if a.id == b.id:
            return self.intra_site
        if a.continent == b.continent:
            return self.same_continent
        return self.intercontinental


@dataclass(frozen=True)
class Endpoint:
    """A file location usable as replica-transfer source: ui, ce, wn, or se."""

    kind: str
    location: str  # site id for ce/wn, se id for se, ignored for ui
    path: str


class Fabric:
    def __init__(self):
        self.sites: dict[str, Site] = {}
        self.ces: dict[str, ComputingElementSim] = {}
        self.ses: dict[str, StorageElementSim] = {}
        self.services: dict[str, ServiceInstance] = {}
        self.failures: list[FailureInjection] = []
        self.bandwidth = BandwidthModel()
        self.ui_files: dict[str, int] = {}
        self.ui_site: str = ""

    # -- lookups -----------------------------------------------------------

    def site(self, site_id: str) -> Site:
        try:
            return self.sites[site_id]
        except KeyError:
            raise UnknownSite(f"no such site {site_id!r}") from None

    def ce(self, ce_id: str) -> ComputingElementSim:
        try:
            return self.ces[ce_id]
        except KeyError:
            raise UnknownCe(f"no such computing element {ce_id!r}") from None

    def se(self, se_id: str) -> StorageElementSim:
        try:
            return self.ses[se_id]
        except KeyError:
            raise UnknownSe(f"no such storage element {se_id!r}") from None

    def service(self, service_id: str) -> ServiceInstance:
        try:
            return self.services[service_id]
        except KeyError:
            raise UnknownService(f"no such service {service_id!r}") from None

    def add_service(self, service: ServiceInstance) -> ServiceInstance:
        self.services[service.id] = service
        self.site(service.site).services.append(service)
        return service

    # -- failure windows ----------------------------------------------------

    def inject_failure(self, site: str, service: str, t_start: float, t_end: float):
        self.site(site)
        self.failures.append(FailureInjection(site, service, t_start, t_end))

    def service_up(self, service_id: str, now: float) -> bool:
        svc = self.service(service_id)
        return not any(f.covers(svc, now) for f in self.failures)

    def kind_up(self, site_id: str, kind: ServiceKind, now: float) -> bool:
        """True iff every service of `kind` at the site is outside failure windows."""
        found = [s for s in self.site(site_id).services if s.kind is kind]
        return bool(found) and all(self.service_up(s.id, now) for s in found)

    # -- transfers ------------------------------------------------------------

    def transfer_seconds(self, site_a: str, site_b: str, size: int) -> float:
        rate = self.bandwidth.rate(self.site(site_a), self.site(site_b))
        return size / rate if size > 0 else 0.0

    def endpoint_site(self, endpoint: Endpoint) -> str:
        if endpoint.kind == "ui":
            return self.ui_site
        if endpoint.kind == "se":
            return self.se(endpoint.location).site_id
        return self.site(endpoint.location).id

    def endpoint_files(self, endpoint: Endpoint) -> dict[str, int]:
        if endpoint.kind == "ui":
            return self.ui_files
        if endpoint.kind == "se":
            return self.se(endpoint.location).files
        if endpoint.kind in ("ce", "wn"):
            return self.site(endpoint.location).scratch
        raise ValueError(f"unknown endpoint kind {endpoint.kind!r}")
