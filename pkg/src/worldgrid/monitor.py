"""Operations-center monitoring: probes, tri-state status, map export.

Probe statuses: DOWN exactly when the target service sits inside a
failure-injection window; WARN is reserved for the two stale conditions
(stale CRL copy on the gatekeeper probe, lapsed directory registration on
the gris probe); everything else is UP. Latencies are computed, never
drawn from the shared generator, so monitoring cannot perturb scheduling.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .errors import UnknownFilterValue
from .fabric.model import Fabric, ServiceKind

PROBED_KINDS = (
    ServiceKind.GATEKEEPER,
    ServiceKind.GRIS,
    ServiceKind.GRIDFTP,
    ServiceKind.RB,
    ServiceKind.RC,
)

UP, WARN, DOWN = "UP", "WARN", "DOWN"
_SEVERITY = {UP: 0, WARN: 1, DOWN: 2}
STATUS_COLOR = {UP: "green", WARN: "yellow", DOWN: "red"}

DEFAULT_PROBE_PERIOD = 30.0
DEFAULT_PROBE_TIMEOUT = 5.0
DEFAULT_HISTORY_CAPACITY = 2000


@dataclass
class Probe:
    site: str
    service_id: str
    kind: ServiceKind
    period: float = DEFAULT_PROBE_PERIOD
    timeout: float = DEFAULT_PROBE_TIMEOUT

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("probe period must be positive")


@dataclass
class ProbeResult:
    t: float
    site: str
    service_id: str
    kind: str
    status: str
    latency_ms: float
    detail: str


@dataclass
class ServiceStatus:
    service_id: str
    kind: str
    status: str
    latency_ms: float
    detail: str


@dataclass
class SiteStatus:
    id: str
    coords: tuple[float, float]
    country: str
    continent: str
    services: list[ServiceStatus]
    rollup: str
    metrics: dict[str, float]


@dataclass
class MapSnapshot:
    t: float
    filter_kind: str  # none | vo | country | site
    filter_value: str
    sites: list[SiteStatus] = field(default_factory=list)


class MonitorCenter:
    def __init__(
        self,
        fabric: Fabric,
        clock,
        stale_crl: Callable[[str], bool] = lambda site: False,
        stale_registration: Callable[[str], bool] = lambda site: False,
        period: float = DEFAULT_PROBE_PERIOD,
        timeout: float = DEFAULT_PROBE_TIMEOUT,
        history_capacity: int = DEFAULT_HISTORY_CAPACITY,
    ):
        self.fabric = fabric
        self.clock = clock
        self.stale_crl = stale_crl
        self.stale_registration = stale_registration
        self.period = period
        self.timeout = timeout
        self.history: deque[ProbeResult] = deque(maxlen=history_capacity)
        self.probes: list[Probe] = []
        for site_id in fabric.sites:
            for svc in fabric.sites[site_id].services:
                if svc.kind in PROBED_KINDS:
                    self.probes.append(Probe(site_id, svc.id, svc.kind, period, timeout))

    # -- probing ------------------------------------------------------------

    def _probe_once(self, probe: Probe, now: float) -> ProbeResult:
        if not self.fabric.service_up(probe.service_id, now):
            return ProbeResult(
                now, probe.site, probe.service_id, probe.kind.value,
                DOWN, probe.timeout * 1000.0, "no answer within timeout",
            )
        site = self.fabric.sites[probe.site]
        # ops-center sits in Europe: transatlantic probes pay the long haul
        latency = 30.0 if site.continent == "EU" else 110.0
        latency += 10.0 * self._site_load(probe.site)
        if probe.kind is ServiceKind.GATEKEEPER and self.stale_crl(probe.site):
            return ProbeResult(
                now, probe.site, probe.service_id, probe.kind.value,
                WARN, latency, "stale CRL copy on resource",
            )
        if probe.kind is ServiceKind.GRIS and self.stale_registration(probe.site):
            return ProbeResult(
                now, probe.site, probe.service_id, probe.kind.value,
                WARN, latency, "directory registration expired",
            )
        return ProbeResult(
            now, probe.site, probe.service_id, probe.kind.value, UP, latency, "ok"
        )

    def run_probes(self, now: float | None = None) -> list[ProbeResult]:
        now = self.clock.now if now is None else now
        results = [self._probe_once(probe, now) for probe in self.probes]
        self.history.extend(results)
        return results

    # -- aggregation -----------------------------------------------------------

    def _site_load(self, site_id: str) -> float:
        total = running = 0
        for ce in self.fabric.ces.values():
            if ce.site_id == site_id:
                total += ce.total_cpus
                running += ce.running_jobs
        return running / total if total else 0.0

    def _site_metrics(self, site_id: str) -> dict[str, float]:
        load = self._site_load(site_id)
        used = total = 0
        for se in self.fabric.ses.values():
            if se.site_id == site_id:
                used += se.used_bytes
                total += se.total_bytes
        disk = used / total if total else 0.0
        # synthetic host gauges derived from queue and storage state
        return {
            "load": round(load, 4),
            "memory": round(0.25 + 0.5 * load, 4),
            "swap": round(0.05 + 0.2 * load, 4),
            "disk": round(disk, 6),
            "network": round(0.1 + 0.4 * load, 4),
        }

    def _filtered_sites(self, filter_kind: str, filter_value: str) -> list[str]:
        site_ids = list(self.fabric.sites)
        if filter_kind == "none":
            return site_ids
        if filter_kind == "vo":
            known_vos = set()
            for ce in self.fabric.ces.values():
                known_vos.update(ce.authorized_vos)
            if filter_value not in known_vos:
                raise UnknownFilterValue(f"no site authorizes vo {filter_value!r}")
            return [
                sid
                for sid in site_ids
                if any(
                    filter_value in ce.authorized_vos
                    for ce in self.fabric.ces.values()
                    if ce.site_id == sid
                )
            ]
        if filter_kind == "country":
            if filter_value not in {s.country for s in self.fabric.sites.values()}:
                raise UnknownFilterValue(f"no site in country {filter_value!r}")
            return [sid for sid in site_ids if self.fabric.sites[sid].country == filter_value]
        if filter_kind == "site":
            if filter_value not in self.fabric.sites:
                raise UnknownFilterValue(f"no such site {filter_value!r}")
            return [filter_value]
        raise UnknownFilterValue(f"unknown filter kind {filter_kind!r}")

    def aggregate(self, filter_kind: str = "none", filter_value: str = "") -> MapSnapshot:
        now = self.clock.now
        snapshot = MapSnapshot(t=now, filter_kind=filter_kind, filter_value=filter_value)
        for site_id in self._filtered_sites(filter_kind, filter_value):
            site = self.fabric.sites[site_id]
            services = []
            worst = UP
            for probe in self.probes:
                if probe.site != site_id:
                    continue
                result = self._probe_once(probe, now)
                services.append(
                    ServiceStatus(
                        result.service_id, result.kind, result.status,
                        result.latency_ms, result.detail,
                    )
                )
                if _SEVERITY[result.status] > _SEVERITY[worst]:
                    worst = result.status
            snapshot.sites.append(
                SiteStatus(
                    id=site_id,
                    coords=site.coords,
                    country=site.country,
                    continent=site.continent,
                    services=services,
                    rollup=worst,
                    metrics=self._site_metrics(site_id),
                )
            )
        return snapshot


def export_map(snapshot: MapSnapshot) -> str:
    """Schema-stable JSON document for the portal map page."""
    doc = {
        "t": snapshot.t,
        "filter": {"kind": snapshot.filter_kind, "value": snapshot.filter_value},
        "sites": [
            {
                "id": s.id,
                "lat": s.coords[0],
                "lon": s.coords[1],
                "country": s.country,
                "continent": s.continent,
                "rollup": s.rollup,
                "color": STATUS_COLOR[s.rollup],
                "services": [
                    {
                        "id": svc.service_id,
                        "kind": svc.kind,
                        "status": svc.status,
                        "latency_ms": svc.latency_ms,
                        "detail": svc.detail,
                    }
                    for svc in s.services
                ],
                "metrics": s.metrics,
            }
            for s in snapshot.sites
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_map(text: str) -> MapSnapshot:
    doc = json.loads(text)
    snapshot = MapSnapshot(
        t=doc["t"], filter_kind=doc["filter"]["kind"], filter_value=doc["filter"]["value"]
    )
    for s in doc["sites"]:
        snapshot.sites.append(
            SiteStatus(
                id=s["id"],
                coords=(s["lat"], s["lon"]),
                country=s["country"],
                continent=s["continent"],
                services=[
                    ServiceStatus(
                        svc["id"], svc["kind"], svc["status"], svc["latency_ms"], svc["detail"]
                    )
                    for svc in s["services"]
                ],
                rollup=s["rollup"],
                metrics=s["metrics"],
            )
        )
    return snapshot
