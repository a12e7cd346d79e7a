"""Composition root: one scenario + one seed = one reproducible testbed run.

Wires the fabric to the information hierarchy (per-site publishers, site
indexes, redundant top indexes), the authorization chain (CAs, CRL crons,
VO registries, per-site grid-mapfiles), the replica catalogue, the brokers
and workload manager, and the monitoring center. All periodic behavior
(publisher refresh, registrations, CRL updates, probes) runs as events on
the single deterministic engine.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path

from .auth import (
    CaRegistry,
    CertificateAuthority,
    CertificateRecord,
    VoRegistry,
    mkgridmap,
    refresh_crls,
)
from .datamgmt import LogicalFileName, ReplicaCatalog, ReplicaManager
from .errors import UnknownBroker, UnknownVo
from .fabric import (
    EventQueue,
    Fabric,
    Scenario,
    ServiceKind,
    build_fabric,
    parse_scenario,
    site_entries,
)
from .infosys import (
    DistinguishedName,
    InformationService,
    InfoSource,
    Level,
    RESOURCE_SCHEMA,
    Scope,
    parse_filter,
)
from .monitor import MonitorCenter
from .wms import BrokerConfig, ResourceBroker, WorkloadManager

EDG_BASE = DistinguishedName.parse("o=grid")
GLUE_BASE = DistinguishedName.parse("o=glue")


def builtin_scenario_path(name: str = "worldgrid.scenario") -> Path:
    return Path(str(importlib.resources.files("worldgrid").joinpath("scenarios", name)))


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


class Simulation:
    def __init__(self, scenario: Scenario, seed: int = 0):
        self.scenario = scenario
        self.engine = EventQueue(seed)
        self.fabric: Fabric = build_fabric(scenario)

        # certificate authorities and trust
        self.cas = {
            ca_id: CertificateAuthority(ca_id, crl_validity=validity)
            for ca_id, validity in scenario.cas.items()
        }
        edg_cas = [ca_id for ca_id in scenario.cas if ca_id != "globus"]
        self.ca_registry = CaRegistry.worldgrid_default(edg_cas=edg_cas)

        # virtual organizations and member certificates
        self.vos: dict[str, VoRegistry] = {}
        self.certs: dict[str, CertificateRecord] = {}
        lifetime = scenario.default("cert_lifetime", 1e8)
        for vo_name, members in scenario.vos.items():
            vo = VoRegistry(vo_name)
            for user in members:
                vo.add_member(user.subject, signed=user.signed)
                self.certs[user.subject] = CertificateRecord(
                    user.subject, user.ca, user.serial, 0.0, lifetime
                )
            self.vos[vo_name] = vo

        self._crl_period = scenario.default("crl_refresh_period", 300.0)
        for ca in self.cas.values():
            ca.issue_crl(self.engine.now)
        self.regenerate_gridmaps()
        self._refresh_site_crls()

        # replica catalogues
        self.catalogs = {spec.id: ReplicaCatalog(spec.id) for spec in scenario.catalogs}
        if not self.catalogs:
            self.catalogs["rc-default"] = ReplicaCatalog("rc-default")
        self.default_catalog = next(iter(self.catalogs.values()))
        self.replica_manager = ReplicaManager(self.fabric, self.default_catalog)

        # information hierarchy
        self.infosys = InformationService(
            RESOURCE_SCHEMA, self.engine.clock, reachable=self._index_reachable
        )
        self._ttl = scenario.default("registration_ttl", 60.0)
        self._refresh_period = scenario.default("refresh_period", 30.0)
        for index in scenario.indexes:
            self.infosys.add_node(index.id, Level.TOP_GIIS, backup_of=index.backup_of or None)
        primaries = [i.id for i in scenario.indexes if not i.backup_of]
        backups = [i.id for i in scenario.indexes if i.backup_of]
        self.primary_index = primaries[0] if primaries else ""
        self.backup_index = backups[0] if backups else self.primary_index
        for site_id, site in self.fabric.sites.items():
            if not site.brokerable:
                continue
            self.infosys.add_node(f"gris.{site_id}", Level.GRIS)
            self.infosys.add_node(f"giis.{site_id}", Level.SITE_GIIS)
        self._refresh_infosys()

        # brokers and workload management
        self.brokers: dict[str, ResourceBroker] = {}
        for spec in scenario.brokers:
            catalog = self.catalogs.get(spec.replica_catalog, self.default_catalog)
            config = BrokerConfig(
                id=spec.id,
                info_primary=spec.info_primary or self.primary_index,
                info_backup=spec.info_backup or self.backup_index,
                replica_catalog=catalog.id,
                glue_aware=spec.glue_aware,
                strict_data=spec.strict_data,
                site=spec.site,
            )
            self.brokers[spec.id] = ResourceBroker(
                config, self.infosys, self._gridmap_for_ce, catalog
            )
        bounds = (
            scenario.default("job_duration_min", 30.0),
            scenario.default("job_duration_max", 600.0),
        )
        self.wms = WorkloadManager(
            engine=self.engine,
            fabric=self.fabric,
            brokers=self.brokers,
            replica_manager=self.replica_manager,
            vos=self.vos,
            ca_registry=self.ca_registry,
            certs=self.certs,
            duration_bounds=bounds,
        )

        # monitoring
        self.monitor = MonitorCenter(
            self.fabric,
            self.engine.clock,
            stale_crl=self._site_has_stale_crl,
            stale_registration=self._site_has_stale_registration,
            period=scenario.default("probe_period", 30.0),
            timeout=scenario.default("probe_timeout", 5.0),
        )

        # recurring maintenance
        self.engine.schedule_every(self._refresh_period, "infosys-refresh", self._refresh_infosys)
        self.engine.schedule_every(self._crl_period, "crl-cron", self._crl_cron)
        self.engine.schedule_every(self.monitor.period, "probes", self.monitor.run_probes)

    # -- wiring callbacks ------------------------------------------------------

    def _index_reachable(self, node_id: str) -> bool:
        if node_id in self.fabric.services:
            return self.fabric.service_up(node_id, self.engine.now)
        return True

    def _gridmap_for_ce(self, ce_id: str):
        ce = self.fabric.ces.get(ce_id)
        if ce is None:
            return None
        return self.fabric.sites[ce.site_id].gridmap

    def _site_has_stale_crl(self, site_id: str) -> bool:
        site = self.fabric.sites[site_id]
        now = self.engine.now
        for ca_id in self.cas:
            crl = site.crl_copies.get(ca_id)
            if crl is None or not crl.is_fresh(now):
                return True
        return False

    def _site_has_stale_registration(self, site_id: str) -> bool:
        giis_id = f"giis.{site_id}"
        if giis_id not in self.infosys.nodes:
            return False
        now = self.engine.now
        giis = self.infosys.nodes[giis_id]
        for last_seen, ttl in giis.registrants.values():
            if last_seen + ttl < now:
                return True
        for index in (self.primary_index, self.backup_index):
            node = self.infosys.nodes.get(index)
            if node and giis_id in node.registrants:
                last_seen, ttl = node.registrants[giis_id]
                if last_seen + ttl < now:
                    return True
        return False

    # -- recurring maintenance ---------------------------------------------------

    def _refresh_infosys(self):
        """Publishers reload from fabric state and registrations are re-upped."""
        for site_id, site in self.fabric.sites.items():
            if not site.brokerable:
                continue
            gris_id = f"gris.{site_id}"
            giis_id = f"giis.{site_id}"
            if not self.fabric.kind_up(site_id, ServiceKind.GRIS, self.engine.now):
                continue
            source = InfoSource(
                id=f"ip.{site_id}",
                provider=lambda s=site: site_entries(self.fabric, s, self.engine.now),
                refresh_period=self._refresh_period,
            )
            self.infosys.load_sources(gris_id, [source])
            self.infosys.register(giis_id, gris_id, ttl=self._ttl)
            for index in self.scenario.indexes:
                self.infosys.register(index.id, giis_id, ttl=self._ttl)

    def _refresh_site_crls(self):
        now = self.engine.now
        for site_id, site in self.fabric.sites.items():
            crl_service = f"crl.{site_id}"
            up = (
                self.fabric.service_up(crl_service, now)
                if crl_service in self.fabric.services
                else True
            )
            refresh_crls(
                site.crl_copies,
                [self.cas[ca_id] for ca_id in sorted(self.cas)],
                now,
                fetch_ok=lambda ca_id, ok=up: ok,
            )

    def _crl_cron(self):
        now = self.engine.now
        for ca in self.cas.values():
            # reissue early enough that healthy fetch timelines never go stale
            if ca.current_crl is None or now + 2 * self._crl_period > ca.current_crl.next_update:
                ca.issue_crl(now)
        self._refresh_site_crls()

    def regenerate_gridmaps(self):
        vo_list = list(self.vos.values())
        for site in self.fabric.sites.values():
            site.gridmap = mkgridmap(vo_list, site.policy())

    # -- operations used by gateway/cli -------------------------------------------

    def advance(self, seconds: float):
        return self.engine.advance(self.engine.now + float(seconds))

    def resources(self, schema_class: str = "edg", query: str = ""):
        base = GLUE_BASE if schema_class.lower() == "glue" else EDG_BASE
        flt = parse_filter(query) if query else None
        top = self.infosys.effective_top(self.primary_index, self.backup_index)
        return self.infosys.search(top, base, Scope.SUBTREE, flt)

    def list_replicas(self, lfn_text: str):
        return self.replica_manager.list_replicas(LogicalFileName(lfn_text))

    def vo(self, name: str) -> VoRegistry:
        try:
            return self.vos[name]
        except KeyError:
            raise UnknownVo(f"no such vo {name!r}") from None

    def add_vo_member(self, vo_name: str, subject: str, ca: str = "", serial: int = 0, signed=True):
        vo = self.vo(vo_name)
        vo.add_member(subject, signed=signed)
        if subject not in self.certs:
            lifetime = self.scenario.default("cert_lifetime", 1e8)
            ca_id = ca or sorted(self.cas)[0]
            serial = serial or (9000 + len(self.certs))
            self.certs[subject] = CertificateRecord(subject, ca_id, serial, 0.0, lifetime)
        self.regenerate_gridmaps()

    def broker(self, rb_id: str) -> ResourceBroker:
        try:
            return self.brokers[rb_id]
        except KeyError:
            raise UnknownBroker(f"no such resource broker {rb_id!r}") from None

    @property
    def lb(self):
        return self.wms.lb


def build_simulation(scenario_path: str | Path, seed: int = 0) -> Simulation:
    return Simulation(load_scenario(scenario_path), seed=seed)
