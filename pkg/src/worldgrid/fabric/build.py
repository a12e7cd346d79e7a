"""Construct a Fabric from a parsed scenario."""

from __future__ import annotations

from ..auth import GridFlavor
from .model import (
    BandwidthModel,
    ComputingElementSim,
    Connectivity,
    Fabric,
    ServiceInstance,
    ServiceKind,
    Site,
    StorageElementSim,
)
from .scenario import Scenario, SiteSpec

GATEKEEPER_PORT = 2119


def ce_hostname(spec: SiteSpec) -> str:
    # VDT servers act as CE and SE on the same host; EDG sites keep them apart
    return f"grid.{spec.id}.example" if spec.flavor == "VDT" else f"ce.{spec.id}.example"


def se_hostname(spec: SiteSpec) -> str:
    return f"grid.{spec.id}.example" if spec.flavor == "VDT" else f"se.{spec.id}.example"


def ce_identifier(spec: SiteSpec) -> str:
    return f"{ce_hostname(spec)}:{GATEKEEPER_PORT}/{spec.lrms.lower()}-long"


def build_fabric(scenario: Scenario) -> Fabric:
    fabric = Fabric()
    fabric.bandwidth = BandwidthModel(
        intra_site=scenario.bandwidth.intra_site,
        same_continent=scenario.bandwidth.same_continent,
        intercontinental=scenario.bandwidth.intercontinental,
        pair_overrides=dict(scenario.bandwidth.pairs),
    )
    for spec in scenario.sites:
        site = Site(
            id=spec.id,
            country=spec.country,
            continent=spec.continent,
            coords=spec.coords,
            flavor=GridFlavor(spec.flavor),
            lrms=spec.lrms,
            worker_nodes=spec.wns,
            connectivity=Connectivity(
                wn_outbound=spec.wn_outbound, inbound_ports_open=spec.inbound
            ),
            glue_publishing=spec.glue,
            supported_vos=list(spec.vos),
            brokerable=spec.brokerable,
            os_name=spec.os_name,
            kerberos_like_local_auth=spec.kerberos_like_local_auth,
        )
        fabric.sites[site.id] = site
        ce = ComputingElementSim(
            id=ce_identifier(spec),
            site_id=site.id,
            host=ce_hostname(spec),
            lrms=spec.lrms,
            total_cpus=spec.cpus,
            runtime_environment=list(spec.tags),
            authorized_vos=list(spec.vos),
            close_ses=[se_hostname(spec)],
        )
        fabric.ces[ce.id] = ce
        se = StorageElementSim(
            id=se_hostname(spec), site_id=site.id, total_bytes=spec.se_bytes
        )
        fabric.ses[se.id] = se
        for kind, host in (
            (ServiceKind.GATEKEEPER, ce.host),
            (ServiceKind.GRIDFTP, se.id),
            (ServiceKind.GRIS, ce.host),
            (ServiceKind.CRL, ce.host),
        ):
            fabric.add_service(
                ServiceInstance(id=f"{kind.value}.{site.id}", kind=kind, site=site.id, host=host)
            )
    for index in scenario.indexes:
        fabric.add_service(
            ServiceInstance(
                id=index.id, kind=ServiceKind.II, site=index.site,
                host=f"{index.id}.example",
            )
        )
    for broker in scenario.brokers:
        fabric.add_service(
            ServiceInstance(
                id=broker.id, kind=ServiceKind.RB, site=broker.site,
                host=f"{broker.id}.example",
            )
        )
    for catalog in scenario.catalogs:
        fabric.add_service(
            ServiceInstance(
                id=catalog.id, kind=ServiceKind.RC, site=catalog.site,
                host=f"{catalog.id}.example",
            )
        )
    fabric.ui_site = scenario.ui_site or (scenario.sites[0].id if scenario.sites else "")
    for failure in scenario.failures:
        fabric.inject_failure(failure.site, failure.service, failure.t_start, failure.t_end)
    return fabric
