"""Simulated site fabric: models, event engine, scenario files, providers."""

from .build import build_fabric, ce_hostname, ce_identifier, se_hostname
from .events import EventQueue, EventRecord
from .model import (
    BandwidthModel,
    ComputingElementSim,
    Connectivity,
    Endpoint,
    Fabric,
    FailureInjection,
    GB,
    MB,
    ServiceInstance,
    ServiceKind,
    Site,
    StorageElementSim,
)
from .providers import site_entries
from .scenario import (
    BrokerSpec,
    CatalogSpec,
    FailureSpec,
    IndexSpec,
    Scenario,
    SiteSpec,
    UserSpec,
    parse_scenario,
    parse_size,
)

__all__ = [
    "build_fabric", "ce_hostname", "ce_identifier", "se_hostname",
    "EventQueue", "EventRecord",
    "BandwidthModel", "ComputingElementSim", "Connectivity", "Endpoint", "Fabric",
    "FailureInjection", "GB", "MB", "ServiceInstance", "ServiceKind", "Site",
    "StorageElementSim",
    "site_entries",
    "BrokerSpec", "CatalogSpec", "FailureSpec", "IndexSpec", "Scenario",
    "SiteSpec", "UserSpec", "parse_scenario", "parse_size",
]
