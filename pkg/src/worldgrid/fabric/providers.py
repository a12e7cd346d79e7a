"""Dynamic information providers: fabric state -> directory entries.

Each site publishes its CE and SE descriptions under `o=grid` with the
EDG-style object classes; sites flagged glue-publishing additionally emit
the same attributes under `o=glue` with the GLUE-style classes, so a
GLUE-aware broker sees exactly those sites.
"""

from __future__ import annotations

from ..infosys import DirectoryEntry, DistinguishedName
from .model import Fabric, Site

EDG_SUFFIX = "o=grid"
GLUE_SUFFIX = "o=glue"


def _ce_attributes(ce) -> dict[str, list[str]]:
    attrs = {
        "CEId": [ce.id],
        "LRMSType": [ce.lrms],
        "TotalCPUs": [str(ce.total_cpus)],
        "FreeCPUs": [str(ce.free_cpus)],
        "RunningJobs": [str(ce.running_jobs)],
        "WaitingJobs": [str(ce.waiting_jobs)],
    }
    if ce.runtime_environment:
        attrs["RunTimeEnvironment"] = list(ce.runtime_environment)
    if ce.authorized_vos:
        attrs["AuthorizedVOs"] = list(ce.authorized_vos)
    if ce.close_ses:
        attrs["CloseSEs"] = list(ce.close_ses)
    return attrs


def _se_attributes(se) -> dict[str, list[str]]:
    return {
        "SEId": [se.id],
        "TotalBytes": [str(se.total_bytes)],
        "UsedBytes": [str(se.used_bytes)],
        "Protocols": list(se.protocols),
    }


def site_entries(fabric: Fabric, site: Site, now: float) -> list[DirectoryEntry]:
    """Current resource descriptions for one site, in both dialects."""
    dialects = [(EDG_SUFFIX, "ComputingElement", "StorageElement")]
    if site.glue_publishing:
        dialects.append((GLUE_SUFFIX, "GlueCE", "GlueSE"))
    entries = []
    for suffix, ce_class, se_class in dialects:
        for ce_id in sorted(fabric.ces):
            ce = fabric.ces[ce_id]
            if ce.site_id != site.id:
                continue
            dn = DistinguishedName.parse(f"ceid={ce.id}, mds-vo-name={site.id}, {suffix}")
            entries.append(
                DirectoryEntry(
                    dn=dn,
                    object_classes=(ce_class,),
                    attributes=_ce_attributes(ce),
                    published_at=now,
                )
            )
        for se_id in sorted(fabric.ses):
            se = fabric.ses[se_id]
            if se.site_id != site.id:
                continue
            dn = DistinguishedName.parse(f"seid={se.id}, mds-vo-name={site.id}, {suffix}")
            entries.append(
                DirectoryEntry(
                    dn=dn,
                    object_classes=(se_class,),
                    attributes=_se_attributes(se),
                    published_at=now,
                )
            )
    return entries
