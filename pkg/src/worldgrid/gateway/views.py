"""JSON-shaped views over domain objects, shared by API and CLI."""

from __future__ import annotations

from ..infosys import DirectoryEntry
from ..wms import Job, LBEvent


def job_summary(job: Job) -> dict:
    return {
        "id": job.id,
        "owner": job.owner,
        "vo": job.vo,
        "state": job.state.value,
        "ce": job.assigned_ce,
        "rb": job.rb,
        "direct": job.direct,
        "submitted_at": job.submitted_at,
        "reason": job.reason,
    }


def event_view(event: LBEvent) -> dict:
    return {
        "t": event.t,
        "seq": event.seq,
        "job": event.job_id,
        "component": event.component,
        "from": event.from_state,
        "to": event.to_state,
        "reason": event.reason,
    }


def entry_view(entry: DirectoryEntry) -> dict:
    return {
        "dn": str(entry.dn),
        "objectClasses": list(entry.object_classes),
        "attributes": {k: list(v) for k, v in sorted(entry.attributes.items())},
    }


def pfn_view(pfn) -> dict:
    return {"protocol": pfn.protocol, "se": pfn.se, "path": pfn.path, "size": pfn.size,
            "url": pfn.url()}
