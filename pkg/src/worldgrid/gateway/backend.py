"""Command backends: the same operations against an in-process simulation
or a remote gateway. Script execution through either backend must produce
identical bookkeeping logs (API/CLI parity).
"""

from __future__ import annotations

import json
import threading
import urllib.parse

from ..datamgmt import LogicalFileName
from ..errors import BadRequest, GridError
from ..fabric.model import Endpoint
from ..monitor import export_map
from ..simulation import Simulation
from .views import entry_view, event_view, job_summary, pfn_view


class LocalBackend:
    """Direct calls into one Simulation; mutations serialized by a lock."""

    def __init__(self, sim: Simulation):
        self.sim = sim
        self.lock = threading.RLock()

    def submit(self, jdl_text: str, user: str, rb: str = "", ce: str = "") -> dict:
        with self.lock:
            if ce:
                job = self.sim.wms.direct_submit(jdl_text, user, ce)
            else:
                job = self.sim.wms.submit(jdl_text, user, rb or self.default_rb())
            return job_summary(job)

    def default_rb(self) -> str:
        if not self.sim.brokers:
            raise BadRequest("no resource broker configured")
        return next(iter(self.sim.brokers))

    def jobs(self, owner: str = "", state: str = "") -> list[dict]:
        from ..wms import JobState

        with self.lock:
            state_filter = JobState(state) if state else None
            found = self.sim.wms.query(owner=owner or None, state=state_filter)
            return [job_summary(j) for j in found]

    def job(self, job_id: str) -> dict:
        with self.lock:
            return job_summary(self.sim.wms.job(job_id))

    def events(self, job_id: str) -> list[dict]:
        with self.lock:
            return [event_view(e) for e in self.sim.lb.events_for(job_id)]

    def output(self, job_id: str) -> dict:
        with self.lock:
            job = self.sim.wms.job(job_id)
            files = [{"name": n, "size": s} for n, s in sorted(job.output_files.items())]
            return {"id": job.id, "state": job.state.value, "files": files}

    def cancel(self, job_id: str) -> dict:
        with self.lock:
            changed = self.sim.wms.cancel(job_id)
            return {"id": job_id, "cancelled": changed,
                    "state": self.sim.wms.job(job_id).state.value}

    def resources(self, schema_class: str = "edg", query: str = "") -> list[dict]:
        with self.lock:
            return [entry_view(e) for e in self.sim.resources(schema_class, query)]

    def replicas(self, lfn: str) -> dict:
        with self.lock:
            found = self.sim.list_replicas(lfn)
            return {"lfn": lfn, "replicas": [pfn_view(p) for p in found]}

    def replica_cp(self, kind: str, location: str, path: str, dest_se: str, lfn: str) -> dict:
        with self.lock:
            pfn = self.sim.replica_manager.copy_and_register(
                Endpoint(kind, location, path), dest_se, LogicalFileName(lfn)
            )
            return pfn_view(pfn)

    def monitor_map(self, filter_kind: str = "none", filter_value: str = "") -> str:
        with self.lock:
            return export_map(self.sim.monitor.aggregate(filter_kind, filter_value))

    def vos(self) -> list[dict]:
        with self.lock:
            return [
                {"name": vo.name, "members": list(vo.members),
                 "signed": sorted(vo.usage_policy_signed)}
                for vo in self.sim.vos.values()
            ]

    def vo_add_member(self, vo: str, subject: str, ca: str = "", serial: int = 0) -> dict:
        with self.lock:
            self.sim.add_vo_member(vo, subject, ca=ca, serial=serial)
            return {"vo": vo, "subject": subject}

    def gridmap(self, site_id: str) -> str:
        with self.lock:
            return self.sim.fabric.site(site_id).gridmap.serialize()

    def brokers(self) -> list[dict]:
        with self.lock:
            return [
                {
                    "id": b.config.id,
                    "glue_aware": b.config.glue_aware,
                    "strict_data": b.config.strict_data,
                    "info_primary": b.config.info_primary,
                    "info_backup": b.config.info_backup,
                    "site": b.config.site,
                }
                for b in self.sim.brokers.values()
            ]

    def advance(self, seconds: float) -> dict:
        with self.lock:
            processed = self.sim.advance(seconds)
            return {"now": self.sim.engine.now, "events": len(processed)}

    def now(self) -> dict:
        with self.lock:
            return {"now": self.sim.engine.now}

    def lb_text(self) -> str:
        with self.lock:
            return self.sim.lb.export_text()

    def event_log_text(self) -> str:
        with self.lock:
            return self.sim.engine.event_log_text()


class HttpError(GridError):
    code = "HttpError"


class HttpBackend:
    """The same command surface, spoken over the /v1 HTTP contract."""

    def __init__(self, base_url: str = "", client=None):
        self.base = base_url.rstrip("/")
        if client is not None:
            self.client = client
        else:
            import httpx

            self.client = httpx.Client(base_url=self.base, timeout=30.0)

    def _check(self, response):
        if response.status_code >= 400:
            try:
                payload = response.json()["error"]
            except Exception:
                raise HttpError(f"HTTP {response.status_code}: {response.text[:200]}") from None
            err = GridError(payload.get("message", ""))
            err.code = payload.get("code", "HttpError")
            err.http_status = response.status_code
            raise err
        return response

    def submit(self, jdl_text, user, rb="", ce=""):
        params = {"user": user}
        if ce:
            params["ce"] = ce
        elif rb:
            params["rb"] = rb
        r = self._check(
            self.client.post("/v1/jobs", params=params, content=jdl_text.encode(),
                             headers={"content-type": "text/plain"})
        )
        return r.json()

    def jobs(self, owner="", state=""):
        params = {}
        if owner:
            params["owner"] = owner
        if state:
            params["state"] = state
        return self._check(self.client.get("/v1/jobs", params=params)).json()["jobs"]

    def job(self, job_id):
        return self._check(self.client.get(f"/v1/jobs/{job_id}")).json()

    def events(self, job_id):
        return self._check(self.client.get(f"/v1/jobs/{job_id}/events")).json()["events"]

    def output(self, job_id):
        return self._check(self.client.get(f"/v1/jobs/{job_id}/output")).json()

    def cancel(self, job_id):
        return self._check(self.client.delete(f"/v1/jobs/{job_id}")).json()

    def resources(self, schema_class="edg", query=""):
        params = {"class": schema_class}
        if query:
            params["query"] = query
        return self._check(self.client.get("/v1/resources", params=params)).json()["resources"]

    def replicas(self, lfn):
        quoted = urllib.parse.quote(lfn, safe="")
        return self._check(self.client.get(f"/v1/replicas/{quoted}")).json()

    def replica_cp(self, kind, location, path, dest_se, lfn):
        body = {
            "source": {"kind": kind, "location": location, "path": path},
            "dest_se": dest_se,
            "lfn": lfn,
        }
        return self._check(self.client.post("/v1/replicas", json=body)).json()

    def monitor_map(self, filter_kind="none", filter_value=""):
        params = {}
        if filter_kind != "none":
            params["filter"] = f"{filter_kind}:{filter_value}"
        r = self._check(self.client.get("/v1/monitor/map", params=params))
        return json.dumps(r.json(), indent=2, sort_keys=True) + "\n"

    def vos(self):
        return self._check(self.client.get("/v1/vos")).json()["vos"]

    def vo_add_member(self, vo, subject, ca="", serial=0):
        body = {"subject": subject, "ca": ca, "serial": serial}
        return self._check(self.client.post(f"/v1/vos/{vo}/members", json=body)).json()

    def gridmap(self, site_id):
        return self._check(self.client.get(f"/v1/gridmap/{site_id}")).text

    def brokers(self):
        return self._check(self.client.get("/v1/brokers")).json()["brokers"]

    def advance(self, seconds):
        return self._check(
            self.client.post("/v1/sim/advance", json={"seconds": seconds})
        ).json()

    def now(self):
        return self._check(self.client.get("/v1/sim/time")).json()

    def lb_text(self):
        return self._check(self.client.get("/v1/logs/lb")).text

    def event_log_text(self):
        return self._check(self.client.get("/v1/logs/events")).text
