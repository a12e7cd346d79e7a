"""Workload management: submission, dispatch, execution tracking, cancel.

The manager drives jobs through the lifecycle on the shared event engine.
Sandbox staging takes size/bandwidth virtual seconds; execution durations
are drawn log-uniformly from the engine's seeded generator at enqueue time.

Connectivity policy at dispatch and completion:
  * input sandbox (broker -> CE) needs the CE site's inbound ports open;
  * output sandbox and replica registration (worker -> out) need the site's
    worker outbound connectivity; failures carry an "outbound" reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..auth import CaRegistry, CertificateRecord, VoRegistry, authenticate, authorize
from ..datamgmt import LogicalFileName, ReplicaManager
from ..errors import (
    BadLfn,
    GatekeeperDown,
    GridError,
    NotAuthorized,
    UnknownBroker,
    UnknownJob,
    VoMembershipError,
)
from ..fabric.events import EventQueue
from ..fabric.model import Endpoint, Fabric, MB, ServiceKind
from ..jdl import parse as parse_jdl
from .broker import MatchResult, ResourceBroker
from .lifecycle import (
    CE,
    JSS,
    Job,
    JobState,
    LoggingBookkeeping,
    RB,
    UI,
    transition,
)

ACCEPT_DELAY = 1.0  # UI -> broker queue
MATCH_DELAY = 1.0  # broker pickup
HANDOFF_DELAY = 1.0  # matched -> handed to submission service
RETRY_DELAY = 5.0
MAX_DISPATCH_ATTEMPTS = 3
DEFAULT_INPUT_FILE_SIZE = 1 * MB
OUTPUT_FILE_MIN, OUTPUT_FILE_MAX = 200_000, 5_000_000
# registered output data is fixed-size so one logical name can gather
# equal-sized replicas from several sites
OUTPUT_DATA_SIZE = 8 * MB

DURATION_MIN_DEFAULT, DURATION_MAX_DEFAULT = 30.0, 600.0


@dataclass
class WorkloadManager:
    engine: EventQueue
    fabric: Fabric
    brokers: dict[str, ResourceBroker]
    replica_manager: ReplicaManager
    vos: dict[str, VoRegistry]
    ca_registry: CaRegistry
    certs: dict[str, CertificateRecord]
    duration_bounds: tuple[float, float] = (DURATION_MIN_DEFAULT, DURATION_MAX_DEFAULT)
    lb: LoggingBookkeeping = None
    jobs: dict[str, Job] = field(default_factory=dict)
    _counter: int = 0

    def __post_init__(self):
        if self.lb is None:
            self.lb = LoggingBookkeeping(self.engine.clock)

    # -- submission ---------------------------------------------------------

    def _new_job(self, jdl_text: str, owner: str, rb: str, direct: bool) -> Job:
        doc = parse_jdl(jdl_text)
        vo = self.vos.get(doc.virtual_organisation)
        if vo is None or owner not in vo.members:
            raise VoMembershipError(
                f"{owner!r} is not a member of vo {doc.virtual_organisation!r}"
            )
        self._counter += 1
        job = Job(
            id=f"job{self._counter:05d}",
            owner=owner,
            vo=doc.virtual_organisation,
            jdl=doc,
            jdl_text=jdl_text,
            rb=rb,
            submitted_at=self.engine.now,
            direct=direct,
        )
        # capture the input sandbox; absent UI files appear with a stock size
        for name in doc.input_sandbox:
            size = self.fabric.ui_files.setdefault(name, DEFAULT_INPUT_FILE_SIZE)
            job.input_files[name] = size
        self.jobs[job.id] = job
        self.lb.record_created(job)
        job.reason = "job accepted"
        return job

    def submit(self, jdl_text: str, owner: str, rb_id: str) -> Job:
        if rb_id not in self.brokers:
            raise UnknownBroker(f"no such resource broker {rb_id!r}")
        job = self._new_job(jdl_text, owner, rb_id, direct=False)
        self.engine.schedule(ACCEPT_DELAY, f"rb-accept {job.id}", lambda: self._accept(job))
        return job

    def direct_submit(self, jdl_text: str, owner: str, ce_id: str) -> Job:
        ce = self.fabric.ce(ce_id)
        if ce.authorized_vos:
            doc = parse_jdl(jdl_text)
            if doc.virtual_organisation not in ce.authorized_vos:
                raise NotAuthorized(
                    f"vo {doc.virtual_organisation!r} is not authorized at {ce_id!r}"
                )
        job = self._new_job(jdl_text, owner, "", direct=True)
        job.pending_ce = ce_id
        if not self.fabric.kind_up(ce.site_id, ServiceKind.GATEKEEPER, self.engine.now):
            transition(self.lb, job, JobState.WAITING, UI, f"direct submission to {ce_id}")
            transition(self.lb, job, JobState.ABORTED, JSS, f"gatekeeper down at {ce.site_id}")
            raise GatekeeperDown(f"gatekeeper at {ce.site_id!r} is failure-injected")
        self.engine.schedule(ACCEPT_DELAY, f"direct-accept {job.id}", lambda: self._accept(job))
        return job

    def _accept(self, job: Job):
        if job.state is not JobState.SUBMITTED:
            return
        if job.direct:
            transition(self.lb, job, JobState.WAITING, UI, f"direct submission to {job.pending_ce}")
        else:
            transition(self.lb, job, JobState.WAITING, RB, "accepted for matchmaking")
        self.engine.schedule(MATCH_DELAY, f"match {job.id}", lambda: self._match_attempt(job))

    # -- matchmaking ----------------------------------------------------------

    def _match_attempt(self, job: Job):
        if job.state is not JobState.WAITING:
            return
        if job.direct:
            transition(self.lb, job, JobState.READY, JSS, f"direct route to {job.pending_ce}")
        else:
            broker = self.brokers[job.rb]
            try:
                result: MatchResult = broker.match(job)
            except GridError as exc:
                transition(self.lb, job, JobState.ABORTED, RB, f"{exc.code}: {exc.message}")
                return
            chosen = result.chosen
            job.pending_ce = chosen.ce_id
            rank_text = "undefined" if chosen.rank is None else f"{chosen.rank:g}"
            transition(
                self.lb, job, JobState.READY, RB,
                f"matched {chosen.ce_id} rank={rank_text} data_close={str(chosen.data_close).lower()}",
            )
        self.engine.schedule(HANDOFF_DELAY, f"handoff {job.id}", lambda: self._handoff(job))

    def _handoff(self, job: Job):
        if job.state is not JobState.READY:
            return
        transition(self.lb, job, JobState.SCHEDULED, JSS, f"handed over for {job.pending_ce}")
        self._dispatch(job)

    # -- dispatch and execution -------------------------------------------------

    def _retry_or_abort(self, job: Job, reason: str):
        if job.assigned_ce and not job.direct:
            job.failed_ces.add(job.assigned_ce)
        if job.attempts >= MAX_DISPATCH_ATTEMPTS:
            transition(self.lb, job, JobState.ABORTED, JSS, f"{reason}; retries exhausted")
            return
        transition(self.lb, job, JobState.WAITING, JSS, f"{reason}; re-match")
        self.engine.schedule(RETRY_DELAY, f"match {job.id}", lambda: self._match_attempt(job))

    def _dispatch(self, job: Job):
        if job.state is not JobState.SCHEDULED:
            return
        job.attempts += 1
        ce = self.fabric.ce(job.assigned_ce)
        site = self.fabric.site(ce.site_id)
        now = self.engine.now
        if not self.fabric.kind_up(site.id, ServiceKind.GATEKEEPER, now):
            self._retry_or_abort(job, f"GatekeeperDown: gatekeeper down at {site.id}")
            return
        try:
            subject = authenticate(
                self.certs[job.owner], site.flavor, now, site.crl_copies.values(), self.ca_registry
            )
            authorize(subject, site.gridmap)
        except KeyError:
            transition(self.lb, job, JobState.ABORTED, JSS, f"no certificate for {job.owner}")
            return
        except GridError as exc:
            self._retry_or_abort(job, f"{exc.code} at {site.id}")
            return
        if not site.connectivity.inbound_ports_open:
            transition(
                self.lb, job, JobState.DONE_FAILED, JSS,
                f"inbound: sandbox staging to {site.id} refused",
            )
            return
        staging_from = self._staging_site(job)
        in_bytes = sum(job.input_files.values())
        dt = self.fabric.transfer_seconds(staging_from, site.id, in_bytes)
        self.engine.schedule(dt, f"enqueue {job.id}", lambda: self._enqueue(job, ce))

    def _staging_site(self, job: Job) -> str:
        if job.direct or job.rb not in self.brokers:
            return self.fabric.ui_site
        broker_site = self.brokers[job.rb].config.site
        return broker_site or self.fabric.ui_site

    def _enqueue(self, job: Job, ce):
        if job.state is not JobState.SCHEDULED or job.assigned_ce != ce.id:
            return
        site = self.fabric.site(ce.site_id)
        for name, size in job.input_files.items():
            site.scratch[f"{job.id}/{name}"] = size
        low, high = self.duration_bounds
        duration = self.engine.log_uniform(low, high)
        ce.queue.append((job.id, duration))
        ce.enqueued_total += 1
        self.lb.info(job.id, CE, f"enqueued on {ce.id} waiting={ce.waiting_jobs}")
        self._try_start(ce)

    def _try_start(self, ce):
        while ce.queue and ce.free_cpus > 0:
            job_id, duration = ce.queue.popleft()
            job = self.jobs[job_id]
            if job.state is not JobState.SCHEDULED:
                continue
            ce.running[job_id] = duration
            transition(self.lb, job, JobState.RUNNING, CE, f"started on {ce.id}")
            self.engine.schedule(
                duration, f"complete {job_id}", lambda j=job, c=ce: self._complete(j, c)
            )

    def _complete(self, job: Job, ce):
        if job.id not in ce.running or job.state is not JobState.RUNNING:
            return
        del ce.running[job.id]
        ce.completed += 1
        self._try_start(ce)
        site = self.fabric.site(ce.site_id)
        # worker-side output files materialize regardless of connectivity
        outputs = {}
        for name in job.jdl.output_sandbox:
            size = int(self.engine.log_uniform(OUTPUT_FILE_MIN, OUTPUT_FILE_MAX))
            site.scratch[f"{job.id}/{name}"] = size
            outputs[name] = size
        if not site.connectivity.wn_outbound:
            transition(
                self.lb, job, JobState.DONE_FAILED, JSS,
                f"outbound connectivity disabled at {site.id}: output staging failed",
            )
            return
        failure = self._publish_output_data(job, ce, site)
        if failure:
            transition(self.lb, job, JobState.DONE_FAILED, JSS, failure)
            return
        out_bytes = sum(outputs.values())
        dt = self.fabric.transfer_seconds(site.id, self._staging_site(job), out_bytes)
        self.engine.schedule(
            dt, f"stage-out {job.id}", lambda: self._finish_ok(job, outputs)
        )

    def _publish_output_data(self, job: Job, ce, site) -> str | None:
        """Store declared output data on the close SE and register replicas."""
        lfns = _output_data_lfns(job)
        if not lfns:
            return None
        close = ce.close_ses[0] if ce.close_ses else None
        if close is None:
            return f"no close storage element at {site.id} for output data"
        for lfn_text in lfns:
            try:
                lfn = LogicalFileName(lfn_text)
                scratch_path = f"{job.id}/output.dat"
                site.scratch.setdefault(scratch_path, OUTPUT_DATA_SIZE)
                self.replica_manager.copy_and_register(
                    Endpoint("wn", site.id, scratch_path), close, lfn
                )
                self.lb.info(job.id, JSS, f"registered {lfn_text} on {close}")
            except GridError as exc:
                return f"output registration failed: {exc.code}"
        return None

    def _finish_ok(self, job: Job, outputs: dict[str, int]):
        if job.state is not JobState.RUNNING:
            return
        job.output_files = dict(outputs)
        transition(self.lb, job, JobState.DONE_OK, JSS, "output sandbox retrieved")

    # -- cancel / queries -----------------------------------------------------

    def cancel(self, job_id: str) -> bool:
        job = self.job(job_id)
        if job.terminal:
            return False
        if job.assigned_ce:
            self.fabric.ce(job.assigned_ce).drop_job(job.id)
        ce_for_restart = job.assigned_ce
        transition(self.lb, job, JobState.CANCELLED, UI, "cancelled by user")
        if ce_for_restart:
            self._try_start(self.fabric.ce(ce_for_restart))
        return True

    def job(self, job_id: str) -> Job:
        try:
            return self.jobs[job_id]
        except KeyError:
            raise UnknownJob(f"no such job {job_id!r}") from None

    def query(self, owner: str | None = None, state: JobState | None = None) -> list[Job]:
        out = []
        for job_id in sorted(self.jobs):
            job = self.jobs[job_id]
            if owner is not None and job.owner != owner:
                continue
            if state is not None and job.state is not state:
                continue
            out.append(job)
        return out


class RoundRobinSubmitter:
    """Client-side helper for brokerless submission: cycle over a CE list.

    This mirrors how sites without a broker spread work; it sits outside
    the broker on purpose.
    """

    def __init__(self, wms: WorkloadManager, ce_ids):
        if not ce_ids:
            raise ValueError("round-robin needs at least one computing element")
        self.wms = wms
        self.ce_ids = list(ce_ids)
        self._next = 0

    def submit(self, jdl_text: str, owner: str) -> Job:
        ce_id = self.ce_ids[self._next % len(self.ce_ids)]
        self._next += 1
        return self.wms.direct_submit(jdl_text, owner, ce_id)


def _output_data_lfns(job: Job) -> list[str]:
    for name, value in job.jdl.self_env().items():
        if name.lower() == "outputdata":
            if isinstance(value, str):
                return [value]
            if isinstance(value, list):
                return [v for v in value if isinstance(v, str)]
    return []
