"""Job lifecycle state machine and the logging & bookkeeping event store.

Legal transitions:

    SUBMITTED -> WAITING -> READY -> SCHEDULED -> RUNNING -> DONE_OK | DONE_FAILED
    any non-terminal -> CANCELLED
    WAITING | READY | SCHEDULED -> ABORTED
    SCHEDULED -> WAITING        (gatekeeper down: back for re-match)
    SCHEDULED -> DONE_FAILED    (sandbox staging failed)

Every state change flows through `transition`, which records exactly one
bookkeeping event; replaying a job's event chain must land on its stored
state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..errors import IllegalTransition, UnknownJob
from ..jdl import JdlDocument


class JobState(str, Enum):
    SUBMITTED = "SUBMITTED"
    WAITING = "WAITING"
    READY = "READY"
    SCHEDULED = "SCHEDULED"
    RUNNING = "RUNNING"
    DONE_OK = "DONE_OK"
    DONE_FAILED = "DONE_FAILED"
    ABORTED = "ABORTED"
    CANCELLED = "CANCELLED"


TERMINAL = frozenset(
    {JobState.DONE_OK, JobState.DONE_FAILED, JobState.ABORTED, JobState.CANCELLED}
)

LEGAL_TRANSITIONS: dict[JobState, frozenset[JobState]] = {
    JobState.SUBMITTED: frozenset({JobState.WAITING, JobState.CANCELLED}),
    JobState.WAITING: frozenset({JobState.READY, JobState.ABORTED, JobState.CANCELLED}),
    JobState.READY: frozenset({JobState.SCHEDULED, JobState.ABORTED, JobState.CANCELLED}),
    JobState.SCHEDULED: frozenset(
        {JobState.RUNNING, JobState.WAITING, JobState.DONE_FAILED,
         JobState.ABORTED, JobState.CANCELLED}
    ),
    JobState.RUNNING: frozenset(
        {JobState.DONE_OK, JobState.DONE_FAILED, JobState.CANCELLED}
    ),
}

# component tags on bookkeeping events
UI, RB, JSS, CE = "UI", "RB", "JSS", "CE"


@dataclass
class Job:
    id: str
    owner: str
    vo: str
    jdl: JdlDocument
    jdl_text: str
    rb: str  # broker id, or "" for direct submission
    submitted_at: float
    state: JobState = JobState.SUBMITTED
    assigned_ce: str | None = None  # set exactly from SCHEDULED onwards
    pending_ce: str | None = None  # match outcome carried through READY
    direct: bool = False
    attempts: int = 0
    failed_ces: set[str] = field(default_factory=set)  # excluded on re-match
    input_files: dict[str, int] = field(default_factory=dict)
    output_files: dict[str, int] = field(default_factory=dict)
    reason: str = ""

    @property
    def terminal(self) -> bool:
        return self.state in TERMINAL


@dataclass
class LBEvent:
    t: float
    seq: int
    job_id: str
    component: str  # UI | RB | JSS | CE
    from_state: str  # "-" for informational events
    to_state: str
    reason: str

    def line(self) -> str:
        return (
            f"{self.t:.3f}\t{self.job_id}\t{self.component}\t"
            f"{self.from_state}\t{self.to_state}\t{self.reason}"
        )

    @property
    def is_transition(self) -> bool:
        """True for state changes, including creation (`- -> SUBMITTED`)."""
        return self.to_state != "-"


class LoggingBookkeeping:
    """Append-only, time-nondecreasing event store, one sequence per job."""

    def __init__(self, clock):
        self.clock = clock
        self.events: list[LBEvent] = []
        self._by_job: dict[str, list[LBEvent]] = {}
        self._seq = 0

    def _append(self, job_id, component, from_state, to_state, reason):
        per_job = self._by_job.setdefault(job_id, [])
        if per_job and self.clock.now < per_job[-1].t:
            raise AssertionError("bookkeeping time went backwards")
        self._seq += 1
        event = LBEvent(self.clock.now, self._seq, job_id, component, from_state, to_state, reason)
        self.events.append(event)
        per_job.append(event)
        return event

    def record_created(self, job: Job, component=UI, reason="job accepted"):
        return self._append(job.id, component, "-", JobState.SUBMITTED.value, reason)

    def record_transition(self, job: Job, to_state, component, reason):
        return self._append(job.id, component, job.state.value, to_state.value, reason)

    def info(self, job_id: str, component: str, reason: str):
        """Informational tag: no state change."""
        return self._append(job_id, component, "-", "-", reason)

    def events_for(self, job_id: str) -> list[LBEvent]:
        if job_id not in self._by_job:
            raise UnknownJob(f"no bookkeeping trail for {job_id!r}")
        return list(self._by_job[job_id])

    def replay(self, job_id: str) -> JobState:
        """Fold the job's transition events; raises if the chain is broken."""
        state = None
        for event in self.events_for(job_id):
            if not event.is_transition:
                continue
            if event.from_state == "-" and event.to_state == JobState.SUBMITTED.value:
                state = JobState.SUBMITTED
                continue
            if state is None or event.from_state != state.value:
                raise AssertionError(
                    f"broken chain for {job_id}: at {state}, saw {event.line()!r}"
                )
            state = JobState(event.to_state)
        if state is None:
            raise AssertionError(f"no creation event for {job_id}")
        return state

    def export_text(self) -> str:
        return "".join(e.line() + "\n" for e in self.events)


def transition(lb: LoggingBookkeeping, job: Job, to_state: JobState, component: str, reason: str):
    allowed = LEGAL_TRANSITIONS.get(job.state, frozenset())
    if to_state not in allowed:
        raise IllegalTransition(f"{job.id}: {job.state.value} -> {to_state.value} is not legal")
    lb.record_transition(job, to_state, component, reason)
    job.state = to_state
    if to_state is JobState.WAITING:
        job.assigned_ce = None  # back before the scheduling point
    if to_state is JobState.SCHEDULED:
        job.assigned_ce = job.pending_ce
    if reason:
        job.reason = reason
