"""Deterministic discrete-event engine.

Events run in (time, insertion-sequence) order; all randomness flows
through the single seeded generator, so a (scenario, seed, command script)
triple always replays to the same event log.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Callable

from ..clock import Clock


@dataclass(order=True)
class _Scheduled:
    t: float
    seq: int
    label: str = field(compare=False)
    action: Callable[[], None] = field(compare=False)


@dataclass
class EventRecord:
    t: float
    seq: int
    label: str

    def line(self) -> str:
        return f"{self.t:.3f}\t{self.seq}\t{self.label}"


class EventQueue:
    def __init__(self, seed: int = 0, start: float = 0.0):
        self.clock = Clock(start)
        self.rng = random.Random(seed)
        self._heap: list[_Scheduled] = []
        self._seq = 0
        self.log: list[EventRecord] = []

    @property
    def now(self) -> float:
        return self.clock.now

    def schedule(self, delay: float, label: str, action: Callable[[], None]) -> None:
        self.schedule_at(self.clock.now + max(0.0, delay), label, action)

    def schedule_at(self, t: float, label: str, action: Callable[[], None]) -> None:
        if t < self.clock.now:
            raise ValueError(f"cannot schedule into the past ({t} < {self.clock.now})")
        self._seq += 1
        heapq.heappush(self._heap, _Scheduled(t, self._seq, label, action))

    def schedule_every(self, period: float, label: str, action: Callable[[], None]) -> None:
        """Recurring event; first firing one period from now."""

        def fire():
            action()
            self.schedule(period, label, fire)

        self.schedule(period, label, fire)

    def advance(self, until: float) -> list[EventRecord]:
        """Process every event with t <= until, then set the clock to until."""
        if until < self.clock.now:
            raise ValueError(f"cannot advance backwards ({until} < {self.clock.now})")
        processed: list[EventRecord] = []
        while self._heap and self._heap[0].t <= until:
            item = heapq.heappop(self._heap)
            self.clock.advance_to(item.t)
            record = EventRecord(item.t, item.seq, item.label)
            self.log.append(record)
            processed.append(record)
            item.action()
        self.clock.advance_to(until)
        return processed

    def run_until_idle(self, horizon: float) -> list[EventRecord]:
        """Drain the queue up to `horizon`; useful for run-to-completion scripts."""
        return self.advance(horizon)

    def log_uniform(self, low: float, high: float) -> float:
        return math.exp(self.rng.uniform(math.log(low), math.log(high)))

    def event_log_text(self) -> str:
        return "".join(r.line() + "\n" for r in self.log)
