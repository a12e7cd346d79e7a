"""Virtual time. All services read the clock owned by the event engine."""


class Clock:
    """Monotonic virtual seconds, advanced only by the event engine."""

    def __init__(self, start=0.0):
        self.now = float(start)

    def advance_to(self, t):
        if t < self.now:
            raise ValueError(f"clock cannot move backwards ({t} < {self.now})")
        self.now = float(t)
