"""Time-ordered event queue for the simulator."""
from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

import numpy as np


class Prio(enum.IntEnum):
    # same-time ordering: arrivals and failures first, period boundary before the tick it opens
    ARRIVAL = 0
    FAILURE = 1
    COMPLETION = 2
    MESSAGE = 3
    RECOVERY = 4
    BOUNDARY = 5
    TICK = 6
    UPDATE = 7


@dataclass(order=True)
class Event:
    time: float
    prio: int
    tiebreak: float
    seq: int
    kind: str = field(compare=False)
    data: Any = field(compare=False, default=None)


class CausalityError(RuntimeError):
    pass


class EventQueue:
    """Events pop in (time, priority, sequence) order.

    Passing ``interleave`` (a numpy Generator) randomizes the order of events
    that share a time and priority, which is how tests shake out ordering
    assumptions.
    """

    def __init__(self, interleave: Optional[np.random.Generator] = None):
        self._heap: List[Event] = []
        self._seq = itertools.count()
        self.now = 0.0
        self.interleave = interleave
        self.processed = 0

    def push(self, time: float, prio: Prio, kind: str, data: Any = None) -> Event:
        if time < self.now - 1e-12:
            raise CausalityError(f"event {kind} at {time} scheduled in the past (now={self.now})")
        seq = next(self._seq)
        tb = float(self.interleave.random()) if self.interleave is not None else 0.0
        ev = Event(max(time, self.now), int(prio), tb, seq, kind, data)
        heapq.heappush(self._heap, ev)
        return ev

    def pop(self) -> Event:
        ev = heapq.heappop(self._heap)
        if ev.time < self.now:
            raise CausalityError("event queue went back in time")
        self.now = ev.time
        self.processed += 1
        return ev

    def peek_time(self) -> Optional[float]:
        return self._heap[0].time if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)
