"""Adaptive feedback desire computation for sub-jobs.

Each job manager asks for ``d(q)`` containers for period ``q`` given how the
previous period went: its desire, what the data-center scheduler granted, the
average container utilization, and whether any task had to wait.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from .model import SchedulerParams


class PeriodClass(str, enum.Enum):
    INEFFICIENT = "inefficient"
    EFFICIENT_DEPRIVED = "efficient-deprived"
    EFFICIENT_SATISFIED = "efficient-satisfied"


@dataclass(frozen=True)
class PeriodRecord:
    q: int
    desire: int
    allocation: int
    utilization: float
    had_waiting_tasks: bool

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("period index starts at 1")
        if self.desire < 1:
            raise ValueError("desire must be at least 1")
        if not 0 <= self.allocation <= self.desire:
            raise ValueError("allocation must be in [0, desire]")
        if not 0.0 <= self.utilization <= 1.0 + 1e-9:
            raise ValueError("utilization must be in [0, 1]")


def classify_period(rec: PeriodRecord, delta: float) -> PeriodClass:
    if rec.utilization < delta and not rec.had_waiting_tasks:
        return PeriodClass.INEFFICIENT
    if rec.desire > rec.allocation:
        return PeriodClass.EFFICIENT_DEPRIVED
    return PeriodClass.EFFICIENT_SATISFIED


def next_desire(prev: Optional[PeriodRecord], params: SchedulerParams, max_containers: Optional[int] = None) -> int:
    """Desire for the next period.

    ``prev`` is None for the first period of a job manager.  The raw value is
    rounded up and clamped to ``[1, max_containers]``.
    """
    if prev is None:
        raw = 1.0
    else:
        cls = classify_period(prev, params.delta)
        if cls is PeriodClass.INEFFICIENT:
            raw = prev.desire / params.rho
        elif cls is PeriodClass.EFFICIENT_DEPRIVED:
            raw = float(prev.desire)
        else:
            raw = prev.desire * params.rho
    d = max(1, math.ceil(raw - 1e-9))
    if max_containers is not None:
        d = min(d, max(1, max_containers))
    return d


def measure_utilization(samples: Iterable[Sequence[float]]) -> float:
    """Mean used fraction over every (tick, container) sample.

    ``samples`` holds one sequence per tick with the used fraction of each
    container the sub-job held at that tick.
    """
    total = []
    for tick in samples:
        total.extend(tick)
    if not total:
        return 0.0
    return math.fsum(total) / len(total)


def desire_trace(records: Sequence[PeriodRecord], params: SchedulerParams, max_containers: Optional[int] = None) -> List[int]:
    """Desires produced for periods 1..len(records)+1 when fed ``records`` in order."""
    out = [next_desire(None, params, max_containers)]
    for rec in records:
        out.append(next_desire(rec, params, max_containers))
    return out


class AfController:
    """Per-sub-job record history plus utilization accumulation for the current period."""

    def __init__(self, params: SchedulerParams, max_containers: int):
        self.params = params
        self.max_containers = max_containers
        self.history: List[PeriodRecord] = []
        self.q = 1
        self.desire = next_desire(None, params, max_containers)
        self.allocation = 0
        self._used_sum = 0.0
        self._samples = 0
        self._waited = False

    def sample(self, used_fractions: Sequence[float], any_waiting: bool) -> None:
        self._used_sum += math.fsum(used_fractions)
        self._samples += len(used_fractions)
        self._waited = self._waited or any_waiting

    def close_period(self) -> PeriodRecord:
        """Finish period ``q`` and compute the desire for ``q + 1``."""
        u = self._used_sum / self._samples if self._samples else 0.0
        u = min(max(u, 0.0), 1.0)
        rec = PeriodRecord(self.q, self.desire, min(self.allocation, self.desire), u, self._waited)
        self.history.append(rec)
        self.q += 1
        self.desire = next_desire(rec, self.params, self.max_containers)
        self._used_sum = 0.0
        self._samples = 0
        self._waited = False
        return rec
