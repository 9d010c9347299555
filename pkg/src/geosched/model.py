"""Domain types for geo-distributed DAG jobs and the metrics shared by every module.

Resources are one-dimensional: a container has capacity 1.0 and a task
occupies a fraction ``r`` of it for ``p`` seconds.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple

EPS = 1e-9


class ModelError(ValueError):
    pass


class AdmissionError(ModelError):
    """A job violates the task resource bounds and cannot be admitted."""


class Reliability(str, enum.Enum):
    RELIABLE = "reliable"
    SPOT = "spot"


class TaskState(str, enum.Enum):
    UNRELEASED = "unreleased"
    WAITING = "waiting"
    RUNNING = "running"
    DONE = "done"


class TaskId(NamedTuple):
    job: str
    stage: int
    index: int

    def __str__(self) -> str:
        return f"{self.job}:s{self.stage}:t{self.index}"


@dataclass
class LinkModel:
    mean_mbps: float
    stddev_mbps: float = 0.0
    floor_mbps: float = 1.0

    def __post_init__(self):
        if self.mean_mbps <= 0:
            raise ModelError("link mean bandwidth must be positive")
        if self.stddev_mbps < 0:
            raise ModelError("link stddev must be non-negative")
        if not 0 < self.floor_mbps <= self.mean_mbps:
            raise ModelError("link floor must be in (0, mean]")


@dataclass
class Node:
    id: str
    rack_id: str
    dc_id: str
    reliability: Reliability = Reliability.SPOT
    alive: bool = True


@dataclass
class Rack:
    id: str
    dc_id: str
    node_ids: List[str] = field(default_factory=list)


@dataclass
class Container:
    id: str
    node_id: str
    rack_id: str
    dc_id: str
    capacity: float = 1.0
    reliability: Reliability = Reliability.SPOT
    running: Dict[TaskId, float] = field(default_factory=dict)

    @property
    def free(self) -> float:
        # recomputed from the running set so free + sum(r) == capacity holds exactly
        return self.capacity - math.fsum(self.running.values())

    def place(self, task_id: TaskId, r: float) -> None:
        if r > self.free + EPS:
            raise ModelError(f"task {task_id} (r={r}) does not fit on {self.id} (free={self.free})")
        self.running[task_id] = r

    def release(self, task_id: TaskId) -> None:
        del self.running[task_id]


@dataclass
class DataCenter:
    id: str
    racks: List[Rack]
    nodes: List[Node]
    containers: List[Container]

    def __post_init__(self):
        if not self.nodes:
            raise ModelError(f"data center {self.id} has no nodes")


@dataclass
class ClusterTopology:
    datacenters: List[DataCenter]
    wan_links: Dict[Tuple[str, str], LinkModel]

    def __post_init__(self):
        if not self.datacenters:
            raise ModelError("topology needs at least one data center")
        self.dcs: Dict[str, DataCenter] = {dc.id: dc for dc in self.datacenters}
        self.nodes: Dict[str, Node] = {}
        self.racks: Dict[str, Rack] = {}
        self.containers: Dict[str, Container] = {}
        for dc in self.datacenters:
            for rack in dc.racks:
                if rack.id in self.racks:
                    raise ModelError(f"duplicate rack id {rack.id}")
                self.racks[rack.id] = rack
            for node in dc.nodes:
                if node.id in self.nodes:
                    raise ModelError(f"duplicate node id {node.id}")
                if node.rack_id not in self.racks or self.racks[node.rack_id].dc_id != dc.id:
                    raise ModelError(f"node {node.id} is not in a rack of {dc.id}")
                self.nodes[node.id] = node
            for c in dc.containers:
                if c.id in self.containers:
                    raise ModelError(f"duplicate container id {c.id}")
                if c.node_id not in self.nodes or self.nodes[c.node_id].dc_id != dc.id:
                    raise ModelError(f"container {c.id} is not on a node of {dc.id}")
                self.containers[c.id] = c
        for a in self.dcs:
            for b in self.dcs:
                if (a, b) not in self.wan_links:
                    raise ModelError(f"missing link model for ({a}, {b})")

    @property
    def dc_ids(self) -> List[str]:
        return [dc.id for dc in self.datacenters]

    def link(self, src_dc: str, dst_dc: str) -> LinkModel:
        return self.wan_links[(src_dc, dst_dc)]

    def containers_in(self, dc_id: str) -> List[Container]:
        return self.dcs[dc_id].containers

    def total_containers(self) -> int:
        return len(self.containers)


@dataclass
class Task:
    id: TaskId
    r: float
    p: float
    preferred_nodes: FrozenSet[str] = frozenset()
    input_bytes: float = 0.0
    wait: float = 0.0
    state: TaskState = TaskState.UNRELEASED
    container: Optional[str] = None
    location: Optional[str] = None

    _ALLOWED = {
        TaskState.UNRELEASED: {TaskState.WAITING},
        TaskState.WAITING: {TaskState.RUNNING, TaskState.UNRELEASED},
        TaskState.RUNNING: {TaskState.DONE, TaskState.WAITING},
        TaskState.DONE: {TaskState.WAITING},
    }

    def transition(self, new: TaskState, *, container: Optional[str] = None, location: Optional[str] = None) -> None:
        """Move the task along its state machine.

        Forward path is Unreleased -> Waiting -> Running -> Done.  The backward
        edges (Running -> Waiting, Done -> Waiting, Waiting -> Unreleased) only
        happen during failure rollback.
        """
        if new not in self._ALLOWED[self.state]:
            raise ModelError(f"illegal transition {self.state.value} -> {new.value} for {self.id}")
        self.state = new
        if new is TaskState.WAITING:
            self.wait = 0.0
            self.container = None
            self.location = None
        elif new is TaskState.RUNNING:
            self.container = container
        elif new is TaskState.DONE:
            self.container = None
            self.location = location
        else:
            self.container = None
            self.location = None


@dataclass
class Stage:
    id: int
    tasks: List[Task]
    predecessors: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if self.tasks:
            r0, p0 = self.tasks[0].r, self.tasks[0].p
            for t in self.tasks:
                if t.r != r0 or t.p != p0:
                    raise ModelError(f"stage {self.id} has heterogeneous tasks")

    @property
    def r(self) -> float:
        return self.tasks[0].r if self.tasks else 0.0

    @property
    def p(self) -> float:
        return self.tasks[0].p if self.tasks else 0.0

    def done(self) -> bool:
        return all(t.state is TaskState.DONE for t in self.tasks)


@dataclass
class DagJob:
    id: str
    stages: Dict[int, Stage]
    release_time: float = 0.0
    completion_time: Optional[float] = None
    submit_dc: Optional[str] = None
    aborted: bool = False

    def __post_init__(self):
        for s in self.stages.values():
            for pred in s.predecessors:
                if pred not in self.stages:
                    raise ModelError(f"stage {s.id} depends on unknown stage {pred}")
        self.topological_order()  # raises on cycles

    def topological_order(self) -> List[int]:
        indeg = {sid: len(s.predecessors) for sid, s in self.stages.items()}
        ready = sorted(sid for sid, d in indeg.items() if d == 0)
        order: List[int] = []
        while ready:
            sid = ready.pop(0)
            order.append(sid)
            for other in sorted(self.successors(sid)):
                indeg[other] -= 1
                if indeg[other] == 0:
                    ready.append(other)
                    ready.sort()
        if len(order) != len(self.stages):
            raise ModelError(f"job {self.id} has a cyclic stage graph")
        return order

    def successors(self, stage_id: int) -> Set[int]:
        return {sid for sid, s in self.stages.items() if stage_id in s.predecessors}

    def tasks(self) -> Iterable[Task]:
        for sid in sorted(self.stages):
            yield from self.stages[sid].tasks

    def task(self, tid: TaskId) -> Task:
        return self.stages[tid.stage].tasks[tid.index]

    def is_complete(self) -> bool:
        return all(t.state is TaskState.DONE for t in self.tasks())


@dataclass(frozen=True)
class SchedulerParams:
    delta: float = 0.5
    rho: float = 2.0
    tau: float = 0.1
    theta: float = 0.05
    period_length: float = 10.0

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ModelError("delta must be in (0, 1)")
        if not self.rho > 1:
            raise ModelError("rho must be > 1")
        if not self.tau > 0:
            raise ModelError("tau must be > 0")
        if not self.theta > 0:
            raise ModelError("theta must be > 0")
        if not self.period_length > 0:
            raise ModelError("period length must be > 0")


def admit(job: DagJob, params: SchedulerParams) -> None:
    """Reject jobs whose tasks fall outside ``[theta, 1 - delta]``."""
    for t in job.tasks():
        if t.r < params.theta - EPS:
            raise AdmissionError(f"task {t.id} has r={t.r} below theta={params.theta}")
        if t.r + params.delta > 1 + EPS:
            raise AdmissionError(f"task {t.id} has r={t.r}, r + delta exceeds 1")
        if t.p <= 0:
            raise AdmissionError(f"task {t.id} has non-positive processing time")


def job_work(job: DagJob) -> float:
    return math.fsum(t.r * t.p for t in job.tasks())


def release_ready_tasks(job: DagJob, now: float) -> List[Task]:
    """Make every Unreleased task whose predecessor stages are all Done Waiting."""
    released = []
    done = {sid for sid, s in job.stages.items() if s.done()}
    for sid in sorted(job.stages):
        stage = job.stages[sid]
        if not stage.predecessors <= done:
            continue
        for t in stage.tasks:
            if t.state is TaskState.UNRELEASED:
                t.transition(TaskState.WAITING)
                released.append(t)
    return released


def makespan(jobs: Sequence[DagJob]) -> float:
    if not jobs:
        return 0.0
    incomplete = [j.id for j in jobs if j.completion_time is None]
    if incomplete:
        raise ModelError(f"jobs not completed: {incomplete}")
    return max(j.completion_time for j in jobs)


def avg_response_time(jobs: Sequence[DagJob]) -> float:
    if not jobs:
        raise ModelError("average response time of an empty job set")
    total = []
    for j in jobs:
        if j.completion_time is None:
            raise ModelError(f"job {j.id} not completed")
        if j.completion_time < j.release_time:
            raise ModelError(f"job {j.id} completes before its release")
        total.append(j.completion_time - j.release_time)
    return math.fsum(total) / len(total)


def largest_remainder(total: int, weights: Mapping[str, float]) -> Dict[str, int]:
    """Apportion ``total`` items over keys proportionally to ``weights``.

    Ties on the fractional remainder go to the key that sorts first.
    """
    keys = sorted(weights)
    wsum = math.fsum(max(weights[k], 0.0) for k in keys)
    if wsum <= 0:
        raise ModelError("all weights are zero")
    quotas = {k: total * max(weights[k], 0.0) / wsum for k in keys}
    counts = {k: int(math.floor(quotas[k] + EPS)) for k in keys}
    left = total - sum(counts.values())
    by_remainder = sorted(keys, key=lambda k: (-(quotas[k] - counts[k]), k))
    for k in by_remainder[:left]:
        counts[k] += 1
    return counts
