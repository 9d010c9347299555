"""Task assignment inside a job: proportional initial split across data centers,
locality-tiered delay scheduling with processing-time-scaled waits, and
work stealing between the job managers of one job.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Mapping, MutableMapping, Optional, Sequence, Tuple

from .model import EPS, Container, ModelError, SchedulerParams, Stage, Task, TaskId, TaskState, largest_remainder


class Locality(str, enum.Enum):
    NODE = "node"
    RACK = "rack"
    REMOTE = "remote"


@dataclass
class ContainerDescriptor:
    """What a job manager knows about a container when scheduling onto it."""

    id: str
    node_id: str
    rack_id: str
    dc_id: str
    free: float

    @classmethod
    def of(cls, c: Container) -> "ContainerDescriptor":
        return cls(c.id, c.node_id, c.rack_id, c.dc_id, c.free)


@dataclass
class Placement:
    task: Task
    container: str
    tier: str
    locality: Locality
    wait: float
    pre_free: float


@dataclass
class StealReply:
    victim: str
    granted: List[Placement] = field(default_factory=list)

    @property
    def tasks(self) -> List[Task]:
        return [p.task for p in self.granted]


@dataclass
class DelayPolicy:
    """Wait thresholds for the rack and anywhere tiers.

    The default scales both with the task's processing time (``tau * p`` and
    ``2 * tau * p``) and only allows the anywhere tier on a container with at
    least ``1 - delta`` free.  ``constant_wait`` switches to classic delay
    scheduling with fixed thresholds and no free-space guard.
    """

    constant_wait: Optional[float] = None

    def rack_threshold(self, task: Task, params: SchedulerParams) -> float:
        if self.constant_wait is not None:
            return self.constant_wait
        return params.tau * task.p

    def any_threshold(self, task: Task, params: SchedulerParams) -> float:
        if self.constant_wait is not None:
            return 2 * self.constant_wait
        return 2 * params.tau * task.p

    def any_guard(self, free: float, params: SchedulerParams) -> bool:
        if self.constant_wait is not None:
            return True
        return free >= 1 - params.delta - EPS


PARAMETERIZED = DelayPolicy()


@dataclass
class JmQueue:
    """The Waiting tasks a job manager owns, plus its UPDATE clock."""

    jm_id: str
    waiting: Dict[TaskId, Task] = field(default_factory=dict)
    last_update: float = 0.0

    def add(self, task: Task) -> None:
        self.waiting[task.id] = task

    def remove(self, tid: TaskId) -> Task:
        return self.waiting.pop(tid)


def initial_assignment(n_tasks: int, data_distribution: Mapping[str, float], primary_dc: str) -> Dict[str, int]:
    """Task count per data center, proportional to its share of the stage input."""
    if n_tasks == 0:
        return {dc: 0 for dc in data_distribution} or {primary_dc: 0}
    if not data_distribution or sum(max(v, 0.0) for v in data_distribution.values()) <= 0:
        out = {dc: 0 for dc in data_distribution}
        out[primary_dc] = n_tasks
        return out
    return largest_remainder(n_tasks, data_distribution)


def assign_stage_tasks(
    stage: Stage, counts: Mapping[str, int], home_dc: Callable[[Task], Optional[str]]
) -> Dict[TaskId, str]:
    """Pick which tasks go to which data center given per-DC counts.

    Tasks whose input lives in a data center are handed to it first; the rest
    fill the remaining slots in data-center id order.
    """
    left = dict(counts)
    owner: Dict[TaskId, str] = {}
    unplaced: List[Task] = []
    for t in stage.tasks:
        dc = home_dc(t)
        if dc is not None and left.get(dc, 0) > 0:
            owner[t.id] = dc
            left[dc] -= 1
        else:
            unplaced.append(t)
    slots = [dc for dc in sorted(left) for _ in range(left[dc])]
    if len(slots) < len(unplaced):
        raise ModelError("counts do not cover the stage")
    for t, dc in zip(unplaced, slots):
        owner[t.id] = dc
    return owner


def locality_of(task: Task, n: ContainerDescriptor, rack_of: Mapping[str, str]) -> Locality:
    if n.node_id in task.preferred_nodes:
        return Locality.NODE
    if any(rack_of.get(node) == n.rack_id for node in task.preferred_nodes):
        return Locality.RACK
    return Locality.REMOTE


def accumulate_wait(state: JmQueue, now: float, enqueued_at: Optional[Mapping[TaskId, float]] = None) -> None:
    """Add the time since the last UPDATE to every waiting task's wait."""
    for tid, t in state.waiting.items():
        since = state.last_update
        if enqueued_at is not None and tid in enqueued_at:
            since = max(since, enqueued_at[tid])
        if now > since:
            t.wait += now - since
    state.last_update = max(state.last_update, now)


def _order(tasks: Sequence[Task]) -> List[Task]:
    return sorted(tasks, key=lambda t: (-t.wait, t.id))


def select_placements(
    state: JmQueue,
    n: ContainerDescriptor,
    params: SchedulerParams,
    rack_of: Mapping[str, str],
    policy: DelayPolicy = PARAMETERIZED,
    tier_label: Optional[str] = None,
) -> List[Placement]:
    """The placement loop: node-local, then rack-local past the rack threshold,
    then anything past the anywhere threshold.  Chosen tasks leave ``state``
    and ``n.free`` drops by their ``r``.
    """
    placed: List[Placement] = []
    while n.free > EPS and state.waiting:
        tiers: Dict[Locality, List[Task]] = {loc: [] for loc in Locality}
        for t in state.waiting.values():
            tiers[locality_of(t, n, rack_of)].append(t)
        chosen: Optional[Tuple[Task, Locality]] = None
        for t in _order(tiers[Locality.NODE]):
            if t.r <= n.free + EPS:
                chosen = (t, Locality.NODE)
                break
        if chosen is None:
            for t in _order(tiers[Locality.RACK]):
                if t.r <= n.free + EPS and t.wait >= policy.rack_threshold(t, params) - EPS:
                    chosen = (t, Locality.RACK)
                    break
        if chosen is None and policy.any_guard(n.free, params):
            for t in _order(state.waiting.values()):
                if t.r <= n.free + EPS and t.wait >= policy.any_threshold(t, params) - EPS:
                    chosen = (t, locality_of(t, n, rack_of))
                    break
        if chosen is None:
            break
        t, loc = chosen
        pre = n.free
        state.remove(t.id)
        n.free = pre - t.r
        tier = tier_label or {Locality.NODE: "node", Locality.RACK: "rack", Locality.REMOTE: "remote"}[loc]
        placed.append(Placement(t, n.id, tier, loc, t.wait, pre))
    return placed


def on_update(
    state: JmQueue,
    n: ContainerDescriptor,
    params: SchedulerParams,
    now: float,
    rack_of: Mapping[str, str],
    steal: Optional[Callable[[ContainerDescriptor], List[Placement]]] = None,
    policy: DelayPolicy = PARAMETERIZED,
    enqueued_at: Optional[Mapping[TaskId, float]] = None,
) -> List[Placement]:
    """Handle an UPDATE from container ``n``.

    With no waiting tasks the job manager turns thief: whatever ``steal``
    grants is placed on ``n`` (as far as it fits) and the loop stops there.
    """
    accumulate_wait(state, now, enqueued_at)
    if not state.waiting:
        if steal is None:
            return []
        out = []
        for p in steal(replace(n)):
            if p.task.r <= n.free + EPS:
                pre = n.free
                n.free = pre - p.task.r
                out.append(Placement(p.task, n.id, "stolen", p.locality, p.wait, pre))
            else:
                state.add(p.task)
        return out
    return select_placements(state, n, params, rack_of, policy)


def on_receive_steal(
    victim: JmQueue,
    n: ContainerDescriptor,
    params: SchedulerParams,
    now: float,
    rack_of: Mapping[str, str],
    recovering: bool = False,
    policy: DelayPolicy = PARAMETERIZED,
    enqueued_at: Optional[Mapping[TaskId, float]] = None,
) -> StealReply:
    """Answer a steal for the thief's container ``n`` by running the
    placement loop on the victim's waiting set (never recursing into steal)."""
    if recovering:
        return StealReply(victim.jm_id)
    accumulate_wait(victim, now, enqueued_at)
    granted = select_placements(victim, replace(n), params, rack_of, policy)
    return StealReply(victim.jm_id, granted)


def victim_order(thief: str, victims: Mapping[str, JmQueue]) -> List[str]:
    """Biggest backlog first, ties by id."""
    return sorted((v for v in victims if v != thief), key=lambda v: (-len(victims[v].waiting), v))


def steal(
    thief: JmQueue,
    n: ContainerDescriptor,
    victims: Mapping[str, JmQueue],
    params: SchedulerParams,
    now: float,
    rack_of: Mapping[str, str],
    task_map: Optional[MutableMapping[TaskId, str]] = None,
    recovering: Sequence[str] = (),
    policy: DelayPolicy = PARAMETERIZED,
) -> List[Placement]:
    """Synchronous steal: ask live siblings in victim order and keep the first
    non-empty reply.  Granted tasks are re-owned to the thief in ``task_map``.
    """
    if thief.waiting:
        raise ModelError("a job manager with waiting tasks does not steal")
    for v in victim_order(thief.jm_id, victims):
        reply = on_receive_steal(victims[v], n, params, now, rack_of, v in recovering, policy)
        if reply.granted:
            if task_map is not None:
                for p in reply.granted:
                    if task_map.get(p.task.id) != v:
                        raise ModelError(f"task {p.task.id} not owned by victim {v}")
                    task_map[p.task.id] = thief.jm_id
            return reply.granted
    return []


def guard_violations(rows: Sequence[Mapping], params: SchedulerParams) -> List[str]:
    """Check placement trace rows against the tier guards.

    Rack placements need ``wait >= tau*p``; remote ones need ``wait >= 2*tau*p``
    and at least ``1 - delta`` free before placement.  Stolen rows are checked
    by the locality the victim used.  Rows from constant-threshold baselines
    carry ``policy == 'constant'`` and are skipped.
    """
    bad = []
    for row in rows:
        if row.get("policy", "parameterized") != "parameterized":
            continue
        loc = row["locality"]
        wait, p, pre = float(row["wait"]), float(row["p"]), float(row["pre_free"])
        if float(row["r"]) > pre + EPS:
            bad.append(f"overfill: {row}")
        if loc == "rack" and wait < params.tau * p - 1e-6:
            bad.append(f"rack guard: {row}")
        if loc == "remote" and (wait < 2 * params.tau * p - 1e-6 or pre < 1 - params.delta - 1e-6):
            bad.append(f"remote guard: {row}")
    return bad
