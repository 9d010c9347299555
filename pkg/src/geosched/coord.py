"""Replicated job-manager state: intermediate information, its ordered update
log, primary election, replacement of failed job managers and container
inheritance.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .model import DagJob, TaskId, TaskState


class Role(str, enum.Enum):
    PRIMARY = "pJM"
    SEMI_ACTIVE = "sJM"


class JmStatus(str, enum.Enum):
    ALIVE = "alive"
    FAILED = "failed"
    RECOVERING = "recovering"


class RecoveryError(RuntimeError):
    """Every job manager of a job is gone; the job cannot continue."""


@dataclass
class JmState:
    jm_id: str
    dc_id: str
    role: Role
    status: JmStatus = JmStatus.ALIVE
    host: Optional[str] = None
    generation: int = 0

    @property
    def alive(self) -> bool:
        return self.status is JmStatus.ALIVE


# ---- updates ---------------------------------------------------------------

@dataclass(frozen=True)
class PartitionDone:
    task: TaskId
    node: str


@dataclass(frozen=True)
class PartitionLost:
    tasks: Tuple[TaskId, ...]


@dataclass(frozen=True)
class TaskReassigned:
    task: TaskId
    src: Optional[str]
    dst: str


@dataclass(frozen=True)
class ExecutorChange:
    container: str
    jm: Optional[str]


@dataclass(frozen=True)
class RoleChange:
    jm: str
    role: Optional[Role]


@dataclass(frozen=True)
class StageFrontier:
    stages: Tuple[int, ...]


UpdateBody = Union[PartitionDone, PartitionLost, TaskReassigned, ExecutorChange, RoleChange, StageFrontier]


@dataclass(frozen=True)
class InfoUpdate:
    seq: int
    body: UpdateBody


@dataclass(frozen=True)
class IntermediateInfo:
    job_id: str
    stage_ids: FrozenSet[int] = frozenset()
    executor_list: Mapping[str, str] = field(default_factory=dict)
    roles: Mapping[str, Role] = field(default_factory=dict)
    task_map: Mapping[TaskId, str] = field(default_factory=dict)
    partition_list: Mapping[TaskId, str] = field(default_factory=dict)
    applied_seq: int = 0
    pending: Mapping[int, InfoUpdate] = field(default_factory=dict)

    def primaries(self) -> List[str]:
        return sorted(j for j, r in self.roles.items() if r is Role.PRIMARY)

    def owned_by(self, jm: str) -> List[TaskId]:
        return sorted(t for t, o in self.task_map.items() if o == jm)

    def snapshot(self) -> tuple:
        """Comparable view without the replication bookkeeping."""
        return (
            self.job_id,
            tuple(sorted(self.stage_ids)),
            tuple(sorted(self.executor_list.items())),
            tuple(sorted((k, v.value) for k, v in self.roles.items())),
            tuple(sorted(self.task_map.items())),
            tuple(sorted(self.partition_list.items())),
        )


def _apply_body(info: IntermediateInfo, body: UpdateBody) -> IntermediateInfo:
    if isinstance(body, PartitionDone):
        pl = dict(info.partition_list)
        pl[body.task] = body.node
        return replace(info, partition_list=pl)
    if isinstance(body, PartitionLost):
        pl = {t: n for t, n in info.partition_list.items() if t not in set(body.tasks)}
        return replace(info, partition_list=pl)
    if isinstance(body, TaskReassigned):
        tm = dict(info.task_map)
        tm[body.task] = body.dst
        return replace(info, task_map=tm)
    if isinstance(body, ExecutorChange):
        ex = dict(info.executor_list)
        if body.jm is None:
            ex.pop(body.container, None)
        else:
            ex[body.container] = body.jm
        return replace(info, executor_list=ex)
    if isinstance(body, RoleChange):
        roles = dict(info.roles)
        if body.role is None:
            roles.pop(body.jm, None)
        else:
            if body.role is Role.PRIMARY:
                for j, r in list(roles.items()):
                    if r is Role.PRIMARY and j != body.jm:
                        roles[j] = Role.SEMI_ACTIVE
            roles[body.jm] = body.role
        return replace(info, roles=roles)
    if isinstance(body, StageFrontier):
        return replace(info, stage_ids=info.stage_ids | frozenset(body.stages))
    raise TypeError(f"unknown update {body!r}")


def apply_update(info: IntermediateInfo, update: InfoUpdate) -> IntermediateInfo:
    """Apply one log entry to a replica.

    Entries at or below the applied sequence number are ignored (redelivery);
    entries that arrive ahead of a gap are parked until the gap fills.
    """
    if update.seq <= info.applied_seq or update.seq in info.pending:
        return info
    if update.seq > info.applied_seq + 1:
        pending = dict(info.pending)
        pending[update.seq] = update
        return replace(info, pending=pending)
    info = replace(_apply_body(info, update.body), applied_seq=update.seq)
    pending = dict(info.pending)
    while info.applied_seq + 1 in pending:
        nxt = pending.pop(info.applied_seq + 1)
        info = replace(_apply_body(info, nxt.body), applied_seq=nxt.seq)
    return replace(info, pending=pending)


class ConsistentStore:
    """Totally ordered update log with one replica per data center.

    ``append`` commits an entry (the committed head is what a linearizable
    read returns); replicas only see it once ``deliver`` is called for them,
    which the simulator does after a propagation delay.
    """

    def __init__(self, job_id: str, replica_ids: Iterable[str]):
        self.job_id = job_id
        self.log: List[InfoUpdate] = []
        self.head = IntermediateInfo(job_id)
        self.replicas: Dict[str, IntermediateInfo] = {r: IntermediateInfo(job_id) for r in replica_ids}

    def append(self, body: UpdateBody) -> InfoUpdate:
        upd = InfoUpdate(len(self.log) + 1, body)
        self.log.append(upd)
        self.head = apply_update(self.head, upd)
        return upd

    def deliver(self, replica: str, update: InfoUpdate) -> IntermediateInfo:
        self.replicas[replica] = apply_update(self.replicas[replica], update)
        return self.replicas[replica]

    def catch_up(self, replica: str) -> IntermediateInfo:
        for upd in self.log:
            self.deliver(replica, upd)
        return self.replicas[replica]

    def reset_replica(self, replica: str) -> None:
        self.replicas[replica] = IntermediateInfo(self.job_id)

    def converged(self) -> bool:
        snaps = {info.snapshot() for info in self.replicas.values()}
        return len(snaps) <= 1 and all(i.applied_seq == len(self.log) for i in self.replicas.values())


# ---- election and recovery ---------------------------------------------------

def elect_primary(live_jms: Sequence[JmState], store: Optional[ConsistentStore] = None) -> JmState:
    """Lowest data-center id among live semi-active job managers wins."""
    candidates = sorted((j for j in live_jms if j.alive and j.role is Role.SEMI_ACTIVE), key=lambda j: j.dc_id)
    if not candidates:
        raise RecoveryError("no live semi-active job manager to elect")
    winner = candidates[0]
    winner.role = Role.PRIMARY
    if store is not None:
        store.append(RoleChange(winner.jm_id, Role.PRIMARY))
    return winner


@dataclass
class RecoveryPlan:
    failed: str
    replace_dc: Optional[str]
    new_primary: Optional[str] = None
    abort: bool = False


def on_jm_failure(failed: JmState, jms: Sequence[JmState], store: Optional[ConsistentStore] = None) -> RecoveryPlan:
    """Decide how a job continues after ``failed`` goes down.

    A failed semi-active manager is replaced in its own data center.  A failed
    primary first triggers an election among the survivors; the winner then
    asks for a replacement in the failed primary's data center.
    """
    failed.status = JmStatus.FAILED
    if store is not None:
        store.append(RoleChange(failed.jm_id, None))
    survivors = [j for j in jms if j.jm_id != failed.jm_id and j.alive]
    if not survivors:
        return RecoveryPlan(failed.jm_id, None, abort=True)
    if failed.role is Role.PRIMARY:
        winner = elect_primary(survivors, store)
        failed.role = Role.SEMI_ACTIVE
        return RecoveryPlan(failed.jm_id, failed.dc_id, new_primary=winner.jm_id)
    return RecoveryPlan(failed.jm_id, failed.dc_id)


def inheritance_updates(new_jm: str, failed_jm: str, info: IntermediateInfo, dead_containers: Iterable[str] = ()) -> List[UpdateBody]:
    """Updates that hand the failed manager's live containers and tasks to ``new_jm``."""
    dead = set(dead_containers)
    out: List[UpdateBody] = []
    for c, owner in sorted(info.executor_list.items()):
        if owner != failed_jm:
            continue
        out.append(ExecutorChange(c, None if c in dead else new_jm))
    for t, owner in sorted(info.task_map.items()):
        if owner == failed_jm:
            out.append(TaskReassigned(t, failed_jm, new_jm))
    out.append(RoleChange(new_jm, Role.SEMI_ACTIVE))
    return out


def inherit_containers(new_jm: JmState, failed_jm: str, info: IntermediateInfo, dead_containers: Iterable[str] = ()) -> IntermediateInfo:
    """Apply :func:`inheritance_updates` locally and return the resulting view."""
    seq = info.applied_seq
    for body in inheritance_updates(new_jm.jm_id, failed_jm, info, dead_containers):
        seq += 1
        info = apply_update(info, InfoUpdate(seq, body))
    return info


# ---- lost outputs ------------------------------------------------------------

def _needs_input(job: DagJob) -> Set[TaskId]:
    return {t.id for t in job.tasks() if t.state in (TaskState.WAITING, TaskState.UNRELEASED)}


def recompute_closure(job: DagJob, lost: Iterable[TaskId], extra_needy: Iterable[TaskId] = ()) -> Set[TaskId]:
    """Done tasks with lost outputs that must run again.

    A lost output is needed when its stage is a sink of an unfinished job or
    when some task of a successor stage still has to read its input (it is
    Waiting/Unreleased, or is itself being recomputed).  Iterated to a fixpoint.
    """
    lost = set(lost)
    if not lost or job.is_complete():
        return set()
    needy = _needs_input(job) | set(extra_needy)
    needy_stages = {t.stage for t in needy}
    out: Set[TaskId] = set()
    changed = True
    while changed:
        changed = False
        for tid in sorted(lost - out):
            succ = job.successors(tid.stage)
            if not succ or succ & needy_stages:
                out.add(tid)
                needy_stages.add(tid.stage)
                changed = True
    return out


def recompute_closure_bruteforce(job: DagJob, lost: Iterable[TaskId], extra_needy: Iterable[TaskId] = ()) -> Set[TaskId]:
    """Smallest subset of ``lost`` whose recomputation leaves every needed input
    available.  Exponential; for tests."""
    lost = sorted(set(lost))
    if not lost or job.is_complete():
        return set()
    needy = _needs_input(job) | set(extra_needy)
    sinks = {sid for sid in job.stages if not job.successors(sid)}

    def ok(subset: Set[TaskId]) -> bool:
        missing = set(lost) - subset
        for tid in missing:
            if tid.stage in sinks:
                return False
        for x in needy | subset:
            for pred in job.stages[x.stage].predecessors:
                if any(t.id in missing for t in job.stages[pred].tasks):
                    return False
        return True

    for k in range(len(lost) + 1):
        for combo in itertools.combinations(lost, k):
            s = set(combo)
            if ok(s):
                return s
    return set(lost)
