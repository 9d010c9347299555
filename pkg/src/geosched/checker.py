"""Exhaustive interleaving checker for the steal and failure protocol.

A tiny job (one stage, a handful of tasks) runs with one job manager per data
center.  Up to two concurrent protocol events (a steal round, a job-manager
crash) are started together and every interleaving of their steps is
explored.  Each step uses the real placement, store and recovery functions.
After every step the checker asserts that no task is held by two live job
managers, that holders agree with the committed task map and that there is
at most one live primary; at quiescence it also checks that no task was lost
and that all replicas converge.
"""
from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .coord import (
    ConsistentStore,
    JmState,
    JmStatus,
    Role,
    RoleChange,
    StageFrontier,
    TaskReassigned,
    inheritance_updates,
    on_jm_failure,
)
from .model import SchedulerParams, Stage, Task, TaskId, TaskState
from .parades import ContainerDescriptor, JmQueue, on_receive_steal

PARAMS = SchedulerParams()
NOW = 100.0  # every waiting task is past both delay thresholds


@dataclass
class World:
    store: ConsistentStore
    jms: Dict[str, JmState]
    queues: Dict[str, JmQueue]
    running: Dict[str, Set[TaskId]]
    tasks: Dict[TaskId, Task]
    epoch: int = 0
    aborted: bool = False
    trail: List[str] = field(default_factory=list)

    def live(self) -> List[str]:
        return sorted(j for j, s in self.jms.items() if s.alive)

    def in_dc(self, dc: str) -> Optional[str]:
        for j in self.live():
            if self.jms[j].dc_id == dc:
                return j
        return None


@dataclass
class Steal:
    thief: str
    phase: str = "start"
    victims: List[str] = field(default_factory=list)
    idx: int = 0
    granted: List[TaskId] = field(default_factory=list)
    generation: int = 0
    epoch: int = 0

    def enabled(self, w: World) -> bool:
        return True

    def step(self, w: World) -> bool:
        """Advance one step; returns False once finished."""
        thief = w.jms[self.thief]
        if self.phase == "start":
            if not thief.alive or w.queues[self.thief].waiting:
                return False
            backlog = {j: len(w.store.head.owned_by(j)) for j in w.store.head.roles if j != self.thief}
            self.victims = sorted((v for v in backlog if backlog[v] > 0), key=lambda v: (-backlog[v], v))
            if not self.victims:
                return False
            self.generation = thief.generation
            self.epoch = w.epoch
            self.phase = "request"
            w.trail.append(f"steal-request {self.thief}->{self.victims[0]}")
            return True
        if self.phase == "request":
            v = self.victims[self.idx]
            self.granted = []
            # the grant is a conditional store write: it only goes through while
            # the thief is still a registered job manager
            if w.jms[v].alive and w.jms[v].status is not JmStatus.RECOVERING and self.thief in w.store.head.roles:
                desc = ContainerDescriptor(f"{thief.dc_id}-n0-c0", f"{thief.dc_id}-n0", f"{thief.dc_id}-r0", thief.dc_id, 1.0)
                reply = on_receive_steal(w.queues[v], desc, PARAMS, NOW, {}, False)
                for p in reply.granted:
                    w.store.append(TaskReassigned(p.task.id, v, self.thief))
                    self.granted.append(p.task.id)
            w.trail.append(f"steal-grant {v}->{self.thief} {len(self.granted)}")
            self.phase = "reply"
            return True
        if self.phase == "reply":
            valid = thief.alive and thief.generation == self.generation
            w.trail.append(f"steal-reply {self.thief} valid={valid} epoch_ok={self.epoch == w.epoch}")
            if not valid:
                return False  # the replacement inherits whatever the store gave us
            owned = [t for t in self.granted if w.store.head.task_map.get(t) == self.thief]
            if self.granted:
                if self.epoch == w.epoch:
                    w.running[self.thief].update(owned)
                else:
                    for t in owned:
                        w.queues[self.thief].add(w.tasks[t])
                return False
            self.idx += 1
            if self.idx < len(self.victims):
                self.phase = "request"
                return True
            return False
        return False


@dataclass
class Crash:
    target: str
    phase: str = "crash"
    replacement: Optional[str] = None

    def enabled(self, w: World) -> bool:
        # the replacement is requested by the primary, so it waits for one to exist
        if self.phase == "spawn":
            return any(s.alive and s.role is Role.PRIMARY for s in w.jms.values())
        return True

    def step(self, w: World) -> bool:
        failed = w.jms[self.target]
        if self.phase == "crash":
            if not failed.alive:
                return False
            failed.status = JmStatus.FAILED
            w.trail.append(f"crash {self.target}")
            self.phase = "detect"
            return True
        if self.phase == "detect":
            states = list(w.jms.values())
            plan = on_jm_failure(failed, states, w.store)
            w.trail.append(f"detect {self.target} primary={plan.new_primary}")
            if plan.abort:
                w.aborted = True
                return False
            if plan.new_primary is not None:
                w.epoch += 1
            self.phase = "spawn"
            return True
        if self.phase == "spawn":
            gen = failed.generation + 1
            new_id = f"{failed.dc_id}#{gen}"
            w.jms[new_id] = JmState(new_id, failed.dc_id, Role.SEMI_ACTIVE, JmStatus.ALIVE, None, gen)
            w.queues[new_id] = JmQueue(new_id)
            for body in inheritance_updates(new_id, self.target, w.store.head):
                w.store.append(body)
            w.running[new_id] = set(w.running.pop(self.target, set()))
            for tid in w.store.head.owned_by(new_id):
                if tid not in w.running[new_id]:
                    w.queues[new_id].add(w.tasks[tid])
            w.queues[self.target] = JmQueue(self.target)
            self.replacement = new_id
            w.trail.append(f"spawn {new_id}")
            return False
        return False


def violations(w: World, final: bool = False) -> List[str]:
    bad = []
    holders: Dict[TaskId, List[str]] = {}
    for j in w.live():
        for t in list(w.queues[j].waiting) + sorted(w.running.get(j, ())):
            holders.setdefault(t, []).append(j)
    for t, hs in holders.items():
        if len(hs) > 1:
            bad.append(f"{t} held by {hs}")
        elif w.store.head.task_map.get(t) != hs[0]:
            bad.append(f"{t} held by {hs[0]} but mapped to {w.store.head.task_map.get(t)}")
    live_primaries = [j for j in w.live() if w.jms[j].role is Role.PRIMARY]
    if len(live_primaries) > 1:
        bad.append(f"two primaries {live_primaries}")
    store_primaries = [j for j in w.store.head.primaries() if w.jms[j].alive]
    if len(store_primaries) > 1:
        bad.append(f"two primaries in store {store_primaries}")
    if final and not w.aborted:
        for t in w.tasks:
            if t not in holders:
                bad.append(f"{t} lost")
        for r in w.store.replicas:
            w.store.catch_up(r)
        if not w.store.converged():
            bad.append("replicas diverged")
    return bad


def make_world(n_dcs: int, counts: Sequence[int]) -> World:
    dcs = [f"dc{i}" for i in range(n_dcs)]
    tasks: Dict[TaskId, Task] = {}
    stage_tasks = []
    owner: Dict[TaskId, str] = {}
    k = 0
    for dc, n in zip(dcs, counts):
        for _ in range(n):
            t = Task(TaskId("j", 0, k), 0.25, 10.0, frozenset([f"{dc}-n0"]), 0.0)
            t.state = TaskState.WAITING
            tasks[t.id] = t
            stage_tasks.append(t)
            owner[t.id] = f"{dc}#0"
            k += 1
    Stage(0, stage_tasks, frozenset())
    store = ConsistentStore("j", dcs)
    jms, queues, running = {}, {}, {}
    for i, dc in enumerate(dcs):
        jid = f"{dc}#0"
        jms[jid] = JmState(jid, dc, Role.PRIMARY if i == 0 else Role.SEMI_ACTIVE)
        queues[jid] = JmQueue(jid)
        running[jid] = set()
        store.append(RoleChange(jid, jms[jid].role))
    store.append(StageFrontier((0,)))
    for tid in sorted(tasks):
        store.append(TaskReassigned(tid, None, owner[tid]))
        queues[owner[tid]].add(tasks[tid])
    return World(store, jms, queues, running, tasks)


def _explore(w: World, procs: List, report: "CheckReport") -> None:
    active = [i for i, p in enumerate(procs) if p is not None and (w.aborted is False and p.enabled(w))]
    if w.aborted:
        active = []
    if not active:
        if not w.aborted and any(p is not None for p in procs):
            report.failures.append((list(w.trail), "deadlock"))
        report.paths += 1
        for v in violations(w, final=True):
            report.failures.append((list(w.trail), v))
        return
    for i in active:
        w2 = copy.deepcopy(w)
        procs2 = copy.deepcopy(procs)
        alive = procs2[i].step(w2)
        if not alive:
            procs2[i] = None
        report.states += 1
        for v in violations(w2):
            report.failures.append((list(w2.trail), v))
        _explore(w2, procs2, report)


@dataclass
class CheckReport:
    scenarios: int = 0
    paths: int = 0
    states: int = 0
    failures: List[Tuple[List[str], str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def scenarios(max_dcs: int = 3, max_events: int = 2) -> Iterator[Tuple[int, Tuple[int, ...], Tuple]]:
    """(dc count, tasks per dc, event tuple) for every small configuration."""
    for n in range(2, max_dcs + 1):
        for counts in itertools.product(range(0, 3), repeat=n):
            if sum(counts) == 0:
                continue
            jms = [f"dc{i}#0" for i in range(n)]
            events = [("steal", j) for j in jms] + [("crash", j) for j in jms]
            for k in range(1, max_events + 1):
                for combo in itertools.combinations(events, k):
                    yield n, counts, combo


def check(max_dcs: int = 3, max_events: int = 2) -> CheckReport:
    report = CheckReport()
    for n, counts, combo in scenarios(max_dcs, max_events):
        w = make_world(n, counts)
        procs = [Steal(j) if kind == "steal" else Crash(j) for kind, j in combo]
        report.scenarios += 1
        _explore(w, procs, report)
    return report
