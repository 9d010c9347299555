"""Discrete-event simulation of geo-distributed DAG jobs.

One :class:`Simulation` runs one scenario.  Jobs arrive at a master, get one
job manager per data center (or one global manager in the centralized
deployments), request containers every period, place tasks, steal work from
sibling managers and survive job-manager failures through the replicated
intermediate information.
"""
from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from .. import af as af_mod
from ..coord import (
    ConsistentStore,
    ExecutorChange,
    JmState,
    JmStatus,
    PartitionDone,
    PartitionLost,
    Role,
    RoleChange,
    StageFrontier,
    TaskReassigned,
    inheritance_updates,
    on_jm_failure,
    recompute_closure,
)
from ..fairsched import FairScheduler
from ..model import (
    EPS,
    AdmissionError,
    ClusterTopology,
    Container,
    DagJob,
    Reliability,
    Task,
    TaskId,
    TaskState,
    admit,
    avg_response_time,
    makespan,
)
from ..parades import (
    PARAMETERIZED,
    ContainerDescriptor,
    DelayPolicy,
    JmQueue,
    Locality,
    Placement,
    assign_stage_tasks,
    initial_assignment,
    on_receive_steal,
    on_update,
)
from .bound import BoundPreconditionError, makespan_bound
from .config import ConfigError, ScenarioConfig, job_from_dict, topology_from_dict
from .cost import CostTrace, PriceTable, compute_cost, host_costs
from .engine import EventQueue, Prio
from .failures import FailureEvent, inject_failures
from .network import message_latency, transfer_time
from .report import MetricsReport
from .workload import generate_workload

log = logging.getLogger(__name__)

GLOBAL = "global"


@dataclass(frozen=True)
class Deployment:
    name: str
    decentralized: bool
    adaptive: bool
    policy: DelayPolicy
    stealing: bool
    restart_on_failure: bool


def deployment_preset(name: str, options: Dict) -> Deployment:
    steal = bool(options.get("stealing", True))
    if name == "houtu":
        return Deployment(name, True, True, PARAMETERIZED, steal, False)
    if name == "decent-stat":
        return Deployment(name, True, False, PARAMETERIZED, steal, False)
    if name == "cent-stat":
        return Deployment(name, False, False, DelayPolicy(float(options.get("constant_wait", 3.0))), False, True)
    if name == "cent-dyna":
        return Deployment(name, False, True, PARAMETERIZED, False, True)
    raise ConfigError(f"unknown deployment {name}")


@dataclass
class JmRuntime:
    state: JmState
    sub: str
    domain: str
    queue: JmQueue
    af: af_mod.AfController
    started: bool = False
    enqueued_at: Dict[TaskId, float] = field(default_factory=dict)
    steals: Dict[str, "StealCtx"] = field(default_factory=dict)
    timers: Dict[str, float] = field(default_factory=dict)

    @property
    def id(self) -> str:
        return self.state.jm_id

    @property
    def alive(self) -> bool:
        return self.state.alive


@dataclass
class JobRuntime:
    job: DagJob
    ordinal: int
    store: ConsistentStore
    jms: Dict[str, JmRuntime] = field(default_factory=dict)
    by_sub: Dict[str, JmRuntime] = field(default_factory=dict)
    pending_reports: Dict[str, List[Tuple[TaskId, str]]] = field(default_factory=lambda: defaultdict(list))
    pending_replacements: Set[str] = field(default_factory=set)
    finished: bool = False
    attempt: int = 0
    epoch: int = 0  # bumped by every primary election

    def primary(self) -> Optional[JmRuntime]:
        for jm in self.jms.values():
            if jm.alive and jm.state.role is Role.PRIMARY:
                return jm
        return None


@dataclass
class StealCtx:
    sid: int
    job: str
    thief: str
    generation: int
    container: str
    desc: ContainerDescriptor
    victims: List[str]
    idx: int = 0
    started: float = 0.0
    sent: float = 0.0
    epoch: int = 0


@dataclass
class RunInfo:
    container: str
    start: float
    end: float
    token: int
    jm: str


class Simulation:
    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.params = config.params
        self.deployment = deployment_preset(config.deployment, config.options)
        if config.injections and not self.deployment.decentralized:
            raise ConfigError("load injection needs per-data-center schedulers")
        self.topology: ClusterTopology = topology_from_dict(config.topology)
        ss = np.random.SeedSequence(config.seed)
        streams = ss.spawn(6)
        self.rng_workload = np.random.default_rng(streams[0])
        self.rng_bandwidth = np.random.default_rng(streams[1])
        self.rng_latency = np.random.default_rng(streams[2])
        self.rng_failures = np.random.default_rng(streams[3])
        interleave = np.random.default_rng(streams[4]) if config.options.get("interleave") else None
        self.queue = EventQueue(interleave)
        self.rack_of = {n.id: n.rack_id for n in self.topology.nodes.values()}
        self.node_of = {c.id: c.node_id for c in self.topology.containers.values()}
        self.delays = config.delays
        self.resample = float(config.options.get("resample_interval", 5.0))

        if self.deployment.decentralized:
            self.schedulers = {
                dc.id: FairScheduler(dc.id, [c.id for c in dc.containers], bool(config.options.get("locality_aware", True)))
                for dc in self.topology.datacenters
            }
        else:
            self.schedulers = {GLOBAL: FairScheduler(GLOBAL, list(self.topology.containers), bool(config.options.get("locality_aware", True)))}

        self.jobs: Dict[str, JobRuntime] = {}
        self.sub_owner: Dict[str, Tuple[str, str]] = {}
        self.tenants: Dict[str, List[str]] = defaultdict(list)
        self.running: Dict[TaskId, RunInfo] = {}
        self.attempts: Dict[TaskId, int] = defaultdict(int)
        self.expected_reexec: Dict[str, Set[TaskId]] = defaultdict(set)
        # static deployments fix a sub-job's grant when it starts: an equal share of the domain
        self.static_desire: Dict[str, int] = {}
        self._token = itertools.count(1)
        self._steal_ids = itertools.count(1)

        self.trace: List[Dict] = []
        self.periods: List[Dict] = []
        self.protocol: List[Dict] = []
        self.recovery: List[Dict] = []
        self.steal_stats = {"requests": 0, "replies": 0, "successes": 0, "tasks": 0, "delays": []}
        self.cost = CostTrace()
        self.node_up_since: Dict[str, Optional[float]] = {n: 0.0 for n in self.topology.nodes}
        self.node_uptime: Dict[str, float] = {n: 0.0 for n in self.topology.nodes}
        self.rejected: List[str] = []
        self.all_jobs: List[DagJob] = []
        self._pending_arrivals = 0
        self._clock_running = False
        self.end_time = 0.0

    # ------------------------------------------------------------------ setup

    def _load_jobs(self) -> List[Tuple[DagJob, float]]:
        wl = self.config.workload
        if "jobs" in wl:
            out = []
            for i, doc in enumerate(wl["jobs"]):
                job = job_from_dict(doc, self.topology, ordinal=i)
                out.append((job, job.release_time))
            return out
        return generate_workload(wl.get("generator", {}), self.rng_workload, self.topology)

    def _schedule_inputs(self) -> None:
        for i, (job, at) in enumerate(self._load_jobs()):
            try:
                admit(job, self.params)
            except AdmissionError as e:
                self.rejected.append(job.id)
                self._log(at, job.id, "rejected", "master", {"reason": str(e)})
                continue
            self.all_jobs.append(job)
            self._pending_arrivals += 1
            self.queue.push(at, Prio.ARRIVAL, "arrival", (job, i))
        for ev in inject_failures(self.config.failures, self.rng_failures, self.topology):
            self.queue.push(ev.time, Prio.FAILURE, "failure", ev)
        for inj in self.config.injections:
            if inj["dc"] not in self.topology.dcs:
                raise ConfigError(f"unknown data center {inj['dc']}")
            self.queue.push(float(inj["time"]), Prio.ARRIVAL, "inject", inj)

    # --------------------------------------------------------------- running

    def run(self) -> MetricsReport:
        self._schedule_inputs()
        max_time = float(self.config.options.get("max_time", 1e6))
        handlers = {
            "arrival": self._on_arrival,
            "inject": self._on_inject,
            "inject_end": self._on_inject_end,
            "failure": self._on_failure,
            "completion": self._on_completion,
            "deliver": self._on_deliver,
            "steal_req": self._on_steal_request,
            "steal_reply": self._on_steal_reply,
            "detect": self._on_detect,
            "spawn": self._on_spawn,
            "resubmit": self._on_resubmit,
            "node_restart": self._on_node_restart,
            "boundary": self._on_boundary,
            "tick": self._on_tick,
            "update": self._on_update_event,
        }
        while len(self.queue):
            if not self._active() and self.queue.peek_time() is not None:
                break
            ev = self.queue.pop()
            if ev.time > max_time:
                log.warning("stopping at max_time %s", max_time)
                break
            handlers[ev.kind](ev.data)
        self.end_time = self.queue.now
        return self._report()

    def _active(self) -> bool:
        return self._pending_arrivals > 0 or any(not j.finished for j in self.jobs.values())

    def _ensure_clock(self) -> None:
        if self._clock_running:
            return
        self._clock_running = True
        L = self.params.period_length
        now = self.queue.now
        nxt = math.ceil(now / L - 1e-12) * L
        self.queue.push(nxt, Prio.BOUNDARY, "boundary", None)
        self.queue.push(math.ceil(now - 1e-12), Prio.TICK, "tick", None)

    # ---------------------------------------------------------------- logging

    def _log(self, time: float, job: Optional[str], event: str, actor: str, payload: Dict) -> None:
        self.protocol.append({"time": round(time, 6), "job": job, "event": event, "actor": actor, "payload": payload})

    # ------------------------------------------------------------------ store

    def _append(self, jr: JobRuntime, body, src_dc: str) -> None:
        upd = jr.store.append(body)
        self._log(self.queue.now, jr.job.id, type(body).__name__, src_dc, _body_payload(body) | {"seq": upd.seq})
        for replica in sorted(jr.store.replicas):
            if replica == src_dc:
                delay = 0.0
            else:
                delay = message_latency(self.delays["store"], self.topology.link(src_dc, replica), self.rng_latency)
            self.queue.push(self.queue.now + delay, Prio.MESSAGE, "deliver", (jr.job.id, jr.attempt, replica, upd))

    def _on_deliver(self, data) -> None:
        job_id, attempt, replica, upd = data
        jr = self.jobs[job_id]
        if jr.finished or attempt != jr.attempt:
            return
        before = jr.store.replicas[replica].applied_seq
        info = jr.store.deliver(replica, upd)
        applied = jr.store.log[before:info.applied_seq]
        jm = self._jm_in_dc(jr, replica)
        if jm is None or not jm.alive:
            return
        kick = False
        progress = False
        for u in applied:
            b = u.body
            if isinstance(b, TaskReassigned):
                if b.dst == jm.id:
                    t = jr.job.task(b.task)
                    if t.state is TaskState.WAITING and b.task not in jm.queue.waiting and jr.store.head.task_map.get(b.task) == jm.id:
                        self._enqueue(jm, t)
                        kick = True
                elif b.src == jm.id:
                    jm.queue.waiting.pop(b.task, None)
                    jm.enqueued_at.pop(b.task, None)
            elif isinstance(b, PartitionDone) and jm.state.role is Role.PRIMARY:
                progress = True
        if progress:
            self._primary_progress(jr, jm)
        if kick:
            self._kick(jm)

    def _jm_in_dc(self, jr: JobRuntime, dc: str) -> Optional[JmRuntime]:
        for jm in jr.jms.values():
            if jm.state.dc_id == dc and jm.alive:
                return jm
        return None

    # ---------------------------------------------------------------- arrival

    def _choose_host(self, dc: str, ordinal: int) -> Optional[str]:
        nodes = [n.id for n in self.topology.dcs[dc].nodes if n.alive]
        if not nodes:
            return None
        return nodes[ordinal % len(nodes)]

    def _submit_dc(self, job: DagJob) -> str:
        if job.submit_dc and job.submit_dc in self.topology.dcs:
            return job.submit_dc
        weight = defaultdict(float)
        for sid, st in job.stages.items():
            if not st.predecessors:
                for t in st.tasks:
                    for n in t.preferred_nodes:
                        weight[self.topology.nodes[n].dc_id] += 1
        if weight:
            return sorted(weight, key=lambda d: (-weight[d], d))[0]
        return self.topology.dc_ids[0]

    def _on_arrival(self, data) -> None:
        job, ordinal = data
        self._pending_arrivals -= 1
        self._ensure_clock()
        jr = JobRuntime(job, ordinal, ConsistentStore(job.id, []))
        self.jobs[job.id] = jr
        self._log(self.queue.now, job.id, "submit", self._submit_dc(job), {"release": job.release_time})
        self._start_job(jr)

    def _start_job(self, jr: JobRuntime) -> None:
        job = jr.job
        submit = self._submit_dc(job)
        gen = jr.attempt * 100
        if self.deployment.decentralized:
            dcs = [submit] + [d for d in self.topology.dc_ids if d != submit]
        else:
            dcs = [submit]
            if self._choose_host(submit, jr.ordinal) is None:
                live = [d for d in self.topology.dc_ids if self._choose_host(d, jr.ordinal)]
                dcs = live[:1]
        jr.store = ConsistentStore(job.id, [d for d in dcs if self._choose_host(d, jr.ordinal)])
        for i, dc in enumerate(dcs):
            host = self._choose_host(dc, jr.ordinal)
            if host is None:
                continue
            role = Role.PRIMARY if not jr.jms else Role.SEMI_ACTIVE
            self._new_jm(jr, dc, role, host, gen)
        pjm = jr.primary()
        if pjm is None:
            self._abort(jr, "no live host for a job manager")
            return
        for jm in sorted(jr.jms.values(), key=lambda j: j.id):
            self._append(jr, RoleChange(jm.id, jm.state.role), pjm.state.dc_id)
        self._primary_progress(jr, pjm)

    def _new_jm(self, jr: JobRuntime, dc: str, role: Role, host: str, gen: int) -> JmRuntime:
        domain = dc if self.deployment.decentralized else GLOBAL
        sub = f"{jr.job.id}@{domain}"
        fs = self.schedulers[domain]
        state = JmState(f"{dc}#{gen}", dc, role, JmStatus.ALIVE, host, gen)
        jm = JmRuntime(state, sub, domain, JmQueue(state.jm_id, last_update=self.queue.now),
                       af_mod.AfController(self.params, max(1, fs.capacity())))
        jr.jms[jm.id] = jm
        jr.by_sub[sub] = jm
        self.sub_owner[sub] = (jr.job.id, domain)
        return jm

    # ---------------------------------------------------------- stage release

    def _primary_progress(self, jr: JobRuntime, pjm: JmRuntime) -> None:
        if jr.finished:
            return
        job = jr.job
        info = jr.store.replicas.get(pjm.state.dc_id)
        if info is None:
            return
        done_view = set(info.partition_list)
        if job.is_complete() and all(t.id in done_view for t in job.tasks()):
            self._complete(jr)
            return
        for sid in job.topological_order():
            st = job.stages[sid]
            pending = [t for t in st.tasks if t.state is TaskState.UNRELEASED]
            if not pending:
                continue
            ok = all(t.id in done_view and t.state is TaskState.DONE
                     for pred in st.predecessors for t in job.stages[pred].tasks)
            if not ok:
                continue
            for t in pending:
                t.transition(TaskState.WAITING)
            if sid not in info.stage_ids and sid not in jr.store.head.stage_ids:
                self._assign_new_stage(jr, pjm, sid, pending)
            else:
                for t in pending:
                    owner = jr.store.head.task_map.get(t.id, pjm.id)
                    owner = self._resolve_owner(jr, owner, pjm)
                    self._append(jr, TaskReassigned(t.id, owner, owner), pjm.state.dc_id)

    def _resolve_owner(self, jr: JobRuntime, owner: str, pjm: JmRuntime) -> str:
        if owner in jr.jms:
            return owner
        return pjm.id

    def _assign_new_stage(self, jr: JobRuntime, pjm: JmRuntime, sid: int, tasks: List[Task]) -> None:
        job = jr.job
        st = job.stages[sid]
        jm_for_dc = {jm.state.dc_id: jm for jm in jr.jms.values() if jm.state.status is not JmStatus.FAILED or jm.id in jr.pending_replacements}
        live_dcs = {jm.state.dc_id for jm in jr.jms.values()}
        dist: Dict[str, float] = defaultdict(float)
        if st.predecessors:
            for pred in st.predecessors:
                for pt in job.stages[pred].tasks:
                    if pt.location:
                        dist[self.topology.nodes[pt.location].dc_id] += 1.0
        else:
            for t in st.tasks:
                for n in t.preferred_nodes:
                    dist[self.topology.nodes[n].dc_id] += max(t.input_bytes, 1.0)
        if self.deployment.decentralized:
            dist = {d: w for d, w in dist.items() if d in live_dcs}
            counts = initial_assignment(len(st.tasks), dist, pjm.state.dc_id)
        else:
            counts = {pjm.state.dc_id: len(st.tasks)}

        def home(t: Task) -> Optional[str]:
            if st.predecessors or not t.preferred_nodes:
                return None
            return self.topology.nodes[next(iter(sorted(t.preferred_nodes)))].dc_id

        owners = assign_stage_tasks(st, counts, home)
        if st.predecessors:
            pred_nodes = sorted({pt.location for pred in st.predecessors for pt in job.stages[pred].tasks if pt.location})
            for t in st.tasks:
                dc = owners[t.id]
                local = [n for n in pred_nodes if self.topology.nodes[n].dc_id == dc] if self.deployment.decentralized else pred_nodes
                t.preferred_nodes = frozenset(local or pred_nodes)
        self._append(jr, StageFrontier((sid,)), pjm.state.dc_id)
        for t in st.tasks:
            dc = owners[t.id]
            jm = self._jm_in_dc(jr, dc) if self.deployment.decentralized else pjm
            if jm is None:
                jm = jm_for_dc.get(dc, pjm)
            self._append(jr, TaskReassigned(t.id, None, jm.id), pjm.state.dc_id)

    def _complete(self, jr: JobRuntime) -> None:
        job = jr.job
        job.completion_time = self.queue.now
        jr.finished = True
        self._log(self.queue.now, job.id, "complete", "pJM", {"response": round(job.completion_time - job.release_time, 6)})
        self._teardown(jr)

    def _abort(self, jr: JobRuntime, reason: str) -> None:
        jr.job.aborted = True
        jr.finished = True
        self._log(self.queue.now, jr.job.id, "abort", "master", {"reason": reason})
        for t in jr.job.tasks():
            info = self.running.pop(t.id, None)
            if info:
                self.topology.containers[info.container].release(t.id)
        self._teardown(jr)

    def _teardown(self, jr: JobRuntime) -> None:
        for sub in sorted(jr.by_sub):
            domain = self.sub_owner[sub][1]
            fs = self.schedulers[domain]
            for c in fs.drop(sub):
                self._return_container(fs, c)
        for jm in jr.jms.values():
            jm.steals.clear()

    def _return_container(self, fs: FairScheduler, cid: str) -> None:
        k = fs.release(cid)
        if k is not None:
            self._schedule_update(cid)

    # -------------------------------------------------------------- placement

    def _enqueue(self, jm: JmRuntime, t: Task) -> None:
        jm.queue.add(t)
        jm.enqueued_at[t.id] = self.queue.now

    def _kick(self, jm: JmRuntime) -> None:
        fs = self.schedulers[jm.domain]
        for cid in fs.usable(jm.sub):
            if self.topology.containers[cid].free > EPS:
                self._schedule_update(cid)

    def _schedule_update(self, cid: str, at: Optional[float] = None) -> None:
        self.queue.push(self.queue.now if at is None else at, Prio.UPDATE, "update", cid)

    def _owner_jm(self, cid: str) -> Tuple[Optional[JobRuntime], Optional[JmRuntime]]:
        for fs in self.schedulers.values():
            sub = fs.owner.get(cid)
            if sub is not None:
                if sub not in self.sub_owner:
                    return None, None
                job_id, _ = self.sub_owner[sub]
                jr = self.jobs[job_id]
                return jr, jr.by_sub.get(sub)
        return None, None

    def _domain_of(self, cid: str) -> FairScheduler:
        c = self.topology.containers[cid]
        return self.schedulers[c.dc_id if self.deployment.decentralized else GLOBAL]

    def _on_update_event(self, cid: str) -> None:
        c = self.topology.containers[cid]
        if not self.topology.nodes[c.node_id].alive:
            return
        fs = self._domain_of(cid)
        jr, jm = self._owner_jm(cid)
        if jr is None or jm is None or jr.finished or not jm.alive:
            return
        jm.timers.pop(cid, None)
        if cid in fs.draining:
            if not c.running:
                self._return_container(fs, cid)
            return
        if c.free <= EPS:
            return
        desc = ContainerDescriptor.of(c)
        placements = on_update(jm.queue, desc, self.params, self.queue.now, self.rack_of, None,
                               self.deployment.policy, jm.enqueued_at)
        for p in placements:
            self._launch(jr, jm, p)
        if jm.queue.waiting:
            self._arm_timer(jm, cid)
        elif not placements:
            self._maybe_steal(jr, jm, c)

    def _arm_timer(self, jm: JmRuntime, cid: str) -> None:
        """Wake the container up when the next waiting task crosses a delay threshold."""
        best = math.inf
        pol = self.deployment.policy
        for t in jm.queue.waiting.values():
            for th in (pol.rack_threshold(t, self.params), pol.any_threshold(t, self.params)):
                if th > t.wait + EPS:
                    best = min(best, th - t.wait)
        if best is math.inf:
            return
        at = self.queue.now + best
        if jm.timers.get(cid, math.inf) <= at + EPS:
            return
        jm.timers[cid] = at
        self._schedule_update(cid, at)

    def _fetch(self, t: Task, c: Container) -> float:
        job = self.jobs[t.id.job].job
        st = job.stages[t.id.stage]
        groups: Dict[Tuple[str, str], float] = defaultdict(float)
        dst_node = c.node_id
        if not st.predecessors:
            src = sorted(t.preferred_nodes)[0] if t.preferred_nodes else None
            if src is not None and src != dst_node:
                src_dc = self.topology.nodes[src].dc_id
                groups[(src_dc, c.dc_id)] += t.input_bytes
        else:
            preds = [pt for pred in sorted(st.predecessors) for pt in job.stages[pred].tasks]
            share = t.input_bytes / len(preds) if preds else 0.0
            for pt in preds:
                if pt.location is None or pt.location == dst_node:
                    continue
                groups[(self.topology.nodes[pt.location].dc_id, c.dc_id)] += share
        longest = 0.0
        for (src_dc, dst_dc), nbytes in sorted(groups.items()):
            if nbytes <= 0:
                continue
            self.cost.add_transfer(src_dc, dst_dc, nbytes)
            dt = transfer_time(nbytes, self.topology.link(src_dc, dst_dc), self.rng_bandwidth, self.resample)
            longest = max(longest, dt)
        return longest

    def _launch(self, jr: JobRuntime, jm: JmRuntime, p: Placement, tier: Optional[str] = None) -> None:
        t = p.task
        c = self.topology.containers[p.container]
        pre = c.free
        c.place(t.id, t.r)
        t.transition(TaskState.RUNNING, container=c.id)
        jm.enqueued_at.pop(t.id, None)
        fetch = self._fetch(t, c)
        now = self.queue.now
        token = next(self._token)
        self.running[t.id] = RunInfo(c.id, now, now + fetch + t.p, token, jm.id)
        self.attempts[t.id] += 1
        self.queue.push(now + fetch + t.p, Prio.COMPLETION, "completion", (t.id, token))
        self.trace.append({
            "time": round(now, 6),
            "job": t.id.job,
            "task": str(t.id),
            "jm": jm.id,
            "container": c.id,
            "tier": tier or p.tier,
            "wait": round(p.wait, 6),
            "r": t.r,
            "p": t.p,
            "locality": p.locality.value,
            "pre_free": round(pre, 9),
            "policy": "constant" if self.deployment.policy.constant_wait is not None else "parameterized",
            "attempt": self.attempts[t.id],
            "fetch": round(fetch, 6),
        })

    def _on_completion(self, data) -> None:
        tid, token = data
        info = self.running.get(tid)
        if info is None or info.token != token:
            return
        del self.running[tid]
        jr = self.jobs[tid.job]
        c = self.topology.containers[info.container]
        c.release(tid)
        t = jr.job.task(tid)
        t.transition(TaskState.DONE, location=c.node_id)
        owner = jr.store.head.task_map.get(tid, info.jm)
        jm = jr.jms.get(owner)
        if jm is not None and jm.alive:
            self._append(jr, PartitionDone(tid, c.node_id), jm.state.dc_id)
        else:
            jr.pending_reports[owner].append((tid, c.node_id))
        self._schedule_update(c.id)

    # --------------------------------------------------------------- stealing

    def _backlog_view(self, jr: JobRuntime, jm: JmRuntime) -> Dict[str, int]:
        info = jr.store.replicas.get(jm.state.dc_id)
        if info is None:
            return {}
        backlog: Dict[str, int] = defaultdict(int)
        for tid, owner in info.task_map.items():
            if tid.stage in info.stage_ids and tid not in info.partition_list:
                backlog[owner] += 1
        return backlog

    def _maybe_steal(self, jr: JobRuntime, jm: JmRuntime, c: Container) -> None:
        if not self.deployment.stealing or c.id in jm.steals:
            return
        info = jr.store.replicas.get(jm.state.dc_id)
        if info is None:
            return
        backlog = self._backlog_view(jr, jm)
        victims = [v for v in info.roles if v != jm.id and backlog.get(v, 0) > 0]
        victims.sort(key=lambda v: (-backlog[v], v))
        if not victims:
            return
        now = self.queue.now
        ctx = StealCtx(next(self._steal_ids), jr.job.id, jm.id, jm.state.generation, c.id,
                       ContainerDescriptor.of(c), victims, 0, now, now, jr.epoch)
        jm.steals[c.id] = ctx
        self._send_steal(jr, jm, ctx)

    def _send_steal(self, jr: JobRuntime, thief: JmRuntime, ctx: StealCtx) -> None:
        victim = ctx.victims[ctx.idx]
        vdc = victim.split("#")[0]
        ctx.sent = self.queue.now
        ctx.desc = ContainerDescriptor.of(self.topology.containers[ctx.container])
        lat = message_latency(self.delays["steal"], self.topology.link(thief.state.dc_id, vdc), self.rng_latency)
        self.steal_stats["requests"] += 1
        self._log(self.queue.now, jr.job.id, "steal_request", thief.id,
                  {"steal": ctx.sid, "victim": victim, "container": ctx.container, "free": round(ctx.desc.free, 9)})
        self.queue.push(self.queue.now + lat, Prio.MESSAGE, "steal_req", (jr.job.id, jr.attempt, ctx))

    def _on_steal_request(self, data) -> None:
        job_id, attempt, ctx = data
        jr = self.jobs[job_id]
        victim_id = ctx.victims[ctx.idx]
        victim = jr.jms.get(victim_id)
        granted: List[Placement] = []
        # granting is a conditional store write: it only succeeds while the
        # thief is still a registered job manager of the job
        if (not jr.finished and attempt == jr.attempt and victim is not None and victim.alive
                and ctx.thief in jr.store.head.roles):
            reply = on_receive_steal(victim.queue, ctx.desc, self.params, self.queue.now, self.rack_of,
                                     False, self.deployment.policy, victim.enqueued_at)
            granted = reply.granted
            for p in granted:
                victim.enqueued_at.pop(p.task.id, None)
                self._append(jr, TaskReassigned(p.task.id, victim.id, ctx.thief), victim.state.dc_id)
        vdc = victim_id.split("#")[0]
        tdc = ctx.thief.split("#")[0]
        # a request to a dead manager fails at the transport; the thief sees an empty reply
        event = "steal_grant" if victim is not None and victim.alive else "steal_unreachable"
        self._log(self.queue.now, job_id, event, victim_id,
                  {"steal": ctx.sid, "thief": ctx.thief, "granted": [str(p.task.id) for p in granted]})
        lat = message_latency(self.delays["steal"], self.topology.link(vdc, tdc), self.rng_latency)
        self.queue.push(self.queue.now + lat, Prio.MESSAGE, "steal_reply", (job_id, attempt, ctx, granted))

    def _on_steal_reply(self, data) -> None:
        job_id, attempt, ctx, granted = data
        jr = self.jobs[job_id]
        self.steal_stats["replies"] += 1
        thief = jr.jms.get(ctx.thief)
        valid = (not jr.finished and attempt == jr.attempt and thief is not None and thief.alive
                 and thief.state.generation == ctx.generation)
        self._log(self.queue.now, job_id, "steal_reply", ctx.thief,
                  {"steal": ctx.sid, "victim": ctx.victims[ctx.idx], "granted": [str(p.task.id) for p in granted],
                   "accepted": bool(valid)})
        if not valid:
            return
        if granted and ctx.epoch != jr.epoch:
            # an election happened while the steal was in flight: drop the
            # direct placement, keep what the store says we own, and retry
            thief.steals.pop(ctx.container, None)
            for p in granted:
                t = p.task
                if t.state is TaskState.WAITING and jr.store.head.task_map.get(t.id) == thief.id \
                        and t.id not in thief.queue.waiting:
                    self._enqueue(thief, t)
            self._log(self.queue.now, job_id, "steal_discarded", ctx.thief, {"steal": ctx.sid, "reason": "election"})
            self._schedule_update(ctx.container)
            return
        if granted:
            self.steal_stats["successes"] += 1
            self.steal_stats["tasks"] += len(granted)
            self.steal_stats["delays"].append(self.queue.now - ctx.started)
            thief.steals.pop(ctx.container, None)
            c = self.topology.containers[ctx.container]
            fs = self._domain_of(c.id)
            usable = (self.topology.nodes[c.node_id].alive and fs.owner.get(c.id) == thief.sub
                      and c.id not in fs.draining)
            for p in granted:
                t = p.task
                if t.state is not TaskState.WAITING or jr.store.head.task_map.get(t.id) != thief.id:
                    continue
                thief.queue.waiting.pop(t.id, None)
                if usable and t.r <= c.free + EPS:
                    self._launch(jr, thief, Placement(t, c.id, "stolen", p.locality, p.wait, c.free), "stolen")
                else:
                    self._enqueue(thief, t)
                    self._kick(thief)
            return
        ctx.idx += 1
        if ctx.idx < len(ctx.victims):
            self._send_steal(jr, thief, ctx)
        else:
            thief.steals.pop(ctx.container, None)

    # ----------------------------------------------------------- allocation

    def _busy(self, cid: str) -> bool:
        fs = self._domain_of(cid)
        owner = fs.owner.get(cid)
        if owner is not None and owner not in self.sub_owner:
            return True  # injected tenant
        return bool(self.topology.containers[cid].running)

    def _idle_eta(self, cid: str) -> float:
        c = self.topology.containers[cid]
        if not c.running:
            return self.queue.now
        eta = self.queue.now
        for tid in c.running:
            info = self.running.get(tid)
            if info is not None:
                t = self.jobs[tid.job].job.task(tid)
                eta = max(eta, info.start + t.p)
        return eta

    def _on_boundary(self, _) -> None:
        now = self.queue.now
        q_index = int(round(now / self.params.period_length))
        for domain in sorted(self.schedulers):
            fs = self.schedulers[domain]
            desires: Dict[str, int] = {}
            frozen: List[str] = []
            rows = {}
            prefs: Dict[str, Set[str]] = {}
            n_claimants = len(self.tenants.get(domain, [])) + sum(
                1 for sub, (job_id, dom) in self.sub_owner.items()
                if dom == domain and not self.jobs[job_id].finished)
            for sub, (job_id, dom) in sorted(self.sub_owner.items()):
                if dom != domain:
                    continue
                jr = self.jobs[job_id]
                if jr.finished:
                    continue
                jm = jr.by_sub.get(sub)
                if jm is None:
                    continue
                if not jm.alive:
                    if fs.holdings(sub):
                        frozen.append(sub)
                    continue
                prefs[sub] = {n for t in jm.queue.waiting.values() for n in t.preferred_nodes}
                jm.af.max_containers = max(1, fs.capacity())
                if self.deployment.adaptive:
                    rec = None
                    if jm.started:
                        rec = jm.af.close_period()
                    else:
                        jm.started = True
                    desires[sub] = jm.af.desire
                    rows[sub] = (jr, jm, rec)
                else:
                    if sub not in self.static_desire:
                        self.static_desire[sub] = max(1, fs.capacity() // max(1, n_claimants))
                    desires[sub] = self.static_desire[sub]
                    if len(fs.holdings(sub)) >= desires[sub]:
                        # a static grant is held for the job's lifetime, never resized
                        frozen.append(sub)
                    jm.started = True
                    rows[sub] = (jr, jm, None)
            for key in self.tenants.get(domain, []):
                desires[key] = fs.capacity()
            if not desires and not frozen:
                continue
            plan = fs.rebalance(desires, self._busy, lambda k, c: self.node_of[c] in prefs.get(k, ()), frozen, self._idle_eta)
            for sub, (jr, jm, rec) in rows.items():
                jm.af.allocation = plan.target.get(sub, 0)
                self.periods.append({
                    "time": round(now, 6),
                    "period": q_index,
                    "job": jr.job.id,
                    "dc": domain,
                    "jm": jm.id,
                    "q": rec.q if rec else 0,
                    "d": rec.desire if rec else "",
                    "a": rec.allocation if rec else "",
                    "u": round(rec.utilization, 6) if rec else "",
                    "class": af_mod.classify_period(rec, self.params.delta).value if rec else "",
                    "next_d": desires[sub],
                    "granted": len(plan.granted.get(sub, [])) - len(plan.drain.get(sub, [])),
                    "reclaimed": " ".join(plan.reclaim_now.get(sub, [])),
                    "draining": " ".join(plan.drain.get(sub, [])),
                })
            for sub in sorted(rows):
                for cid in fs.usable(sub):
                    if self.topology.containers[cid].free > EPS:
                        self._schedule_update(cid)
        if self._active():
            self.queue.push(now + self.params.period_length, Prio.BOUNDARY, "boundary", None)
        else:
            self._clock_running = False

    def _on_tick(self, _) -> None:
        for jr in self.jobs.values():
            if jr.finished:
                continue
            for sub, jm in jr.by_sub.items():
                if not jm.alive or not jm.started:
                    continue
                fs = self.schedulers[jm.domain]
                used = [1.0 - self.topology.containers[c].free for c in fs.holdings(sub)]
                jm.af.sample(used, bool(jm.queue.waiting))
        if self._active():
            self.queue.push(self.queue.now + 1.0, Prio.TICK, "tick", None)

    # -------------------------------------------------------------- injection

    def _on_inject(self, inj: Dict) -> None:
        dc = inj["dc"]
        n = int(inj.get("tenants", 3))
        keys = [f"~load-{dc}-{len(self.tenants[dc]) + i}" for i in range(n)]
        self.tenants[dc].extend(keys)
        self._log(self.queue.now, None, "inject", dc, {"tenants": keys})
        if inj.get("duration") is not None:
            self.queue.push(self.queue.now + float(inj["duration"]), Prio.ARRIVAL, "inject_end", (dc, keys))

    def _on_inject_end(self, data) -> None:
        dc, keys = data
        fs = self.schedulers[dc]
        for k in keys:
            if k in self.tenants[dc]:
                self.tenants[dc].remove(k)
            for c in fs.drop(k):
                self._return_container(fs, c)

    # --------------------------------------------------------------- failures

    def _on_failure(self, ev: FailureEvent) -> None:
        node = ev.node
        jr = self.jobs.get(ev.job) if ev.job else None
        jm = None
        if node is None:
            if jr is None or jr.finished:
                self._log(self.queue.now, ev.job, "failure_skipped", "injector", {"target": ev.target})
                return
            jm = self._resolve_target(jr, ev.target)
            if jm is None:
                self._log(self.queue.now, ev.job, "failure_skipped", "injector", {"target": ev.target})
                return
            node = jm.state.host
        if ev.kind == "process":
            if jm is not None:
                self._log(self.queue.now, jr.job.id, "jm_crash", jm.id, {"node": node})
                self._fail_jm(jr, jm)
            return
        self._kill_node(node)

    def _resolve_target(self, jr: JobRuntime, target: Optional[str]) -> Optional[JmRuntime]:
        live = sorted((j for j in jr.jms.values() if j.alive), key=lambda j: j.state.dc_id)
        if target in (None, "pJM"):
            return jr.primary()
        if not self.deployment.decentralized:
            # a centralized job has a single manager; any targeted kill hits it
            return live[0] if live else None
        if target == "sJM":
            semis = [j for j in live if j.state.role is Role.SEMI_ACTIVE]
            return semis[0] if semis else None
        for j in live:
            if j.state.dc_id == target:
                return j
        return None

    def _kill_node(self, node_id: str) -> None:
        node = self.topology.nodes[node_id]
        if not node.alive:
            return
        now = self.queue.now
        node.alive = False
        self.node_uptime[node_id] += now - (self.node_up_since[node_id] or 0.0)
        self.node_up_since[node_id] = None
        killed: Dict[str, List[TaskId]] = defaultdict(list)
        dead_containers = [c for c in self.topology.containers.values() if c.node_id == node_id]
        for c in dead_containers:
            for tid in sorted(c.running):
                self.running.pop(tid, None)
                c.release(tid)
                t = self.jobs[tid.job].job.task(tid)
                t.transition(TaskState.WAITING)
                killed[tid.job].append(tid)
            self._domain_of(c.id).remove_container(c.id)
        self._log(now, None, "host_terminated", node_id, {"containers": [c.id for c in dead_containers]})
        for job_id, jr in sorted(self.jobs.items()):
            if jr.finished:
                continue
            job = jr.job
            lost = [t.id for t in job.tasks() if t.state is TaskState.DONE and t.location == node_id]
            if not lost and not killed.get(job_id):
                continue
            redo = recompute_closure(job, lost)
            for tid in sorted(redo):
                job.task(tid).transition(TaskState.WAITING)
            self.expected_reexec[job_id] |= set(killed.get(job_id, [])) | redo
            owner_dc = self._any_live_dc(jr)
            if redo and owner_dc is not None:
                self._append(jr, PartitionLost(tuple(sorted(redo))), owner_dc)
            self._log(now, job_id, "outputs_lost", node_id,
                      {"lost": [str(t) for t in lost], "recompute": [str(t) for t in sorted(redo)],
                       "killed": [str(t) for t in killed.get(job_id, [])]})
            self._unrelease_blocked(jr)
            for t in job.tasks():
                if t.state is not TaskState.WAITING:
                    continue
                owner = jr.store.head.task_map.get(t.id)
                jm = jr.jms.get(owner) if owner else None
                if jm is not None and jm.alive and t.id not in jm.queue.waiting:
                    self._enqueue(jm, t)
                    self._kick(jm)
        for job_id, jr in sorted(self.jobs.items()):
            if jr.finished:
                continue
            for jm in sorted(jr.jms.values(), key=lambda j: j.id):
                if jm.alive and jm.state.host == node_id:
                    self._fail_jm(jr, jm)
        if self.delays.get("node_restart") is not None:
            self.queue.push(now + float(self.delays["node_restart"]), Prio.RECOVERY, "node_restart", node_id)

    def _any_live_dc(self, jr: JobRuntime) -> Optional[str]:
        p = jr.primary()
        if p is not None:
            return p.state.dc_id
        for jm in sorted(jr.jms.values(), key=lambda j: j.id):
            if jm.alive:
                return jm.state.dc_id
        return None

    def _unrelease_blocked(self, jr: JobRuntime) -> None:
        """Waiting tasks whose inputs are gone go back to Unreleased until the
        producing stage is recomputed."""
        job = jr.job
        for sid in job.topological_order():
            st = job.stages[sid]
            if all(job.stages[p].done() for p in st.predecessors):
                continue
            for t in st.tasks:
                if t.state is TaskState.WAITING:
                    t.transition(TaskState.UNRELEASED)
                    for jm in jr.jms.values():
                        jm.queue.waiting.pop(t.id, None)
                        jm.enqueued_at.pop(t.id, None)

    def _fail_jm(self, jr: JobRuntime, jm: JmRuntime) -> None:
        now = self.queue.now
        jm.state.status = JmStatus.FAILED
        jm.steals.clear()
        entry = {"job": jr.job.id, "failed": jm.id, "role": jm.state.role.value, "dc": jm.state.dc_id,
                 "failed_at": round(now, 6)}
        self.recovery.append(entry)
        self._log(now, jr.job.id, "jm_failed", jm.id, {"role": jm.state.role.value, "host": jm.state.host})
        kind = "resubmit" if self.deployment.restart_on_failure else "detect"
        self.queue.push(now + float(self.delays["detection"]), Prio.RECOVERY, "detect", (jr.job.id, jr.attempt, jm.id, kind))

    def _entry(self, job_id: str, jm_id: str) -> Dict:
        for e in reversed(self.recovery):
            if e["job"] == job_id and e["failed"] == jm_id:
                return e
        return {}

    def _on_detect(self, data) -> None:
        job_id, attempt, jm_id, kind = data
        jr = self.jobs[job_id]
        if jr.finished or attempt != jr.attempt:
            return
        now = self.queue.now
        failed = jr.jms[jm_id]
        entry = self._entry(job_id, jm_id)
        entry["detected_at"] = round(now, 6)
        if kind == "resubmit":
            self._restart_job(jr, failed)
            return
        others = [j.state for j in jr.jms.values() if j.id != jm_id]
        detector = jr.primary()
        if detector is None:
            live = sorted((j for j in jr.jms.values() if j.alive), key=lambda j: j.state.dc_id)
            detector = live[0] if live else None
        plan = on_jm_failure(failed.state, [failed.state] + others, None)
        if plan.abort:
            self._abort(jr, "all job managers failed")
            return
        src = detector.state.dc_id
        self._append(jr, RoleChange(failed.id, None), src)
        if plan.new_primary is not None:
            newp = jr.jms[plan.new_primary]
            self._append(jr, RoleChange(newp.id, Role.PRIMARY), newp.state.dc_id)
            jr.epoch += 1
            entry["elected"] = newp.id
            entry["elected_at"] = round(now, 6)
            self._log(now, job_id, "elected", newp.id, {"replacing": jm_id})
            self._primary_progress(jr, newp)
        if jr.primary() is None:
            jr.pending_replacements.add(jm_id)
            return
        pending = sorted(jr.pending_replacements | {jm_id})
        jr.pending_replacements.clear()
        for fid in pending:
            f = jr.jms[fid]
            self._log(now, job_id, "spawn_request", jr.primary().id, {"dc": f.state.dc_id, "replacing": fid})
            self.queue.push(now + float(self.delays["spawn"]), Prio.RECOVERY, "spawn", (job_id, jr.attempt, fid))

    def _on_spawn(self, data) -> None:
        job_id, attempt, failed_id = data
        jr = self.jobs[job_id]
        if jr.finished or attempt != jr.attempt:
            return
        now = self.queue.now
        failed = jr.jms[failed_id]
        dc = failed.state.dc_id
        pjm = jr.primary()
        entry = self._entry(job_id, failed_id)
        host = self._choose_host(dc, jr.ordinal)
        info = jr.store.replicas.get(dc)
        if host is None or pjm is None or info is None:
            target = pjm or next((j for j in jr.jms.values() if j.alive), None)
            if target is None:
                self._abort(jr, "no job manager left")
                return
            for tid in jr.store.head.owned_by(failed_id):
                self._append(jr, TaskReassigned(tid, failed_id, target.id), target.state.dc_id)
            fs = self.schedulers[failed.domain]
            for c in fs.drop(failed.sub):
                self._return_container(fs, c)
            entry["absorbed_by"] = target.id
            entry["recovered_at"] = round(now, 6)
            entry["interval"] = round(now - entry.get("failed_at", now), 6)
            return
        gen = failed.state.generation + 1
        new = JmRuntime(JmState(f"{dc}#{gen}", dc, Role.SEMI_ACTIVE, JmStatus.ALIVE, host, gen), failed.sub,
                        failed.domain, JmQueue(f"{dc}#{gen}", last_update=now),
                        af_mod.AfController(self.params, max(1, self.schedulers[failed.domain].capacity())))
        jr.jms[new.id] = new
        jr.by_sub[failed.sub] = new
        dead = [c for c, _ in info.executor_list.items() if c in self.topology.containers
                and not self.topology.nodes[self.node_of[c]].alive]
        for body in inheritance_updates(new.id, failed_id, jr.store.head, dead):
            self._append(jr, body, dc)
        for t in jr.job.tasks():
            if t.state is TaskState.WAITING and jr.store.head.task_map.get(t.id) == new.id and t.id not in new.queue.waiting:
                self._enqueue(new, t)
        for tid, node in jr.pending_reports.pop(failed_id, []):
            self._append(jr, PartitionDone(tid, node), dc)
        entry["replacement"] = new.id
        entry["recovered_at"] = round(now, 6)
        entry["interval"] = round(now - entry.get("failed_at", now), 6)
        self._log(now, job_id, "jm_spawned", new.id, {"replacing": failed_id, "host": host,
                                                       "inherited": self.schedulers[new.domain].holdings(new.sub)})
        self._kick(new)

    def _restart_job(self, jr: JobRuntime, failed: JmRuntime) -> None:
        """Centralized recovery: the job is resubmitted and starts from scratch."""
        now = self.queue.now
        for t in jr.job.tasks():
            info = self.running.pop(t.id, None)
            if info is not None:
                self.topology.containers[info.container].release(t.id)
            if t.state is not TaskState.UNRELEASED:
                self.expected_reexec[jr.job.id].add(t.id)
            t.state = TaskState.UNRELEASED
            t.wait = 0.0
            t.container = None
            t.location = None
        self._teardown(jr)
        jr.attempt += 1
        jr.jms = {}
        jr.by_sub = {}
        jr.pending_reports = defaultdict(list)
        self._log(now, jr.job.id, "resubmit_request", "master", {"attempt": jr.attempt})
        self.queue.push(now + float(self.delays["spawn"]), Prio.RECOVERY, "resubmit", (jr.job.id, jr.attempt, failed.id))

    def _on_resubmit(self, data) -> None:
        job_id, attempt, failed_id = data
        jr = self.jobs[job_id]
        if jr.finished or attempt != jr.attempt:
            return
        entry = self._entry(job_id, failed_id)
        entry["recovered_at"] = round(self.queue.now, 6)
        entry["interval"] = round(self.queue.now - entry.get("failed_at", self.queue.now), 6)
        entry["restarted"] = True
        self._start_job(jr)

    def _on_node_restart(self, node_id: str) -> None:
        node = self.topology.nodes[node_id]
        if node.alive:
            return
        node.alive = True
        self.node_up_since[node_id] = self.queue.now
        for c in self.topology.containers.values():
            if c.node_id == node_id:
                self._domain_of(c.id).containers.add(c.id)
        self._log(self.queue.now, None, "host_restarted", node_id, {})

    # ----------------------------------------------------------------- report

    def _report(self) -> MetricsReport:
        end = self.end_time
        for n, since in self.node_up_since.items():
            if since is not None:
                self.node_uptime[n] += end - since
                self.node_up_since[n] = None
        pricing_override = self.config.options.get("host_pricing")
        for n in sorted(self.topology.nodes):
            node = self.topology.nodes[n]
            self.cost.host_uptime[n] = self.node_uptime[n]
            if pricing_override:
                cls = pricing_override
            elif not self.deployment.decentralized:
                cls = "on_demand"
            else:
                cls = "spot" if node.reliability is Reliability.SPOT else "on_demand"
            self.cost.host_pricing[n] = cls
        for dc in self.topology.dc_ids:
            h = f"{dc}-master"
            self.cost.host_uptime[h] = end
            self.cost.host_pricing[h] = pricing_override or "on_demand"
        prices = PriceTable.from_dict(self.config.prices)
        machine, transfer = compute_cost(self.cost, prices)
        done = [j for j in self.all_jobs if j.completion_time is not None and not j.aborted]
        responses = {j.id: round(j.completion_time - j.release_time, 6) for j in done}
        bound = None
        bound_ok = None
        if self.deployment.name == "houtu" and self.all_jobs:
            try:
                bound = makespan_bound(self.params, self.topology, self.all_jobs)
                bound_ok = bool(done) and len(done) == len(self.all_jobs) and makespan(done) <= bound + 1e-9
            except BoundPreconditionError:
                bound = None
        reexec = {}
        for job_id in sorted(self.jobs):
            again = sorted(str(t) for t, n in self.attempts.items() if t.job == job_id and n > 1)
            if again:
                reexec[job_id] = again
        return MetricsReport(
            deployment=self.deployment.name,
            seed=self.config.seed,
            makespan=makespan(done) if done else 0.0,
            avg_response_time=avg_response_time(done) if done else 0.0,
            responses=responses,
            completed=len(done),
            aborted=sorted(j.id for j in self.all_jobs if j.aborted),
            rejected=sorted(self.rejected),
            machine_cost=machine,
            transfer_cost=transfer,
            cross_dc_bytes=self.cost.cross_dc_bytes,
            bound=bound,
            bound_ok=bound_ok,
            recovery=self.recovery,
            steals={k: (v if k != "delays" else [round(x, 6) for x in v]) for k, v in self.steal_stats.items()},
            reexecuted=reexec,
            events=self.queue.processed,
            end_time=end,
        )


def _body_payload(body) -> Dict:
    out = {}
    for k, v in body.__dict__.items():
        if isinstance(v, TaskId):
            out[k] = str(v)
        elif isinstance(v, tuple):
            out[k] = [str(x) for x in v]
        elif isinstance(v, Role):
            out[k] = v.value
        else:
            out[k] = v
    return out


def run(config: ScenarioConfig) -> MetricsReport:
    return Simulation(config).run()


def run_baseline(config: ScenarioConfig) -> MetricsReport:
    if config.deployment == "houtu":
        raise ConfigError("run_baseline expects a baseline deployment")
    return Simulation(config).run()
