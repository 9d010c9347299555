"""Per-data-center max-min fair allocation of whole containers."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Set


def allocate(desires: Mapping[Hashable, int], capacity: int) -> Dict[Hashable, int]:
    """Progressive filling capped by desire.

    One container at a time goes to the claimant holding the fewest containers
    among those still below their desire; ties go to the smallest key.
    """
    grants = {k: 0 for k in desires}
    heap = [(0, k) for k in sorted(desires) if desires[k] > 0]
    heapq.heapify(heap)
    left = max(0, capacity)
    while left > 0 and heap:
        n, k = heapq.heappop(heap)
        grants[k] = n + 1
        left -= 1
        if grants[k] < desires[k]:
            heapq.heappush(heap, (n + 1, k))
    return grants


@dataclass
class AllocationPlan:
    q: int
    granted: Dict[Hashable, List[str]] = field(default_factory=dict)
    reclaim_now: Dict[Hashable, List[str]] = field(default_factory=dict)
    drain: Dict[Hashable, List[str]] = field(default_factory=dict)
    target: Dict[Hashable, int] = field(default_factory=dict)

    def holdings(self) -> Dict[Hashable, List[str]]:
        """Containers each sub-job still holds after this plan (draining ones included)."""
        return {k: list(v) for k, v in self.granted.items()}


def reconcile(
    plan_prev: AllocationPlan,
    alloc_next: Mapping[Hashable, int],
    busy: Callable[[str], bool],
    free_pool: Sequence[str],
    prefers: Optional[Callable[[Hashable, str], bool]] = None,
    idle_eta: Optional[Callable[[str], float]] = None,
) -> AllocationPlan:
    """Turn target counts into concrete container moves.

    Shrinking sub-jobs give back idle containers immediately and mark as
    draining the busy ones expected to free up first (``idle_eta``); draining
    containers take no new tasks and keep counting against the owner until
    they free up.  Growing sub-jobs take free containers, preferred ones first
    (``prefers(sub_job, container_id)``), then lowest id.
    """
    plan = AllocationPlan(q=plan_prev.q + 1, target=dict(alloc_next))
    pool = sorted(free_pool)
    prev_hold = plan_prev.holdings()
    prev_drain = {k: set(v) for k, v in plan_prev.drain.items()}
    for k in sorted(set(prev_hold) | set(alloc_next), key=str):
        held = list(prev_hold.get(k, []))
        target = alloc_next.get(k, 0)
        draining = [c for c in held if c in prev_drain.get(k, ())]
        active = [c for c in held if c not in prev_drain.get(k, ())]
        # a draining container can be un-drained if the sub-job grows back
        while len(active) < target and draining:
            active.append(draining.pop(0))
        reclaim: List[str] = []
        if len(active) > target:
            surplus = len(active) - target
            idle = [c for c in sorted(active) if not busy(c)]
            for c in idle[:surplus]:
                active.remove(c)
                reclaim.append(c)
            surplus -= len(reclaim)
            if surplus > 0:
                order = sorted(active, key=lambda c: ((idle_eta(c) if idle_eta else 0.0), c))
                for c in order[:surplus]:
                    active.remove(c)
                    draining.append(c)
        plan.granted[k] = sorted(active) + sorted(draining)
        plan.reclaim_now[k] = sorted(reclaim)
        plan.drain[k] = sorted(draining)
        pool.extend(reclaim)
    pool.sort()
    for k in sorted(alloc_next, key=str):
        need = alloc_next[k] - (len(plan.granted[k]) - len(plan.drain[k]))
        if need <= 0:
            continue
        if prefers is not None:
            ordered = sorted(pool, key=lambda c: (not prefers(k, c), c))
        else:
            ordered = list(pool)
        take = ordered[:need]
        for c in take:
            pool.remove(c)
        plan.granted[k] = sorted(set(plan.granted[k]) | set(take))
    return plan


class FairScheduler:
    """Stateful wrapper used by the simulator: one instance per scheduling domain.

    A sub-job whose target could not be met at the period boundary (the
    containers were still draining elsewhere) receives containers as soon as
    they come back to the pool.
    """

    def __init__(self, name: str, container_ids: Iterable[str], locality_aware: bool = True):
        self.name = name
        self.containers: Set[str] = set(container_ids)
        self.owner: Dict[str, Hashable] = {}
        self.draining: Set[str] = set()
        self.plan = AllocationPlan(q=0)
        self.locality_aware = locality_aware

    def free_pool(self) -> List[str]:
        return sorted(c for c in self.containers if c not in self.owner)

    def holdings(self, key: Hashable) -> List[str]:
        return sorted(c for c, k in self.owner.items() if k == key)

    def usable(self, key: Hashable) -> List[str]:
        return [c for c in self.holdings(key) if c not in self.draining]

    def capacity(self) -> int:
        return len(self.containers)

    def rebalance(
        self,
        desires: Mapping[Hashable, int],
        busy: Callable[[str], bool],
        prefers: Optional[Callable[[Hashable, str], bool]] = None,
        frozen: Iterable[Hashable] = (),
        idle_eta: Optional[Callable[[str], float]] = None,
    ) -> AllocationPlan:
        """Compute and apply the allocation for the next period.

        Sub-jobs in ``frozen`` (their job manager is down) keep exactly what
        they hold and are not part of the fair split.
        """
        frozen = set(frozen)
        frozen_held = sum(len(self.holdings(k)) for k in frozen)
        counts = allocate({k: d for k, d in desires.items() if k not in frozen}, self.capacity() - frozen_held)
        for k in frozen:
            counts[k] = len(self.holdings(k))
        prev = AllocationPlan(q=self.plan.q)
        keys = set(self.owner.values()) | set(counts)
        for k in keys:
            prev.granted[k] = self.holdings(k)
            prev.drain[k] = [c for c in prev.granted[k] if c in self.draining]
        plan = reconcile(prev, counts, busy, self.free_pool(), prefers if self.locality_aware else None, idle_eta)
        self.owner = {}
        self.draining = set()
        for k, cs in plan.granted.items():
            for c in cs:
                self.owner[c] = k
        for k, cs in plan.drain.items():
            self.draining.update(cs)
        self.plan = plan
        return plan

    def shortfall(self, key: Hashable) -> int:
        return self.plan.target.get(key, 0) - len(self.usable(key))

    def release(self, container_id: str) -> Optional[Hashable]:
        """Return a container to the pool and hand it to a sub-job still short of its target."""
        self.owner.pop(container_id, None)
        self.draining.discard(container_id)
        if container_id not in self.containers:
            return None
        short = [k for k in sorted(self.plan.target, key=str) if self.shortfall(k) > 0]
        if not short:
            return None
        k = min(short, key=lambda s: (len(self.usable(s)), str(s)))
        self.owner[container_id] = k
        return k

    def drop(self, key: Hashable) -> List[str]:
        """Remove a finished sub-job; returns the containers it gave back."""
        held = self.holdings(key)
        for c in held:
            self.owner.pop(c, None)
            self.draining.discard(c)
        self.plan.target.pop(key, None)
        return held

    def remove_container(self, container_id: str) -> None:
        self.containers.discard(container_id)
        self.owner.pop(container_id, None)
        self.draining.discard(container_id)
