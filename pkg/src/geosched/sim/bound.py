"""Makespan upper bound for Af + Parades under per-data-center fair scheduling."""
from __future__ import annotations

import math
from typing import Mapping, Sequence, Union

from ..model import EPS, ClusterTopology, DagJob, ModelError, SchedulerParams, job_work


class BoundPreconditionError(ModelError):
    pass


def dc_constant(params: SchedulerParams) -> float:
    """2/(1-delta) + (1+rho)/delta + 2*tau/theta."""
    return 2 / (1 - params.delta) + (1 + params.rho) / params.delta + 2 * params.tau / params.theta


def makespan_bound(params: SchedulerParams, topology: Union[ClusterTopology, Mapping[str, int]],
                   jobs: Sequence[DagJob]) -> float:
    """``c_max * T1 + sum_i d_i`` with ``c_i = const/|P_i|`` and
    ``d_i = L log_rho |P_i| + 2L`` over data centers ``i``."""
    if isinstance(topology, ClusterTopology):
        sizes = {dc.id: len(dc.containers) for dc in topology.datacenters}
    else:
        sizes = dict(topology)
    if any(n < 1 for n in sizes.values()):
        raise BoundPreconditionError("every data center needs at least one container")
    for job in jobs:
        for t in job.tasks():
            if t.r < params.theta - EPS or t.r + params.delta > 1 + EPS:
                raise BoundPreconditionError(f"task {t.id} violates theta <= r <= 1 - delta")
    const = dc_constant(params)
    c_max = max(const / n for n in sizes.values())
    L = params.period_length
    d_sum = math.fsum(L * math.log(n, params.rho) + 2 * L for n in sizes.values())
    t1 = math.fsum(job_work(j) for j in jobs)
    return c_max * t1 + d_sum
