"""Small builders shared by the tests."""
from typing import Dict, List, Optional, Sequence

from geosched.model import DagJob, Stage, Task, TaskId, TaskState
from geosched.parades import guard_violations

ACCEPTANCE_LINES: Dict[int, str] = {}

# every simulated trace row seen by the test session, for the global guard check
SEEN_TRACES: List[dict] = []


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)


def task(job="j", stage=0, index=0, r=0.25, p=10.0, nodes=(), nbytes=0.0, state=TaskState.UNRELEASED):
    t = Task(TaskId(job, stage, index), r, p, frozenset(nodes), nbytes)
    t.state = state
    return t


def job(shape: Sequence[tuple], job_id="j", release=0.0) -> DagJob:
    """``shape`` is a list of (n_tasks, r, p, predecessors) per stage."""
    stages = {}
    for sid, (n, r, p, preds) in enumerate(shape):
        stages[sid] = Stage(sid, [task(job_id, sid, i, r, p) for i in range(n)], frozenset(preds))
    return DagJob(job_id, stages, release)


def fig6_job() -> DagJob:
    # three stages: two independent producers feeding a single consumer
    return job([(3, 0.5, 4.0, ()), (2, 0.5, 6.0, ()), (1, 1.0, 2.0, (0, 1))])


def check_trace(sim, params=None) -> None:
    rows = list(sim.trace)
    SEEN_TRACES.extend(rows)
    bad = guard_violations(rows, params or sim.params)
    assert not bad, bad[:3]
