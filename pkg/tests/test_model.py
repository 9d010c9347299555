import pytest

from geosched.model import (
    AdmissionError,
    ClusterTopology,
    Container,
    DagJob,
    DataCenter,
    LinkModel,
    ModelError,
    Node,
    Rack,
    SchedulerParams,
    Stage,
    TaskId,
    TaskState,
    admit,
    avg_response_time,
    job_work,
    largest_remainder,
    makespan,
    release_ready_tasks,
)

from helpers import fig6_job, job, task


def finish(j, stage_ids):
    for sid in stage_ids:
        for t in j.stages[sid].tasks:
            if t.state is TaskState.UNRELEASED:
                t.transition(TaskState.WAITING)
            t.transition(TaskState.RUNNING, container="c")
            t.transition(TaskState.DONE, location="n")


def done_at(j, t):
    j.completion_time = t
    return j


class TestJobWork:
    def test_single_task(self):
        assert job_work(job([(1, 0.5, 10.0, ())])) == 5.0

    def test_empty_job(self):
        assert job_work(DagJob("e", {})) == 0.0

    def test_fig6_shape(self):
        # 3*0.5*4 + 2*0.5*6 + 1*1*2
        assert job_work(fig6_job()) == 14.0


class TestRelease:
    def test_linear_chain(self):
        j = job([(2, 0.25, 5, ()), (3, 0.25, 5, (0,))])
        assert [t.id.stage for t in release_ready_tasks(j, 0)] == [0, 0]
        finish(j, [0])
        rel = release_ready_tasks(j, 5)
        assert [t.id for t in rel] == [TaskId("j", 1, i) for i in range(3)]
        assert all(t.state is TaskState.WAITING and t.wait == 0 for t in rel)

    def test_diamond_waits_for_both_parents(self):
        j = job([(1, 0.25, 5, ()), (1, 0.25, 5, (0,)), (1, 0.25, 5, (0,)), (1, 0.25, 5, (1, 2))])
        finish(j, [0, 1])
        release_ready_tasks(j, 0)
        assert j.stages[3].tasks[0].state is TaskState.UNRELEASED
        assert j.stages[2].tasks[0].state is TaskState.WAITING

    def test_fig6_consumer_after_both_producers(self):
        j = fig6_job()
        finish(j, [0, 1])
        rel = release_ready_tasks(j, 10)
        assert [t.id.stage for t in rel] == [2]

    def test_nothing_else_changes(self):
        j = job([(2, 0.25, 5, ()), (1, 0.25, 5, (0,))])
        release_ready_tasks(j, 0)
        j.stages[0].tasks[0].transition(TaskState.RUNNING, container="c")
        assert release_ready_tasks(j, 1) == []
        assert j.stages[0].tasks[0].state is TaskState.RUNNING


class TestMetrics:
    def test_makespan_is_latest_completion(self):
        jobs = [done_at(job([(1, .25, 1, ())], f"j{i}"), t) for i, t in enumerate([10, 20, 15])]
        assert makespan(jobs) == 20

    def test_single_job_makespan(self):
        assert makespan([done_at(job([(1, .25, 1, ())]), 7)]) == 7

    def test_makespan_needs_completed_jobs(self):
        with pytest.raises(ModelError):
            makespan([job([(1, .25, 1, ())])])

    def test_serial_two_jobs(self):
        # one container, service 50 each, released at 0 and 100: the second
        # job runs 100..150.  Completions 150 and 200 are the values the
        # response-time example uses; they give makespan 200 and mean 125.
        a = done_at(job([(1, .25, 1, ())], "a", 0.0), 150.0)
        b = done_at(job([(1, .25, 1, ())], "b", 100.0), 200.0)
        assert makespan([a, b]) == 200
        assert avg_response_time([a, b]) == 125

    def test_serial_hand_schedule(self):
        a = done_at(job([(1, .25, 1, ())], "a", 0.0), 50.0)
        b = done_at(job([(1, .25, 1, ())], "b", 100.0), 150.0)
        assert makespan([a, b]) == 150
        assert avg_response_time([a, b]) == 50

    def test_avg_response(self):
        assert avg_response_time([done_at(job([(1, .25, 1, ())], release=5), 25)]) == 20
        jobs = [done_at(job([(1, .25, 1, ())], "a"), 10), done_at(job([(1, .25, 1, ())], "b"), 30)]
        assert avg_response_time(jobs) == 20

    def test_avg_response_empty(self):
        with pytest.raises(ModelError):
            avg_response_time([])


class TestValidation:
    def test_heterogeneous_stage_rejected(self):
        with pytest.raises(ModelError):
            Stage(0, [task(index=0, r=0.25), task(index=1, r=0.5)])

    def test_cycle_rejected(self):
        with pytest.raises(ModelError):
            DagJob("c", {0: Stage(0, [task()], frozenset({1})), 1: Stage(1, [task(stage=1)], frozenset({0}))})

    def test_admission_bounds(self):
        params = SchedulerParams()
        admit(job([(1, 0.5, 1, ())]), params)
        with pytest.raises(AdmissionError):
            admit(job([(1, 0.6, 1, ())]), params)
        with pytest.raises(AdmissionError):
            admit(job([(1, 0.01, 1, ())]), params)

    def test_params(self):
        with pytest.raises(ModelError):
            SchedulerParams(rho=1.0)
        with pytest.raises(ModelError):
            SchedulerParams(delta=1.0)

    def test_link_model(self):
        with pytest.raises(ModelError):
            LinkModel(100, 10, 200)
        with pytest.raises(ModelError):
            LinkModel(0, 0, 0)

    def test_state_machine(self):
        t = task()
        with pytest.raises(ModelError):
            t.transition(TaskState.RUNNING)
        t.transition(TaskState.WAITING)
        t.wait = 3.0
        t.transition(TaskState.RUNNING, container="c1")
        assert t.container == "c1"
        t.transition(TaskState.WAITING)  # rollback
        assert t.wait == 0.0 and t.container is None

    def test_container_conservation(self):
        c = Container("c", "n", "r", "d")
        c.place(TaskId("j", 0, 0), 0.25)
        c.place(TaskId("j", 0, 1), 0.5)
        assert c.free == pytest.approx(0.25)
        with pytest.raises(ModelError):
            c.place(TaskId("j", 0, 2), 0.5)
        c.release(TaskId("j", 0, 0))
        assert c.free == pytest.approx(0.5)

    def test_topology_unique_ids(self):
        n = Node("n", "r", "d")
        dc = DataCenter("d", [Rack("r", "d", ["n"])], [n], [Container("c", "n", "r", "d")])
        topo = ClusterTopology([dc], {("d", "d"): LinkModel(820, 41, 100)})
        assert topo.total_containers() == 1
        with pytest.raises(ModelError):
            ClusterTopology([dc, dc], {("d", "d"): LinkModel(820, 41, 100)})


class TestLargestRemainder:
    def test_examples(self):
        assert largest_remainder(7, {"A": 50, "B": 30, "C": 20}) == {"A": 4, "B": 2, "C": 1}
        assert largest_remainder(10, {"A": 100, "B": 0}) == {"A": 10, "B": 0}

    def test_all_zero(self):
        with pytest.raises(ModelError):
            largest_remainder(3, {"A": 0})
