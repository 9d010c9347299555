import pytest

from geosched.model import ModelError, SchedulerParams, Stage, TaskState
from geosched.parades import (
    ContainerDescriptor,
    DelayPolicy,
    JmQueue,
    Locality,
    assign_stage_tasks,
    guard_violations,
    initial_assignment,
    locality_of,
    on_receive_steal,
    on_update,
    steal,
    victim_order,
)

from helpers import task

P = SchedulerParams()
RACKS = {"n1": "r1", "n2": "r1", "n3": "r2", "b1": "rb"}


def desc(node="n1", free=1.0, rack=None, dc="A", cid="c"):
    return ContainerDescriptor(cid, node, rack or RACKS.get(node, "rx"), dc, free)


def waiting(*tasks, jm="jm"):
    q = JmQueue(jm)
    for t in tasks:
        t.state = TaskState.WAITING
        q.add(t)
    return q


class TestInitialAssignment:
    def test_even(self):
        assert initial_assignment(10, {"A": 50, "B": 50}, "A") == {"A": 5, "B": 5}

    def test_degenerate(self):
        assert initial_assignment(10, {"A": 100, "B": 0}, "A") == {"A": 10, "B": 0}

    def test_largest_remainder(self):
        assert initial_assignment(7, {"A": 50, "B": 30, "C": 20}, "A") == {"A": 4, "B": 2, "C": 1}

    def test_all_zero_goes_to_primary(self):
        assert initial_assignment(4, {"A": 0, "B": 0}, "B") == {"A": 0, "B": 4}

    def test_tasks_prefer_their_home(self):
        st = Stage(0, [task(index=i, nodes=[f"{dc}1"]) for i, dc in enumerate("abab")])
        owner = assign_stage_tasks(st, {"a": 1, "b": 3}, lambda t: sorted(t.preferred_nodes)[0][0])
        assert sorted(owner.values()) == ["a", "b", "b", "b"]
        assert owner[st.tasks[0].id] == "a" and owner[st.tasks[1].id] == "b"

    def test_counts_must_cover(self):
        with pytest.raises(ModelError):
            assign_stage_tasks(Stage(0, [task(index=i) for i in range(3)]), {"a": 2}, lambda t: None)


class TestLocality:
    def test_tiers(self):
        t = task(nodes=["n1"])
        assert locality_of(t, desc("n1"), RACKS) is Locality.NODE
        assert locality_of(t, desc("n2"), RACKS) is Locality.RACK
        assert locality_of(t, desc("b1", dc="B"), RACKS) is Locality.REMOTE


class TestOnUpdate:
    def test_node_local_immediately(self):
        n = desc("n1")
        placed = on_update(waiting(task(r=0.4, nodes=["n1"])), n, P, 0.0, RACKS)
        assert len(placed) == 1 and placed[0].tier == "node"
        assert n.free == pytest.approx(0.6)

    def test_rack_threshold_unmet(self):
        t = task(p=10, nodes=["n1"])
        t.wait = 0.5
        q = waiting(t)
        assert on_update(q, desc("n2"), P, 0.0, RACKS) == []
        assert t.id in q.waiting

    def test_rack_threshold_met(self):
        t = task(p=10, nodes=["n1"])
        t.wait = 1.0
        placed = on_update(waiting(t), desc("n2"), P, 0.0, RACKS)
        assert [p.tier for p in placed] == ["rack"]

    def test_remote_all_guards(self):
        t = task(r=0.4, p=10, nodes=["n1"])
        t.wait = 2.0
        placed = on_update(waiting(t), desc("b1", free=0.5, dc="B"), P, 0.0, RACKS)
        assert [p.tier for p in placed] == ["remote"] and placed[0].pre_free == 0.5

    def test_remote_needs_free_space(self):
        t = task(r=0.4, p=10, nodes=["n1"])
        t.wait = 5.0
        assert on_update(waiting(t), desc("b1", free=0.45, dc="B"), P, 0.0, RACKS) == []

    def test_wait_accumulates_between_updates(self):
        t = task(p=10, nodes=["n1"])
        q = waiting(t)
        assert on_update(q, desc("n2"), P, 0.5, RACKS) == []
        placed = on_update(q, desc("n2"), P, 1.0, RACKS)
        assert placed and placed[0].wait == pytest.approx(1.0)

    def test_longest_wait_first_within_tier(self):
        a, b = task(index=0, r=0.5, nodes=["n1"]), task(index=1, r=0.5, nodes=["n1"])
        b.wait = 3.0
        placed = on_update(waiting(a, b), desc("n1", free=0.5), P, 0.0, RACKS)
        assert [p.task.id.index for p in placed] == [1]

    def test_constant_wait_policy_skips_guard(self):
        t = task(r=0.4, p=100, nodes=["n1"])
        t.wait = 6.0
        placed = on_update(waiting(t), desc("b1", free=0.45, dc="B"), P, 0.0, RACKS, policy=DelayPolicy(3.0))
        assert len(placed) == 1


class TestSteal:
    def test_victim_grants_what_fits(self):
        victim = waiting(*[task(index=i, r=0.5, nodes=["n1"]) for i in range(3)], jm="B")
        tm = {t: "B" for t in victim.waiting}
        placed = steal(JmQueue("A"), desc("n1", free=0.5), {"A": JmQueue("A"), "B": victim}, P, 0.0, RACKS, tm)
        assert len(placed) == 1
        assert tm[placed[0].task.id] == "A"
        assert sorted(tm.values()) == ["A", "B", "B"]

    def test_no_siblings(self):
        assert steal(JmQueue("A"), desc(), {"A": JmQueue("A")}, P, 0.0, RACKS) == []

    def test_nothing_admissible(self):
        victim = waiting(task(r=0.5, p=100, nodes=["b1"]), jm="B")
        assert steal(JmQueue("A"), desc("n1", free=0.4), {"B": victim}, P, 0.0, RACKS) == []

    def test_victim_order_by_backlog_then_id(self):
        qs = {"A": JmQueue("A"), "B": waiting(task(index=0), jm="B"),
              "C": waiting(task(index=1), task(index=2), jm="C"), "D": waiting(task(index=3), jm="D")}
        assert victim_order("A", qs) == ["C", "B", "D"]

    def test_thief_with_waiting_tasks_refused(self):
        with pytest.raises(ModelError):
            steal(waiting(task()), desc(), {}, P, 0.0, RACKS)

    def test_first_nonempty_reply_wins(self):
        b = waiting(task(index=0, r=0.5, p=100, nodes=["b1"]), task(index=1, r=0.5, p=100, nodes=["b1"]), jm="B")
        c = waiting(task(index=2, r=0.5, nodes=["n1"]), jm="C")
        placed = steal(JmQueue("A"), desc("n1"), {"B": b, "C": c}, P, 0.0, RACKS)
        assert [p.task.id.index for p in placed] == [2]
        assert len(b.waiting) == 2


class TestReceiveSteal:
    def test_node_local_to_thief(self):
        r = on_receive_steal(waiting(task(nodes=["n1"]), jm="B"), desc("n1"), P, 0.0, RACKS)
        assert len(r.granted) == 1 and r.granted[0].locality is Locality.NODE

    def test_nothing_released(self):
        assert on_receive_steal(JmQueue("B"), desc("n1"), P, 0.0, RACKS).granted == []

    def test_remote_granted(self):
        t = task(r=0.4, p=10, nodes=["b1"])
        t.wait = 2.0
        r = on_receive_steal(waiting(t, jm="B"), desc("n1", free=0.5), P, 0.0, RACKS)
        assert r.granted[0].locality is Locality.REMOTE

    def test_recovering_victim_replies_empty(self):
        q = waiting(task(nodes=["n1"]), jm="B")
        assert on_receive_steal(q, desc("n1"), P, 0.0, RACKS, recovering=True).granted == []
        assert len(q.waiting) == 1

    def test_does_not_touch_thief_descriptor(self):
        n = desc("n1", free=1.0)
        on_receive_steal(waiting(task(nodes=["n1"], r=0.5), jm="B"), n, P, 0.0, RACKS)
        assert n.free == 1.0


class TestGuardCheck:
    def row(self, **kw):
        base = {"locality": "node", "wait": 0.0, "p": 10.0, "r": 0.25, "pre_free": 1.0}
        return {**base, **kw}

    def test_clean(self):
        rows = [self.row(), self.row(locality="rack", wait=1.0), self.row(locality="remote", wait=2.0, pre_free=0.5)]
        assert guard_violations(rows, P) == []

    def test_flags(self):
        rows = [self.row(locality="rack", wait=0.9), self.row(locality="remote", wait=2.0, pre_free=0.4),
                self.row(r=0.5, pre_free=0.25)]
        assert len(guard_violations(rows, P)) == 3

    def test_constant_policy_rows_skipped(self):
        assert guard_violations([self.row(locality="rack", wait=0.0, policy="constant")], P) == []
