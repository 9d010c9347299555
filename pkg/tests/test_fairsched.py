import itertools

from geosched.fairsched import AllocationPlan, FairScheduler, allocate, reconcile

from oracles import waterfill


def test_symmetric_split():
    assert allocate({"A": 5, "B": 5, "C": 5}, 9) == {"A": 3, "B": 3, "C": 3}


def test_small_desire_frees_capacity_for_others():
    assert allocate({"A": 1, "B": 5, "C": 5}, 9) == {"A": 1, "B": 4, "C": 4}


def test_single_claimant_capped():
    assert allocate({"A": 10}, 4) == {"A": 4}


def test_zero_desire_and_zero_capacity():
    assert allocate({"A": 0, "B": 3}, 5) == {"A": 0, "B": 3}
    assert allocate({"A": 2}, 0) == {"A": 0}


def test_small_grid_matches_oracle():
    for desires in itertools.product(range(4), repeat=3):
        d = dict(zip("ABC", desires))
        for cap in range(8):
            assert allocate(d, cap) == waterfill(d, cap)


def _prev(held, drain=None):
    return AllocationPlan(q=1, granted={k: list(v) for k, v in held.items()}, drain=drain or {})


class TestReconcile:
    def test_idle_containers_reclaimed_now(self):
        plan = reconcile(_prev({"A": ["c1", "c2", "c3", "c4"]}), {"A": 2},
                         busy=lambda c: c in ("c1", "c2"), free_pool=[])
        assert plan.reclaim_now["A"] == ["c3", "c4"]
        assert plan.granted["A"] == ["c1", "c2"] and plan.drain["A"] == []

    def test_all_busy_drains_first_to_finish(self):
        eta = {"c1": 30.0, "c2": 5.0, "c3": 12.0}
        plan = reconcile(_prev({"A": ["c1", "c2", "c3"]}), {"A": 2},
                         busy=lambda c: True, free_pool=[], idle_eta=eta.get)
        assert plan.reclaim_now["A"] == []
        assert plan.drain["A"] == ["c2"]
        assert sorted(plan.granted["A"]) == ["c1", "c2", "c3"]

    def test_no_change_is_identity(self):
        prev = _prev({"A": ["c1", "c2"], "B": ["c3"]})
        plan = reconcile(prev, {"A": 2, "B": 1}, busy=lambda c: False, free_pool=["c4"])
        assert plan.granted == prev.granted
        assert all(not v for v in plan.reclaim_now.values())
        assert all(not v for v in plan.drain.values())

    def test_growth_takes_preferred_then_lowest(self):
        plan = reconcile(_prev({}), {"A": 2}, busy=lambda c: False, free_pool=["c1", "c2", "c3"],
                         prefers=lambda k, c: c == "c3")
        assert plan.granted["A"] == ["c1", "c3"]

    def test_reclaimed_go_to_growing_subjob(self):
        plan = reconcile(_prev({"A": ["c1", "c2"]}), {"A": 1, "B": 1}, busy=lambda c: False, free_pool=[])
        # the lowest idle id is given back first
        assert plan.reclaim_now["A"] == ["c1"]
        assert plan.granted == {"A": ["c2"], "B": ["c1"]}


class TestFairScheduler:
    def test_drained_container_goes_to_short_subjob(self):
        fs = FairScheduler("dc0", ["c1", "c2"])
        fs.rebalance({"A": 2}, busy=lambda c: False)
        assert fs.holdings("A") == ["c1", "c2"]
        fs.rebalance({"A": 1, "B": 1}, busy=lambda c: True)
        assert fs.shortfall("B") == 1 and len(fs.draining) == 1
        c = sorted(fs.draining)[0]
        assert fs.release(c) == "B"
        assert fs.holdings("B") == [c] and fs.shortfall("B") == 0

    def test_frozen_keep_holdings(self):
        fs = FairScheduler("dc0", ["c1", "c2", "c3", "c4"])
        fs.rebalance({"A": 3}, busy=lambda c: False)
        fs.rebalance({"A": 3, "B": 4}, busy=lambda c: False, frozen={"A"})
        assert len(fs.holdings("A")) == 3 and len(fs.holdings("B")) == 1

    def test_capacity_never_exceeded(self):
        fs = FairScheduler("dc0", [f"c{i}" for i in range(5)])
        for desires in ({"A": 9, "B": 9}, {"A": 1, "B": 9, "C": 2}, {"C": 5}):
            fs.rebalance(desires, busy=lambda c: False)
            assert len(fs.owner) <= 5
            for k, d in desires.items():
                assert len(fs.holdings(k)) <= d
