import json
import math
import statistics
from pathlib import Path
from fractions import Fraction

import numpy as np
import pytest

from geosched.model import LinkModel, SchedulerParams, TaskState
from geosched.sim.bound import BoundPreconditionError, dc_constant, makespan_bound
from geosched.sim.config import ConfigError, ScenarioConfig, desk_topology, load_config, topology_from_dict
from geosched.sim.cost import CostTrace, PriceTable, compute_cost, host_costs
from geosched.sim.engine import CausalityError, EventQueue, Prio
from geosched.sim.failures import inject_failures
from geosched.sim.network import sample_bandwidth, transfer_time
from geosched.sim.workload import generate_job_docs, generate_workload

from helpers import fig6_job, job
from oracles import transfer_time_mc

WAN = LinkModel(100.0, 30.0, 10.0)
GB = 10 ** 9


class TestNetwork:
    def test_constant_link(self):
        rng = np.random.default_rng(0)
        link = LinkModel(100.0, 0.0, 10.0)
        assert {sample_bandwidth(link, rng) for _ in range(20)} == {100.0}
        assert transfer_time(100e6 / 8, link, rng) == pytest.approx(1.0)
        assert transfer_time(0, link, rng) == 0.0

    def test_wan_dispersion(self):
        rng = np.random.default_rng(1)
        xs = [sample_bandwidth(WAN, rng) for _ in range(10_000)]
        assert min(xs) >= WAN.floor_mbps
        assert statistics.fmean(xs) == pytest.approx(100, rel=0.02)
        assert statistics.pstdev(xs) == pytest.approx(30, rel=0.05)

    def test_one_gb_against_independent_sampler(self):
        rng = np.random.default_rng(2)
        ours = [transfer_time(GB, WAN, rng) for _ in range(4000)]
        ref = transfer_time_mc(GB, 100.0, 30.0, 10.0, 5.0, 4000, seed=3)
        assert statistics.fmean(ours) == pytest.approx(80, rel=0.05)
        assert statistics.fmean(ours) == pytest.approx(statistics.fmean(ref), rel=0.02)
        assert statistics.pstdev(ours) == pytest.approx(statistics.pstdev(ref), rel=0.15)

    def test_lan_about_eight_times_faster(self):
        rng = np.random.default_rng(4)
        lan = LinkModel(820.0, 41.0, 100.0)
        t_lan = statistics.fmean(transfer_time(GB, lan, rng) for _ in range(500))
        t_wan = statistics.fmean(transfer_time(GB, WAN, rng) for _ in range(500))
        assert 7 < t_wan / t_lan < 9.5


class TestCost:
    def test_no_transfer_no_cost(self):
        assert compute_cost(CostTrace(), PriceTable()) == (0, 0)

    def test_ten_gb(self):
        tr = CostTrace()
        tr.add_transfer("dc0", "dc1", 10 * GB)
        tr.add_transfer("dc0", "dc0", 5 * GB)  # free inside a data center
        assert compute_cost(tr, PriceTable())[1] == Fraction(13, 10)
        assert tr.cross_dc_bytes == 10 * GB

    def test_spot_is_a_tenth(self):
        tr = CostTrace({"h1": 3600.0, "h2": 1800.5}, {"h1": "on_demand", "h2": "spot"})
        od = compute_cost(tr.with_pricing("on_demand"), PriceTable())[0]
        sp = compute_cost(tr.with_pricing("spot"), PriceTable())[0]
        assert sp * 10 == od

    def test_host_costs_sum(self):
        tr = CostTrace({"a": 100.0, "b": 250.0}, {"a": "spot", "b": "reserved"})
        assert sum(host_costs(tr, PriceTable()).values()) == compute_cost(tr, PriceTable())[0]

    def test_price_defaults_from_on_demand(self):
        pt = PriceTable.from_dict({"on_demand": "0.9"})
        assert pt.spot == Fraction(9, 100) and pt.reserved == Fraction(3, 10)
        assert pt.spot <= pt.reserved <= pt.on_demand


class TestBound:
    def test_hand_example(self):
        p = SchedulerParams(delta=0.5, rho=2, tau=0.1, theta=0.05, period_length=10)
        assert dc_constant(p) == pytest.approx(14)
        # c_max = 14/4, T1 = 14: 49 + 10*log2(4) + 20
        assert makespan_bound(p, {"dc0": 4}, [fig6_like()]) == pytest.approx(89)

    def test_empty_workload(self):
        p = SchedulerParams()
        sizes = {"a": 4, "b": 8}
        d = sum(10 * math.log2(n) + 20 for n in sizes.values())
        assert makespan_bound(p, sizes, []) == pytest.approx(d)

    def test_precondition(self):
        with pytest.raises(BoundPreconditionError):
            makespan_bound(SchedulerParams(), {"a": 2}, [fig6_job()])  # r = 1.0 > 1 - delta


def fig6_like():
    # the same total work as the three-stage fixture, with every r inside the bound's range
    return job([(3, 0.5, 4.0, ()), (2, 0.5, 6.0, ()), (2, 0.5, 2.0, (0, 1))])


class TestWorkload:
    def test_size_mix(self):
        docs = generate_job_docs({"n_jobs": 10_000}, np.random.default_rng(5))
        counts = {s: sum(d["size"] == s for d in docs) / len(docs) for s in ("small", "medium", "large")}
        assert counts["small"] == pytest.approx(0.46, abs=0.02)
        assert counts["medium"] == pytest.approx(0.40, abs=0.02)
        assert counts["large"] == pytest.approx(0.14, abs=0.02)

    def test_mean_gap(self):
        docs = generate_job_docs({"n_jobs": 10_001, "mean_interarrival": 60.0}, np.random.default_rng(6))
        gaps = np.diff([d["release_time"] for d in docs])
        assert 58 <= gaps.mean() <= 62

    def test_deterministic(self):
        a = generate_job_docs({"n_jobs": 30}, np.random.default_rng(7))
        b = generate_job_docs({"n_jobs": 30}, np.random.default_rng(7))
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_jobs_are_valid(self):
        topo = topology_from_dict(desk_topology())
        for j, t in generate_workload({"n_jobs": 20}, np.random.default_rng(8), topo):
            assert j.release_time == t
            assert all(tk.state is TaskState.UNRELEASED for tk in j.tasks())
            assert all(0.05 <= tk.r <= 0.5 for tk in j.tasks())


class TestFailures:
    def topo(self):
        return topology_from_dict(desk_topology())

    def test_explicit(self):
        ev = inject_failures({"explicit": [{"time": 70, "target": "pJM", "job": "j0"}]}, np.random.default_rng(0), self.topo())
        assert [(e.time, e.target) for e in ev] == [(70.0, "pJM")]

    def test_rate_zero(self):
        assert inject_failures({"spot_rate": 0.0, "horizon": 1000}, np.random.default_rng(0), self.topo()) == []

    def test_poisson_count(self):
        topo = self.topo()
        lam, horizon = 1e-3, 2000.0
        expected = len(topo.nodes) * lam * horizon
        counts = [len(inject_failures({"spot_rate": lam, "horizon": horizon}, np.random.default_rng(s), topo))
                  for s in range(200)]
        assert statistics.fmean(counts) == pytest.approx(expected, rel=0.10)


class TestEngine:
    def test_order(self):
        q = EventQueue()
        q.push(2.0, Prio.TICK, "b")
        q.push(1.0, Prio.UPDATE, "a")
        q.push(2.0, Prio.ARRIVAL, "c")
        assert [q.pop().kind for _ in range(3)] == ["a", "c", "b"]

    def test_no_past_events(self):
        q = EventQueue()
        q.push(5.0, Prio.TICK, "x")
        q.pop()
        with pytest.raises(CausalityError):
            q.push(4.0, Prio.TICK, "y")


class TestConfig:
    def test_unknown_deployment(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(seed=1, topology=desk_topology(), workload={}, deployment="nope")

    def test_schema_rejects_garbage(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"seed": "x"}))
        with pytest.raises(ConfigError):
            load_config(p)

    def test_shipped_configs_load(self):
        for name in ("desk_mix", "saturation", "pjm_kill"):
            cfg = load_config(Path(__file__).parent.parent / "configs" / f"{name}.json")
            assert ScenarioConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
