"""Scenario configuration, topology/job documents and their JSON schemas."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import jsonschema

from ..model import (
    ClusterTopology,
    Container,
    DagJob,
    DataCenter,
    LinkModel,
    ModelError,
    Node,
    Rack,
    Reliability,
    SchedulerParams,
    Stage,
    Task,
    TaskId,
    largest_remainder,
)

DEPLOYMENTS = ("houtu", "decent-stat", "cent-stat", "cent-dyna")

DEFAULT_LAN = {"mean_mbps": 820.0, "stddev_mbps": 41.0, "floor_mbps": 100.0}
DEFAULT_WAN = {"mean_mbps": 100.0, "stddev_mbps": 30.0, "floor_mbps": 10.0}
DEFAULT_DELAYS = {"detection": 5.0, "spawn": 10.0, "store": 0.1635, "steal": 0.1635, "node_restart": 120.0}
DEFAULT_OPTIONS = {
    "stealing": True,
    "locality_aware": True,
    "host_pricing": None,
    "constant_wait": 3.0,
    "interleave": False,
    "resample_interval": 5.0,
    "max_time": 1e6,
}


class ConfigError(ValueError):
    pass


def load_schema(name: str) -> Dict:
    text = resources.files("geosched.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc: Dict, name: str) -> None:
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as e:
        raise ConfigError(f"{name}: {e.message}") from e


def topology_from_dict(doc: Dict) -> ClusterTopology:
    validate(doc, "topology")
    dcs = []
    for d in doc["datacenters"]:
        racks, nodes, containers = [], [], []
        for r in d["racks"]:
            rack = Rack(r["id"], d["id"])
            for n in r["nodes"]:
                rel = Reliability(n.get("reliability", "spot"))
                node = Node(n["id"], rack.id, d["id"], rel)
                rack.node_ids.append(node.id)
                nodes.append(node)
                for i in range(n.get("containers", 1)):
                    containers.append(Container(f"{node.id}-c{i}", node.id, rack.id, d["id"], 1.0, rel))
            racks.append(rack)
        dcs.append(DataCenter(d["id"], racks, nodes, containers))
    lan = {**DEFAULT_LAN, **doc.get("lan", {})}
    wan = {**DEFAULT_WAN, **doc.get("wan", {})}
    links = {}
    for a in dcs:
        for b in dcs:
            spec = lan if a.id == b.id else wan
            links[(a.id, b.id)] = LinkModel(spec["mean_mbps"], spec.get("stddev_mbps", 0.0), spec.get("floor_mbps", spec["mean_mbps"] / 10))
    for l in doc.get("links", []):
        base = lan if l["src"] == l["dst"] else wan
        merged = {**base, **{k: v for k, v in l.items() if k not in ("src", "dst")}}
        links[(l["src"], l["dst"])] = LinkModel(merged["mean_mbps"], merged.get("stddev_mbps", 0.0), merged.get("floor_mbps", merged["mean_mbps"] / 10))
    return ClusterTopology(dcs, links)


def desk_topology(n_dcs: int = 4, containers_per_dc: int = 4, nodes_per_rack: int = 2,
                  containers_per_node: int = 1, wan: Optional[Dict] = None, lan: Optional[Dict] = None) -> Dict:
    """A small multi-region topology document: ``n_dcs`` data centers of Spot workers."""
    n_nodes = max(1, containers_per_dc // containers_per_node)
    dcs = []
    for i in range(n_dcs):
        racks = []
        for r in range(0, n_nodes, nodes_per_rack):
            nodes = []
            for n in range(r, min(n_nodes, r + nodes_per_rack)):
                cnt = containers_per_node
                if n == n_nodes - 1:
                    cnt = containers_per_dc - containers_per_node * (n_nodes - 1)
                nodes.append({"id": f"dc{i}-n{n}", "containers": cnt, "reliability": "spot"})
            racks.append({"id": f"dc{i}-r{r // nodes_per_rack}", "nodes": nodes})
        dcs.append({"id": f"dc{i}", "racks": racks})
    return {"datacenters": dcs, "lan": dict(lan or DEFAULT_LAN), "wan": dict(wan or DEFAULT_WAN)}


def job_from_dict(doc: Dict, topology: ClusterTopology, ordinal: int = 0) -> DagJob:
    """Build a job; root-stage partitions are spread over the listed data
    centers by weight, then round-robin over each data center's nodes."""
    validate(doc, "job")
    jid = doc["id"]
    stages: Dict[int, Stage] = {}
    for s in doc["stages"]:
        sid = s["id"]
        preds = frozenset(s.get("predecessors", []))
        n = s["tasks"]
        input_bytes = float(s.get("input_mb", 0.0)) * 1e6
        prefs: List[frozenset] = [frozenset()] * n
        if not preds:
            if "nodes" in s:
                if len(s["nodes"]) != n:
                    raise ConfigError(f"stage {sid} of {jid}: need one node per task")
                for node in s["nodes"]:
                    if node not in topology.nodes:
                        raise ConfigError(f"unknown node {node}")
                prefs = [frozenset([node]) for node in s["nodes"]]
            else:
                weights = s.get("data") or {dc: 1.0 for dc in topology.dc_ids}
                for dc in weights:
                    if dc not in topology.dcs:
                        raise ConfigError(f"unknown data center {dc}")
                counts = largest_remainder(n, weights)
                placed = []
                for dc in sorted(counts):
                    nodes = [nd.id for nd in topology.dcs[dc].nodes]
                    for k in range(counts[dc]):
                        placed.append(frozenset([nodes[(ordinal + sid + k) % len(nodes)]]))
                prefs = placed
        tasks = [Task(TaskId(jid, sid, i), float(s["r"]), float(s["p"]), prefs[i], input_bytes) for i in range(n)]
        stages[sid] = Stage(sid, tasks, preds)
    return DagJob(jid, stages, float(doc.get("release_time", 0.0)), submit_dc=doc.get("submit_dc"))


@dataclass
class ScenarioConfig:
    seed: int
    topology: Dict
    workload: Dict
    deployment: str = "houtu"
    params: SchedulerParams = field(default_factory=SchedulerParams)
    failures: Dict = field(default_factory=dict)
    prices: Dict = field(default_factory=dict)
    delays: Dict = field(default_factory=lambda: dict(DEFAULT_DELAYS))
    injections: List[Dict] = field(default_factory=list)
    options: Dict = field(default_factory=lambda: dict(DEFAULT_OPTIONS))

    def __post_init__(self):
        if self.deployment not in DEPLOYMENTS:
            raise ConfigError(f"unknown deployment {self.deployment}")
        self.delays = {**DEFAULT_DELAYS, **self.delays}
        self.options = {**DEFAULT_OPTIONS, **self.options}

    @classmethod
    def from_dict(cls, doc: Dict, base_dir: Optional[Path] = None) -> "ScenarioConfig":
        validate(doc, "scenario")
        doc = copy.deepcopy(doc)
        topo = doc.get("topology") or desk_topology()
        if isinstance(topo, str):
            path = Path(topo)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            topo = json.loads(path.read_text())
        workload = doc.get("workload") or {"generator": {}}
        if "jobs" in workload:
            jobs = []
            for j in workload["jobs"]:
                if isinstance(j, str):
                    path = Path(j)
                    if base_dir is not None and not path.is_absolute():
                        path = base_dir / path
                    j = json.loads(path.read_text())
                jobs.append(j)
            workload = {**workload, "jobs": jobs}
        return cls(
            seed=doc["seed"],
            topology=topo,
            workload=workload,
            deployment=doc.get("deployment", "houtu"),
            params=SchedulerParams(**doc.get("params", {})),
            failures=doc.get("failures", {}),
            prices=doc.get("prices", {}),
            delays=doc.get("delays", {}),
            injections=doc.get("injections", []),
            options=doc.get("options", {}),
        )

    def to_dict(self) -> Dict:
        p = self.params
        return {
            "seed": self.seed,
            "topology": self.topology,
            "workload": self.workload,
            "deployment": self.deployment,
            "params": {"delta": p.delta, "rho": p.rho, "tau": p.tau, "theta": p.theta, "period_length": p.period_length},
            "failures": self.failures,
            "prices": self.prices,
            "delays": self.delays,
            "injections": self.injections,
            "options": self.options,
        }

    def replace(self, **changes: Any) -> "ScenarioConfig":
        d = {**self.__dict__, **changes}
        return ScenarioConfig(**copy.deepcopy(d))


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    return ScenarioConfig.from_dict(json.loads(path.read_text()), base_dir=path.parent)
