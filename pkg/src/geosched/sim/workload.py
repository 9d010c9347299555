"""Synthetic DAG workloads shaped like word count, multi-way join, iterative
training and PageRank, with a small/medium/large size mix and Poisson arrivals."""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np

from ..model import ClusterTopology, DagJob
from .config import job_from_dict

FAMILIES = ("wordcount", "tpch", "iterative", "pagerank")
SIZE_CLASSES = ("small", "medium", "large")
DEFAULT_MIX = {"small": 0.46, "medium": 0.40, "large": 0.14}
DEFAULT_SIZES = {"small": 4, "medium": 12, "large": 24}

DEFAULTS = {
    "n_jobs": 20,
    "mean_interarrival": 60.0,
    "mix": DEFAULT_MIX,
    "sizes": DEFAULT_SIZES,
    "families": list(FAMILIES),
    "release": "poisson",
    "p_scale": 1.0,
    "p_jitter": 0.2,
    "input_scale": 1.0,
}


def _stage(sid, tasks, r, p, mb, preds=(), data=None):
    d = {"id": sid, "tasks": max(1, int(tasks)), "r": r, "p": p, "input_mb": mb, "predecessors": list(preds)}
    if data is not None:
        d["data"] = data
    return d


def template(family: str, n: int, p_mult: float = 1.0, mb_mult: float = 1.0,
             data: Optional[Dict[str, float]] = None) -> List[Dict]:
    """Stage list for one job family with ``n`` root tasks."""
    P = lambda x: round(x * p_mult, 3)
    M = lambda x: round(x * mb_mult, 3)
    half = max(1, n // 2)
    if family == "wordcount":
        return [
            _stage(0, n, 0.25, P(30), M(64), data=data),
            _stage(1, max(1, n // 4), 0.5, P(20), M(64), [0]),
        ]
    if family == "tpch":
        # two tables in every data center
        return [
            _stage(0, half, 0.25, P(25), M(64), data=data),
            _stage(1, half, 0.25, P(15), M(32), data=data),
            _stage(2, half, 0.5, P(30), M(64), [0, 1]),
            _stage(3, max(1, n // 8), 0.25, P(15), M(16), [2]),
        ]
    if family == "iterative":
        return [
            _stage(0, n, 0.25, P(25), M(64), data=data),
            _stage(1, half, 0.5, P(20), M(32), [0]),
            _stage(2, half, 0.5, P(20), M(32), [1]),
            _stage(3, half, 0.5, P(20), M(32), [2]),
        ]
    if family == "pagerank":
        return [
            _stage(0, n, 0.25, P(25), M(64), data=data),
            _stage(1, half, 0.5, P(25), M(48), [0]),
            _stage(2, half, 0.25, P(15), M(32), [1]),
        ]
    raise ValueError(f"unknown family {family}")


def _streams(rng: np.random.Generator) -> Tuple[np.random.Generator, ...]:
    # independent streams so e.g. changing the size mix leaves arrival times alone
    return tuple(rng.spawn(4))


def generate_job_docs(spec: Dict, rng: np.random.Generator) -> List[Dict]:
    cfg = {**DEFAULTS, **spec}
    arr_rng, size_rng, fam_rng, jit_rng = _streams(rng)
    n = int(cfg["n_jobs"])
    if cfg["release"] == "zero":
        arrivals = np.zeros(n)
    else:
        gaps = arr_rng.exponential(cfg["mean_interarrival"], size=n)
        gaps[0] = 0.0
        arrivals = np.cumsum(gaps)
    mix = cfg["mix"]
    classes = list(mix)
    probs = np.array([mix[c] for c in classes], dtype=float)
    probs = probs / probs.sum()
    size_idx = size_rng.choice(len(classes), size=n, p=probs)
    fams = list(cfg["families"])
    fam_idx = fam_rng.integers(0, len(fams), size=n)
    jit = jit_rng.uniform(1 - cfg["p_jitter"], 1 + cfg["p_jitter"], size=n)
    docs = []
    for i in range(n):
        size = classes[size_idx[i]]
        fam = fams[fam_idx[i]]
        stages = template(fam, int(cfg["sizes"][size]), float(cfg["p_scale"] * jit[i]), float(cfg["input_scale"]))
        docs.append({
            "id": f"j{i:03d}",
            "release_time": round(float(arrivals[i]), 6),
            "family": fam,
            "size": size,
            "stages": stages,
        })
    return docs


def generate_workload(spec: Dict, rng: np.random.Generator, topology: ClusterTopology) -> List[Tuple[DagJob, float]]:
    out = []
    for i, doc in enumerate(generate_job_docs(spec, rng)):
        body = {k: v for k, v in doc.items() if k not in ("family", "size")}
        job = job_from_dict(body, topology, ordinal=i)
        out.append((job, job.release_time))
    return out
