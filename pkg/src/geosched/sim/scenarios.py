"""Canned desk-scale scenarios used by the demos and the acceptance suite."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .config import ScenarioConfig, desk_topology
from .workload import template

# Desk mix: the job mix of the testbed experiments, with arrivals and task
# lengths scaled so that about as many jobs overlap as on the 20-VM testbed.
DESK_MIX = {"n_jobs": 20, "mean_interarrival": 30.0, "p_scale": 2.0}


def desk_mix(seed: int, deployment: str = "houtu", **options) -> ScenarioConfig:
    return ScenarioConfig(seed=seed, topology=desk_topology(), workload={"generator": dict(DESK_MIX)},
                          deployment=deployment, options=options)


def _single_job(family: str, roots: int, p_mult: float) -> dict:
    return {"jobs": [{"id": "j0", "release_time": 0.0, "stages": template(family, roots, p_mult)}]}


def saturation(seed: int, stealing: bool = True, at: float = 100.0, tenants: int = 3,
               busy_dcs=("dc0", "dc1", "dc2")) -> ScenarioConfig:
    """One long iterative job; at ``at`` seconds other tenants claim the spare
    containers of three of the four data centers."""
    return ScenarioConfig(
        seed=seed,
        topology=desk_topology(),
        workload=_single_job("iterative", 24, 3.0),
        deployment="houtu",
        injections=[{"dc": dc, "time": at, "tenants": tenants} for dc in busy_dcs],
        options={"stealing": stealing},
    )


def jm_failure(seed: int, target: str = "pJM", deployment: str = "houtu", at: float = 70.0,
               kind: str = "host") -> ScenarioConfig:
    """One iterative job whose primary or semi-active manager host dies at ``at``."""
    return ScenarioConfig(
        seed=seed,
        topology=desk_topology(),
        workload=_single_job("iterative", 24, 1.0),
        deployment=deployment,
        failures={"explicit": [{"time": at, "job": "j0", "target": target, "kind": kind}]},
    )


def random_bound_scenario(seed: int, deployment: str = "houtu") -> ScenarioConfig:
    """1-4 data centers, 2-16 containers each, 1-20 jobs all released at time 0."""
    rng = np.random.default_rng(seed)
    n_dcs = int(rng.integers(1, 5))
    per_dc = int(rng.integers(2, 17))
    n_jobs = int(rng.integers(1, 21))
    return ScenarioConfig(seed=seed, topology=desk_topology(n_dcs, per_dc),
                          workload={"generator": {"n_jobs": n_jobs, "release": "zero"}}, deployment=deployment)


def single_dc(seed: int, deployment: str = "houtu", n_jobs: int = 6) -> ScenarioConfig:
    return ScenarioConfig(seed=seed, topology=desk_topology(1, 8),
                          workload={"generator": {"n_jobs": n_jobs, "mean_interarrival": 20.0}},
                          deployment=deployment)
