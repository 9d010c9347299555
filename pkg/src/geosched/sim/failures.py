"""Failure events: explicit job-manager kills and Poisson Spot terminations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..model import ClusterTopology, Reliability


@dataclass(frozen=True)
class FailureEvent:
    time: float
    kind: str  # "host" kills the node and everything on it, "process" only the job manager
    node: Optional[str] = None
    job: Optional[str] = None
    target: Optional[str] = None  # "pJM", "sJM" or a data-center id, resolved when the event fires


def inject_failures(spec: Dict, rng: np.random.Generator, topology: ClusterTopology) -> List[FailureEvent]:
    events: List[FailureEvent] = []
    for e in spec.get("explicit", []):
        events.append(FailureEvent(float(e["time"]), e.get("kind", "host"), e.get("node"), e.get("job"), e.get("target")))
    rate = float(spec.get("spot_rate", 0.0))
    horizon = float(spec.get("horizon", 0.0))
    if rate > 0 and horizon > 0:
        for node in sorted(topology.nodes.values(), key=lambda n: n.id):
            if node.reliability is not Reliability.SPOT:
                continue
            t = 0.0
            while True:
                t += float(rng.exponential(1.0 / rate))
                if t > horizon:
                    break
                events.append(FailureEvent(round(t, 6), "host", node=node.id))
    events.sort(key=lambda e: (e.time, e.node or "", e.job or "", e.target or ""))
    return events
