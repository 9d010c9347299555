"""Run metrics and the files a run writes."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence


@dataclass
class MetricsReport:
    deployment: str
    seed: int
    makespan: float
    avg_response_time: float
    responses: Dict[str, float]
    completed: int
    aborted: List[str]
    rejected: List[str]
    machine_cost: Fraction
    transfer_cost: Fraction
    cross_dc_bytes: float
    bound: Optional[float] = None
    bound_ok: Optional[bool] = None
    recovery: List[Dict] = field(default_factory=list)
    steals: Dict = field(default_factory=dict)
    reexecuted: Dict[str, List[str]] = field(default_factory=dict)
    events: int = 0
    end_time: float = 0.0

    @property
    def total_cost(self) -> Fraction:
        return self.machine_cost + self.transfer_cost

    def to_dict(self) -> Dict:
        d = asdict(self)
        for k in ("machine_cost", "transfer_cost"):
            d[k] = {"exact": str(getattr(self, k)), "usd": float(getattr(self, k))}
        d["total_cost"] = {"exact": str(self.total_cost), "usd": float(self.total_cost)}
        return d


def _write_csv(path: Path, rows: Sequence[Dict]) -> None:
    with path.open("w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def write_outputs(report: MetricsReport, sim, out_dir) -> Path:
    """metrics.json, trace.csv, periods.csv and protocol.jsonl under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
    _write_csv(out / "trace.csv", sim.trace)
    _write_csv(out / "periods.csv", sim.periods)
    with (out / "protocol.jsonl").open("w") as fh:
        for entry in sim.protocol:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    return out
