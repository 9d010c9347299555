"""Machine and cross-data-center transfer cost."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

GB = 10 ** 9


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x)) if isinstance(x, str) else Fraction(x)


@dataclass
class PriceTable:
    """Hourly instance prices by purchase option plus the per-GB WAN price.

    Defaults keep only the ratios that matter: Spot is a tenth of On-demand and
    Reserved a third; the absolute On-demand price is a placeholder.
    """

    on_demand: Fraction = Fraction(1, 10)
    reserved: Fraction = Fraction(1, 30)
    spot: Fraction = Fraction(1, 100)
    transfer_per_gb: Fraction = Fraction(13, 100)

    def __post_init__(self):
        for name in ("on_demand", "reserved", "spot", "transfer_per_gb"):
            setattr(self, name, _frac(getattr(self, name)))

    @classmethod
    def from_dict(cls, d: Dict) -> "PriceTable":
        base = cls()
        od = _frac(d.get("on_demand", base.on_demand))
        return cls(
            on_demand=od,
            reserved=_frac(d.get("reserved", od / 3)),
            spot=_frac(d.get("spot", od / 10)),
            transfer_per_gb=_frac(d.get("transfer_per_gb", base.transfer_per_gb)),
        )

    def hourly(self, pricing: str) -> Fraction:
        return {"on_demand": self.on_demand, "reserved": self.reserved, "spot": self.spot}[pricing]


@dataclass
class CostTrace:
    host_uptime: Dict[str, float] = field(default_factory=dict)
    host_pricing: Dict[str, str] = field(default_factory=dict)
    transfers: List[Tuple[str, str, float]] = field(default_factory=list)
    cross_dc_bytes: float = 0.0

    def add_transfer(self, src_dc: str, dst_dc: str, nbytes: float) -> None:
        if src_dc != dst_dc and nbytes > 0:
            self.transfers.append((src_dc, dst_dc, nbytes))
            self.cross_dc_bytes += nbytes

    def with_pricing(self, pricing: str) -> "CostTrace":
        return CostTrace(dict(self.host_uptime), {h: pricing for h in self.host_uptime},
                         list(self.transfers), self.cross_dc_bytes)


def host_costs(trace: CostTrace, prices: PriceTable) -> Dict[str, Fraction]:
    return {
        h: Fraction(up) / 3600 * prices.hourly(trace.host_pricing[h])
        for h, up in sorted(trace.host_uptime.items())
    }


def compute_cost(trace: CostTrace, prices: PriceTable) -> Tuple[Fraction, Fraction]:
    """(machine cost, transfer cost) in dollars, as exact fractions."""
    machine = sum(host_costs(trace, prices).values(), Fraction(0))
    transfer = Fraction(trace.cross_dc_bytes) / GB * prices.transfer_per_gb
    return machine, transfer
