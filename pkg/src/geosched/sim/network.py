"""Stochastic LAN/WAN bandwidth and transfer-time model."""
from __future__ import annotations

import numpy as np

from ..model import LinkModel

MBIT = 1e6
DEFAULT_RESAMPLE_INTERVAL = 5.0


def sample_bandwidth(link: LinkModel, rng: np.random.Generator) -> float:
    """Normal(mean, stddev) draw truncated below at the link floor, in Mbps."""
    if link.stddev_mbps == 0:
        return link.mean_mbps
    while True:
        bw = float(rng.normal(link.mean_mbps, link.stddev_mbps))
        if bw >= link.floor_mbps:
            return bw


def transfer_time(nbytes: float, link: LinkModel, rng: np.random.Generator,
                  resample_interval: float = DEFAULT_RESAMPLE_INTERVAL) -> float:
    """Seconds to move ``nbytes`` over ``link``.

    Bandwidth is drawn at the start and redrawn every ``resample_interval``
    seconds while the transfer is still running.
    """
    if nbytes <= 0:
        return 0.0
    remaining = nbytes * 8 / MBIT
    elapsed = 0.0
    while True:
        bw = sample_bandwidth(link, rng)
        if remaining <= bw * resample_interval:
            return elapsed + remaining / bw
        remaining -= bw * resample_interval
        elapsed += resample_interval


def message_latency(mean: float, link: LinkModel, rng: np.random.Generator) -> float:
    """A small-message delay with the given mean, scaled by how congested the
    link currently is (mean bandwidth over the sampled bandwidth)."""
    if mean <= 0:
        return 0.0
    return mean * link.mean_mbps / sample_bandwidth(link, rng)
