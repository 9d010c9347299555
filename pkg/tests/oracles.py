"""Independent reference implementations used as test oracles."""
import itertools
import math
import random
from fractions import Fraction
from typing import Dict, List, Mapping


def waterfill(desires: Mapping[str, int], capacity: int) -> Dict[str, int]:
    """Max-min fair allocation by brute force.

    Enumerates every grant vector with a_k <= d_k and sum a_k = min(C, sum d_k)
    and keeps the one whose sorted grant vector is lexicographically largest
    (the max-min fair one); ties among permutations go to smaller keys.
    """
    keys = sorted(desires)
    total = min(capacity, sum(desires.values()))
    best = None
    best_key = None
    for combo in itertools.product(*[range(desires[k] + 1) for k in keys]):
        if sum(combo) != total:
            continue
        # max-min: maximise the smallest grant, then the next, ...; among equal
        # profiles prefer extra units on earlier keys
        key = (sorted(combo), combo)
        if best_key is None or key > best_key:
            best, best_key = combo, key
    return dict(zip(keys, best)) if best is not None else {k: 0 for k in keys}


def transfer_time_mc(nbytes: float, mean: float, std: float, floor: float, interval: float,
                     trials: int, seed: int) -> List[float]:
    """Monte-Carlo transfer times written against the stdlib RNG: bandwidth is
    a floor-truncated normal, redrawn every ``interval`` seconds."""
    rnd = random.Random(seed)
    out = []
    for _ in range(trials):
        left = nbytes * 8 / 1e6
        t = 0.0
        while True:
            bw = rnd.gauss(mean, std)
            while bw < floor:
                bw = rnd.gauss(mean, std)
            if left <= bw * interval:
                out.append(t + left / bw)
                break
            left -= bw * interval
            t += interval
    return out


def desire_recurrence(records, rho, delta, cap) -> List[int]:
    """Desires for periods 1..n+1 computed with exact rationals."""
    rho = Fraction(str(rho))
    out = [1]
    for rec in records:
        d = Fraction(rec.desire)
        if rec.utilization < delta and not rec.had_waiting_tasks:
            raw = d / rho
        elif rec.desire > rec.allocation:
            raw = d
        else:
            raw = d * rho
        out.append(min(max(1, math.ceil(raw)), cap))
    return out


def waterfill_table(desires: Mapping[str, int]) -> Dict[int, Dict[str, int]]:
    """``waterfill`` for every total at once: the brute-force enumeration is
    shared across capacities."""
    keys = sorted(desires)
    best: Dict[int, tuple] = {}
    for combo in itertools.product(*[range(desires[k] + 1) for k in keys]):
        s = sum(combo)
        key = (sorted(combo), combo)
        if s not in best or key > best[s][0]:
            best[s] = (key, combo)
    return {s: dict(zip(keys, v[1])) for s, v in best.items()}
