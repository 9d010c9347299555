"""The desk-scale job mix under all four deployments, a few seeds each."""
import statistics

from geosched.sim import Simulation
from geosched.sim.scenarios import desk_mix

DEPLOYMENTS = ("houtu", "decent-stat", "cent-stat", "cent-dyna")
rows = {d: [] for d in DEPLOYMENTS}
for seed in range(5):
    for d in DEPLOYMENTS:
        rep = Simulation(desk_mix(seed, d)).run()
        rows[d].append((rep.avg_response_time, rep.makespan, rep.cross_dc_bytes / 1e9, float(rep.total_cost)))

print(f"{'deployment':<12}{'avg resp':>10}{'makespan':>10}{'WAN GB':>9}{'cost $':>9}")
for d, vals in rows.items():
    cols = [statistics.fmean(v[i] for v in vals) for i in range(4)]
    print(f"{d:<12}{cols[0]:>10.1f}{cols[1]:>10.1f}{cols[2]:>9.2f}{cols[3]:>9.3f}")
