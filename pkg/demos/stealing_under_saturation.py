"""Other tenants take every spare container in three of four data centers at
t=100 s.  With stealing, the job managers there hand waiting tasks to the one
data center that still has room; without it those tasks sit in the queue.

Only a handful of tasks are stolen, but the outputs of those tasks now live in
the free data center, so the next stage (split by where its input is) starts
there too: stealing compounds across stages."""
import statistics

from geosched.sim import Simulation
from geosched.sim.scenarios import saturation


def summarize(label, sim, rep):
    late = [r for r in sim.trace if r["time"] > 100]
    by_dc = {}
    for r in late:
        by_dc.setdefault(r["container"].split("-")[0], []).append(r["wait"])
    waits = ", ".join(f"{dc} {statistics.fmean(w):5.1f}s" for dc, w in sorted(by_dc.items()))
    counts = "/".join(str(len(w)) for _, w in sorted(by_dc.items()))
    stolen = sum(r["tier"] == "stolen" for r in sim.trace)
    print(f"{label:<12} response {rep.responses['j0']:6.1f}s  stolen {stolen}  tasks per DC after 100s {counts}")
    print(f"{'':<12} mean wait after 100s: {waits}")


for seed in (1, 2, 3):
    print(f"seed {seed}")
    for label, stealing in (("stealing", True), ("no stealing", False)):
        sim = Simulation(saturation(seed, stealing=stealing))
        summarize(label, sim, sim.run())
