"""Kill the host of the primary job manager at 70 s.  Houtu elects a survivor,
spawns a replacement that inherits the live containers, and keeps going; the
centralized deployments resubmit the job from scratch."""
from geosched.sim import Simulation
from geosched.sim.scenarios import jm_failure

for deployment in ("houtu", "cent-dyna", "cent-stat"):
    sim = Simulation(jm_failure(1, deployment=deployment))
    rep = sim.run()
    (rec,) = rep.recovery
    extra = f"new primary {rec['elected']}, replacement {rec['replacement']}" if "elected" in rec else "job resubmitted"
    print(f"{deployment:<10} response {rep.responses['j0']:6.1f}s  back after {rec['interval']:.0f}s  ({extra})")

print("\nprotocol around the failure (houtu):")
sim = Simulation(jm_failure(1))
sim.run()
for p in sim.protocol:
    if 70 <= p["time"] <= 85 and not p["event"].startswith("steal") and p["event"] not in ("PartitionDone", "TaskReassigned", "ExecutorChange"):
        print(f"  {p['time']:6.1f}  {p['actor']:<8} {p['event']:<14} {p['payload']}")
