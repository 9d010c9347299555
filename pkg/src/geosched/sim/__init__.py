from .config import ConfigError, ScenarioConfig, desk_topology, load_config
from .report import MetricsReport, write_outputs
from .runner import Simulation, run, run_baseline

__all__ = ["ConfigError", "ScenarioConfig", "desk_topology", "load_config", "MetricsReport",
           "write_outputs", "Simulation", "run", "run_baseline"]
