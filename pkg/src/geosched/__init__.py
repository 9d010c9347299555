"""Geo-distributed DAG job scheduling: adaptive container requests, locality-aware
task placement with work stealing, fair sharing and replicated job managers."""
from .model import SchedulerParams

__version__ = "0.1.0"
__all__ = ["SchedulerParams"]
