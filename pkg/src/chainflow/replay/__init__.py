"""Log replay, conformance classification and cross-mode cost reports."""

from .eventlog import Event, EventLog, dedupe, inject_noise, parse_log, format_log
from .datasets import DATASET_SHAPES, dataset_model, simulate_log
from .runner import CostReport, ModeCost, ReplayOutcome, compare_modes, replay

__all__ = [
    "Event", "EventLog", "dedupe", "inject_noise", "parse_log", "format_log",
    "DATASET_SHAPES", "dataset_model", "simulate_log",
    "CostReport", "ModeCost", "ReplayOutcome", "compare_modes", "replay",
]
