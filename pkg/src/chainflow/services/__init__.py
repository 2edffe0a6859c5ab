"""Off-chain runtime: deployment mediation, state traversal, task execution,
event monitoring and the REST surface."""

from .node import EngineNode, LedgerRejectionError, UnknownWorkitemError
from .events import EventMonitor, Notification
from .rest import create_app

__all__ = ["EngineNode", "LedgerRejectionError", "UnknownWorkitemError",
           "EventMonitor", "Notification", "create_app"]
