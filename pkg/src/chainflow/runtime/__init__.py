"""Interpretation of compiled contracts on the ledger: workflow instances,
worklists, service bridges, factories and the runtime registry."""

from .core import EngineRuntime
from .images import (
    decode_image,
    factory_image,
    registry_image,
    worklist_image,
)

__all__ = ["EngineRuntime", "decode_image", "factory_image", "registry_image",
           "worklist_image"]
