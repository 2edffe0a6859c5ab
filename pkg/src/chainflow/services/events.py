"""Log polling converted to push-style notifications."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..ledger import Ledger


@dataclass(frozen=True)
class Notification:
    kind: str  # InstanceCreated | WorkitemRequested | WorkitemCompleted | MessageThrown
    block_number: int
    log_index: int
    payload: dict

    @property
    def dedup_key(self) -> tuple[int, int]:
        return (self.block_number, self.log_index)


@dataclass
class EventMonitor:
    ledger: Ledger
    _from_block: int = 0
    _seen: set = field(default_factory=set)

    def poll(self) -> list[Notification]:
        """New notifications since the previous poll, in log order.
        Delivery is at-least-once; consumers dedup on (block, index)."""
        out: list[Notification] = []
        max_block = self._from_block
        for entry in self.ledger.poll_logs(from_block=self._from_block):
            key = (entry.block_number, entry.log_index)
            max_block = max(max_block, entry.block_number)
            if key in self._seen:
                continue
            self._seen.add(key)
            notification = self._convert(entry)
            if notification is not None:
                out.append(notification)
        self._from_block = max_block
        return out

    def _convert(self, entry) -> Optional[Notification]:
        if entry.event_name == "Instance_Created":
            address, process_hash, parent = entry.payload
            return Notification("InstanceCreated", entry.block_number, entry.log_index,
                                {"address": address, "processHash": process_hash,
                                 "parent": parent})
        if entry.event_name.endswith("_Requested"):
            return Notification("WorkitemRequested", entry.block_number, entry.log_index,
                                {"worklist": entry.emitter,
                                 "workitemId": entry.payload[0],
                                 "task": entry.event_name[:-len("_Requested")],
                                 "exports": entry.payload[1:]})
        if entry.event_name == "Workitem_Completed":
            return Notification("WorkitemCompleted", entry.block_number, entry.log_index,
                                {"worklist": entry.emitter,
                                 "workitemId": entry.payload[0],
                                 "elementIndex": entry.payload[1]})
        if entry.event_name == "Message_Thrown":
            return Notification("MessageThrown", entry.block_number, entry.log_index,
                                {"instance": entry.emitter,
                                 "elementIndex": entry.payload[0],
                                 "code": entry.payload[1]})
        return None
