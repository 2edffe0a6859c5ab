"""Canonical text snapshots of full ledger state, for golden comparisons."""

from __future__ import annotations

import base64
import json

from .core import Account, Ledger, LogEntry

_HEADER = "chainflow-ledger-snapshot-1"


def export_snapshot(ledger: Ledger) -> str:
    lines = [_HEADER, f"block {ledger.block_number}"]
    for sender in sorted(ledger.nonces):
        lines.append(f"nonce {sender} {ledger.nonces[sender]}")
    for address in sorted(ledger.accounts):
        account = ledger.accounts[address]
        lines.append(f"account {address}")
        lines.append(f"  image {base64.b64encode(account.image).decode()}")
        for key in sorted(account.storage):
            lines.append(f"  slot {key} {json.dumps(account.storage[key], sort_keys=True)}")
    for entry in ledger.logs:
        lines.append(
            f"log {entry.block_number} {entry.log_index} {entry.emitter} "
            f"{entry.event_name} {json.dumps(entry.payload, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def import_snapshot(text: str, runtime) -> Ledger:
    from .core import Ledger as _Ledger
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise ValueError("not a ledger snapshot")
    ledger = _Ledger(runtime)
    current: Account | None = None
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("block "):
            ledger.block_number = int(line.split()[1])
        elif line.startswith("nonce "):
            _, sender, n = line.split()
            ledger.nonces[sender] = int(n)
        elif line.startswith("account "):
            address = line.split()[1]
            current = Account(address=address, image=b"")
            ledger.accounts[address] = current
        elif line.startswith("  image "):
            assert current is not None
            current.image = base64.b64decode(line.strip().split(" ")[1])
        elif line.startswith("  slot "):
            assert current is not None
            _, key, raw = line.strip().split(" ", 2)
            current.storage[key] = json.loads(raw)
        elif line.startswith("log "):
            _, block, index, emitter, event, raw = line.split(" ", 5)
            ledger.logs.append(LogEntry(
                emitter=emitter, event_name=event, payload=json.loads(raw),
                block_number=int(block), log_index=int(index)))
        else:
            raise ValueError(f"unexpected snapshot line: {line!r}")
    return ledger
