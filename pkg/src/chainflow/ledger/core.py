"""The ledger: contract storage, atomic transactions, gas, append-only log.

One transaction per block, applied in submission order under a lock; rejected
transactions leave no storage deltas and no log entries but still report the
gas spent up to the revert.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from typing import Any, Optional, Protocol

from ..guardlang import Revert

Address = str
NULL_ADDRESS = "0x" + "00" * 20


class LedgerError(ValueError):
    pass


class UnknownTargetError(LedgerError):
    pass


class NonceGapError(LedgerError):
    pass


class NotReadOnlyError(LedgerError):
    pass


@dataclass(frozen=True)
class GasSchedule:
    tx_base: int = 21000
    storage_set: int = 20000      # writing a fresh or zero slot
    storage_update: int = 5000    # overwriting a live slot
    storage_read: int = 200
    log_base: int = 375
    log_byte: int = 8
    deploy_base: int = 32000
    deploy_byte: int = 200        # per canonical image byte
    transition_step: int = 10     # per fired transition in a step loop


@dataclass
class LogEntry:
    emitter: Address
    event_name: str
    payload: list
    block_number: int
    log_index: int


@dataclass
class Receipt:
    status: str                   # accepted | rejected
    reason: Optional[str]
    gas_used: int
    logs: list[LogEntry]
    block_number: int
    value: Any = None

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"


@dataclass
class Transaction:
    sender: Address
    target: Optional[Address]     # None deploys args[0] as a contract image
    operation: str
    args: list = field(default_factory=list)
    nonce: Optional[int] = None


@dataclass
class Account:
    address: Address
    image: bytes
    storage: dict[str, Any] = field(default_factory=dict)


class ContractRuntime(Protocol):
    def execute(self, ctx: "TxContext", address: Address, operation: str, args: list): ...
    def on_deploy(self, ctx: "TxContext", address: Address) -> None: ...
    def is_read_only(self, image: bytes, operation: str) -> bool: ...


def derive_address(creator: Address, nonce: int) -> Address:
    digest = hashlib.sha256(f"{creator}:{nonce}".encode()).hexdigest()
    return "0x" + digest[:40]


class TxContext:
    """Mutation overlay for one transaction; handlers read and write through
    it so a revert can discard everything."""

    def __init__(self, ledger: "Ledger", block_number: int, read_only: bool = False):
        self._ledger = ledger
        self.schedule = ledger.schedule
        self.block_number = block_number
        self.read_only = read_only
        self.gas = 0
        self.logs: list[LogEntry] = []
        self._overlay: dict[Address, dict[str, Any]] = {}
        self._created: dict[Address, Account] = {}
        self._nonce_overlay: dict[Address, int] = {}
        self._metering = True
        self._depth = 0
        self._caller_stack: list[Address] = [NULL_ADDRESS]

    @property
    def caller(self) -> Address:
        """msg.sender of the current call frame."""
        return self._caller_stack[-1]

    # -- gas -------------------------------------------------------------

    def charge(self, amount: int) -> None:
        if self._metering:
            self.gas += amount

    def _unmetered(self):
        ctx = self

        class _Quiet:
            def __enter__(self):
                self.prev = ctx._metering
                ctx._metering = False

            def __exit__(self, *exc):
                ctx._metering = self.prev

        return _Quiet()

    # -- storage ----------------------------------------------------------

    def account(self, address: Address) -> Account:
        acct = self._created.get(address) or self._ledger.accounts.get(address)
        if acct is None:
            raise UnknownTargetError(f"no contract at {address}")
        return acct

    def has_account(self, address: Address) -> bool:
        return address in self._created or address in self._ledger.accounts

    def image(self, address: Address) -> bytes:
        return self.account(address).image

    def sget(self, address: Address, key: str, default: Any = 0) -> Any:
        self.charge(self.schedule.storage_read)
        overlay = self._overlay.get(address)
        if overlay is not None and key in overlay:
            value = overlay[key]
        else:
            value = self.account(address).storage.get(key, default)
        return default if value is None else value

    def sset(self, address: Address, key: str, value: Any) -> None:
        if self.read_only:
            raise NotReadOnlyError(f"write to {key} in a read-only call")
        previous_overlay = self._overlay.get(address, {})
        if key in previous_overlay:
            previous = previous_overlay[key]
        else:
            previous = self.account(address).storage.get(key)
        fresh = previous in (None, 0, "", NULL_ADDRESS)
        self.charge(self.schedule.storage_set if fresh else self.schedule.storage_update)
        self._overlay.setdefault(address, {})[key] = value

    # -- logs --------------------------------------------------------------

    def emit(self, emitter: Address, event_name: str, payload: list) -> None:
        if self.read_only:
            raise NotReadOnlyError("log emission in a read-only call")
        size = len(json.dumps(payload, default=str))
        self.charge(self.schedule.log_base + self.schedule.log_byte * size)
        self.logs.append(LogEntry(
            emitter=emitter, event_name=event_name, payload=list(payload),
            block_number=self.block_number, log_index=len(self.logs)))

    # -- cross-contract interaction -----------------------------------------

    def call_contract(self, target: Address, operation: str, args: list,
                      caller: Optional[Address] = None):
        if self._depth > 64:
            raise Revert("call depth exceeded")
        self._depth += 1
        self._caller_stack.append(caller if caller is not None else self.caller)
        try:
            return self._ledger.runtime.execute(self, target, operation, args)
        finally:
            self._caller_stack.pop()
            self._depth -= 1

    def deploy_contract(self, creator: Address, image: bytes) -> Address:
        if self.read_only:
            raise NotReadOnlyError("deployment in a read-only call")
        nonce = self._nonce_overlay.get(creator, self._ledger.nonces.get(creator, 0))
        self._nonce_overlay[creator] = nonce + 1
        address = derive_address(creator, nonce)
        self.charge(self.schedule.deploy_base + self.schedule.deploy_byte * len(image))
        self._created[address] = Account(address=address, image=image)
        with self._unmetered():
            self._ledger.runtime.on_deploy(self, address)
        return address

    # -- commit ---------------------------------------------------------------

    def _commit(self) -> None:
        for address, account in self._created.items():
            self._ledger.accounts[address] = account
        for address, slots in self._overlay.items():
            self._ledger.accounts[address].storage.update(slots)
        for address, nonce in self._nonce_overlay.items():
            self._ledger.nonces[address] = nonce
        self._ledger.logs.extend(self.logs)


class Ledger:
    def __init__(self, runtime: ContractRuntime, schedule: Optional[GasSchedule] = None):
        self.runtime = runtime
        self.schedule = schedule or GasSchedule()
        self.accounts: dict[Address, Account] = {}
        self.logs: list[LogEntry] = []
        self.nonces: dict[Address, int] = {}
        self.block_number = 0
        self.journal: list[dict] = []
        self._lock = threading.Lock()

    # -- transactions -----------------------------------------------------

    def deploy(self, sender: Address, image: bytes) -> tuple[Address, Receipt]:
        receipt = self.submit(Transaction(sender=sender, target=None,
                                          operation="deploy", args=[image]))
        if not receipt.accepted:
            raise LedgerError(f"deployment rejected: {receipt.reason}")
        return receipt.value, receipt

    def submit(self, tx: Transaction) -> Receipt:
        with self._lock:
            expected = self.nonces.get(tx.sender, 0)
            if tx.nonce is not None and tx.nonce != expected:
                raise NonceGapError(
                    f"nonce {tx.nonce} for {tx.sender}, expected {expected}")
            self.nonces[tx.sender] = expected + 1
            self._journal_tx(tx)

            block = self.block_number + 1
            ctx = TxContext(self, block)
            try:
                if tx.target is None:
                    if tx.operation != "deploy":
                        raise Revert("deployment transactions use operation 'deploy'")
                    image = tx.args[0]
                    # the submitting sender's nonce was consumed above; the
                    # derived address uses the pre-bump value for determinism
                    ctx._nonce_overlay[tx.sender] = expected + 1
                    address = derive_address(tx.sender, expected)
                    ctx.charge(self.schedule.deploy_base
                               + self.schedule.deploy_byte * len(image))
                    ctx._created[address] = Account(address=address, image=image)
                    with ctx._unmetered():
                        self.runtime.on_deploy(ctx, address)
                    value = address
                else:
                    if tx.target not in self.accounts:
                        raise UnknownTargetError(f"no contract at {tx.target}")
                    ctx.charge(self.schedule.tx_base)
                    ctx._caller_stack = [tx.sender]
                    value = self.runtime.execute(ctx, tx.target, tx.operation,
                                                 list(tx.args))
            except Revert as e:
                return Receipt(status="rejected", reason=e.reason, gas_used=ctx.gas,
                               logs=[], block_number=self.block_number)
            ctx._commit()
            self.block_number = block
            return Receipt(status="accepted", reason=None, gas_used=ctx.gas,
                           logs=list(ctx.logs), block_number=block, value=value)

    def call(self, target: Address, operation: str, args: Optional[list] = None):
        with self._lock:
            if target not in self.accounts:
                raise UnknownTargetError(f"no contract at {target}")
            if not self.runtime.is_read_only(self.accounts[target].image, operation):
                raise NotReadOnlyError(f"{operation} mutates state")
            ctx = TxContext(self, self.block_number, read_only=True)
            return self.runtime.execute(ctx, target, operation, args or [])

    def poll_logs(self, emitter: Optional[Address] = None,
                  event_name: Optional[str] = None, from_block: int = 0) -> list[LogEntry]:
        with self._lock:
            return [entry for entry in self.logs
                    if entry.block_number >= from_block
                    and (emitter is None or entry.emitter == emitter)
                    and (event_name is None or entry.event_name == event_name)]

    # -- journal ------------------------------------------------------------

    def _journal_tx(self, tx: Transaction) -> None:
        if tx.target is None:
            self.journal.append({"kind": "deploy", "sender": tx.sender,
                                 "image": tx.args[0].hex()})
        else:
            self.journal.append({"kind": "submit", "sender": tx.sender,
                                 "target": tx.target, "operation": tx.operation,
                                 "args": tx.args})

    def replay_journal(self, journal: list[dict]) -> list[Receipt]:
        receipts = []
        for entry in journal:
            if entry["kind"] == "deploy":
                receipts.append(self.submit(Transaction(
                    sender=entry["sender"], target=None, operation="deploy",
                    args=[bytes.fromhex(entry["image"])])))
            else:
                receipts.append(self.submit(Transaction(
                    sender=entry["sender"], target=entry["target"],
                    operation=entry["operation"], args=list(entry["args"]))))
        return receipts
