"""Deterministic transaction-serialized ledger with gas metering."""

from .core import (
    NULL_ADDRESS,
    Account,
    GasSchedule,
    Ledger,
    LedgerError,
    LogEntry,
    NonceGapError,
    NotReadOnlyError,
    Receipt,
    Transaction,
    TxContext,
    UnknownTargetError,
)
from .snapshot import export_snapshot, import_snapshot

__all__ = [
    "NULL_ADDRESS", "Account", "GasSchedule", "Ledger", "LedgerError",
    "LogEntry", "NonceGapError", "NotReadOnlyError", "Receipt", "Transaction",
    "TxContext", "UnknownTargetError", "export_snapshot", "import_snapshot",
]
