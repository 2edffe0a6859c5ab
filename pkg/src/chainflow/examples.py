"""Access to the bundled example models."""

from importlib import resources


def order_to_cash_xml() -> bytes:
    return (resources.files("chainflow") / "models" / "order_to_cash.bpmn").read_bytes()
