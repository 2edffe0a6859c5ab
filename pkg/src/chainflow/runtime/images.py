"""Deployable contract images.

Process/flat/recorder contracts deploy the compiler's canonical IR bytes
directly; worklists, service bridges, factories and the registry use small
runtime-defined images described here.
"""

from __future__ import annotations

import base64
import json

from ..compiler.ir import AnyContract, deserialize_contract, serialize_contract

_RUNTIME_FORMAT = "chainflow-runtime-1"


def worklist_image(scope_hash: str, scope_name: str, bindings: list[dict],
                   resource: str = "worklist") -> bytes:
    """bindings: per external element, the function names and parameter
    schemas the oracle contract needs to mediate requests."""
    payload = {
        "format": _RUNTIME_FORMAT,
        "kind": "worklist",
        "resource": resource,
        "scope_hash": scope_hash,
        "scope_name": scope_name,
        "bindings": bindings,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def factory_image(scope_hash: str, ir: bytes) -> bytes:
    payload = {
        "format": _RUNTIME_FORMAT,
        "kind": "factory",
        "scope_hash": scope_hash,
        "ir": base64.b64encode(ir).decode(),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def registry_image() -> bytes:
    payload = {"format": _RUNTIME_FORMAT, "kind": "registry"}
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def process_image(contract: AnyContract) -> bytes:
    return serialize_contract(contract)


def decode_image(image: bytes) -> dict:
    """Decode any image into {"kind": ..., ...}; process-family images carry
    the revived contract under "contract"."""
    payload = json.loads(image.decode("utf-8"))
    fmt = payload.get("format")
    if fmt == _RUNTIME_FORMAT:
        if payload["kind"] == "factory":
            payload["ir_bytes"] = base64.b64decode(payload["ir"])
        return payload
    if fmt == "chainflow-ir-1":
        contract = deserialize_contract(image)
        return {"format": fmt, "kind": contract.kind, "contract": contract}
    raise ValueError("unrecognized contract image")
