"""HTTP/JSON surface of the engine node.

Routes follow the four resource families: models (registration, artifacts,
instantiation), processes (instance state), worklists and services (check-in).
A poll endpoint and a server-sent-event stream expose notifications.
"""

from __future__ import annotations

import asyncio
import json
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse

from ..compiler import CompileError
from ..bpmn import BpmnError
from ..ledger import Receipt
from ..repository import NotFoundError
from .events import EventMonitor
from .node import EngineNode, LedgerRejectionError, UnknownWorkitemError


def _receipt_json(receipt: Receipt) -> dict:
    return {
        "status": receipt.status,
        "reason": receipt.reason,
        "gasUsed": receipt.gas_used,
        "blockNumber": receipt.block_number,
    }


def create_app(node: Optional[EngineNode] = None) -> FastAPI:
    node = node or EngineNode()
    monitor = EventMonitor(node.ledger)
    history: list = []  # delivered notifications, replayable via ?after=
    app = FastAPI(title="chainflow engine", version="0.1.0")
    app.state.node = node

    def refresh() -> None:
        history.extend(monitor.poll())

    @app.post("/models")
    async def register_model(request: Request):
        body = await request.json()
        xml = body.get("bpmn")
        if not xml:
            raise HTTPException(422, "body needs a 'bpmn' field with BPMN 2.0 XML")
        mode = body.get("mode", "full")
        try:
            model_hash = node.deploy_model(xml.encode("utf-8"), mode)
        except (CompileError, BpmnError) as e:
            raise HTTPException(422, str(e))
        refresh()
        name = node._dictionaries[model_hash].model_name
        return {"name": name, "hash": model_hash}

    @app.get("/models")
    def list_models():
        return node.models()

    @app.get("/models/{model_hash}")
    def model_detail(model_hash: str):
        try:
            bundle = node.repository.get(model_hash)
        except NotFoundError:
            raise HTTPException(404, f"unknown model {model_hash}")
        return {
            "hash": model_hash,
            "name": node._dictionaries[model_hash].model_name,
            "mode": bundle.mode,
            "bpmn": bundle.bpmn_xml.decode("utf-8"),
            "dictionary": json.loads(bundle.dictionary.decode("utf-8")),
            "contracts": bundle.rendered_text.decode("utf-8"),
        }

    @app.post("/models/{model_hash}")
    def create_instance(model_hash: str):
        try:
            address, receipts = node.create_instance(model_hash)
        except NotFoundError:
            raise HTTPException(404, f"unknown model {model_hash}")
        except LedgerRejectionError as e:
            raise HTTPException(409, str(e))
        refresh()
        return {"address": address, "href": f"/processes/{address}",
                "receipts": [_receipt_json(r) for r in receipts]}

    @app.get("/models/{model_hash}/instances")
    def list_instances(model_hash: str):
        if model_hash not in node._dictionaries:
            raise HTTPException(404, f"unknown model {model_hash}")
        return node.instances_of(model_hash)

    @app.get("/processes/{address}")
    def process_state(address: str):
        try:
            return node.instance_state(address)
        except Exception as e:
            raise HTTPException(404, f"unknown instance {address}: {e}")

    @app.put("/worklists/{worklist}/workitems/{index}")
    async def checkin_workitem(worklist: str, index: int, request: Request):
        values = await _values(request)
        try:
            receipt = node.execute_task(worklist, index, values)
        except UnknownWorkitemError as e:
            raise HTTPException(404, str(e))
        refresh()
        return _receipt_json(receipt)

    @app.put("/services/{service}/tasks/{index}")
    async def checkin_service(service: str, index: int, request: Request):
        values = await _values(request)
        try:
            receipt = node.execute_service(service, index, values)
        except UnknownWorkitemError as e:
            raise HTTPException(404, str(e))
        refresh()
        return _receipt_json(receipt)

    @app.get("/notifications")
    def notifications(after: int = -1):
        refresh()
        return [
            {"kind": n.kind, "block": n.block_number, "logIndex": n.log_index,
             "seq": i, **n.payload}
            for i, n in enumerate(history) if i > after
        ]

    @app.get("/notifications/stream")
    async def notification_stream():
        async def stream():
            cursor = 0
            while True:
                refresh()
                while cursor < len(history):
                    n = history[cursor]
                    data = json.dumps({"kind": n.kind, "block": n.block_number,
                                       "logIndex": n.log_index, "seq": cursor,
                                       **n.payload})
                    yield f"id: {cursor}\ndata: {data}\n\n"
                    cursor += 1
                await asyncio.sleep(0.2)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


async def _values(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        return {}
    if isinstance(body, dict) and "values" in body and isinstance(body["values"], dict):
        return body["values"]
    return body if isinstance(body, dict) else {}
