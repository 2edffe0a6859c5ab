"""Dispatch of ledger execution into the contract handlers."""

from __future__ import annotations

import hashlib

from ..guardlang import Revert
from ..ledger.core import TxContext
from .images import decode_image
from .process import ProcessVm, _READ_ONLY as PROCESS_READ_ONLY, decl_env_for
from .simple import (
    FLAT_READ_ONLY,
    RECORDER_READ_ONLY,
    REGISTRY_READ_ONLY,
    WORKLIST_READ_ONLY,
    factory_execute,
    flat_execute,
    recorder_execute,
    registry_execute,
    worklist_execute,
)


class EngineRuntime:
    """ContractRuntime implementation interpreting every image kind."""

    def __init__(self):
        self._image_cache: dict[bytes, dict] = {}
        self._decl_cache: dict[int, object] = {}

    def decode(self, image: bytes) -> dict:
        key = hashlib.sha256(image).digest()
        cached = self._image_cache.get(key)
        if cached is None:
            cached = decode_image(image)
            self._image_cache[key] = cached
        return cached

    def decls_for(self, contract):
        key = id(contract)
        env = self._decl_cache.get(key)
        if env is None:
            env = decl_env_for(contract)
            self._decl_cache[key] = env
        return env

    # -- ContractRuntime ----------------------------------------------------

    def execute(self, ctx: TxContext, address: str, operation: str, args: list):
        image = self.decode(ctx.image(address))
        kind = image["kind"]
        if kind == "worklist":
            return worklist_execute(image, ctx, address, operation, args)
        if kind == "factory":
            return factory_execute(image, ctx, address, operation, args)
        if kind == "registry":
            return registry_execute(ctx, address, operation, args)
        if kind == "recorder":
            return recorder_execute(ctx, address, operation, args)
        if kind == "flat":
            return flat_execute(self, image["contract"], ctx, address, operation, args)
        if kind == "process":
            return self._execute_process(image["contract"], ctx, address, operation, args)
        raise Revert(f"unknown contract kind {kind}")

    def _execute_process(self, contract, ctx: TxContext, address: str,
                         operation: str, args: list):
        vm = ProcessVm(self, ctx, address, contract)
        if operation in PROCESS_READ_ONLY:
            return vm.op_read(operation, args)
        if operation == "start_execution":
            return vm.op_start_execution()
        if operation == "set_instance_index":
            return vm.op_set_instance_index(int(args[0]))
        if operation == "handle_event":
            kind, code, child_index = args
            return vm.op_handle_event(kind, code, int(child_index))
        if operation == "broadcast_signal":
            return vm.op_broadcast_signal(args[0] if args else "")
        if operation == "terminate_from_parent":
            return vm.op_terminate_from_parent()
        for binding in contract.external.values():
            if operation == binding.complete_function:
                return vm.op_complete(binding, args)
        raise Revert(f"unknown process operation {operation!r}")

    def on_deploy(self, ctx: TxContext, address: str) -> None:
        image = self.decode(ctx.image(address))
        kind = image["kind"]
        if kind == "process":
            ctx.sset(address, "marking", image["contract"].initial_marking)
        elif kind == "flat":
            from .simple import FlatVm
            FlatVm(self, ctx, address, image["contract"]).deploy()

    def is_read_only(self, image: bytes, operation: str) -> bool:
        kind = self.decode(image)["kind"]
        table = {
            "process": PROCESS_READ_ONLY,
            "worklist": WORKLIST_READ_ONLY,
            "registry": REGISTRY_READ_ONLY,
            "flat": FLAT_READ_ONLY,
            "recorder": RECORDER_READ_ONLY,
            "factory": set(),
        }[kind]
        return operation in table
