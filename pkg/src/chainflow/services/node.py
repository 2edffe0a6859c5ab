"""Engine node: ledger + registry + repository behind a service facade.

Deployment compiles a model, stores the artifact bundle, deploys factories and
resource contracts per hierarchy scope and registers everything in the runtime
registry; afterwards the model can be instantiated and driven through work
items.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from ..bpmn import parse_bpmn
from ..compiler import compile_model, emit_contract_text
from ..compiler.ir import CompilationDictionary, DictionaryContract, deserialize_contract
from ..guardlang import Revert, render_value
from ..ledger import Ledger, NULL_ADDRESS, Receipt, Transaction
from ..repository import ArtifactBundle, Repository
from ..runtime import EngineRuntime, factory_image, registry_image, worklist_image
from ..runtime.process import decl_env_for, params_to_decls
from ..runtime.simple import PROCESS_TYPE, SERVICE_TYPE, WORKLIST_TYPE
from ..compiler.ir import serialize_contract

DEPLOYER = "0x" + "0d" * 20
ACTOR = "0x" + "0a" * 20


class UnknownWorkitemError(ValueError):
    pass


class LedgerRejectionError(ValueError):
    def __init__(self, receipt: Receipt):
        super().__init__(receipt.reason or "rejected")
        self.receipt = receipt


def _bits(word: int):
    index = 0
    while word:
        if word & 1:
            yield index
        word >>= 1
        index += 1


class EngineNode:
    def __init__(self, store: Optional[Union[str, Path]] = None):
        self.runtime = EngineRuntime()
        self.ledger = Ledger(self.runtime)
        self.repository = Repository(Path(store) if store else None)
        self.registry, _ = self.ledger.deploy(DEPLOYER, registry_image())
        self._dictionaries: dict[str, CompilationDictionary] = {}
        self._contracts_by_hash: dict[str, DictionaryContract] = {}
        self._model_of_contract: dict[str, str] = {}
        self._instances: dict[str, list[str]] = {}
        for model_hash in self.repository.list():
            self._index_bundle(model_hash)

    # -- deployment (compile -> store -> register) ---------------------------

    def deploy_model(self, xml: bytes, mode: str = "full") -> str:
        model = parse_bpmn(xml)
        contracts, dictionary = compile_model(model, mode)
        irs = [serialize_contract(c) for c in contracts]
        rendered = "\n".join(emit_contract_text(c) for c in contracts)
        bundle = ArtifactBundle.build(
            bpmn_xml=xml, contract_irs=irs,
            dictionary=dictionary.to_json().encode(),
            rendered_text=rendered.encode(), mode=mode)
        model_hash = self.repository.put(bundle)
        self._index_bundle(model_hash)

        if mode == "full":
            self._register_hierarchy(dictionary, contracts)
        return model_hash

    def _index_bundle(self, model_hash: str) -> None:
        bundle = self.repository.get(model_hash)
        dictionary = CompilationDictionary.from_json(bundle.dictionary.decode())
        self._dictionaries[model_hash] = dictionary
        for dc in dictionary.contracts:
            self._contracts_by_hash[dc.hash] = dc
            self._model_of_contract[dc.hash] = model_hash
        self._instances.setdefault(model_hash, [])

    def _register_hierarchy(self, dictionary: CompilationDictionary, contracts) -> None:
        ir_by_hash = {dc.hash: serialize_contract(c)
                      for dc, c in zip(dictionary.contracts, contracts)}
        contract_by_hash = {dc.hash: c for dc, c in zip(dictionary.contracts, contracts)}
        for dc in dictionary.contracts:
            if dc.parent_hash is not None:
                self._submit(self.registry, "relateProcess",
                             [dc.parent_hash, dc.parent_element_index, dc.hash])
        for dc in dictionary.contracts:
            contract = contract_by_hash[dc.hash]
            factory, _ = self.ledger.deploy(
                DEPLOYER, factory_image(dc.hash, ir_by_hash[dc.hash]))
            self._submit(self.registry, "registerFactory", [dc.hash, factory])
            for resource in ("worklist", "service"):
                bindings = [
                    {"node_index": b.node_index, "start": b.start_function,
                     "checkin": b.checkin_function, "complete": b.complete_function,
                     "imports": list(b.imports), "exports": list(b.exports),
                     "name": b.name, "element_id": b.element_id}
                    for b in contract.external.values() if b.resource == resource]
                if not bindings:
                    continue
                address, _ = self.ledger.deploy(
                    DEPLOYER, worklist_image(dc.hash, dc.name, bindings, resource))
                self._submit(self.registry, "registerResource",
                             [dc.hash, resource, address])

    def _submit(self, target: str, operation: str, args: list,
                sender: str = DEPLOYER) -> Receipt:
        receipt = self.ledger.submit(Transaction(sender, target, operation, args))
        if not receipt.accepted:
            raise LedgerRejectionError(receipt)
        return receipt

    # -- instantiation --------------------------------------------------------

    def models(self) -> list[dict]:
        out = []
        for model_hash in self.repository.list():
            dictionary = self._dictionaries[model_hash]
            out.append({"name": dictionary.model_name, "hash": model_hash})
        return out

    def create_instance(self, model_hash: str, sender: str = ACTOR) -> tuple[str, list[Receipt]]:
        bundle = self.repository.get(model_hash)
        dictionary = self._dictionaries[model_hash]
        if bundle.mode == "full":
            root_hash = dictionary.root().hash
            created = self._submit(self.registry, "newInstanceFor", [root_hash],
                                   sender=sender)
            address = created.value
            started = self._submit(address, "start_execution", [], sender=sender)
            receipts = [created, started]
        else:
            address, receipt = self.ledger.deploy(sender, bundle.contract_irs[0])
            receipts = [receipt]
        self._instances.setdefault(model_hash, []).append(address)
        return address, receipts

    def instances_of(self, model_hash: str) -> list[str]:
        return list(self._instances.get(model_hash, []))

    # -- state traversal ------------------------------------------------------

    def instance_state(self, process_address: str) -> dict:
        """Depth-first traversal over the instance tree, collecting started
        work items and service tasks."""
        root_hash = self.ledger.call(self.registry, "findHashFor",
                                     [process_address, PROCESS_TYPE])
        workitems: dict[tuple, dict] = {}
        services: dict[tuple, dict] = {}
        pending = [process_address]
        visited: set[str] = set()
        while pending:
            address = pending.pop()
            if address in visited:
                continue
            visited.add(address)
            process_hash = self.ledger.call(self.registry, "findHashFor",
                                            [address, PROCESS_TYPE])
            dc = self._contracts_by_hash[process_hash]
            worklist = self.ledger.call(address, "findWorklist")
            service = self.ledger.call(address, "findService")
            started = self.ledger.call(address, "startedActivities")
            for element_index in _bits(started):
                element = dc.elements.get(element_index)
                if element is None:
                    continue
                if element.element_type == "WORKITEM" and worklist != NULL_ADDRESS:
                    ids = self.ledger.call(worklist, "workitemsFor",
                                           [element_index, address])
                    self._collect_items(workitems, element, process_hash, address,
                                        worklist, ids, "/worklists", "workitems")
                elif element.element_type == "SERVICE" and service != NULL_ADDRESS:
                    ids = self.ledger.call(service, "workitemsFor",
                                           [element_index, address])
                    self._collect_items(services, element, process_hash, address,
                                        service, ids, "/services", "tasks")
                sub = self.ledger.call(address, "findStartedInstances", [element_index])
                pending.extend(sub)
        return {
            "process-identifier": root_hash,
            "href": f"/processes/{process_address}",
            "workitems": list(workitems.values()),
            "services": list(services.values()),
        }

    def _collect_items(self, groups: dict, element, process_hash: str, address: str,
                       resource: str, ids: list, prefix: str, noun: str) -> None:
        key = (process_hash, element.index)
        group = groups.setdefault(key, {
            "elementId": element.element_id,
            "name": element.name,
            "importParameters": [{"type": t, "name": n} for t, n in element.imports],
            "instances": [],
        })
        contract = self._ir_for(process_hash)
        decls = decl_env_for(contract)
        exports = params_to_decls(element.exports, decls.enums)
        for workitem_id in ids:
            values = []
            for decl, (type_text, name) in zip(exports, element.exports):
                raw = self.ledger.call(address, "variable", [name])
                values.append({"type": type_text, "name": name,
                               "value": render_value(decl.type, raw, decls)})
            group["instances"].append({
                "exportParameters": values,
                "href": f"{prefix}/{resource}/{noun}/{workitem_id}",
            })

    def _ir_for(self, contract_hash: str):
        model_hash = self._model_of_contract[contract_hash]
        bundle = self.repository.get(model_hash)
        dictionary = self._dictionaries[model_hash]
        for dc, ir in zip(dictionary.contracts, bundle.contract_irs):
            if dc.hash == contract_hash:
                return deserialize_contract(ir)
        raise KeyError(contract_hash)

    # -- task execution ---------------------------------------------------------

    def execute_task(self, worklist_address: str, workitem_id: int,
                     inputs: Optional[Union[dict, list]] = None,
                     sender: str = ACTOR, resource_type: str = WORKLIST_TYPE) -> Receipt:
        try:
            element_index = self.ledger.call(worklist_address, "elementIndexFor",
                                             [workitem_id])
        except Revert as e:
            raise UnknownWorkitemError(str(e)) from e
        worklist_hash = self.ledger.call(self.registry, "findHashFor",
                                         [worklist_address, resource_type])
        dc = self._contracts_by_hash[worklist_hash]
        element = dc.elements[element_index]
        function_name = element.functions["checkin"]
        args: list = [workitem_id]
        if isinstance(inputs, dict):
            for type_text, name in element.imports:
                if name not in inputs:
                    raise UnknownWorkitemError(f"missing input {name!r}")
                args.append(inputs[name])
        elif inputs is not None:
            args.extend(inputs)
        receipt = self.ledger.submit(Transaction(sender, worklist_address,
                                                 function_name, args))
        return receipt

    def execute_service(self, service_address: str, task_id: int,
                        inputs: Optional[Union[dict, list]] = None,
                        sender: str = ACTOR) -> Receipt:
        return self.execute_task(service_address, task_id, inputs, sender,
                                 resource_type=SERVICE_TYPE)
