"""Replay of event logs against a deployed model, with per-mode gas accounting."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ledger import Transaction
from ..services import EngineNode
from .eventlog import EventLog, dedupe

ACTOR = "0x" + "0a" * 20


class UnknownTaskError(ValueError):
    pass


@dataclass
class TraceResult:
    multiplicity: int
    conforming: bool
    rejected_txs: int
    instantiation_gas: int
    execution_gas: int
    instance: str


@dataclass
class ModeCost:
    mode: str
    avg_instantiation: float
    avg_execution: float


@dataclass
class ReplayOutcome:
    mode: str
    conforming: int        # multiplicity-weighted
    non_conforming: int
    results: list[TraceResult] = field(default_factory=list)

    def cost(self) -> ModeCost:
        weight = sum(r.multiplicity for r in self.results) or 1
        return ModeCost(
            mode=self.mode,
            avg_instantiation=sum(r.instantiation_gas * r.multiplicity
                                  for r in self.results) / weight,
            avg_execution=sum(r.execution_gas * r.multiplicity
                              for r in self.results) / weight,
        )


def replay(node: EngineNode, model_hash: str, log: EventLog, mode: str) -> ReplayOutcome:
    """Execute each distinct trace once against a fresh instance. An event
    with no matching started work item marks the trace non-conforming; the
    doomed check-in is still submitted so the rejection is ledger-visible,
    then replay continues with the next event."""
    traces, multiplicities = dedupe(log)
    dictionary = node._dictionaries[model_hash]
    elements_by_name = {e.name: e for e in dictionary.root().elements.values()
                        if e.element_type in ("WORKITEM", "SERVICE")}
    bundle_mode = node.repository.get(model_hash).mode
    if bundle_mode != mode:
        raise ValueError(f"model {model_hash} was compiled in {bundle_mode} mode")

    outcome = ReplayOutcome(mode=mode, conforming=0, non_conforming=0)
    for trace, multiplicity in zip(traces, multiplicities):
        result = _replay_one(node, model_hash, trace, mode, elements_by_name)
        result.multiplicity = multiplicity
        outcome.results.append(result)
        if result.conforming:
            outcome.conforming += multiplicity
        else:
            outcome.non_conforming += multiplicity
    return outcome


def _replay_one(node: EngineNode, model_hash: str, trace, mode: str,
                elements_by_name: dict) -> TraceResult:
    address, receipts = node.create_instance(model_hash, sender=ACTOR)
    result = TraceResult(multiplicity=1, conforming=True, rejected_txs=0,
                         instantiation_gas=sum(r.gas_used for r in receipts),
                         execution_gas=0, instance=address)
    for event in trace:
        element = elements_by_name.get(event.name)
        if element is None:
            raise UnknownTaskError(f"{event.name!r} is not a task of this model")
        if mode == "basic":
            receipt = node.ledger.submit(Transaction(
                ACTOR, address, "record", [event.name]))
        elif mode in ("default", "optimized"):
            args = [value for _, value in event.inputs]
            receipt = node.ledger.submit(Transaction(
                ACTOR, address, element.functions["checkin"], args))
        else:
            receipt = _full_mode_event(node, address, element, event)
        if receipt.accepted:
            result.execution_gas += receipt.gas_used
        else:
            result.conforming = False
            result.rejected_txs += 1
    if mode == "full" and result.conforming:
        if node.ledger.call(address, "isFinished") != 1:
            result.conforming = False
    return result


def _full_mode_event(node: EngineNode, address: str, element, event):
    worklist = node.ledger.call(address, "findWorklist")
    open_items = node.ledger.call(worklist, "workitemsFor",
                                  [element.index, address])
    if open_items:
        workitem_id = open_items[0]
    else:
        # no matching started work item: submit the check-in anyway so the
        # rejection lands on the ledger
        workitem_id = node.ledger.call(worklist, "workitemCount")
    args = [workitem_id] + [value for _, value in event.inputs]
    return node.ledger.submit(Transaction(ACTOR, worklist,
                                          element.functions["checkin"], args))


@dataclass
class CostReport:
    costs: dict[str, ModeCost] = field(default_factory=dict)

    def overhead(self, baseline: str) -> tuple[float, float]:
        full = self.costs["full"]
        base = self.costs[baseline]
        return (round(full.avg_instantiation / base.avg_instantiation, 2),
                round(full.avg_execution / base.avg_execution, 2))

    def rows(self) -> list[dict]:
        out = []
        for mode, cost in self.costs.items():
            row = {"mode": mode,
                   "avg_instantiation": round(cost.avg_instantiation, 2),
                   "avg_execution": round(cost.avg_execution, 2)}
            if mode != "full" and "full" in self.costs:
                inst, execu = self.overhead(mode)
                row["overhead_instantiation"] = inst
                row["overhead_execution"] = execu
            out.append(row)
        return out

    def render_text(self, title: str = "") -> str:
        lines = []
        header = f"{'Mode':<12} {'W.Avg Instant.':>16} {'W.Avg Exec.':>14} " \
                 f"{'Ovh Inst.':>10} {'Ovh Exec.':>10}"
        if title:
            lines.append(title)
        lines.append(header)
        lines.append("-" * len(header))
        for row in self.rows():
            inst = row.get("overhead_instantiation")
            execu = row.get("overhead_execution")
            lines.append(
                f"{row['mode']:<12} {row['avg_instantiation']:>16,.0f} "
                f"{row['avg_execution']:>14,.0f} "
                f"{inst if inst is not None else '--':>10} "
                f"{execu if execu is not None else '--':>10}")
        return "\n".join(lines)


def compare_modes(outcomes: dict[str, ReplayOutcome]) -> CostReport:
    return CostReport(costs={mode: outcome.cost()
                             for mode, outcome in outcomes.items()})
