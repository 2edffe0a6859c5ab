"""Deterministic human-readable rendering of compiled contracts."""

from __future__ import annotations

from ..guardlang import to_source
from .ir import AnyContract, CompiledContract, FlatContract, RecorderContract


def _bits(mask: int, width: int) -> str:
    width = max(width, 1)
    return f"{mask} (0b{mask:0{width}b})"


def emit_contract_text(contract: AnyContract) -> str:
    if isinstance(contract, RecorderContract):
        return "\n".join([
            f"contract {contract.name} (recorder)",
            "  op record(eventRef):",
            "    append eventRef to recordedEvents",
            "",
        ])
    if isinstance(contract, FlatContract):
        return _emit_flat(contract)
    return _emit_process(contract)


def _emit_flat(c: FlatContract) -> str:
    lines = [f"contract {c.name} ({c.mode}, flat)"]
    lines.append(f"  state bits: {c.word_bits}")
    lines.append(f"  initial marking: {_bits(c.initial_marking, c.word_bits)}")
    for t in c.transitions:
        lines.append(f"  transition [{t.source_index}] {t.label}:")
        lines.append(f"    guard   {_bits(t.guard_mask, c.word_bits)}")
        lines.append(f"    consume {_bits(t.consume_mask, c.word_bits)}")
        for stmt in t.script:
            lines.append(f"    run     {to_source(stmt)}")
        for cond, mask in t.variants:
            label = to_source(cond) if cond is not None else "otherwise"
            lines.append(f"    when {label}: produce {_bits(mask, c.word_bits)}")
    for op in c.ops.values():
        lines.append(f"  op {op.name}({', '.join(f'{t} {n}' for t, n in op.imports)}):")
        lines.append(f"    require {_bits(op.guard_mask, c.word_bits)}")
        for stmt in op.operations:
            lines.append(f"    run     {to_source(stmt)}")
        for cond, mask in op.variants:
            label = to_source(cond) if cond is not None else "otherwise"
            lines.append(f"    when {label}: produce {_bits(mask, c.word_bits)}")
    lines.append("")
    return "\n".join(lines)


def _emit_process(c: CompiledContract) -> str:
    lines = [f"contract {c.name} ({c.origin})"]
    lines.append(f"  edge bits: {c.word_bits}, nodes: {c.node_count}")
    lines.append(f"  initial marking: {_bits(c.initial_marking, c.word_bits)}")
    for t in c.transitions:
        lines.append(f"  transition [{t.source_index}] {t.label}:")
        lines.append(f"    guard   {_bits(t.guard_mask, c.word_bits)}")
        lines.append(f"    consume {_bits(t.consume_mask, c.word_bits)}")
        if t.condition is not None:
            lines.append(f"    if      {to_source(t.condition)}")
        if t.produce_mask:
            lines.append(f"    produce {_bits(t.produce_mask, c.word_bits)}")
        if t.started_set_mask:
            lines.append(f"    start   {_bits(t.started_set_mask, c.node_count + 1)}")
        if t.started_clear_mask:
            lines.append(f"    unstart {_bits(t.started_clear_mask, c.node_count + 1)}")
        for stmt in t.script:
            lines.append(f"    run     {to_source(stmt)}")
        if t.action != "none":
            lines.append(f"    action  {t.action}({t.action_node})")
    for b in sorted(c.external.values(), key=lambda x: x.node_index):
        exports = ", ".join(f"{t} {n}" for t, n in b.exports)
        imports = ", ".join(f"{t} {n}" for t, n in b.imports)
        lines.append(f"  external [{b.node_index}] {b.name} via {b.resource}:")
        lines.append(f"    {b.start_function}({exports}) / {b.checkin_function}({imports})"
                     f" -> {b.complete_function}")
        for stmt in b.operations:
            lines.append(f"    on complete: {to_source(stmt)}")
    for r in sorted(c.reusable.values(), key=lambda x: x.node_index):
        mi = f", {r.multi_instance} x {to_source(r.cardinality)}" if r.multi_instance else ""
        lines.append(f"  reusable [{r.node_index}] {r.name} -> {r.child_scope_id}{mi}")
        lines.append(f"    child hash: {r.child_hash or '(registry relation)'}")
    for plan in sorted(c.event_table.values(), key=lambda p: p.node_index):
        catch = f", caught by #{plan.local_catcher}" if plan.local_catcher is not None else ""
        lines.append(f"  throw [{plan.node_index}] {plan.event_kind}"
                     f" code={plan.code or '-'} pattern={plan.pattern}{catch}")
    for catcher in c.catchers:
        lines.append(f"  catch #{catcher.id} [{catcher.node_index}] {catcher.kind}"
                     f" code={catcher.code or '-'} {catcher.attachment}"
                     f" {'interrupting' if catcher.interrupting else 'non-interrupting'}")
    lines.append("")
    return "\n".join(lines)
