"""Random generation of flat, block-structured, 1-safe process models.

Blocks compose sequences, exclusive choices, parallel splits and guarded
loops around user-task leaves, so every generated model is sound by
construction. Exclusive decisions read one steering variable per gateway;
every task imports all steering variables, which makes each decision
externally drivable and reachable-state exploration complete.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional
from xml.sax.saxutils import escape


@dataclass
class GeneratedModel:
    xml: bytes
    task_names: list[str]
    steering: dict[str, int]  # variable -> branch count (loop gateways: 2)

    def steering_params(self) -> list[str]:
        return [f"{var}In" for var in self.steering]


@dataclass
class _Emit:
    nodes: list[str] = field(default_factory=list)
    flows: list[str] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)
    steering: dict[str, int] = field(default_factory=dict)
    task_names: list[str] = field(default_factory=list)
    needs_default: set = field(default_factory=set)
    default_of: dict[str, str] = field(default_factory=dict)

    def fresh(self, prefix: str) -> str:
        n = self.counters.get(prefix, 0)
        self.counters[prefix] = n + 1
        return f"{prefix}{n}"

    def flow(self, source: str, target: str, condition: Optional[str] = None) -> str:
        fid = self.fresh("f")
        if condition is None:
            if source in self.needs_default and source not in self.default_of:
                self.default_of[source] = fid
            self.flows.append(
                f'<sequenceFlow id="{fid}" sourceRef="{source}" targetRef="{target}"/>')
        else:
            self.flows.append(
                f'<sequenceFlow id="{fid}" sourceRef="{source}" targetRef="{target}">'
                f'<conditionExpression>{escape(condition)}</conditionExpression>'
                f'</sequenceFlow>')
        return fid


# block structure: ("seq", [blocks]) | ("task",) | ("xor", [blocks]) |
#                  ("par", [blocks]) | ("loop", block)

def _build_structure(rng: random.Random, tasks: int, pairs: int):
    if pairs == 0:
        return ("seq", [("task",) for _ in range(tasks)])
    choices = ["loop"]
    if tasks >= 2:
        choices += ["xor", "xor", "par"]
    kind = rng.choice(choices)
    if kind == "loop":
        return ("seq", [("loop", _build_structure(rng, tasks, pairs - 1))])
    split_tasks = rng.randint(1, tasks - 1)
    left_pairs = rng.randint(0, pairs - 1)
    left = _build_structure(rng, split_tasks, left_pairs)
    right = _build_structure(rng, tasks - split_tasks, pairs - 1 - left_pairs)
    return (kind, [left, right])


def _emit_block(e: _Emit, block) -> tuple[str, str]:
    kind = block[0]
    if kind == "task":
        task_id = e.fresh("t")
        name = f"T{len(e.task_names) + 1}"
        e.task_names.append(name)
        e.nodes.append(f'<userTask id="{task_id}" name="{name}">'
                       f'<documentation>__ANNOTATION__</documentation></userTask>')
        return task_id, task_id
    if kind == "seq":
        first = last = None
        for sub in block[1]:
            entry, exit_ = _emit_block(e, sub)
            if first is None:
                first = entry
            else:
                e.flow(last, entry)
            last = exit_
        return first, last
    if kind in ("xor", "par"):
        tag = "exclusiveGateway" if kind == "xor" else "parallelGateway"
        split = e.fresh("g")
        join = e.fresh("g")
        var = None
        if kind == "xor":
            var = f"g{len(e.steering)}"
            e.steering[var] = len(block[1])
        default_attr = ""
        for i, sub in enumerate(block[1]):
            entry, exit_ = _emit_block(e, sub)
            if kind == "xor" and i < len(block[1]) - 1:
                e.flow(split, entry, condition=f"{var} == {i}")
            else:
                fid = e.flow(split, entry)
                if kind == "xor":
                    default_attr = f' default="{fid}"'
            e.flow(exit_, join)
        e.nodes.append(f'<{tag} id="{split}"{default_attr}/>')
        e.nodes.append(f'<{tag} id="{join}"/>')
        return split, join
    if kind == "loop":
        join = e.fresh("g")
        split = e.fresh("g")
        var = f"g{len(e.steering)}"
        e.steering[var] = 2
        entry, exit_ = _emit_block(e, block[1])
        e.flow(join, entry)
        e.flow(exit_, split)
        e.flow(split, join, condition=f"{var} == 1")
        e.needs_default.add(split)  # the caller's outgoing flow becomes the default
        e.nodes.append(f'<exclusiveGateway id="{join}"/>')
        e.nodes.append(f'<exclusiveGateway id="{split}" default="__DEFAULT_{split}__"/>')
        return join, split
    raise ValueError(kind)


def generate_flat_model(seed: int, tasks: int, gateway_pairs: int,
                        name: Optional[str] = None) -> GeneratedModel:
    rng = random.Random(seed)
    e = _Emit()
    if gateway_pairs > 0:
        if tasks < 2:
            raise ValueError("gateway decisions need a leading task, so tasks >= 2")
        # a leading task keeps every gateway decision completion-driven: the
        # initial cascade never evaluates a condition over default values
        structure = ("seq", [("task",),
                             _build_structure(rng, tasks - 1, gateway_pairs)])
    else:
        structure = _build_structure(rng, tasks, 0)
    entry, exit_ = _emit_block(e, structure)

    e.nodes.insert(0, '<startEvent id="start"/>')
    e.nodes.append('<endEvent id="end"/>')
    e.flow("start", entry)
    e.flow(exit_, "end")
    assert e.needs_default <= set(e.default_of), "every loop split needs a default"

    params = ", ".join(f"uint {var}In" for var in e.steering)
    ops = " ".join(f"{var} = {var}In;" for var in e.steering)
    annotation = f"() : ({params}) -> {{ {ops} }}" if e.steering else "() : () -> {}"
    nodes = []
    for n in e.nodes:
        n = n.replace("__ANNOTATION__", escape(annotation))
        for split, fid in e.default_of.items():
            n = n.replace(f"__DEFAULT_{split}__", fid)
        nodes.append(n)

    decls = "\n".join(f"uint {var};" for var in e.steering)
    doc = f"<documentation>{decls}</documentation>" if decls else ""
    model_name = name or f"Generated{seed}"
    xml = (
        '<?xml version="1.0" encoding="UTF-8"?>'
        '<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" '
        f'id="defs_{seed}">'
        f'<process id="M{seed}" name="{model_name}">{doc}'
        + "".join(nodes) + "".join(e.flows) +
        "</process></definitions>"
    ).encode()
    return GeneratedModel(xml=xml, task_names=list(e.task_names),
                          steering=dict(e.steering))


def random_equivalence_model(seed: int, max_nodes: int = 12) -> GeneratedModel:
    """A model small enough for exhaustive state-set comparison."""
    rng = random.Random(seed ^ 0x5EED)
    pairs = rng.randint(0, 2)
    max_tasks = max_nodes - 2 - 2 * pairs
    low = 2 if pairs else 1
    tasks = rng.randint(low, max(low, min(5, max_tasks)))
    return generate_flat_model(seed, tasks, pairs)
