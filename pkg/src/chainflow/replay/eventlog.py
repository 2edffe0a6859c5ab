"""Event logs: one trace per line, events comma-separated, inputs as
name=value pairs.

    Submit_PO sku=X1 quantity=10, Validate_PO decision=ACCEPTED, Ship_Goods

Task names use underscores for spaces; values are uninterpreted text until a
check-in coerces them against the task's declared parameter types.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from ..bpmn import ProcessModel
from ..oracle import TraceRunner


@dataclass(frozen=True)
class Event:
    name: str
    inputs: tuple = ()  # ((param, value-text), ...)

    def input_dict(self) -> dict:
        return dict(self.inputs)

    def render(self) -> str:
        parts = [self.name.replace(" ", "_")]
        parts += [f"{k}={v}" for k, v in self.inputs]
        return " ".join(parts)


Trace = tuple  # tuple[Event, ...]


@dataclass
class EventLog:
    traces: list[Trace] = field(default_factory=list)


def format_log(log: EventLog) -> str:
    lines = []
    for trace in log.traces:
        lines.append(", ".join(event.render() for event in trace))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_log(text: str) -> EventLog:
    traces = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        events = []
        for chunk in line.split(","):
            tokens = chunk.split()
            if not tokens:
                continue
            name = tokens[0].replace("_", " ")
            inputs = []
            for token in tokens[1:]:
                if "=" not in token:
                    raise ValueError(f"malformed input token {token!r}")
                key, value = token.split("=", 1)
                inputs.append((key, value))
            events.append(Event(name, tuple(inputs)))
        traces.append(tuple(events))
    return EventLog(traces)


def dedupe(log: EventLog) -> tuple[list[Trace], list[int]]:
    """Multiset partition into distinct traces with multiplicities,
    in first-appearance order."""
    order: list[Trace] = []
    counts: dict[Trace, int] = {}
    for trace in log.traces:
        if trace not in counts:
            order.append(trace)
            counts[trace] = 0
        counts[trace] += 1
    return order, [counts[t] for t in order]


def trace_rejections(model: ProcessModel, trace: Trace) -> int:
    """Number of events the token-game interpreter refuses."""
    runner = TraceRunner(model)
    rejected = 0
    for event in trace:
        if not runner.try_event(event.name, event.input_dict()):
            rejected += 1
    return rejected


def inject_noise(log: EventLog, fraction: float, seed: int,
                 model: Optional[ProcessModel] = None) -> EventLog:
    """Perturb a fraction of traces into certified non-conforming ones.

    Perturbations swap, duplicate or rename events; when a model is given,
    each perturbed trace is verified non-conforming against the token-game
    interpreter and re-drawn otherwise.
    """
    if fraction <= 0:
        return EventLog(list(log.traces))
    if fraction > 1:
        raise ValueError("fraction must be in (0, 1]")
    rng = random.Random(seed)
    n = len(log.traces)
    count = round(fraction * n)
    chosen = set(rng.sample(range(n), count))
    names = sorted({event.name for trace in log.traces for event in trace})
    out: list[Trace] = []
    for i, trace in enumerate(log.traces):
        if i not in chosen:
            out.append(trace)
            continue
        out.append(_perturb(trace, rng, names, model))
    return EventLog(out)


def _perturb(trace: Trace, rng: random.Random, names: list[str],
             model: Optional[ProcessModel]) -> Trace:
    for _ in range(64):
        events = list(trace)
        op = rng.choice(("swap", "duplicate", "rename"))
        if op == "swap" and len(events) >= 2:
            i, j = rng.sample(range(len(events)), 2)
            events[i], events[j] = events[j], events[i]
        elif op == "duplicate":
            i = rng.randrange(len(events))
            events.insert(rng.randrange(len(events) + 1), events[i])
        else:
            i = rng.randrange(len(events))
            other = rng.choice(names)
            events[i] = Event(other, ())
        candidate = tuple(events)
        if candidate == trace:
            continue
        if model is None or trace_rejections(model, candidate) > 0:
            return candidate
    raise RuntimeError("could not derive a non-conforming perturbation")
