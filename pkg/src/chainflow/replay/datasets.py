"""Dataset-shaped models and simulated logs for the cost/conformance study.

The four shapes mirror the task/gateway counts of the evaluation corpus
(40/18, 10/2, 9/6, 13/8); logs are produced by randomly walking the
token-game interpreter, so every simulated trace is conforming by
construction.
"""

from __future__ import annotations

import random

from ..bpmn import ProcessModel, parse_bpmn
from ..modelgen import GeneratedModel, generate_flat_model
from ..oracle import TraceRunner
from .eventlog import Event, EventLog

# name -> (tasks, gateway nodes) as in the evaluation corpus; pairs = nodes / 2
DATASET_SHAPES = {
    "invoicing": (40, 18),
    "supply-chain": (10, 2),
    "incident-management": (9, 6),
    "insurance-claim": (13, 8),
}

_SEEDS = {
    "invoicing": 1001,
    "supply-chain": 1002,
    "incident-management": 1003,
    "insurance-claim": 1004,
}


def dataset_model(name: str) -> GeneratedModel:
    tasks, gateways = DATASET_SHAPES[name]
    return generate_flat_model(_SEEDS[name], tasks, gateways // 2,
                               name=name.replace("-", " ").title().replace(" ", ""))


def simulate_log(gen: GeneratedModel, traces: int, seed: int,
                 max_events: int = 400) -> EventLog:
    """Random conforming walks through the model."""
    model = parse_bpmn(gen.xml)
    rng = random.Random(seed)
    out = []
    for _ in range(traces):
        out.append(_walk(model, gen, rng, max_events))
    return EventLog(out)


def _walk(model: ProcessModel, gen: GeneratedModel, rng: random.Random,
          max_events: int):
    for _ in range(32):
        runner = TraceRunner(model)
        events: list[Event] = []
        while not runner.is_finished() and len(events) < max_events:
            name = rng.choice(runner.started_tasks())
            inputs = []
            for var, branches in gen.steering.items():
                # bias towards low values: branch 0 / loop exit
                value = 0 if rng.random() < 0.65 else rng.randrange(branches)
                inputs.append((f"{var}In", str(value)))
            event = Event(name, tuple(inputs))
            accepted = runner.try_event(name, event.input_dict())
            assert accepted
            events.append(event)
        if runner.is_finished():
            return tuple(events)
    raise RuntimeError("simulation failed to terminate within the event budget")
