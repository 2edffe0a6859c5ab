"""Command-line interface: compile, validate, replay, dataset generation, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bpmn import parse_bpmn, validate_model
from .compiler import CompileError, compile_model, emit_contract_text
from .compiler.ir import serialize_contract
from .replay import (
    compare_modes,
    dataset_model,
    format_log,
    inject_noise,
    parse_log,
    replay,
    simulate_log,
)
from .services import EngineNode

MODES = ("full", "basic", "default", "optimized")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="chainflow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="report model diagnostics")
    p.add_argument("model", type=Path)

    p = sub.add_parser("compile", help="compile a model into contract artifacts")
    p.add_argument("model", type=Path)
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("replay", help="replay an event log and report costs")
    p.add_argument("--model", required=True,
                   help="a .bpmn file or a model hash present in --store")
    p.add_argument("--log", type=Path, required=True)
    p.add_argument("--mode", choices=MODES + ("all",), default="full")
    p.add_argument("--store", type=Path, default=None)
    p.add_argument("--report", type=Path, default=None,
                   help="write the text table here plus machine-readable "
                        "rows to <report>.json")

    p = sub.add_parser("datasets", help="generate the dataset-shaped corpus")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--traces", type=int, default=20)
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=7)

    p = sub.add_parser("serve", help="run the REST API")
    p.add_argument("--store", type=Path, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--preload", type=Path, default=None,
                   help="deploy this BPMN file at startup")

    args = parser.parse_args(argv)
    return {
        "validate": _cmd_validate,
        "compile": _cmd_compile,
        "replay": _cmd_replay,
        "datasets": _cmd_datasets,
        "serve": _cmd_serve,
    }[args.command](args)


def _cmd_validate(args) -> int:
    model = parse_bpmn(args.model.read_bytes())
    diagnostics = validate_model(model)
    for d in diagnostics:
        print(d.render())
    if not diagnostics:
        print(f"ok: {model.name} ({len(model.nodes)} nodes, {len(model.edges)} flows)")
    return 1 if any(d.severity == "error" for d in diagnostics) else 0


def _cmd_compile(args) -> int:
    model = parse_bpmn(args.model.read_bytes())
    try:
        contracts, dictionary = compile_model(model, args.mode)
    except CompileError as e:
        print(e, file=sys.stderr)
        return 1
    args.out.mkdir(parents=True, exist_ok=True)
    for i, contract in enumerate(contracts):
        (args.out / f"contract-{i:03d}.ir").write_bytes(serialize_contract(contract))
    (args.out / "dictionary.json").write_text(dictionary.to_json())
    rendered = "\n".join(emit_contract_text(c) for c in contracts)
    (args.out / "contracts.txt").write_text(rendered)
    print(f"compiled {len(contracts)} contract(s) to {args.out}")
    return 0


def _load_model_bytes(args) -> bytes:
    candidate = Path(args.model)
    if candidate.exists():
        return candidate.read_bytes()
    store = EngineNode(args.store) if args.store else None
    if store is None:
        print(f"{args.model} is not a file and no --store given", file=sys.stderr)
        raise SystemExit(1)
    bundle = store.repository.get(args.model)
    return bundle.bpmn_xml


def _cmd_replay(args) -> int:
    xml = _load_model_bytes(args)
    log = parse_log(args.log.read_text())
    modes = MODES if args.mode == "all" else (args.mode,)
    outcomes = {}
    for mode in modes:
        node = EngineNode()
        model_hash = node.deploy_model(xml, mode)
        outcome = replay(node, model_hash, log, mode)
        outcomes[mode] = outcome
        print(f"[{mode}] conforming={outcome.conforming} "
              f"non-conforming={outcome.non_conforming}")
    report = compare_modes(outcomes)
    text = report.render_text(title=f"replay of {args.log}")
    print(text)
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(text + "\n")
        rows = {
            "costs": report.rows(),
            "conformance": {m: {"conforming": o.conforming,
                                "nonConforming": o.non_conforming}
                            for m, o in outcomes.items()},
        }
        args.report.with_suffix(args.report.suffix + ".json").write_text(
            json.dumps(rows, indent=1))
    return 0


def _cmd_datasets(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    for name in ("invoicing", "supply-chain", "incident-management", "insurance-claim"):
        gen = dataset_model(name)
        (args.out / f"{name}.bpmn").write_bytes(gen.xml)
        log = simulate_log(gen, traces=args.traces, seed=args.seed)
        (args.out / f"{name}.log").write_text(format_log(log))
        if args.noise > 0:
            noisy = inject_noise(log, args.noise, seed=args.seed,
                                 model=parse_bpmn(gen.xml))
            (args.out / f"{name}-noisy.log").write_text(format_log(noisy))
        print(f"wrote {name}: model plus {args.traces}-trace logs")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .services import create_app

    node = EngineNode(args.store)
    if args.preload:
        model_hash = node.deploy_model(args.preload.read_bytes())
        print(f"preloaded {args.preload} as {model_hash}")
    uvicorn.run(create_app(node), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
