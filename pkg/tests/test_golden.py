"""Frozen artifacts of the bundled example: the bundle hash used as :m-hash
in REST paths and the rendered root contract text."""

from pathlib import Path

from chainflow.bpmn import parse_bpmn
from chainflow.compiler import compile_model, emit_contract_text
from chainflow.compiler.ir import serialize_contract
from chainflow.examples import order_to_cash_xml
from chainflow.repository import ArtifactBundle
from chainflow.services import EngineNode

GOLDEN_DIR = Path(__file__).parent / "golden"

# regenerate on intentional compiler changes:
#   python3 -c "from tests.test_golden import regenerate; regenerate()"
ORDER_TO_CASH_BUNDLE_HASH = \
    "a8cab19d9aac2152ed4257d63c18bbb38e26c78843eeb818a600e586a5ba3437"


def _bundle() -> ArtifactBundle:
    model = parse_bpmn(order_to_cash_xml())
    contracts, dictionary = compile_model(model, "full")
    irs = [serialize_contract(c) for c in contracts]
    rendered = "\n".join(emit_contract_text(c) for c in contracts)
    return ArtifactBundle.build(order_to_cash_xml(), irs,
                                dictionary.to_json().encode(),
                                rendered.encode(), "full")


def test_bundle_hash_pinned():
    assert _bundle().hash() == ORDER_TO_CASH_BUNDLE_HASH


def test_deploy_model_reproduces_pinned_hash():
    node = EngineNode()
    assert node.deploy_model(order_to_cash_xml()) == ORDER_TO_CASH_BUNDLE_HASH
    # content addressing: deploying again yields the same key
    assert node.deploy_model(order_to_cash_xml()) == ORDER_TO_CASH_BUNDLE_HASH


def test_root_contract_text_golden():
    model = parse_bpmn(order_to_cash_xml())
    contracts, _ = compile_model(model, "full")
    expected = (GOLDEN_DIR / "order_to_cash_root.txt").read_text()
    assert emit_contract_text(contracts[0]) == expected


def regenerate():
    bundle = _bundle()
    model = parse_bpmn(order_to_cash_xml())
    contracts, _ = compile_model(model, "full")
    (GOLDEN_DIR / "order_to_cash_root.txt").write_text(emit_contract_text(contracts[0]))
    print("bundle hash:", bundle.hash())
