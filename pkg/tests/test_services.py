import jsonschema
import pytest
from fastapi.testclient import TestClient

from chainflow.examples import order_to_cash_xml
from chainflow.repository import ArtifactBundle, NotFoundError, Repository
from chainflow.services import EngineNode, EventMonitor, create_app

from helpers import STATE_BODY_SCHEMA, complete, instances_of, item_groups, parse_href


# -- repository -----------------------------------------------------------------

def test_put_get_identity(tmp_path):
    repo = Repository(tmp_path / "store")
    bundle = ArtifactBundle.build(b"<xml/>", [b"ir0", b"ir1"], b"{}", b"text", "full")
    key = repo.put(bundle)
    assert len(key) == 64 and all(c in "0123456789abcdef" for c in key)
    again = repo.get(key)
    assert again.files == bundle.files


def test_put_idempotent(tmp_path):
    repo = Repository(tmp_path / "store")
    bundle = ArtifactBundle.build(b"x", [b"y"], b"{}", b"", "full")
    assert repo.put(bundle) == repo.put(bundle)
    assert len(repo.list()) == 1


def test_empty_bundle_hash_stable():
    a = ArtifactBundle.build(b"", [], b"", b"", "full")
    b = ArtifactBundle.build(b"", [], b"", b"", "full")
    assert a.hash() == b.hash()


def test_get_unknown_raises(tmp_path):
    with pytest.raises(NotFoundError):
        Repository(tmp_path / "store").get("ff" * 32)


def test_store_survives_restart(tmp_path):
    store = tmp_path / "store"
    repo = Repository(store)
    bundle = ArtifactBundle.build(b"<m/>", [b"ir"], b"{}", b"txt", "full")
    key = repo.put(bundle)
    reopened = Repository(store)
    assert reopened.get(key).files == bundle.files
    assert reopened.list() == [key]


def test_node_reindexes_store_on_restart(tmp_path):
    store = tmp_path / "store"
    node = EngineNode(store)
    model_hash = node.deploy_model(order_to_cash_xml())
    restarted = EngineNode(store)
    assert {m["hash"] for m in restarted.models()} == {model_hash}
    bundle = restarted.repository.get(model_hash)
    assert bundle.bpmn_xml == order_to_cash_xml()


# -- Algorithm 1 state traversal ---------------------------------------------------

LISTING6_SCHEMA = STATE_BODY_SCHEMA


@pytest.fixture
def carrier_selection_state():
    """Drive the running example to the point mirrored by the sample state
    body: two carrier-selection children, one quote already requested."""
    node = EngineNode()
    model_hash = node.deploy_model(order_to_cash_xml())
    address, _ = node.create_instance(model_hash)
    state = node.instance_state(address)
    complete(node, state, "Submit PO", {"skuIn": "X1", "quantityIn": 10, "priceIn": 100})
    state = node.instance_state(address)
    complete(node, state, "Validate PO", {"decision": "ACCEPTED"})
    state = node.instance_state(address)
    complete(node, state, "Request Quote", {"newQuote": 100}, which=0)
    return node, address


def test_state_matches_reference_shape(carrier_selection_state):
    node, address = carrier_selection_state
    state = node.instance_state(address)
    jsonschema.validate(state, LISTING6_SCHEMA)
    assert state["href"] == f"/processes/{address}"
    groups = item_groups(state)
    # one pending Request Quote (second child), one Submit Quote with the
    # exported quote value of the first child
    assert len(instances_of(state, "Request Quote")) == 1
    submit = groups["Submit Quote"]
    assert submit["importParameters"] == []
    assert len(submit["instances"]) == 1
    exports = submit["instances"][0]["exportParameters"]
    assert exports == [{"type": "uint", "name": "quote", "value": "100"}]
    request = groups["Request Quote"]
    assert request["importParameters"] == [{"type": "uint", "name": "newQuote"}]
    for group in state["workitems"]:
        for item in group["instances"]:
            assert item["href"].startswith("/worklists/")
    assert state["services"] == []


def test_traversal_visits_each_node_once(carrier_selection_state):
    node, address = carrier_selection_state
    calls = []
    original = node.ledger.call

    def counting_call(target, operation, args=None):
        if operation == "startedActivities":
            calls.append(target)
        return original(target, operation, args)

    node.ledger.call = counting_call
    try:
        node.instance_state(address)
    finally:
        node.ledger.call = original
    assert len(calls) == len(set(calls)) == 4  # root + shipment + 2 selections


def test_finished_instance_has_empty_view():
    node = EngineNode()
    model_hash = node.deploy_model(order_to_cash_xml())
    address, _ = node.create_instance(model_hash)
    state = node.instance_state(address)
    complete(node, state, "Submit PO", {"skuIn": "X", "quantityIn": 1, "priceIn": 2})
    state = node.instance_state(address)
    complete(node, state, "Validate PO", {"decision": "REJECTED"})
    state = node.instance_state(address)
    assert state["workitems"] == [] and state["services"] == []


# -- event monitor -------------------------------------------------------------------

def test_event_monitor_notifications():
    node = EngineNode()
    monitor = EventMonitor(node.ledger)
    model_hash = node.deploy_model(order_to_cash_xml())
    monitor.poll()  # drain deployment noise
    address, _ = node.create_instance(model_hash)
    notifications = monitor.poll()
    kinds = [n.kind for n in notifications]
    assert "InstanceCreated" in kinds
    assert "WorkitemRequested" in kinds
    created = next(n for n in notifications if n.kind == "InstanceCreated")
    assert created.payload["address"] == address
    requested = next(n for n in notifications if n.kind == "WorkitemRequested")
    assert requested.payload["task"] == "SubmitPO"
    assert monitor.poll() == []  # no new blocks, nothing new

    state = node.instance_state(address)
    complete(node, state, "Submit PO", {"skuIn": "X", "quantityIn": 1, "priceIn": 2})
    kinds = [n.kind for n in monitor.poll()]
    assert "WorkitemCompleted" in kinds and "WorkitemRequested" in kinds
    keys = set()
    for n in monitor.poll():
        assert n.dedup_key not in keys
        keys.add(n.dedup_key)


# -- REST API ---------------------------------------------------------------------------

@pytest.fixture
def client():
    return TestClient(create_app(EngineNode()))


def test_rest_model_lifecycle(client):
    response = client.post("/models", json={"bpmn": order_to_cash_xml().decode()})
    assert response.status_code == 200
    model_hash = response.json()["hash"]
    assert response.json()["name"] == "Order To Cash"

    listing = client.get("/models").json()
    assert listing == [{"name": "Order To Cash", "hash": model_hash}]

    detail = client.get(f"/models/{model_hash}").json()
    assert detail["mode"] == "full"
    assert "definitions" in detail["bpmn"]
    assert len(detail["dictionary"]["contracts"]) == 3

    created = client.post(f"/models/{model_hash}")
    assert created.status_code == 200
    address = created.json()["address"]
    assert created.json()["href"] == f"/processes/{address}"

    instances = client.get(f"/models/{model_hash}/instances").json()
    assert instances == [address]

    state = client.get(f"/processes/{address}").json()
    jsonschema.validate(state, LISTING6_SCHEMA)
    submit = next(g for g in state["workitems"] if g["name"] == "Submit PO")
    worklist, index = parse_href(submit["instances"][0]["href"])

    receipt = client.put(f"/worklists/{worklist}/workitems/{index}",
                         json={"values": {"skuIn": "X1", "quantityIn": 2,
                                          "priceIn": 30}}).json()
    assert receipt["status"] == "accepted"

    state = client.get(f"/processes/{address}").json()
    assert any(g["name"] == "Validate PO" for g in state["workitems"])

    # a stale second check-in is rejected and reported as such
    receipt = client.put(f"/worklists/{worklist}/workitems/{index}",
                         json={"values": {"skuIn": "X1", "quantityIn": 2,
                                          "priceIn": 30}}).json()
    assert receipt["status"] == "rejected"
    assert "AlreadyCompleted" in receipt["reason"]


def test_rest_invalid_model_rejected(client):
    response = client.post("/models", json={"bpmn": "<definitions"})
    assert response.status_code == 422


def test_rest_unknown_model_404(client):
    assert client.get("/models/" + "ab" * 32).status_code == 404
    assert client.post("/models/" + "ab" * 32).status_code == 404


def test_rest_notifications_poll(client):
    response = client.post("/models", json={"bpmn": order_to_cash_xml().decode()})
    model_hash = response.json()["hash"]
    client.post(f"/models/{model_hash}")
    notifications = client.get("/notifications").json()
    kinds = {n["kind"] for n in notifications}
    assert {"InstanceCreated", "WorkitemRequested"} <= kinds
    last_seq = notifications[-1]["seq"]
    assert client.get(f"/notifications?after={last_seq}").json() == []
