"""Shared test drivers for the engine node."""

from __future__ import annotations

# shape of the instance-state body: field names and nesting of the reference
# sample response, used for schema comparison
STATE_BODY_SCHEMA = {
    "type": "object",
    "required": ["process-identifier", "href", "workitems", "services"],
    "additionalProperties": False,
    "properties": {
        "process-identifier": {"type": "string"},
        "href": {"type": "string"},
        "workitems": {"$ref": "#/$defs/groups"},
        "services": {"$ref": "#/$defs/groups"},
    },
    "$defs": {
        "groups": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["elementId", "name", "importParameters", "instances"],
                "additionalProperties": False,
                "properties": {
                    "elementId": {"type": "string"},
                    "name": {"type": "string"},
                    "importParameters": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["type", "name"],
                            "additionalProperties": False,
                            "properties": {"type": {"type": "string"},
                                           "name": {"type": "string"}},
                        },
                    },
                    "instances": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["exportParameters", "href"],
                            "additionalProperties": False,
                            "properties": {
                                "href": {"type": "string"},
                                "exportParameters": {
                                    "type": "array",
                                    "items": {
                                        "type": "object",
                                        "required": ["type", "name", "value"],
                                        "additionalProperties": False,
                                        "properties": {
                                            "type": {"type": "string"},
                                            "name": {"type": "string"},
                                            "value": {"type": "string"},
                                        },
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}


def item_groups(state: dict, kind: str = "workitems") -> dict:
    return {group["name"]: group for group in state[kind]}


def instances_of(state: dict, name: str, kind: str = "workitems") -> list[dict]:
    groups = item_groups(state, kind)
    if name not in groups:
        return []
    return groups[name]["instances"]


def parse_href(href: str) -> tuple[str, int]:
    parts = href.strip("/").split("/")
    return parts[1], int(parts[3])


def complete(node, state: dict, name: str, inputs=None, which: int = 0,
             kind: str = "workitems"):
    items = instances_of(state, name, kind)
    assert items, f"no started item {name!r}; have {sorted(item_groups(state, kind))}"
    resource, workitem_id = parse_href(items[which]["href"])
    if kind == "services":
        return node.execute_service(resource, workitem_id, inputs or {})
    return node.execute_task(resource, workitem_id, inputs or {})


def tree_addresses(node, root: str) -> list[str]:
    out = []
    pending = [root]
    while pending:
        address = pending.pop()
        out.append(address)
        started = node.ledger.call(address, "startedActivities")
        index = 0
        word = started
        while word:
            if word & 1:
                pending.extend(node.ledger.call(address, "findStartedInstances", [index]))
            word >>= 1
            index += 1
    return out
