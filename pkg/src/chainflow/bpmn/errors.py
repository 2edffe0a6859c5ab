class BpmnError(ValueError):
    """Base class for model ingestion failures."""


class XmlSyntaxError(BpmnError):
    pass


class UnsupportedElementError(BpmnError):
    def __init__(self, kind: str, node_id: str):
        super().__init__(f"unsupported BPMN element <{kind}> (id {node_id})")
        self.kind = kind
        self.node_id = node_id


class DanglingReferenceError(BpmnError):
    def __init__(self, edge_id: str, ref: str):
        super().__init__(f"sequence flow {edge_id} references unknown node {ref}")
        self.edge_id = edge_id
        self.ref = ref


class AnnotationSyntaxError(BpmnError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class UndeclaredVariableError(BpmnError):
    def __init__(self, name: str):
        super().__init__(f"undeclared variable {name!r}")
        self.name = name
