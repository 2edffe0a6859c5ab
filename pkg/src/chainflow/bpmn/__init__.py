"""BPMN 2.0 parsing into a validated in-memory process graph."""

from .model import (
    EventKind,
    FlowNode,
    MultiInstance,
    NodeKind,
    ProcessModel,
    SequenceFlow,
    TaskAnnotation,
)
from .errors import (
    AnnotationSyntaxError,
    BpmnError,
    DanglingReferenceError,
    UndeclaredVariableError,
    UnsupportedElementError,
    XmlSyntaxError,
)
from .annotations import parse_annotation, render_annotation
from .parser import parse_bpmn
from .serialize import serialize_model
from .validate import Diagnostic, validate_model

__all__ = [
    "EventKind", "FlowNode", "MultiInstance", "NodeKind", "ProcessModel",
    "SequenceFlow", "TaskAnnotation",
    "AnnotationSyntaxError", "BpmnError", "DanglingReferenceError",
    "UndeclaredVariableError", "UnsupportedElementError", "XmlSyntaxError",
    "parse_annotation", "render_annotation", "parse_bpmn", "serialize_model",
    "Diagnostic", "validate_model",
]
