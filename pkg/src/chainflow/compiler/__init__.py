"""Transformation of validated process models into interpretable contracts."""

from .classify import ElementClass, classify
from .hierarchy import ScopeNode, split_hierarchy, CyclicCallActivityError
from .indexing import CapacityExceededError, IndexAssignment, assign_indexes
from .ir import (
    Catcher,
    CompiledContract,
    CompilationDictionary,
    ExternalBinding,
    FlatOp,
    FlatTransition,
    PropagationPlan,
    RecorderContract,
    ReusableBinding,
    ScopeEntry,
    Transition,
    contract_hash,
)
from .build import CompileError, compile_model
from .emit import emit_contract_text

__all__ = [
    "ElementClass", "classify",
    "ScopeNode", "split_hierarchy", "CyclicCallActivityError",
    "CapacityExceededError", "IndexAssignment", "assign_indexes",
    "Catcher", "CompiledContract", "CompilationDictionary", "ExternalBinding",
    "FlatOp", "FlatTransition", "PropagationPlan", "RecorderContract",
    "ReusableBinding", "ScopeEntry", "Transition", "contract_hash",
    "CompileError", "compile_model", "emit_contract_text",
]
