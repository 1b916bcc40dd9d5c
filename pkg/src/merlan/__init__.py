"""MERLAN: a toolkit for multimodal-requirement specifications.

Parse MERLAN source, validate it, evaluate requirement trees against
detection snapshots, and generate agent trigger-condition code.
"""

from .codegen import GenError, generate, generate_with_manifest
from .config import Config, ConfigError, load_config
from .diagnostics import Diagnostic, Severity
from .engine import (
    Detection,
    DetectionSnapshot,
    EvaluationError,
    MatchResult,
    SchemaError,
    UnknownRequirementError,
    evaluate,
    evaluate_all,
    match_leaf,
)
from .formatter import format_spec
from .lexer import LexError, Token, TokenKind, tokenize
from .model import (
    AttributeDecl,
    BoolOp,
    Cardinality,
    ComplexNode,
    ConflictError,
    EntityDef,
    EntityKind,
    NamedRequirement,
    Number,
    RequirementNode,
    SimpleNode,
    SimpleRequirement,
    Span,
    Specification,
    effective_constraints,
    resolve_entity,
)
from .parser import ParseResult, parse, parse_source
from .validator import ValidationReport, validate

__version__ = "0.1.0"

__all__ = [
    "AttributeDecl",
    "BoolOp",
    "Cardinality",
    "ComplexNode",
    "Config",
    "ConfigError",
    "ConflictError",
    "Detection",
    "DetectionSnapshot",
    "Diagnostic",
    "EntityDef",
    "EntityKind",
    "EvaluationError",
    "GenError",
    "LexError",
    "MatchResult",
    "NamedRequirement",
    "Number",
    "ParseResult",
    "RequirementNode",
    "SchemaError",
    "Severity",
    "SimpleNode",
    "SimpleRequirement",
    "Span",
    "Specification",
    "Token",
    "TokenKind",
    "UnknownRequirementError",
    "ValidationReport",
    "effective_constraints",
    "evaluate",
    "evaluate_all",
    "format_spec",
    "generate",
    "generate_with_manifest",
    "load_config",
    "match_leaf",
    "parse",
    "parse_source",
    "resolve_entity",
    "tokenize",
    "validate",
]
