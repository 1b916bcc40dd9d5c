"""Core data model for MERLAN specifications.

Entities, requirements and their composition into a Specification. All
types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from typing import Iterator, Optional, Union

BUILTIN_MODALITIES = ("text", "audio", "image", "video")

#: Attribute key for abstract entities that instructs the recognizer; it is
#: a description of what to infer, not a matchable constraint.
DESCRIPTION_KEY = "description"

RESERVED_ATTRIBUTE_KEYS = ("entity", "name", "modality", "confidence")

IDENT_RE = r"[A-Za-z_][A-Za-z0-9_]*"


@dataclass(frozen=True)
class Span:
    """Half-open source region, 1-based lines and columns."""

    line: int
    column: int
    end_line: int
    end_column: int

    @classmethod
    def point(cls, line: int, column: int) -> "Span":
        return cls(line, column, line, column)

    def union(self, other: "Span") -> "Span":
        start = min((self.line, self.column), (other.line, other.column))
        end = max((self.end_line, self.end_column), (other.end_line, other.end_column))
        return Span(start[0], start[1], end[0], end[1])

    def encloses(self, other: "Span") -> bool:
        return (self.line, self.column) <= (other.line, other.column) and (
            self.end_line,
            self.end_column,
        ) >= (other.end_line, other.end_column)


#: Placeholder span for programmatically built specifications.
NO_SPAN = Span(0, 0, 0, 0)


@dataclass(frozen=True)
class Number:
    """A numeric literal keeping its source text for faithful re-emission."""

    text: str

    @property
    def value(self) -> Decimal:
        return Decimal(self.text)

    def canonical(self) -> str:
        return canonical_decimal(self.text)


def canonical_decimal(text: str) -> str:
    """Minimal plain-decimal rendering: no trailing zeros, no exponent."""
    return format(Decimal(text).normalize(), "f")


#: An attribute value: a quoted string or a numeric literal.
LiteralValue = Union[str, Number]


def literal_equal(a: LiteralValue, b: LiteralValue) -> bool:
    if isinstance(a, Number) and isinstance(b, Number):
        return a.canonical() == b.canonical()
    if isinstance(a, Number) or isinstance(b, Number):
        return False
    return a == b


@dataclass(frozen=True)
class AttributeDecl:
    """One ``- key: value`` line; ``value is None`` means the "?" placeholder."""

    key: str
    value: Optional[LiteralValue]
    span: Span = field(default=NO_SPAN, compare=False)

    @property
    def is_placeholder(self) -> bool:
        return self.value is None


class EntityKind(Enum):
    CONCRETE = "concrete"
    ABSTRACT = "abstract"


@dataclass(frozen=True)
class EntityDef:
    name: str
    kind: EntityKind
    attributes: tuple[AttributeDecl, ...] = ()
    span: Span = field(default=NO_SPAN, compare=False)

    def attribute(self, key: str) -> Optional[AttributeDecl]:
        for attr in self.attributes:
            if attr.key == key:
                return attr
        return None

    def placeholder_keys(self) -> tuple[str, ...]:
        return tuple(a.key for a in self.attributes if a.is_placeholder)


@dataclass(frozen=True)
class Cardinality:
    """Instance-count constraint: [n], [m..n] or [m..*].

    The exact form [n] is stored as min == max. ``interval_form`` records
    that the source spelled an explicit interval; it does not participate
    in equality and only matters for semantic validation of m < n.
    """

    min: int
    max: Optional[int] = None
    interval_form: bool = field(default=False, compare=False)

    def render(self) -> str:
        if self.max is None:
            return f"[{self.min}..*]"
        if self.min == self.max:
            return f"[{self.min}]"
        return f"[{self.min}..{self.max}]"

    @classmethod
    def from_text(cls, text: str) -> "Cardinality":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"not a cardinality: {text!r}")
        body = body[1:-1]
        if ".." in body:
            lo, hi = body.split("..", 1)
            if hi.strip() == "*":
                return cls(int(lo), None, interval_form=True)
            return cls(int(lo), int(hi), interval_form=True)
        n = int(body)
        return cls(n, n)


class BoolOp(Enum):
    AND = "AND"
    OR = "OR"
    NOT = "NOT"


@dataclass(frozen=True)
class SimpleRequirement:
    """A condition on a single entity.

    Reserved fields (entity/name/modality/confidence) are Optional so the
    validator can report which mandatory keys are missing; a validated
    specification always has all four populated. ``reserved_order`` keeps
    the source order of the reserved attribute lines for faithful
    formatting and code generation.
    """

    kind: EntityKind
    entity: Optional[str] = None
    name: Optional[str] = None
    modality: Optional[str] = None
    confidence: Optional[Number] = None
    cardinality: Optional[Cardinality] = None
    constraints: tuple[AttributeDecl, ...] = ()
    reserved_order: tuple[str, ...] = field(
        default=RESERVED_ATTRIBUTE_KEYS, compare=False
    )
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class SimpleNode:
    req: SimpleRequirement

    @property
    def span(self) -> Span:
        return self.req.span


@dataclass(frozen=True)
class ComplexNode:
    op: BoolOp
    children: tuple["RequirementNode", ...]
    span: Span = field(default=NO_SPAN, compare=False)

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError(f"{self.op.value} requires at least one child")
        if self.op is BoolOp.NOT and len(self.children) != 1:
            raise ValueError("NOT requires exactly one child")


RequirementNode = Union[SimpleNode, ComplexNode]


@dataclass(frozen=True)
class NamedRequirement:
    name: str
    root: RequirementNode
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Specification:
    """A parsed script: entity table plus named top-level requirements.

    Entities and requirements are kept as ordered tuples so that duplicate
    names survive parsing and can be reported by the validator; lookups
    return the first definition.
    """

    entities: tuple[EntityDef, ...] = ()
    requirements: tuple[NamedRequirement, ...] = ()

    def entity(self, name: str) -> Optional[EntityDef]:
        for e in self.entities:
            if e.name == name:
                return e
        return None

    def requirement(self, name: str) -> Optional[NamedRequirement]:
        for r in self.requirements:
            if r.name == name:
                return r
        return None


class ConflictError(Exception):
    """Entity fixes an attribute to one value, the requirement to another."""

    def __init__(self, key: str, entity_value: LiteralValue, req_value: LiteralValue):
        self.key = key
        self.entity_value = entity_value
        self.req_value = req_value
        super().__init__(
            f"attribute {key!r} fixed to {render_literal(entity_value)} on the entity "
            f"but constrained to {render_literal(req_value)} by the requirement"
        )


def render_literal(value: Optional[LiteralValue]) -> str:
    if value is None:
        return "?"
    if isinstance(value, Number):
        return value.text
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def resolve_entity(spec: Specification, name: str) -> Optional[EntityDef]:
    """Exact-name lookup into the entity table; None when absent."""
    return spec.entity(name)


def effective_constraints(
    spec: Specification, leaf: SimpleRequirement
) -> dict[str, LiteralValue]:
    """Merge entity-level fixed attributes with requirement-level constraints.

    Requirement values fill entity placeholders; ad-hoc keys not declared
    on the entity are accepted. An abstract entity's description attribute
    is an instruction to the recognizer, not a constraint, and is excluded.

    Raises ConflictError when the entity fixes a key to a different value
    than the requirement constrains it to.
    """
    if leaf.entity is None:
        return {k.key: k.value for k in leaf.constraints if k.value is not None}
    entity = resolve_entity(spec, leaf.entity)
    if entity is None:
        raise KeyError(leaf.entity)
    merged: dict[str, LiteralValue] = {}
    for attr in entity.attributes:
        if attr.value is None:
            continue
        if entity.kind is EntityKind.ABSTRACT and attr.key == DESCRIPTION_KEY:
            continue
        merged[attr.key] = attr.value
    for c in leaf.constraints:
        if c.value is None:
            continue
        if c.key in merged and not literal_equal(merged[c.key], c.value):
            raise ConflictError(c.key, merged[c.key], c.value)
        merged[c.key] = c.value
    return merged


def iter_leaves(node: RequirementNode) -> Iterator[SimpleRequirement]:
    if isinstance(node, SimpleNode):
        yield node.req
    else:
        for child in node.children:
            yield from iter_leaves(child)


def iter_nodes(node: RequirementNode) -> Iterator[RequirementNode]:
    yield node
    if isinstance(node, ComplexNode):
        for child in node.children:
            yield from iter_nodes(child)
