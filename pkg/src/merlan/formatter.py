"""Canonical pretty-printer for Specifications.

Two-space indents, trailing colons on section and name lines, quoted
strings, "?" for placeholders, and the canonical cardinality rendering.
Reserved requirement attributes keep their source order so that
parse(format(spec)) is structurally identical to spec.
"""

from __future__ import annotations

from .model import (
    ComplexNode,
    EntityKind,
    RequirementNode,
    SimpleNode,
    SimpleRequirement,
    Specification,
    render_literal,
)

INDENT = "  "


def format_spec(spec: Specification) -> str:
    lines: list[str] = []
    if spec.entities:
        lines.append("ENTITIES:")
        current_kind = None
        for entity in spec.entities:
            if entity.kind is not current_kind:
                current_kind = entity.kind
                header = "CONCRETE:" if current_kind is EntityKind.CONCRETE else "ABSTRACT:"
                lines.append(INDENT + header)
            lines.append(INDENT * 2 + entity.name)
            for attr in entity.attributes:
                lines.append(INDENT * 3 + f"- {attr.key}: {render_literal(attr.value)}")
    if spec.requirements:
        lines.append("REQUIREMENTS:")
        for named in spec.requirements:
            lines.append(INDENT + named.name + ":")
            _format_node(named.root, 2, lines)
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def _format_node(node: RequirementNode, depth: int, lines: list[str]) -> None:
    if isinstance(node, ComplexNode):
        lines.append(INDENT * depth + node.op.value)
        for child in node.children:
            _format_node(child, depth + 1, lines)
    else:
        _format_leaf(node, depth, lines)


def _format_leaf(node: SimpleNode, depth: int, lines: list[str]) -> None:
    req = node.req
    header = "CONCRETE" if req.kind is EntityKind.CONCRETE else "ABSTRACT"
    if req.cardinality is not None:
        header += " " + req.cardinality.render()
    lines.append(INDENT * depth + header)
    for line in _leaf_attr_lines(req):
        lines.append(INDENT * (depth + 1) + line)


def _leaf_attr_lines(req: SimpleRequirement) -> list[str]:
    out: list[str] = []
    for key in req.reserved_order:
        if key == "entity" and req.entity is not None:
            out.append(f"- entity: {req.entity}")
        elif key == "name" and req.name is not None:
            out.append(f"- name: {render_literal(req.name)}")
        elif key == "modality" and req.modality is not None:
            out.append(f"- modality: {render_literal(req.modality)}")
        elif key == "confidence" and req.confidence is not None:
            out.append(f"- confidence: {req.confidence.text}")
    for c in req.constraints:
        out.append(f"- {c.key}: {render_literal(c.value)}")
    return out
