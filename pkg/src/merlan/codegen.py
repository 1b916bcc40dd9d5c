"""Generation of agent trigger-condition code from a Specification.

The emitted dialect builds entities with ConcreteEntity/AbstractEntity
constructor calls and requirement trees with RequirementDefinition plus
nested OR([...]) / AND([...]) / NOT(...) combinators around leaf
ConcreteRequirement/AbstractRequirement calls.

Conventions of the dialect:
  - placeholders render as None;
  - cardinality flattens into the leaf attributes map as "min"/"max",
    with an unbounded max encoded as 0 (leaves without a cardinality get
    no min/max entries and default to at-least-one at runtime);
  - modality/confidence keep their source order, followed by
    requirement-level constraints;
  - confidences use the minimal decimal text of the source value.
"""

from __future__ import annotations

import json
import keyword
import re
from typing import Optional

from .config import Config
from .model import (
    ComplexNode,
    EntityKind,
    LiteralValue,
    Number,
    RequirementNode,
    SimpleNode,
    Specification,
)
from .validator import validate

INDENT = "  "

_SANITIZE_RE = re.compile(r"[^0-9A-Za-z_]")


class GenError(Exception):
    pass


def generate(spec: Specification, config: Optional[Config] = None) -> str:
    """Emit agent code for a semantically valid specification."""
    return _generate(spec, config)[0]


def generate_with_manifest(
    spec: Specification, config: Optional[Config] = None
) -> tuple[str, dict]:
    """Emit agent code plus a machine-readable traceability manifest."""
    return _generate(spec, config)


def _generate(spec: Specification, config: Optional[Config]) -> tuple[str, dict]:
    report = validate(spec, config)
    if not report.ok:
        first = report.errors()[0]
        raise GenError(f"specification is not valid: {first.render()}")

    variables = _assign_variables(spec)
    lines: list[str] = ["# Entities"]
    for entity in spec.entities:
        ctor = "ConcreteEntity" if entity.kind is EntityKind.CONCRETE else "AbstractEntity"
        attrs = ", ".join(
            f"{_string(a.key)}: {_value(a.value)}" for a in entity.attributes
        )
        lines.append(
            f"{variables[entity.name]} = {ctor}(name={_string(entity.name)}, "
            f"attributes={{{attrs}}})"
        )

    lines.append("# Requirements")
    for named in spec.requirements:
        var = variables[named.name]
        lines.append(f"{var} = RequirementDefinition({_string(named.name)})")
        if isinstance(named.root, SimpleNode):
            lines.append(f"{var}.set({_leaf(named.root, variables)})")
        else:
            lines.append(f"{var}.set(")
            lines.extend(_node_lines(named.root, variables, 1))
            lines.append(")")

    if spec.requirements:
        first_var = variables[spec.requirements[0].name]
        lines.append("")
        lines.append(
            "# Usage hint (not generated): a requirement can drive agent state"
        )
        lines.append("# transitions, for example:")
        lines.append(
            f"# initial_state.when_requirement_matched_go_to({first_var}, target_state)"
        )

    code = "\n".join(lines) + "\n"
    manifest = {
        "entities": [
            {"name": e.name, "kind": e.kind.value} for e in spec.entities
        ],
        "requirements": [r.name for r in spec.requirements],
        "variables": {
            name: var for name, var in variables.items() if name != var
        },
        "spans": {
            "entities": {
                e.name: {"line": e.span.line, "column": e.span.column}
                for e in spec.entities
            },
            "requirements": {
                r.name: {"line": r.span.line, "column": r.span.column}
                for r in spec.requirements
            },
        },
    }
    return code, manifest


def _assign_variables(spec: Specification) -> dict[str, str]:
    variables: dict[str, str] = {}
    used: dict[str, str] = {}
    for name in [e.name for e in spec.entities] + [r.name for r in spec.requirements]:
        var = _sanitize(name)
        if var in used and used[var] != name:
            raise GenError(
                f"variable name collision: {name!r} and {used[var]!r} both "
                f"sanitize to {var!r}"
            )
        used[var] = name
        variables[name] = var
    return variables


def _sanitize(name: str) -> str:
    var = _SANITIZE_RE.sub("_", name)
    if not var or var[0].isdigit():
        var = "_" + var
    if keyword.iskeyword(var):
        var += "_"
    return var


def _node_lines(
    node: RequirementNode, variables: dict[str, str], depth: int
) -> list[str]:
    pad = INDENT * depth
    if isinstance(node, SimpleNode):
        return [pad + _leaf(node, variables)]
    op = node.op.value
    lines: list[str] = []
    if op == "NOT":
        lines.append(pad + "NOT(")
        lines.extend(_node_lines(node.children[0], variables, depth + 1))
        lines.append(pad + ")")
    else:
        lines.append(pad + f"{op}([")
        for i, child in enumerate(node.children):
            child_lines = _node_lines(child, variables, depth + 1)
            if i < len(node.children) - 1:
                child_lines[-1] += ","
            lines.extend(child_lines)
        lines.append(pad + "])")
    return lines


def _leaf(node: SimpleNode, variables: dict[str, str]) -> str:
    req = node.req
    assert req.entity is not None and req.name is not None
    items: list[tuple[str, str]] = []
    if req.cardinality is not None:
        items.append(("min", str(req.cardinality.min)))
        items.append(("max", str(req.cardinality.max if req.cardinality.max is not None else 0)))
    for key in req.reserved_order:
        if key == "modality" and req.modality is not None:
            items.append(("modality", _string(req.modality)))
        elif key == "confidence" and req.confidence is not None:
            items.append(("confidence", req.confidence.canonical()))
    for c in req.constraints:
        items.append((c.key, _value(c.value)))
    attrs = ", ".join(f"{_string(k)}: {v}" for k, v in items)
    if req.kind is EntityKind.CONCRETE:
        ctor, ref = "ConcreteRequirement", "concrete_entity"
    else:
        ctor, ref = "AbstractRequirement", "abstract_entity"
    return (
        f"{ctor}(name={_string(req.name)}, {ref}={variables[req.entity]}, "
        f"attributes={{{attrs}}})"
    )


def _string(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def _value(value: Optional[LiteralValue]) -> str:
    if value is None:
        return "None"
    if isinstance(value, Number):
        return value.canonical()
    return _string(value)
