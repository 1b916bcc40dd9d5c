"""Evaluation of requirement trees against detection snapshots.

A detection matches a simple requirement when entity name, entity kind and
modality agree exactly, its confidence reaches the requirement's minimum
(inclusive), and every effective attribute constraint is satisfied by an
exactly equal attribute value. Concrete requirements then apply their
cardinality to the match count (default [1..*] when omitted); abstract
requirements are satisfied by at least one match.

Boolean composition is a recursive fold without short-circuiting, so the
returned trace covers every node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Mapping, Optional, Union

from .model import (
    BoolOp,
    Cardinality,
    ComplexNode,
    ConflictError,
    EntityKind,
    LiteralValue,
    Number,
    RequirementNode,
    SimpleNode,
    SimpleRequirement,
    Specification,
    effective_constraints,
    resolve_entity,
)

DEFAULT_CARDINALITY = Cardinality(1, None)


class UnknownRequirementError(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown requirement {name!r}")


class EvaluationError(Exception):
    """Internal fault: the specification was not validated first."""


class SchemaError(Exception):
    """Snapshot JSON does not conform to the expected schema."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class Detection:
    id: str
    entity: str
    kind: EntityKind
    modality: str
    confidence: float
    attributes: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class DetectionSnapshot:
    detections: tuple[Detection, ...] = ()
    timestamp: Optional[str] = None

    @classmethod
    def from_json_dict(cls, data: object) -> "DetectionSnapshot":
        if not isinstance(data, dict):
            raise SchemaError("$", "snapshot must be a JSON object")
        timestamp = data.get("timestamp")
        if timestamp is not None and not isinstance(timestamp, str):
            raise SchemaError("timestamp", "must be a string")
        raw = data.get("detections", [])
        if not isinstance(raw, list):
            raise SchemaError("detections", "must be an array")
        detections = []
        seen_ids: set[str] = set()
        for i, item in enumerate(raw):
            det = _detection_from_json(item, f"detections[{i}]")
            if det.id in seen_ids:
                raise SchemaError(f"detections[{i}].id", f"duplicate id {det.id!r}")
            seen_ids.add(det.id)
            detections.append(det)
        return cls(tuple(detections), timestamp)

    @classmethod
    def from_json(cls, text: str) -> "DetectionSnapshot":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from exc
        return cls.from_json_dict(data)


def _detection_from_json(item: object, path: str) -> Detection:
    if not isinstance(item, dict):
        raise SchemaError(path, "must be a JSON object")
    def need_str(key: str) -> str:
        value = item.get(key)
        if not isinstance(value, str) or not value:
            raise SchemaError(f"{path}.{key}", "must be a non-empty string")
        return value
    det_id = need_str("id")
    entity = need_str("entity")
    kind_text = need_str("kind").lower()
    try:
        kind = EntityKind(kind_text)
    except ValueError:
        raise SchemaError(f"{path}.kind", "must be 'concrete' or 'abstract'") from None
    modality = need_str("modality").lower()
    confidence = item.get("confidence")
    if not isinstance(confidence, (int, float)) or isinstance(confidence, bool):
        raise SchemaError(f"{path}.confidence", "must be a number")
    if not 0.0 <= float(confidence) <= 1.0:
        raise SchemaError(f"{path}.confidence", "must be within [0, 1]")
    raw_attrs = item.get("attributes", {})
    if not isinstance(raw_attrs, dict):
        raise SchemaError(f"{path}.attributes", "must be an object")
    attrs: dict[str, str] = {}
    for key, value in raw_attrs.items():
        if isinstance(value, str):
            attrs[key] = value
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            attrs[key] = format(Decimal(str(value)).normalize(), "f")
        else:
            raise SchemaError(f"{path}.attributes.{key}", "must be a string or number")
    return Detection(det_id, entity, kind, modality, float(confidence), attrs)


@dataclass(frozen=True)
class LeafTrace:
    satisfied: bool
    name: Optional[str]
    matched_count: int
    matched_detection_ids: tuple[str, ...]
    bound_attributes: Mapping[str, Mapping[str, str]]  # detection id -> bindings

    def to_json_dict(self) -> dict:
        return {
            "kind": "simple",
            "name": self.name,
            "satisfied": self.satisfied,
            "matched_count": self.matched_count,
            "matched_detection_ids": list(self.matched_detection_ids),
            "bound_attributes": {
                det_id: dict(bindings)
                for det_id, bindings in self.bound_attributes.items()
            },
        }


@dataclass(frozen=True)
class ComplexTrace:
    satisfied: bool
    op: BoolOp
    children: tuple["NodeTrace", ...]

    def to_json_dict(self) -> dict:
        return {
            "kind": "complex",
            "op": self.op.value.lower(),
            "satisfied": self.satisfied,
            "children": [c.to_json_dict() for c in self.children],
        }


NodeTrace = Union[LeafTrace, ComplexTrace]


@dataclass(frozen=True)
class MatchResult:
    satisfied: bool
    trace: NodeTrace

    def to_json_dict(self, include_trace: bool = True) -> dict:
        out: dict = {"satisfied": self.satisfied}
        if include_trace:
            out["trace"] = self.trace.to_json_dict()
        return out


def match_leaf(
    spec: Specification, leaf: SimpleRequirement, snapshot: DetectionSnapshot
) -> LeafTrace:
    """Match one simple requirement against all detections in the snapshot."""
    if leaf.entity is None or leaf.modality is None or leaf.confidence is None:
        raise EvaluationError("simple requirement is missing mandatory attributes")
    entity = resolve_entity(spec, leaf.entity)
    if entity is None:
        raise EvaluationError(f"unresolved entity {leaf.entity!r}")
    try:
        constraints = effective_constraints(spec, leaf)
    except ConflictError as exc:
        raise EvaluationError(str(exc)) from exc

    threshold = float(leaf.confidence.value)
    matched: list[Detection] = []
    for det in snapshot.detections:
        if det.entity != leaf.entity:
            continue
        if det.kind is not entity.kind:
            continue
        if det.modality != leaf.modality:
            continue
        if det.confidence < threshold:
            continue
        if not _constraints_hold(constraints, det.attributes):
            continue
        matched.append(det)

    count = len(matched)
    if leaf.kind is EntityKind.ABSTRACT:
        satisfied = count >= 1
    else:
        card = leaf.cardinality or DEFAULT_CARDINALITY
        satisfied = count >= card.min and (card.max is None or count <= card.max)

    placeholder_keys = entity.placeholder_keys()
    bound = {
        det.id: {k: det.attributes[k] for k in placeholder_keys if k in det.attributes}
        for det in matched
    }
    return LeafTrace(
        satisfied=satisfied,
        name=leaf.name,
        matched_count=count,
        matched_detection_ids=tuple(det.id for det in matched),
        bound_attributes=bound,
    )


def _constraints_hold(
    constraints: Mapping[str, LiteralValue], attributes: Mapping[str, str]
) -> bool:
    for key, expected in constraints.items():
        actual = attributes.get(key)
        if actual is None:
            return False
        if isinstance(expected, Number):
            try:
                if Decimal(actual) != expected.value:
                    return False
            except InvalidOperation:
                return False
        elif actual != expected:
            return False
    return True


def evaluate_node(
    spec: Specification, node: RequirementNode, snapshot: DetectionSnapshot
) -> NodeTrace:
    if isinstance(node, SimpleNode):
        return match_leaf(spec, node.req, snapshot)
    child_traces = tuple(evaluate_node(spec, c, snapshot) for c in node.children)
    verdicts = [t.satisfied for t in child_traces]
    if node.op is BoolOp.AND:
        satisfied = all(verdicts)
    elif node.op is BoolOp.OR:
        satisfied = any(verdicts)
    else:
        satisfied = not verdicts[0]
    return ComplexTrace(satisfied, node.op, child_traces)


def evaluate(
    spec: Specification, req_name: str, snapshot: DetectionSnapshot
) -> MatchResult:
    named = spec.requirement(req_name)
    if named is None:
        raise UnknownRequirementError(req_name)
    trace = evaluate_node(spec, named.root, snapshot)
    return MatchResult(trace.satisfied, trace)


def evaluate_all(
    spec: Specification, snapshot: DetectionSnapshot
) -> dict[str, MatchResult]:
    results: dict[str, MatchResult] = {}
    for named in spec.requirements:
        trace = evaluate_node(spec, named.root, snapshot)
        results[named.name] = MatchResult(trace.satisfied, trace)
    return results
