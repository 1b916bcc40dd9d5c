"""Semantic validation of parsed Specifications.

Error codes (stable):
  E001  missing mandatory attribute on a simple requirement
  E002  unresolved entity reference
  E003  requirement/entity kind mismatch
  E004  confidence outside [0, 1]
  E005  malformed cardinality interval (m >= n)
  E006  cardinality on an abstract requirement
  E007  entity/requirement attribute value conflict
  E008  duplicate entity or requirement name
Warnings:
  W001  unknown modality
  W002  ad-hoc constraint key not declared on the entity
  W003  attribute implausible for the requirement's modality
Info:
  I001  attribute constraints on an abstract requirement
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

from .config import Config
from .diagnostics import Diagnostic, Severity
from .model import (
    ConflictError,
    EntityKind,
    RESERVED_ATTRIBUTE_KEYS,
    SimpleRequirement,
    Specification,
    effective_constraints,
    iter_leaves,
    resolve_entity,
)


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return not any(d.severity is Severity.ERROR for d in self.diagnostics)

    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity is Severity.ERROR)

    def by_code(self, code: str) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.code == code)

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "diagnostics": [d.to_json_dict() for d in self.diagnostics],
        }


def validate(spec: Specification, config: Optional[Config] = None) -> ValidationReport:
    """Pure semantic check; all findings land in the report, nothing raises."""
    config = config or Config()
    diags: list[Diagnostic] = []

    _check_duplicate_names(spec, diags)
    for named in spec.requirements:
        for leaf in iter_leaves(named.root):
            _check_leaf(spec, leaf, config, diags)

    diags.sort(key=lambda d: (d.span.line, d.span.column, d.code or ""))
    return ValidationReport(tuple(diags))


def _check_duplicate_names(spec: Specification, diags: list[Diagnostic]) -> None:
    seen_entities: set[str] = set()
    for entity in spec.entities:
        if entity.name in seen_entities:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    f"duplicate entity name {entity.name!r}",
                    entity.span,
                    code="E008",
                )
            )
        seen_entities.add(entity.name)
    seen_reqs: set[str] = set()
    for named in spec.requirements:
        if named.name in seen_reqs:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    f"duplicate requirement name {named.name!r}",
                    named.span,
                    code="E008",
                )
            )
        seen_reqs.add(named.name)


def _check_leaf(
    spec: Specification,
    leaf: SimpleRequirement,
    config: Config,
    diags: list[Diagnostic],
) -> None:
    present = {
        "entity": leaf.entity,
        "name": leaf.name,
        "modality": leaf.modality,
        "confidence": leaf.confidence,
    }
    for key in RESERVED_ATTRIBUTE_KEYS:
        if present[key] is None:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    f"missing mandatory attribute {key!r} on simple requirement",
                    leaf.span,
                    code="E001",
                )
            )

    entity = None
    if leaf.entity is not None:
        entity = resolve_entity(spec, leaf.entity)
        if entity is None:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    f"unknown entity {leaf.entity!r}",
                    leaf.span,
                    code="E002",
                )
            )
        elif entity.kind is not leaf.kind:
            expected = "CONCRETE" if leaf.kind is EntityKind.CONCRETE else "ABSTRACT"
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    f"{expected} requirement references {entity.kind.value} entity "
                    f"{leaf.entity!r}",
                    leaf.span,
                    code="E003",
                )
            )

    if leaf.confidence is not None:
        value = leaf.confidence.value
        if value < Decimal(0) or value > Decimal(1):
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    f"confidence {leaf.confidence.text} outside [0, 1]",
                    leaf.span,
                    code="E004",
                )
            )

    if leaf.cardinality is not None:
        card = leaf.cardinality
        if card.interval_form and card.max is not None and card.min >= card.max:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    f"malformed cardinality {card.render()}: interval lower bound "
                    "must be smaller than the upper bound",
                    leaf.span,
                    code="E005",
                )
            )
        if leaf.kind is EntityKind.ABSTRACT:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "abstract requirements cannot define a cardinality",
                    leaf.span,
                    code="E006",
                )
            )

    if entity is not None:
        try:
            effective_constraints(spec, leaf)
        except ConflictError as exc:
            diags.append(
                Diagnostic(Severity.ERROR, str(exc), leaf.span, code="E007")
            )
        declared = {a.key for a in entity.attributes}
        for c in leaf.constraints:
            if c.key not in declared:
                diags.append(
                    Diagnostic(
                        Severity.WARNING,
                        f"constraint {c.key!r} is not declared on entity "
                        f"{entity.name!r}",
                        c.span,
                        code="W002",
                    )
                )

    if leaf.modality is not None and leaf.modality not in config.known_modalities:
        diags.append(
            Diagnostic(
                Severity.WARNING,
                f"unknown modality {leaf.modality!r}",
                leaf.span,
                code="W001",
            )
        )

    if leaf.modality is not None and entity is not None:
        try:
            merged = effective_constraints(spec, leaf)
        except ConflictError:
            merged = {}
        for key in merged:
            allowed = config.plausibility.get(key)
            if allowed is not None and leaf.modality not in allowed:
                diags.append(
                    Diagnostic(
                        Severity.WARNING,
                        f"attribute {key!r} is usually meaningful only for "
                        f"{'/'.join(sorted(allowed))} modalities, not "
                        f"{leaf.modality!r}",
                        leaf.span,
                        code="W003",
                    )
                )

    if leaf.kind is EntityKind.ABSTRACT and leaf.constraints:
        diags.append(
            Diagnostic(
                Severity.INFO,
                "abstract requirement carries attribute constraints; they are "
                "matched the same way as on concrete requirements",
                leaf.span,
                code="I001",
            )
        )
