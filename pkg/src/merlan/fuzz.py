"""Randomized generation of valid specifications and snapshots.

Backs the property suites (boolean-oracle equivalence, De Morgan) and the
export of a differential corpus: formatted source, generated agent code,
snapshots and engine verdicts, for checking independent runtime
implementations against the evaluation engine.

Run ``python -m merlan.fuzz OUT_DIR --specs N --snapshots M --seed S`` to
write the corpus.
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

from .codegen import generate
from .engine import Detection, DetectionSnapshot, evaluate_all
from .formatter import format_spec
from .model import (
    AttributeDecl,
    BoolOp,
    Cardinality,
    ComplexNode,
    EntityDef,
    EntityKind,
    NamedRequirement,
    Number,
    RequirementNode,
    SimpleNode,
    SimpleRequirement,
    Specification,
)
from .validator import validate

MODALITIES = ("text", "audio", "image", "video")
ATTR_KEYS = ("color", "model", "gender", "size", "label")
STRING_VALUES = ("red", "blue", "male", "female", "big", "small", "x1")
NUMBER_VALUES = ("1", "2", "2.5", "10")
CONFIDENCES = ("0", "0.1", "0.25", "0.3", "0.5", "0.7", "0.75", "0.9", "1")


def random_spec(
    rng: random.Random,
    *,
    max_entities: int = 5,
    max_requirements: int = 3,
    max_depth: int = 5,
    max_leaves: int = 6,
) -> Specification:
    """A random specification that always passes semantic validation."""
    entities: list[EntityDef] = []
    n_entities = rng.randint(2, max_entities)
    for i in range(n_entities):
        kind = EntityKind.CONCRETE if i == 0 or rng.random() < 0.6 else EntityKind.ABSTRACT
        attrs: list[AttributeDecl] = []
        if kind is EntityKind.ABSTRACT and rng.random() < 0.7:
            attrs.append(AttributeDecl("description", f"infer entity {i}"))
        for key in rng.sample(ATTR_KEYS, rng.randint(0, 2)):
            roll = rng.random()
            if roll < 0.4:
                value = None  # placeholder
            elif roll < 0.8:
                value = rng.choice(STRING_VALUES)
            else:
                value = Number(rng.choice(NUMBER_VALUES))
            attrs.append(AttributeDecl(key, value))
        entities.append(EntityDef(f"ent{i}", kind, tuple(attrs)))

    requirements: list[NamedRequirement] = []
    leaf_counter = [0]
    for r in range(rng.randint(1, max_requirements)):
        budget = [rng.randint(1, max_leaves)]
        root = _random_node(rng, entities, max_depth, budget, leaf_counter)
        requirements.append(NamedRequirement(f"req{r}", root))

    spec = Specification(tuple(entities), tuple(requirements))
    report = validate(spec)
    assert report.ok, [d.render() for d in report.errors()]
    return spec


def _random_node(
    rng: random.Random,
    entities: list[EntityDef],
    depth_left: int,
    budget: list[int],
    leaf_counter: list[int],
) -> RequirementNode:
    if depth_left <= 1 or budget[0] <= 1 or rng.random() < 0.35:
        return SimpleNode(_random_leaf(rng, entities, leaf_counter))
    op = rng.choice((BoolOp.AND, BoolOp.OR, BoolOp.NOT))
    if op is BoolOp.NOT:
        child = _random_node(rng, entities, depth_left - 1, budget, leaf_counter)
        return ComplexNode(op, (child,))
    n_children = rng.randint(1, min(3, budget[0]))
    children = []
    for _ in range(n_children):
        if budget[0] <= 0:
            break
        children.append(_random_node(rng, entities, depth_left - 1, budget, leaf_counter))
    return ComplexNode(op, tuple(children))


def _random_leaf(
    rng: random.Random, entities: list[EntityDef], leaf_counter: list[int]
) -> SimpleRequirement:
    entity = rng.choice(entities)
    leaf_counter[0] += 1
    cardinality = None
    if entity.kind is EntityKind.CONCRETE and rng.random() < 0.6:
        lo = rng.randint(0, 2)
        roll = rng.random()
        if roll < 0.33:
            cardinality = Cardinality(max(lo, 1), max(lo, 1))
        elif roll < 0.66:
            cardinality = Cardinality(lo, lo + rng.randint(1, 2), interval_form=True)
        else:
            cardinality = Cardinality(lo, None, interval_form=True)

    constraints: list[AttributeDecl] = []
    for attr in entity.attributes:
        if attr.key == "description" and entity.kind is EntityKind.ABSTRACT:
            continue
        if rng.random() < 0.35:
            if attr.is_placeholder:
                value = rng.choice(STRING_VALUES)
            else:
                value = attr.value  # must equal the fixed value to stay valid
            constraints.append(AttributeDecl(attr.key, value))
    if rng.random() < 0.2:
        constraints.append(AttributeDecl("extra", rng.choice(STRING_VALUES)))

    return SimpleRequirement(
        kind=entity.kind,
        entity=entity.name,
        name=f"leaf{leaf_counter[0]}",
        modality=rng.choice(MODALITIES),
        confidence=Number(rng.choice(CONFIDENCES)),
        cardinality=cardinality,
        constraints=tuple(constraints),
    )


def random_snapshot(
    rng: random.Random, spec: Specification, *, max_detections: int = 10
) -> DetectionSnapshot:
    """A snapshot biased towards near-matches of the spec's leaves."""
    leaves = [
        leaf
        for named in spec.requirements
        for leaf in _iter_leaves(named.root)
    ]
    detections: list[Detection] = []
    for i in range(rng.randint(0, max_detections)):
        if leaves and rng.random() < 0.8:
            leaf = rng.choice(leaves)
            entity = spec.entity(leaf.entity)  # type: ignore[arg-type]
            assert entity is not None
            modality = leaf.modality if rng.random() < 0.8 else rng.choice(MODALITIES)
            confidence = round(rng.random(), 2)
            attrs: dict[str, str] = {}
            for attr in entity.attributes:
                if rng.random() < 0.8:
                    if attr.value is None:
                        attrs[attr.key] = rng.choice(STRING_VALUES)
                    else:
                        v = attr.value
                        attrs[attr.key] = v.canonical() if isinstance(v, Number) else v
            for c in leaf.constraints:
                if rng.random() < 0.7 and c.value is not None:
                    v = c.value
                    attrs[c.key] = v.canonical() if isinstance(v, Number) else v
                elif rng.random() < 0.5:
                    attrs[c.key] = rng.choice(STRING_VALUES)
            kind = entity.kind if rng.random() < 0.9 else rng.choice(tuple(EntityKind))
            detections.append(
                Detection(f"d{i}", entity.name, kind, modality or "image", confidence, attrs)
            )
        else:
            detections.append(
                Detection(
                    f"d{i}",
                    rng.choice([e.name for e in spec.entities] + ["ghost"]),
                    rng.choice(tuple(EntityKind)),
                    rng.choice(MODALITIES),
                    round(rng.random(), 2),
                    {},
                )
            )
    return DetectionSnapshot(tuple(detections))


def _iter_leaves(node: RequirementNode):
    if isinstance(node, SimpleNode):
        yield node.req
    else:
        for child in node.children:
            yield from _iter_leaves(child)


def snapshot_to_json_dict(snapshot: DetectionSnapshot) -> dict:
    return {
        "timestamp": snapshot.timestamp,
        "detections": [
            {
                "id": d.id,
                "entity": d.entity,
                "kind": d.kind.value,
                "modality": d.modality,
                "confidence": d.confidence,
                "attributes": dict(d.attributes),
            }
            for d in snapshot.detections
        ],
    }


def export_differential_corpus(
    out_dir: str | Path,
    *,
    specs: int = 200,
    snapshots_per_spec: int = 20,
    seed: int = 20240101,
) -> Path:
    """Write a corpus of (source, generated code, snapshots, verdicts) cases."""
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cases = []
    for case_no in range(specs):
        spec = random_spec(rng)
        snapshots = [
            random_snapshot(rng, spec) for _ in range(snapshots_per_spec)
        ]
        verdicts = []
        for snap in snapshots:
            results = evaluate_all(spec, snap)
            verdicts.append({name: res.satisfied for name, res in results.items()})
        cases.append(
            {
                "id": f"case{case_no:03d}",
                "source": format_spec(spec),
                "code": generate(spec),
                "snapshots": [snapshot_to_json_dict(s) for s in snapshots],
                "verdicts": verdicts,
            }
        )
    path = out / "cases.json"
    path.write_text(
        json.dumps({"schema_version": "1", "seed": seed, "cases": cases}, indent=1),
        encoding="utf-8",
    )
    return path


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--specs", type=int, default=200)
    ap.add_argument("--snapshots", type=int, default=20)
    ap.add_argument("--seed", type=int, default=20240101)
    args = ap.parse_args(argv)
    path = export_differential_corpus(
        args.out_dir, specs=args.specs, snapshots_per_spec=args.snapshots, seed=args.seed
    )
    print(path)


if __name__ == "__main__":
    main()
