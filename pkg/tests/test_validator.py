import dataclasses
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from merlan.config import Config
from merlan.diagnostics import Severity
from merlan.engine import evaluate_all
from merlan.fuzz import random_snapshot, random_spec
from merlan.model import (
    ComplexNode,
    NamedRequirement,
    SimpleNode,
    Specification,
)
from merlan.parser import parse_source
from merlan.validator import validate


def codes(report):
    return [d.code for d in report.diagnostics]


def replace_leaf(node, index, fn, _counter=None):
    """Rebuild a requirement tree with fn applied to the index-th leaf."""
    counter = _counter if _counter is not None else [0]
    if isinstance(node, SimpleNode):
        i = counter[0]
        counter[0] += 1
        return SimpleNode(fn(node.req)) if i == index else node
    children = tuple(replace_leaf(c, index, fn, counter) for c in node.children)
    return ComplexNode(node.op, children, node.span)


def mutate_requirement(spec: Specification, req_name: str, leaf_index: int, fn):
    requirements = tuple(
        NamedRequirement(r.name, replace_leaf(r.root, leaf_index, fn), r.span)
        if r.name == req_name
        else r
        for r in spec.requirements
    )
    return Specification(spec.entities, requirements)


def test_corpus_is_valid(house_spec):
    report = validate(house_spec)
    assert report.ok
    assert report.errors() == ()


def test_missing_modality_yields_e001_naming_it(house_spec):
    mutated = mutate_requirement(
        house_spec, "requirement1", 0, lambda l: dataclasses.replace(l, modality=None)
    )
    report = validate(mutated)
    (diag,) = report.by_code("E001")
    assert "'modality'" in diag.message


def test_each_mandatory_key_on_each_leaf_of_requirement2(house_spec):
    for leaf_index in range(4):
        for key in ("entity", "name", "modality", "confidence"):
            mutated = mutate_requirement(
                house_spec,
                "requirement2",
                leaf_index,
                lambda l: dataclasses.replace(l, **{key: None}),
            )
            report = validate(mutated)
            assert len(report.by_code("E001")) == 1, (leaf_index, key)


def test_unresolved_entity_is_e002(house_spec):
    mutated = mutate_requirement(
        house_spec, "requirement1", 0, lambda l: dataclasses.replace(l, entity="robot")
    )
    assert [d.code for d in validate(mutated).errors()] == ["E002"]


def test_concrete_leaf_referencing_abstract_entity_is_e003(house_spec):
    mutated = mutate_requirement(
        house_spec, "requirement2", 0, lambda l: dataclasses.replace(l, entity="night")
    )
    assert [d.code for d in validate(mutated).errors()] == ["E003"]


def test_confidence_out_of_range_is_e004():
    source = (
        "ENTITIES:\n  CONCRETE:\n    smoke\n"
        "REQUIREMENTS:\n  r:\n    CONCRETE\n"
        "      - entity: smoke\n      - name: \"s\"\n"
        "      - modality: \"image\"\n      - confidence: 1.5\n"
    )
    report = validate(parse_source(source).spec)
    assert [d.code for d in report.errors()] == ["E004"]


def test_confidence_zero_is_legal():
    source = (
        "ENTITIES:\n  CONCRETE:\n    smoke\n"
        "REQUIREMENTS:\n  r:\n    CONCRETE\n"
        "      - entity: smoke\n      - name: \"s\"\n"
        "      - modality: \"image\"\n      - confidence: 0\n"
    )
    assert validate(parse_source(source).spec).ok


def test_descending_interval_is_e005():
    source = (
        "ENTITIES:\n  CONCRETE:\n    smoke\n"
        "REQUIREMENTS:\n  r:\n    CONCRETE [5..2]\n"
        "      - entity: smoke\n      - name: \"s\"\n"
        "      - modality: \"image\"\n      - confidence: 0.5\n"
    )
    report = validate(parse_source(source).spec)
    assert [d.code for d in report.errors()] == ["E005"]


def test_cardinality_on_abstract_requirement_is_e006():
    source = (
        "ENTITIES:\n  ABSTRACT:\n    night\n"
        "REQUIREMENTS:\n  r:\n    ABSTRACT [1..2]\n"
        "      - entity: night\n      - name: \"n\"\n"
        "      - modality: \"image\"\n      - confidence: 0.5\n"
    )
    report = validate(parse_source(source).spec)
    assert [d.code for d in report.errors()] == ["E006"]


def test_constraint_conflicting_with_fixed_attribute_is_e007():
    source = (
        "ENTITIES:\n  CONCRETE:\n    dog\n      - breed: \"labrador\"\n"
        "REQUIREMENTS:\n  r:\n    CONCRETE\n"
        "      - entity: dog\n      - name: \"d\"\n"
        "      - modality: \"image\"\n      - confidence: 0.5\n"
        "      - breed: \"poodle\"\n"
    )
    report = validate(parse_source(source).spec)
    assert "E007" in [d.code for d in report.errors()]


def test_duplicate_names_are_e008():
    source = (
        "ENTITIES:\n  CONCRETE:\n    smoke\n    smoke\n"
        "REQUIREMENTS:\n"
        "  r:\n    CONCRETE\n"
        "      - entity: smoke\n      - name: \"a\"\n"
        "      - modality: \"image\"\n      - confidence: 0.5\n"
        "  r:\n    CONCRETE\n"
        "      - entity: smoke\n      - name: \"b\"\n"
        "      - modality: \"image\"\n      - confidence: 0.5\n"
    )
    report = validate(parse_source(source).spec)
    assert [d.code for d in report.errors()] == ["E008", "E008"]


def test_unknown_modality_is_w001_unless_configured():
    source = (
        "ENTITIES:\n  CONCRETE:\n    sensor\n"
        "REQUIREMENTS:\n  r:\n    CONCRETE\n"
        "      - entity: sensor\n      - name: \"s\"\n"
        "      - modality: \"temperature\"\n      - confidence: 0.5\n"
    )
    spec = parse_source(source).spec
    report = validate(spec)
    assert [d.code for d in report.diagnostics] == ["W001"]
    assert report.ok  # warnings do not fail validation
    configured = Config(extra_modalities=frozenset({"temperature"}))
    assert validate(spec, configured).diagnostics == ()


def test_ad_hoc_constraint_key_is_w002(house_spec):
    import dataclasses as dc
    from merlan.model import AttributeDecl

    mutated = mutate_requirement(
        house_spec,
        "requirement1",
        0,
        lambda l: dc.replace(l, constraints=(AttributeDecl("density", "high"),)),
    )
    report = validate(mutated)
    assert "W002" in [d.code for d in report.diagnostics]
    assert report.ok


def test_color_with_audio_modality_is_w003():
    source = (
        "ENTITIES:\n  CONCRETE:\n    car\n      - color: ?\n"
        "REQUIREMENTS:\n  r:\n    CONCRETE\n"
        "      - entity: car\n      - name: \"c\"\n"
        "      - modality: \"audio\"\n      - confidence: 0.5\n"
        "      - color: \"red\"\n"
    )
    report = validate(parse_source(source).spec)
    assert "W003" in [d.code for d in report.diagnostics]
    assert report.ok


def test_abstract_requirement_with_constraints_gets_info():
    source = (
        "ENTITIES:\n  ABSTRACT:\n    hazard\n      - level: ?\n"
        "REQUIREMENTS:\n  r:\n    ABSTRACT\n"
        "      - entity: hazard\n      - name: \"h\"\n"
        "      - modality: \"image\"\n      - confidence: 0.5\n"
        "      - level: \"high\"\n"
    )
    report = validate(parse_source(source).spec)
    assert "I001" in [d.code for d in report.diagnostics]
    assert report.ok


def test_reports_are_deterministic_and_sorted(house_spec):
    a = validate(house_spec)
    b = validate(house_spec)
    assert a == b
    spans = [(d.span.line, d.span.column, d.code) for d in a.diagnostics]
    assert spans == sorted(spans)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_valid_specs_always_evaluate_cleanly(seed):
    rng = random.Random(seed)
    spec = random_spec(rng)
    assert validate(spec).ok
    snapshot = random_snapshot(rng, spec)
    results = evaluate_all(spec, snapshot)
    assert set(results) == {r.name for r in spec.requirements}


def test_severity_partition():
    report = validate(parse_source("").spec)
    assert report.ok
    assert all(
        d.severity in (Severity.ERROR, Severity.WARNING, Severity.INFO)
        for d in report.diagnostics
    )
