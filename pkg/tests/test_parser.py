import random

from hypothesis import given, settings
from hypothesis import strategies as st

from merlan.formatter import format_spec
from merlan.fuzz import random_spec
from merlan.model import (
    BoolOp,
    Cardinality,
    ComplexNode,
    EntityKind,
    Number,
    SimpleNode,
    iter_nodes,
)
from merlan.parser import parse_source


def test_corpus_structure(house_spec):
    assert [e.name for e in house_spec.entities] == [
        "person",
        "smoke",
        "fire",
        "dog",
        "car",
        "night",
        "empty_house",
    ]
    kinds = {e.name: e.kind for e in house_spec.entities}
    assert kinds["night"] is EntityKind.ABSTRACT
    assert kinds["empty_house"] is EntityKind.ABSTRACT
    assert kinds["car"] is EntityKind.CONCRETE
    assert [r.name for r in house_spec.requirements] == ["requirement1", "requirement2"]


def test_corpus_requirement2_shape(house_spec):
    root = house_spec.requirement("requirement2").root
    assert isinstance(root, ComplexNode) and root.op is BoolOp.OR
    fire, inner_and = root.children
    assert isinstance(fire, SimpleNode) and fire.req.name == "fire"
    assert isinstance(inner_and, ComplexNode) and inner_and.op is BoolOp.AND
    empty_house, inner_or = inner_and.children
    assert isinstance(empty_house, SimpleNode)
    assert empty_house.req.kind is EntityKind.ABSTRACT
    assert isinstance(inner_or, ComplexNode) and inner_or.op is BoolOp.OR
    person, car = inner_or.children
    assert person.req.name == "unknown_person"
    assert person.req.cardinality == Cardinality(1, None)
    assert car.req.name == "unknown_car"
    assert car.req.cardinality == Cardinality(1, None)
    assert person.req.constraints[0].key == "gender"
    assert person.req.constraints[0].value == "male"


def test_reserved_attributes_lifted(house_spec):
    leaf = house_spec.requirement("requirement1").root.req
    assert leaf.entity == "smoke"
    assert leaf.name == "smoke"
    assert leaf.modality == "image"
    assert leaf.confidence == Number("0.5")
    assert leaf.cardinality is None
    assert leaf.constraints == ()


def test_minimal_not_requirement():
    source = (
        "REQUIREMENTS:\n"
        "  r:\n"
        "    NOT\n"
        "      CONCRETE\n"
        "        - entity: smoke\n"
        "        - name: \"s\"\n"
        "        - modality: \"image\"\n"
        "        - confidence: 0.5\n"
    )
    result = parse_source(source)
    assert result.spec is not None
    root = result.spec.requirement("r").root
    assert isinstance(root, ComplexNode) and root.op is BoolOp.NOT
    assert len(root.children) == 1
    assert isinstance(root.children[0], SimpleNode)
    assert root.children[0].req.kind is EntityKind.CONCRETE


def test_operator_without_children_is_an_error():
    result = parse_source("REQUIREMENTS:\n  r:\n    AND\n")
    assert result.spec is None
    assert any(
        "AND requires at least one child requirement" in d.message
        for d in result.diagnostics
    )


def test_not_with_two_children_is_an_error():
    source = (
        "REQUIREMENTS:\n"
        "  r:\n"
        "    NOT\n"
        "      CONCRETE\n"
        "        - entity: a\n"
        "      CONCRETE\n"
        "        - entity: b\n"
    )
    result = parse_source(source)
    assert result.spec is None
    assert any("NOT requires exactly one child" in d.message for d in result.diagnostics)


def test_duplicate_reserved_attribute_is_an_error():
    source = (
        "REQUIREMENTS:\n"
        "  r:\n"
        "    CONCRETE\n"
        "      - entity: smoke\n"
        "      - confidence: 0.5\n"
        "      - confidence: 0.6\n"
    )
    result = parse_source(source)
    assert result.spec is None
    (diag,) = [d for d in result.diagnostics if "duplicate 'confidence'" in d.message]
    assert diag.span.line == 5  # first occurrence reported


def test_bare_identifier_value_is_an_error():
    result = parse_source("ENTITIES:\n  CONCRETE:\n    dog\n      - breed: labrador\n")
    assert result.spec is None
    assert any("bare identifier" in d.message for d in result.diagnostics)


def test_bad_cardinality_syntax_is_an_error():
    result = parse_source("REQUIREMENTS:\n  r:\n    CONCRETE [-1]\n      - entity: a\n")
    assert result.spec is None


def test_missing_mandatory_attributes_parse_fine():
    # Mandatory-attribute checks belong to the validator, not the parser.
    result = parse_source("REQUIREMENTS:\n  r:\n    CONCRETE\n      - entity: smoke\n")
    assert result.spec is not None
    leaf = result.spec.requirement("r").root.req
    assert leaf.name is None and leaf.modality is None and leaf.confidence is None


def test_errors_carry_spans_and_resynchronize():
    source = (
        "REQUIREMENTS:\n"
        "  broken:\n"
        "    CONCRETE [\n"
        "  fine:\n"
        "    CONCRETE\n"
        "      - entity: smoke\n"
    )
    result = parse_source(source)
    assert result.spec is None
    assert all(d.span.line > 0 for d in result.diagnostics)


def test_span_fidelity(house_spec):
    for named in house_spec.requirements:
        for node in iter_nodes(named.root):
            assert named.span.encloses(node.span)
            if isinstance(node, ComplexNode):
                for child in node.children:
                    assert node.span.encloses(child.span)
    for entity in house_spec.entities:
        for attr in entity.attributes:
            assert entity.span.encloses(attr.span)


def test_round_trip_corpus(house_spec):
    reparsed = parse_source(format_spec(house_spec))
    assert reparsed.spec == house_spec


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_round_trip_random_specs(seed):
    spec = random_spec(random.Random(seed))
    result = parse_source(format_spec(spec))
    assert result.spec == spec, [d.render() for d in result.diagnostics]


def test_empty_source_parses_to_empty_spec():
    result = parse_source("")
    assert result.spec is not None
    assert result.spec.entities == () and result.spec.requirements == ()


@given(st.binary(max_size=120))
@settings(max_examples=300, deadline=None)
def test_never_crashes_on_arbitrary_bytes(data):
    parse_source(data.decode("utf-8", errors="replace"))
