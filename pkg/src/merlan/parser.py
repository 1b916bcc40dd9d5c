"""Recursive-descent parser lowering MERLAN token streams to the core model.

Block structure follows the offside rule realized by the lexer's
INDENT/DEDENT tokens: the children of a boolean operator are exactly the
lines indented one level beneath it. Attribute lines ("- key: value") may
sit either one level under their header line or at the same level, as both
styles occur in practice.

Reserved attributes (entity, name, modality, confidence) are lifted from
the attribute list into SimpleRequirement fields. Errors never escape as
exceptions: parse() collects diagnostics and resynchronizes at statement
level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .diagnostics import Diagnostic, Severity
from .lexer import LexError, Token, TokenKind, tokenize
from .model import (
    AttributeDecl,
    BoolOp,
    Cardinality,
    ComplexNode,
    EntityDef,
    EntityKind,
    LiteralValue,
    NamedRequirement,
    Number,
    RequirementNode,
    SimpleNode,
    SimpleRequirement,
    Span,
    Specification,
)

MAX_ERRORS = 50


@dataclass(frozen=True)
class ParseResult:
    spec: Optional[Specification]
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.spec is not None


class ParseError(Exception):
    def __init__(self, message: str, span: Span):
        self.message = message
        self.span = span
        super().__init__(message)


@dataclass(frozen=True)
class _RawAttr:
    key: str
    value: Optional[LiteralValue]  # None = "?" placeholder
    ident_value: Optional[str]  # set when the value was a bare identifier
    span: Span


def parse_source(source: str) -> ParseResult:
    """Tokenize and parse; lexical faults become error diagnostics."""
    try:
        tokens = tokenize(source)
    except LexError as exc:
        diag = Diagnostic(Severity.ERROR, exc.message, exc.span, code="L001")
        return ParseResult(None, (diag,))
    return parse(tokens)


def parse(tokens: list[Token]) -> ParseResult:
    parser = _Parser(tokens)
    try:
        spec = parser.parse_script()
    except ParseError as exc:
        parser.error(exc.message, exc.span)
        spec = Specification()
    diags = tuple(parser.diagnostics)
    if any(d.severity is Severity.ERROR for d in diags):
        return ParseResult(None, diags)
    return ParseResult(spec, diags)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return tok

    def at(self, kind: TokenKind, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind is kind and (text is None or tok.text == text)

    def expect(self, kind: TokenKind, what: str) -> Token:
        if not self.at(kind):
            tok = self.peek()
            raise ParseError(f"expected {what}, found {_describe(tok)}", tok.span)
        return self.advance()

    def error(self, message: str, span: Span) -> None:
        if len(self.diagnostics) < MAX_ERRORS:
            self.diagnostics.append(Diagnostic(Severity.ERROR, message, span, code="P001"))

    def resync(self) -> None:
        """Skip to the next line at the current block level, keeping
        INDENT/DEDENT balance so outer blocks still close properly."""
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.EOF:
                return
            if tok.kind is TokenKind.INDENT:
                depth += 1
            elif tok.kind is TokenKind.DEDENT:
                if depth == 0:
                    return
                depth -= 1
            elif tok.kind is TokenKind.NEWLINE and depth == 0:
                self.advance()
                return
            self.advance()

    # -- grammar ----------------------------------------------------------

    def parse_script(self) -> Specification:
        entities: list[EntityDef] = []
        requirements: list[NamedRequirement] = []
        if self.at(TokenKind.SECTION, "ENTITIES"):
            entities = self.parse_entities_section()
        if self.at(TokenKind.SECTION, "REQUIREMENTS"):
            requirements = self.parse_requirements_section()
        if not self.at(TokenKind.EOF):
            tok = self.peek()
            self.error(f"unexpected {_describe(tok)} at top level", tok.span)
        return Specification(tuple(entities), tuple(requirements))

    def parse_entities_section(self) -> list[EntityDef]:
        self.expect(TokenKind.SECTION, "'ENTITIES'")
        entities: list[EntityDef] = []
        try:
            self.expect(TokenKind.NEWLINE, "end of line")
        except ParseError as exc:
            self.error(exc.message, exc.span)
            self.resync()
            return entities
        if not self.at(TokenKind.INDENT):
            return entities
        self.advance()
        while self.at(TokenKind.SECTION, "CONCRETE") or self.at(TokenKind.SECTION, "ABSTRACT"):
            kind = (
                EntityKind.CONCRETE
                if self.peek().text == "CONCRETE"
                else EntityKind.ABSTRACT
            )
            self.advance()
            try:
                self.expect(TokenKind.NEWLINE, "end of line")
            except ParseError as exc:
                self.error(exc.message, exc.span)
                self.resync()
                continue
            if self.at(TokenKind.INDENT):
                self.advance()
                while self.at(TokenKind.IDENT):
                    try:
                        entities.append(self.parse_entity_def(kind))
                    except ParseError as exc:
                        self.error(exc.message, exc.span)
                        self.resync()
                self.close_block()
        self.close_block()
        return entities

    def parse_entity_def(self, kind: EntityKind) -> EntityDef:
        name_tok = self.expect(TokenKind.IDENT, "entity name")
        self.expect(TokenKind.NEWLINE, "end of line")
        raw_attrs = self.parse_attribute_block()
        attrs: list[AttributeDecl] = []
        seen: dict[str, Span] = {}
        for raw in raw_attrs:
            if raw.ident_value is not None:
                raise ParseError(
                    f"bare identifier {raw.ident_value!r} is not a valid attribute "
                    'value; use a quoted string, a number or "?"',
                    raw.span,
                )
            if raw.key in seen:
                raise ParseError(
                    f"duplicate attribute {raw.key!r} on entity {name_tok.text!r}",
                    seen[raw.key],
                )
            seen[raw.key] = raw.span
            attrs.append(AttributeDecl(raw.key, raw.value, raw.span))
        span = name_tok.span
        for a in attrs:
            span = span.union(a.span)
        return EntityDef(name_tok.text, kind, tuple(attrs), span)

    def parse_requirements_section(self) -> list[NamedRequirement]:
        self.expect(TokenKind.SECTION, "'REQUIREMENTS'")
        requirements: list[NamedRequirement] = []
        try:
            self.expect(TokenKind.NEWLINE, "end of line")
        except ParseError as exc:
            self.error(exc.message, exc.span)
            self.resync()
            return requirements
        if not self.at(TokenKind.INDENT):
            return requirements
        self.advance()
        while self.at(TokenKind.IDENT):
            try:
                requirements.append(self.parse_named_requirement())
            except ParseError as exc:
                self.error(exc.message, exc.span)
                self.resync()
        self.close_block()
        return requirements

    def parse_named_requirement(self) -> NamedRequirement:
        name_tok = self.expect(TokenKind.IDENT, "requirement name")
        self.expect(TokenKind.NEWLINE, "end of line")
        indent = self.expect(TokenKind.INDENT, "an indented requirement body")
        root = self.parse_requirement()
        if not self.at(TokenKind.DEDENT):
            tok = self.peek()
            raise ParseError(
                f"expected a single requirement under {name_tok.text!r}, "
                f"found {_describe(tok)}",
                tok.span,
            )
        self.advance()
        span = name_tok.span.union(root.span if isinstance(root, ComplexNode) else root.req.span)
        return NamedRequirement(name_tok.text, root, span)

    def parse_requirement(self) -> RequirementNode:
        if self.at(TokenKind.OPERATOR):
            return self.parse_complex_requirement()
        if self.at(TokenKind.SECTION, "CONCRETE") or self.at(TokenKind.SECTION, "ABSTRACT"):
            return self.parse_simple_requirement()
        tok = self.peek()
        raise ParseError(
            f"expected AND, OR, NOT, CONCRETE or ABSTRACT, found {_describe(tok)}",
            tok.span,
        )

    def parse_complex_requirement(self) -> ComplexNode:
        op_tok = self.advance()
        op = BoolOp[op_tok.text]
        self.expect(TokenKind.NEWLINE, "end of line")
        children: list[RequirementNode] = []
        if self.at(TokenKind.INDENT):
            self.advance()
            while not self.at(TokenKind.DEDENT) and not self.at(TokenKind.EOF):
                children.append(self.parse_requirement())
            self.close_block()
        if not children:
            raise ParseError(
                f"{op.value} requires at least one child requirement", op_tok.span
            )
        if op is BoolOp.NOT and len(children) != 1:
            raise ParseError(
                f"NOT requires exactly one child requirement, found {len(children)}",
                op_tok.span,
            )
        span = op_tok.span
        for child in children:
            span = span.union(child.span if isinstance(child, ComplexNode) else child.req.span)
        return ComplexNode(op, tuple(children), span)

    def parse_simple_requirement(self) -> SimpleNode:
        head_tok = self.advance()
        kind = (
            EntityKind.CONCRETE if head_tok.text == "CONCRETE" else EntityKind.ABSTRACT
        )
        cardinality: Optional[Cardinality] = None
        if self.at(TokenKind.LBRACKET):
            cardinality = self.parse_cardinality()
        self.expect(TokenKind.NEWLINE, "end of line")
        raw_attrs = self.parse_attribute_block()

        entity: Optional[str] = None
        name: Optional[str] = None
        modality: Optional[str] = None
        confidence: Optional[Number] = None
        reserved_order: list[str] = []
        reserved_spans: dict[str, Span] = {}
        constraints: list[AttributeDecl] = []
        constraint_spans: dict[str, Span] = {}
        span = head_tok.span

        for raw in raw_attrs:
            span = span.union(raw.span)
            if raw.key in ("entity", "name", "modality", "confidence"):
                if raw.key in reserved_spans:
                    raise ParseError(
                        f"duplicate {raw.key!r} attribute on requirement",
                        reserved_spans[raw.key],
                    )
                reserved_spans[raw.key] = raw.span
                reserved_order.append(raw.key)
            if raw.key == "entity":
                if raw.ident_value is not None:
                    entity = raw.ident_value
                elif isinstance(raw.value, str):
                    entity = raw.value
                else:
                    raise ParseError(
                        "'entity' must name an entity (identifier or string)", raw.span
                    )
            elif raw.key == "name":
                if not isinstance(raw.value, str):
                    raise ParseError("'name' must be a quoted string", raw.span)
                name = raw.value
            elif raw.key == "modality":
                if not isinstance(raw.value, str):
                    raise ParseError("'modality' must be a quoted string", raw.span)
                modality = raw.value.lower()
            elif raw.key == "confidence":
                if not isinstance(raw.value, Number):
                    raise ParseError("'confidence' must be a number", raw.span)
                confidence = raw.value
            else:
                if raw.ident_value is not None:
                    raise ParseError(
                        f"bare identifier {raw.ident_value!r} is not a valid attribute "
                        'value; use a quoted string, a number or "?"',
                        raw.span,
                    )
                if raw.value is None:
                    raise ParseError(
                        f"requirement constraint {raw.key!r} cannot be a placeholder",
                        raw.span,
                    )
                if raw.key in constraint_spans:
                    raise ParseError(
                        f"duplicate constraint {raw.key!r} on requirement",
                        constraint_spans[raw.key],
                    )
                constraint_spans[raw.key] = raw.span
                constraints.append(AttributeDecl(raw.key, raw.value, raw.span))

        req = SimpleRequirement(
            kind=kind,
            entity=entity,
            name=name,
            modality=modality,
            confidence=confidence,
            cardinality=cardinality,
            constraints=tuple(constraints),
            reserved_order=tuple(reserved_order),
            span=span,
        )
        return SimpleNode(req)

    def parse_cardinality(self) -> Cardinality:
        self.expect(TokenKind.LBRACKET, "'['")
        lo_tok = self.expect(TokenKind.NUMBER, "a non-negative integer bound")
        lo = _int_bound(lo_tok)
        if self.at(TokenKind.DOTDOT):
            self.advance()
            if self.at(TokenKind.STAR):
                self.advance()
                hi: Optional[int] = None
            else:
                hi_tok = self.expect(TokenKind.NUMBER, "an integer bound or '*'")
                hi = _int_bound(hi_tok)
            self.expect(TokenKind.RBRACKET, "']'")
            return Cardinality(lo, hi, interval_form=True)
        self.expect(TokenKind.RBRACKET, "']'")
        return Cardinality(lo, lo)

    def parse_attribute_block(self) -> list[_RawAttr]:
        attrs: list[_RawAttr] = []
        while True:
            if self.at(TokenKind.DASH):
                attrs.append(self.parse_attribute_line())
            elif self.at(TokenKind.INDENT) and self.peek(1).kind is TokenKind.DASH:
                self.advance()
                while self.at(TokenKind.DASH):
                    attrs.append(self.parse_attribute_line())
                self.close_block()
            else:
                return attrs

    def parse_attribute_line(self) -> _RawAttr:
        dash = self.expect(TokenKind.DASH, "'-'")
        key_tok = self.expect(TokenKind.IDENT, "attribute name")
        self.expect(TokenKind.COLON, "':'")
        tok = self.peek()
        value: Optional[LiteralValue]
        ident_value: Optional[str] = None
        if tok.kind is TokenKind.STRING:
            value = self.advance().text
        elif tok.kind is TokenKind.NUMBER:
            value = Number(self.advance().text)
        elif tok.kind is TokenKind.QUESTION:
            self.advance()
            value = None
        elif tok.kind is TokenKind.IDENT:
            ident_value = self.advance().text
            value = None
        else:
            raise ParseError(
                f"expected an attribute value, found {_describe(tok)}", tok.span
            )
        end = self.expect(TokenKind.NEWLINE, "end of line")
        return _RawAttr(key_tok.text, value, ident_value, dash.span.union(end.span))

    def close_block(self) -> None:
        """Consume the DEDENT that ends the current block; tolerate EOF.

        Leftover tokens in the block (after an error resync) are skipped,
        with one diagnostic, so that outer blocks still close."""
        if self.at(TokenKind.DEDENT):
            self.advance()
            return
        if self.at(TokenKind.EOF):
            return
        tok = self.peek()
        self.error(f"expected end of block, found {_describe(tok)}", tok.span)
        depth = 0
        while not self.at(TokenKind.EOF):
            kind = self.peek().kind
            self.advance()
            if kind is TokenKind.INDENT:
                depth += 1
            elif kind is TokenKind.DEDENT:
                if depth == 0:
                    return
                depth -= 1


def _int_bound(tok: Token) -> int:
    if "." in tok.text:
        raise ParseError("cardinality bounds must be integers", tok.span)
    return int(tok.text)


def _describe(tok: Token) -> str:
    if tok.kind in (TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT, TokenKind.EOF):
        return {
            TokenKind.NEWLINE: "end of line",
            TokenKind.INDENT: "an indented block",
            TokenKind.DEDENT: "end of block",
            TokenKind.EOF: "end of file",
        }[tok.kind]
    return f"{tok.text!r}"
