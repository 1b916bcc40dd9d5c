/**
 * Loader for generated agent trigger code.
 *
 * The generator emits a constrained constructor dialect:
 *
 *   smoke = ConcreteEntity(name="smoke", attributes={})
 *   requirement1 = RequirementDefinition("requirement1")
 *   requirement1.set(ConcreteRequirement(name="smoke", concrete_entity=smoke,
 *     attributes={"modality": "image", "confidence": 0.5}))
 *
 * with OR([...]) / AND([...]) / NOT(...) combinators around leaves. This
 * module parses that dialect into a registry of entity declarations and
 * requirement trees. It deliberately reimplements the contract from the
 * written rules rather than calling the generator's own code, so any
 * disagreement found by the differential suite is informative.
 */

export class ImportFailure extends Error {}

export type AttrValue = string | number | null;

export interface EntityDecl {
  name: string;
  kind: "concrete" | "abstract";
  attributes: Record<string, AttrValue>;
}

export interface LeafNode {
  type: "leaf";
  kind: "concrete" | "abstract";
  name: string;
  entityVar: string;
  attributes: Record<string, AttrValue>;
}

export interface OpNode {
  type: "op";
  op: "AND" | "OR" | "NOT";
  children: ReqNode[];
}

export type ReqNode = LeafNode | OpNode;

export interface Registry {
  /** keyed by the variable name used in the generated code */
  entities: Map<string, EntityDecl>;
  /** keyed by the requirement's declared name */
  requirements: Map<string, ReqNode>;
}

type Token =
  | { kind: "string"; value: string }
  | { kind: "number"; value: number }
  | { kind: "ident"; value: string }
  | { kind: "punct"; value: string };

const PUNCT = new Set(["=", ".", ",", ":", "(", ")", "[", "]", "{", "}"]);

function tokenize(source: string): Token[] {
  const tokens: Token[] = [];
  const lines = source.split("\n");
  for (const line of lines) {
    let i = 0;
    while (i < line.length) {
      const ch = line[i]!;
      if (ch === " " || ch === "\t") {
        i += 1;
        continue;
      }
      if (ch === "#") break; // comment to end of line
      if (PUNCT.has(ch)) {
        tokens.push({ kind: "punct", value: ch });
        i += 1;
        continue;
      }
      if (ch === '"') {
        let j = i + 1;
        while (j < line.length && line[j] !== '"') {
          if (line[j] === "\\") j += 1;
          j += 1;
        }
        if (j >= line.length) throw new ImportFailure("unterminated string");
        tokens.push({ kind: "string", value: JSON.parse(line.slice(i, j + 1)) });
        i = j + 1;
        continue;
      }
      const num = /^-?[0-9]+(\.[0-9]+)?/.exec(line.slice(i));
      if (num) {
        tokens.push({ kind: "number", value: Number(num[0]) });
        i += num[0].length;
        continue;
      }
      const ident = /^[A-Za-z_][A-Za-z0-9_]*/.exec(line.slice(i));
      if (ident) {
        tokens.push({ kind: "ident", value: ident[0] });
        i += ident[0].length;
        continue;
      }
      throw new ImportFailure(`unexpected character ${JSON.stringify(ch)}`);
    }
  }
  return tokens;
}

class Parser {
  private pos = 0;

  constructor(private readonly tokens: Token[]) {}

  atEnd(): boolean {
    return this.pos >= this.tokens.length;
  }

  peek(): Token {
    const tok = this.tokens[this.pos];
    if (tok === undefined) throw new ImportFailure("unexpected end of code");
    return tok;
  }

  next(): Token {
    const tok = this.peek();
    this.pos += 1;
    return tok;
  }

  expectPunct(value: string): void {
    const tok = this.next();
    if (tok.kind !== "punct" || tok.value !== value) {
      throw new ImportFailure(`expected ${JSON.stringify(value)}`);
    }
  }

  expectIdent(): string {
    const tok = this.next();
    if (tok.kind !== "ident") throw new ImportFailure("expected identifier");
    return tok.value;
  }

  expectString(): string {
    const tok = this.next();
    if (tok.kind !== "string") throw new ImportFailure("expected string");
    return tok.value;
  }

  atPunct(value: string): boolean {
    return (
      !this.atEnd() && this.peek().kind === "punct" && this.peek().value === value
    );
  }

  value(): AttrValue {
    const tok = this.next();
    if (tok.kind === "string" || tok.kind === "number") return tok.value;
    if (tok.kind === "ident" && tok.value === "None") return null;
    throw new ImportFailure("expected string, number or None");
  }

  attrMap(): Record<string, AttrValue> {
    this.expectPunct("{");
    const attrs: Record<string, AttrValue> = {};
    while (!this.atPunct("}")) {
      const key = this.expectString();
      this.expectPunct(":");
      attrs[key] = this.value();
      if (this.atPunct(",")) this.next();
      else break;
    }
    this.expectPunct("}");
    return attrs;
  }

  reqNode(): ReqNode {
    const head = this.expectIdent();
    if (head === "AND" || head === "OR") {
      this.expectPunct("(");
      this.expectPunct("[");
      const children: ReqNode[] = [];
      while (!this.atPunct("]")) {
        children.push(this.reqNode());
        if (this.atPunct(",")) this.next();
        else break;
      }
      this.expectPunct("]");
      this.expectPunct(")");
      return { type: "op", op: head, children };
    }
    if (head === "NOT") {
      this.expectPunct("(");
      const child = this.reqNode();
      this.expectPunct(")");
      return { type: "op", op: "NOT", children: [child] };
    }
    if (head === "ConcreteRequirement" || head === "AbstractRequirement") {
      const kind = head === "ConcreteRequirement" ? "concrete" : "abstract";
      const entityKey = kind === "concrete" ? "concrete_entity" : "abstract_entity";
      this.expectPunct("(");
      this.keyword("name");
      const name = this.expectString();
      this.expectPunct(",");
      this.keyword(entityKey);
      const entityVar = this.expectIdent();
      this.expectPunct(",");
      this.keyword("attributes");
      const attributes = this.attrMap();
      this.expectPunct(")");
      return { type: "leaf", kind, name, entityVar, attributes };
    }
    throw new ImportFailure(`unexpected constructor ${JSON.stringify(head)}`);
  }

  private keyword(name: string): void {
    const ident = this.expectIdent();
    if (ident !== name) {
      throw new ImportFailure(`expected keyword argument ${JSON.stringify(name)}`);
    }
    this.expectPunct("=");
  }
}

export function loadGeneratedSource(code: string): Registry {
  const parser = new Parser(tokenize(code));
  const entities = new Map<string, EntityDecl>();
  const requirements = new Map<string, ReqNode>();
  const reqNameByVar = new Map<string, string>();

  while (!parser.atEnd()) {
    const target = parser.expectIdent();
    if (parser.atPunct(".")) {
      parser.next();
      const method = parser.expectIdent();
      if (method !== "set") throw new ImportFailure(`unknown method ${method}`);
      const reqName = reqNameByVar.get(target);
      if (reqName === undefined) {
        throw new ImportFailure(`set() on undeclared requirement ${target}`);
      }
      parser.expectPunct("(");
      requirements.set(reqName, parser.reqNode());
      parser.expectPunct(")");
      continue;
    }
    parser.expectPunct("=");
    const ctor = parser.expectIdent();
    if (ctor === "ConcreteEntity" || ctor === "AbstractEntity") {
      parser.expectPunct("(");
      parser.expectIdent(); // name
      parser.expectPunct("=");
      const name = parser.expectString();
      parser.expectPunct(",");
      parser.expectIdent(); // attributes
      parser.expectPunct("=");
      const attributes = parser.attrMap();
      parser.expectPunct(")");
      entities.set(target, {
        name,
        kind: ctor === "ConcreteEntity" ? "concrete" : "abstract",
        attributes,
      });
    } else if (ctor === "RequirementDefinition") {
      parser.expectPunct("(");
      const reqName = parser.expectString();
      parser.expectPunct(")");
      reqNameByVar.set(target, reqName);
    } else {
      throw new ImportFailure(`unknown constructor ${JSON.stringify(ctor)}`);
    }
  }

  for (const reqName of reqNameByVar.values()) {
    if (!requirements.has(reqName)) {
      throw new ImportFailure(`requirement ${reqName} was declared but never set`);
    }
  }
  return { entities, requirements };
}
