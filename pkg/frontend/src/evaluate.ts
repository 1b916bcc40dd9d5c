/**
 * Snapshot evaluator over a loaded registry.
 *
 * Matching rules, restated independently from the evaluator shipped with
 * the generator:
 *   - a detection matches a leaf iff entity name, entity kind and modality
 *     are equal, confidence is >= the leaf threshold (inclusive), and every
 *     effective constraint value is equal (numbers compared numerically);
 *   - effective constraints are the entity's fixed attributes (minus an
 *     abstract entity's "description") merged with the leaf's non-reserved
 *     attributes; null values constrain nothing;
 *   - concrete leaves count matches against min/max, where a missing
 *     min/max means at-least-one and max == 0 encodes unbounded;
 *   - abstract leaves are satisfied by at least one match;
 *   - AND/OR/NOT fold verdicts with no short-circuit, so every leaf verdict
 *     is reported.
 */

import type { AttrValue, LeafNode, Registry, ReqNode } from "./runtime";

export class UnknownRequirement extends Error {}
export class SchemaError extends Error {}

export interface Detection {
  id: string;
  entity: string;
  kind: string;
  modality: string;
  confidence: number;
  attributes: Record<string, string>;
}

export interface Snapshot {
  detections: Detection[];
}

export interface LeafVerdict {
  name: string;
  matchedCount: number;
  satisfied: boolean;
}

export interface Verdict {
  satisfied: boolean;
  leaves: LeafVerdict[];
}

const RESERVED_LEAF_KEYS = new Set(["min", "max", "modality", "confidence"]);

export function parseSnapshot(json: unknown): Snapshot {
  if (typeof json !== "object" || json === null || Array.isArray(json)) {
    throw new SchemaError("snapshot must be an object");
  }
  const detectionsRaw = (json as Record<string, unknown>)["detections"];
  if (!Array.isArray(detectionsRaw)) {
    throw new SchemaError("detections must be an array");
  }
  const detections: Detection[] = [];
  const seen = new Set<string>();
  detectionsRaw.forEach((raw, index) => {
    const at = `detections[${index}]`;
    if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
      throw new SchemaError(`${at} must be an object`);
    }
    const rec = raw as Record<string, unknown>;
    const str = (field: string): string => {
      const v = rec[field];
      if (typeof v !== "string") throw new SchemaError(`${at}.${field} must be a string`);
      return v;
    };
    const id = str("id");
    if (seen.has(id)) throw new SchemaError(`${at}.id duplicates ${JSON.stringify(id)}`);
    seen.add(id);
    const entity = str("entity");
    const kind = str("kind");
    const modality = str("modality");
    const confidence = rec["confidence"];
    if (typeof confidence !== "number" || !Number.isFinite(confidence)) {
      throw new SchemaError(`${at}.confidence must be a finite number`);
    }
    const attrsRaw = rec["attributes"] ?? {};
    if (typeof attrsRaw !== "object" || attrsRaw === null || Array.isArray(attrsRaw)) {
      throw new SchemaError(`${at}.attributes must be an object`);
    }
    const attributes: Record<string, string> = {};
    for (const [key, value] of Object.entries(attrsRaw)) {
      if (typeof value === "string") attributes[key] = value;
      else if (typeof value === "number") attributes[key] = String(value);
      else throw new SchemaError(`${at}.attributes.${key} must be a string or number`);
    }
    detections.push({ id, entity, kind, modality, confidence, attributes });
  });
  return { detections };
}

function constraintHolds(expected: AttrValue, actual: string | undefined): boolean {
  if (expected === null) return true;
  if (actual === undefined) return false;
  if (typeof expected === "number") {
    const parsed = Number(actual);
    return Number.isFinite(parsed) && parsed === expected;
  }
  return actual === expected;
}

function matchLeaf(registry: Registry, leaf: LeafNode, snapshot: Snapshot): LeafVerdict {
  const entity = registry.entities.get(leaf.entityVar);
  if (entity === undefined) {
    throw new UnknownRequirement(`leaf references unknown entity ${leaf.entityVar}`);
  }

  const constraints = new Map<string, AttrValue>();
  for (const [key, value] of Object.entries(entity.attributes)) {
    if (value === null) continue;
    if (entity.kind === "abstract" && key === "description") continue;
    constraints.set(key, value);
  }
  for (const [key, value] of Object.entries(leaf.attributes)) {
    if (RESERVED_LEAF_KEYS.has(key) || value === null) continue;
    constraints.set(key, value);
  }

  const modality = leaf.attributes["modality"];
  const threshold = leaf.attributes["confidence"];
  let matchedCount = 0;
  for (const det of snapshot.detections) {
    if (det.entity !== entity.name) continue;
    if (det.kind !== leaf.kind) continue;
    if (typeof modality === "string" && det.modality !== modality) continue;
    if (typeof threshold === "number" && det.confidence < threshold) continue;
    let ok = true;
    for (const [key, expected] of constraints) {
      if (!constraintHolds(expected, det.attributes[key])) {
        ok = false;
        break;
      }
    }
    if (ok) matchedCount += 1;
  }

  let satisfied: boolean;
  if (leaf.kind === "abstract") {
    satisfied = matchedCount >= 1;
  } else {
    const min = typeof leaf.attributes["min"] === "number" ? leaf.attributes["min"] : 1;
    const maxRaw = leaf.attributes["max"];
    const max =
      typeof maxRaw === "number" && maxRaw !== 0 ? maxRaw : Number.POSITIVE_INFINITY;
    satisfied = matchedCount >= min && matchedCount <= max;
  }
  return { name: leaf.name, matchedCount, satisfied };
}

function evalNode(
  registry: Registry,
  node: ReqNode,
  snapshot: Snapshot,
  leaves: LeafVerdict[],
): boolean {
  if (node.type === "leaf") {
    const verdict = matchLeaf(registry, node, snapshot);
    leaves.push(verdict);
    return verdict.satisfied;
  }
  const childVerdicts = node.children.map((c) => evalNode(registry, c, snapshot, leaves));
  switch (node.op) {
    case "AND":
      return childVerdicts.every(Boolean);
    case "OR":
      return childVerdicts.some(Boolean);
    case "NOT":
      return !childVerdicts[0];
  }
}

export function rtEvaluate(
  registry: Registry,
  reqName: string,
  snapshotJson: unknown,
): Verdict {
  const root = registry.requirements.get(reqName);
  if (root === undefined) {
    throw new UnknownRequirement(`no requirement named ${JSON.stringify(reqName)}`);
  }
  const snapshot = parseSnapshot(snapshotJson);
  const leaves: LeafVerdict[] = [];
  const satisfied = evalNode(registry, root, snapshot, leaves);
  return { satisfied, leaves };
}
