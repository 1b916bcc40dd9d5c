export { ImportFailure, loadGeneratedSource } from "./runtime";
export type { AttrValue, EntityDecl, LeafNode, OpNode, Registry, ReqNode } from "./runtime";
export {
  SchemaError,
  UnknownRequirement,
  parseSnapshot,
  rtEvaluate,
} from "./evaluate";
export type { Detection, LeafVerdict, Snapshot, Verdict } from "./evaluate";
