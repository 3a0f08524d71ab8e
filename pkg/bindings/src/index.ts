export {
  analyze,
  encode,
  encodeFile,
  generate,
  plan,
  SequenceHandle,
} from "./api";
export type {
  AnalyzeOptions,
  AnalyzeResult,
  EncodeConfig,
  EncodeResult,
  FusionMode,
  GenerateOptions,
  PlanConfig,
  SpectrumRow,
  SyntheticKind,
} from "./api";
export {
  BudgetError,
  FreresError,
  IoError,
  RunnerError,
  ShapeError,
  UseAfterReleaseError,
  ValidationError,
} from "./errors";
export {
  decodeLatents,
  encodeLatents,
  flattenNested,
  FRL_HEADER_BYTES,
  FRL_MAGIC,
} from "./frl";
export type { LatentShape, NestedLatents } from "./frl";
export { resolveCommand, runCli } from "./runner";
export type { RunnerOptions } from "./runner";
export { parseTokens, TOKEN_KINDS } from "./tokens";
export type { TokenKind, TokenRecord, TokenStream } from "./tokens";
