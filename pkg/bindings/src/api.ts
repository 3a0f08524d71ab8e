/** High-level bindings: generate, encode, plan, analyze.
 *
 * Semantics mirror the CLI one-to-one; arrays cross the boundary by copy
 * into the core's own `.frl` layout inside a private temp directory.
 */

import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ShapeError, UseAfterReleaseError, ValidationError } from "./errors";
import {
  decodeLatents,
  encodeLatents,
  flattenNested,
  LatentShape,
  NestedLatents,
} from "./frl";
import { RunnerOptions, runCli } from "./runner";
import { parseTokens, TokenStream } from "./tokens";

export type SyntheticKind = "noise" | "static" | "slow" | "fast" | "scenecut";

export interface GenerateOptions {
  kind: SyntheticKind;
  frames?: number;
  grid?: [number, number];
  dim?: number;
  seed?: number;
  motionRate?: number;
  cutAt?: number;
  /** Keep the generated `.frl` at this path as well. */
  outPath?: string;
}

export type FusionMode = "spatial-only" | "temporal-only" | "concat" | "idct" | "absorber";

export interface EncodeConfig {
  budget: number;
  anchors: number;
  kRaw?: number;
  groups?: number;
  kMax?: number;
  tau?: number;
  radius?: number;
  mode?: FusionMode;
  pool?: [number, number];
  summaryBudget?: number;
  staticCap?: number;
  staticGrid?: [number, number];
  epsRel?: number;
  /** Path to a `.frw` weights file; mutually exclusive with seed. */
  weightsPath?: string;
  /** Weight seed used when no weights file is given (default 0). */
  seed?: number;
}

export interface EncodeResult {
  tokens: TokenStream;
  /** Key-value pairs of the encode report printed by the CLI. */
  report: Record<string, string>;
}

export interface PlanConfig {
  budget: number;
  anchors: number;
  kRaw: number;
  groups: number;
  poolPositions: number;
  kMax: number;
  groupLength: number;
  summaryBudget?: number;
  staticBudget?: number;
}

export interface SpectrumRow {
  coeff: number;
  meanEnergy: number;
  cumulative: number;
}

export interface AnalyzeResult {
  rows: SpectrumRow[];
  degenerate: boolean;
  top5Ratio: number | null;
}

export type AnalyzeOptions =
  | { frlPath: string; anchors?: number; tau?: number; pool?: [number, number] }
  | {
      synthetic: SyntheticKind;
      seed?: number;
      frames?: number;
      grid?: [number, number];
      dim?: number;
      anchors?: number;
      tau?: number;
      pool?: [number, number];
    };

function parseKeyValues(text: string): Record<string, string> {
  const out: Record<string, string> = {};
  for (const line of text.split("\n")) {
    const eq = line.indexOf("=");
    if (line.startsWith("#") || eq < 0) continue;
    out[line.slice(0, eq)] = out[line.slice(0, eq)] ?? line.slice(eq + 1);
  }
  return out;
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "freres-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function encodeArgs(input: string, output: string, cfg: EncodeConfig): string[] {
  const args = ["encode", input, "--budget", String(cfg.budget), "--anchors", String(cfg.anchors)];
  if (cfg.kRaw !== undefined) args.push("--kraw", String(cfg.kRaw));
  if (cfg.groups !== undefined) args.push("--groups", String(cfg.groups));
  if (cfg.kMax !== undefined) args.push("--kmax", String(cfg.kMax));
  if (cfg.tau !== undefined) args.push("--tau", String(cfg.tau));
  if (cfg.radius !== undefined) args.push("--radius", String(cfg.radius));
  if (cfg.mode !== undefined) args.push("--mode", cfg.mode);
  if (cfg.pool !== undefined) args.push("--pool", `${cfg.pool[0]}x${cfg.pool[1]}`);
  if (cfg.summaryBudget !== undefined) args.push("--summary", String(cfg.summaryBudget));
  if (cfg.staticCap !== undefined) args.push("--static-cap", String(cfg.staticCap));
  if (cfg.staticGrid !== undefined) args.push("--static-grid", `${cfg.staticGrid[0]}x${cfg.staticGrid[1]}`);
  if (cfg.epsRel !== undefined) args.push("--eps-rel", String(cfg.epsRel));
  if (cfg.weightsPath !== undefined && cfg.seed !== undefined) {
    throw new ValidationError("pass either weightsPath or seed, not both");
  }
  if (cfg.weightsPath !== undefined) args.push("--weights", cfg.weightsPath);
  if (cfg.seed !== undefined) args.push("--seed", String(cfg.seed));
  args.push("-o", output);
  return args;
}

/** Generate a synthetic latent clip; returns its shape and float payload. */
export function generate(
  options: GenerateOptions,
  runner?: RunnerOptions
): { shape: LatentShape; values: Float32Array } {
  return withTempDir((dir) => {
    const out = options.outPath ?? join(dir, "clip.frl");
    const args = ["gen", "--kind", options.kind, "-o", out];
    if (options.frames !== undefined) args.push("--frames", String(options.frames));
    if (options.grid !== undefined) args.push("--grid", `${options.grid[0]}x${options.grid[1]}`);
    if (options.dim !== undefined) args.push("--dim", String(options.dim));
    if (options.seed !== undefined) args.push("--seed", String(options.seed));
    if (options.motionRate !== undefined) args.push("--motion-rate", String(options.motionRate));
    if (options.cutAt !== undefined) args.push("--cut-at", String(options.cutAt));
    runCli(args, runner);
    return decodeLatents(readFileSync(out));
  });
}

/** Normalize caller latents (typed array + shape, or nested arrays) to an `.frl` buffer. */
function latentsToBuffer(
  latents: Float32Array | NestedLatents,
  shape?: LatentShape
): Buffer {
  if (latents instanceof Float32Array) {
    if (!shape) {
      throw new ShapeError("a Float32Array needs an explicit {frames, rows, cols, dim} shape");
    }
    return encodeLatents(latents, shape);
  }
  const flat = flattenNested(latents);
  if (shape) {
    for (const key of ["frames", "rows", "cols", "dim"] as const) {
      if (shape[key] !== flat.shape[key]) {
        throw new ShapeError(
          `declared ${key}=${shape[key]} does not match nested array ${key}=${flat.shape[key]}`
        );
      }
    }
    flat.shape.fps = shape.fps ?? flat.shape.fps;
  }
  return encodeLatents(flat.values, flat.shape);
}

/** Run the full compression pipeline on caller-provided latents. */
export function encode(
  latents: Float32Array | NestedLatents,
  shape: LatentShape | undefined,
  config: EncodeConfig,
  runner?: RunnerOptions
): EncodeResult {
  const buf = latentsToBuffer(latents, shape);
  return withTempDir((dir) => {
    const input = join(dir, "in.frl");
    const output = join(dir, "out.tokens");
    writeFileSync(input, buf);
    const stdout = runCli(encodeArgs(input, output, config), runner);
    return {
      tokens: parseTokens(readFileSync(output, "utf-8")),
      report: parseKeyValues(stdout),
    };
  });
}

/** Run the pipeline on an existing `.frl` file without copying it. */
export function encodeFile(
  frlPath: string,
  config: EncodeConfig,
  runner?: RunnerOptions
): EncodeResult {
  return withTempDir((dir) => {
    const output = join(dir, "out.tokens");
    const stdout = runCli(encodeArgs(frlPath, output, config), runner);
    return {
      tokens: parseTokens(readFileSync(output, "utf-8")),
      report: parseKeyValues(stdout),
    };
  });
}

/** Resolve a budget allocation; numbers come back parsed. */
export function plan(config: PlanConfig, runner?: RunnerOptions): Record<string, number> {
  const args = [
    "plan",
    "--budget", String(config.budget),
    "--anchors", String(config.anchors),
    "--kraw", String(config.kRaw),
    "--groups", String(config.groups),
    "--pool", String(config.poolPositions),
    "--kmax", String(config.kMax),
    "--lgroup", String(config.groupLength),
  ];
  if (config.summaryBudget !== undefined) args.push("--summary", String(config.summaryBudget));
  if (config.staticBudget !== undefined) args.push("--static", String(config.staticBudget));
  const kv = parseKeyValues(runCli(args, runner));
  const out: Record<string, number> = {};
  for (const [k, v] of Object.entries(kv)) out[k] = Number(v);
  return out;
}

/** Residual-trajectory energy spectrum of a file or synthetic clip. */
export function analyze(options: AnalyzeOptions, runner?: RunnerOptions): AnalyzeResult {
  return withTempDir((dir) => {
    const out = join(dir, "spectrum.csv");
    const args = ["analyze"];
    if ("frlPath" in options) {
      args.push(options.frlPath);
    } else {
      args.push("--synthetic", options.synthetic);
      if (options.seed !== undefined) args.push("--seed", String(options.seed));
      if (options.frames !== undefined) args.push("--frames", String(options.frames));
      if (options.grid !== undefined) args.push("--grid", `${options.grid[0]}x${options.grid[1]}`);
      if (options.dim !== undefined) args.push("--dim", String(options.dim));
    }
    if (options.anchors !== undefined) args.push("--anchors", String(options.anchors));
    if (options.tau !== undefined) args.push("--tau", String(options.tau));
    if (options.pool !== undefined) args.push("--pool", `${options.pool[0]}x${options.pool[1]}`);
    args.push("-o", out);
    const stdout = runCli(args, runner);
    const rows: SpectrumRow[] = [];
    let degenerate = false;
    for (const line of readFileSync(out, "utf-8").split("\n")) {
      if (line.startsWith("# degenerate: true")) degenerate = true;
      if (!line || line.startsWith("#") || line.startsWith("coeff,")) continue;
      const [c, e, cum] = line.split(",");
      rows.push({ coeff: Number(c), meanEnergy: Number(e), cumulative: Number(cum) });
    }
    const m = stdout.match(/top5_ratio=([0-9.eE+-]+)/);
    return { rows, degenerate, top5Ratio: m ? Number(m[1]) : null };
  });
}

/**
 * Owning handle around a staged latent sequence.
 *
 * The sequence is copied into a private temp file once; repeated encodes
 * reuse it. After release() every method throws UseAfterReleaseError;
 * releasing twice is a no-op.
 */
export class SequenceHandle {
  #dir: string | null;
  readonly path: string;
  readonly shape: LatentShape;

  constructor(latents: Float32Array | NestedLatents, shape?: LatentShape) {
    const buf = latentsToBuffer(latents, shape);
    this.shape = decodeLatents(buf).shape;
    this.#dir = mkdtempSync(join(tmpdir(), "freres-handle-"));
    this.path = join(this.#dir, "seq.frl");
    writeFileSync(this.path, buf);
  }

  #alive(): void {
    if (this.#dir === null) {
      throw new UseAfterReleaseError("sequence handle was released");
    }
  }

  encode(config: EncodeConfig, runner?: RunnerOptions): EncodeResult {
    this.#alive();
    return encodeFile(this.path, config, runner);
  }

  analyze(
    options: Omit<Extract<AnalyzeOptions, { frlPath: string }>, "frlPath"> = {},
    runner?: RunnerOptions
  ): AnalyzeResult {
    this.#alive();
    return analyze({ frlPath: this.path, ...options }, runner);
  }

  get released(): boolean {
    return this.#dir === null;
  }

  release(): void {
    if (this.#dir !== null) {
      rmSync(this.#dir, { recursive: true, force: true });
      this.#dir = null;
    }
  }
}
