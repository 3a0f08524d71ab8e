/** Locating and invoking the core CLI.
 *
 * The bindings never reimplement codec math; every operation shells out
 * to the `freres` command (or `python3 -m freres` as a fallback) and
 * exchanges data through the documented file formats.
 */

import { spawnSync } from "node:child_process";

import { errorForExit, RunnerError } from "./errors";

export interface RunnerOptions {
  /** Command vector to launch the CLI, e.g. ["freres"] or ["python3", "-m", "freres"]. */
  command?: string[];
  /** Milliseconds before the CLI call is aborted. */
  timeoutMs?: number;
}

let cachedCommand: string[] | null = null;

function probe(command: string[]): boolean {
  const r = spawnSync(command[0], [...command.slice(1), "--help"], {
    encoding: "utf-8",
    timeout: 30_000,
  });
  return r.status === 0;
}

/** Resolve the CLI command: explicit option, FRERES_CLI env, freres, python3 -m freres. */
export function resolveCommand(opts?: RunnerOptions): string[] {
  if (opts?.command) return opts.command;
  if (process.env.FRERES_CLI) return process.env.FRERES_CLI.split(" ");
  if (cachedCommand) return cachedCommand;
  for (const candidate of [["freres"], ["python3", "-m", "freres"]]) {
    if (probe(candidate)) {
      cachedCommand = candidate;
      return candidate;
    }
  }
  throw new RunnerError(
    "cannot locate the freres CLI; install the core package or set FRERES_CLI"
  );
}

/** Run one CLI subcommand; returns stdout, throwing the mapped core error on failure. */
export function runCli(args: string[], opts?: RunnerOptions): string {
  const command = resolveCommand(opts);
  const r = spawnSync(command[0], [...command.slice(1), ...args], {
    encoding: "utf-8",
    timeout: opts?.timeoutMs ?? 120_000,
  });
  if (r.error) {
    throw new RunnerError(`failed to launch ${command.join(" ")}: ${r.error.message}`);
  }
  if (r.status !== 0) {
    throw errorForExit(r.status ?? -1, r.stderr ?? "");
  }
  return r.stdout ?? "";
}
