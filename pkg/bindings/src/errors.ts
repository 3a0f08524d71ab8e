/** Error types mirroring the core CLI's exit-code contract. */

export class FreresError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Input failed validation in the core (exit code 2). */
export class ValidationError extends FreresError {}

/** The token budget cannot cover the requested configuration (exit code 3). */
export class BudgetError extends FreresError {}

/** File I/O failed in the core (exit code 4). */
export class IoError extends FreresError {}

/** Caller-supplied array has the wrong rank, length, or a ragged shape. */
export class ShapeError extends FreresError {}

/** The CLI could not be launched or died without a recognized exit code. */
export class RunnerError extends FreresError {}

/** A handle was used after release(). */
export class UseAfterReleaseError extends FreresError {}

/** Map a CLI exit code plus stderr text to the matching error instance. */
export function errorForExit(code: number, stderr: string): FreresError {
  const detail = stderr.trim() || `exit code ${code}`;
  switch (code) {
    case 2:
      return new ValidationError(detail);
    case 3:
      return new BudgetError(detail);
    case 4:
      return new IoError(detail);
    default:
      return new RunnerError(detail);
  }
}
